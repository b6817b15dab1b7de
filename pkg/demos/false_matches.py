"""
How often does a far pair slip through?
=======================================

Pairs that violate the predicate can still be accepted. The slack delta
controls this: eval accepts only when the cofactor degree is at most
t_minus - delta. Here y sits just outside both thresholds.
"""

from l1pph import sim

TRIALS = 20_000

print("match rate, y exactly at the boundary")
print(sim.to_csv(sim.DELTA_HEADER, sim.simulate_delta_sweep(10, 5, 11, 10, 5, 5, [0, 1, 2], TRIALS, seed=1)))

# When y sits exactly at the boundary the numerator of sigma_y / sigma_x has
# degree t_plus, so the stopping remainder r_(k-1) is pinned and no far pair
# ever matches. Letting y overshoot by a few units exposes real false matches.
print("match rate, y overshooting by up to 3 units")
print(sim.to_csv(sim.DELTA_HEADER,
                 sim.simulate_delta_sweep(10, 5, 11, 10, 5, 5, [0, 1, 2], TRIALS, seed=1, excess=3)))

# The quantity behind delta: how often the last quotient has degree > delta.
print("P[deg q_(k+1) >= delta + 1]")
print(sim.to_csv(sim.DELTA_HEADER,
                 sim.simulate_delta_sweep(10, 5, 11, 10, 5, 5, [0, 1, 2], TRIALS, seed=1,
                                          statistic="quotient")))

print("same, larger field p = 31")
print(sim.to_csv(sim.DELTA_HEADER,
                 sim.simulate_delta_sweep(10, 5, 31, 10, 5, 5, [1, 2], TRIALS, seed=1, excess=3)))
