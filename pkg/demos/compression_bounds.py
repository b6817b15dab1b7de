"""
How small can a digest be?
==========================

Lower bounds on the digest size of any such hash, for two regimes of t,
next to what this construction actually uses. Then the size of an l1 ball,
which is why decoding a list of candidates is hopeless.
"""

from l1pph import bounds, sim

print(bounds.rows_to_csv(bounds.compression_table()))

# Ball sizes around 0: exact count against the two closed forms.
print("n q t  lower  exact  upper")
for n, q, t in [(2, 3, 2), (2, 2, 2), (3, 4, 5), (3, 5, 9)]:
    lower, upper = bounds.ball_bounds(n, q, t)
    print(n, q, t, lower, bounds.ball_size_exact(n, q, t), upper)

# A 28x28 image already has 2^63 neighbours within distance 266.
for n, t, v in sim.list_size_curve([784, 4096], 256, [257, 260, 266]):
    print(f"n={n:5d} t={t}  log2 |ball| >= {v:.1f}")

mc = sim.center_distance_mc(n=784, draws=20_000, seed=0)
print(f"\nmean distance to the centre {mc['mean']:.0f} (qn/4 = {mc['expected']:.0f}), "
      f"within t={mc['threshold']}: {100 * mc['coverage']:.1f}% of draws")
