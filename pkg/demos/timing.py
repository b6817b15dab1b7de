"""
Timing
======

Per-block times on the block layouts used for large images, and the
quadratic growth of eval in t.
"""

from l1pph import sim

rows = sim.bench(sim.TIMING_GRID[1:], reps=5)
print(f"{'size':8s} {'color':5s} {'B':>5s} {'n_B':>4s} {'t_B':>5s}  sigma     inverse   eval      (reference eval)")
for r in rows:
    print(f"{r['size']:8s} {r['color']:5s} {r['B']:5d} {r['n_B']:4d} {r['t_B']:5d}  "
          f"{r['time_sigma']:.4f}s  {r['time_inv']:.4f}s  {r['time_eval']:.4f}s  ({r['reference'][2]}s)")

exponent, pts = sim.eval_scaling()
for t, s in pts:
    print(f"t={t:5d}  eval {1e3 * s:7.2f} ms")
print(f"fitted exponent {exponent:.2f}")
