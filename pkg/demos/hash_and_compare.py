"""
Hashing two vectors and comparing the digests
=============================================

A key fixes a prime p and one nonzero evaluation point per coordinate. A
vector x becomes the polynomial prod (1 - a_i z)^x_i, cut after degree t.
Comparing two digests runs a short extended Euclid and looks at the degree
of one cofactor.
"""

import numpy as np

from l1pph import HashKey, PredicateParams, one_sided, predicate_as, samp

# A toy key over Z_5 with four points.
key = HashKey(p=5, a=(1, 2, 3, 4), q=5, params=PredicateParams(t=5, t_plus=3, t_minus=2))
x = [2, 1, 0, 4]
y = [3, 0, 1, 4]

print("sigma_x        :", key.sigma(x))
print("digest of x    :", key.hash(x))
print("inverse digest :", key.invert(key.hash(x)))

# y rises by 2 and falls by 1 relative to x, so the predicate holds.
print("one-sided distances:", one_sided(x, y))
out = key.eval(key.invert(key.hash(x)), key.hash(y))
print("eval:", out)

# A realistic block: 784 gray pixels, threshold 1% of q*n, split evenly.
rng = np.random.default_rng(0)
params = PredicateParams.balanced(2007, delta=3)
key = samp(seed=1, n=784, q=256, params=params)
print(f"\np = {key.p}, digest = {key.digest_bits} bits against {784 * 8} for the raw image")

img = rng.integers(0, 256, 784)
near = np.clip(img + rng.integers(-1, 2, 784), 0, 255)
far = 255 - img

for name, other in [("near copy", near), ("inverted", far)]:
    truth = predicate_as(img, other, params)
    got = key.matches(img, other)
    print(f"{name:10s} distances {one_sided(img, other)}  predicate {truth}  eval {got}")
