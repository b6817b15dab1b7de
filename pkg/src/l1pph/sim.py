"""Experiment harness: false-match rates, empirical error, coefficient checks,
list-size curves, Monte-Carlo ball coverage and timing.

All randomness flows from integer seeds through ``numpy.random.SeedSequence``,
so a fixed seed reproduces every CSV bit for bit. Trial loops are split into
a fixed number of shards with spawned child seeds; the worker count only
changes how shards are scheduled, never the result.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from .bounds import large_t_threshold, log2_list_size_lower
from .field import is_prime
from .imaging import Q, timing_block
from .metrics import PredicateParams, one_sided, predicate_as
from .poly import Poly
from .pph import HashKey, sample_points, samp

SHARDS = 8

DELTA_HEADER = ["delta", "p", "trials", "empirical", "reference"]
ERROR_HEADER = ["t", "err"]
BENCH_HEADER = ["size", "color", "B", "n_B", "t_B", "time_sigma", "time_inv", "time_eval"]
CURVE_HEADER = ["n", "t", "log2_size"]

#: Per-block seconds reference figures for the timing grid (sigma, sigma+inverse, eval).
REFERENCE_TIMES = {
    ("224x224", "rgb"): (0.0235, 0.0963, 0.0128),
    ("128x128", "rgb"): (0.1238, 0.3712, 0.0455),
    ("64x64", "rgb"): (0.0185, 0.0777, 0.0101),
    ("28x28", "rgb"): (0.0436, 0.1584, 0.0204),
    ("28x28", "gray"): (0.2596, 0.6667, 0.0784),
}

#: (size, color, n, B) of the timing grid.
TIMING_GRID = [
    ("224x224", "rgb", 150528, 1000),
    ("128x128", "rgb", 49152, 100),
    ("64x64", "rgb", 12288, 100),
    ("28x28", "rgb", 2352, 10),
    ("28x28", "gray", 784, 1),
]


class ConstructionFailure(RuntimeError):
    pass


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class TrialConfig:
    n: int
    q: int
    p: int
    t: int
    t_plus: int
    t_minus: int
    delta: int
    trials: int
    seed: int = 0
    excess: int = 0

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p <= self.n:
            raise ValueError(f"p={self.p} must be a prime above n={self.n}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.q < 2:
            raise ValueError("q must be at least 2")
        self.params  # validates the split

    @property
    def params(self) -> PredicateParams:
        return PredicateParams(self.t, self.t_plus, self.t_minus, self.delta)

    @property
    def reference(self) -> float:
        return float(self.p) ** -self.delta


def _push(y, up: int, down: int, q: int, rng, x) -> bool:
    """Move ``up`` units upward and ``down`` units downward, never both on one
    coordinate and never past the alphabet. Returns False when stuck."""
    n = y.size
    for _ in range(up):
        ok = np.flatnonzero((y >= x) & (y < q - 1))
        if ok.size == 0:
            return False
        y[ok[rng.integers(ok.size)]] += 1
    for _ in range(down):
        ok = np.flatnonzero((y <= x) & (y > 0))
        if ok.size == 0:
            return False
        y[ok[rng.integers(ok.size)]] -= 1
    return n > 0


def construct_far_pair(n: int, q: int, params: PredicateParams, rng, attempts: int = 100, excess: int = 0):
    """x uniform in Z_q^n and y with ||y -. x||_1 >= t_plus and ||x -. y||_1 > t_minus.

    The distances are exactly t_plus and t_minus + 1, plus a uniform extra of
    0..``excess`` units on each side.
    """
    for _ in range(attempts):
        up = params.t_plus + int(rng.integers(0, excess + 1))
        down = params.t_minus + 1 + int(rng.integers(0, excess + 1))
        x = rng.integers(0, q, n)
        y = x.copy()
        if _push(y, up, down, q, rng, x):
            return x, y
    raise ConstructionFailure(
        f"could not realise distances ({params.t_plus}, {params.t_minus + 1}) in Z_{q}^{n}"
    )


def construct_near_pair(n: int, q: int, params: PredicateParams, rng, attempts: int = 100):
    """A pair with P_as = 1: random up < t_plus and down <= t_minus - delta."""
    up = int(rng.integers(0, params.t_plus))
    down = int(rng.integers(0, params.minus_bound + 1))
    for _ in range(attempts):
        x = rng.integers(0, q, n)
        y = x.copy()
        if _push(y, up, down, q, rng, x):
            return x, y
    raise ConstructionFailure(f"could not realise distances ({up}, {down}) in Z_{q}^{n}")


def _delta_shard(cfg: TrialConfig, trials: int, seed_seq, control: bool, statistic: str) -> int:
    rng = np.random.default_rng(seed_seq)
    params = cfg.params
    hits = 0
    pts = np.arange(1, cfg.p, dtype=np.int64)
    for _ in range(trials):
        a = tuple(int(v) for v in rng.permutation(pts)[: cfg.n])
        key = HashKey(cfg.p, a, cfg.q, params)
        if control:
            x, y = construct_near_pair(cfg.n, cfg.q, params, rng)
        else:
            x, y = construct_far_pair(cfg.n, cfg.q, params, rng, excess=cfg.excess)
        out = key.eval(key.invert(key.hash(x)), key.hash(y))
        if statistic == "matched":
            hits += out.matched
        else:
            hits += out.quotient_degree >= cfg.delta + 1
    return hits


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (i < extra) for i in range(parts)]


def simulate_delta(cfg: TrialConfig, control: bool = False, jobs: int = 1,
                   statistic: str = "matched") -> tuple[float, float]:
    """(empirical rate, p^-delta) over fresh keys and far pairs.

    ``statistic="matched"`` counts eval returning 1. ``"quotient"`` counts
    deg q_(k+1) >= delta + 1 at the stopping round instead, which is 1 for
    delta = 0. With ``control=True`` the pairs satisfy the predicate, so the
    match rate must be exactly 1.
    """
    if statistic not in ("matched", "quotient"):
        raise ValueError(f"unknown statistic {statistic!r}")
    counts = _split(cfg.trials, SHARDS)
    seeds = np.random.SeedSequence(cfg.seed).spawn(SHARDS)
    jobs_ = [(cfg, c, s, control, statistic) for c, s in zip(counts, seeds) if c]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            hits = sum(pool.map(lambda j: _delta_shard(*j), jobs_))
    else:
        hits = sum(_delta_shard(*j) for j in jobs_)
    return hits / cfg.trials, cfg.reference


def simulate_delta_sweep(n, q, p, t, t_plus, t_minus, deltas, trials, seed=0, jobs=1,
                         control=False, statistic="matched", excess=0) -> list[tuple]:
    """Rows (delta, p, trials, empirical, reference); t_minus is fixed and the
    test bound becomes t_minus - delta."""
    rows = []
    for d in deltas:
        cfg = TrialConfig(n, q, p, t, t_plus, t_minus, d, trials, seed, excess)
        rate, ref = simulate_delta(cfg, control=control, jobs=jobs, statistic=statistic)
        rows.append((d, p, trials, rate, ref))
    return rows


def _stack(images) -> np.ndarray:
    xs = [np.asarray(getattr(im, "data", im), dtype=np.int64).ravel() for im in images]
    if len({x.size for x in xs}) > 1:
        raise ValueError("all images must have the same length")
    return np.array(xs)


def empirical_error(images, params: PredicateParams, via: str = "oracle", key: HashKey | None = None) -> float:
    """Fraction of pairs i < j with P_as(x_i, x_j) = 1.

    ``via="eval"`` decides each pair from digests instead, under ``key``.
    """
    xs = _stack(images)
    N = len(xs)
    if N < 2:
        raise ValueError("need at least two images")
    if via == "oracle":
        hits = sum(predicate_as(xs[i], xs[j], params) for i in range(N) for j in range(i + 1, N))
    elif via == "eval":
        if key is None:
            raise ValueError("eval route needs a key")
        key = key.with_params(params)
        digests = [key.hash(x) for x in xs]
        invs = [key.invert(d) for d in digests]
        hits = sum(key.eval(invs[i], digests[j]).matched for i in range(N) for j in range(i + 1, N))
    else:
        raise ValueError(f"unknown route {via!r}")
    return hits / comb(N, 2)


def empirical_error_sweep(images, ts, delta: int = 3) -> list[tuple[int, float]]:
    """Rows (t, err) with t_plus = t_minus = t/2 (odd t rounds t_plus up)."""
    xs = _stack(images)
    N = len(xs)
    if N < 2:
        raise ValueError("need at least two images")
    dist = [one_sided(xs[i], xs[j]) for i in range(N) for j in range(i + 1, N)]
    rows = []
    for t in ts:
        prm = PredicateParams.balanced(t, delta)
        hits = sum(up < prm.t_plus and down <= prm.minus_bound for up, down in dist)
        rows.append((t, hits / len(dist)))
    return rows


def graded_corpus(n: int, q: int, count: int, seed: int = 0, step: int = 2) -> np.ndarray:
    """A base image plus ``count - 1`` copies perturbed by growing amounts.

    Copy k changes about k * step randomly chosen coordinates by +-1..+-3,
    so pairwise distances spread over a wide range.
    """
    rng = np.random.default_rng(seed)
    base = rng.integers(0, q, n)
    out = [base]
    for k in range(1, count):
        y = base.copy()
        idx = rng.choice(n, size=min(n, k * step), replace=False)
        y[idx] = np.clip(y[idx] + rng.choice([-3, -2, -1, 1, 2, 3], size=idx.size), 0, q - 1)
        out.append(y)
    return np.array(out)


def symmetric_sum_coeffs(x, a, p: int) -> list[int]:
    """A_j = (-1)^j S(j, n) mod p for j = 0..||x||_1, via the column recursion.

    S(j, m) sums over the last m coordinates:
    S(j, m) = sum_i C(x_k, i) a_k^i S(j - i, m - 1) with k = n - m + 1,
    S(0, 0) = 1 and S(j, 0) = 0 for j >= 1. Integers stay exact until the end.
    """
    x = [int(v) for v in x]
    a = [int(v) for v in a]
    if len(x) != len(a):
        raise ValueError("x and a differ in length")
    total = sum(x)
    S = [1] + [0] * total
    for xk, ak in zip(reversed(x), reversed(a)):
        nxt = [0] * (total + 1)
        for j in range(total + 1):
            acc = 0
            for i in range(min(xk, j) + 1):
                acc += comb(xk, i) * ak**i * S[j - i]
            nxt[j] = acc
        S = nxt
    return [(-1) ** j * S[j] % p for j in range(total + 1)]


def relabel_check(key: HashKey, x) -> int:
    """1 when the recursion reproduces every coefficient of the full product."""
    x = np.asarray(x, dtype=np.int64).ravel()
    if int(x.sum()) > 64:
        raise ValueError("||x||_1 must be at most 64 for a full expansion")
    rec = symmetric_sum_coeffs(x, key.a, key.p)
    prod = Poly.one(key.p)
    for ai, xi in zip(key.a, x):
        for _ in range(int(xi)):
            prod = prod * Poly((1, -ai), key.p)
    return int(Poly(rec, key.p) == prod)


def _median_time(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def _far_digests(key: HashKey, rng):
    x, y = construct_far_pair(key.n, key.q, key.params, rng)
    inv = key.invert(key.hash(x))
    return x, inv, key.hash(y)


def bench(grid=TIMING_GRID, reps: int = 10, seed: int = 0, delta: int = 3) -> list[dict]:
    """Median per-block timings on the grid, with eval on a non-matching pair.

    Each row also carries the reference figures and a flag when a measured
    time exceeds ten times the reference one.
    """
    rows = []
    rng = np.random.default_rng(seed)
    for size, color, n, B in grid:
        n_B, t_B = timing_block(n, B)
        params = PredicateParams.balanced(t_B, delta)
        key = samp(seed, n_B, Q, params)
        x, inv, d_y = _far_digests(key, rng)
        key.eval(inv, d_y)  # warm the compiled kernels
        ts = _median_time(lambda: key.hash(x), reps)
        ti = _median_time(lambda: key.invert(key.hash(x)), reps)
        te = _median_time(lambda: key.eval(inv, d_y), reps)
        ref = REFERENCE_TIMES.get((size, color))
        slow = ref is not None and any(m > 10 * r for m, r in zip((ts, ti, te), ref))
        rows.append(
            dict(size=size, color=color, B=B, n_B=n_B, t_B=t_B, time_sigma=ts, time_inv=ti,
                 time_eval=te, reference=ref, regression=slow)
        )
    return rows


def eval_scaling(ts=(256, 512, 1024, 2048), p: int = 787, n: int = 784, q: int = Q,
                 reps: int = 10, seed: int = 0, delta: int = 3) -> tuple[float, list[tuple[int, float]]]:
    """Least-squares exponent of median eval time against t on far pairs."""
    rng = np.random.default_rng(seed)
    a = sample_points(seed, n, p)
    rows = []
    for t in ts:
        key = HashKey(p, a, q, PredicateParams.balanced(t, delta), seed)
        _, inv, d_y = _far_digests(key, rng)
        key.eval(inv, d_y)
        rows.append((t, _median_time(lambda: key.eval(inv, d_y), reps)))
    if len(rows) < 2:
        return float("nan"), rows
    slope = np.polyfit(np.log([r[0] for r in rows]), np.log([r[1] for r in rows]), 1)[0]
    return float(slope), rows


def list_size_curve(n_grid, q: int, t_range) -> list[tuple[int, int, float]]:
    """Rows (n, t, log2 of the list-size lower bound) for t > q."""
    return [(n, t, log2_list_size_lower(n, q, t)) for n in n_grid for t in t_range]


def center_distance_mc(n: int = 784, q: int = Q, draws: int = 100_000, seed: int = 0,
                       chunk: int = 2000) -> dict:
    """Distance from uniform x to the centre (q/2, ..., q/2).

    Reports the sample mean against qn/4 and the fraction of draws within
    ``large_t_threshold(n, q)``.
    """
    if q % 2:
        raise ValueError("q must be even")
    rng = np.random.default_rng(seed)
    t = large_t_threshold(n, q)
    total = 0
    inside = 0
    done = 0
    while done < draws:
        m = min(chunk, draws - done)
        d = np.abs(rng.integers(0, q, (m, n)) - q // 2).sum(axis=1)
        total += int(d.sum())
        inside += int((d <= t).sum())
        done += m
    return dict(n=n, q=q, draws=draws, mean=total / draws, expected=q * n / 4,
                threshold=t, coverage=inside / draws)
