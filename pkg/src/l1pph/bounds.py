"""Compression bounds for l1-distance PPH families and l1-ball sizes.

Everything is evaluated with exact integer binomials; only the final
log2 goes through floating point, on a 64-bit mantissa window.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, floor, log2, sqrt

from .field import next_prime


class OddAlphabet(ValueError):
    pass


class TooLarge(ValueError):
    pass


class ThresholdTooSmall(ValueError):
    pass


def binom(n: int, k: int) -> int:
    """C(n, k), taken as 0 when either index is negative."""
    if n < 0 or k < 0:
        return 0
    return comb(n, k)


def log2_int(v: int) -> float:
    """log2 of a positive integer of any size."""
    if v <= 0:
        raise ValueError("log2 of a nonpositive integer")
    bl = v.bit_length()
    if bl <= 64:
        return log2(v)
    return (bl - 64) + log2(v >> (bl - 64))


def ball_bounds(n: int, q: int, t: int) -> tuple[int, int]:
    """(C(n+t, t) - C(n-1+t-q, t-q), C(n+t, t)) for the ball around 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    upper = binom(n + t, t)
    return upper - binom(n - 1 + t - q, t - q), upper


def ball_center_upper(n: int, q: int, t: int) -> int:
    """C(n+t+1, t+1), bounding the ball around (q/2, ..., q/2)."""
    if q % 2:
        raise OddAlphabet(f"q={q} must be even")
    return binom(n + t + 1, t + 1)


def ball_size_exact(n: int, q: int, t: int) -> int:
    """|B_1(0, q, t)| by inclusion-exclusion over coordinates exceeding q-1."""
    if t < 0:
        return 0
    return sum(
        (-1) ** k * comb(n, k) * binom(n + t - k * q, n) for k in range(min(n, t // q) + 1)
    )


def ball_bruteforce(n: int, q: int, t: int, center=None) -> int:
    """Count vectors of Z_q^n within l1 distance t of ``center`` by enumeration."""
    if q**n > 10**6:
        raise TooLarge(f"q^n = {q ** n} exceeds the enumeration budget")
    c = tuple(center) if center is not None else (0,) * n
    if len(c) != n:
        raise ValueError("center has the wrong length")
    return sum(
        1
        for v in itertools.product(range(q), repeat=n)
        if sum(abs(a - b) for a, b in zip(v, c)) <= t
    )


@lru_cache(maxsize=64)
def log2_binom(n: int, k: int) -> float:
    """log2 C(n, k) from the exact integer; cached since large rows are slow."""
    return log2_int(binom(n, k))


def large_t_threshold(n: int, q: int) -> int:
    """ceil((1/4 + 1/(2 sqrt(2n))) q n)."""
    return ceil((0.25 + 1 / (2 * sqrt(2 * n))) * q * n)


@dataclass(frozen=True)
class BoundRow:
    regime: str
    color: str
    t: int
    n: int
    baseline_bits: int
    m_bits: int

    @property
    def compression_pct(self) -> float:
        return 100.0 * self.m_bits / self.baseline_bits

    def as_dict(self) -> dict:
        d = asdict(self)
        d["compression_pct"] = round(self.compression_pct, 3)
        return d


def _baseline(n: int, q: int) -> int:
    b = n * log2(q)
    return int(b) if b == int(b) else floor(b)


def bound_large_t(n: int, q: int, color: str = "gray") -> BoundRow:
    """m >= n log2 q - log2 C(n+t+1, t+1), t from ``large_t_threshold``."""
    if q % 2:
        raise OddAlphabet(f"q={q} must be even")
    t = large_t_threshold(n, q)
    m = floor(n * log2(q) - log2_binom(n + t + 1, t + 1))
    return BoundRow("large_t", color, t, n, _baseline(n, q), m)


def bound_small_t(n: int, q: int, t: int, color: str = "gray") -> BoundRow:
    """m >= (q-1) log2(1 + (n-1)/t) + log2 C(n-1+t-q, t-q), truncated."""
    if t < 1:
        raise ValueError("t must be positive")
    v = (q - 1) * log2(1 + (n - 1) / t)
    tail = binom(n - 1 + t - q, t - q)
    if tail > 0:
        v += log2_int(tail)
    return BoundRow("small_t", color, t, n, _baseline(n, q), floor(v))


def scheme_digest_bits(n: int, t: int, mode: str = "exact") -> int:
    """Digest size: (t+1) ceil(log2 p) exactly, or floor(t log2 n) as tabulated."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if mode == "exact":
        return (t + 1) * ceil(log2(next_prime(max(n, 2))))
    if mode == "table":
        return floor(t * log2(n))
    raise ValueError(f"unknown mode {mode!r}")


def scheme_row(n: int, q: int, t: int, color: str = "gray", mode: str = "table") -> BoundRow:
    return BoundRow("scheme", color, t, n, _baseline(n, q), scheme_digest_bits(n, t, mode))


def list_size_lower(n: int, q: int, t: int) -> int:
    """floor((1 + (n-1)/(t-q))^(t-q)), a lower bound on |B_1(x, q, t)|."""
    if t <= q:
        raise ThresholdTooSmall(f"need t > q (got t={t}, q={q})")
    e = t - q
    return floor(Fraction(n - 1 + e, e) ** e)


def log2_list_size_lower(n: int, q: int, t: int) -> float:
    if t <= q:
        raise ThresholdTooSmall(f"need t > q (got t={t}, q={q})")
    e = t - q
    return e * log2(1 + (n - 1) / e)


#: Image sizes of the compression table, as (label, color, n).
IMAGE_SIZES = [
    (f"{s}x{s}{'x3' if c == 'rgb' else ''}", c, s * s * (3 if c == "rgb" else 1))
    for c in ("rgb", "gray")
    for s in (28, 64, 128, 224)
]


def compression_table(q: int = 256) -> list[BoundRow]:
    """Large-t bounds, small-t bounds (t = floor(n/10)) and scheme sizes."""
    rows = [bound_large_t(n, q, c) for _, c, n in IMAGE_SIZES]
    rows += [bound_small_t(n, q, n // 10, c) for _, c, n in IMAGE_SIZES]
    rows += [scheme_row(n, q, n // 10, c) for _, c, n in IMAGE_SIZES]
    return rows


CSV_HEADER = ["regime", "color", "t", "n", "baseline", "m", "compression"]


def rows_to_csv(rows: list[BoundRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.regime, r.color, r.t, r.n, r.baseline_bits, r.m_bits, f"{r.compression_pct:.3f}"])
    return buf.getvalue()
