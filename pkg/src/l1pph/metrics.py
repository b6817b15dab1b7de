"""Vector metrics on pixel vectors and the asymmetric l1 predicate oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, sqrt

import numpy as np


class DimensionMismatchError(ValueError):
    pass


class ParamsInvalid(ValueError):
    pass


@dataclass(frozen=True)
class PredicateParams:
    """Thresholds of the asymmetric l1 predicate.

    ``t_plus`` bounds ||y -. x||_1 strictly, ``t_minus - delta`` bounds
    ||x -. y||_1 inclusively.
    """

    t: int
    t_plus: int
    t_minus: int
    delta: int = 0

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ParamsInvalid(f"t must be positive, got {self.t}")
        if self.t_plus < 1:
            raise ParamsInvalid("t_plus must be at least 1 (t_plus = 0 admits no pair)")
        if self.t_minus < 0 or self.delta < 0:
            raise ParamsInvalid("t_minus and delta must be nonnegative")
        if self.t_plus + self.t_minus != self.t:
            raise ParamsInvalid(
                f"t_plus + t_minus must equal t ({self.t_plus} + {self.t_minus} != {self.t})"
            )
        if self.delta > self.t_minus:
            raise ParamsInvalid(f"delta={self.delta} exceeds t_minus={self.t_minus}")

    @classmethod
    def balanced(cls, t: int, delta: int = 3) -> "PredicateParams":
        """t_plus = ceil(t/2), t_minus = floor(t/2); delta clipped to t_minus."""
        t_minus = t // 2
        return cls(t, t - t_minus, t_minus, min(delta, t_minus))

    @property
    def minus_bound(self) -> int:
        return self.t_minus - self.delta


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shape mismatch: {x.shape} vs {y.shape}")
    return x, y


def dotdiv(x, y) -> np.ndarray:
    """Element-wise max(0, x_i - y_i)."""
    x, y = _pair(x, y)
    return np.maximum(x - y, 0)


def norm(x, kind: str = "l1"):
    """l0, l1 and linf are exact ints; l2 is the float root of the exact square."""
    x = np.asarray(x, dtype=np.int64)
    if kind == "l0":
        return int(np.count_nonzero(x))
    if kind == "l1":
        return int(np.abs(x).sum())
    if kind == "l2":
        return sqrt(squared_l2(x))
    if kind == "linf":
        return int(np.abs(x).max()) if x.size else 0
    raise ValueError(f"unknown norm {kind!r}")


def squared_l2(x) -> int:
    x = np.asarray(x, dtype=np.int64)
    return int((x * x).sum())


def one_sided(x, y) -> tuple[int, int]:
    """(||y -. x||_1, ||x -. y||_1)."""
    x, y = _pair(x, y)
    d = y - x
    return int(d[d > 0].sum()), int(-d[d < 0].sum())


def predicate_as(x, y, params: PredicateParams) -> int:
    """Ground truth for eval; ``x`` is the reference (database) image."""
    up, down = one_sided(x, y)
    return int(up < params.t_plus and down <= params.t_minus - params.delta)


def predicate_l1(x, y, t: int) -> int:
    """Symmetric predicate ||x - y||_1 <= t, kept for comparison only."""
    x, y = _pair(x, y)
    return int(np.abs(x - y).sum() <= t)


def nad(x, y, q: int) -> float:
    """Normalized asymmetric l1 distance, in percent of q*n."""
    up, down = one_sided(x, y)
    n = np.asarray(x).size
    return 100.0 * max(up, down) / (q * n)


def threshold_from_nad(nad_pct, q: int, n: int) -> int:
    """Largest t with t/2 <= q*n*NAD/100, i.e. floor(q*n*NAD/50).

    Decimal inputs are read exactly, so 1.1277 is 11277/10000.
    """
    v = Fraction(str(nad_pct)) if isinstance(nad_pct, float) else Fraction(nad_pct)
    if v < 0:
        raise ValueError("NAD must be nonnegative")
    return floor(v * q * n / 50)


def pixel_change_ratio(x, y) -> float:
    """Percentage of coordinates whose value changed."""
    x, y = _pair(x, y)
    return 100.0 * int(np.count_nonzero(x != y)) / x.size
