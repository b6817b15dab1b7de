"""Property-preserving hash for the asymmetric l1-distance predicate.

A key fixes a prime ``p > n`` and ``n`` distinct nonzero evaluation points
``a``. An image ``x`` hashes to its sigma-polynomial

    sigma_x(z) = prod_i (1 - a_i z)^(x_i)   (mod z^(t+1))

and two digests are compared by solving the truncated key equation with the
extended Euclidean algorithm, stopping at the first remainder of degree
below ``t_plus``. The pair matches when the cofactor u_k has degree at most
``t_minus - delta``. Matches are never missed when the predicate holds;
false matches occur with probability around p^-delta.

Example
-------
>>> key = HashKey(p=5, a=(1, 2, 3, 4), q=5, params=PredicateParams(5, 3, 2, 0))
>>> x, y = [2, 1, 0, 4], [3, 0, 1, 4]
>>> key.eval(key.invert(key.hash(x)), key.hash(y)).matched
1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2

import numpy as np

from . import _kernels
from .field import is_prime, next_prime
from .metrics import DimensionMismatchError, PredicateParams
from .poly import MINUS_INF, Degree, NotInvertibleError, Poly


class KeyMismatch(ValueError):
    """Digests or databases were produced under incompatible keys."""


class DigestError(ValueError):
    """A digest is malformed (wrong length, bad constant term, corrupt)."""


def element_width(p: int) -> int:
    """Bytes per coefficient on the wire: the smallest of 2, 4, 8 holding p - 1."""
    for w in (2, 4, 8):
        if p - 1 < 1 << (8 * w):
            return w
    raise OverflowError(f"p={p} does not fit in 64 bits")


_WIRE_DTYPES = {2: "<u2", 4: "<u4", 8: "<u8"}


def pack_elements(values, p: int) -> bytes:
    w = element_width(p)
    return np.asarray([int(v) for v in values], dtype=np.uint64).astype(_WIRE_DTYPES[w]).tobytes()


def unpack_elements(buf: bytes, count: int, p: int, offset: int = 0) -> np.ndarray:
    w = element_width(p)
    raw = np.frombuffer(buf, dtype=_WIRE_DTYPES[w], count=count, offset=offset)
    if np.any(raw >= np.uint64(p)):
        raise DigestError("coefficient out of range for the field")
    return _kernels.as_coeffs(raw.astype(np.uint64).tolist(), p)


@dataclass(frozen=True, eq=False)
class _Coeffs:
    coeffs: np.ndarray
    p: int

    def __post_init__(self) -> None:
        arr = _kernels.as_coeffs(self.coeffs, self.p)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def t(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is type(self)
            and self.p == other.p
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.coeffs.tolist()}, p={self.p})"

    def to_poly(self) -> Poly:
        return Poly.from_array(self.coeffs, self.p)

    def to_bytes(self) -> bytes:
        return pack_elements(self.coeffs, self.p)

    @classmethod
    def from_bytes(cls, buf: bytes, p: int, t: int, offset: int = 0):
        return cls(unpack_elements(buf, t + 1, p, offset), p)


class Digest(_Coeffs):
    """sigma_x mod z^(t+1); the constant term is always 1."""


class InverseDigest(_Coeffs):
    """sigma_x^-1 mod z^(t+1), the form kept in a database."""


@dataclass(frozen=True)
class EvalOutcome:
    matched: int
    k: int
    deg_r_k: Degree
    deg_r_prev: Degree
    deg_u_k: int

    @property
    def quotient_degree(self) -> Degree:
        """deg q_{k+1} = deg r_{k-1} - deg r_k."""
        return self.deg_r_prev - self.deg_r_k


@dataclass(frozen=True)
class HashKey:
    """A sampled hash function together with its predicate parameters."""

    p: int
    a: tuple[int, ...]
    q: int
    params: PredicateParams
    seed: int | None = None
    _a_arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        a = tuple(int(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.p <= len(a):
            raise ValueError(f"p={self.p} must exceed n={len(a)}")
        if len(set(a)) != len(a) or any(not 0 < v < self.p for v in a):
            raise ValueError("a must hold distinct elements of Z_p - {0}")
        if self.q < 2:
            raise ValueError("q must be at least 2")
        arr = _kernels.as_coeffs(a, self.p)
        arr.setflags(write=False)
        object.__setattr__(self, "_a_arr", arr)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def t(self) -> int:
        return self.params.t

    @property
    def digest_bits(self) -> int:
        """(t + 1) * ceil(log2 p), the bit-packed digest size."""
        return (self.t + 1) * ceil(log2(self.p))

    def with_params(self, params: PredicateParams) -> "HashKey":
        return HashKey(self.p, self.a, self.q, params, self.seed)

    def _vector(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64).ravel()
        if x.size != self.n:
            raise DimensionMismatchError(f"expected {self.n} values, got {x.size}")
        if x.size and (x.min() < 0 or x.max() >= self.q):
            raise ValueError(f"values must lie in [0, {self.q - 1}]")
        return x

    def sigma(self, x) -> Poly:
        """The untruncated sigma-polynomial of ``x`` (for checks on small inputs)."""
        x = self._vector(x)
        out = Poly.one(self.p)
        for ai, xi in zip(self.a, x):
            for _ in range(int(xi)):
                out = out * Poly((1, -ai), self.p)
        return out

    def hash(self, x) -> Digest:
        x = self._vector(x)
        return Digest(_kernels.sigma_trunc(x, self._a_arr, self.t, self.p), self.p)

    def invert(self, d: Digest) -> InverseDigest:
        self._check_len(d)
        if int(d.coeffs[0]) != 1:
            raise NotInvertibleError("digest constant term is not 1; digest is corrupt")
        return InverseDigest(_kernels.inv_trunc(d.coeffs, self.t, self.p), self.p)

    def eval(self, inv_x: InverseDigest, d_y: Digest) -> EvalOutcome:
        """Decide the predicate for (x, y) from sigma_x^-1 and sigma_y."""
        self._check_len(inv_x)
        self._check_len(d_y)
        t, p = self.t, self.p
        sigma_tilde = _kernels.mul_trunc(inv_x.coeffs, d_y.coeffs, t, p)
        if int(sigma_tilde[0]) == 0:
            raise DigestError("sigma_x^-1 * sigma_y has zero constant term; digest is corrupt")
        k, dr, dr_prev, du = _kernels.eea_stop(sigma_tilde, t, self.params.t_plus, p)
        return EvalOutcome(
            matched=int(du <= self.params.minus_bound),
            k=k,
            deg_r_k=dr if dr >= 0 else MINUS_INF,
            deg_r_prev=dr_prev,
            deg_u_k=du,
        )

    def matches(self, x, y) -> int:
        """Hash both vectors and evaluate; convenience for experiments."""
        return self.eval(self.invert(self.hash(x)), self.hash(y)).matched

    def _check_len(self, d: _Coeffs) -> None:
        if d.p != self.p or len(d) != self.t + 1:
            raise KeyMismatch(
                f"digest (p={d.p}, length {len(d)}) does not fit key (p={self.p}, t={self.t})"
            )


def sample_points(seed: int, n: int, p: int) -> tuple[int, ...]:
    """First n entries of a seeded shuffle of 1..p-1."""
    rng = np.random.default_rng(seed)
    return tuple(int(v) for v in rng.permutation(np.arange(1, p, dtype=np.int64))[:n])


def samp(seed: int, n: int, q: int, params: PredicateParams) -> HashKey:
    """Sample a key: p is the first prime after n (after 2 when n = 1)."""
    if n < 1 or q < 2:
        raise ValueError("need n >= 1 and q >= 2")
    p = next_prime(max(n, 2))
    return HashKey(p, sample_points(seed, n, p), q, params, seed)
