"""Dense univariate polynomials over Z_p.

``Poly`` is an immutable value type with exact schoolbook arithmetic. The
truncated operations (``mul_mod_t``, ``inv_mod_t``) run on compiled kernels,
while ``eea_until`` is a plain implementation of the extended Euclidean
algorithm with a caller-supplied stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable, Union

import numpy as np

from . import _kernels
from .field import inv_mod

#: Degree of the zero polynomial. Compares below every integer.
MINUS_INF = float("-inf")

Degree = Union[int, float]


class DivideByZeroPolyError(ZeroDivisionError):
    pass


class NotInvertibleError(ArithmeticError):
    pass


class StopNeverReached(RuntimeError):
    pass


class Poly:
    """Polynomial with coefficients in Z_p, index i holding the z^i term."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs: Iterable[int], p: int):
        c = [int(v) % p for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)
        self.p = p

    @classmethod
    def zero(cls, p: int) -> "Poly":
        return cls((), p)

    @classmethod
    def one(cls, p: int) -> "Poly":
        return cls((1,), p)

    @classmethod
    def monomial(cls, degree: int, p: int, coeff: int = 1) -> "Poly":
        return cls([0] * degree + [coeff], p)

    @property
    def degree(self) -> Degree:
        return len(self.coeffs) - 1 if self.coeffs else MINUS_INF

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.coeffs, self.p))

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)}, p={self.p})"

    def _check(self, other: "Poly") -> None:
        if self.p != other.p:
            raise ValueError(f"field mismatch: p={self.p} vs p={other.p}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        n = max(len(self), len(other))
        return Poly((self[i] + other[i] for i in range(n)), self.p)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        n = max(len(self), len(other))
        return Poly((self[i] - other[i] for i in range(n)), self.p)

    def __neg__(self) -> "Poly":
        return Poly((-c for c in self.coeffs), self.p)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.p)
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out, self.p)

    def scale(self, c: int) -> "Poly":
        return Poly((c * v for v in self.coeffs), self.p)

    def shift(self, k: int) -> "Poly":
        """Multiply by z^k."""
        return Poly([0] * k + list(self.coeffs), self.p) if self.coeffs else self

    def truncate(self, t: int) -> "Poly":
        """Reduce modulo z^(t+1)."""
        return Poly(self.coeffs[: t + 1], self.p)

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero():
            raise DivideByZeroPolyError("division by the zero polynomial")
        p = self.p
        r = list(self.coeffs)
        db = len(other) - 1
        if len(r) - 1 < db:
            return Poly.zero(p), self
        lead_inv = inv_mod(other.lead, p)
        q = [0] * (len(r) - db)
        b = other.coeffs
        for s in range(len(r) - 1 - db, -1, -1):
            c = r[s + db] * lead_inv % p
            q[s] = c
            if c:
                for j in range(db + 1):
                    r[s + j] = (r[s + j] - c * b[j]) % p
        return Poly(q, p), Poly(r[:db], p)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __call__(self, z: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * z + c) % self.p
        return acc

    def to_array(self, t: int | None = None) -> np.ndarray:
        """Coefficient array, zero-padded (or cut) to length t+1 if given."""
        c = list(self.coeffs)
        if t is not None:
            c = (c + [0] * (t + 1))[: t + 1]
        return _kernels.as_coeffs(c, self.p)

    @classmethod
    def from_array(cls, arr, p: int) -> "Poly":
        return cls((int(v) for v in arr), p)


def mul_mod_t(a: Poly, b: Poly, t: int) -> Poly:
    """Product ``a*b`` with every term of degree above ``t`` discarded."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    a._check(b)
    out = _kernels.mul_trunc(a.to_array(), b.to_array(), t, a.p)
    return Poly.from_array(out, a.p)


def inv_mod_t(a: Poly, t: int) -> Poly:
    """Inverse of ``a`` modulo z^(t+1); needs a nonzero constant term."""
    if a[0] == 0:
        raise NotInvertibleError("constant term is zero; no inverse modulo z^(t+1)")
    out = _kernels.inv_trunc(a.to_array(), t, a.p)
    return Poly.from_array(out, a.p)


def pow_linear_mod_t(a_i: int, e: int, t: int, p: int) -> Poly:
    """(1 - a_i z)^e modulo z^(t+1), expanded by the binomial theorem."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    neg = -a_i % p
    return Poly((comb(e, j) * pow(neg, j, p) for j in range(min(e, t) + 1)), p)


@dataclass(frozen=True)
class EeaState:
    """Snapshot of the EEA at round ``k``.

    ``r_cur`` is r_k and ``r_prev`` is r_{k-1}; likewise for u and v. The
    sequences follow u_k = u_{k-2} + q_k u_{k-1} (same for v), which makes
    r_k = (-1)^k (u_k r_0 - v_k r_{-1}) hold at every round.
    """

    r_prev: Poly
    r_cur: Poly
    u_prev: Poly
    u_cur: Poly
    v_prev: Poly
    v_cur: Poly
    k: int

    @property
    def quotient_degree(self) -> Degree:
        """deg q_{k+1}, the degree of the next quotient r_{k-1} // r_k."""
        if self.r_cur.is_zero():
            return MINUS_INF
        return self.r_prev.degree - self.r_cur.degree

    def satisfies_bezout(self, r_minus1: Poly, r0: Poly) -> bool:
        sign = -1 if self.k % 2 else 1
        rhs = (self.u_cur * r0 - self.v_cur * r_minus1).scale(sign)
        rhs_prev = (self.v_prev * r_minus1 - self.u_prev * r0).scale(sign)
        return rhs == self.r_cur and rhs_prev == self.r_prev


StopRule = Callable[[Degree, Degree], bool]


def eea_until(
    r_minus1: Poly, r0: Poly, stop: StopRule, *, check_invariant: bool = False
) -> EeaState:
    """Run the extended Euclidean algorithm until ``stop(deg r_k, deg r_{k-1})``.

    The rule is tried at k = 0 before any division. A zero remainder has
    degree ``MINUS_INF``; if the rule still rejects it, ``StopNeverReached``
    is raised.
    """
    r_minus1._check(r0)
    if r0.is_zero():
        raise ValueError("r0 must be nonzero")
    if r0.degree > r_minus1.degree:
        raise ValueError("deg(r0) must not exceed deg(r_minus1)")
    p = r0.p
    state = EeaState(r_minus1, r0, Poly.zero(p), Poly.one(p), Poly.one(p), Poly.zero(p), 0)
    while True:
        if check_invariant and not state.satisfies_bezout(r_minus1, r0):
            raise AssertionError(f"EEA invariant broken at k={state.k}")
        if stop(state.r_cur.degree, state.r_prev.degree):
            return state
        if state.r_cur.is_zero():
            raise StopNeverReached("remainders exhausted before the stop rule held")
        q, r = divmod(state.r_prev, state.r_cur)
        state = EeaState(
            state.r_cur,
            r,
            state.u_cur,
            state.u_prev + q * state.u_cur,
            state.v_cur,
            state.v_prev + q * state.v_cur,
            state.k + 1,
        )
