"""Compiled O(t^2) kernels over coefficient arrays.

Coefficient arrays hold canonical residues, constant term first. For
``p < 2**31`` they are int64 and the jitted kernels run; a product of two
residues then stays below 2**62. Larger primes fall back to the pure Python
body of the same kernel on object arrays.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_INT64_PRIME_LIMIT = 2**31


@njit(cache=True, nogil=True)
def _inv_scalar(a, p):
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1 != 0:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    return s0 % p


@njit(cache=True, nogil=True)
def _mul_trunc(a, b, t, p, out):
    for k in range(t + 1):
        out[k] = 0
    na = min(a.shape[0], t + 1)
    for i in range(na):
        ai = a[i]
        if ai == 0:
            continue
        nb = min(b.shape[0], t + 1 - i)
        for j in range(nb):
            out[i + j] = (out[i + j] + ai * b[j]) % p
    return out


@njit(cache=True, nogil=True)
def _inv_trunc(a, a0_inv, t, p, out):
    out[0] = a0_inv
    na = a.shape[0]
    for j in range(1, t + 1):
        s = 0
        for i in range(1, min(j, na - 1) + 1):
            s = (s + a[i] * out[j - i]) % p
        out[j] = (p - s) % p * a0_inv % p
    return out


@njit(cache=True, nogil=True)
def _sigma_trunc(x, a, t, p, out):
    # Multiplies 1 by (1 - a_i z) once per unit of x_i, keeping degree <= t.
    for k in range(t + 1):
        out[k] = 0
    out[0] = 1
    deg = 0
    for i in range(x.shape[0]):
        e = x[i]
        if e == 0:
            continue
        neg_a = (p - a[i] % p) % p
        for _ in range(e):
            top = deg + 1 if deg < t else t
            for k in range(top, 0, -1):
                out[k] = (out[k] + neg_a * out[k - 1]) % p
            deg = top
    return out


@njit(cache=True, nogil=True)
def _eea_stop(r0, t, t_plus, p, R0, R1, U0, U1):
    # Returns (k, deg r_k, deg r_{k-1}, deg u_k) at the first k with
    # deg r_k < t_plus. Degree -1 marks the zero polynomial.
    m = t + 2
    for i in range(m):
        R0[i] = 0
        R1[i] = 0
        U0[i] = 0
        U1[i] = 0
    R0[t + 1] = 1
    d0 = t + 1
    d1 = -1
    for i in range(min(r0.shape[0], t + 1)):
        R1[i] = r0[i]
        if r0[i] != 0:
            d1 = i
    U1[0] = 1
    du1 = 0
    k = 0
    while d1 >= t_plus:
        lead_inv = _inv_scalar(R1[d1], p)
        dq = d0 - d1
        while d0 >= d1:
            c = R0[d0] * lead_inv % p
            s = d0 - d1
            for j in range(d1 + 1):
                R0[s + j] = (R0[s + j] - c * R1[j]) % p
            for j in range(du1 + 1):
                U0[s + j] = (U0[s + j] + c * U1[j]) % p
            while d0 >= 0 and R0[d0] == 0:
                d0 -= 1
        R0, R1 = R1, R0
        U0, U1 = U1, U0
        d0, d1 = d1, d0
        du1 = du1 + dq
        k += 1
    return k, d1, d0, du1


def dtype_for(p: int):
    return np.int64 if p < _INT64_PRIME_LIMIT else object


def as_coeffs(values, p: int) -> np.ndarray:
    """Canonical coefficient array for ``values`` modulo ``p``."""
    dt = dtype_for(p)
    if dt is object:
        return np.array([int(v) % p for v in values], dtype=object)
    return np.mod(np.asarray(values, dtype=np.int64), p)


def _pick(kernel, p: int):
    return kernel if p < _INT64_PRIME_LIMIT else kernel.py_func


def mul_trunc(a: np.ndarray, b: np.ndarray, t: int, p: int) -> np.ndarray:
    out = np.zeros(t + 1, dtype=dtype_for(p))
    return _pick(_mul_trunc, p)(a, b, t, p, out)


def inv_trunc(a: np.ndarray, t: int, p: int) -> np.ndarray:
    from .field import inv_mod

    out = np.zeros(t + 1, dtype=dtype_for(p))
    return _pick(_inv_trunc, p)(a, inv_mod(int(a[0]), p), t, p, out)


def sigma_trunc(x: np.ndarray, a: np.ndarray, t: int, p: int) -> np.ndarray:
    out = np.zeros(t + 1, dtype=dtype_for(p))
    if dtype_for(p) is object:
        x = x.astype(object)
        a = a.astype(object)
    return _pick(_sigma_trunc, p)(x, a, t, p, out)


def eea_stop(r0: np.ndarray, t: int, t_plus: int, p: int) -> tuple[int, int, int, int]:
    dt = dtype_for(p)
    bufs = [np.zeros(t + 2, dtype=dt) for _ in range(4)]
    k, dr, dr_prev, du = _pick(_eea_stop, p)(r0, t, t_plus, p, *bufs)
    return int(k), int(dr), int(dr_prev), int(du)
