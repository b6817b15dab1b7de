"""Arithmetic in the prime field Z_p and deterministic prime selection."""

from __future__ import annotations

from dataclasses import dataclass

# Deterministic for every n < 3.3e24, which covers all 64-bit inputs.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_U64_MAX = 2**64 - 1


class ZeroInverseError(ZeroDivisionError):
    """Raised when inverting zero in Z_p."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2**64."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Return the smallest prime strictly greater than ``n``.

    Raises
    ------
    ValueError
        If ``n < 2``.
    OverflowError
        If no prime greater than ``n`` fits in 64 bits.
    """
    if n < 2:
        raise ValueError(f"next_prime requires n >= 2, got {n}")
    c = n + 1
    if c > 2 and c % 2 == 0:
        c += 1
    while c <= _U64_MAX:
        if is_prime(c):
            return c
        c += 2
    raise OverflowError(f"no 64-bit prime after {n}")


def inv_mod(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p`` by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise ZeroInverseError(f"0 has no inverse modulo {p}")
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if r0 != 1:
        raise ZeroInverseError(f"{a} is not invertible modulo {p}")
    return s0 % p


@dataclass(frozen=True)
class PrimeField:
    """The field Z_p. Elements are plain ints kept canonical in ``[0, p)``."""

    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __call__(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        return inv_mod(a, self.p)

    def div(self, a: int, b: int) -> int:
        return a * inv_mod(b, self.p) % self.p
