"""Small elementary number-theory helpers shared by the modular modules."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == ((n, 1),)


def primes_upto(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if is_prime(p)]


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, nu) if q = p^nu with nu >= 1, else None."""
    f = factorize(q) if q > 1 else ()
    return f[0] if len(f) == 1 else None


def valuation(z, p: int) -> float:
    """p-adic valuation of a rational; +inf at 0."""
    z = Fraction(z)
    if z == 0:
        return math.inf
    v = 0
    num, den = z.numerator, z.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def inv_mod(a: int, m: int) -> int:
    return pow(a, -1, m) if m > 1 else 0


def e(x) -> complex:
    """exp(2 pi i x) for a rational x, reduced mod 1 first."""
    x = Fraction(x)
    return cmath.exp(2j * math.pi * Fraction(x.numerator % x.denominator, x.denominator))


def reduced_residues(q: int) -> list[int]:
    """Reduced residues mod q; for q = 1 this is [0]."""
    return [r for r in range(q) if math.gcd(r, q) == 1]
