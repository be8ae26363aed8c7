"""Exact arithmetic in Z[sqrt(-D)].

Elements are plain ``(re, im)`` pairs standing for ``re + im*sqrt(-D)``.  The
discriminant parameter ``D`` is not stored on the element; every operation
that needs it takes it explicitly, and the group layer carries it in
:class:`~bianchi_heights.group.GroupSpec`.

All integer results are checked against a signed 128-bit width so that a
parameter choice that would blow past desk scale fails loudly instead of
silently producing garbage in the numpy-backed code paths.
"""

from __future__ import annotations

from typing import NamedTuple

INT_BITS = 128
INT_LIMIT = 1 << (INT_BITS - 1)


class ArithmeticOverflowError(OverflowError):
    """An intermediate left the checked 128-bit integer width."""


def checked(v: int) -> int:
    if not -INT_LIMIT <= v < INT_LIMIT:
        raise ArithmeticOverflowError(f"integer {v} exceeds the {INT_BITS}-bit checked width")
    return v


class RingElt(NamedTuple):
    re: int
    im: int

    def __repr__(self) -> str:
        return f"({self.re}{self.im:+d}w)"


ZERO = RingElt(0, 0)
ONE = RingElt(1, 0)


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def add(x: RingElt, y: RingElt) -> RingElt:
    return RingElt(checked(x.re + y.re), checked(x.im + y.im))


def sub(x: RingElt, y: RingElt) -> RingElt:
    return RingElt(checked(x.re - y.re), checked(x.im - y.im))


def neg(x: RingElt) -> RingElt:
    return RingElt(-x.re, -x.im)


def mul(x: RingElt, y: RingElt, D: int) -> RingElt:
    # (a + b w)(c + d w) with w^2 = -D
    return RingElt(
        checked(x.re * y.re - D * x.im * y.im),
        checked(x.re * y.im + x.im * y.re),
    )


def conj(x: RingElt) -> RingElt:
    return RingElt(x.re, -x.im)


def norm(x: RingElt, D: int) -> int:
    """``x * conj(x)`` as a rational integer, i.e. ``re^2 + D*im^2``."""
    return checked(x.re * x.re + D * x.im * x.im)


def ring_mod(x: RingElt, q: int) -> RingElt:
    """Componentwise reduction into ``[0, q)``."""
    if q < 1:
        raise ValueError("modulus must be positive")
    return RingElt(x.re % q, x.im % q)


def divides(k: int, x: RingElt) -> bool:
    """Whether the rational integer ``k`` divides ``x`` in Z[sqrt(-D)]."""
    return x.re % k == 0 and x.im % k == 0
