from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def as_rational(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**9)
    return Fraction(v)


@dataclass(frozen=True)
class CircleParams:
    """Scales of the circle-method setup.

    ``T2`` and ``X2`` are the squares of T and X, kept as exact rationals so
    that ``N == T2 * X2`` holds exactly even when T and X themselves are
    irrational.  ``K0`` defaults to ``Q0**3``; ``sigma`` only records how T
    was chosen.
    """

    N: int
    T2: Fraction
    X2: Fraction
    Q0: int = 1
    K0: int | None = None
    sigma: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "T2", as_rational(self.T2))
        object.__setattr__(self, "X2", as_rational(self.X2))
        if self.K0 is None:
            object.__setattr__(self, "K0", self.Q0**3)
        if self.T2 <= 0 or self.X2 <= 0:
            raise ValueError("T and X must be positive")
        if self.T2 * self.X2 != self.N:
            raise ValueError(f"N={self.N} != T^2 X^2 = {self.T2 * self.X2}")
        if self.K0 < 1 or self.Q0 < 1:
            raise ValueError("K0 and Q0 must be >= 1")

    @classmethod
    def from_T(cls, N: int, T, Q0: int = 1, K0: int | None = None) -> "CircleParams":
        T2 = as_rational(T) ** 2
        return cls(N, T2, Fraction(N) / T2, Q0, K0)

    @classmethod
    def from_X(cls, N: int, X, Q0: int = 1, K0: int | None = None) -> "CircleParams":
        X2 = as_rational(X) ** 2
        return cls(N, Fraction(N) / X2, X2, Q0, K0)

    @classmethod
    def from_sigma(cls, N: int, sigma=Fraction(1, 8), Q0: int = 1, K0: int | None = None) -> "CircleParams":
        """T^2 = N^(2 sigma) rounded to a multiple of 1/64, X^2 = N / T^2."""
        sigma = as_rational(sigma)
        T2 = Fraction(round(N ** (2 * float(sigma)) * 64), 64)
        return cls(N, T2, Fraction(N) / T2, Q0, K0, sigma)

    @property
    def T(self) -> float:
        return math.sqrt(self.T2)

    @property
    def X(self) -> float:
        return math.sqrt(self.X2)

    @property
    def arc_width(self) -> Fraction:
        return Fraction(self.K0, self.N)
