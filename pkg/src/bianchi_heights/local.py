"""Local (mod q) structure: V_p / W_p counts, densities tau_p, U_q, the
truncated singular series, lifting probabilities and the admissible modulus L.

A *source* is either an int D (meaning the full group SL2(Z[w]) whose
residues mod q are all of SL2(Z[w]/q)) or an :class:`OrbitBall`, whose
empirical image mod q stands in for Gamma/Gamma(q).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UnsaturatedBallError
from .expsum import ramanujan_array
from .group import OrbitBall, ball_image_mod, full_residue_group, unimodular_rows_mod
from .ntheory import factorize, legendre, primes_upto

# ---------------------------------------------------------------------------
# forms on bottom rows


def _form_value(rows: np.ndarray, D: int, x: int, y: int) -> np.ndarray:
    """Q(x, y) = N(c) + N(c z + d) with z = x + y w, for (c1, c2, d1, d2) rows."""
    c1, c2, d1, d2 = (rows[:, i] for i in range(4))
    u1 = c1 * x - D * c2 * y + d1
    u2 = c1 * y + c2 * x + d2
    return c1 * c1 + D * c2 * c2 + u1 * u1 + D * u2 * u2


def _is_split(D: int, p: int) -> bool:
    return legendre(-D, p) == 1


def _check_good_prime(D: int, p: int) -> None:
    if p == 2 or (2 * D) % p == 0 or factorize(p) != ((p, 1),):
        raise ValueError(f"p={p} must be an odd prime not dividing 2D={2 * D}")


# ---------------------------------------------------------------------------
# V_p, W_p, tau_p


def w_p_count(D: int, p: int, n: int, x: int, y: int) -> int:
    """#{(c1, c2, d1, d2) mod p : Q(x, y) = n mod p}, by 4-fold enumeration."""
    _check_good_prime(D, p)
    rows = np.indices((p,) * 4, dtype=np.int64).reshape(4, -1).T
    return int(np.count_nonzero(np.mod(_form_value(rows, D, x, y) - n, p) == 0))


def w_p_closed_form(p: int, n: int) -> int:
    return p**3 - p if n % p else p**3 + p * (p - 1)


def v_p_count(D: int, p: int) -> int:
    """Number of bottom rows of SL2(Z[w]/p), by enumeration."""
    _check_good_prime(D, p)
    return len(unimodular_rows_mod(D, p))


def v_p_closed_form(D: int, p: int) -> int:
    return (p * p - 1) ** 2 if _is_split(D, p) else p**4 - 1


def tau_p(D: int, p: int, n: int, x: int = 0, y: int = 0) -> Fraction:
    """#(W_p n V_p) / #V_p exactly, by enumeration."""
    _check_good_prime(D, p)
    rows = unimodular_rows_mod(D, p)
    hits = np.count_nonzero(np.mod(_form_value(rows, D, x, y) - n, p) == 0)
    return Fraction(int(hits), len(rows))


def tau_p_closed_form(D: int, p: int, n: int) -> Fraction:
    """Closed form of tau_p(n) for odd p not dividing D.

    Split primes: 1/(p+1) if p | n, p/(p^2-1) otherwise.
    Inert primes: (p+1)/(p^2+1) if p | n, p/(p^2+1) otherwise.
    """
    _check_good_prime(D, p)
    if _is_split(D, p):
        return Fraction(1, p + 1) if n % p == 0 else Fraction(p, p * p - 1)
    return Fraction(p + 1, p * p + 1) if n % p == 0 else Fraction(p, p * p + 1)


def tau_p_printed(D: int, p: int, n: int) -> Fraction:
    """The four-case table as printed; its split-prime entries are off."""
    _check_good_prime(D, p)
    if _is_split(D, p):
        den = p**4 - (2 * p - 1) ** 2
        return Fraction(p**3 - 3 * p * p + 3 * p - 1, den) if n % p == 0 else Fraction(p**3 - p - 1, den)
    return Fraction(p + 1, p * p + 1) if n % p == 0 else Fraction(p, p * p + 1)


@dataclass(frozen=True)
class LocalDensity:
    p: int
    n: int
    tau: Fraction
    up: Fraction

    def __post_init__(self) -> None:
        if not 0 <= self.tau <= 1 or self.up != self.p * self.tau - 1:
            raise ValueError("inconsistent local density")


def local_density(D: int, p: int, n: int) -> LocalDensity:
    t = tau_p(D, p, n)
    return LocalDensity(p, n % p, t, p * t - 1)


# ---------------------------------------------------------------------------
# residue measures and U_q


@dataclass
class ResidueMeasure:
    """Bottom rows mod q with multiplicities, normalised by the index [Gamma : Gamma(q)]."""

    q: int
    rows: np.ndarray
    counts: np.ndarray
    index: int
    surjective: bool
    image: np.ndarray | None = None  # the ball's residues, when empirical


def residue_measure(source, q: int) -> ResidueMeasure:
    if isinstance(source, OrbitBall):
        D = source.D
        img = ball_image_mod(source, q)
        full = full_residue_group(D, q)
        if len(img) == full.order:
            return ResidueMeasure(q, full.rows, np.full(len(full.rows), q * q, dtype=np.int64), full.order, True)
        rows, counts = np.unique(img[:, 4:], axis=0, return_counts=True)
        return ResidueMeasure(q, rows, counts.astype(np.int64), len(img), False, img)
    full = full_residue_group(int(source), q)
    return ResidueMeasure(q, full.rows, np.full(len(full.rows), q * q, dtype=np.int64), full.order, True)


def _source_D(source) -> int:
    return source.D if isinstance(source, OrbitBall) else int(source)


@dataclass
class UqResult:
    q: int
    value: Fraction
    index: int
    surjective: bool
    image: np.ndarray | None = None

    def __float__(self) -> float:
        return float(self.value)


def _u_q_measure(meas: ResidueMeasure, D: int, n: int, x: int, y: int) -> Fraction:
    if meas.q == 1:
        return Fraction(1)
    vals = _form_value(meas.rows, D, x, y) - n
    cq = ramanujan_array(meas.q, vals)
    return Fraction(int(np.dot(cq, meas.counts)), meas.index)


def u_q(source, q: int, n: int, x: int = 0, y: int = 0) -> UqResult:
    """U_q(n) = [Gamma:Gamma(q)]^-1 sum_{gamma0} c_q(Q_gamma0(x, y) - n), exactly."""
    if q < 1:
        raise ValueError("q must be positive")
    D = _source_D(source)
    if q == 1:
        return UqResult(1, Fraction(1), 1, True)
    if not isinstance(source, OrbitBall):
        # full group: SL2(Z[w]/q) is the product over prime powers and c_q is multiplicative
        v = Fraction(1)
        for p, k in factorize(q):
            v *= _u_q_measure(residue_measure(D, p**k), D, n, x, y)
        return UqResult(q, v, full_residue_group(D, q).order if q**4 <= 60_000_000 else 0, True)
    meas = residue_measure(source, q)
    return UqResult(q, _u_q_measure(meas, D, n, x, y), meas.index, meas.surjective, meas.image)


def singular_series(source, n: int, x: int = 0, y: int = 0, Q0: int = 1) -> float:
    """Truncated singular series sum_{q <= Q0} U_q(n), each term exact."""
    return float(sum(u_q(source, q, n, x, y).value for q in range(1, Q0 + 1)))


def singular_series_report(source, ns, x: int = 0, y: int = 0, Q0: int = 6) -> list[dict]:
    out = []
    for n in ns:
        terms = [u_q(source, q, n, x, y) for q in range(1, Q0 + 1)]
        out.append({"n": int(n), "value": float(sum(t.value for t in terms)),
                    "non_surjective_q": [t.q for t in terms if not t.surjective]})
    return out


# ---------------------------------------------------------------------------
# lifting


def lifting_probabilities(D: int, p: int, k: int, n: int, x: int = 0, y: int = 0) -> set[Fraction]:
    """For each residue gamma0 mod p^(k-1) with Q = n mod p^(k-1), the fraction
    of its lifts mod p^k that keep Q = n mod p^k.

    Computed on bottom rows: every row lift of gamma0's row extends to the
    same number of group lifts, so the row-level ratio is the group-level one.
    """
    q0, q1 = p ** (k - 1), p**k
    rows = unimodular_rows_mod(D, q0)
    rows = rows[np.mod(_form_value(rows, D, x, y) - n, q0) == 0]
    shifts = np.indices((p,) * 4, dtype=np.int64).reshape(4, -1).T * q0
    out = set()
    for r in rows:
        lifts = r[None, :] + shifts
        ok = np.count_nonzero(np.mod(_form_value(lifts, D, x, y) - n, q1) == 0)
        out.add(Fraction(int(ok), len(lifts)))
    return out


# ---------------------------------------------------------------------------
# admissible structure


@dataclass
class PrimeStabilization:
    p: int
    k_p: int | None  # None: no stabilisation within the exponent bound
    classes: list[int]  # admissible residues mod p^k_p
    surjective: bool
    images: dict[int, int]  # k -> number of residues of H mod p^k


@dataclass
class LocalStructure:
    D: int
    bad_primes: set[int]
    L: int
    admissible_classes: set[int]
    per_prime: dict[int, PrimeStabilization]
    warnings: list[str] = field(default_factory=list)

    @property
    def per_prime_stabilization(self) -> dict[int, int]:
        return {p: s.k_p for p, s in self.per_prime.items() if s.k_p is not None}

    def is_admissible(self, n: int) -> bool:
        return n > 0 and n % self.L in self.admissible_classes

    def admissible_mask(self, ns: np.ndarray) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        cls = np.zeros(self.L, dtype=bool)
        cls[list(self.admissible_classes)] = True
        return (ns > 0) & cls[np.mod(ns, self.L)]

    def to_json(self) -> dict:
        return {
            "schema": 1, "D": self.D, "L": self.L,
            "admissible_classes": sorted(self.admissible_classes),
            "bad_primes": sorted(self.bad_primes),
            "primes": [{"prime": s.p, "k_p": s.k_p, "admissible_classes": s.classes,
                        "surjective": s.surjective} for s in self.per_prime.values()],
            "warnings": self.warnings,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _lift(classes: set[int], p: int, k: int) -> set[int]:
    return {r + j * p**k for r in classes for j in range(p)}


def _surjective_mod_p(ball: OrbitBall, p: int) -> bool:
    # a ball with fewer elements than the residue group cannot cover it; that
    # is reported the same way as a genuine failure (the ball is too small)
    order = full_residue_group(ball.D, p).order
    return len(ball) >= order and len(ball_image_mod(ball, p)) == order


def admissible_structure(ball: OrbitBall, prime_bound: int = 13, exp_bound: int = 5,
                         check_surjective: bool = True) -> LocalStructure:
    """Read off L and the admissible classes from the heights on a saturated ball.

    For each p <= prime_bound, k_p is the least k with the image mod p^(k+1)
    equal to the full lift of the image mod p^k, and likewise one level up.
    """
    if len(ball) == 0:
        raise ValueError("empty ball: no heights to read classes from")
    if not ball.saturated:
        raise UnsaturatedBallError("admissible structure needs a saturated ball")
    D = ball.D
    e = ball.entries
    H = e[:, 4] ** 2 + D * e[:, 5] ** 2 + e[:, 6] ** 2 + D * e[:, 7] ** 2
    per, bad, warn = {}, {p for p, _ in factorize(2 * D)}, []
    L, residues = 1, []
    for p in primes_upto(prime_bound):
        imgs = [set(np.unique(np.mod(H, p**k)).tolist()) for k in range(exp_bound + 1)]
        k_p = next((k for k in range(exp_bound - 1)
                    if imgs[k + 1] == _lift(imgs[k], p, k) and imgs[k + 2] == _lift(imgs[k + 1], p, k + 1)), None)
        surj = _surjective_mod_p(ball, p) if check_surjective and p <= 13 else True
        per[p] = PrimeStabilization(p, k_p, sorted(imgs[k_p]) if k_p is not None else [], surj,
                                    {k: len(s) for k, s in enumerate(imgs)})
        if not surj:
            bad.add(p)
            warn.append(f"p={p}: ball image mod p is not all of SL2 (ball too small or p genuinely bad)")
        if k_p is None:
            bad.add(p)
            msg = f"p={p}: height image did not stabilise by p^{exp_bound}; excluded from L"
            warn.append(msg)
            warnings.warn(msg, stacklevel=2)
            continue
        if k_p:
            L *= p**k_p
            residues.append((p**k_p, imgs[k_p]))
    classes = {0}
    mod = 1
    for m, cls in residues:  # CRT product of the per-prime class sets
        u = pow(mod, -1, m)
        classes = {a + mod * ((b - a) * u % m) for a in classes for b in cls}
        mod *= m
    return LocalStructure(D, bad, L, classes, per, warn)


# ---------------------------------------------------------------------------
# the congruence-count lemma


def congruence_solutions(F: int, J: int, K: int, ell: int, A: int, B: int) -> int:
    """#{1 <= x <= A, 1 <= y <= B : F x + J y = K mod ell}."""
    x = np.arange(1, A + 1, dtype=np.int64)
    y = np.arange(1, B + 1, dtype=np.int64)
    return int(np.count_nonzero(np.mod(F * x[:, None] + J * y[None, :] - K, ell) == 0))


def congruence_bound(F: int, J: int, ell: int, A: int, B: int) -> float:
    """4 (A B / (ell / (ell, tau)) + A + B) with tau = (F, J)."""
    tau = math.gcd(F, J)
    return 4 * (A * B / (ell / math.gcd(ell, tau)) + A + B)
