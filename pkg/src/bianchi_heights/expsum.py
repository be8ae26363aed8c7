"""Exponential sums: Ramanujan sums, quadratic Gauss sums and the paired sums.

Every closed form here has a direct-summation twin (``*_direct``) used as
its oracle.  Where the printed lemmas are wrong in corner cases, the
printed variants are kept next to the evaluators under ``*_printed`` so the
discrepancy stays measurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ntheory import e, factorize, inv_mod, legendre, prime_power, reduced_residues, valuation
from .group import GroupMat
from .qform import QuadForm, qform_of


def as_form(f, D: int | None = None) -> QuadForm:
    """Accept a QuadForm or a group element (which then needs D)."""
    if isinstance(f, GroupMat):
        if D is None:
            raise ValueError("a group element needs D to build its form")
        return qform_of(f, D)
    return QuadForm(*f)


def _eps(n: int) -> int:
    """0 if n = 1 mod 4, 1 if n = 3 mod 4."""
    return 0 if n % 4 == 1 else 1


def _i_pow(k: int) -> complex:
    return (1, 1j, -1, -1j)[k % 4]


def deg_pnu(z, p: int, nu: int) -> int:
    """max k <= nu with p^-k z a p-adic integer; deg(0) = nu."""
    v = valuation(z, p)
    return nu if v == math.inf else int(min(v, nu))


def _exp_array(num: np.ndarray, q: int) -> np.ndarray:
    return np.exp(2j * np.pi * (np.mod(num, q) / q))


# ---------------------------------------------------------------------------
# Ramanujan sums


def ramanujan(q: int, m: int) -> int:
    """c_q(m) from the prime-power values, multiplied over q's factorisation."""
    if q < 1:
        raise ValueError("q must be positive")
    out = 1
    for p, k in factorize(q) if q > 1 else ():
        v = valuation(m, p)
        if v >= k:
            out *= p ** (k - 1) * (p - 1)
        elif v == k - 1:
            out *= -(p ** (k - 1))
        else:
            return 0
    return out


def ramanujan_array(q: int, m: np.ndarray) -> np.ndarray:
    """Vectorised c_q over an integer array (c_q only depends on m mod q)."""
    m = np.asarray(m, dtype=np.int64)
    table = np.array([ramanujan(q, r) for r in range(q)], dtype=np.int64)
    return table[np.mod(m, q)]


def ramanujan_direct(q: int, m: int) -> complex:
    r = np.array(reduced_residues(q), dtype=np.int64)
    return complex(_exp_array(r * m, q).sum())


# ---------------------------------------------------------------------------
# quadratic Gauss sums


def gauss_quad_direct(q: int, a: int, b: int) -> complex:
    x = np.arange(q, dtype=np.int64)
    return complex(_exp_array(a * x * x + b * x, q).sum())


def gauss_quad(p: int, nu: int, a: int, b: int) -> complex:
    """sum_{x mod p^nu} e((a x^2 + b x) / p^nu) for odd p, in closed form.

    With p^k = (a, p^nu) < p^nu, a' = a/p^k, b' = b/p^k and m = p^(nu-k):
    the sum vanishes unless p^k | b, and otherwise equals
    p^k sqrt(m) i^eps(m) (a'/p)^(nu-k) e(-b'^2 (4a')^-1 / m).
    """
    if p == 2:
        raise ValueError("closed form is for odd primes; use gauss_even_bound")
    q = p**nu
    if a % q == 0:
        return complex(q) if b % q == 0 else 0j
    k = deg_pnu(a, p, nu)
    if deg_pnu(b, p, nu) < k:
        return 0j
    g = p**k
    m = q // g
    a1, b1 = (a // g) % m, (b // g) % m
    chi = legendre(a1, p) ** (nu - k)
    phase = e(Fraction(-b1 * b1 * inv_mod(4 * a1, m), m))
    return g * math.sqrt(m) * _i_pow(_eps(m)) * chi * phase


def gauss_quad_printed(p: int, nu: int, a: int, b: int) -> complex:
    """The lemma exactly as printed: the quadratic character is (a'/p), not (a'/p)^(nu-k)."""
    q = p**nu
    if a % q == 0:
        return complex(q) if b % q == 0 else 0j
    if deg_pnu(b, p, nu) < deg_pnu(a, p, nu):
        return 0j
    g = math.gcd(q, a)
    m = q // g
    a1, b1 = (a // g) % m, (b // g) % m
    sym = legendre(a // math.gcd(p ** (nu - 1), a), p)
    phase = e(Fraction(-b1 * b1 * inv_mod(4 * a1, m), m))
    return math.sqrt(q) * math.sqrt(g) * _i_pow(_eps(m)) * sym * phase


@dataclass
class EvenBound:
    value: complex
    bound: float
    holds: bool
    ratio: float | None  # |value| / bound when the bound is non-zero


def gauss_even_bound(nu: int, a: int, b: int) -> EvenBound:
    """Direct value at q = 2^nu against q * 1{2^(nu-1) | a}."""
    q = 2**nu
    v = gauss_quad_direct(q, a, b)
    bound = float(q) if a % (2 ** (nu - 1)) == 0 else 0.0
    return EvenBound(v, bound, abs(v) <= bound + 1e-9 * q, abs(v) / bound if bound else None)


# ---------------------------------------------------------------------------
# two-variable sums S(q, A, B, C, D)


def s_qf_direct(q: int, A: int, B: int, C: int, D: int) -> complex:
    x = np.arange(q, dtype=np.int64)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return complex(_exp_array(A * X * X + B * Y * Y + C * X + D * Y, q).sum())


def s_qf(q: int, A: int, B: int, C: int, D: int) -> complex:
    """sum_{x, y mod q} e_q(A x^2 + B y^2 + C x + D y).

    Odd prime powers use the closed form, powers of two are summed directly
    and composite q is split over its prime-power factors (CRT).
    """
    if q == 1:
        return 1 + 0j
    pp = prime_power(q)
    if pp is not None:
        p, nu = pp
        if p == 2:
            return s_qf_direct(q, A, B, C, D)
        kg = deg_pnu(math.gcd(A, B), p, nu)
        if kg == nu:
            return complex(q * q) if (C % q == 0 and D % q == 0) else 0j
        return gauss_quad(p, nu, A, C) * gauss_quad(p, nu, B, D)
    out = 1 + 0j
    for p, k in factorize(q):
        q1 = p**k
        q2 = q // q1
        u = inv_mod(q2, q1)
        out *= s_qf(q1, u * A, u * B, u * C, u * D)
    return out


def s_qf_printed(p: int, nu: int, A: int, B: int, C: int, D: int) -> complex:
    """The two-variable lemma as printed (odd p)."""
    q = p**nu
    kg = deg_pnu(math.gcd(A, B), p, nu)
    if kg == nu:
        return complex(q * q) if (C % q == 0 and D % q == 0) else 0j
    if deg_pnu(C, p, nu) < deg_pnu(A, p, nu) or deg_pnu(D, p, nu) < deg_pnu(B, p, nu):
        return 0j
    gA, gB = math.gcd(q, A), math.gcd(q, B)
    out = q * math.sqrt(gA * gB) * _i_pow(_eps(q // gA) + _eps(q // gB))
    out *= legendre(A // math.gcd(p ** (nu - 1), A), p) * legendre(B // math.gcd(p ** (nu - 1), B), p)
    for a, c, g in ((A, C, gA), (B, D, gB)):
        m = q // g
        if m > 1:
            a1, c1 = (a // g) % m, (c // g) % m
            out *= e(Fraction(-c1 * c1 * inv_mod(4 * a1, m), m))
    return out


# ---------------------------------------------------------------------------
# S_gamma(q, r, xi, zeta) and the paired sums


def _gauss_rows(q: int, a: int, lin: np.ndarray) -> np.ndarray:
    """sum_x e((a x^2 + l x)/q) for each l in ``lin`` (direct)."""
    x = np.arange(q, dtype=np.int64)
    return _exp_array(a * x[None, :] ** 2 + lin[:, None] * x[None, :], q).sum(axis=1)


def s_gamma(q: int, f, r: int, xi: int, zeta: int, D: int | None = None) -> complex:
    """(1/q^2) sum_{x0, y0 mod q} e(((A x0^2 + C x0) r - x0 xi)/q) e(((B y0^2 + D y0) r - y0 zeta)/q)."""
    f = as_form(f, D)
    x = np.arange(q, dtype=np.int64)
    X, Y = np.meshgrid(x, x, indexing="ij")
    num = (f.A * X * X + f.C * X) * r - X * xi + (f.B * Y * Y + f.D * Y) * r - Y * zeta
    return complex(_exp_array(num, q).sum()) / (q * q)


def s_gamma_bound(q: int, f, r: int, xi: int, zeta: int, D: int | None = None) -> float:
    """Trivial-bound trichotomy for S_gamma without its implied constant."""
    f = as_form(f, D)
    if f.A % q == 0 and f.B % q == 0:
        return 1.0 if ((r * f.C - xi) % q == 0 and (r * f.D - zeta) % q == 0) else 0.0
    return math.sqrt(math.gcd(q, f.A) * math.gcd(q, f.B)) / q


def _s_gamma_all_r(q: int, f: QuadForm, xi: int, zeta: int, rs: np.ndarray) -> np.ndarray:
    """S_gamma(q, r, xi, zeta) for every r in ``rs``; x and y sums factor."""
    out = np.empty(len(rs), dtype=complex)
    for i, r in enumerate(rs):
        gx = _gauss_rows(q, int(r) * f.A, np.array([int(r) * f.C - xi]))[0]
        gy = _gauss_rows(q, int(r) * f.B, np.array([int(r) * f.D - zeta]))[0]
        out[i] = gx * gy / (q * q)
    return out


def paired_s(q: int, f, xi: int, zeta: int, g, xi2: int, zeta2: int, D: int | None = None) -> complex:
    """sum'_{r mod q} S_f(q,r,xi,zeta) conj(S_g(q,r,xi2,zeta2)) e((E_f - E_g) r / q), directly."""
    f, g = as_form(f, D), as_form(g, D)
    rs = np.array(reduced_residues(q), dtype=np.int64)
    s1 = _s_gamma_all_r(q, f, xi, zeta, rs)
    s2 = _s_gamma_all_r(q, g, xi2, zeta2, rs)
    return complex((s1 * np.conj(s2) * _exp_array((f.E - g.E) * rs, q)).sum())


def paired_s_crt(q1: int, q2: int, f, xi: int, zeta: int, g, xi2: int, zeta2: int, D: int | None = None) -> complex:
    """The q1*q2 paired sum rebuilt from its factors at q1 and q2 (coprime).

    The frequencies pick up the CRT twist: at q1 they are multiplied by
    q2^-1 mod q1 and the whole phase by q2^-1, which is the same as scaling
    the form's coefficients.
    """
    if math.gcd(q1, q2) != 1:
        raise ValueError("moduli must be coprime")
    f, g = as_form(f, D), as_form(g, D)
    out = 1 + 0j
    for qa, qb in ((q1, q2), (q2, q1)):
        u = inv_mod(qb, qa)
        fa = QuadForm(*(u * v for v in f))
        ga = QuadForm(*(u * v for v in g))
        out *= paired_s(qa, fa, u * xi, u * zeta, ga, u * xi2, u * zeta2)
    return out


@dataclass
class PairedSumFactors:
    S1: complex
    S2: complex
    product: complex = field(init=False)

    def __post_init__(self) -> None:
        self.product = self.S1 * self.S2


def _chi_ok(r: int, f: QuadForm, xi: int, zeta: int, p: int, nu: int) -> bool:
    return (deg_pnu(r * f.C - xi, p, nu) >= deg_pnu(f.A, p, nu)
            and deg_pnu(r * f.D - zeta, p, nu) >= deg_pnu(f.B, p, nu))


def paired_factors(p: int, nu: int, f, xi: int, zeta: int, g, xi2: int, zeta2: int,
                   D: int) -> PairedSumFactors:
    """S1 and S2 with S(p^nu, ...) = S1 * S2, for odd p not dividing D and p^nu not dividing A_f, A_g.

    S1 carries the gcd powers, the i^eps factors, the quadratic-character
    factor (D/p)^((nu-k) + (nu-k')) and the r-independent phases; S2 is the
    sum over reduced r of e((A_f - A_g) r / p^nu), the r-dependent phases and
    the indicator chi.
    """
    q = p**nu
    f, g = as_form(f, D), as_form(g, D)
    if p == 2 or D % p == 0 or f.A % q == 0 or g.A % q == 0:
        raise ValueError("factorisation needs odd p, p not dividing D, and p^nu not dividing A, A'")

    def pieces(h: QuadForm, s: int, t: int):
        l0 = math.gcd(h.B, q)
        k = deg_pnu(h.A, p, nu)
        Bl = (h.B // l0) % q
        invB = inv_mod(Bl, q)
        num_a = h.D * t + D * h.C * s
        # chi vanishes for every r unless l0 divides these numerators
        frak_a = Fraction((inv_mod(2, q) * invB * (num_a // l0)) % q, q) if num_a % l0 == 0 else Fraction(0)
        num_b = t * t + D * s * s
        frak_b = (invB * (num_b // l0)) % q if num_b % l0 == 0 else None
        mag = math.sqrt(math.gcd(q, h.A) * math.gcd(q, h.B))
        ieps = _eps(q // math.gcd(q, h.A)) + _eps(q // math.gcd(q, h.B))
        return frak_a, frak_b, mag, ieps, nu - k

    a1, b1, m1, i1, mu1 = pieces(f, xi, zeta)
    a2, b2, m2, i2, mu2 = pieces(g, xi2, zeta2)
    S1 = m1 * m2 / q**2 * e(a1 - a2) * _i_pow(i1 + i2) * legendre(D, p) ** (mu1 + mu2)
    S2 = 0j
    for r in reduced_residues(q):
        if not (_chi_ok(r, f, xi, zeta, p, nu) and _chi_ok(r, g, xi2, zeta2, p, nu)):
            continue
        inv4r = inv_mod(4 * r, q)
        fb = Fraction(inv4r * b1, q) if b1 is not None else Fraction(0)
        gb = Fraction(inv4r * b2, q) if b2 is not None else Fraction(0)
        S2 += e(Fraction((f.A - g.A) * r, q) - fb + gb)
    return PairedSumFactors(S1, S2)


def paired_factors_printed(p, nu, f, xi, zeta, g, xi2, zeta2, D) -> PairedSumFactors:
    """As :func:`paired_factors` but without the (D/p) factor, as printed."""
    f, g = as_form(f, D), as_form(g, D)
    pf = paired_factors(p, nu, f, xi, zeta, g, xi2, zeta2, D)
    mu1 = nu - deg_pnu(f.A, p, nu)
    mu2 = nu - deg_pnu(g.A, p, nu)
    return PairedSumFactors(pf.S1 * legendre(D, p) ** (mu1 + mu2), pf.S2)


def paired_s_evaluate(q: int, f, xi: int, zeta: int, g, xi2: int, zeta2: int,
                      D: int) -> tuple[complex, PairedSumFactors | None]:
    """Direct value, plus the S1/S2 factors when their preconditions hold."""
    f, g = as_form(f, D), as_form(g, D)
    direct = paired_s(q, f, xi, zeta, g, xi2, zeta2)
    pp = prime_power(q)
    if pp is None:
        return direct, None
    try:
        return direct, paired_factors(pp[0], pp[1], f, xi, zeta, g, xi2, zeta2, D)
    except ValueError:
        return direct, None


# ---------------------------------------------------------------------------
# bound-shape report (no implied constants, nothing asserted)


def kloosterman_shape(q: int, f: QuadForm, xi: int, zeta: int, g: QuadForm, xi2: int, zeta2: int,
                      D: int) -> float:
    """Odd-q bound shape without q^eps: A != A' and A == A' variants."""
    if f.A != g.A:
        return math.gcd(q, f.A) * math.gcd(q, g.A) * math.gcd(q, f.A - g.A) ** 0.25 * q ** -1.25
    l0 = math.gcd(q, D * f.A)
    delta = D * xi * xi + zeta * zeta - D * xi2 * xi2 - zeta2 * zeta2
    base = (D * f.A // l0) % q
    if delta % l0 == 0 and math.gcd(base, q) == 1:
        v = inv_mod(4 * base, q) * (delta // l0)
    else:
        v = delta
    return math.gcd(q, f.A) ** 2 * math.gcd(q, v) ** 0.25 * q ** -1.25


def even_shape(nu: int, f: QuadForm, g: QuadForm) -> float:
    return 2.0**nu if math.gcd(f.A, g.A) % 2 ** (nu - 1) == 0 else 0.0


def lcm_divisor_shape(q: int, f: QuadForm, g: QuadForm) -> float:
    return math.gcd(q, f.A) * math.gcd(q, g.A) / q


@dataclass
class BoundReport:
    kind: str
    ratios: list[float]
    zero_bound_violations: int

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    def summary(self) -> dict:
        r = np.array(self.ratios) if self.ratios else np.zeros(1)
        return {"kind": self.kind, "samples": len(self.ratios), "max": float(r.max()),
                "median": float(np.median(r)), "p90": float(np.quantile(r, 0.9)),
                "zero_bound_violations": self.zero_bound_violations}


def kloosterman_bound_report(forms: list[QuadForm], D: int, samples: int = 100, seed: int = 0,
                             moduli=(3, 5, 7, 9, 15, 21, 25, 27, 35, 45)) -> list[BoundReport]:
    """|S| against the corollary bound shapes on seeded random draws."""
    rng = np.random.default_rng(seed)
    odd_neq, odd_eq = BoundReport("odd, A != A'", [], 0), BoundReport("odd, A == A'", [], 0)
    even, lcm = BoundReport("q = 2^nu", [], 0), BoundReport("q | lcm(A, A')", [], 0)
    for _ in range(samples):
        f = forms[rng.integers(len(forms))]
        g = forms[rng.integers(len(forms))] if rng.random() < 0.5 else f
        xi, zeta, xi2, zeta2 = (int(v) for v in rng.integers(-20, 21, size=4))
        q = int(rng.choice(moduli))
        if all(f.A % (p**k) and g.A % (p**k) for p, k in factorize(q)):
            val = abs(paired_s(q, f, xi, zeta, g, xi2, zeta2))
            rep = odd_neq if f.A != g.A else odd_eq
            rep.ratios.append(val / kloosterman_shape(q, f, xi, zeta, g, xi2, zeta2, D))
        nu = int(rng.integers(1, 5))
        val = abs(paired_s(2**nu, f, xi, zeta, g, xi2, zeta2))
        b = even_shape(nu, f, g)
        if b:
            even.ratios.append(val / b)
        elif val > 1e-9:
            even.zero_bound_violations += 1
        L = math.lcm(f.A, g.A)
        divs = [d for d in range(2, min(L, 60) + 1) if L % d == 0]
        if divs:
            q2 = int(rng.choice(divs))
            val = abs(paired_s(q2, f, xi, zeta, g, xi2, zeta2))
            lcm.ratios.append(val / lcm_divisor_shape(q2, f, g))
    return [odd_neq, odd_eq, even, lcm]
