"""Heights, the shifted binary forms Q_g and representation counts.

For ``g = [[a, b], [c, d]]`` the height is ``H(g) = |c|^2 + |d|^2`` and

    Q_g(x, y) = H(g [[1, x + y w], [0, 1]]) = A x^2 + B y^2 + C x + D y + E

with ``A = |c|^2``, ``B = D*A``, ``C = 2(c1 d1 + D c2 d2)``,
``D = 2D(c1 d2 - c2 d1)`` and ``E = |c|^2 + |d|^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import ring
from .errors import CostGuardError
from .group import GroupMat, OrbitBall, a_coeff_array, unimodular_gcd
from .params import CircleParams
from .ring import checked

REPRESENTED_SET_BOUND = 10**7


def height(g: GroupMat, D: int) -> int:
    return checked(ring.norm(g.c, D) + ring.norm(g.d, D))


class QuadForm(NamedTuple):
    A: int
    B: int
    C: int
    D: int
    E: int

    def __call__(self, x: int, y: int) -> int:
        return checked(self.A * x * x + self.B * y * y + self.C * x + self.D * y + self.E)


def qform_of(g: GroupMat, D: int) -> QuadForm:
    (c1, c2), (d1, d2) = g.c, g.d
    A = checked(c1 * c1 + D * c2 * c2)
    return QuadForm(
        A,
        checked(D * A),
        checked(2 * (c1 * d1 + D * c2 * d2)),
        checked(2 * D * (c1 * d2 - c2 * d1)),
        checked(A + d1 * d1 + D * d2 * d2),
    )


def qform_array(rows: np.ndarray, D: int) -> np.ndarray:
    """(n, 5) array of (A, B, C, D, E) for a ball's entry rows."""
    c1, c2, d1, d2 = rows[:, 4], rows[:, 5], rows[:, 6], rows[:, 7]
    A = a_coeff_array(rows, D)
    return np.stack([A, D * A, 2 * (c1 * d1 + D * c2 * d2), 2 * D * (c1 * d2 - c2 * d1),
                     A + d1 * d1 + D * d2 * d2], axis=1)


def form_invariants_hold(f: QuadForm, D: int) -> bool:
    """B = D*A, D*C^2 + D_coef^2 = 4 D (E - A) A, and E >= A >= 0."""
    return (f.B == D * f.A and D * f.C ** 2 + f.D ** 2 == 4 * D * (f.E - f.A) * f.A
            and f.E >= f.A >= 0)


# ---------------------------------------------------------------------------
# smooth cutoff


def _f(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _ramp(t):
    a, b = _f(t), _f(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def psi(x):
    """Smooth bump: 0 outside (0.5, 2.5), 1 on [1, 2], C-infinity ramps between."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    up = (x > 0.5) & (x < 1)
    flat = (x >= 1) & (x <= 2)
    down = (x > 2) & (x < 2.5)
    out[up] = _ramp(2 * (x[up] - 0.5))
    out[flat] = 1.0
    out[down] = _ramp(2 * (2.5 - x[down]))
    return out if out.ndim else float(out)


def window(params: CircleParams, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Integer points carrying weight and their weights Psi(x/X) (or 1 in sharp mode)."""
    X = params.X
    X2 = params.X2
    if mode == "smooth":
        xs = np.arange(math.floor(0.5 * X), math.ceil(2.5 * X) + 1)
        w = psi(xs / X)
        keep = w > 0
        return xs[keep], w[keep]
    if mode == "sharp":
        # X <= x <= 2X, decided exactly through x^2 against X^2
        lo = math.isqrt(X2.numerator // X2.denominator)
        xs = np.arange(max(lo - 1, 0), math.isqrt(4 * X2.numerator // X2.denominator) + 2)
        keep = np.array([X2 <= int(x) ** 2 <= 4 * X2 for x in xs], dtype=bool)
        xs = xs[keep]
        return xs, np.ones(len(xs))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# representation counts


@dataclass
class RepHistogram:
    """R(n) for every n at once: ``weights[n - offset]``."""

    offset: int
    weights: np.ndarray
    mode: str

    def __call__(self, n: int):
        i = n - self.offset
        if 0 <= i < len(self.weights):
            v = self.weights[i]
            return int(v) if self.mode == "sharp" else float(v)
        return 0 if self.mode == "sharp" else 0.0

    def total(self):
        return self.weights.sum()

    def support(self) -> np.ndarray:
        return np.nonzero(self.weights)[0] + self.offset


def ball_values(ball: OrbitBall, params: CircleParams, mode: str):
    """All Q_g(x, y) over the window together with their weights."""
    xs, w = window(params, mode)
    forms = qform_array(ball.entries, ball.D)
    if len(forms) == 0 or len(xs) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0)
    if len(forms) * len(xs) ** 2 > 200_000_000:
        raise CostGuardError("#ball * window^2 exceeds the representation-count budget")
    x = xs[:, None]
    y = xs[None, :]
    ww = (w[:, None] * w[None, :]).ravel()
    vals = []
    for A, B, C, Dc, E in forms:
        vals.append((A * x * x + B * y * y + C * x + Dc * y + E).ravel())
    vals = np.concatenate(vals)
    return vals, np.tile(ww, len(forms))


def rep_histogram(ball: OrbitBall, params: CircleParams, mode: str = "sharp") -> RepHistogram:
    vals, w = ball_values(ball, params, mode)
    if len(vals) == 0:
        return RepHistogram(0, np.zeros(0, dtype=np.int64 if mode == "sharp" else float), mode)
    lo = int(vals.min())
    if mode == "sharp":
        hist = np.bincount(vals - lo)
    else:
        hist = np.bincount(vals - lo, weights=w)
    return RepHistogram(lo, hist, mode)


def rep_count(ball: OrbitBall, n: int, params: CircleParams, mode: str = "sharp"):
    """R(n): weighted number of (g, x, y) with Q_g(x, y) = n."""
    return rep_histogram(ball, params, mode)(n)


# ---------------------------------------------------------------------------
# unimodular-row oracle for H(SL2(Z[w]))


def is_unimodular_row(c: ring.RingElt, d: ring.RingElt, D: int) -> bool:
    """Whether (c, d) is the bottom row of some matrix in SL2(Z[w])."""
    return int(unimodular_gcd(c.re, c.im, d.re, d.im, D)) == 1


def represented_set(D: int, bound: int) -> set[int]:
    """{|c|^2 + |d|^2 <= bound : (c, d) unimodular} by direct enumeration of rows."""
    if bound > REPRESENTED_SET_BOUND:
        raise CostGuardError(f"bound {bound} exceeds {REPRESENTED_SET_BOUND}")
    if bound < 1:
        return set()
    r1 = math.isqrt(bound)
    r2 = math.isqrt(bound // D)
    g1, g2 = np.meshgrid(np.arange(-r1, r1 + 1), np.arange(-r2, r2 + 1), indexing="ij")
    e1, e2 = g1.ravel(), g2.ravel()
    nrm = e1 * e1 + D * e2 * e2
    keep = nrm <= bound
    e1, e2, nrm = e1[keep], e2[keep], nrm[keep]
    order = np.argsort(nrm, kind="stable")
    e1, e2, nrm = e1[order], e2[order], nrm[order]
    found = np.zeros(bound + 1, dtype=bool)
    # c and -c give the same rows up to sign, so half of the c-plane suffices
    half = (e1 > 0) | ((e1 == 0) & (e2 >= 0))
    for c1, c2, nc in zip(e1[half], e2[half], nrm[half]):
        m = np.searchsorted(nrm, bound - nc, side="right")
        d1, d2, nd = e1[:m], e2[:m], nrm[:m]
        ok = unimodular_gcd(c1, c2, d1, d2, D) == 1
        found[nc + nd[ok]] = True
    return set(np.nonzero(found)[0].tolist())
