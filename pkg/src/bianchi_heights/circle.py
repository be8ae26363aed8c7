"""Circle-method decomposition of the smoothed representation count.

R_smooth(n) = M_N(n) + E_N(n), where the major term integrates the wedge
majorant T(theta) against R^(theta) e(-n theta) in closed form and the minor
term is the residual.  A composite Gauss-Legendre quadrature of the same
integrals serves as the independent oracle.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import CostGuardError
from .expsum import ramanujan_array
from .group import GroupSpec, OrbitBall, enumerate_ball, estimate_delta
from .local import LocalStructure
from .ntheory import reduced_residues
from .params import CircleParams
from .qform import RepHistogram, rep_histogram

WORK_BUDGET = 300_000_000  # (#n or #theta) x #distinct values


def wedge(x):
    """min(1 + x, 1 - x)^+."""
    x = np.asarray(x, dtype=float)
    out = np.maximum(0.0, 1.0 - np.abs(x))
    return out if out.ndim else float(out)


def wedge_hat(y):
    """Fourier transform of the wedge: (sin(pi y) / (pi y))^2."""
    out = np.sinc(np.asarray(y, dtype=float)) ** 2
    return out if out.ndim else float(out)


def _arcs(Q0: int) -> list[Fraction]:
    return [Fraction(r, q) for q in range(1, Q0 + 1) for r in reduced_residues(q)]


def tee(theta, params: CircleParams):
    """sum_{q <= Q0} sum'_{r mod q} sum_m wedge((N/K0)(theta + m - r/q))."""
    th = np.asarray(theta, dtype=float)
    scale = params.N / params.K0
    reach = math.ceil(params.K0 / params.N) + 1
    out = np.zeros_like(th)
    for a in _arcs(params.Q0):
        d = th - float(a)
        d = d - np.round(d)
        for m in range(-reach, reach + 1):
            out += wedge(scale * (d + m))
    return out if out.ndim else float(out)


@dataclass
class CircleDecomposition:
    """Major/minor split for one ball and parameter set.

    The smooth histogram W(v) = sum of Psi(x/X) Psi(y/X) over (g, x, y) with
    Q_g(x, y) = v is all that any of the quantities here depend on.
    """

    ball: OrbitBall
    params: CircleParams
    hist: RepHistogram = field(init=False)

    def __post_init__(self) -> None:
        self.hist = rep_histogram(self.ball, self.params, "smooth")
        nz = np.nonzero(self.hist.weights)[0]
        self.values = (nz + self.hist.offset).astype(np.int64)
        self.weights = self.hist.weights[nz].astype(float)

    # -- pieces ------------------------------------------------------------
    def r_smooth(self, ns) -> np.ndarray:
        return np.array([self.hist(int(n)) for n in np.atleast_1d(ns)], dtype=float)

    def r_hat(self, theta) -> np.ndarray:
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        self._guard(len(th))
        out = np.empty(len(th), dtype=complex)
        for i in range(0, len(th), 512):
            ph = np.mod(self.values[None, :] * th[i:i + 512, None], 1.0)
            out[i:i + 512] = np.exp(2j * np.pi * ph) @ self.weights
        return out

    def _guard(self, k: int) -> None:
        if k * max(len(self.values), 1) > WORK_BUDGET:
            raise CostGuardError("decomposition work exceeds budget; shrink the range or the ball")

    def _series(self, m: np.ndarray) -> np.ndarray:
        s = np.zeros(m.shape, dtype=float)
        for q in range(1, self.params.Q0 + 1):
            s += ramanujan_array(q, m)
        return s

    def major(self, ns) -> np.ndarray:
        """Closed-form major term, through Ramanujan sums (exactly real)."""
        ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
        self._guard(len(ns))
        k = self.params.K0 / self.params.N
        out = np.empty(len(ns))
        for i, n in enumerate(ns):
            m = self.values - n
            out[i] = k * np.dot(self.weights, wedge_hat(k * m) * self._series(m))
        return out

    def major_complex(self, ns) -> np.ndarray:
        """Same sum with the exponentials e(m r/q) kept; its imaginary part is float noise."""
        ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
        self._guard(len(ns))
        k = self.params.K0 / self.params.N
        arcs = _arcs(self.params.Q0)
        out = np.empty(len(ns), dtype=complex)
        for i, n in enumerate(ns):
            m = self.values - n
            ph = np.zeros(len(m), dtype=complex)
            for a in arcs:
                ph += np.exp(2j * np.pi * np.mod(m * a.numerator, a.denominator) / a.denominator)
            out[i] = k * np.dot(self.weights * wedge_hat(k * m), ph)
        return out

    def minor(self, ns) -> np.ndarray:
        return self.r_smooth(ns) - self.major(ns)

    # -- quadrature oracle -------------------------------------------------
    def _nodes(self, step_factor: int, order: int = 10) -> tuple[np.ndarray, np.ndarray]:
        N, w = self.params.N, Fraction(self.params.K0, self.params.N)
        br = {Fraction(0), Fraction(1)}
        for a in _arcs(self.params.Q0):
            for m in (-1, 0, 1):
                for s in (-w, 0, w):
                    b = a + m + s
                    if 0 < b < 1:
                        br.add(b)
        br = sorted(float(b) for b in br)
        h = 1.0 / (step_factor * N)
        x, wt = np.polynomial.legendre.leggauss(order)
        pts, wts = [], []
        for lo, hi in zip(br[:-1], br[1:]):
            k = max(1, math.ceil((hi - lo) / h))
            edges = np.linspace(lo, hi, k + 1)
            mid = (edges[1:] + edges[:-1]) / 2
            half = (edges[1:] - edges[:-1]) / 2
            pts.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
            wts.append((half[:, None] * wt[None, :]).ravel())
        return np.concatenate(pts), np.concatenate(wts)

    def quadrature(self, ns, step_factor: int = 64, part: str = "major") -> np.ndarray:
        """int_0^1 T(theta) R^(theta) e(-n theta) (or with 1 - T) by composite Gauss-Legendre."""
        ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
        th, wt = self._nodes(step_factor)
        rh = self.r_hat(th)
        t = tee(th, self.params)
        f = (t if part == "major" else 1.0 - t) * rh * wt
        return np.array([(f * np.exp(-2j * np.pi * np.mod(n * th, 1.0))).sum() for n in ns])


# module-level conveniences ---------------------------------------------------


def r_hat(theta, ball: OrbitBall, params: CircleParams):
    return CircleDecomposition(ball, params).r_hat(theta)


def major_exact(n, ball: OrbitBall, params: CircleParams):
    out = CircleDecomposition(ball, params).major(n)
    return out if np.ndim(n) else float(out[0])


def minor_residual(n, ball: OrbitBall, params: CircleParams):
    out = CircleDecomposition(ball, params).minor(n)
    return out if np.ndim(n) else float(out[0])


# ---------------------------------------------------------------------------
# experiments


@dataclass
class L2Row:
    N: int
    T2: float
    X2: float
    ball_size: int
    minor_l2: float
    normaliser: float
    ratio: float


@dataclass
class L2Report:
    delta: float
    sigma: float
    Q0: int
    rows: list[L2Row]

    @property
    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows]

    @property
    def ratio_of_ratios(self) -> list[float]:
        r = self.ratios
        return [b / a for a, b in zip(r[:-1], r[1:])]

    def to_json(self) -> dict:
        return {"schema": 1, "delta_hat": self.delta, "sigma": self.sigma, "Q0": self.Q0,
                "rows": [asdict(r) for r in self.rows], "ratio_of_ratios": self.ratio_of_ratios}


def l2_minor_experiment(spec: GroupSpec, Ns, sigma=Fraction(1, 8), Q0: int = 2, delta: float | None = None,
                        delta_Ts=(4, 8, 16)) -> L2Report:
    """sum_{N <= n <= 2N} |E_N(n)|^2 / (T^(4 delta - 4) N) along a schedule of N."""
    if delta is None:
        delta = estimate_delta(spec, delta_Ts).delta
    rows = []
    for N in Ns:
        p = CircleParams.from_sigma(N, sigma, Q0=Q0)
        ball = enumerate_ball(spec, T2=p.T2, filtered=True)
        dec = CircleDecomposition(ball, p)
        ns = np.arange(N, 2 * N + 1)
        l2 = float(np.sum(dec.minor(ns) ** 2))
        norm = float(p.T2) ** (2 * delta - 2) * N
        rows.append(L2Row(N, float(p.T2), float(p.X2), len(ball), l2, norm, l2 / norm))
    return L2Report(delta, float(sigma), Q0, rows)


@dataclass
class ExceptionalReport:
    lo: int
    hi: int
    exceptional: list[int]
    admissible_count: int

    @property
    def count(self) -> int:
        return len(self.exceptional)

    @property
    def ratio(self) -> float | None:
        return self.count / self.admissible_count if self.admissible_count else None

    def to_json(self) -> dict:
        return {"schema": 1, "range": [self.lo, self.hi], "exceptional_count": self.count,
                "admissible_count": self.admissible_count, "ratio": self.ratio,
                "exceptional": self.exceptional}


def exceptional_set(ball: OrbitBall, params: CircleParams, structure: LocalStructure,
                    lo: int | None = None, hi: int | None = None) -> ExceptionalReport:
    """Admissible n in [lo, hi] (default [N, 2N]) with R_sharp(n) = 0."""
    lo = params.N if lo is None else lo
    hi = 2 * params.N if hi is None else hi
    hist = rep_histogram(ball, params, "sharp")
    ns = np.arange(lo, hi + 1)
    adm = structure.admissible_mask(ns)
    rs = np.array([hist(int(n)) for n in ns])
    E = ns[adm & (rs == 0)]
    return ExceptionalReport(lo, hi, [int(n) for n in E], int(adm.sum()))


def circle_table(ball: OrbitBall, params: CircleParams, structure: LocalStructure | None,
                 ns) -> list[dict]:
    dec = CircleDecomposition(ball, params)
    sharp = rep_histogram(ball, params, "sharp")
    ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
    major = dec.major(ns)
    smooth = dec.r_smooth(ns)
    adm = structure.admissible_mask(ns) if structure is not None else np.ones(len(ns), dtype=bool)
    return [{"n": int(n), "admissible": bool(a), "R_sharp": int(sharp(int(n))), "R_smooth": float(s),
             "major": float(m), "minor": float(s - m)} for n, a, s, m in zip(ns, adm, smooth, major)]


def write_csv(rows: list[dict], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["n", "admissible", "R_sharp", "R_smooth", "major", "minor"])
        w.writeheader()
        w.writerows(rows)


def write_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2))
