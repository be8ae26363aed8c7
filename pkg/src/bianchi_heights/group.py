"""SL2(Z[sqrt(-D)]) matrices, orbit balls and residue groups.

Matrices are stored as eight integers ``(a1, a2, b1, b2, c1, c2, d1, d2)``
where ``a = a1 + a2*w`` and ``w^2 = -D``.  Balls are kept as sorted int64
arrays of shape ``(n, 8)``; :class:`GroupMat` objects are materialised on
demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
from numba import njit

from . import ring
from .params import as_rational
from .errors import CostGuardError, SpecError, UnsaturatedBallError
from .ring import RingElt, checked

DEFAULT_FILTER_CONST = 100
DEFAULT_WORD_LEN_CAP = 100_000
RESIDUE_Q_BOUND = 13**3


class GroupMat(NamedTuple):
    a: RingElt
    b: RingElt
    c: RingElt
    d: RingElt

    @classmethod
    def from_entries(cls, e: Sequence[int]) -> "GroupMat":
        e = [int(v) for v in e]
        return cls(RingElt(e[0], e[1]), RingElt(e[2], e[3]), RingElt(e[4], e[5]), RingElt(e[6], e[7]))

    @property
    def entries(self) -> tuple[int, ...]:
        return (*self.a, *self.b, *self.c, *self.d)

    @property
    def bottom_row(self) -> tuple[RingElt, RingElt]:
        return (self.c, self.d)


IDENTITY = GroupMat(ring.ONE, ring.ZERO, ring.ZERO, ring.ONE)


def det(g: GroupMat, D: int) -> RingElt:
    return ring.sub(ring.mul(g.a, g.d, D), ring.mul(g.b, g.c, D))


def mat_mul(g: GroupMat, h: GroupMat, D: int) -> GroupMat:
    m, s = ring.mul, ring.add
    return GroupMat(
        s(m(g.a, h.a, D), m(g.b, h.c, D)),
        s(m(g.a, h.b, D), m(g.b, h.d, D)),
        s(m(g.c, h.a, D), m(g.d, h.c, D)),
        s(m(g.c, h.b, D), m(g.d, h.d, D)),
    )


def mat_inv(g: GroupMat) -> GroupMat:
    """Inverse of a determinant-1 matrix: [[d, -b], [-c, a]]."""
    return GroupMat(g.d, ring.neg(g.b), ring.neg(g.c), g.a)


def frob_norm_sq(g: GroupMat, D: int) -> int:
    return checked(sum(ring.norm(x, D) for x in g))


def reduce_mod(g: GroupMat, q: int) -> GroupMat:
    return GroupMat(*(ring.ring_mod(x, q) for x in g))


def mat_mul_mod(g: GroupMat, h: GroupMat, D: int, q: int) -> GroupMat:
    return reduce_mod(mat_mul(g, h, D), q)


def unipotent(x: int, y: int) -> GroupMat:
    """[[1, x + y*w], [0, 1]]."""
    return GroupMat(ring.ONE, RingElt(x, y), ring.ZERO, ring.ONE)


def op_norm(g: GroupMat, D: int) -> float:
    """Largest singular value of ``g`` viewed as a complex matrix."""
    s = math.sqrt(D)
    m = np.array([[complex(x.re, x.im * s) for x in (g.a, g.b)], [complex(x.re, x.im * s) for x in (g.c, g.d)]])
    return float(np.linalg.norm(m, 2))


# ---------------------------------------------------------------------------
# group specs


@dataclass
class GroupSpec:
    D: int
    generators: list[GroupMat]
    label: str = ""

    def __post_init__(self) -> None:
        if not ring.is_squarefree(self.D):
            raise SpecError(f"D={self.D} is not a positive squarefree integer")
        gens: list[GroupMat] = []
        for g in self.generators:
            g = GroupMat.from_entries(g.entries if isinstance(g, GroupMat) else g)
            if det(g, self.D) != ring.ONE:
                raise SpecError(f"generator {g.entries} does not have determinant 1")
            if g not in gens:
                gens.append(g)
        if not gens:
            raise SpecError("a group spec needs at least one generator")
        for g in list(gens):
            gi = mat_inv(g)
            if gi not in gens:
                gens.append(gi)
        self.generators = gens

    @property
    def generator_array(self) -> np.ndarray:
        return np.array([g.entries for g in self.generators], dtype=np.int64)

    def max_op_norm(self) -> float:
        return max(op_norm(g, self.D) for g in self.generators)


def parse_spec(text: str, label: str = "") -> GroupSpec:
    """Parse the line-oriented group-spec format.

    The first non-comment line is ``D <int>``; each following line holds the
    eight integers ``a1 a2 b1 b2 c1 c2 d1 d2`` of one generator.  ``#`` starts
    a comment.
    """
    D = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if D is None:
            if len(parts) != 2 or parts[0] != "D":
                raise SpecError(f"line {lineno}: expected 'D <int>', got {raw!r}")
            try:
                D = int(parts[1])
            except ValueError:
                raise SpecError(f"line {lineno}: bad D value {parts[1]!r}") from None
            continue
        if len(parts) != 8:
            raise SpecError(f"line {lineno}: expected 8 integers, got {len(parts)}")
        try:
            gens.append(GroupMat.from_entries([int(p) for p in parts]))
        except ValueError:
            raise SpecError(f"line {lineno}: non-integer entry in {raw!r}") from None
    if D is None:
        raise SpecError("missing 'D <int>' header")
    return GroupSpec(D, gens, label)


def load_spec(path: str | Path) -> GroupSpec:
    path = Path(path)
    return parse_spec(path.read_text(), label=path.stem)


def format_spec(spec: GroupSpec) -> str:
    lines = [f"# {spec.label}" if spec.label else "# group spec", f"D {spec.D}"]
    lines += [" ".join(str(v) for v in g.entries) for g in spec.generators]
    return "\n".join(lines) + "\n"


def bianchi_spec(D: int) -> GroupSpec:
    """Translations by 1 and w together with S=[[0,-1],[1,0]].

    These generate the full Bianchi group when Z[w] is Euclidean (D=1, 2);
    for other D they generate the elementary subgroup.
    """
    gens = [unipotent(1, 0), unipotent(0, 1), GroupMat.from_entries((0, 0, -1, 0, 1, 0, 0, 0))]
    return GroupSpec(D, gens, label=f"bianchi_D{D}")


def parabolic_spec(D: int = 1) -> GroupSpec:
    return GroupSpec(D, [unipotent(1, 0)], label=f"parabolic_D{D}")


def fixture_path(name: str) -> Path:
    return Path(__file__).with_name("data") / name


# ---------------------------------------------------------------------------
# ball enumeration


def _radius_sq(T=None, T2=None) -> Fraction:
    if (T is None) == (T2 is None):
        raise ValueError("give exactly one of T or T2")
    T2 = as_rational(T) ** 2 if T2 is None else as_rational(T2)
    if T2 <= 0:
        raise ValueError("radius must be positive")
    return T2


@njit(cache=True)
def _expand(front, gens, D, prune_sq, half, base):
    F = front.shape[0]
    G = gens.shape[0]
    out = np.empty(F * G, np.int64)
    p = np.empty(8, np.int64)
    n = 0
    for i in range(F):
        a1, a2, b1, b2, c1, c2, d1, d2 = front[i]
        for j in range(G):
            e1, e2, f1, f2, g1, g2, h1, h2 = gens[j]
            p[0] = a1 * e1 - D * a2 * e2 + b1 * g1 - D * b2 * g2
            p[1] = a1 * e2 + a2 * e1 + b1 * g2 + b2 * g1
            p[2] = a1 * f1 - D * a2 * f2 + b1 * h1 - D * b2 * h2
            p[3] = a1 * f2 + a2 * f1 + b1 * h2 + b2 * h1
            p[4] = c1 * e1 - D * c2 * e2 + d1 * g1 - D * d2 * g2
            p[5] = c1 * e2 + c2 * e1 + d1 * g2 + d2 * g1
            p[6] = c1 * f1 - D * c2 * f2 + d1 * h1 - D * d2 * h2
            p[7] = c1 * f2 + c2 * f1 + d1 * h2 + d2 * h1
            fn = 0
            for t in range(4):
                fn += p[2 * t] * p[2 * t] + D * p[2 * t + 1] * p[2 * t + 1]
            if fn < prune_sq:
                k = 0
                for t in range(8):
                    k = k * base + (p[t] + half)
                out[n] = k
                n += 1
    return out[:n]


def _decode(keys: np.ndarray, half: int, base: int) -> np.ndarray:
    rows = np.empty((len(keys), 8), dtype=np.int64)
    k = keys.copy()
    for t in range(7, -1, -1):
        rows[:, t] = k % base - half
        k //= base
    return rows


def _encode(rows: np.ndarray, half: int, base: int) -> np.ndarray:
    k = np.zeros(len(rows), dtype=np.int64)
    for t in range(8):
        k = k * base + (rows[:, t] + half)
    return k


def frob_array(rows: np.ndarray, D: int) -> np.ndarray:
    return (rows[:, 0::2] ** 2).sum(axis=1) + D * (rows[:, 1::2] ** 2).sum(axis=1)


def a_coeff_array(rows: np.ndarray, D: int) -> np.ndarray:
    return rows[:, 4] ** 2 + D * rows[:, 5] ** 2


def _canonical_sort(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


@dataclass
class OrbitBall:
    """Distinct elements with ``||g||^2 < T2``, optionally with A_g >= T2/filter_const."""

    spec: GroupSpec
    T2: Fraction
    entries: np.ndarray
    filtered: bool
    word_len_cap: int
    saturated: bool
    filter_const: int = DEFAULT_FILTER_CONST
    layers: int = 0
    pruned_size: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def D(self) -> int:
        return self.spec.D

    @property
    def T(self) -> float:
        return math.sqrt(self.T2)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def elements(self) -> list[GroupMat]:
        return [GroupMat.from_entries(r) for r in self.entries]

    def __iter__(self) -> Iterator[GroupMat]:
        return iter(self.elements)

    def key_set(self) -> set[tuple[int, ...]]:
        return {tuple(int(v) for v in r) for r in self.entries}

    def subset(self, n: int) -> "OrbitBall":
        """The first ``n`` elements in canonical order (for tiny experiments)."""
        return OrbitBall(self.spec, self.T2, self.entries[:n].copy(), self.filtered, self.word_len_cap,
                         self.saturated, self.filter_const, self.layers, self.pruned_size, list(self.warnings))

    def filter(self, filter_const: int = DEFAULT_FILTER_CONST) -> "OrbitBall":
        """Restrict to A_gamma >= T^2 / filter_const."""
        T2 = self.T2
        A = a_coeff_array(self.entries, self.D)
        keep = A * filter_const * T2.denominator >= T2.numerator
        return OrbitBall(self.spec, self.T2, self.entries[keep], True, self.word_len_cap, self.saturated,
                         filter_const, self.layers, self.pruned_size, list(self.warnings))


def _bfs(spec: GroupSpec, T2: Fraction, word_len_cap: int, keep: bool):
    """Layered BFS over right multiplication by generators.

    Products whose squared norm reaches ``(T * max_op_norm)^2`` are pruned.
    Because the pruned Cayley graph is undirected, a new vertex can only
    collide with the current or the previous layer, so only those are kept
    for deduplication.
    """
    D = spec.D
    gens = spec.generator_array
    prune = math.sqrt(T2) * spec.max_op_norm()
    prune_sq = prune * prune * (1 + 1e-12)
    half = int(math.ceil(prune)) + 1
    base = 2 * half + 1
    if 8 * math.log2(base) >= 62:
        raise CostGuardError(f"radius T^2={T2} too large for the packed int64 ball keys")
    T2n, T2d = T2.numerator, T2.denominator

    ident = np.array([IDENTITY.entries], dtype=np.int64)
    prev = np.empty(0, dtype=np.int64)
    cur = _encode(ident, half, base)
    front = ident
    in_ball = [ident] if 2 * T2d < T2n else []
    count = len(in_ball[0]) if in_ball else 0
    total = 1
    layer = 0
    while len(front) and layer < word_len_cap:
        layer += 1
        keys = np.unique(_expand(front, gens, D, prune_sq, half, base))
        keys = np.setdiff1d(np.setdiff1d(keys, cur, assume_unique=True), prev, assume_unique=True)
        prev, cur = cur, keys
        front = _decode(keys, half, base)
        total += len(front)
        new = front[frob_array(front, D) * T2d < T2n]
        count += len(new)
        if keep and len(new):
            in_ball.append(new)
    saturated = True
    if len(front):
        keys = np.unique(_expand(front, gens, D, prune_sq, half, base))
        keys = np.setdiff1d(np.setdiff1d(keys, cur, assume_unique=True), prev, assume_unique=True)
        extra = _decode(keys, half, base)
        saturated = not bool(np.any(frob_array(extra, D) * T2d < T2n))
    rows = np.concatenate(in_ball) if (keep and in_ball) else np.empty((0, 8), dtype=np.int64)
    return rows, count, saturated, layer, total


def enumerate_ball(spec: GroupSpec, T=None, filtered: bool = False, word_len_cap: int = DEFAULT_WORD_LEN_CAP,
                   filter_const: int = DEFAULT_FILTER_CONST, *, T2=None) -> OrbitBall:
    """All distinct group elements with ``||g||^2 < T^2`` reachable by BFS.

    The radius is given either as ``T`` or as its square ``T2`` (both exact
    rationals).  ``saturated`` is True when the BFS ran dry before
    ``word_len_cap`` layers, or when one extra layer past the cap adds nothing
    inside the ball.
    """
    T2 = _radius_sq(T, T2)
    if word_len_cap < 1:
        raise ValueError("word_len_cap must be >= 1")
    rows, _, saturated, layers, total = _bfs(spec, T2, word_len_cap, keep=True)
    ball = OrbitBall(spec, T2, _canonical_sort(rows), False, word_len_cap, saturated,
                     filter_const, layers, total)
    if not saturated:
        ball.warnings.append(f"word-length cap {word_len_cap} reached before saturation")
    return ball.filter(filter_const) if filtered else ball


def ball_count(spec: GroupSpec, T, word_len_cap: int = DEFAULT_WORD_LEN_CAP) -> tuple[int, bool]:
    """Size of the unfiltered ball without storing it."""
    _, count, saturated, _, _ = _bfs(spec, _radius_sq(T), word_len_cap, keep=False)
    return count, saturated


@dataclass
class DeltaEstimate:
    Ts: list[float]
    counts: list[int]
    slope: float
    halfSlope: float

    @property
    def delta(self) -> float:
        return self.halfSlope


def estimate_delta(spec: GroupSpec, Ts: Iterable, word_len_cap: int = DEFAULT_WORD_LEN_CAP) -> DeltaEstimate:
    """Least-squares slope of log #B_T against log T; half of it estimates delta."""
    Ts = sorted(as_rational(T) for T in Ts)
    if len(Ts) < 3:
        raise ValueError("need at least three radii")
    counts = []
    for T in Ts:
        c, sat = ball_count(spec, T, word_len_cap)
        if not sat:
            raise UnsaturatedBallError(f"ball at T={T} is not saturated at cap {word_len_cap}")
        counts.append(c)
    return delta_from_counts([float(T) for T in Ts], counts)


def delta_from_counts(Ts: Sequence[float], counts: Sequence[int]) -> DeltaEstimate:
    if min(counts) <= 0:
        raise ValueError("every ball in the regression must be non-empty")
    slope = float(np.polyfit(np.log(Ts), np.log(counts), 1)[0])
    return DeltaEstimate(list(Ts), list(counts), slope, slope / 2)


def bottom_row_multiplicity(ball: OrbitBall) -> int:
    """Largest number of ball elements sharing one bottom row."""
    if len(ball) == 0:
        return 0
    _, counts = np.unique(ball.entries[:, 4:], axis=0, return_counts=True)
    return int(counts.max())


def check_closure(ball: OrbitBall, sample: int | None = None, seed: int = 0) -> list[tuple[int, int]]:
    """Pairs (i, j) whose in-ball product is missing from the ball."""
    keys = ball.key_set()
    elts = ball.elements
    T2 = ball.T2
    n = len(elts)
    if sample is not None and sample < n * n:
        rng = np.random.default_rng(seed)
        flat = rng.choice(n * n, size=sample, replace=False)
        pairs = [(int(k) // n, int(k) % n) for k in flat]
    else:
        pairs = [(i, j) for i in range(n) for j in range(n)]
    missing = []
    for i, j in pairs:
        p = mat_mul(elts[i], elts[j], ball.D)
        if frob_norm_sq(p, ball.D) < T2 and p.entries not in keys:
            missing.append((i, j))
    return missing


# ---------------------------------------------------------------------------
# residue rings and groups


def unimodular_gcd(c1, c2, d1, d2, D):
    """gcd of the 2x2 minors of the Z-lattice spanned by c, c*w, d, d*w.

    The row (c, d) generates the unit ideal of Z[w] (resp. of Z[w]/q) exactly
    when this gcd is 1 (resp. coprime to q).  Works elementwise on arrays.
    """
    nc = c1 * c1 + D * c2 * c2
    nd = d1 * d1 + D * d2 * d2
    cross = c1 * d2 - c2 * d1
    dot = c1 * d1 + D * c2 * d2
    return np.gcd(np.gcd(nc, nd), np.gcd(cross, dot))


def residue_rows(q: int) -> np.ndarray:
    """All (c1, c2, d1, d2) in [0, q)^4."""
    g = np.indices((q, q, q, q), dtype=np.int64).reshape(4, -1).T
    return g


def unimodular_rows_mod(D: int, q: int) -> np.ndarray:
    """Bottom rows of SL2(Z[w]/q): rows generating the unit ideal mod q."""
    if q > RESIDUE_Q_BOUND:
        raise CostGuardError(f"q={q} exceeds residue enumeration bound {RESIDUE_Q_BOUND}")
    if q ** 4 > 60_000_000:
        raise CostGuardError(f"q={q}: {q**4} residue rows is beyond the enumeration budget")
    rows = residue_rows(q)
    if q == 1:
        return rows
    g = unimodular_gcd(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3], D)
    return rows[np.gcd(g, q) == 1]


def solve_top_row(c: RingElt, d: RingElt, D: int, q: int | None = None) -> tuple[RingElt, RingElt]:
    """Some (a, b) with a*d - b*c = 1, exactly or mod q, by integer column reduction.

    Raises ValueError when (c, d) does not generate the unit ideal.
    """
    w = lambda x: (-D * x.im, x.re)  # noqa: E731  coordinates of x*w
    cols = [(d.re, d.im), w(d), (-c.re, -c.im), tuple(-v for v in w(c))]
    if q is not None:
        cols += [(q, 0), (0, q)]
    n = len(cols)
    M = [list(col) for col in cols]
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # U[col] = combination of unknowns

    def combine(i, j, a, b, cc, dd):
        # col_i, col_j <- a*col_i + b*col_j, cc*col_i + dd*col_j
        Mi, Mj, Ui, Uj = M[i], M[j], U[i], U[j]
        M[i] = [a * x + b * y for x, y in zip(Mi, Mj)]
        M[j] = [cc * x + dd * y for x, y in zip(Mi, Mj)]
        U[i] = [a * x + b * y for x, y in zip(Ui, Uj)]
        U[j] = [cc * x + dd * y for x, y in zip(Ui, Uj)]

    def xgcd(a, b):
        x0, x1, y0, y1 = 1, 0, 0, 1
        while b:
            t = a // b
            a, b = b, a - t * b
            x0, x1 = x1, x0 - t * x1
            y0, y1 = y1, y0 - t * y1
        return a, x0, y0

    for row, start in ((0, 0), (1, 1)):
        for j in range(start + 1, n):
            a, b = M[start][row], M[j][row]
            if b == 0:
                continue
            g, s, t = xgcd(a, b)
            combine(start, j, s, t, -b // g, a // g)
    # lower triangular: M[0] = (h00, h01), M[1] = (0, h11)
    h00, h01 = M[0]
    h11 = M[1][1]
    if abs(h00) != 1 or abs(h11) != 1:
        raise ValueError("row does not generate the unit ideal")
    x0 = 1 // h00
    x1 = (0 - x0 * h01) // h11
    coef = [x0 * U[0][k] + x1 * U[1][k] for k in range(n)]
    if q is None:
        return RingElt(coef[0], coef[1]), RingElt(coef[2], coef[3])
    return RingElt(coef[0] % q, coef[1] % q), RingElt(coef[2] % q, coef[3] % q)


@dataclass
class ResidueGroup:
    """SL2(Z[w]/q) described by its bottom rows; each row has q^2 completions."""

    D: int
    q: int
    rows: np.ndarray

    @property
    def order(self) -> int:
        return len(self.rows) * self.q * self.q

    def __iter__(self) -> Iterator[GroupMat]:
        q, D = self.q, self.D
        for c1, c2, d1, d2 in self.rows.tolist():
            c, d = RingElt(c1, c2), RingElt(d1, d2)
            if q == 1:
                yield GroupMat(ring.ZERO, ring.ZERO, ring.ZERO, ring.ZERO)
                continue
            a0, b0 = solve_top_row(c, d, D, q)
            for t1 in range(q):
                for t2 in range(q):
                    t = RingElt(t1, t2)
                    a = ring.ring_mod(ring.add(a0, ring.mul(t, c, D)), q)
                    b = ring.ring_mod(ring.add(b0, ring.mul(t, d, D)), q)
                    yield GroupMat(a, b, c, d)


def full_residue_group(D: int, q: int) -> ResidueGroup:
    return ResidueGroup(D, q, unimodular_rows_mod(D, q))


def brute_force_sl2_mod(D: int, q: int) -> np.ndarray:
    """SL2(Z[w]/q) by the direct 8-fold loop (vectorised); small q only."""
    if q ** 8 > 50_000_000:
        raise CostGuardError(f"q={q} too large for the 8-fold brute force")
    half = residue_rows(q)  # (a1, a2, b1, b2) or (c1, c2, d1, d2)
    out = []
    for top in half:
        a1, a2, b1, b2 = top
        c1, c2, d1, d2 = half.T
        re = (a1 * d1 - D * a2 * d2 - b1 * c1 + D * b2 * c2) % q
        im = (a1 * d2 + a2 * d1 - b1 * c2 - b2 * c1) % q
        ok = (re == 1 % q) & (im == 0)
        if ok.any():
            sel = half[ok]
            out.append(np.hstack([np.broadcast_to(top, (len(sel), 4)), sel]))
    return np.concatenate(out) if out else np.empty((0, 8), dtype=np.int64)


def ball_image_mod(ball: OrbitBall, q: int) -> np.ndarray:
    """Distinct residues of the ball's elements mod q, in lexicographic order."""
    if len(ball) == 0:
        return np.empty((0, 8), dtype=np.int64)
    r = ball.entries % q
    if q**8 >= 2**62:
        return np.unique(r, axis=0)
    keys = np.zeros(len(r), dtype=np.int64)
    for j in range(8):
        keys = keys * q + r[:, j]
    keys = np.unique(keys)
    out = np.empty((len(keys), 8), dtype=np.int64)
    for j in range(7, -1, -1):
        out[:, j] = keys % q
        keys //= q
    return out


def is_surjective_mod(ball: OrbitBall, q: int) -> bool:
    return len(ball_image_mod(ball, q)) == full_residue_group(ball.D, q).order
