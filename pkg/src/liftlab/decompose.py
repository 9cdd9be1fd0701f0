"""Blockwise-dense certification and the rectangular decomposition.

All thresholds are compared in powered form: Pr^5 against 2^(-4b|S|) for
the 0.8 log q density bound, ratios^20 against 2^(-bd) for delta, and so on.

The rectangular algorithm runs on `CellPairDensity`.  When XDecompose or
YDecompose enumerates beta over [q]^S, values of beta lying in the same
atom produce isomorphic sub-problems, so each atom tuple is explored once
and carries a multiplicity.  Trees and leaves therefore describe *families*
of rectangles; every count and mass below is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cells import CellPairDensity, Side, sides_intersect
from .core import Density, PairDensity, Verdict, block_index, block_point, pow2_ge, pow2_le
from .errors import DomainError, InputError, ResourceError

DEFAULT_NODE_CAP = 200_000
EXPLICIT_PARTITION_CAP = 1 << 16


def _b_of(q: int) -> int:
    return q.bit_length() - 1


def _dense_ok(p: Fraction, size: int, b: int) -> bool:
    """p <= q^(-0.8 size), i.e. p^5 <= 2^(-4 b size)."""
    return p ** 5 * (Fraction(2) ** (4 * b * size)) <= 1


# ---------------------------------------------------------------- explicit densities


@dataclass(frozen=True)
class Violation:
    S: tuple
    alpha: tuple
    p: Fraction


def _subsets_of(coords: Sequence[int], ascending: bool = True):
    sizes = range(1, len(coords) + 1) if ascending else range(len(coords), 0, -1)
    for k in sizes:
        for S in itertools.combinations(coords, k):
            yield S


def is_blockwise_dense(u: Density, excluded: Sequence[int] = ()) -> Verdict:
    """Scan S over [n] minus `excluded` (size, then lexicographic) for Pr[X_S = alpha] > q^(-0.8|S|)."""
    b = _b_of(u.q)
    coords = [i for i in range(u.n) if i not in set(excluded)]
    for S in _subsets_of(coords):
        marg = u.marginal(S)
        for idx in _lex_indices(u.q, len(S)):
            p = marg.mass[idx] / marg.size
            if p and not _dense_ok(p, len(S), b):
                alpha = block_point(idx, u.q, len(S))
                return Verdict(False, "Pr[X_%s = %s] = %s" % (S, alpha, p), Violation(S, alpha, p))
    return Verdict(True)


def _lex_indices(q: int, k: int):
    """Indices of [q]^k in lexicographic order of the tuple (first coordinate most significant)."""
    for tup in itertools.product(range(q), repeat=k):
        yield block_index(tup, q)


def zero_entropy_blocks(u: Density) -> tuple:
    out = []
    for i in range(u.n):
        marg = u.marginal((i,))
        if sum(1 for m in marg.mass if m) == 1:
            out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class CBDVerdict:
    ok: bool
    fixed: tuple
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_cbd(u: Density, d) -> CBDVerdict:
    fixed = zero_entropy_blocks(u)
    if len(fixed) > d:
        return CBDVerdict(False, fixed, "%d fixed blocks exceed d = %s" % (len(fixed), d))
    v = is_blockwise_dense(u, fixed)
    if not v:
        return CBDVerdict(False, fixed, v.reason)
    return CBDVerdict(True, fixed)


def check_aligned(u: Density, v: Density, d) -> CBDVerdict:
    cu, cv = check_cbd(u, d), check_cbd(v, d)
    if not cu:
        return CBDVerdict(False, cu.fixed, "x side: " + cu.reason)
    if not cv:
        return CBDVerdict(False, cv.fixed, "y side: " + cv.reason)
    if cu.fixed != cv.fixed:
        return CBDVerdict(False, cu.fixed, "fixed blocks differ: %s vs %s" % (cu.fixed, cv.fixed))
    return CBDVerdict(True, cu.fixed)


# ---------------------------------------------------------------- warm-up decomposition


@dataclass(frozen=True)
class Part:
    points: frozenset
    fixed: tuple
    alpha: tuple
    mass: Fraction


@dataclass(frozen=True)
class OneDimResult:
    parts: tuple
    error: frozenset
    error_mass: Fraction
    t: Fraction


def _restrict(u: Density, points) -> Density:
    w = [u.mass[i] if i in points else 0 for i in range(u.size)]
    return Density.from_weights(u.q, u.n, w)


def decompose_1d(mu: Density, t) -> OneDimResult:
    """Peel off fibers {y_I = alpha} for maximal low-entropy I until the rest is dense or light."""
    t = Fraction(t)
    b = _b_of(mu.q)
    pmax, _ = mu.max_probability()
    if not pow2_le(pmax, -b * (mu.n - t)):
        raise DomainError("min-entropy below (n - t) log q")
    S = set(range(mu.size))
    parts = []
    all_coords = list(range(mu.n))
    while True:
        mass = sum((mu.mass[i] for i in S), Fraction(0)) / mu.size
        if mass == 0:
            return OneDimResult(tuple(parts), frozenset(S), mass, t)
        cond = _restrict(mu, S)
        if is_blockwise_dense(cond):
            parts.append(Part(frozenset(S), (), (), mass))
            return OneDimResult(tuple(parts), frozenset(), Fraction(0), t)
        if pow2_le(mass, -b * t):
            return OneDimResult(tuple(parts), frozenset(S), mass, t)
        chosen = None
        for I in _subsets_of(all_coords, ascending=False):
            marg = cond.marginal(I)
            if all(_dense_ok(m / marg.size, len(I), b) for m in marg.mass if m):
                continue
            for idx in _lex_indices(mu.q, len(I)):
                p = marg.mass[idx] / marg.size
                # p >= q^(-0.8|I|)
                if p and p ** 5 * Fraction(2) ** (4 * b * len(I)) >= 1:
                    chosen = (I, block_point(idx, mu.q, len(I)))
                    break
            break
        I, alpha = chosen
        S1 = {i for i in S if all(block_point(i, mu.q, mu.n)[c] == a for c, a in zip(I, alpha))}
        parts.append(Part(frozenset(S1), I, alpha, sum((mu.mass[i] for i in S1), Fraction(0)) / mu.size))
        S -= S1


def verify_1d(mu: Density, res: OneDimResult) -> Verdict:
    seen = set()
    for part in res.parts:
        if part.points & seen:
            return Verdict(False, "parts overlap")
        seen |= part.points
    if res.error & seen or len(seen | res.error) != mu.size:
        return Verdict(False, "parts do not partition the domain")
    b = _b_of(mu.q)
    if not pow2_le(res.error_mass, -b * res.t):
        return Verdict(False, "error mass %s exceeds q^-t" % res.error_mass)
    for k, part in enumerate(res.parts):
        cbd = check_cbd(_restrict(mu, part.points), 10 * res.t)
        if not cbd:
            return Verdict(False, "part %d is not 10t-CBD: %s" % (k, cbd.reason), k)
    return Verdict(True)


# ---------------------------------------------------------------- premise


def _ceil_log2(r: Fraction) -> int:
    """Smallest integer k with r <= 2^k, for r > 0."""
    num, den = r.numerator, r.denominator
    k = num.bit_length() - den.bit_length()
    while Fraction(num, den) > Fraction(2) ** k:
        k += 1
    while Fraction(num, den) <= Fraction(2) ** (k - 1):
        k -= 1
    return k


def as_cell_density(mu) -> CellPairDensity:
    if isinstance(mu, CellPairDensity):
        return mu
    if isinstance(mu, PairDensity):
        return CellPairDensity.from_pair_density(mu)
    raise InputError("expected a PairDensity or CellPairDensity")


def projected_max_probability(mu: CellPairDensity, I: Sequence[int]) -> Fraction:
    """max over (x_I, y_I) of Pr[X_I = x_I, Y_I = y_I]."""
    acc = {}
    for (kx, ky), w in mu.weights.items():
        rest = 1
        for i in range(mu.n):
            if i not in I:
                rest *= mu.x_cells[i][kx[i]].size * mu.y_cells[i][ky[i]].size
        key = (tuple(kx[i] for i in I), tuple(ky[i] for i in I))
        acc[key] = acc.get(key, 0) + w * rest
    return max(acc.values())


def check_premise(mu) -> Fraction:
    """Least t on the 1/10 grid with H_inf(mu_I) >= 1.9 b |I| - t for every I (t >= 0)."""
    mu = as_cell_density(mu)
    b = mu.b
    best = 0
    for k in range(1, mu.n + 1):
        for I in itertools.combinations(range(mu.n), k):
            p = projected_max_probability(mu, I)
            # p^10 <= 2^(10t - 19 b |I|)  <=>  10t >= log2(p^10 2^(19 b |I|))
            need = _ceil_log2(p ** 10 * Fraction(2) ** (19 * b * k))
            best = max(best, need)
    return Fraction(best, 10)


# ---------------------------------------------------------------- rectangular decomposition


@dataclass
class Leaf:
    kind: str  # "good", "error_a" or "error_b"
    A: Side
    B: Side
    F: tuple
    mass: Fraction  # probability of a single member rectangle
    multiplicity: int
    node: int

    @property
    def total_mass(self) -> Fraction:
        return self.mass * self.multiplicity

    def fixed_values(self, side: str) -> dict:
        """Block -> value (int) or pinned atom for each fixed block."""
        s = self.A if side == "x" else self.B
        out = {}
        for i in self.F:
            j = s.fixed_value(i)
            atom = s.partition[i][j] if j is not None else None
            if atom is None:
                out[i] = None
            elif i in s.pinned:
                out[i] = atom
            else:
                out[i] = atom.only()
        return out


@dataclass
class TreeNode:
    id: int
    kind: str  # "Decompose", "XDecompose", "YDecompose"
    F: tuple
    mass: Fraction  # mu of one member rectangle
    multiplicity: int
    S: tuple = ()
    alpha: tuple = ()
    children: list = field(default_factory=list)
    rel: list = field(default_factory=list)  # mu(child | self) for one member child
    theta: list = field(default_factory=list)  # Decompose only: relative mass of R before each call
    terminal: str = None
    terminal_rel: Fraction = Fraction(0)
    leaf: int = None


@dataclass
class DecompositionResult:
    mu: CellPairDensity
    d: int
    b: int
    n: int
    t: Fraction
    leaves: list
    root: TreeNode
    node_count: int

    @property
    def good(self) -> list:
        return [l for l in self.leaves if l.kind == "good"]

    @property
    def error_a(self) -> list:
        return [l for l in self.leaves if l.kind == "error_a"]

    @property
    def error_b(self) -> list:
        return [l for l in self.leaves if l.kind == "error_b"]

    def error_mass(self, kind: str = None) -> Fraction:
        kinds = ("error_a", "error_b") if kind is None else (kind,)
        return sum((l.total_mass for l in self.leaves if l.kind in kinds), Fraction(0))

    def good_count(self) -> int:
        return sum(l.multiplicity for l in self.good)


def find_violation(mu: CellPairDensity, A: Side, B: Side, which: str, F: Sequence[int]):
    """First (S, alpha, p) with Pr[side_S = alpha] > q^(-0.8|S|) under mu restricted to A x B."""
    b = mu.b
    own = A if which == "x" else B
    coords = [i for i in range(mu.n) if i not in set(F)]
    for S in _subsets_of(coords):
        marg = mu.marginal_on(A, B, which, S)
        bad = None
        for key, p in marg.items():
            if p and not _dense_ok(p, len(S), b):
                alpha = tuple(own.partition[i][j].first() for i, j in zip(S, key))
                if bad is None or alpha < bad[0]:
                    bad = (alpha, p)
        if bad is not None:
            return Violation(S, bad[0], bad[1])
    return None


def _family_keys(side: Side, S: Sequence[int]) -> list:
    keys = {tuple(box[i] for i in S) for box in side.boxes}
    return sorted(keys, key=lambda k: tuple(side.partition[i][j].first() for i, j in zip(S, k)))


class _Runner:
    def __init__(self, mu: CellPairDensity, d: int, node_cap: int):
        self.mu = mu
        self.d = d
        self.b = mu.b
        self.node_cap = node_cap
        self.leaves = []
        self.count = 0

    def _node(self, **kw) -> TreeNode:
        if self.count >= self.node_cap:
            raise ResourceError("execution tree exceeds %d nodes" % self.node_cap)
        node = TreeNode(id=self.count, **kw)
        self.count += 1
        return node

    def _leaf(self, node: TreeNode, kind: str, A: Side, B: Side, F, mass, mult, rel):
        node.terminal = kind
        node.terminal_rel = rel
        node.leaf = len(self.leaves)
        self.leaves.append(Leaf(kind, A, B, tuple(F), mass, mult, node.id))

    def decompose(self, A: Side, B: Side, F: tuple, mult: int) -> TreeNode:
        mu = self.mu
        m0 = mu.mass(A, B)
        node = self._node(kind="Decompose", F=F, mass=m0, multiplicity=mult)
        if len(F) >= self.d:
            self._leaf(node, "error_b", A, B, F, m0, mult, Fraction(1) if m0 else Fraction(0))
            return node
        if m0 == 0:
            # nothing to split; a zero-mass rectangle is kept for partition exactness
            self._leaf(node, "error_a", A, B, F, m0, mult, Fraction(0))
            return node
        while True:
            mR = mu.mass(A, B)
            ratio = mR / m0
            # mu(R) >= delta mu(R0) with delta = 2^(-bd/20)
            if not pow2_ge(ratio, Fraction(-self.b * self.d, 20)):
                self._leaf(node, "error_a", A, B, F, mR, mult, ratio)
                return node
            vx = find_violation(mu, A, B, "x", F)
            vy = None if vx is not None else find_violation(mu, A, B, "y", F)
            if vx is None and vy is None:
                self._leaf(node, "good", A, B, F, mR, mult, ratio)
                return node
            node.theta.append(ratio)
            if vx is not None:
                A1 = A.restrict(vx.S, vx.alpha, True)
                child = self.split("YDecompose", A1, B, F, vx.S, vx.alpha, mult)
                A = A.restrict(vx.S, vx.alpha, False)
            else:
                B1 = B.restrict(vy.S, vy.alpha, True)
                child = self.split("XDecompose", A, B1, F, vy.S, vy.alpha, mult)
                B = B.restrict(vy.S, vy.alpha, False)
            node.children.append(child)
            node.rel.append(child.mass / m0)

    def split(self, kind: str, A: Side, B: Side, F: tuple, S: tuple, alpha: tuple, mult: int) -> TreeNode:
        mw = self.mu.mass(A, B)
        node = self._node(kind=kind, F=F, S=S, alpha=alpha, mass=mw, multiplicity=mult)
        newF = tuple(sorted(set(F) | set(S)))
        enum_side = B if kind == "YDecompose" else A
        for key in _family_keys(enum_side, S):
            fam = enum_side.family(S, key)
            m = 1
            for i, j in zip(S, key):
                m *= enum_side.partition[i][j].size
            if kind == "YDecompose":
                child = self.decompose(A, fam, newF, mult * m)
            else:
                child = self.decompose(fam, B, newF, mult * m)
            node.children.append(child)
            node.rel.append(child.mass / mw if mw else Fraction(0))
        return node


def decompose_rect(mu, d: int, node_cap: int = DEFAULT_NODE_CAP, require_b_multiple_of_20: bool = False) -> DecompositionResult:
    """Run Decompose([q]^n x [q]^n, {}) and return leaves plus the execution tree."""
    mu = as_cell_density(mu)
    if d < 0:
        raise InputError("d must be non-negative")
    if require_b_multiple_of_20 and mu.b % 20:
        raise InputError("b = %d is not a multiple of 20" % mu.b)
    t = check_premise(mu)
    run = _Runner(mu, d, node_cap)
    A, B = mu.full_sides()
    root = run.decompose(A, B, (), 1)
    return DecompositionResult(mu, d, mu.b, mu.n, t, run.leaves, root, run.count)


# ---------------------------------------------------------------- verification


def _point_in_leaf(leaf: Leaf, x, y) -> bool:
    return _in_side(leaf.A, x) and _in_side(leaf.B, y)


def _in_side(side: Side, point) -> bool:
    for box in side.boxes:
        if all(point[i] in side.partition[i][j] for i, j in enumerate(box)):
            return True
    return False


def check_partition(res: DecompositionResult) -> Verdict:
    mu = res.mu
    q, n = mu.q, mu.n
    if q ** (2 * n) <= EXPLICIT_PARTITION_CAP:
        pts = [block_point(i, q, n) for i in range(q ** n)]
        for x in pts:
            for y in pts:
                hits = [k for k, leaf in enumerate(res.leaves) if _point_in_leaf(leaf, x, y)]
                if len(hits) != 1:
                    return Verdict(False, "point %s covered by %d leaves %s" % ((x, y), len(hits), hits), (x, y))
        return Verdict(True)
    # member counts times multiplicities must add up, and leaves must be pairwise disjoint
    total = sum(_leaf_points(l) for l in res.leaves)
    if total != q ** (2 * n):
        return Verdict(False, "leaves cover %d points, expected %d" % (total, q ** (2 * n)))
    for i, li in enumerate(res.leaves):
        for j in range(i + 1, len(res.leaves)):
            lj = res.leaves[j]
            if sides_intersect(li.A, lj.A) and sides_intersect(li.B, lj.B):
                return Verdict(False, "leaves %d and %d overlap" % (i, j), (i, j))
    return Verdict(True)


def _leaf_points(leaf: Leaf) -> int:
    per_member = sum(leaf.A.member_count(b) for b in leaf.A.boxes) * sum(leaf.B.member_count(b) for b in leaf.B.boxes)
    return per_member * leaf.multiplicity


def leaf_fixed_blocks(mu: CellPairDensity, leaf: Leaf, which: str) -> tuple:
    """Blocks with a single value in every member of the leaf's side."""
    side = leaf.A if which == "x" else leaf.B
    out = []
    for i in range(mu.n):
        if i in side.pinned:
            out.append(i)
            continue
        marg = mu.marginal_on(leaf.A, leaf.B, which, (i,))
        keys = [k for k, p in marg.items() if p]
        if len(keys) == 1 and side.partition[i][keys[0][0]].is_point:
            out.append(i)
    return tuple(out)


def check_leaf_cbd(mu: CellPairDensity, leaf: Leaf, d: int) -> Verdict:
    if leaf.mass == 0:
        return Verdict(False, "good leaf has zero mass")
    fx = leaf_fixed_blocks(mu, leaf, "x")
    fy = leaf_fixed_blocks(mu, leaf, "y")
    if fx != fy:
        return Verdict(False, "fixed blocks differ: %s vs %s" % (fx, fy))
    if len(fx) > d:
        return Verdict(False, "%d fixed blocks exceed d = %d" % (len(fx), d))
    for which in ("x", "y"):
        v = find_violation(mu, leaf.A, leaf.B, which, fx)
        if v is not None:
            return Verdict(False, "%s side not blockwise-dense at S=%s" % (which, v.S), v)
    return Verdict(True, "", fx)


@dataclass
class DecompositionReport:
    ok: bool
    items: dict
    info: dict

    def failed(self) -> list:
        return [k for k, v in self.items.items() if not v]


def error_bounds(b: int, d: int, t: Fraction) -> dict:
    """Exponent form of the three error bounds (each bound is stated, not evaluated)."""
    return {
        "error_a": "d * 2^(-%s)" % Fraction(b * d, 20),
        "error_b": "2^(%s) * %d^%d" % (t - Fraction(b * d, 10), math.ceil(Fraction(b * d, 20)) + 2, d),
        "total": "2^(%s) * %d^%d" % (t - Fraction(b * d, 20), d, d),
    }


def _error_b_ok(mass: Fraction, b: int, d: int, t: Fraction, depth: int) -> bool:
    # mass <= q^(-0.1 depth) 2^t (ceil(log 1/delta) + 2)^d with delta = q^(-0.05 d)
    K = math.ceil(Fraction(b * d, 20)) + 2
    return pow2_le(mass / Fraction(K) ** d, t - Fraction(b * depth, 10))


def verify_decomposition(mu, res: DecompositionResult) -> DecompositionReport:
    mu = as_cell_density(mu)
    b, d = mu.b, res.d
    t = check_premise(mu)
    items = {}
    items["partition"] = check_partition(res)
    # masses recomputed from mu, independent of what the run recorded
    mass_ok = Verdict(True)
    for k, leaf in enumerate(res.leaves):
        if mu.mass(leaf.A, leaf.B) != leaf.mass:
            mass_ok = Verdict(False, "leaf %d mass mismatch" % k, k)
            break
    items["masses"] = mass_ok
    cbd = Verdict(True)
    for k, leaf in enumerate(res.good):
        v = check_leaf_cbd(mu, leaf, d)
        if not v:
            cbd = Verdict(False, "good leaf %d: %s" % (k, v.reason), k)
            break
    items["aligned_cbd"] = cbd
    ea = sum((mu.mass(l.A, l.B) * l.multiplicity for l in res.error_a), Fraction(0))
    eb = sum((mu.mass(l.A, l.B) * l.multiplicity for l in res.error_b), Fraction(0))
    total = ea + eb
    if d == 0:
        # delta = 1 and the product bounds degenerate to 0 and 2^t
        a_ok, total_ok = ea == 0, pow2_le(total, t)
    else:
        # mu(Error_a) <= d delta and mu(Error) <= 2^t (d q^-0.05)^d
        a_ok = pow2_le(ea / d, Fraction(-b * d, 20))
        total_ok = pow2_le(total / Fraction(d) ** d, t - Fraction(b * d, 20))
    items["error_a"] = Verdict(a_ok, "mu(Error_a) = %s" % ea)
    items["error_b"] = Verdict(_error_b_ok(eb, b, d, t, d), "mu(Error_b) = %s" % eb)
    items["error_total"] = Verdict(total_ok, "mu(Error) = %s" % total)
    info = {
        "t": t,
        "error_a_mass": ea,
        "error_b_mass": eb,
        "bounds": error_bounds(b, d, t),
        "error_b_with_depth_2d": _error_b_ok(eb, b, d, t, 2 * d),
        "good_rectangles": res.good_count(),
    }
    return DecompositionReport(all(items.values()), items, info)


def walk(node: TreeNode):
    yield node
    for c in node.children:
        yield from walk(c)


def verify_trace(res: DecompositionResult) -> DecompositionReport:
    """Per-node lemmas: mass conservation, theta recurrence, density and node-measure bounds."""
    b, t = res.b, res.t
    items = {"conservation": Verdict(True), "theta": Verdict(True), "density": Verdict(True), "node_measure": Verdict(True)}
    edges = nodes = 0
    for v in walk(res.root):
        if v.kind == "Decompose":
            nodes += 1
            # mu(v) <= 2^t q^(-1.9 |F_v|)
            if items["node_measure"] and not pow2_le(v.mass, t - Fraction(19 * b * len(v.F), 10)):
                items["node_measure"] = Verdict(False, "node %d has mass %s with |F| = %d" % (v.id, v.mass, len(v.F)), v.id)
            if v.mass == 0:
                continue
            if items["conservation"] and sum(v.rel, Fraction(0)) + v.terminal_rel != 1:
                items["conservation"] = Verdict(False, "node %d relative masses do not sum to 1" % v.id, v.id)
            for i, w in enumerate(v.children):
                edges += 1
                tail = sum(v.rel[i:], Fraction(0)) + v.terminal_rel
                if items["theta"] and v.theta[i] != tail:
                    items["theta"] = Verdict(False, "node %d child %d theta %s != tail %s" % (v.id, i, v.theta[i], tail), (v.id, i))
                # mu(w|v) >= q^(-0.8|S_w|) theta(w|v)
                ratio = v.rel[i] / v.theta[i]
                if items["density"] and not pow2_ge(ratio, Fraction(-4 * b * len(w.S), 5)):
                    items["density"] = Verdict(False, "edge %d->%d ratio %s" % (v.id, w.id, ratio), (v.id, w.id))
        else:
            if v.mass and items["conservation"]:
                tot = sum((r * (c.multiplicity // v.multiplicity) for r, c in zip(v.rel, v.children)), Fraction(0))
                if tot != 1:
                    items["conservation"] = Verdict(False, "split node %d children carry %s" % (v.id, tot), v.id)
    return DecompositionReport(all(items.values()), items, {"decompose_nodes": nodes, "edges": edges})


def logsum_property(a: Sequence, eps) -> Verdict:
    """sum_j a_j / sum_{i >= j} a_i <= ceil(log2(1/eps)) + 2 when a_{N-1} + a_N >= eps."""
    a = [Fraction(x) for x in a]
    eps = Fraction(eps)
    if not a or any(x <= 0 for x in a) or sum(a) != 1:
        raise DomainError("a must be positive and sum to 1")
    if eps <= 0 or eps > 1:
        raise DomainError("eps must lie in (0, 1]")
    tail2 = a[-1] + (a[-2] if len(a) > 1 else 0)
    if tail2 < eps:
        raise DomainError("a_(N-1) + a_N = %s is below eps" % tail2)
    total, tail = Fraction(0), Fraction(0)
    for x in reversed(a):
        tail += x
        total += x / tail
    bound = _ceil_log2(1 / eps) + 2
    return Verdict(total <= bound, "sum = %s, bound = %d" % (total, bound), (total, bound))
