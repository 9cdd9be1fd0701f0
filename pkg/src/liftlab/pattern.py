"""The modified inner-product gadget, pattern matrices and Acc densities.

Block values are integers in [q]; bit i of the value is the gadget's
x_{i+1}, so x_1 is the least significant bit.  Matrices are indexed with x
as the row and y as the column, both in the little-endian block order of
`core`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cells import CellPairDensity, Side, gadget_value, plus_count
from .core import (
    BooleanFunction,
    Conjunction,
    Density,
    FourierSpectrum,
    Verdict,
    block_index,
    block_point,
    frac,
    is_eps_decaying,
    members,
    subsets_upto,
    min_entropy_cmp,
)
from .csp import Instance, encode_polynomial, eval_instance, opt_brute
from .decompose import Leaf, check_aligned, is_blockwise_dense, leaf_fixed_blocks
from .errors import DomainError, InputError, ResourceError

DEFAULT_PATTERN_CAP = 14


@dataclass(frozen=True)
class Gadget:
    b: int

    def __post_init__(self):
        if self.b < 1:
            raise InputError("block length must be at least 1")

    @property
    def q(self) -> int:
        return 1 << self.b

    def __call__(self, x: int, y: int) -> int:
        if not (0 <= x < self.q and 0 <= y < self.q):
            raise InputError("block values must lie in [%d]" % self.q)
        return gadget_value(x, y)

    def table(self) -> list[list[int]]:
        return [[gadget_value(x, y) for y in range(self.q)] for x in range(self.q)]

    def G(self, x: Sequence[int], y: Sequence[int]) -> tuple:
        """Blockwise application g^n(x, y) as a point of {-1,1}^n."""
        if len(x) != len(y):
            raise InputError("block vectors differ in length")
        return tuple(self(a, c) for a, c in zip(x, y))

    def G_index(self, x: Sequence[int], y: Sequence[int]) -> int:
        idx = 0
        for i, (a, c) in enumerate(zip(x, y)):
            if gadget_value(a, c) == -1:
                idx |= 1 << i
        return idx

    def mean(self) -> Fraction:
        return Fraction(sum(sum(r) for r in self.table()), self.q * self.q)


def gadget_eval(gad: Gadget, x, y):
    """g on single blocks (ints) or G on block vectors (sequences)."""
    if isinstance(x, int):
        return gad(x, y)
    return gad.G(x, y)


@dataclass(frozen=True)
class PatternMatrix:
    n: int
    b: int
    entries: tuple  # rows indexed by x, columns by y
    source: BooleanFunction

    @property
    def q(self) -> int:
        return 1 << self.b

    @property
    def size(self) -> int:
        return self.q ** self.n

    def __call__(self, x, y) -> Fraction:
        xi = x if isinstance(x, int) else block_index(x, self.q)
        yi = y if isinstance(y, int) else block_index(y, self.q)
        return self.entries[xi][yi]

    def mean(self) -> Fraction:
        return sum((sum(r, Fraction(0)) for r in self.entries), Fraction(0)) / (self.size * self.size)


def build_pattern_matrix(f: BooleanFunction, b: int, cap: int = DEFAULT_PATTERN_CAP) -> PatternMatrix:
    if f.n * b > cap:
        raise ResourceError("n*b = %d exceeds pattern cap %d" % (f.n * b, cap))
    gad = Gadget(b)
    q, n = gad.q, f.n
    pts = [block_point(i, q, n) for i in range(q ** n)]
    rows = tuple(tuple(f.values[gad.G_index(x, y)] for y in pts) for x in pts)
    return PatternMatrix(n, b, rows, f)


def check_pattern_consistency(M: PatternMatrix) -> Verdict:
    """Entries depend on (x, y) only through G(x, y) and equal f there."""
    gad = Gadget(M.b)
    pts = [block_point(i, M.q, M.n) for i in range(M.size)]
    seen = {}
    for xi, x in enumerate(pts):
        for yi, y in enumerate(pts):
            z = gad.G_index(x, y)
            v = M.entries[xi][yi]
            if v != M.source.values[z]:
                return Verdict(False, "entry %s differs from f(G)" % ((x, y),), (x, y))
            if seen.setdefault(z, v) != v:
                return Verdict(False, "entries disagree on fiber %d" % z, z)
    return Verdict(True)


# ---------------------------------------------------------------- Acc


def _check_pair(u: Density, v: Density, b):
    if (u.q, u.n) != (v.q, v.n):
        raise InputError("u and v live on different domains")
    if b is not None and u.q != 1 << b:
        raise InputError("density alphabet %d does not match b = %d" % (u.q, b))


def acc_enumerate(u: Density, v: Density, b: int = None) -> BooleanFunction:
    """Density of G(X, Y) for independent X ~ u, Y ~ v, by visiting all q^(2n) pairs."""
    _check_pair(u, v, b)
    n, q = u.n, u.q
    gad = Gadget(q.bit_length() - 1)
    pts = [block_point(i, q, n) for i in range(q ** n)]
    out = [Fraction(0)] * (1 << n)
    for xi, x in enumerate(pts):
        ux = u.mass[xi]
        if not ux:
            continue
        for yi, y in enumerate(pts):
            vy = v.mass[yi]
            if vy:
                out[gad.G_index(x, y)] += ux * vy
    scale = Fraction(1 << n, u.size * v.size)
    res = BooleanFunction(n, tuple(o * scale for o in out))
    assert res.mean() == 1
    return res


def _as_integers(mass) -> tuple[list, int]:
    den = 1
    for m in mass:
        den = math.lcm(den, m.denominator)
    return [int(m * den) for m in mass], den


def _marginal_ints(w: list, q: int, n: int, S: tuple) -> list:
    out = [0] * (q ** len(S))
    for idx, val in enumerate(w):
        if val:
            key, mul = 0, 1
            for i in S:
                key += ((idx // q ** i) % q) * mul
                mul *= q
            out[key] += val
    return out


def _lsb_sign_mask(b: int, k: int) -> int:
    return sum(1 << (i * b) for i in range(k))


def _gadget_transform(w: list, b: int, k: int) -> list:
    """(g^{(x)k} w)(x) = sum_y prod_i g(x_i, y_i) w(y) on [2^b]^k, in place of a copy."""
    lsb = _lsb_sign_mask(b, k)
    a = [(-v if bin(i & lsb).count("1") & 1 else v) for i, v in enumerate(w)]
    h, size = 1, len(a)
    while h < size:
        for start in range(0, size, 2 * h):
            for i in range(start, start + h):
                x, y = a[i], a[i + h]
                a[i], a[i + h] = x + y, x - y
        h *= 2
    return [(-v if bin(i & lsb).count("1") & 1 else v) for i, v in enumerate(a)]


def acc(u: Density, v: Density, b: int = None) -> BooleanFunction:
    """Density of G(X, Y) for independent X ~ u, Y ~ v.

    Exact: each coefficient E[prod_{i in S} g(X_i, Y_i)] is a sum over the
    S-marginals, and the block gadget matrix is a Hadamard matrix with signed
    rows and columns, so the inner sum is one fast transform.
    """
    _check_pair(u, v, b)
    n, q = u.n, u.q
    bits = q.bit_length() - 1
    wu, du = _as_integers(u.mass)
    wv, dv = _as_integers(v.mass)
    coeffs = {}
    denom = du * dv * u.size * v.size
    for S in subsets_upto(n, n):
        Sl = tuple(members(S))
        mu_ = _marginal_ints(wu, q, n, Sl)
        mv_ = _marginal_ints(wv, q, n, Sl)
        tv = _gadget_transform(mv_, bits, len(Sl))
        coeffs[S] = Fraction(sum(x * y for x, y in zip(mu_, tv) if x), denom)
    res = FourierSpectrum(n, coeffs).to_function()
    assert res.mean() == 1
    return res


def block_bias(u: Density, v: Density) -> Fraction:
    """E[g(X, Y)] for single-block densities."""
    if u.n != 1 or v.n != 1:
        raise InputError("block_bias takes densities on [q]^1")
    q = u.q
    total = Fraction(0)
    for a in range(q):
        if u.mass[a]:
            for c in range(q):
                if v.mass[c]:
                    total += u.mass[a] * v.mass[c] * gadget_value(a, c)
    return total / (q * q)


def acc_fourier_product(us: Sequence[Density], vs: Sequence[Density]) -> BooleanFunction:
    """Acc for product sources via per-block biases: nu^(S) = prod_{i in S} E[g(X_i, Y_i)]."""
    n = len(us)
    biases = [block_bias(u, v) for u, v in zip(us, vs)]
    coeffs = {}
    for m in range(1 << n):
        c = Fraction(1)
        for i in range(n):
            if (m >> i) & 1:
                c *= biases[i]
        coeffs[m] = c
    return FourierSpectrum(n, coeffs).to_function()


def product_density(parts: Sequence[Density]) -> Density:
    q = parts[0].q
    n = len(parts)
    vals = []
    for idx in range(q ** n):
        x = block_point(idx, q, n)
        m = Fraction(1)
        for p, xi in zip(parts, x):
            m *= p.mass[xi]
        vals.append(m)
    return Density(q, n, tuple(vals))


# ---------------------------------------------------------------- extractor and decay checks


def _cg_bound_ok(bias: Fraction, b: int) -> bool:
    # |bias| <= 2^(-0.6(b-1)+5)  <=>  |bias|^5 <= 2^(-3(b-1)+25)
    return abs(bias) ** 5 <= Fraction(2) ** (-3 * (b - 1) + 25)


def extractor_bias_check(b: int, u: Density, v: Density) -> tuple[Fraction, Verdict]:
    if u.q != 1 << b or v.q != 1 << b or u.n != 1 or v.n != 1:
        raise InputError("sources must be densities on [2^b]^1")
    for name, w in (("u", u), ("v", v)):
        # H_inf >= 0.8 b  <=>  max Pr^5 <= 2^(-4b)
        if not min_entropy_cmp(w, (4 * b, 5)):
            raise DomainError("%s has min-entropy below 0.8b" % name)
    bias = block_bias(u, v)
    return bias, Verdict(_cg_bound_ok(bias, b), "bias %s" % bias, bias)


def min_flat_size(b: int) -> int:
    """Least K with log2 K >= 0.8b, i.e. K^5 >= 2^(4b)."""
    k = 1
    while k ** 5 < 1 << (4 * b):
        k += 1
    return k


def exhaustive_flat_check(b: int) -> Verdict:
    """The powered bias bound over every pair of flat sources with min-entropy >= 0.8b (b <= 4).

    For a fixed x-source the extreme y-source of size K takes the K largest
    (or smallest) column sums, and growing K only averages toward the mean,
    so scanning every x-subset with y-sets of the minimum size is exhaustive.
    """
    if b > 4:
        raise ResourceError("exhaustive mode is limited to b <= 4")
    q = 1 << b
    K = min_flat_size(b)
    table = Gadget(b).table()
    worst = Fraction(0)
    count = 0
    for size in range(K, q + 1):
        for xs in itertools.combinations(range(q), size):
            col = sorted(sum(table[x][y] for x in xs) for y in range(q))
            for part in (col[:K], col[-K:]):
                bias = Fraction(sum(part), size * K)
                count += 1
                if abs(bias) > abs(worst):
                    worst = bias
                if not _cg_bound_ok(bias, b):
                    return Verdict(False, "x-source %s gives bias %s" % (xs, bias), xs)
    return Verdict(True, "%d source pairs, worst bias %s" % (count, worst), worst)


def bd_decay_check(u: Density, v: Density, b: int) -> Verdict:
    for name, w in (("u", u), ("v", v)):
        if not is_blockwise_dense(w):
            raise DomainError("%s is not blockwise-dense" % name)
    nu = acc(u, v, b)
    return is_eps_decaying(nu - 1, Fraction(b, 2))


@dataclass(frozen=True)
class JuntaForm:
    junta: Conjunction
    h: BooleanFunction
    verdict: Verdict


def cbd_form_check(u: Density, v: Density, b: int, d: int = None) -> JuntaForm:
    """Write Acc_{u,v} = C (1 + h) with C fixing z_I = g(alpha, beta) and h decaying."""
    d = u.n if d is None else d
    al = check_aligned(u, v, d)
    if not al:
        raise DomainError("sources are not aligned CBD: %s" % al.reason)
    I = al.fixed
    gad = Gadget(b)
    _, xa = u.max_probability()
    _, ya = v.max_probability()
    signs = {i: gad(xa[i], ya[i]) for i in I}
    junta = Conjunction.of(signs)
    nu = acc(u, v, b)
    n = u.n
    pin = 0
    for i, s in signs.items():
        if s == -1:
            pin |= 1 << i
    mask = sum(1 << i for i in I)
    scale = Fraction(1, 1 << len(I))
    h = BooleanFunction(n, tuple(nu.values[(z & ~mask) | pin] * scale - 1 for z in range(1 << n)))
    recon = junta.as_function(n) * (h + 1)
    ok_fact = recon == nu
    dec = is_eps_decaying(h, Fraction(b, 2))
    if not ok_fact:
        verdict = Verdict(False, "Acc is not C (1 + h)")
    else:
        verdict = dec
    return JuntaForm(junta, h, verdict)


# ---------------------------------------------------------------- cell-density Acc


def _box_weights(mu: CellPairDensity, side: Side, which: str, member: bool) -> list:
    weights = mu.x_weights if which == "x" else mu.y_weights
    out = []
    for box in sorted(side.boxes):
        key = tuple(side.base[i][j] for i, j in enumerate(box))
        w = weights.get(key)
        if not w:
            continue
        cnt = 1
        for i, j in enumerate(box):
            if not (member and i in side.pinned):
                cnt *= side.partition[i][j].size
        out.append((w * cnt, side.box_atoms(box)))
    return out


def _block_dists(xa, ya, b, blocks):
    dist = []
    for i in blocks:
        tot = xa[i].size * ya[i].size
        p = Fraction(plus_count(xa[i], ya[i], b), tot)
        dist.append((i, p))
    return dist


def rect_acc_weighted(mu: CellPairDensity, A: Side, B: Side) -> BooleanFunction:
    """z -> 2^n sum over (x, y) in A x B of mu(x, y) 1[G(x, y) = z]; pinned blocks count as their full atom."""
    if not mu.is_product:
        raise DomainError("Acc needs a product density")
    n, b = mu.n, mu.b
    out = [Fraction(0)] * (1 << n)
    xs = _box_weights(mu, A, "x", member=False)
    ys = _box_weights(mu, B, "y", member=False)
    for wx, xa in xs:
        for wy, ya in ys:
            w = wx * wy
            dist = _block_dists(xa, ya, b, range(n))
            for z in range(1 << n):
                p = w
                for i, pi in dist:
                    p *= (1 - pi) if (z >> i) & 1 else pi
                    if not p:
                        break
                out[z] += p
    return BooleanFunction(n, tuple(o * (1 << n) for o in out))


def leaf_junta_terms(mu: CellPairDensity, leaf: Leaf, b: int) -> list[tuple[Fraction, Conjunction, BooleanFunction]]:
    """Split a good leaf family into (lambda, C, h) with sum lambda C (1 + h) = its weighted Acc."""
    if not mu.is_product:
        raise DomainError("Acc needs a product density")
    n = mu.n
    fx = leaf_fixed_blocks(mu, leaf, "x")
    fy = leaf_fixed_blocks(mu, leaf, "y")
    if fx != fy:
        raise DomainError("leaf is not aligned: %s vs %s" % (fx, fy))
    F = fx
    free = [i for i in range(n) if i not in F]
    xs = _box_weights(mu, leaf.A, "x", member=True)
    ys = _box_weights(mu, leaf.B, "y", member=True)
    nu = [Fraction(0)] * (1 << n)
    total = Fraction(0)
    for wx, xa in xs:
        for wy, ya in ys:
            w = wx * wy
            total += w
            dist = _block_dists(xa, ya, b, free)
            for z in range(1 << n):
                if any((z >> i) & 1 for i in F):
                    continue
                p = w
                for i, pi in dist:
                    p *= (1 - pi) if (z >> i) & 1 else pi
                nu[z] += p
    if total == 0:
        raise DomainError("leaf has zero mass")
    # nu restricted to z_F = +1 pattern holds the law of the free blocks; spread over z_F
    free_mask = sum(1 << i for i in free)
    h_vals = tuple(nu[z & free_mask] * (1 << len(free)) / total - 1 for z in range(1 << n))
    h = BooleanFunction(n, h_vals)
    # members split by the sign pattern on fixed blocks
    xa0, ya0 = xs[0][1], ys[0][1]
    per_block = []
    for i in F:
        plus = plus_count(xa0[i], ya0[i], b)
        per_block.append((i, plus, xa0[i].size * ya0[i].size - plus))
    terms = []
    for signs in itertools.product((1, -1), repeat=len(F)):
        cnt = 1
        for (i, plus, minus), s in zip(per_block, signs):
            cnt *= plus if s == 1 else minus
        if cnt:
            terms.append((leaf.mass * cnt, Conjunction(tuple(zip(F, signs))), h))
    return terms


# ---------------------------------------------------------------- planting and slack matrices


def plant_instance(base: Instance, y: Sequence[int], gad: Gadget) -> Instance:
    """Place each constraint of `base` on variables z_{i, y_i}; variable (i, beta) is number i*q + beta + 1."""
    q = gad.q
    if len(y) != base.n:
        raise InputError("y has %d blocks, instance has %d variables" % (len(y), base.n))
    cons = []
    for lits, parity in base.constraints:
        new = []
        for v in lits:
            i = abs(v) - 1
            var = i * q + y[i] + 1
            new.append(var if v > 0 else -var)
        cons.append((tuple(new), parity))
    return Instance(base.n * q, tuple(cons), base.predicate)


def encode_assignment(x: Sequence[int], gad: Gadget) -> tuple:
    """x~_{i, beta} = g(x_i, beta), flattened in variable order."""
    return tuple(gad(xi, beta) for xi in x for beta in range(gad.q))


@dataclass(frozen=True)
class SlackMatrix:
    rows: tuple  # instances
    columns: tuple  # assignments
    entries: tuple
    c: Fraction
    s: Fraction


def slack_matrix(instances: Sequence[Instance], assignments: Sequence, c, s) -> SlackMatrix:
    c, s = frac(c), frac(s)
    if not instances:
        raise InputError("no instances given")
    for k, inst in enumerate(instances):
        opt, _ = opt_brute(inst)
        if opt > s:
            raise InputError("instance %d has opt %s > s = %s" % (k, opt, s))
    entries = tuple(tuple(c - eval_instance(inst, x) for x in assignments) for inst in instances)
    return SlackMatrix(tuple(instances), tuple(tuple(x) for x in assignments), entries, c, s)


def verify_submatrix(S: SlackMatrix, M: PatternMatrix, row_of_y: Sequence[int], col_of_x: Sequence[int]) -> Verdict:
    """M(x, y) = S(row_of_y[y], col_of_x[x]) for every entry."""
    for xi in range(M.size):
        for yi in range(M.size):
            a = M.entries[xi][yi]
            bval = S.entries[row_of_y[yi]][col_of_x[xi]]
            if a != bval:
                return Verdict(False, "entry (x=%d, y=%d): %s vs %s" % (xi, yi, a, bval), (xi, yi))
    return Verdict(True)


def planted_embedding(base: Instance, c, s, b: int):
    """Slack matrix rows {I_y} and columns {x~} with the maps that embed M_{c - I*}."""
    gad = Gadget(b)
    q, n = gad.q, base.n
    ys = [block_point(i, q, n) for i in range(q ** n)]
    rows = [plant_instance(base, y, gad) for y in ys]
    cols = [encode_assignment(x, gad) for x in ys]
    S = slack_matrix(rows, cols, c, s)
    f = frac(c) - encode_polynomial(base)
    M = build_pattern_matrix(f, b)
    ident = list(range(q ** n))
    return S, M, ident, ident
