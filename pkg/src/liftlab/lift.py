"""Non-negative factorizations of pattern matrices and approximate conical juntas.

Factor terms are lambda * u(x) v(y) with u, v mean-one densities, so a
factorization of M lists terms whose sum equals M entrywise.

The gadget is not balanced: the uniform pair puts weight (1 - 2^-b z_i)/2
on z_i.  Witnesses therefore use fiber averages, f(z) = E[M | G = z], which
equal the density form of Acc divided by that uniform weight.  This keeps
every reconstruction an exact identity.

Large alphabets need orbit compression.  With x' = x xor e_1 the gadget is
-(-1)^<x', y'>, so for any invertible A over GF(2) the pair
x' -> A x', y' -> A^-T y' preserves it.  Every block value other than 1
(x' = 0) lies in one orbit, so a fiber term family over a ranging through
[q] minus {1} is carried by the representative a = 1 + 2^(b-1), whose
fibers are dyadic halves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cells import (
    Atom,
    CellDensity,
    CellPairDensity,
    full_atom,
    product_of,
)
from .core import (
    BooleanFunction,
    ConicalJuntaRep,
    Conjunction,
    Verdict,
    frac,
    is_eps_decaying,
    members,
    pow2_le,
)
from .decompose import decompose_rect, verify_decomposition
from .errors import DomainError, InputError, ResourceError
from .pattern import DEFAULT_PATTERN_CAP, Gadget, PatternMatrix, build_pattern_matrix, leaf_junta_terms, rect_acc_weighted
from .sa import degp_feasible


# ---------------------------------------------------------------- factorizations


@dataclass(frozen=True)
class FactorTerm:
    """`multiplicity` copies under gadget automorphisms; `orbit` names the generic blocks."""

    weight: Fraction
    x: CellDensity
    y: CellDensity
    multiplicity: int = 1
    source: tuple = ()  # (conjunction, {block: value}) for fiber terms

    def __post_init__(self):
        object.__setattr__(self, "weight", frac(self.weight))
        if self.weight < 0:
            raise InputError("negative term weight")
        if self.multiplicity < 1:
            raise InputError("multiplicity must be positive")


@dataclass(frozen=True)
class NonnegFactorization:
    b: int
    n: int
    terms: tuple

    @property
    def q(self) -> int:
        return 1 << self.b

    @property
    def rank(self) -> int:
        return sum(t.multiplicity for t in self.terms)

    @property
    def total_weight(self) -> Fraction:
        return sum((t.weight * t.multiplicity for t in self.terms), Fraction(0))

    @property
    def compressed(self) -> bool:
        return any(t.multiplicity > 1 for t in self.terms)

    def expand(self) -> "NonnegFactorization":
        """Every orbit written out term by term (small alphabets only)."""
        if not self.compressed:
            return self
        if self.n * self.b > DEFAULT_PATTERN_CAP:
            raise ResourceError("expansion of %d terms is too large" % self.rank)
        out = []
        for t in self.terms:
            if t.multiplicity == 1:
                out.append(t)
                continue
            conj, rep = t.source
            w = _junta_weight_of(t)
            generic = [i for i, a in rep.items() if a != 1]
            choices = [[a for a in range(self.q) if a != 1] if i in generic else [rep[i]] for i in sorted(rep)]
            for vals in itertools.product(*choices):
                term = fiber_term(self.b, self.n, conj, dict(zip(sorted(rep), vals)), w)
                if term is not None:
                    out.append(term)
        return NonnegFactorization(self.b, self.n, tuple(out))


def _junta_weight_of(t: FactorTerm) -> Fraction:
    conj, rep = t.source
    k = len(rep)
    q = t.x.q
    fib = 1
    for i, a in rep.items():
        fib *= _fiber_size(a, dict(conj.fixed)[i], t.x.b)
    return t.weight * Fraction(q ** (2 * k), (1 << k) * fib)


def _fiber_size(a: int, sign: int, b: int) -> int:
    q = 1 << b
    if a == 1:
        # g(1, y) = -1 for every y
        return q if sign == -1 else 0
    return q // 2


def _fiber_cells(a: int, sign: int, b: int) -> tuple[tuple, list]:
    """Cells of one y block and the indices that make up the fiber {y : g(a, y) = sign}."""
    q = 1 << b
    if a == 1:
        return (full_atom(b),), ([0] if sign == -1 else [])
    top = 1 << (b - 1)
    if a ^ 1 == top:
        # exponent is y_top xor a_1 xor 1 ... evaluated per half
        cells = (Atom(0, b - 1), Atom(top, b - 1))
        return cells, [j for j, c in enumerate(cells) if Gadget(b)(a, c.first()) == sign]
    cells = tuple(Atom.point(y) for y in range(q))
    return cells, [y for y in range(q) if Gadget(b)(a, y) == sign]


def _point_cells(a: int, b: int) -> tuple:
    if b == 0:
        return (Atom.point(0),)
    rest = full_atom(b).without(a)
    return (Atom.point(a), rest)


def fiber_term(b: int, n: int, conj: Conjunction, values: dict, w) -> FactorTerm | None:
    """w * C restricted to x_I = values: lambda * 1[x_I = a] * 1[y_I in fiber] as mean-one densities."""
    w = frac(w)
    signs = dict(conj.fixed)
    q = 1 << b
    x_cells, y_cells, y_support = [], [], []
    fib = 1
    for i in range(n):
        if i in signs:
            x_cells.append(_point_cells(values[i], b))
            cells, sup = _fiber_cells(values[i], signs[i], b)
            if not sup:
                return None
            y_cells.append(cells)
            y_support.append(sup)
            fib *= _fiber_size(values[i], signs[i], b)
        else:
            x_cells.append((full_atom(b),))
            y_cells.append((full_atom(b),))
            y_support.append([0])
    x = CellDensity(b, x_cells, {(0,) * n: 1})
    y = CellDensity.on_cells(b, y_cells, list(itertools.product(*y_support)))
    k = len(signs)
    lam = w * (1 << k) * fib / q ** (2 * k)
    return FactorTerm(lam, x, y, 1, (conj, dict(values)))


def junta_to_factorization(rep: ConicalJuntaRep, b: int, n: int, f: BooleanFunction = None, compress: bool = None) -> NonnegFactorization:
    """Expand each conjunction over the fibers of the gadget.

    1[G(x, y)_I = alpha] = sum over a in [q]^I of 1[x_I = a] 1[y_I in fiber(a, alpha)].
    With `compress` each orbit of values a is one term with a multiplicity.
    """
    if f is not None and rep.as_function(n) != f:
        raise InputError("conical junta does not reconstruct f")
    if compress is None:
        compress = n * b > DEFAULT_PATTERN_CAP
    q = 1 << b
    terms = []
    for w, conj in rep.terms:
        if w == 0:
            continue
        blocks = [i for i, _ in conj.fixed]
        if not compress:
            for vals in itertools.product(range(q), repeat=len(blocks)):
                t = fiber_term(b, n, conj, dict(zip(blocks, vals)), w)
                if t is not None:
                    terms.append(t)
            continue
        if b < 2:
            raise InputError("orbit compression needs b >= 2")
        generic_rep = 1 | (1 << (b - 1))
        for kinds in itertools.product(("one", "generic"), repeat=len(blocks)):
            vals = {i: (1 if kind == "one" else generic_rep) for i, kind in zip(blocks, kinds)}
            t = fiber_term(b, n, conj, vals, w)
            if t is None:
                continue
            mult = (q - 1) ** sum(1 for kind in kinds if kind == "generic")
            terms.append(FactorTerm(t.weight, t.x, t.y, mult, t.source))
    return NonnegFactorization(b, n, tuple(terms))


def verify_factorization(M: PatternMatrix, F: NonnegFactorization) -> Verdict:
    """Exact entrywise check of sum lambda_i u_i(x) v_i(y) against M."""
    if (M.n, M.b) != (F.n, F.b):
        raise InputError("factorization is for n=%d, b=%d; matrix has n=%d, b=%d" % (F.n, F.b, M.n, M.b))
    F = F.expand()
    size = M.size
    total = [[Fraction(0)] * size for _ in range(size)]
    for t in F.terms:
        u = t.x.to_density().mass
        v = t.y.to_density().mass
        for xi in range(size):
            if u[xi]:
                c = t.weight * u[xi]
                row = total[xi]
                for yi in range(size):
                    if v[yi]:
                        row[yi] += c * v[yi]
    for xi in range(size):
        for yi in range(size):
            if total[xi][yi] != M.entries[xi][yi]:
                return Verdict(False, "entry (x=%d, y=%d): factorization gives %s, matrix has %s" % (xi, yi, total[xi][yi], M.entries[xi][yi]), (xi, yi))
    return Verdict(True, "%d terms" % len(F.terms))


def term_count_bound(rep: ConicalJuntaRep, b: int) -> int:
    """sum over conjunctions of q^|I|."""
    return sum((1 << b) ** c.width for w, c in rep.terms if w)


# ---------------------------------------------------------------- witnesses


def uniform_acc(n: int, b: int) -> BooleanFunction:
    """Density of G(X, Y) for uniform X, Y: prod_i (1 - 2^-b z_i)."""
    eps = Fraction(1, 1 << b)
    vals = []
    for z in range(1 << n):
        v = Fraction(1)
        for i in range(n):
            v *= (1 + eps) if (z >> i) & 1 else (1 - eps)
        vals.append(v)
    return BooleanFunction(n, tuple(vals))


def _divide(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    return BooleanFunction(f.n, tuple(a / c for a, c in zip(f.values, g.values)))


def fiber_acc(mu: CellPairDensity) -> BooleanFunction:
    """E[u(X) v(Y) | G(X, Y) = z] for the product density mu."""
    full = rect_acc_weighted(mu, *mu.full_sides())
    return _divide(full, uniform_acc(mu.n, mu.b))


def to_fiber_form(lam: Fraction, C: Conjunction, h: BooleanFunction, b: int) -> tuple[Fraction, BooleanFunction]:
    """Rewrite lam C (1 + h) / rho as lam' C (1 + h') with h' mean zero.

    On the support of C the fixed blocks contribute a constant factor of rho;
    the rest depends only on the free blocks, so h' stays free of z_I.
    """
    n = h.n
    eps = Fraction(1, 1 << b)
    kappa = Fraction(1)
    for _, s in C.fixed:
        kappa *= 1 - eps * s
    free = [i for i in range(n) if not (C.support >> i) & 1]
    vals = []
    for z in range(1 << n):
        r = Fraction(1)
        for i in free:
            r *= (1 + eps) if (z >> i) & 1 else (1 - eps)
        vals.append((1 + h.values[z]) / r)
    ratio = BooleanFunction(n, tuple(vals))
    m = ratio.mean()
    return lam * m / kappa, ratio * (1 / m) - 1


@dataclass(frozen=True)
class ApproxConicalJuntaWitness:
    n: int
    terms: tuple  # (lambda, Conjunction, h)
    gamma: BooleanFunction
    e: Fraction  # h_i must be 2^-e decaying
    delta: Fraction
    d: int
    info: dict = field(default_factory=dict, compare=False)

    def reconstruct(self) -> BooleanFunction:
        total = self.gamma
        for lam, C, h in self.terms:
            total = total + C.as_function(self.n) * (h + 1) * lam
        return total


@dataclass(frozen=True)
class WitnessReport:
    ok: bool
    items: dict
    info: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def failing(self) -> list:
        return [k for k, v in self.items.items() if not v]


def verify_witness(f: BooleanFunction, W: ApproxConicalJuntaWitness) -> WitnessReport:
    items = {}
    rec = W.reconstruct()
    if rec == f:
        items["reconstruction"] = Verdict(True)
    else:
        bad = next(z for z in range(1 << f.n) if rec.values[z] != f.values[z])
        items["reconstruction"] = Verdict(False, "differs at point %d: %s vs %s" % (bad, rec.values[bad], f.values[bad]), bad)
    wide = [i for i, (_, C, _) in enumerate(W.terms) if C.width > W.d]
    items["width"] = Verdict(not wide, "terms %s exceed width %d" % (wide, W.d) if wide else "", wide or None)
    items["decay"] = Verdict(True)
    for i, (_, _, h) in enumerate(W.terms):
        v = is_eps_decaying(h, W.e)
        if not v:
            items["decay"] = Verdict(False, "term %d, subset %s: %s" % (i, members(v.witness), v.reason), (i, v.witness))
            break
    items["gamma_nonnegative"] = Verdict(W.gamma.is_nonnegative(), "", W.gamma.min())
    eg = W.gamma.mean()
    items["gamma_mean"] = Verdict(eg <= W.delta, "E[gamma] = %s, delta = %s" % (eg, W.delta), eg)
    lam = sum((t[0] for t in W.terms), Fraction(0))
    items["weight_sum"] = Verdict(lam <= 1, "sum lambda = %s" % lam, lam)
    items["weights_nonnegative"] = Verdict(all(t[0] >= 0 for t in W.terms))
    return WitnessReport(all(items.values()), items, {"E_gamma": eg, "sum_lambda": lam, "terms": len(W.terms)})


def _ceil_log2(r: int) -> int:
    return max(0, (r - 1).bit_length())


def _merge_terms(terms: list) -> list:
    merged = {}
    order = []
    for lam, C, h in terms:
        key = (C, h.values)
        if key not in merged:
            merged[key] = [Fraction(0), C, h]
            order.append(key)
        merged[key][0] += lam
    return [tuple(merged[k]) for k in order if merged[k][0]]


def factorization_to_witness(
    F: NonnegFactorization,
    d: int,
    require_b_multiple_of_20: bool = True,
    node_cap: int = 200_000,
    verify_decompositions: bool = True,
) -> ApproxConicalJuntaWitness:
    """Large terms are decomposed into aligned CBD rectangles; small terms and error mass go to gamma.

    The decomposition runs with threshold d + 1 because it stops at |F| >= d,
    which leaves good rectangles with at most d fixed blocks.
    """
    if require_b_multiple_of_20 and F.b % 20:
        raise InputError("b = %d is not a multiple of 20" % F.b)
    if d < 0:
        raise InputError("d must be non-negative")
    n, b = F.n, F.b
    R = F.rank
    t = 4 * _ceil_log2(R)
    rho = uniform_acc(n, b)
    junta_terms = []
    gamma = BooleanFunction.constant(n, 0)
    reports = []
    for k, term in enumerate(F.terms):
        scale = term.weight * term.multiplicity
        mu = product_of(term.x, term.y)
        # H(u) + H(v) >= 2 (n - t) b  <=>  maxp_u maxp_v <= 2^(-2 (n - t) b)
        large = pow2_le(term.x.max_probability() * term.y.max_probability(), -2 * (n - t) * b)
        entry = {"term": k, "weight": term.weight, "multiplicity": term.multiplicity, "large": large}
        if not large:
            part = _divide(rect_acc_weighted(mu, *mu.full_sides()), rho) * scale
            gamma = gamma + part
            entry["gamma"] = part.mean()
            entry["small_weight_ok"] = pow2_le(term.weight * term.weight, -t)
            reports.append(entry)
            continue
        res = decompose_rect(mu, d + 1, node_cap=node_cap)
        routed = BooleanFunction.constant(n, 0)
        for leaf in res.leaves:
            if leaf.kind == "good":
                for lam, C, h in leaf_junta_terms(mu, leaf, b):
                    lam2, h2 = to_fiber_form(lam, C, h, b)
                    junta_terms.append((lam2 * scale, C, h2))
            elif leaf.mass:
                routed = routed + _divide(rect_acc_weighted(mu, leaf.A, leaf.B), rho) * scale
        gamma = gamma + routed
        entry.update(
            {
                "premise_t": res.t,
                "leaves": len(res.leaves),
                "good": res.good_count(),
                "error_a": res.error_mass("error_a"),
                "error_b": res.error_mass("error_b"),
                "gamma": routed.mean(),
            }
        )
        if verify_decompositions:
            rep = verify_decomposition(mu, res)
            entry["decomposition_ok"] = rep.ok
            entry["decomposition_items"] = {k2: bool(v) for k2, v in rep.items.items()}
        reports.append(entry)
    terms = _merge_terms(junta_terms)
    info = {"t": t, "rank": R, "terms": reports}
    return ApproxConicalJuntaWitness(n, tuple(terms), gamma, Fraction(b, 2), gamma.mean(), d, info)


# ---------------------------------------------------------------- robustness and reports


def _eps_le_inverse_power(e: Fraction, n: int, power: int) -> bool:
    # 2^-e <= n^-power  <=>  n^power <= 2^e, raised to the denominator of e
    e = frac(e)
    return (n ** power) ** e.denominator <= 2 ** e.numerator if e >= 0 else n ** power <= 0


@dataclass(frozen=True)
class RobustnessReport:
    ok: bool
    degree: int
    junta: ConicalJuntaRep
    witness_report: WitnessReport


def robustness_check(f: BooleanFunction, W: ApproxConicalJuntaWitness, d: int = None) -> RobustnessReport:
    """In the regime eps <= 1/n^4, delta < 1/n^(8d): f + 1/n is a conical 8d-junta."""
    n = f.n
    d = W.d if d is None else d
    rep = verify_witness(f, W)
    if not rep:
        raise DomainError("witness fails verification: %s" % ", ".join(rep.failing()))
    if W.d > d:
        raise DomainError("witness width %d exceeds d = %d" % (W.d, d))
    if f.degree() > d:
        raise DomainError("deg f = %d exceeds d = %d" % (f.degree(), d))
    if f.mean() > 1:
        raise DomainError("E[f] = %s exceeds 1" % f.mean())
    if not _eps_le_inverse_power(W.e, n, 4):
        raise DomainError("eps = 2^-%s exceeds 1/n^4 for n = %d" % (W.e, n))
    if not W.delta * n ** (8 * d) < 1:
        raise DomainError("delta = %s is not below 1/n^%d" % (W.delta, 8 * d))
    shifted = f + Fraction(1, n)
    res = degp_feasible(shifted, 8 * d)
    return RobustnessReport(res.feasible, 8 * d, res.junta, rep)


@dataclass(frozen=True)
class NnrRow:
    d: int
    feasible: bool
    terms: int = None
    bound: int = None
    verified: bool = None


def nnr_report(f: BooleanFunction, b: int, d_range: Sequence[int]) -> list[NnrRow]:
    """Constructive upper bounds on nnr(M_f) from conical juntas of each degree."""
    rows = []
    M = build_pattern_matrix(f, b) if f.n * b <= DEFAULT_PATTERN_CAP else None
    for d in d_range:
        res = degp_feasible(f, d)
        if not res.feasible:
            rows.append(NnrRow(d, False))
            continue
        F = junta_to_factorization(res.junta, b, f.n, f)
        verified = bool(verify_factorization(M, F)) if M is not None else None
        rows.append(NnrRow(d, True, F.rank, term_count_bound(res.junta, b), verified))
    return rows
