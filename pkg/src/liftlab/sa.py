"""Sherali-Adams pseudoexpectations and non-negative degree.

Both LPs range over conjunctions only.  A width-w conjunction is a
non-negative combination of width-d conjunctions for any d >= w, so the
constraint systems below use the full width min(d, n) and lose nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import ratlp
from .core import (
    BooleanFunction,
    Conjunction,
    ConicalJuntaRep,
    Verdict,
    all_conjunctions,
    chi,
    frac,
    mask_of,
    members,
    popcount,
    subsets_upto,
)
from .csp import Instance, encode_polynomial, opt_brute
from .errors import DomainError, InputError

DEFAULT_MAX_LP_CELLS = ratlp.DEFAULT_MAX_CELLS


@dataclass(frozen=True)
class PseudoExpectation:
    n: int
    d: int
    moments: dict = field(default_factory=dict)  # subset mask -> E~[chi_S]

    def __post_init__(self):
        clean = {}
        for m, v in self.moments.items():
            m = int(m)
            if popcount(m) > self.d:
                raise InputError("moment on subset %s exceeds degree %d" % (members(m), self.d))
            clean[m] = frac(v)
        clean.setdefault(0, Fraction(1))
        object.__setattr__(self, "moments", dict(sorted(clean.items())))

    def __getitem__(self, subset) -> Fraction:
        m = subset if isinstance(subset, int) else mask_of(subset)
        return self.moments.get(m, Fraction(0))

    def apply(self, f: BooleanFunction) -> Fraction:
        """E~[f] for f of degree at most d."""
        total = Fraction(0)
        for m, c in f.spectrum.items():
            if popcount(m) > self.d:
                raise DomainError("function has degree above %d" % self.d)
            total += c * self[m]
        return total


@dataclass(frozen=True)
class SeparatingFunctional:
    n: int
    D: int
    L: BooleanFunction
    eta: Fraction
    f: BooleanFunction


@dataclass(frozen=True)
class DegpResult:
    feasible: bool
    d: int
    junta: ConicalJuntaRep = None
    farkas: BooleanFunction = None  # y as a function on the cube when infeasible
    lp_result: ratlp.LPResult = None


def _local_rows(n: int, d: int):
    """(I, alpha) pairs with |I| = min(d, n), as (support mask, pattern mask)."""
    w = min(d, n)
    for sup in subsets_upto(n, w):
        if popcount(sup) != w:
            continue
        vs = members(sup)
        for bits in range(1 << w):
            pat = mask_of(v for k, v in enumerate(vs) if (bits >> k) & 1)
            yield sup, pat


def _indicator_coeffs(sup: int, pat: int):
    """Fourier expansion of 1[x_I = alpha] up to the factor 2^-|I|: S subset I -> chi_S(alpha)."""
    out = {}
    sub = sup
    while True:
        out[sub] = chi(sub, pat)
        if sub == 0:
            break
        sub = (sub - 1) & sup
    return out


def sa_lp(f: BooleanFunction, d: int) -> tuple[ratlp.LinearProgram, list[int]]:
    """The degree-d SA program maximizing E~[f]; variables are E~[chi_S] for 0 < |S| <= d."""
    n = f.n
    spec = f.spectrum
    if spec.degree() > d:
        raise DomainError("objective has degree %d above d = %d" % (spec.degree(), d))
    var_masks = [m for m in subsets_upto(n, d) if m]
    col = {m: j for j, m in enumerate(var_masks)}
    rows = []
    for sup, pat in _local_rows(n, d):
        coeffs = [Fraction(0)] * len(var_masks)
        for s, sign in _indicator_coeffs(sup, pat).items():
            if s:
                coeffs[col[s]] = Fraction(sign)
        rows.append(ratlp.Constraint(tuple(coeffs), ratlp.GE, Fraction(-1)))
    obj = tuple(spec[m] for m in var_masks)
    bounds = ((None, None),) * len(var_masks)
    return ratlp.LinearProgram(len(var_masks), tuple(rows), obj, "max", bounds), var_masks


def sa_value_of(f: BooleanFunction, d: int, max_cells: int = DEFAULT_MAX_LP_CELLS):
    lp, masks = sa_lp(f, d)
    res = ratlp.solve(lp, max_cells=max_cells)
    if res.status != ratlp.OPTIMAL:
        raise DomainError("SA program ended with status %s" % res.status)
    moments = {0: Fraction(1)}
    moments.update({m: v for m, v in zip(masks, res.primal)})
    value = res.objective + f.spectrum[0]
    return value, PseudoExpectation(f.n, d, moments), res


def sa_value(inst: Instance, d: int, max_cells: int = DEFAULT_MAX_LP_CELLS) -> tuple[Fraction, PseudoExpectation]:
    """SA_d(I) = max E~[P_I] over degree-d pseudoexpectations."""
    if d > inst.n or d < 0:
        raise InputError("degree %d outside 0..n = %d" % (d, inst.n))
    value, pe, _ = sa_value_of(encode_polynomial(inst), d, max_cells)
    return value, pe


def check_pseudoexpectation(pe: PseudoExpectation) -> Verdict:
    """Normalization and non-negativity on every indicator of at most d variables."""
    if pe[0] != 1:
        return Verdict(False, "E~[1] = %s" % pe[0], (0, 0))
    for sup in subsets_upto(pe.n, pe.d):
        if not sup:
            continue
        vs = members(sup)
        coeffs = _indicator_coeffs(sup, 0)
        for bits in range(1 << len(vs)):
            pat = mask_of(v for k, v in enumerate(vs) if (bits >> k) & 1)
            total = sum((chi(s, pat) * pe[s] for s in coeffs), Fraction(0))
            if total < 0:
                alpha = tuple(-1 if (pat >> v) & 1 else 1 for v in vs)
                return Verdict(False, "indicator on %s at %s has value %s" % (vs, alpha, total), (vs, alpha))
    return Verdict(True)


def degp_lp(f: BooleanFunction, d: int) -> tuple[ratlp.LinearProgram, list[Conjunction]]:
    n = f.n
    w = min(d, n)
    conjs = [c for c in all_conjunctions(n, w) if c.width == w]
    rows = []
    for x in range(1 << n):
        coeffs = tuple(Fraction(1 << c.width) if x & c.support == c.pattern else Fraction(0) for c in conjs)
        rows.append(ratlp.Constraint(coeffs, ratlp.EQ, f.values[x]))
    lp = ratlp.LinearProgram(len(conjs), tuple(rows), (Fraction(0),) * len(conjs), "max")
    return lp, conjs


def degp_feasible(f: BooleanFunction, d: int, max_cells: int = DEFAULT_MAX_LP_CELLS) -> DegpResult:
    """Is f a conical d-junta?  Returns the junta or a Farkas functional."""
    if not f.is_nonnegative():
        raise InputError("function takes a negative value")
    if d < 0:
        raise InputError("degree must be non-negative")
    lp, conjs = degp_lp(f, d)
    res = ratlp.solve(lp, max_cells=max_cells)
    if res.status == ratlp.OPTIMAL:
        rep = ConicalJuntaRep(tuple((w, c) for w, c in zip(res.primal, conjs) if w))
        if rep.as_function(f.n) != f:
            raise AssertionError("junta witness does not reconstruct f")
        return DegpResult(True, d, junta=rep, lp_result=res)
    y = res.certificate[: 1 << f.n]
    return DegpResult(False, d, farkas=BooleanFunction(f.n, y), lp_result=res)


def degp_exact(f: BooleanFunction, max_cells: int = DEFAULT_MAX_LP_CELLS) -> int:
    for d in range(0, f.n + 1):
        if degp_feasible(f, d, max_cells).feasible:
            return d
    raise AssertionError("every non-negative function is a conical n-junta")


@dataclass(frozen=True)
class DualityReport:
    ok: bool
    sa_value: Fraction
    sa_le_c: bool
    degp_le_d: bool
    pseudoexpectation: PseudoExpectation
    degp: DegpResult


def duality_check(inst: Instance, d: int, c, max_cells: int = DEFAULT_MAX_LP_CELLS) -> DualityReport:
    """SA_d(I) <= c exactly when c - I is a conical d-junta."""
    c = frac(c)
    opt, _ = opt_brute(inst)
    if c < opt:
        raise InputError("c = %s is below opt = %s, so c - I is negative somewhere" % (c, opt))
    p = encode_polynomial(inst)
    value, pe, _ = sa_value_of(p, d, max_cells)
    dp = degp_feasible(c - p, d, max_cells)
    left = value <= c
    return DualityReport(left == dp.feasible, value, left, dp.feasible, pe, dp)


# ---------------------------------------------------------------- separating functional


def truncate(f: BooleanFunction, D: int) -> BooleanFunction:
    from .core import FourierSpectrum

    spec = f.spectrum
    return FourierSpectrum(f.n, {m: c for m, c in spec.items() if popcount(m) <= D}).to_function()


def separating_functional(f: BooleanFunction, D: int, eta=None, max_cells: int = DEFAULT_MAX_LP_CELLS) -> SeparatingFunctional:
    """A degree-D functional that is non-negative on D-juntas yet pushes E[L f] below -eta."""
    n = f.n
    eta = Fraction(1, max(n, 1)) if eta is None else frac(eta)
    if not f.is_nonnegative():
        raise InputError("function takes a negative value")
    if f.degree() > D:
        raise DomainError("degree side fails: deg f = %d > D = %d" % (f.degree(), D))
    shifted = f + eta
    res = degp_feasible(shifted, D, max_cells)
    if res.feasible:
        raise DomainError("non-negative degree side fails: f + eta is a conical %d-junta" % D)
    # y satisfies sum_x y(x) C(x) >= 0 for width-D conjunctions and sum_x y(x)(f+eta)(x) = -1
    L = truncate(res.farkas, D)
    mean = L.mean()
    if mean < 0:
        raise AssertionError("Farkas functional has negative mass on the constant conjunction")
    if mean == 0:
        # add a constant small enough to keep E[L (f + eta)] negative
        gap = -L.inner(shifted)
        t = gap / (2 * shifted.mean())
        L = L + t
        mean = L.mean()
    L = L * (1 / mean)
    return SeparatingFunctional(n, D, L, eta, f)


@dataclass(frozen=True)
class FunctionalReport:
    ok: bool
    items: dict


def verify_separating_functional(sf: SeparatingFunctional) -> FunctionalReport:
    """Recheck the five defining properties from the function table alone."""
    L, f, D, n = sf.L, sf.f, sf.D, sf.n
    items = {}
    items["degree"] = Verdict(L.degree() <= D, "deg L = %d" % L.degree())
    items["normalized"] = Verdict(L.mean() == 1, "E[L] = %s" % L.mean())
    val = L.inner(f)
    items["separates"] = Verdict(val < -sf.eta, "E[L f] = %s vs -eta = %s" % (val, -sf.eta))
    bad = None
    for c in all_conjunctions(n, min(D, n)):
        v = L.inner(c.as_function(n))
        if v < 0:
            bad = (c, v)
            break
    items["nonnegative_on_juntas"] = Verdict(bad is None, "" if bad is None else "E[L C] = %s for %s" % (bad[1], bad[0].fixed), bad)
    worst = max((abs(c) for m, c in L.spectrum.items() if popcount(m) <= D), default=Fraction(0))
    items["coefficients_bounded"] = Verdict(worst <= 1, "max |L^(S)| = %s" % worst)
    if n >= 2 and D >= 1:
        items["sup_norm"] = Verdict(L.linf() <= Fraction(n) ** D, "|L|_inf = %s vs n^D = %s" % (L.linf(), n ** D))
    else:
        items["sup_norm"] = Verdict(True, "not asserted for n < 2 or D < 1")
    return FunctionalReport(all(items.values()), items)


def conditioning_check(L: BooleanFunction, D: int) -> Verdict:
    """E[L h chi_S] <= E[L h] for conjunctions h on T and |S| + |T| <= D."""
    n = L.n
    for c in all_conjunctions(n, D):
        h = c.as_function(n)
        base = L.inner(h)
        for s in subsets_upto(n, D - c.width):
            v = L.inner(h * BooleanFunction.parity(n, members(s)))
            if v > base:
                return Verdict(False, "E[L h chi_S] = %s > %s" % (v, base), (c, s))
    return Verdict(True)


def decays_below(h: BooleanFunction, eps) -> Verdict:
    """Mean zero and |h^(S)| <= eps^|S| for a rational eps."""
    eps = frac(eps)
    spec = h.spectrum
    if spec[0] != 0:
        return Verdict(False, "mean %s" % spec[0], 0)
    for m, c in spec.items():
        if abs(c) > eps ** popcount(m):
            return Verdict(False, "coefficient %s on %s" % (c, members(m)), m)
    return Verdict(True)


def main_estimate_check(sf: SeparatingFunctional, conj: Conjunction, h: BooleanFunction, d: int) -> Verdict:
    """E[L c (1 + h)] >= -n^(-8d), with c the 0/1 indicator of `conj`."""
    n = sf.n
    if sf.D != 4 * d:
        raise DomainError("functional degree %d is not 4d = %d" % (sf.D, 4 * d))
    if conj.width > d:
        raise DomainError("conjunction width %d exceeds d = %d" % (conj.width, d))
    if not decays_below(h, Fraction(1, n ** 4)):
        raise DomainError("h is not 1/n^4-decaying")
    c = conj.as_function(n) * Fraction(1, 1 << conj.width)
    value = sf.L.inner(c * (1 + h))
    bound = -Fraction(1, n ** (8 * d))
    return Verdict(value >= bound, "E[L c (1+h)] = %s vs %s" % (value, bound), value)
