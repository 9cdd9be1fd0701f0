"""Exact rational linear programming.

Two-phase primal simplex on a dense tableau with Bland's rule.  Arithmetic
runs on gmpy2 rationals for speed; every value crossing the module boundary
is a `fractions.Fraction`.

Certificates are stated against the *row view* of an LP: the constraint
rows in order, followed by one row per finite bound (lower bound rows read
-x_j <= -l_j, upper bound rows read x_j <= u_j, in variable order, lower
before upper).  Inequality rows are normalized to `<=`; the multiplier of
each such row is non-negative.

* Optimal (maximize c.x):  sum_i y_i a_i = c and y.b = c.x.
* Infeasible:              sum_i y_i a_i = 0 and y.b = -1.
* Unbounded:               a feasible x plus a ray r with a_i.r <= 0
                           (= 0 on equality rows) and c.r > 0.

Minimization is certified as maximization of -c.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .core import Verdict, frac
from .errors import InputError, ParseError, ResourceError

LE, EQ, GE = "<=", "=", ">="
RELATIONS = (LE, EQ, GE)
OPTIMAL, INFEASIBLE, UNBOUNDED = "Optimal", "Infeasible", "Unbounded"

DEFAULT_MAX_CELLS = 4_000_000


def _q(x) -> mpq:
    x = frac(x)
    return mpq(x.numerator, x.denominator)


def _f(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise InputError("unknown relation %r" % (self.relation,))
        object.__setattr__(self, "coeffs", tuple(frac(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", frac(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    """maximize/minimize objective . x subject to rows and per-variable bounds.

    `bounds[j]` is (lower, upper) with None for an infinite side.  Variables
    default to x_j >= 0.
    """

    num_vars: int
    constraints: tuple
    objective: tuple
    sense: str = "max"
    bounds: tuple = None

    def __post_init__(self):
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        for i, c in enumerate(cons):
            if len(c.coeffs) != self.num_vars:
                raise InputError("constraint %d has %d coefficients, expected %d" % (i, len(c.coeffs), self.num_vars))
        obj = tuple(frac(c) for c in self.objective)
        if len(obj) != self.num_vars:
            raise InputError("objective has %d coefficients, expected %d" % (len(obj), self.num_vars))
        if self.sense not in ("max", "min"):
            raise InputError("sense must be 'max' or 'min'")
        bnds = self.bounds
        if bnds is None:
            bnds = ((Fraction(0), None),) * self.num_vars
        if len(bnds) != self.num_vars:
            raise InputError("bounds list has wrong length")
        clean = []
        for lo, hi in bnds:
            lo = None if lo is None else frac(lo)
            hi = None if hi is None else frac(hi)
            if lo is not None and hi is not None and lo > hi:
                raise InputError("empty bound interval [%s, %s]" % (lo, hi))
            clean.append((lo, hi))
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "bounds", tuple(clean))

    def row_view(self) -> list[tuple[tuple, str, Fraction]]:
        """Constraint and bound rows as (coeffs, '<=' or '=', rhs)."""
        rows = []
        for c in self.constraints:
            if c.relation == GE:
                rows.append((tuple(-a for a in c.coeffs), LE, -c.rhs))
            else:
                rows.append((c.coeffs, c.relation, c.rhs))
        z = Fraction(0)
        for j, (lo, hi) in enumerate(self.bounds):
            if lo is not None:
                rows.append((tuple(Fraction(-1) if k == j else z for k in range(self.num_vars)), LE, -lo))
            if hi is not None:
                rows.append((tuple(Fraction(1) if k == j else z for k in range(self.num_vars)), LE, hi))
        return rows

    def max_objective(self) -> tuple:
        return self.objective if self.sense == "max" else tuple(-c for c in self.objective)


@dataclass(frozen=True)
class LPResult:
    status: str
    primal: tuple = None
    objective: Fraction = None
    certificate: tuple = None
    ray: tuple = None
    pivots: int = 0

    def __post_init__(self):
        for name in ("primal", "certificate", "ray"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(frac(a) for a in v))
        if self.objective is not None:
            object.__setattr__(self, "objective", frac(self.objective))


# ---------------------------------------------------------------- solver


class _Tableau:
    """Dense tableau A x = b with an explicit basis; column order is fixed."""

    def __init__(self, rows, rhs, ncols):
        self.rows = rows
        self.rhs = rhs
        self.ncols = ncols
        self.basis = []
        self.pivots = 0

    def pivot(self, r: int, c: int):
        row = self.rows[r]
        p = row[c]
        if p != 1:
            inv = 1 / p
            for k in range(self.ncols):
                if row[k]:
                    row[k] *= inv
            self.rhs[r] *= inv
        nz = [k for k in range(self.ncols) if row[k]]
        br = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
                self.rhs[i] -= f * br
        self.basis[r] = c
        self.pivots += 1

    def reduced_costs(self, cost, allowed):
        """c_j - c_B B^-1 A_j for allowed columns."""
        cb = [cost[j] for j in self.basis]
        out = {}
        for j in allowed:
            s = cost[j]
            for i, row in enumerate(self.rows):
                if row[j] and cb[i]:
                    s -= cb[i] * row[j]
            out[j] = s
        return out

    def run(self, cost, allowed, max_pivots):
        """Maximize cost over the current basis with Bland's rule.

        Returns None at optimality or the entering column of an unbounded ray.
        """
        allowed = sorted(allowed)
        while True:
            cb = [cost[j] for j in self.basis]
            entering = None
            for j in allowed:
                s = cost[j]
                for i, row in enumerate(self.rows):
                    v = row[j]
                    if v and cb[i]:
                        s -= cb[i] * v
                if s > 0:
                    entering = j
                    break
            if entering is None:
                return None
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return entering
            self.pivot(best[1], entering)
            if self.pivots > max_pivots:
                raise ResourceError("pivot limit %d exceeded" % max_pivots)


def solve(lp: LinearProgram, max_cells: int = DEFAULT_MAX_CELLS, max_pivots: int = 1_000_000) -> LPResult:
    """Solve exactly; deterministic for identical input."""
    n = lp.num_vars
    # variable substitution: x_j = shift_j + sign_j * x'_col (+ second column for free vars)
    cols = []  # (var, sign)
    shift = [Fraction(0)] * n
    kind = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            shift[j] = lo
            cols.append((j, 1))
            kind.append("lower")
        elif hi is not None:
            shift[j] = hi
            cols.append((j, -1))
            kind.append("upper")
        else:
            cols.append((j, 1))
            cols.append((j, -1))
            kind.append("free")
    # explicit rows: constraints (<= / = form) then upper rows for doubly bounded vars
    rows_view = []
    for c in lp.constraints:
        if c.relation == GE:
            rows_view.append(([-a for a in c.coeffs], LE, -c.rhs, ("con", len(rows_view))))
        else:
            rows_view.append((list(c.coeffs), c.relation, c.rhs, ("con", len(rows_view))))
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and hi is not None:
            rows_view.append(([Fraction(1) if k == j else Fraction(0) for k in range(n)], LE, hi, ("ub", j)))

    m = len(rows_view)
    nx = len(cols)
    n_slack = sum(1 for r in rows_view if r[1] == LE)
    ncols = nx + n_slack + m
    if m * ncols > max_cells:
        raise ResourceError("tableau of %d x %d exceeds cap of %d cells" % (m, ncols, max_cells))

    tab_rows, rhs, negated = [], [], []
    slack_of = {}
    s_idx = nx
    for i, (a, rel, b, _) in enumerate(rows_view):
        row = [mpq(0)] * ncols
        for k, (j, sg) in enumerate(cols):
            if a[j]:
                row[k] = _q(a[j] * sg)
        bb = b - sum((a[j] * shift[j] for j in range(n) if a[j]), Fraction(0))
        if rel == LE:
            row[s_idx] = mpq(1)
            slack_of[i] = s_idx
            s_idx += 1
        neg = bb < 0
        if neg:
            row = [-v for v in row]
            bb = -bb
        row[nx + n_slack + i] = mpq(1)
        tab_rows.append(row)
        rhs.append(_q(bb))
        negated.append(neg)

    art0 = nx + n_slack
    tab = _Tableau(tab_rows, rhs, ncols)
    tab.basis = [art0 + i for i in range(m)]
    cost1 = [mpq(0)] * (art0) + [mpq(-1)] * m
    structural = list(range(art0))
    tab.run(cost1, structural, max_pivots)
    infeas = sum(tab.rhs[i] for i in range(m) if tab.basis[i] >= art0)

    def duals(cost):
        cb = [cost[j] for j in tab.basis]
        y = []
        for i in range(m):
            col = art0 + i
            s = mpq(0)
            for r, row in enumerate(tab.rows):
                if row[col] and cb[r]:
                    s += cb[r] * row[col]
            y.append(-s if negated[i] else s)
        return y

    if infeas > 0:
        y = duals(cost1)
        # phase-1 duals certify y.A' >= 0 and y.b' < 0 in the substituted space
        cert = _map_certificate(lp, rows_view, [_f(v) for v in y], [Fraction(0)] * n)
        scale = -_row_dot_rhs(lp, cert)
        cert = tuple(v / scale for v in cert)
        return LPResult(INFEASIBLE, certificate=cert, pivots=tab.pivots)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= art0:
            for k in range(art0):
                if tab.rows[r][k]:
                    tab.pivot(r, k)
                    break

    cmax = lp.max_objective()
    cost2 = [mpq(0)] * ncols
    for k, (j, sg) in enumerate(cols):
        cost2[k] = _q(cmax[j] * sg)
    ray_col = tab.run(cost2, structural, max_pivots)

    xprime = [mpq(0)] * ncols
    for r, j in enumerate(tab.basis):
        xprime[j] = tab.rhs[r]
    x = list(shift)
    for k, (j, sg) in enumerate(cols):
        if xprime[k]:
            x[j] += sg * _f(xprime[k])
    obj = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))

    if ray_col is not None:
        d = [mpq(0)] * ncols
        d[ray_col] = mpq(1)
        for r, j in enumerate(tab.basis):
            d[j] = -tab.rows[r][ray_col]
        ray = [Fraction(0)] * n
        for k, (j, sg) in enumerate(cols):
            if d[k]:
                ray[j] += sg * _f(d[k])
        return LPResult(UNBOUNDED, primal=x, objective=obj, ray=ray, pivots=tab.pivots)

    y = duals(cost2)
    cert = _map_certificate(lp, rows_view, [_f(v) for v in y], list(cmax))
    return LPResult(OPTIMAL, primal=x, objective=obj, certificate=cert, pivots=tab.pivots)


def _map_certificate(lp, rows_view, y_explicit, target):
    """Extend explicit-row multipliers with bound multipliers so that sum y_i a_i = target."""
    n = lp.num_vars
    resid = list(target)
    ub_mult = {}
    con_mult = []
    for (a, rel, b, tag), yi in zip(rows_view, y_explicit):
        if tag[0] == "con":
            con_mult.append(yi)
        else:
            ub_mult[tag[1]] = yi
        for j in range(n):
            if a[j]:
                resid[j] -= yi * a[j]
    out = list(con_mult)
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            # lower row is -x_j <= -lo
            out.append(-resid[j])
        if hi is not None:
            if lo is not None:
                out.append(ub_mult[j])
            else:
                out.append(resid[j])
    return out


def _row_dot_rhs(lp, cert):
    return sum((y * b for (_, _, b), y in zip(lp.row_view(), cert)), Fraction(0))


# ---------------------------------------------------------------- verification


def verify_certificate(lp: LinearProgram, res: LPResult) -> Verdict:
    """Re-check a result from scratch with exact arithmetic."""
    rows = lp.row_view()
    n = lp.num_vars

    def dot(a, x):
        return sum((ai * xi for ai, xi in zip(a, x) if ai), Fraction(0))

    def primal_ok(x):
        if x is None or len(x) != n:
            return Verdict(False, "primal vector missing or wrong length")
        for i, (a, rel, b) in enumerate(rows):
            v = dot(a, x)
            if (rel == LE and v > b) or (rel == EQ and v != b):
                return Verdict(False, "row %d violated: %s %s %s fails" % (i, v, rel, b), i)
        return Verdict(True)

    def combo(y):
        acc = [Fraction(0)] * n
        for (a, _, _), yi in zip(rows, y):
            if yi:
                for j in range(n):
                    if a[j]:
                        acc[j] += yi * a[j]
        return acc

    def signs_ok(y):
        if y is None or len(y) != len(rows):
            return Verdict(False, "certificate missing or wrong length (expected %d)" % len(rows))
        for i, ((_, rel, _), yi) in enumerate(zip(rows, y)):
            if rel == LE and yi < 0:
                return Verdict(False, "multiplier %d is negative on an inequality row" % i, i)
        return Verdict(True)

    if res.status == OPTIMAL:
        v = primal_ok(res.primal)
        if not v:
            return v
        obj = dot(lp.objective, res.primal)
        if obj != res.objective:
            return Verdict(False, "reported objective %s but primal gives %s" % (res.objective, obj))
        v = signs_ok(res.certificate)
        if not v:
            return v
        cmax = lp.max_objective()
        if combo(res.certificate) != list(cmax):
            return Verdict(False, "dual combination does not reproduce the objective")
        dual_obj = sum((yi * b for (_, _, b), yi in zip(rows, res.certificate)), Fraction(0))
        primal_max = dot(cmax, res.primal)
        if dual_obj != primal_max:
            return Verdict(False, "objective mismatch: dual bound %s vs primal %s" % (dual_obj, primal_max))
        return Verdict(True)
    if res.status == INFEASIBLE:
        v = signs_ok(res.certificate)
        if not v:
            return v
        if any(combo(res.certificate)):
            return Verdict(False, "Farkas combination is not the zero vector")
        total = sum((yi * b for (_, _, b), yi in zip(rows, res.certificate)), Fraction(0))
        if total != -1:
            return Verdict(False, "Farkas combination gives 0 <= %s, not 0 <= -1" % total)
        return Verdict(True)
    if res.status == UNBOUNDED:
        v = primal_ok(res.primal)
        if not v:
            return v
        r = res.ray
        if r is None or len(r) != n:
            return Verdict(False, "ray missing")
        for i, (a, rel, _) in enumerate(rows):
            s = dot(a, r)
            if (rel == LE and s > 0) or (rel == EQ and s != 0):
                return Verdict(False, "ray leaves the feasible region on row %d" % i, i)
        if dot(lp.max_objective(), r) <= 0:
            return Verdict(False, "ray does not improve the objective")
        return Verdict(True)
    return Verdict(False, "unknown status %r" % (res.status,))


# ---------------------------------------------------------------- text / json


def dump_text(lp: LinearProgram) -> str:
    """Plain-text dump: one line per constraint, rationals as p/q."""
    lines = ["lp %d %d %s" % (lp.num_vars, len(lp.constraints), lp.sense)]
    lines.append("obj " + " ".join(str(c) for c in lp.objective))
    for c in lp.constraints:
        lines.append("row " + " ".join(str(a) for a in c.coeffs) + " %s %s" % (c.relation, c.rhs))
    for j, (lo, hi) in enumerate(lp.bounds):
        lines.append("bound %d %s %s" % (j, "-inf" if lo is None else lo, "inf" if hi is None else hi))
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> LinearProgram:
    lines = [ln.strip() for ln in text.splitlines()]
    header = None
    obj, cons, bounds = None, [], {}
    for no, ln in enumerate(lines, 1):
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        try:
            if parts[0] == "lp":
                header = (int(parts[1]), int(parts[2]), parts[3])
            elif parts[0] == "obj":
                obj = [Fraction(p) for p in parts[1:]]
            elif parts[0] == "row":
                cons.append(Constraint([Fraction(p) for p in parts[1:-2]], parts[-2], Fraction(parts[-1])))
            elif parts[0] == "bound":
                lo = None if parts[2] == "-inf" else Fraction(parts[2])
                hi = None if parts[3] == "inf" else Fraction(parts[3])
                bounds[int(parts[1])] = (lo, hi)
            else:
                raise ParseError("unknown record %r" % parts[0], no)
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), no) from None
    if header is None or obj is None:
        raise ParseError("missing 'lp' header or 'obj' line")
    nv, _, sense = header
    bnds = tuple(bounds.get(j, (Fraction(0), None)) for j in range(nv))
    return LinearProgram(nv, tuple(cons), tuple(obj), sense, bnds)


def lp_to_json(lp: LinearProgram) -> dict:
    s = str
    return {
        "num_vars": lp.num_vars,
        "sense": lp.sense,
        "objective": [s(c) for c in lp.objective],
        "constraints": [{"coeffs": [s(a) for a in c.coeffs], "relation": c.relation, "rhs": s(c.rhs)} for c in lp.constraints],
        "bounds": [[None if lo is None else s(lo), None if hi is None else s(hi)] for lo, hi in lp.bounds],
    }


def lp_from_json(obj: dict) -> LinearProgram:
    return LinearProgram(
        obj["num_vars"],
        tuple(Constraint(c["coeffs"], c["relation"], c["rhs"]) for c in obj["constraints"]),
        tuple(obj["objective"]),
        obj.get("sense", "max"),
        tuple((lo, hi) for lo, hi in obj["bounds"]) if obj.get("bounds") is not None else None,
    )


def result_to_json(res: LPResult) -> dict:
    def vec(v):
        return None if v is None else [str(a) for a in v]

    return {
        "status": res.status,
        "primal": vec(res.primal),
        "objective": None if res.objective is None else str(res.objective),
        "certificate": vec(res.certificate),
        "ray": vec(res.ray),
    }


def result_from_json(obj: dict) -> LPResult:
    return LPResult(obj["status"], obj.get("primal"), obj.get("objective"), obj.get("certificate"), obj.get("ray"))


def build(num_vars: int, rows: Sequence, objective: Sequence, sense: str = "max", bounds=None) -> LinearProgram:
    """Convenience constructor from (coeffs, relation, rhs) triples."""
    return LinearProgram(num_vars, tuple(Constraint(*r) for r in rows), tuple(objective), sense, bounds)
