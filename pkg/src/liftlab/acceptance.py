"""The twelve acceptance criteria as runnable checks.

Each criterion returns a `CriterionResult`; `run_all` prints one PASS/FAIL
line per criterion.  Expected values come from independent oracles (brute
force, explicit pseudoexpectations, vertex enumeration), never from the
routine under test.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import ratlp
from .cells import random_cell_density
from .core import BooleanFunction, Density, block_point, popcount
from .csp import encode_polynomial, maxcut_graph, odd_cycle_xor, opt_brute, random_kxor, random_ksat
from .decompose import decompose_rect, logsum_property, verify_decomposition, verify_trace
from .core import is_eps_decaying
from .lift import factorization_to_witness, junta_to_factorization, robustness_check, term_count_bound, verify_factorization, verify_witness
from .pattern import (
    Gadget,
    build_pattern_matrix,
    check_pattern_consistency,
    extractor_bias_check,
    leaf_junta_terms,
    planted_embedding,
    rect_acc_weighted,
)
from .sa import PseudoExpectation, check_pseudoexpectation, degp_exact, degp_feasible, duality_check, sa_value, separating_functional, verify_separating_functional

# tolerances: every comparison below is exact (zero tolerance) unless a time limit is named
DUALITY_INSTANCES = 50
DUALITY_TIME_LIMIT = 600.0
DECOMP_RUNS = 24
DECOMP_TIME_LIMIT = 300.0
LP_RANDOM_COUNT = 30
LOGSUM_COUNT = 1000


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return "criterion %2d %-28s %s  (%s; %.1fs)" % (self.number, self.name, "PASS" if self.ok else "FAIL", self.detail, self.seconds)


def _timed(number, name, fn, *args, **kw) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        ok, detail, data = fn(*args, **kw)
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        ok, detail, data = False, "%s: %s" % (type(exc).__name__, exc), {}
    return CriterionResult(number, name, ok, detail, time.perf_counter() - t0, data)


# ---------------------------------------------------------------- 1: SA / deg+ duality


def random_duality_instances(count: int, seed: int):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.choice((2, 2, 3))
        n = rng.randint(max(3, k), 6 if k == 2 else 5 + (rng.random() < 0.3))
        m = rng.randint(2, 6)
        kind = rng.choice(("xor", "sat", "cut")) if k == 2 else rng.choice(("xor", "sat"))
        s = rng.randrange(1 << 30)
        if kind == "xor":
            inst = random_kxor(n, m, k, s)
        elif kind == "sat":
            inst = random_ksat(n, m, k, s)
        else:
            edges = [tuple(rng.sample(range(1, n + 1), 2)) for _ in range(m)]
            inst = maxcut_graph(n, edges)
        d = rng.randint(k, 3)
        out.append((inst, d))
    return out


def criterion_1(count: int = DUALITY_INSTANCES, seed: int = 1, time_limit: float = DUALITY_TIME_LIMIT):
    t0 = time.perf_counter()
    checks = 0
    for inst, d in random_duality_instances(count, seed):
        opt, _ = opt_brute(inst)
        sav, _ = sa_value(inst, d)
        if sav < opt:
            return False, "SA value %s below brute-force opt %s" % (sav, opt), {}
        mid = (opt + sav) / 2 if sav > opt else sav + Fraction(1, 7)
        for c in (opt, sav, mid):
            rep = duality_check(inst, d, c)
            checks += 1
            if not rep.ok:
                return False, "biconditional fails at c=%s d=%d for %s" % (c, d, inst.constraints), {}
    elapsed = time.perf_counter() - t0
    return elapsed <= time_limit, "%d instances, %d thresholds, %.0fs of %.0fs" % (count, checks, elapsed, time_limit), {"checks": checks}


# ---------------------------------------------------------------- 2, 3: exact small values


def triangle():
    return maxcut_graph(3, [(1, 2), (2, 3), (1, 3)])


def anti_correlated_pe(n: int, d: int, pairs) -> PseudoExpectation:
    """E~[x_i] = 0 and E~[x_i x_j] = -1 on the listed pairs, zero elsewhere."""
    moments = {}
    for i, j in pairs:
        moments[(1 << (i - 1)) | (1 << (j - 1))] = Fraction(-1)
    return PseudoExpectation(n, d, moments)


def criterion_2():
    inst = triangle()
    opt, _ = opt_brute(inst)
    sa2, _ = sa_value(inst, 2)
    sa3, _ = sa_value(inst, 3)
    # oracle for SA_2: an explicit degree-2 pseudoexpectation of value 1
    pe = anti_correlated_pe(3, 2, [(1, 2), (2, 3), (1, 3)])
    pe_ok = bool(check_pseudoexpectation(pe)) and pe.apply(encode_polynomial(inst)) == 1
    ok = opt == Fraction(2, 3) and sa2 == 1 and sa3 == Fraction(2, 3) and pe_ok and sa3 == opt
    return ok, "opt=%s SA2=%s SA3=%s explicit-pE=%s" % (opt, sa2, sa3, pe_ok), {}


def criterion_3():
    inst = odd_cycle_xor(3)
    opt, _ = opt_brute(inst)
    sa2, _ = sa_value(inst, 2)
    f = Fraction(23, 24) - encode_polynomial(inst)
    dp = degp_exact(f)
    pe = anti_correlated_pe(3, 2, [(1, 2), (2, 3), (1, 3)])
    pe_ok = bool(check_pseudoexpectation(pe)) and pe.apply(encode_polynomial(inst)) == 1
    ok = opt == Fraction(2, 3) and sa2 == 1 and dp == 3 and pe_ok
    return ok, "opt=%s SA2=%s deg+(23/24 - I)=%d" % (opt, sa2, dp), {}


# ---------------------------------------------------------------- 4: separating functional


def criterion_4():
    f = Fraction(11, 12) - encode_polynomial(odd_cycle_xor(3))
    eta = Fraction(1, 24)
    sf = separating_functional(f, 2, eta)
    rep = verify_separating_functional(sf)
    # independent recomputation of E[L f] straight from the tables
    direct = sum((a * b for a, b in zip(sf.L.values, f.values)), Fraction(0)) / len(f.values)
    ok = rep.ok and direct < -eta
    return ok, "items %s; E[L f]=%s" % (",".join(k for k, v in rep.items.items() if v), direct), {}


# ---------------------------------------------------------------- 5: pattern identity


def criterion_5(seed: int = 5):
    rng = random.Random(seed)
    tested = 0
    for n in (1, 2):
        for b in (1, 2):
            for _ in range(4):
                f = BooleanFunction(n, tuple(Fraction(rng.randint(0, 6), rng.randint(1, 3)) for _ in range(1 << n)))
                M = build_pattern_matrix(f, b)
                gad = Gadget(b)
                q = gad.q
                for xi in range(M.size):
                    for yi in range(M.size):
                        x, y = block_point(xi, q, n), block_point(yi, q, n)
                        # direct product formula for the gadget, bit by bit
                        z = 0
                        for i in range(n):
                            e = (x[i] & 1) ^ (y[i] & 1) ^ (bin(x[i] & y[i]).count("1") & 1)
                            z |= e << i
                        if M.entries[xi][yi] != f.values[z]:
                            return False, "entry mismatch at n=%d b=%d" % (n, b), {}
                if not check_pattern_consistency(M):
                    return False, "fiber consistency fails", {}
                tested += 1
    S, M, rows, cols = planted_embedding(maxcut_graph(2, [(1, 2)]), 1, 1, 1)
    pairs = 0
    gad = Gadget(1)
    for xi in range(4):
        for yi in range(4):
            x, y = block_point(xi, 2, 2), block_point(yi, 2, 2)
            lhs = S.entries[rows[yi]][cols[xi]]
            rhs = M.entries[xi][yi]
            if lhs != rhs:
                return False, "planting identity fails at %s" % ((x, y),), {}
            pairs += 1
    return True, "%d matrices, planting %d pairs" % (tested, pairs), {}


# ---------------------------------------------------------------- 6: gadget bias


def criterion_6(seed: int = 6, samples: int = 20):
    for b in range(1, 9):
        q = 1 << b
        total = sum(Gadget(b)(x, y) for x in range(q) for y in range(q))
        if Fraction(total, q * q) != -Fraction(1, q):
            return False, "E[g] = %s at b=%d" % (Fraction(total, q * q), b), {}
    rng = random.Random(seed)
    b = 8
    size = 1 << math.ceil(Fraction(4 * b, 5))
    worst = Fraction(0)
    for k in range(samples):
        u = Density.uniform_on(1 << b, 1, rng.sample(range(1 << b), size))
        v = Density.uniform(1 << b, 1) if k % 2 == 0 else Density.uniform_on(1 << b, 1, rng.sample(range(1 << b), size))
        bias, verdict = extractor_bias_check(b, u, v)
        worst = max(worst, abs(bias))
        if not verdict:
            return False, "bound fails: bias %s" % bias, {}
    return True, "E[g] = -2^-b for b=1..8; %d sampled source pairs, worst |bias| %.4f" % (samples, float(worst)), {}


# ---------------------------------------------------------------- 7, 8, 9: decomposition


def decomposition_runs(count: int = DECOMP_RUNS, seed: int = 7):
    rng = random.Random(seed)
    for k in range(count):
        n = (2, 3)[k % 2]
        d = (1, 2)[(k // 2) % 2]
        planted = (k // 4) % 3
        mu = random_cell_density(rng, 20, n, 3, planted)
        t0 = time.perf_counter()
        res = decompose_rect(mu, d, require_b_multiple_of_20=True)
        yield mu, res, time.perf_counter() - t0


_RUN_CACHE = {}


def _cached_runs(count, seed):
    key = (count, seed)
    if key not in _RUN_CACHE:
        _RUN_CACHE[key] = list(decomposition_runs(count, seed))
    return _RUN_CACHE[key]


def criterion_7(count: int = DECOMP_RUNS, seed: int = 7, time_limit: float = DECOMP_TIME_LIMIT):
    worst = 0.0
    nontrivial = 0
    for mu, res, secs in _cached_runs(count, seed):
        worst = max(worst, secs)
        rep = verify_decomposition(mu, res)
        if not rep.ok:
            return False, "run failed items %s" % [k for k, v in rep.items.items() if not v], {}
        if secs > time_limit:
            return False, "run took %.0fs" % secs, {}
        nontrivial += len(res.leaves) > 1
    return True, "%d runs (%d split into several leaves), slowest %.2fs" % (count, nontrivial, worst), {}


def criterion_8(count: int = DECOMP_RUNS, seed: int = 7):
    nodes = 0
    for mu, res, _ in _cached_runs(count, seed):
        rep = verify_trace(res)
        if not rep.ok:
            return False, "trace items failed: %s" % [k for k, v in rep.items.items() if not v], {}
        nodes += res.node_count
    return True, "%d trees, %d nodes" % (count, nodes), {}


def criterion_9(count: int = DECOMP_RUNS, seed: int = 7):
    checked = 0
    for mu, res, _ in _cached_runs(count, seed):
        for leaf in res.leaves:
            if leaf.kind != "good":
                continue
            terms = leaf_junta_terms(mu, leaf, mu.b)
            total = BooleanFunction.constant(mu.n, 0)
            for lam, C, h in terms:
                v = is_eps_decaying(h, Fraction(mu.b, 2))
                if not v:
                    return False, "h fails decay: %s" % v.reason, {}
                total = total + C.as_function(mu.n) * (h + 1) * lam
            if total != rect_acc_weighted(mu, leaf.A, leaf.B):
                return False, "junta form does not reproduce the leaf's Acc", {}
            checked += leaf.multiplicity
    return True, "%d good rectangles (counting family members)" % checked, {}


# ---------------------------------------------------------------- 10: lift round trip


def criterion_10(seed: int = 10):
    rng = random.Random(seed)
    funcs = [BooleanFunction.constant(1, 1), BooleanFunction(1, (0, 2)), BooleanFunction.from_callable(2, lambda z: 1 - z[0] * z[1])]
    for n in (1, 2, 3):
        for _ in range(3):
            funcs.append(BooleanFunction(n, tuple(Fraction(rng.randint(0, 3)) for _ in range(1 << n))))
    rounds = 0
    for f in funcs:
        if not any(f.values):
            continue
        d = degp_exact(f)
        rep = degp_feasible(f, d).junta
        for b in (1, 2):
            F = junta_to_factorization(rep, b, f.n, f)
            v = verify_factorization(build_pattern_matrix(f, b), F)
            bound = term_count_bound(rep, b)
            cap = math.comb(f.n, d) * 2 ** ((b + 1) * d)
            if not v or F.rank > bound or bound > cap:
                return False, "round trip fails for %s at b=%d: %s, %d terms, bound %d, cap %d" % (f.values, b, v.reason, F.rank, bound, cap), {}
            rounds += 1
    f = BooleanFunction(1, (0, 2))
    F = junta_to_factorization(degp_feasible(f, 1).junta, 20, 1, f)
    W = factorization_to_witness(F, 1)
    wrep = verify_witness(f, W)
    rob = robustness_check(f, W)
    ok = wrep.ok and rob.ok and rob.degree <= 8
    return ok, "%d round trips; b=20 witness E[gamma]=%s, deg+(f+1/n)<=%d" % (rounds, W.delta, rob.degree), {}


# ---------------------------------------------------------------- 11: LP oracle


def _solve_square(rows, rhs):
    """Exact Gaussian elimination; None when singular."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                fct = a[r][col] / a[col][col]
                a[r] = [x - fct * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def vertex_enumeration(lp: ratlp.LinearProgram):
    """Best objective over all basic feasible points of a bounded LP, or None if infeasible."""
    rows = lp.row_view()
    n = lp.num_vars
    eq = [i for i, r in enumerate(rows) if r[1] == ratlp.EQ]
    ineq = [i for i, r in enumerate(rows) if r[1] != ratlp.EQ]
    best = None
    cmax = lp.max_objective()
    for extra in itertools.combinations(ineq, max(0, n - len(eq))):
        tight = eq + list(extra)
        if len(tight) != n:
            continue
        x = _solve_square([rows[i][0] for i in tight], [rows[i][2] for i in tight])
        if x is None:
            continue
        feasible = True
        for a, rel, b in rows:
            v = sum((ai * xi for ai, xi in zip(a, x)), Fraction(0))
            if (rel == ratlp.EQ and v != b) or (rel == ratlp.LE and v > b):
                feasible = False
                break
        if feasible:
            val = sum((c * xi for c, xi in zip(cmax, x)), Fraction(0))
            best = val if best is None else max(best, val)
    return best


def random_bounded_lp(rng) -> ratlp.LinearProgram:
    n = rng.randint(1, 5)
    m = rng.randint(1, 8)
    cons = []
    for _ in range(m):
        coeffs = [rng.randint(-3, 3) for _ in range(n)]
        if not any(coeffs):
            coeffs[rng.randrange(n)] = 1
        rel = rng.choice((ratlp.LE, ratlp.LE, ratlp.LE, ratlp.GE, ratlp.EQ)) if m > 1 else ratlp.LE
        cons.append((coeffs, rel, rng.randint(-2, 10) if rel != ratlp.GE else rng.randint(-10, 2)))
    bounds = [(rng.choice((0, -rng.randint(1, 4))), rng.randint(1, 6)) for _ in range(n)]
    return ratlp.build(n, cons, [rng.randint(-4, 4) for _ in range(n)], rng.choice(("max", "min")), bounds)


def _tamperings(res: ratlp.LPResult):
    for i in range(len(res.certificate)):
        for delta in (1, Fraction(-1, 3)):
            cert = list(res.certificate)
            cert[i] += delta
            yield ratlp.LPResult(res.status, res.primal, res.objective, tuple(cert), res.ray, res.pivots)
    if res.objective is not None:
        yield ratlp.LPResult(res.status, res.primal, res.objective + 1, res.certificate, res.ray, res.pivots)


def criterion_11(count: int = LP_RANDOM_COUNT, seed: int = 11):
    rng = random.Random(seed)
    stats = {"optimal": 0, "infeasible": 0, "tamperings": 0}
    for k in range(count):
        lp = random_bounded_lp(rng)
        res = ratlp.solve(lp)
        best = vertex_enumeration(lp)
        if best is None:
            if res.status != ratlp.INFEASIBLE:
                return False, "LP %d: oracle infeasible, solver %s" % (k, res.status), {}
        else:
            mine = res.objective if lp.sense == "max" else (-res.objective if res.objective is not None else None)
            if res.status != ratlp.OPTIMAL or mine != best:
                return False, "LP %d: oracle %s, solver %s %s" % (k, best, res.status, res.objective), {}
        stats[res.status] = stats.get(res.status, 0) + 1
        if not ratlp.verify_certificate(lp, res):
            return False, "LP %d: certificate rejected" % k, {}
        for bad in _tamperings(res):
            stats["tamperings"] += 1
            if ratlp.verify_certificate(lp, bad):
                return False, "LP %d: tampered certificate accepted" % k, {}
    return True, "%d LPs (%d optimal, %d infeasible), %d tamperings rejected" % (count, stats.get(ratlp.OPTIMAL, 0), stats.get(ratlp.INFEASIBLE, 0), stats["tamperings"]), stats


# ---------------------------------------------------------------- 12: log-sum lemma


def random_simplex(rng, N: int) -> list:
    w = [rng.randint(1, 1000) for _ in range(N)]
    s = sum(w)
    return [Fraction(x, s) for x in w]


def geometric_family(N: int) -> tuple[list, Fraction]:
    """(1/2, 1/4, ..., 1/2^N, 1/2^N) with eps = 2^-N."""
    a = [Fraction(1, 2 ** j) for j in range(1, N + 1)] + [Fraction(1, 2 ** N)]
    return a, Fraction(1, 2 ** N)


def slow_tail_family(N: int, eps: Fraction) -> list:
    """Constant ratio a_j / tail_j = r for N - 2 steps, then two equal entries summing to the final tail >= eps."""
    steps = N - 2
    # largest r on a 2^-20 grid with (1 - r)^steps >= eps
    grid = 1 << 20
    lo, hi = 0, grid
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if (1 - Fraction(mid, grid)) ** steps >= eps:
            lo = mid
        else:
            hi = mid - 1
    r = Fraction(lo, grid)
    a, tail = [], Fraction(1)
    for _ in range(steps):
        a.append(tail * r)
        tail -= tail * r
    return a + [tail / 2, tail / 2]


def criterion_12(count: int = LOGSUM_COUNT, seed: int = 12):
    rng = random.Random(seed)
    worst = Fraction(0)
    for _ in range(count):
        N = rng.randint(2, 20)
        a = random_simplex(rng, N)
        eps = a[-1] + a[-2]
        v = logsum_property(a, eps)
        if not v:
            return False, "random vector fails: %s" % v.reason, {}
        total, bound = v.witness
        worst = max(worst, total / bound)
    for N in range(1, 20):
        a, eps = geometric_family(N)
        v = logsum_property(a, eps)
        if not v:
            return False, "geometric N=%d fails: %s" % (N, v.reason), {}
        total, bound = v.witness
        worst = max(worst, total / bound)
    for N in range(3, 21):
        a = slow_tail_family(N, Fraction(1, 2 ** 10))
        v = logsum_property(a, a[-1] + a[-2])
        if not v:
            return False, "slow-tail N=%d fails: %s" % (N, v.reason), {}
        total, bound = v.witness
        worst = max(worst, total / bound)
    return True, "%d random + 19 geometric + 18 slow-tail vectors; max sum/bound %.3f" % (count, float(worst)), {}


CRITERIA = (
    (1, "SA/deg+ duality", criterion_1),
    (2, "triangle MAX-CUT values", criterion_2),
    (3, "odd-cycle 2XOR values", criterion_3),
    (4, "separating functional", criterion_4),
    (5, "pattern/planting identity", criterion_5),
    (6, "gadget bias", criterion_6),
    (7, "decomposition bounds", criterion_7),
    (8, "trace lemmas", criterion_8),
    (9, "junta form of good leaves", criterion_9),
    (10, "lift round trip", criterion_10),
    (11, "LP oracle equivalence", criterion_11),
    (12, "log-sum lemma", criterion_12),
)


def run_criterion(number: int, **kw) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            return _timed(num, name, fn, **kw)
    raise KeyError(number)


def run_all(quick: bool = False, out=print) -> list[CriterionResult]:
    """Run every criterion; `quick` shrinks the random samples for a smoke run."""
    results = []
    for num, name, fn in CRITERIA:
        kw = {}
        if quick:
            kw = {1: {"count": 6}, 7: {"count": 6}, 8: {"count": 6}, 9: {"count": 6}, 11: {"count": 10}, 12: {"count": 100}}.get(num, {})
        r = _timed(num, name, fn, **kw)
        out(r.line())
        results.append(r)
    return results


# ---------------------------------------------------------------- one example per operation


def _ex_fwht():
    from .core import fwht

    s = fwht(1 - BooleanFunction.coordinate(1, 0))
    return s.coeffs == {0: 1, 1: -1}, "1 - z1 -> {0: 1, {1}: -1}"


def _ex_decay():
    v = is_eps_decaying(BooleanFunction.parity(2, [0, 1]), 1)
    return (not v) and v.witness is not None, "chi_12 at eps 1/2 rejected: " + v.reason


def _ex_min_entropy():
    from .core import min_entropy_cmp

    half = Density.uniform_on(4, 2, [i for i in range(16) if block_point(i, 4, 2)[0] < 2])
    return bool(min_entropy_cmp(half, (3, 1))) and not min_entropy_cmp(half, (4, 1)), "half of [4]^2: >= 3 bits, < 4 bits"


def _ex_marginal():
    from .core import marginal_condition

    u = Density.uniform_on(4, 2, [(3, a) for a in range(4)])
    m = marginal_condition(u, [0])
    return m.mass == (0, 0, 0, 4), "marginal of {x1 = 3} is a point mass with value 4"


def _ex_junta():
    from .core import ConicalJuntaRep, Conjunction, eval_conical_junta, point_index

    rep = ConicalJuntaRep(((Fraction(1, 2), Conjunction.of({0: 1, 1: -1})), (Fraction(1, 2), Conjunction.of({0: -1, 1: 1}))))
    f = BooleanFunction.from_callable(2, lambda z: 1 - z[0] * z[1])
    ok = all(eval_conical_junta(rep, point_index(p)) == f.values[point_index(p)] for p in itertools.product((1, -1), repeat=2))
    return ok and rep.as_function(2) == f, "1 - z1 z2 as two half-weight conjunctions"


def _ex_solve():
    lp = ratlp.build(1, [((1,), ratlp.LE, -1)], (1,))
    res = ratlp.solve(lp)
    return res.status == ratlp.INFEASIBLE and res.certificate == (1, 1), "x <= -1, x >= 0: infeasible, certificate (1, 1)"


def _ex_verify_certificate():
    lp = ratlp.build(1, [((1,), ratlp.LE, Fraction(3, 2))], (1,))
    res = ratlp.solve(lp)
    bad = ratlp.LPResult(res.status, (Fraction(2),), res.objective, res.certificate)
    v = ratlp.verify_certificate(lp, bad)
    return bool(ratlp.verify_certificate(lp, res)) and not v, "tampered primal x = 2 rejected: " + v.reason


def _ex_eval_instance():
    from .csp import eval_instance

    return eval_instance(triangle(), (1, 1, -1)) == Fraction(2, 3), "triangle at (+,+,-) -> 2/3"


def _ex_opt():
    from .csp import Instance, kxor

    inst = Instance(3, (((1, 2, 3), 0), ((1, 2, 3), 1)), kxor(3))
    return opt_brute(inst)[0] == Fraction(1, 2), "contradictory XOR pair -> 1/2"


def _ex_encode():
    from .csp import Instance, ksat

    s = encode_polynomial(Instance(3, (((1, 2, 3), 0),), ksat(3))).spectrum
    want = {0: Fraction(7, 8)}
    for m in range(1, 8):
        k = popcount(m)
        want[m] = Fraction(1, 8) if k % 2 else Fraction(-1, 8)
    return dict(s.items()) == want, "clause (x1 v x2 v x3) spectrum"


def _ex_generate():
    from .csp import emit, generate, parse

    inst = generate("random-kxor", {"n": 6, "m": 12, "k": 3}, 1)
    return parse(emit(inst)) == inst, "random 3XOR n=6 m=12 survives emit/parse"


def _ex_sa_value():
    from .csp import Instance, ksat

    return sa_value(Instance(3, (((1, 2, 3), 0),), ksat(3)), 3)[0] == 1, "single 3SAT clause at d=3 -> 1"


def _ex_check_pe():
    pe = PseudoExpectation(2, 2, {3: Fraction(-3, 2)})
    v = check_pseudoexpectation(pe)
    return not v, "E~[x1 x2] = -3/2 rejected: " + v.reason


def _ex_degp_feasible():
    f = BooleanFunction.from_callable(2, lambda z: 1 - z[0] * z[1])
    return (not degp_feasible(f, 1).feasible) and degp_feasible(f, 2).feasible, "1 - z1 z2: infeasible at 1, feasible at 2"


def _ex_degp_exact():
    return degp_exact(BooleanFunction.constant(3, 1)) == 0, "f = 1 -> 0"


def _ex_duality():
    rep = duality_check(triangle(), 2, Fraction(5, 6))
    return rep.ok and not rep.sa_le_c and not rep.degp_le_d, "triangle d=2 c=5/6: both sides false"


def _ex_separating():
    from .errors import DomainError

    try:
        separating_functional(BooleanFunction.from_callable(2, lambda z: 1 - z[0] * z[1]), 2, Fraction(1, 2))
    except DomainError as exc:
        return True, "1 - z1 z2 at D=2 -> domain error (%s)" % exc
    return False, "no domain error"


def k5_functional():
    """MAX-CUT on K5 has opt 3/5 and degree-4 value 2/3; c = 5/8 and eta = 1/48 sit in the gap."""
    inst = maxcut_graph(5, list(itertools.combinations(range(1, 6), 2)))
    return separating_functional(Fraction(5, 8) - encode_polynomial(inst), 4, Fraction(1, 48))


def _ex_main_estimate():
    from .core import Conjunction
    from .sa import main_estimate_check

    v = main_estimate_check(k5_functional(), Conjunction(), BooleanFunction.constant(5, 0), 1)
    return v.ok and v.witness == 1, "c = 1, h = 0 on K5: " + v.reason


def _ex_gadget():
    return Gadget(1).table() == [[1, -1], [-1, -1]], "b=1 table"


def _ex_pattern():
    M = build_pattern_matrix(1 - BooleanFunction.coordinate(1, 0), 1)
    return [list(r) for r in M.entries] == [[0, 2], [2, 2]], "1 - z1 at b=1 -> [[0,2],[2,2]]"


def _ex_acc():
    from .pattern import acc

    nu = acc(Density.uniform(4, 1), Density.uniform(4, 1))
    return nu.values == (Fraction(3, 4), Fraction(5, 4)), "uniform b=2: Acc(+1) = 3/4, Acc(-1) = 5/4"


def _ex_extractor():
    u = Density.uniform(256, 1)
    bias, v = extractor_bias_check(8, u, u)
    return bias == Fraction(-1, 256) and v.ok, "uniform b=8: bias -2^-8"


def _ex_bd_decay():
    from .pattern import bd_decay_check

    u = Density.uniform(256, 2)
    return bd_decay_check(u, u, 8).ok, "uniform n=2 b=8 decays"


def _ex_cbd_form():
    from .pattern import cbd_form_check

    q = 32
    u = Density.uniform_on(q, 2, [(5, a) for a in range(q)])
    v = Density.uniform_on(q, 2, [(9, a) for a in range(q)])
    form = cbd_form_check(u, v, 5)
    want = dict(form.junta.fixed) == {0: Gadget(5)(5, 9)}
    return want and form.verdict.ok, "fiber pair fixes z1 = g(5, 9); h decays"


def _ex_plant():
    from .csp import Instance, kxor
    from .pattern import encode_assignment, plant_instance

    planted = plant_instance(Instance(2, (((1, -2), 1),), kxor(2)), (1, 0), Gadget(1))
    x = encode_assignment((0,), Gadget(1))
    return planted.constraints == (((2, -3), 1),) and x == (1, -1), "constraint moves to variables (1,1), (2,0); x1 = 0 encodes to (+1, -1)"


def _ex_slack():
    from .errors import InputError
    from .pattern import slack_matrix

    try:
        slack_matrix([], [], 1, Fraction(1, 2))
    except InputError:
        return True, "empty instance list -> input error"
    return False, "accepted an empty list"


def _ex_blockwise_dense():
    from .decompose import is_blockwise_dense

    u = Density.uniform_on(16, 2, [i for i in range(256) if block_point(i, 16, 2)[0] < 2])
    v = is_blockwise_dense(u)
    return (not v) and v.witness.S == (0,) and v.witness.p == Fraction(1, 2), "x1 in {0,1} over [16]^2: violation at S={1}"


def _ex_check_cbd():
    from .decompose import check_cbd

    u = Density.uniform_on(4, 2, [(3, a) for a in range(4)])
    v = check_cbd(u, 1)
    return v.ok and v.fixed == (0,), "fiber {x1 = 3} is 1-CBD with I = {1}"


def _ex_decompose_1d():
    from .decompose import decompose_1d

    res = decompose_1d(Density.uniform(4, 2), 0)
    return len(res.parts) == 1 and res.error_mass == 0, "uniform -> single part"


def _ex_premise():
    from .decompose import check_premise
    from .cells import CellPairDensity

    return check_premise(CellPairDensity.uniform(20, 2)) == 0, "uniform pair density -> t = 0"


def _ex_decompose_rect():
    from .cells import CellPairDensity

    res = decompose_rect(CellPairDensity.uniform(20, 2), 2)
    return res.good_count() == 1 and res.error_mass() == 0, "uniform -> one good rectangle"


def _ex_verify_decomposition():
    from .cells import CellPairDensity

    mu = CellPairDensity.uniform(20, 2)
    rep = verify_decomposition(mu, decompose_rect(mu, 2))
    return rep.ok, "uniform decomposition verifies"


def _ex_logsum():
    v = logsum_property([Fraction(1, 2), Fraction(1, 2)], Fraction(1, 2))
    return v.ok and v.witness[0] == Fraction(3, 2), "(1/2, 1/2): sum 3/2 <= 3"


def _one_minus_z1_factorization():
    f = 1 - BooleanFunction.coordinate(1, 0)
    return f, junta_to_factorization(degp_feasible(f, 1).junta, 1, 1, f)


def _ex_verify_factorization():
    from .lift import NonnegFactorization

    f, F = _one_minus_z1_factorization()
    M = build_pattern_matrix(f, 1)
    halved = NonnegFactorization(1, 1, (replace(F.terms[0], weight=F.terms[0].weight / 2),) + F.terms[1:])
    v = verify_factorization(M, halved)
    return bool(verify_factorization(M, F)) and not v, "halved weight rejected: " + v.reason


def _ex_junta_to_factorization():
    f, F = _one_minus_z1_factorization()
    return F.rank == 2, "1 - z1 at b=1 -> 2 terms"


def _ex_factorization_to_witness():
    f = BooleanFunction.constant(1, 1)
    F = junta_to_factorization(degp_feasible(f, 0).junta, 20, 1, f)
    W = factorization_to_witness(F, 1)
    return verify_witness(f, W).ok and W.delta == 0, "f = 1 at b=20 -> verified witness, E[gamma] = 0"


def _ex_verify_witness():
    from .core import Conjunction
    from .lift import ApproxConicalJuntaWitness

    W = ApproxConicalJuntaWitness(2, ((Fraction(1), Conjunction(), BooleanFunction.parity(2, [0, 1])),), BooleanFunction.constant(2, 0), Fraction(10), Fraction(0), 1)
    rep = verify_witness(BooleanFunction.constant(2, 1), W)
    return (not rep.ok) and not rep.items["decay"], "large chi_S in h rejected on decay: " + rep.items["decay"].reason


def _ex_robustness():
    from .core import Conjunction
    from .errors import DomainError
    from .lift import ApproxConicalJuntaWitness

    f = BooleanFunction.constant(2, 1)
    W = ApproxConicalJuntaWitness(2, ((Fraction(1, 2), Conjunction(), BooleanFunction.constant(2, 0)),), BooleanFunction.constant(2, Fraction(1, 2)), Fraction(10), Fraction(1, 2), 1)
    try:
        robustness_check(f, W)
    except DomainError as exc:
        return True, "delta = 1/2 -> domain error (%s)" % exc
    return False, "no domain error"


def _ex_nnr():
    from .lift import nnr_report

    rows = nnr_report(BooleanFunction.from_callable(2, lambda z: 1 - z[0] * z[1]), 1, range(0, 3))
    row = [r for r in rows if r.feasible][0]
    return row.d == 2 and row.terms <= 8 and row.verified, "1 - z1 z2 at b=1: d=2, %s terms" % row.terms


def _ex_cli():
    import io
    import tempfile

    from . import cli

    with tempfile.TemporaryDirectory() as tmp:
        buf = io.StringIO()
        code = cli.main(["--out", tmp, "decompose", "--b", "20", "--n", "2", "--d", "2", "--input", "uniform"], out=buf)
        rep = __import__("json").loads(buf.getvalue())
    return code == 0 and rep["good_rectangles"] == 1 and rep["error_mass"]["exact"] == "0", "decompose uniform b=20: exit 0, one good rectangle"


OPERATION_EXAMPLES = (
    ("fwht", _ex_fwht),
    ("is_eps_decaying", _ex_decay),
    ("min_entropy_cmp", _ex_min_entropy),
    ("marginal_condition", _ex_marginal),
    ("eval_conical_junta", _ex_junta),
    ("solve", _ex_solve),
    ("verify_certificate", _ex_verify_certificate),
    ("eval_instance", _ex_eval_instance),
    ("opt_brute", _ex_opt),
    ("encode_polynomial", _ex_encode),
    ("generate/parse/emit", _ex_generate),
    ("sa_value", _ex_sa_value),
    ("check_pseudoexpectation", _ex_check_pe),
    ("degp_feasible", _ex_degp_feasible),
    ("degp_exact", _ex_degp_exact),
    ("duality_check", _ex_duality),
    ("separating_functional", _ex_separating),
    ("main_estimate_check", _ex_main_estimate),
    ("gadget_eval", _ex_gadget),
    ("build_pattern_matrix", _ex_pattern),
    ("acc", _ex_acc),
    ("extractor_bias_check", _ex_extractor),
    ("bd_decay_check", _ex_bd_decay),
    ("cbd_form_check", _ex_cbd_form),
    ("plant_instance/encode_assignment", _ex_plant),
    ("slack_matrix", _ex_slack),
    ("is_blockwise_dense", _ex_blockwise_dense),
    ("check_cbd", _ex_check_cbd),
    ("decompose_1d", _ex_decompose_1d),
    ("check_premise", _ex_premise),
    ("decompose_rect", _ex_decompose_rect),
    ("verify_decomposition", _ex_verify_decomposition),
    ("logsum_property", _ex_logsum),
    ("verify_factorization", _ex_verify_factorization),
    ("junta_to_factorization", _ex_junta_to_factorization),
    ("factorization_to_witness", _ex_factorization_to_witness),
    ("verify_witness", _ex_verify_witness),
    ("robustness_check", _ex_robustness),
    ("nnr_report", _ex_nnr),
    ("run", _ex_cli),
)


def operation_examples() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in OPERATION_EXAMPLES:
        try:
            ok, detail = fn()
        except Exception as exc:
            ok, detail = False, "%s: %s" % (type(exc).__name__, exc)
        out.append((name, bool(ok), detail))
    return out
