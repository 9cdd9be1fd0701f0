import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liftlab.acceptance import anti_correlated_pe, k5_functional, random_duality_instances
from liftlab.core import BooleanFunction, Conjunction, all_conjunctions
from liftlab.csp import Instance, encode_polynomial, ksat, maxcut_graph, odd_cycle_xor, opt_brute
from liftlab.errors import DomainError
from liftlab.sa import (
    PseudoExpectation,
    check_pseudoexpectation,
    conditioning_check,
    degp_exact,
    degp_feasible,
    duality_check,
    main_estimate_check,
    sa_value,
    separating_functional,
    verify_separating_functional,
)


def triangle():
    return maxcut_graph(3, [(1, 2), (2, 3), (1, 3)])


def one_minus_z1z2():
    return BooleanFunction.from_callable(2, lambda z: 1 - z[0] * z[1])


def test_triangle_sa_values():
    assert sa_value(triangle(), 2)[0] == 1
    assert sa_value(triangle(), 3)[0] == Fraction(2, 3)


def test_triangle_explicit_pseudoexpectation():
    pe = anti_correlated_pe(3, 2, [(1, 2), (2, 3), (1, 3)])
    assert check_pseudoexpectation(pe)
    assert pe.apply(encode_polynomial(triangle())) == 1


def test_clause_sa_value():
    assert sa_value(Instance(3, (((1, 2, 3), 0),), ksat(3)), 3)[0] == 1


def test_true_distribution_moments_accepted():
    assert check_pseudoexpectation(PseudoExpectation(3, 3, {}))


def test_overcorrelated_moment_rejected():
    v = check_pseudoexpectation(PseudoExpectation(2, 2, {3: Fraction(-3, 2)}))
    assert not v and "(0, 1)" in v.reason


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sa_bounds_opt_and_is_monotone(seed):
    inst, d = random_duality_instances(1, seed)[0]
    opt = opt_brute(inst)[0]
    vals = [sa_value(inst, k)[0] for k in range(inst.predicate.arity, min(inst.n, 3) + 1)]
    assert all(v >= opt for v in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sa_witness_is_valid_pseudoexpectation(seed):
    inst, d = random_duality_instances(1, seed)[0]
    val, pe = sa_value(inst, d)
    assert check_pseudoexpectation(pe)
    assert pe.apply(encode_polynomial(inst)) == val


def test_degp_examples():
    assert degp_feasible(BooleanFunction.constant(2, 1), 0).feasible
    assert degp_feasible(1 + BooleanFunction.coordinate(1, 0), 1).feasible
    f = one_minus_z1z2()
    assert not degp_feasible(f, 1).feasible and degp_feasible(f, 2).feasible
    assert degp_exact(BooleanFunction.constant(2, 1)) == 0
    assert degp_exact(f) == 2
    assert degp_exact(Fraction(23, 24) - encode_polynomial(odd_cycle_xor(3))) == 3


def test_degp_two_point_argument():
    # any 1-junta representation gives f(1,1) + f(-1,-1) = f(1,-1) + f(-1,1); here 0 + 0 != 2 + 2
    f = one_minus_z1z2()
    assert f.values[0] + f.values[3] != f.values[1] + f.values[2]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.data())
def test_degp_witness_reconstructs(n, data):
    vals = data.draw(st.lists(st.integers(0, 3), min_size=1 << n, max_size=1 << n))
    f = BooleanFunction(n, tuple(Fraction(v) for v in vals))
    d = degp_exact(f)
    res = degp_feasible(f, d)
    assert res.feasible and res.junta.as_function(n) == f and res.junta.width() <= d
    if d > 0:
        below = degp_feasible(f, d - 1)
        assert not below.feasible
        # the Farkas function is nonnegative on (d-1)-conjunctions and negative on f
        y = below.farkas
        assert y.inner(f) < 0
        assert all(y.inner(c.as_function(n)) >= 0 for c in all_conjunctions(n, d - 1))


def test_duality_examples():
    assert duality_check(triangle(), 2, 1).ok
    rep = duality_check(triangle(), 2, Fraction(5, 6))
    assert rep.ok and not rep.sa_le_c and not rep.degp_le_d
    inst = odd_cycle_xor(3)
    rep = duality_check(inst, 3, opt_brute(inst)[0])
    assert rep.ok and rep.sa_le_c and rep.degp_le_d


def test_separating_functional_odd_cycle():
    f = Fraction(11, 12) - encode_polynomial(odd_cycle_xor(3))
    sf = separating_functional(f, 2, Fraction(1, 24))
    rep = verify_separating_functional(sf)
    assert rep.ok
    assert sf.L.inner(f) < Fraction(-1, 24)
    assert all(abs(c) <= 1 for m, c in sf.L.spectrum.items() if bin(m).count("1") <= 2)


def test_separating_functional_needs_a_gap():
    with pytest.raises(DomainError):
        separating_functional(one_minus_z1z2(), 2, Fraction(1, 2))


def test_conditioning_property_on_odd_cycle_functional():
    f = Fraction(11, 12) - encode_polynomial(odd_cycle_xor(3))
    assert conditioning_check(separating_functional(f, 2, Fraction(1, 24)).L, 2)


def test_main_estimate_trivial_cases():
    sf = k5_functional()
    n = sf.n
    assert main_estimate_check(sf, Conjunction(), BooleanFunction.constant(n, 0), 1).witness == 1
    for c in all_conjunctions(n, 1):
        assert main_estimate_check(sf, c, BooleanFunction.constant(n, 0), 1)


def random_decaying(rng, n, eps):
    """Mean-zero h with coefficient on S at most eps^|S| in absolute value."""
    coeffs = {}
    for m in range(1, 1 << n):
        k = bin(m).count("1")
        coeffs[m] = Fraction(rng.randint(-4, 4), 4) * eps ** k
    from liftlab.core import FourierSpectrum

    return FourierSpectrum(n, coeffs).to_function()


def test_main_estimate_random_triples_k5():
    sf = k5_functional()
    n, rng = sf.n, random.Random(3)
    for _ in range(40):
        c = rng.choice(all_conjunctions(n, 1))
        h = random_decaying(rng, n, Fraction(1, n ** 4))
        assert main_estimate_check(sf, c, h, 1)


@pytest.mark.slow
def test_main_estimate_random_triples_k6():
    # MAX-CUT on K6: opt 3/5 below the degree-4 value 2/3
    inst = maxcut_graph(6, list(itertools.combinations(range(1, 7), 2)))
    sf = separating_functional(Fraction(5, 8) - encode_polynomial(inst), 4, Fraction(1, 48))
    assert verify_separating_functional(sf).ok
    rng = random.Random(6)
    for _ in range(30):
        c = rng.choice(all_conjunctions(6, 1))
        h = random_decaying(rng, 6, Fraction(1, 6 ** 4))
        assert main_estimate_check(sf, c, h, 1)


def test_main_estimate_rejects_slow_decay():
    sf = k5_functional()
    with pytest.raises(DomainError):
        main_estimate_check(sf, Conjunction(), BooleanFunction.coordinate(5, 0) * Fraction(1, 2), 1)
