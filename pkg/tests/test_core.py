import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liftlab.core import (
    BooleanFunction,
    ConicalJuntaRep,
    Conjunction,
    Density,
    PairDensity,
    block_index,
    block_point,
    chi,
    eval_conical_junta,
    fwht,
    inverse_fwht,
    is_eps_decaying,
    marginal_condition,
    min_entropy_cmp,
    point_index,
    pow2_ge,
    pow2_le,
)
from liftlab.errors import InputError

small_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=12)


@st.composite
def functions(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return BooleanFunction(n, tuple(draw(st.lists(small_fracs, min_size=1 << n, max_size=1 << n))))


def brute_coefficient(f, mask):
    return sum((v * chi(mask, x) for x, v in enumerate(f.values)), Fraction(0)) / len(f.values)


# ---------------------------------------------------------------- Fourier


def test_fwht_constant():
    assert fwht(BooleanFunction.constant(3, 1)).coeffs == {0: 1}


def test_fwht_one_minus_z1():
    assert fwht(1 - BooleanFunction.coordinate(1, 0)).coeffs == {0: 1, 1: -1}


def test_fwht_parity_basis():
    assert fwht(BooleanFunction.parity(2, [0, 1])).coeffs == {3: 1}


@given(functions())
def test_fwht_matches_inner_products(f):
    spec = fwht(f)
    for mask in range(1 << f.n):
        assert spec[mask] == brute_coefficient(f, mask)


@given(functions())
def test_inverse_round_trip_and_parseval(f):
    spec = fwht(f)
    assert inverse_fwht(spec) == f
    assert spec.parseval() == f.inner(f)


def test_fwht_respects_cap():
    with pytest.raises(Exception):
        fwht(BooleanFunction.constant(3, 1), cap=2)


# ---------------------------------------------------------------- decay


def test_zero_decays():
    assert is_eps_decaying(BooleanFunction.constant(3, 0), 5)


def test_quarter_z1_decays_at_half():
    assert is_eps_decaying(BooleanFunction.coordinate(1, 0) * Fraction(1, 4), 1)


def test_parity_violates_at_half():
    v = is_eps_decaying(BooleanFunction.parity(2, [0, 1]), 1)
    assert not v and "(0, 1)" in v.reason


@given(functions(3), st.integers(0, 4))
def test_decay_matches_definition(h, e):
    want = brute_coefficient(h, 0) == 0 and all(abs(brute_coefficient(h, m)) <= Fraction(1, 2 ** (e * bin(m).count("1"))) for m in range(1, 1 << h.n))
    assert bool(is_eps_decaying(h, e)) == want


# ---------------------------------------------------------------- powered comparisons


@given(st.fractions(min_value=0, max_value=8, max_denominator=50), st.integers(-6, 6))
def test_pow2_comparisons_integer_exponent(x, e):
    assert pow2_le(x, e) == (x <= Fraction(2) ** e)
    assert pow2_ge(x, e) == (x >= Fraction(2) ** e)


@given(st.integers(1, 64), st.integers(-30, 30), st.sampled_from([2, 5, 10]))
def test_pow2_le_fractional_exponent(num, k, den):
    # x <= 2^(k/den) iff x^den <= 2^k for x > 0
    x = Fraction(num, 16)
    assert pow2_le(x, Fraction(k, den)) == (x ** den <= Fraction(2) ** k)


# ---------------------------------------------------------------- min-entropy


def test_uniform_has_full_entropy():
    assert min_entropy_cmp(Density.uniform(4, 2), (4, 1))


def test_point_mass_fails_with_witness():
    v = min_entropy_cmp(Density.point_mass(4, 2, (1, 2)), (1, 1))
    assert not v and v.witness == (1, 2)


def test_half_domain_has_three_bits():
    half = Density.uniform_on(4, 2, [(a, c) for a in range(2) for c in range(4)])
    assert min_entropy_cmp(half, (3, 1)) and not min_entropy_cmp(half, (4, 1))


def test_fractional_thresholds():
    u = Density.uniform(32, 1)  # 5 bits
    assert min_entropy_cmp(u, (25, 5)) and not min_entropy_cmp(u, (26, 5))
    with pytest.raises(InputError):
        min_entropy_cmp(u, (1, 3))


# ---------------------------------------------------------------- marginals


def test_uniform_pair_projects_to_uniform():
    mu = PairDensity.uniform(4, 2)
    assert marginal_condition(mu, [1]) == PairDensity.uniform(4, 1)


def test_fiber_marginal_is_point_mass():
    u = Density.uniform_on(4, 2, [(3, a) for a in range(4)])
    assert marginal_condition(u, [0]).mass == (0, 0, 0, 4)


def test_conditioning_gives_uniform_fiber():
    c = marginal_condition(Density.uniform(4, 2), [0, 1], ([0], [0]))
    assert c.mean() == 1 if hasattr(c, "mean") else sum(c.mass) == 16
    assert all((m == 4) == (block_point(i, 4, 2)[0] == 0) for i, m in enumerate(c.mass))


@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_block_index_round_trip(b, n, data):
    q = 1 << b
    idx = data.draw(st.integers(0, q ** n - 1))
    assert block_index(block_point(idx, q, n), q) == idx


# ---------------------------------------------------------------- conical juntas


def test_empty_conjunction_is_constant_one():
    rep = ConicalJuntaRep(((Fraction(1), Conjunction()),))
    assert rep.as_function(2) == BooleanFunction.constant(2, 1)


def test_conjunction_mean_one_scaling():
    rep = ConicalJuntaRep(((Fraction(1), Conjunction.of({0: -1})),))
    assert eval_conical_junta(rep, point_index((-1,))) == 2
    assert eval_conical_junta(rep, point_index((1,))) == 0


def test_junta_for_one_minus_z1z2():
    rep = ConicalJuntaRep(((Fraction(1, 2), Conjunction.of({0: 1, 1: -1})), (Fraction(1, 2), Conjunction.of({0: -1, 1: 1}))))
    for p in itertools.product((1, -1), repeat=2):
        assert eval_conical_junta(rep, point_index(p)) == 1 - p[0] * p[1]


@given(st.integers(1, 4), st.data())
def test_conjunctions_have_mean_one(n, data):
    k = data.draw(st.integers(0, n))
    fixed = {i: data.draw(st.sampled_from((1, -1))) for i in data.draw(st.permutations(range(n)))[:k]}
    assert Conjunction.of(fixed).as_function(n).mean() == 1


def test_density_rejects_bad_mean():
    with pytest.raises(InputError):
        Density(2, 1, (1, 2))
