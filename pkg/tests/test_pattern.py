import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liftlab.cells import random_cell_density
from liftlab.core import BooleanFunction, Density, block_index, block_point, is_eps_decaying
from liftlab.csp import Instance, kxor, maxcut_graph
from liftlab.decompose import decompose_rect
from liftlab.errors import DomainError, InputError
from liftlab.pattern import (
    Gadget,
    acc,
    acc_enumerate,
    acc_fourier_product,
    bd_decay_check,
    build_pattern_matrix,
    cbd_form_check,
    check_pattern_consistency,
    encode_assignment,
    exhaustive_flat_check,
    extractor_bias_check,
    leaf_junta_terms,
    planted_embedding,
    plant_instance,
    product_density,
    rect_acc_weighted,
    slack_matrix,
    verify_submatrix,
)


def bitwise_gadget(x, y):
    """(-1)^(x1 xor y1) * (-1)^<x, y> over GF(2), written out bit by bit."""
    ip = sum(((x >> i) & 1) * ((y >> i) & 1) for i in range(max(x, y).bit_length() + 1)) % 2
    return (-1) ** (((x ^ y) & 1) ^ ip)


def test_b1_table():
    assert Gadget(1).table() == [[1, -1], [-1, -1]]


def test_b2_origin_and_mean():
    assert Gadget(2)(0, 0) == 1
    assert Gadget(2).mean() == Fraction(-1, 4)


@given(st.integers(1, 10), st.data())
def test_gadget_matches_bitwise_formula(b, data):
    x, y = data.draw(st.integers(0, (1 << b) - 1)), data.draw(st.integers(0, (1 << b) - 1))
    assert Gadget(b)(x, y) == bitwise_gadget(x, y)
    # shifted inner-product form: g(x, y) = -(-1)^<x xor 1, y xor 1>
    assert Gadget(b)(x, y) == -bitwise_gadget(0, 0) * (-1) ** (bin((x ^ 1) & (y ^ 1)).count("1") % 2)


@pytest.mark.parametrize("b", range(1, 9))
def test_gadget_bias_is_minus_inverse_q(b):
    q = 1 << b
    assert Fraction(sum(Gadget(b)(x, y) for x in range(q) for y in range(q)), q * q) == Fraction(-1, q)


def test_gadget_rejects_out_of_range():
    with pytest.raises(InputError):
        Gadget(2)(4, 0)


# ---------------------------------------------------------------- pattern matrices


def test_constant_gives_all_ones():
    M = build_pattern_matrix(BooleanFunction.constant(2, 1), 2)
    assert all(v == 1 for row in M.entries for v in row)


def test_one_minus_z1_matrix():
    M = build_pattern_matrix(1 - BooleanFunction.coordinate(1, 0), 1)
    assert [list(r) for r in M.entries] == [[0, 2], [2, 2]]


def gadget_output_distribution(n, b):
    """Pr[G = z] by counting gadget values per block."""
    q = 1 << b
    minus = sum(1 for x in range(q) for y in range(q) if Gadget(b)(x, y) == -1)
    p_minus = Fraction(minus, q * q)
    return [
        Fraction(1) * __import__("math").prod(p_minus if (z >> i) & 1 else 1 - p_minus for i in range(n))
        for z in range(1 << n)
    ]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.data())
def test_pattern_mean_is_gadget_weighted(n, b, data):
    f = BooleanFunction(n, tuple(data.draw(st.lists(st.fractions(0, 3, max_denominator=4), min_size=1 << n, max_size=1 << n))))
    M = build_pattern_matrix(f, b)
    mean = Fraction(sum(sum(r) for r in M.entries), M.size ** 2)
    assert mean == sum((p * v for p, v in zip(gadget_output_distribution(n, b), f.values)), Fraction(0))
    assert check_pattern_consistency(M)


def test_pattern_mean_differs_from_function_mean():
    # the gadget is biased, so E[M] and E[f] differ for non-constant f
    f = 1 - BooleanFunction.coordinate(1, 0)
    M = build_pattern_matrix(f, 2)
    assert Fraction(sum(sum(r) for r in M.entries), 16) == Fraction(5, 4) != f.mean()


def test_pattern_cap():
    with pytest.raises(Exception):
        build_pattern_matrix(BooleanFunction.constant(3, 1), 5, cap=14)


# ---------------------------------------------------------------- Acc


def test_acc_uniform_b2():
    assert acc(Density.uniform(4, 1), Density.uniform(4, 1)).values == (Fraction(3, 4), Fraction(5, 4))


def test_acc_point_row_is_constant():
    nu = acc(Density.point_mass(2, 1, (1,)), Density.uniform(2, 1))
    assert nu.values == (0, 2)


@st.composite
def density_pairs(draw, max_b=2, max_n=2):
    b, n = draw(st.integers(1, max_b)), draw(st.integers(1, max_n))
    q = 1 << b
    size = q ** n
    w1 = draw(st.lists(st.integers(0, 5), min_size=size, max_size=size).filter(any))
    w2 = draw(st.lists(st.integers(0, 5), min_size=size, max_size=size).filter(any))
    return b, Density.from_weights(q, n, w1), Density.from_weights(q, n, w2)


@settings(max_examples=60, deadline=None)
@given(density_pairs())
def test_acc_transform_matches_enumeration(pair):
    b, u, v = pair
    nu = acc(u, v, b)
    assert nu == acc_enumerate(u, v, b)
    assert nu.mean() == 1 and nu.is_nonnegative()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.data())
def test_acc_of_products_factorizes(b, data):
    q = 1 << b
    us = [Density.from_weights(q, 1, data.draw(st.lists(st.integers(0, 4), min_size=q, max_size=q).filter(any))) for _ in range(2)]
    vs = [Density.from_weights(q, 1, data.draw(st.lists(st.integers(0, 4), min_size=q, max_size=q).filter(any))) for _ in range(2)]
    assert acc_fourier_product(us, vs) == acc_enumerate(product_density(us), product_density(vs), b)


def test_extractor_uniform_b8():
    u = Density.uniform(256, 1)
    bias, v = extractor_bias_check(8, u, u)
    assert bias == Fraction(-1, 256) and v


def test_extractor_sampled_sources_b8():
    rng = random.Random(8)
    for _ in range(10):
        u = Density.uniform_on(256, 1, rng.sample(range(256), 128))
        bias, v = extractor_bias_check(8, u, Density.uniform(256, 1))
        # oracle: average of the gadget over the support rows
        rows = [x for x in range(256) if u.mass[x]]
        assert bias == Fraction(sum(Gadget(8)(x, y) for x in rows for y in range(256)), len(rows) * 256)
        assert v


def test_extractor_rejects_point_masses():
    p = Density.point_mass(256, 1, (0,))
    with pytest.raises(DomainError):
        extractor_bias_check(8, p, p)


@pytest.mark.parametrize("b", [1, 2, 3])
def test_exhaustive_flat_sources(b):
    assert exhaustive_flat_check(b)


def test_bd_decay_uniform():
    u = Density.uniform(256, 2)
    assert bd_decay_check(u, u, 8)


def test_bd_decay_rejects_fixed_block():
    u = Density.uniform_on(4, 2, [(1, a) for a in range(4)])
    with pytest.raises(DomainError):
        bd_decay_check(u, Density.uniform(4, 2), 2)


def test_cbd_form_without_fixed_blocks():
    u = Density.uniform(8, 2)
    form = cbd_form_check(u, u, 3)
    assert form.junta.width == 0 and form.verdict
    assert form.h == acc(u, u) - 1


def test_cbd_form_fiber_pair():
    q = 32
    u = Density.uniform_on(q, 2, [(5, a) for a in range(q)])
    v = Density.uniform_on(q, 2, [(9, a) for a in range(q)])
    form = cbd_form_check(u, v, 5)
    assert dict(form.junta.fixed) == {0: Gadget(5)(5, 9)}
    assert form.verdict
    # h does not depend on z1 and decays on z2
    assert all(form.h.values[z] == form.h.values[z ^ 1] for z in range(4))


def test_cbd_form_rejects_misaligned():
    q = 4
    u = Density.uniform_on(q, 2, [(1, a) for a in range(q)])
    v = Density.uniform_on(q, 2, [(a, 1) for a in range(q)])
    with pytest.raises(DomainError):
        cbd_form_check(u, v, 2)


# ---------------------------------------------------------------- cell-based Acc and leaves


def brute_rect_acc(mu, A, B):
    """Mass-weighted Acc of the union of member rectangles, by enumerating points (small b only)."""
    n, q = mu.n, mu.q
    out = [Fraction(0)] * (1 << n)
    gad = Gadget(mu.b)
    for xi in range(q ** n):
        x = block_point(xi, q, n)
        if not A.contains(x):
            continue
        for yi in range(q ** n):
            y = block_point(yi, q, n)
            if not B.contains(y):
                continue
            p = mu.probability(x, y)
            out[gad.G_index(x, y)] += p
    return BooleanFunction(n, tuple(o * (1 << n) for o in out))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_leaf_acc_matches_enumeration_b3(seed):
    mu = random_cell_density(random.Random(seed), 3, 2, 3, 1, Fraction(1, 8))
    res = decompose_rect(mu, 1)
    for leaf in res.leaves:
        if leaf.mass == 0:
            continue
        assert rect_acc_weighted(mu, leaf.A, leaf.B) == brute_rect_acc(mu, leaf.A, leaf.B)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_good_leaves_b5_have_decaying_junta_form(seed):
    mu = random_cell_density(random.Random(seed), 5, 2, 3, seed % 3, Fraction(1, 2 ** 8))
    res = decompose_rect(mu, 2)
    for leaf in res.good:
        total = BooleanFunction.constant(2, 0)
        for lam, C, h in leaf_junta_terms(mu, leaf, 5):
            assert is_eps_decaying(h, Fraction(5, 2))
            assert all(h.values[z] == h.values[z ^ C.support] for z in range(4))
            total = total + C.as_function(2) * (h + 1) * lam
        assert total == rect_acc_weighted(mu, leaf.A, leaf.B)


# ---------------------------------------------------------------- planting


def test_plant_moves_constraint():
    inst = plant_instance(Instance(1, (((1,), 1),), kxor(1)), (0,), Gadget(1))
    assert inst.n == 2 and inst.constraints == (((1,), 1),)


def test_encode_assignment_row_zero():
    assert encode_assignment((0,), Gadget(1)) == (1, -1)


@pytest.mark.parametrize("b", [1, 2])
def test_planting_identity_single_edge(b):
    S, M, rows, cols = planted_embedding(maxcut_graph(2, [(1, 2)]), 1, 1, b)
    assert verify_submatrix(S, M, rows, cols)
    q = 1 << b
    for x in itertools.product(range(q), repeat=2):
        for y in itertools.product(range(q), repeat=2):
            xi, yi = block_index(x, q), block_index(y, q)
            assert S.entries[rows[yi]][cols[xi]] == M.entries[xi][yi]


def test_slack_zero_only_at_satisfying_assignment():
    inst = Instance(2, (((1, 2), 1),), kxor(2))
    xs = list(itertools.product((1, -1), repeat=2))
    S = slack_matrix([inst], xs, 1, 1)
    assert [v == 0 for v in S.entries[0]] == [x[0] != x[1] for x in xs]


def test_slack_rejects_opt_above_s():
    inst = Instance(2, (((1, 2), 1),), kxor(2))
    with pytest.raises(InputError):
        slack_matrix([inst], [(1, 1)], 1, Fraction(1, 2))
    with pytest.raises(InputError):
        slack_matrix([], [], 1, Fraction(1, 2))
