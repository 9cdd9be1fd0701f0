import itertools
import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liftlab.cells import CellPairDensity, random_cell_density
from liftlab.core import Density, PairDensity, block_point
from liftlab.decompose import (
    check_aligned,
    check_cbd,
    check_premise,
    decompose_1d,
    decompose_rect,
    error_bounds,
    is_blockwise_dense,
    logsum_property,
    verify_1d,
    verify_decomposition,
    verify_trace,
)
from liftlab.errors import DomainError, InputError


# ---------------------------------------------------------------- density checks


def test_uniform_is_blockwise_dense():
    assert is_blockwise_dense(Density.uniform(8, 3))


def test_fixed_block_violates():
    u = Density.uniform_on(4, 2, [(2, a) for a in range(4)])
    v = is_blockwise_dense(u)
    assert not v and v.witness.S == (0,) and v.witness.p == 1


def test_two_values_of_sixteen_violate():
    u = Density.uniform_on(16, 2, [(a, c) for a in range(2) for c in range(16)])
    v = is_blockwise_dense(u)
    # 1/2 > 16^(-4/5) since (1/2)^5 = 2^-5 > 2^-16
    assert not v and v.witness.S == (0,) and v.witness.p == Fraction(1, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.data())
def test_density_check_matches_definition(b, n, data):
    q = 1 << b
    w = data.draw(st.lists(st.integers(0, 3), min_size=q ** n, max_size=q ** n).filter(any))
    u = Density.from_weights(q, n, w)
    # oracle: every marginal probability p on S satisfies p^5 <= q^(-4|S|)
    dense = True
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            for alpha in itertools.product(range(q), repeat=k):
                p = sum(u.probability(block_point(i, q, n)) for i in range(q ** n) if all(block_point(i, q, n)[c] == a for c, a in zip(S, alpha)))
                if p ** 5 > Fraction(1, q ** (4 * k)):
                    dense = False
    assert bool(is_blockwise_dense(u)) == dense


def test_cbd_examples():
    assert check_cbd(Density.uniform(8, 2), 0).fixed == ()
    fiber = Density.uniform_on(4, 2, [(3, a) for a in range(4)])
    v = check_cbd(fiber, 1)
    assert v and v.fixed == (0,)
    assert not check_cbd(fiber, 0)
    other = Density.uniform_on(4, 2, [(a, 3) for a in range(4)])
    assert not check_aligned(fiber, other, 1)
    assert check_aligned(fiber, fiber, 1)


# ---------------------------------------------------------------- one-sided decomposition


def test_1d_uniform_single_part():
    res = decompose_1d(Density.uniform(4, 2), 0)
    assert len(res.parts) == 1 and res.error_mass == 0 and res.parts[0].fixed == ()


def test_1d_fiber_splits_into_points():
    # at n = 2 every point of a fiber has probability 1/q > q^(-8/5), so the widest
    # violating set is both blocks and the parts are single points
    fiber = Density.uniform_on(4, 2, [(1, a) for a in range(4)])
    res = decompose_1d(fiber, 2)
    assert res.error_mass == 0
    assert sorted(len(p.points) for p in res.parts) == [1, 1, 1, 1]
    assert all(p.fixed == (0, 1) and p.alpha[0] == 1 for p in res.parts)
    assert verify_1d(fiber, res)


def test_1d_two_fibers_zero_error():
    mix = Density.uniform_on(4, 2, [(a, c) for a in range(2) for c in range(4)])
    res = decompose_1d(mix, 2)
    assert res.error_mass == 0 and sum(p.mass for p in res.parts) == 1
    assert verify_1d(mix, res)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_1d_partition_property(seed):
    rng = random.Random(seed)
    q, n = 8, 2
    w = [rng.choice((0, 0, 1, 2)) for _ in range(q ** n)]
    if not any(w):
        w[0] = 1
    u = Density.from_weights(q, n, w)
    try:
        res = decompose_1d(u, n)
    except DomainError:
        return
    covered = set().union(*(p.points for p in res.parts)) | set(res.error)
    support = {i for i, m in enumerate(u.mass) if m}
    assert support <= covered
    assert sum(p.mass for p in res.parts) + res.error_mass == 1
    assert verify_1d(u, res)


# ---------------------------------------------------------------- premise


def brute_premise(mu: PairDensity, b: int) -> Fraction:
    """Least t on the 1/10 grid with max_I max-probability(mu_I) <= 2^(t - 1.9 b |I|)."""
    best = Fraction(0)
    for k in range(1, mu.n + 1):
        for I in itertools.combinations(range(mu.n), k):
            proj = mu.project(I)
            p = max(proj.mass) / len(proj.mass)
            t = Fraction(0)
            while p ** 10 > Fraction(2) ** (10 * t - 19 * b * k):
                t += Fraction(1, 10)
            best = max(best, t)
    return best


def test_premise_uniform():
    assert check_premise(CellPairDensity.uniform(20, 2)) == 0


@pytest.mark.parametrize("b", [2, 3])
def test_premise_half_domains(b):
    q = 1 << b
    half = Density.uniform_on(q, 2, [i for i in range(q * q) if block_point(i, q, 2)[0] < q // 2])
    mu = PairDensity.product(half, half)
    got = check_premise(mu)
    assert got == brute_premise(mu, b)
    # one lost bit per side on block 1: t = 2 - b/10
    assert got == 2 - Fraction(b, 10)


def test_premise_point_mass_is_maximal():
    p = Density.point_mass(4, 2, (1, 1))
    assert check_premise(PairDensity.product(p, p)) == Fraction(19 * 2 * 2, 10)


# ---------------------------------------------------------------- rectangle decomposition


def test_uniform_single_good_rectangle():
    res = decompose_rect(CellPairDensity.uniform(20, 2), 2)
    assert len(res.leaves) == 1 and res.leaves[0].kind == "good" and res.leaves[0].F == ()
    assert res.error_mass("error_a") == 0 and res.error_mass("error_b") == 0
    assert verify_decomposition(res.mu, res).ok


def test_fiber_times_uniform_gives_q_rectangles():
    q = 32
    u = Density.uniform_on(q, 2, [(3, a) for a in range(q)])
    mu = CellPairDensity.from_densities(u, Density.uniform(q, 2))
    res = decompose_rect(mu, 2)
    assert res.good_count() == q and res.error_mass() == 0
    assert all(l.F == (0,) and l.mass == Fraction(1, q) for l in res.good)
    assert verify_decomposition(mu, res).ok


def test_planted_pattern_q32_n3():
    mu = random_cell_density(random.Random(32), 5, 3, 3, 2, Fraction(1, 2 ** 6))
    res = decompose_rect(mu, 2)
    assert verify_decomposition(mu, res).ok and verify_trace(res).ok


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_small_decompositions_verify(seed, d):
    mu = random_cell_density(random.Random(seed), 3, 2, 3, seed % 3, Fraction(1, 16))
    res = decompose_rect(mu, d)
    rep = verify_decomposition(mu, res)
    assert rep.ok, rep.failed()
    assert verify_trace(res).ok
    # total leaf mass is the whole space
    assert sum((l.total_mass for l in res.leaves), Fraction(0)) == 1


def test_corrupted_partition_is_caught():
    q = 32
    u = Density.uniform_on(q, 2, [(3, a) for a in range(q)])
    mu = CellPairDensity.from_densities(u, Density.uniform(q, 2))
    res = decompose_rect(mu, 2)
    leaves = list(res.leaves)
    # give leaf 1 the y side of leaf 0: one rectangle is now covered twice, another not at all
    leaves[1] = replace(leaves[1], B=leaves[0].B)
    bad = replace(res, leaves=leaves)
    rep = verify_decomposition(mu, bad)
    assert not rep.ok and not rep.items["partition"]


def test_error_bounds_are_vacuous_at_b20_small_d():
    bounds = error_bounds(20, 2, Fraction(0))
    assert all(v >= 1 for v in bounds.values() if isinstance(v, Fraction))


def test_b_multiple_of_20_guard():
    with pytest.raises(InputError):
        decompose_rect(CellPairDensity.uniform(5, 2), 1, require_b_multiple_of_20=True)


# ---------------------------------------------------------------- log-sum lemma


def test_logsum_two_halves():
    v = logsum_property([Fraction(1, 2), Fraction(1, 2)], Fraction(1, 2))
    assert v and v.witness == (Fraction(3, 2), 3)


@pytest.mark.parametrize("N", [1, 2, 5, 10, 19])
def test_logsum_geometric(N):
    a = [Fraction(1, 2 ** j) for j in range(1, N + 1)] + [Fraction(1, 2 ** N)]
    v = logsum_property(a, Fraction(1, 2 ** N))
    total, bound = v.witness
    assert v and total == Fraction(N, 2) + 1 and bound == N + 2


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(1, 1000), min_size=2, max_size=20))
def test_logsum_random(weights):
    s = sum(weights)
    a = [Fraction(w, s) for w in weights]
    eps = a[-1] + a[-2]
    tail, total = Fraction(0), Fraction(0)
    for x in reversed(a):
        tail += x
        total += x / tail
    v = logsum_property(a, eps)
    assert v and v.witness[0] == total


def test_logsum_preconditions():
    with pytest.raises(DomainError):
        logsum_property([Fraction(1, 2), Fraction(1, 2)], Fraction(3, 2))
    with pytest.raises(DomainError):
        logsum_property([Fraction(9, 10), Fraction(1, 20), Fraction(1, 20)], Fraction(1, 2))
