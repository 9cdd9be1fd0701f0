import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liftlab.csp import Instance, emit, encode_polynomial, eval_instance, generate, kxor, ksat, maxcut_graph, odd_cycle_xor, opt_brute, parse, random_ksat, random_kxor
from liftlab.core import point_index
from liftlab.errors import InputError, ParseError


def triangle():
    return maxcut_graph(3, [(1, 2), (2, 3), (1, 3)])


def test_triangle_values():
    assert eval_instance(triangle(), (1, 1, 1)) == 0
    assert eval_instance(triangle(), (1, 1, -1)) == Fraction(2, 3)


def test_single_xor_satisfied():
    # x1 xor x2 xor x3 = 1 with bits (1, 0, 0): x1 = -1
    inst = Instance(3, (((1, 2, 3), 1),), kxor(3))
    assert eval_instance(inst, (-1, 1, 1)) == 1


def test_opt_examples():
    assert opt_brute(triangle())[0] == Fraction(2, 3)
    assert opt_brute(odd_cycle_xor(3))[0] == Fraction(2, 3)
    contra = Instance(3, (((1, 2, 3), 0), ((1, 2, 3), 1)), kxor(3))
    assert opt_brute(contra)[0] == Fraction(1, 2)


def test_edge_spectrum():
    s = encode_polynomial(maxcut_graph(2, [(1, 2)])).spectrum
    assert dict(s.items()) == {0: Fraction(1, 2), 3: Fraction(-1, 2)}


def test_triangle_spectrum():
    s = encode_polynomial(triangle()).spectrum
    assert dict(s.items()) == {0: Fraction(1, 2), 3: Fraction(-1, 6), 5: Fraction(-1, 6), 6: Fraction(-1, 6)}


def test_clause_spectrum():
    s = encode_polynomial(Instance(3, (((1, 2, 3), 0),), ksat(3))).spectrum
    for m in range(8):
        k = bin(m).count("1")
        want = Fraction(7, 8) if m == 0 else (Fraction(1, 8) if k % 2 else Fraction(-1, 8))
        assert s[m] == want


def instances():
    return st.builds(
        lambda kind, n, m, seed: (random_kxor if kind else random_ksat)(n, m, 3 if n >= 3 else 2, seed),
        st.booleans(),
        st.integers(3, 6),
        st.integers(1, 8),
        st.integers(0, 10 ** 6),
    )


@settings(max_examples=40, deadline=None)
@given(instances())
def test_polynomial_matches_evaluation(inst):
    f = encode_polynomial(inst)
    assert f.degree() <= inst.predicate.arity
    for x in itertools.product((1, -1), repeat=inst.n):
        assert f.values[point_index(x)] == eval_instance(inst, x)


@settings(max_examples=40, deadline=None)
@given(instances())
def test_opt_is_max_of_evaluations(inst):
    val, arg = opt_brute(inst)
    assert val == max(eval_instance(inst, x) for x in itertools.product((1, -1), repeat=inst.n))
    assert eval_instance(inst, arg) == val


@settings(max_examples=40, deadline=None)
@given(instances())
def test_emit_parse_round_trip(inst):
    assert parse(emit(inst)) == inst


def test_generators():
    assert generate("odd-cycle-xor", {"length": 3}) == odd_cycle_xor(3)
    assert generate("maxcut-graph", {"edges": [(1, 2), (2, 3), (1, 3)]}) == triangle()
    inst = generate("random-kxor", {"n": 6, "m": 12, "k": 3}, 1)
    assert parse(emit(inst)) == inst and inst == generate("random-kxor", {"n": 6, "m": 12, "k": 3}, 1)


def test_parse_errors_carry_line():
    with pytest.raises(ParseError) as err:
        parse("csp maxcut 2 3 1\n1 9\n")
    assert "line 2" in str(err.value)
    with pytest.raises(InputError):
        generate("nope", {})
