from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from components.groups import FreeGroup, ball
from components.measure import (
    FinSignedFunction,
    ProbMeasure,
    add,
    commutator_defect,
    convolve,
    from_json,
    l1_distance,
    l1_norm,
    normalize,
    point_mass,
    push_left,
    push_right,
    pushforward,
    subtract,
    to_json,
    total_mass,
    translate_left,
    translate_right,
    uniform,
)
from utils.errors import DomainError

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)
functions = st.dictionaries(st.integers(-4, 4), fractions, max_size=6)


def test_zero_entries_are_dropped():
    f = FinSignedFunction({1: 0, 2: Fraction(1, 2)})
    assert len(f) == 1
    assert f.support == frozenset({2})
    assert f.get(1) == 0
    assert f == {2: Fraction(1, 2), 3: 0}


def test_probability_measures_sum_to_one():
    assert ProbMeasure({0: Fraction(1, 3), 1: Fraction(2, 3)})
    with pytest.raises(DomainError):
        ProbMeasure({0: Fraction(1, 3)})
    with pytest.raises(DomainError):
        ProbMeasure({0: 2, 1: -1})


def test_uniform_and_point_mass():
    assert uniform([1, 2, 3, 4]) == {p: Fraction(1, 4) for p in (1, 2, 3, 4)}
    assert point_mass("x") == {"x": 1}
    with pytest.raises(DomainError):
        uniform([])


def test_normalize():
    assert normalize({0: 1, 1: 3}) == {0: Fraction(1, 4), 1: Fraction(3, 4)}
    weight = lambda p: Fraction(2) if p else Fraction(1)
    # weighted: values times weights over the weighted mass
    assert normalize({0: 1, 1: 1}, weight) == {0: Fraction(1, 3), 1: Fraction(2, 3)}
    with pytest.raises(DomainError):
        normalize({})
    with pytest.raises(DomainError):
        normalize({0: 1, 1: -1})


def test_l1_distance_of_shifted_uniforms():
    assert l1_distance(uniform([0, 1]), uniform([1, 2])) == 1
    assert l1_distance({}, {5: Fraction(-3, 2)}) == Fraction(3, 2)


@given(functions, functions, functions)
def test_l1_distance_is_a_metric(f, g, h):
    assert l1_distance(f, g) == l1_distance(g, f)
    assert l1_distance(f, f) == 0
    assert l1_distance(f, h) <= l1_distance(f, g) + l1_distance(g, h)
    assert l1_distance(f, g) == l1_norm(subtract(f, g))


@given(functions, functions)
def test_total_mass_is_additive(f, g):
    assert total_mass(add(f, g)) == total_mass(f) + total_mass(g)


@given(functions, st.integers(-3, 3))
def test_translations_of_z_preserve_norm(f, s):
    from components.groups import FreeAbelianGroup

    Z = FreeAbelianGroup(1)
    assert l1_norm(translate_left(Z, s, f)) == l1_norm(f)
    assert translate_left(Z, s, f) == translate_right(Z, f, -s)


def test_translation_conventions(f2):
    a, b = (1,), (2,)
    f = point_mass(b)
    assert translate_left(f2, a, f) == point_mass((1, 2))
    # r_s f(t) = f(ts) moves the support by t ↦ ts⁻¹
    assert translate_right(f2, f, a) == point_mass((2, -1))
    assert push_left(f2, a, f) == point_mass((1, 2))
    assert push_right(f2, f, a) == point_mass((2, 1))


def test_pushforward_accumulates_and_keeps_probability():
    mu = uniform([1, 2, 3, 4])
    image = pushforward(mu, lambda p: p % 2)
    assert isinstance(image, ProbMeasure)
    assert image == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_convolution_of_point_masses(f2):
    assert convolve(f2, point_mass((1,)), point_mass((2,))) == point_mass((1, 2))
    product = convolve(f2, uniform(ball(f2, radius=1)), uniform(ball(f2, radius=1)))
    assert isinstance(product, ProbMeasure)


def test_commutator_defect_on_the_free_group():
    F = FreeGroup(2)
    f = uniform(ball(F, radius=1))
    assert commutator_defect(F, (1,), f) == Fraction(4, 5)
    assert commutator_defect(F, (1,), uniform([(1,), (-1,)])) == 0


def test_measure_rows(f2):
    f = FinSignedFunction({(1,): Fraction(1, 3), (): Fraction(2, 3)})
    rows = to_json(f, f2.element_to_json)
    assert rows == [["a", 1, 3], ["e", 2, 3]]
    assert from_json(rows, f2.element_from_json) == f
    with pytest.raises(DomainError):
        from_json([["a", 1, 0]], f2.element_from_json)
    with pytest.raises(DomainError):
        from_json([["a", 1]], str)
