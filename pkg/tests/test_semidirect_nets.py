import random
from fractions import Fraction

import pytest

from components.action import POINT, act_left
from components.groups import (
    FreeAbelianGroup,
    ModularWeight,
    semidirect,
    sign_flip_tau,
)
from components.measure import FinSignedFunction, point_mass, uniform
from components.semidirect_nets import (
    corollary_bridge,
    full_defect,
    g_mass,
    marginal_defect_bound,
    marginalize,
    product_net,
    tau_compat_deficit,
    three_term_bound,
    twist,
    twist_defect,
    twist_from_full_defect,
    twist_from_product_bound,
    twist_isometry_defects,
    twist_norm_defect,
)
from models.data_models import NetFunction
from tests.conftest import random_density, random_factor, randomized_bound_inputs, rotation_setup
from utils.errors import DomainError


def sign_flip_with_weight(base):
    Z = FreeAbelianGroup(1)
    return semidirect(Z, FreeAbelianGroup(1), sign_flip_tau(Z, FreeAbelianGroup(1)), ModularWeight.exponential(base))


def test_twist_on_sign_flip(sign_flip):
    f = FinSignedFunction({1: Fraction(1, 2), 2: Fraction(1, 2)})
    assert twist(f, 1, sign_flip) == {-1: Fraction(1, 2), -2: Fraction(1, 2)}
    assert twist(f, 2, sign_flip) == f
    assert twist_norm_defect(f, 1, sign_flip) == 2
    assert twist_norm_defect(uniform(range(-3, 4)), 1, sign_flip) == 0


def test_twist_on_lamplighter_shifts_lamps(lamps):
    flip = ((0, 1),)
    assert twist(FinSignedFunction({flip: 1}), 2, lamps) == {((2, 1),): 1}


def test_twist_isometries_for_unit_weight(sign_flip, rng):
    for _ in range(20):
        f = random_density(rng, sign_flip.normal)
        g = random_density(rng, sign_flip.normal)
        assert twist_isometry_defects(f, g, rng.choice([1, -1, 2]), sign_flip) == (0, 0)


def test_twist_scales_norm_by_modular_weight():
    G = sign_flip_with_weight(2)
    f = uniform([0, 1])
    norm_gap, _ = twist_isometry_defects(f, f, 1, G)
    assert norm_gap == 1


def test_corollary_bridge_on_sign_flip(sign_flip):
    check = corollary_bridge([POINT], range(10), 1, sign_flip)
    assert check.lhs == Fraction(9, 5)
    assert check.rhs == Fraction(9, 5)
    assert check.holds
    assert tau_compat_deficit([POINT], range(-4, 5), 1, sign_flip) == 0


def test_tau_compat_needs_nonempty_sets(sign_flip):
    with pytest.raises(DomainError):
        tau_compat_deficit([], [0], 1, sign_flip)
    with pytest.raises(DomainError):
        corollary_bridge([POINT], [], 1, sign_flip)


@pytest.mark.parametrize("base", [1, 2, Fraction(1, 3)])
def test_product_net_is_normalized(base, rng):
    G = sign_flip_with_weight(base)
    points = (0, 1, 2)
    f = random_factor(rng, G.normal, points)
    g = random_factor(rng, G.acting, points)
    E = product_net(f, g, G, stage=1)
    for x in points:
        for y in points:
            assert g_mass(E, x, y, G) == 1
    marginal = marginalize(E, G, 1)
    for x in points:
        assert marginal.section(x) == f.section(x)


def test_product_net_carries_default_sections(sign_flip):
    f = NetFunction(0, default=point_mass(0))
    g = NetFunction(0, default=point_mass(0))
    E = product_net(f, g, sign_flip)
    for x, y in [(0, 0), (3, -2), ("far", 7)]:
        assert g_mass(E, x, y, sign_flip) == 1
        assert E.slice(x, y) == FinSignedFunction({(0, 0): 1})
    marginal = marginalize(E, sign_flip, 5)
    assert marginal.section(0) == point_mass(0)
    assert marginal.section(-4) == point_mass(0)


def test_product_net_mixes_explicit_and_default_sections(sign_flip):
    f = NetFunction(1, {1: point_mass(2)}, default=point_mass(0))
    g = NetFunction(1, {0: point_mass(1)}, default=point_mass(0))
    E = product_net(f, g, sign_flip)
    assert E.slice(1, 0) == FinSignedFunction({(2, 1): 1})
    assert E.slice(1, 9) == FinSignedFunction({(2, 0): 1})
    assert E.slice(9, 0) == FinSignedFunction({(0, 1): 1})
    assert E.slice(9, 9) == FinSignedFunction({(0, 0): 1})
    for y in (0, 9):
        marginal = marginalize(E, sign_flip, y)
        assert marginal.section(1) == f.section(1)
        assert marginal.section(9) == f.section(9)


def test_product_net_keeps_empty_explicit_sections(sign_flip):
    f = NetFunction(1, {1: FinSignedFunction()}, default=point_mass(0))
    g = NetFunction(1, default=point_mass(0))
    E = product_net(f, g, sign_flip)
    assert g_mass(E, 1, 0, sign_flip) == 0
    assert g_mass(E, 2, 0, sign_flip) == 1


def test_full_defect_vanishes_for_invariant_factors(sign_flip):
    T = rotation_setup(sign_flip)
    points = (0, 1, 2)
    f = NetFunction(1, {x: FinSignedFunction({0: 1}) for x in points})
    g = NetFunction(1, {x: FinSignedFunction({0: 1}) for x in points})
    E = product_net(f, g, sign_flip)
    assert full_defect(E, (0, 0), (0, 0), sign_flip, T) == 0
    assert full_defect(E, (1, 0), (0, 0), sign_flip, T) == 2


def test_three_term_bound_with_modular_weight():
    G = sign_flip_with_weight(2)
    rng = random.Random(5)
    for T, f, g, E, r, point in randomized_bound_inputs(G, rng, 50):
        assert three_term_bound(E, f, g, r, point, G, T).holds
        assert marginal_defect_bound(E, r[0], point, G, T).holds
        assert twist_from_full_defect(E, r[1], point, G, T).holds


def test_three_term_bound_needs_matching_factors(sign_flip, rng):
    T = rotation_setup(sign_flip)
    points = (0, 1, 2)
    f = random_factor(rng, sign_flip.normal, points)
    g = random_factor(rng, sign_flip.acting, points)
    E = product_net(f, g, sign_flip)
    other = random_factor(rng, sign_flip.normal, points)
    with pytest.raises(DomainError):
        three_term_bound(E, other, g, (0, 1), (0, 0), sign_flip, T)


def test_twist_from_product_bound(sign_flip, rng):
    T = rotation_setup(sign_flip)
    points = (0, 1, 2)
    for _ in range(50):
        f = random_factor(rng, sign_flip.normal, points)
        g = random_factor(rng, sign_flip.acting, points)
        point = (rng.choice(points), rng.choice(points))
        assert twist_from_product_bound(f, g, rng.choice([1, -1, 2]), point, sign_flip, T).holds


def test_twist_from_product_bound_needs_unit_weight_and_normalized_g(sign_flip, rng):
    T = rotation_setup(sign_flip)
    points = (0, 1, 2)
    f = random_factor(rng, sign_flip.normal, points)
    loose = NetFunction(0, {x: FinSignedFunction({0: 2}) for x in points})
    with pytest.raises(DomainError):
        twist_from_product_bound(f, loose, 1, (0, 0), sign_flip, T)
    weighted = sign_flip_with_weight(2)
    with pytest.raises(DomainError):
        twist_from_product_bound(f, loose, 1, (0, 0), weighted, rotation_setup(weighted))


def test_twist_defect_of_symmetric_balls_is_zero(sign_flip):
    net = [NetFunction(n, {POINT: uniform(range(-n, n + 1))}) for n in range(1, 4)]
    report = twist_defect(net, [1, -1], [POINT], sign_flip, [Fraction(1, 10)])
    assert report.series("twist") == [0, 0, 0]
    assert report.verdict == "certified"


def test_product_action_moves_only_second_coordinate(sign_flip):
    T = rotation_setup(sign_flip)
    assert act_left(T, (7, 1), (2, 2)) == (2, 0)
