from fractions import Fraction

import pytest

import components.inner as inner_module
from components.action import (
    POINT,
    Space,
    boundary_action,
    boundary_point,
    carrier_action,
    trivial_action,
)
from components.foelner import FoelnerPair
from components.groups import FreeAbelianGroup, ball
from components.inner import (
    boundary_mean,
    boundary_mean_defect,
    boundary_mean_net,
    group_inner_defect,
    inner_cell,
    inner_fn_defect,
    inner_foelner_deficit,
    inner_indicator_bound,
    inner_mean_defect,
    kernel_check,
    l2_inner_defect,
    lift_group_inner_mean,
    mean_from_density,
    smooth_mean,
    smoothing_bound,
    sqrt_net,
    verify_boundary_means,
    verify_inner,
)
from components.measure import FinSignedFunction, point_mass, uniform
from models.data_models import BoundCheck, MeanNet, NetFunction, Window
from tests.conftest import point_action, random_density
from utils.errors import ConfigurationError, DomainError


def test_inner_defect_vanishes_on_abelian_groups(z, z2, rng):
    T = point_action(z)
    K = Window((POINT,), ball(z, radius=2))
    for _ in range(20):
        f = NetFunction(1, default=random_density(rng, z))
        assert inner_fn_defect(f, K, T) == (0, 0)
    T = carrier_action(z2)
    K = Window(ball(z2, radius=1), ball(z2, radius=1))
    f = NetFunction(1, default=random_density(rng, z2))
    assert inner_fn_defect(f, K, T)[1] == 0


def test_free_group_ball_is_not_inner_invariant(f2):
    f = NetFunction(1, default=uniform(ball(f2, radius=1)))
    T = point_action(f2)
    assert inner_cell(f, POINT, (1,), T) == Fraction(4, 5)
    assert group_inner_defect(f.section(POINT), (1,), f2) == Fraction(4, 5)


def test_point_space_reduces_to_group_inner_defect(f2, rng):
    T = point_action(f2)
    for _ in range(50):
        f = NetFunction(1, default=random_density(rng, f2))
        s = f2.random_element(rng, 2)
        assert inner_cell(f, POINT, s, T) == group_inner_defect(f.section(POINT), s, f2)



def test_central_bump_drops_out(f2):
    T = point_action(f2)
    m = MeanNet(1, {POINT: uniform(ball(f2, radius=1))})
    check = smoothing_bound(m, point_mass(()), POINT, (1,), T)
    assert check.terms["bump"] == 0
    assert check.lhs == check.terms["mean"] == Fraction(4, 5)


def test_smooth_mean_rejects_unnormalized_bump(f2):
    m = MeanNet(1, {POINT: point_mass(())})
    with pytest.raises(DomainError):
        smooth_mean(m, FinSignedFunction({(): 2}), f2)


def test_mean_from_density(f2):
    f = NetFunction(1, {POINT: uniform([(1,), (-1,)])})
    m = mean_from_density(f, f2)
    assert m.at(POINT) == uniform([(1,), (-1,)])
    with pytest.raises(DomainError):
        mean_from_density(NetFunction(1, {POINT: FinSignedFunction({(): 2})}), f2)


def test_default_density_becomes_default_mean(f2):
    f = NetFunction(1, {(1,): point_mass((1,))}, default=uniform([(2,), (-2,)]))
    m = mean_from_density(f, f2)
    assert m.at((1,)) == point_mass((1,))
    assert m.at((1, 2)) == uniform([(2,), (-2,)])
    assert m.at("anywhere") == uniform([(2,), (-2,)])
    with pytest.raises(DomainError):
        mean_from_density(NetFunction(1, default=FinSignedFunction({(): 2})), f2)


def test_smooth_mean_keeps_default(f2):
    m = MeanNet(1, default=point_mass((1,)))
    f = smooth_mean(m, point_mass((2,)), f2)
    assert f.section(()) == point_mass((1, 2))
    assert f.section((2, 2)) == point_mass((1, 2))


def test_mean_net_without_default_rejects_unknown_points():
    m = MeanNet(1, {POINT: point_mass(())})
    with pytest.raises(DomainError):
        m.at("elsewhere")


def test_lifted_group_means_are_x_constant(f2):
    nets = lift_group_inner_mean([uniform([(1,), (-1,)]), point_mass(())], Space.boundary(2, 3), limit=4)
    assert [m.stage for m in nets] == [1, 2]
    assert len(nets[0].points) == 4
    assert all(nets[1].at(x) == point_mass(()) for x in nets[1].points)


def test_inner_mean_defect_of_lifted_means(f2):
    T = point_action(f2)
    m = lift_group_inner_mean([uniform(ball(f2, radius=1))], T.space)[0]
    assert inner_mean_defect(m, Window((POINT,), ((1,),)), T) == Fraction(4, 5)


def test_inner_suites_need_a_right_action():
    T = boundary_action(2, 4)
    m = boundary_mean_net(T.space, [(1, 1, 1, 1)], 2)
    with pytest.raises(ConfigurationError):
        inner_mean_defect(m, Window(((1, 1, 1, 1),), ((1,),)), T)


def test_boundary_mean_tightness():
    T = boundary_action(2, 8)
    a_inf = boundary_point(T.space, (1,))
    check = boundary_mean_defect(T, a_inf, (1,), 2)
    assert check.lhs == 1 == check.rhs
    for n in range(1, 8):
        assert boundary_mean_defect(T, a_inf, (-1,), n).lhs == Fraction(2, n)


def test_boundary_mean_needs_valid_length():
    space = Space.boundary(2, 4)
    with pytest.raises(DomainError):
        boundary_mean(space, (1, 1, 1, 1), 5)
    with pytest.raises(DomainError):
        boundary_mean(Space.point(), POINT, 1)
    assert boundary_mean(space, (1, 2, 1, 2), 2) == uniform([(1,), (1, 2)])


def test_verify_boundary_means():
    T = boundary_action(2, 16)
    K = Window((boundary_point(T.space, (1, 2)),), ball(T.group, radius=1))
    report = verify_boundary_means(T, K, [2, 4, 8], [Fraction(1)])
    assert report.suite == "boundary"
    assert report.series("bound") == [1, Fraction(1, 2), Fraction(1, 4)]
    assert all(row.values["inv"] <= row.values["bound"] for row in report.rows)
    assert report.verdict == "certified"


def test_broken_length_bound_fails_boundary_report(monkeypatch):
    T = boundary_action(2, 16)
    K = Window((boundary_point(T.space, (1, 2)),), ((1,),))
    monkeypatch.setattr(inner_module, "boundary_mean_defect", lambda *args: BoundCheck(Fraction(1), Fraction(1, 2)))
    report = verify_boundary_means(T, K, [2, 4], [Fraction(2)])
    assert report.flags == ["stage 2: bound-violated", "stage 4: bound-violated"]
    assert report.verdict == "failed"


def test_verify_inner_on_z(z):
    net = [NetFunction(n, default=uniform(range(-n, n + 1))) for n in range(1, 4)]
    report = verify_inner(net, Window((POINT,), (1, -1)), [Fraction(1, 10)], point_action(z))
    assert report.series("inv") == [0, 0, 0]
    assert report.verdict == "certified"
    threaded = verify_inner(net, Window((POINT,), (1, -1)), [Fraction(1, 10)], point_action(z), workers=3)
    assert threaded.rows == report.rows


def test_inner_foelner_deficit(f2):
    T = point_action(f2)
    W = FoelnerPair.product([POINT], ball(f2, radius=1), T)
    assert inner_foelner_deficit(W, (1,), T) == Fraction(4, 5)
    check = inner_indicator_bound(W, POINT, (1,), T)
    assert check.holds and check.lhs == check.rhs


def test_sqrt_net_keeps_default():
    f = NetFunction(1, {POINT: FinSignedFunction({0: Fraction(1, 4)})}, default=FinSignedFunction({1: 1}))
    xi = sqrt_net(f)
    assert xi(POINT, 0) == pytest.approx(0.5)
    assert xi("elsewhere", 1) == pytest.approx(1.0)
    assert xi("elsewhere", 0) == 0.0


def test_l2_defect_on_abelian_group(z):
    xi = sqrt_net(NetFunction(1, default=uniform(range(-2, 3))))
    norm2, inv2 = l2_inner_defect(xi, Window((POINT,), (1, -1)), point_action(z))
    assert norm2 == pytest.approx(0.0, abs=1e-12)
    assert inv2 == 0.0



def test_kernel_on_point_mass(f2):
    xi = sqrt_net(NetFunction(1, default=point_mass(())))
    T = point_action(f2)
    verdict = kernel_check(xi, Window((POINT,), ((),)), 0.1, [(POINT, ()), (POINT, (1,))], T)
    assert verdict.pointwise_diagonal == 0.0
    assert verdict.integrated_diagonal == 0.0
    assert verdict.min_eigenvalue == pytest.approx(0.0, abs=1e-12)
    assert verdict.psd and verdict.passed



def test_kernel_rejects_unknown_diagonal_mode(f2):
    xi = sqrt_net(NetFunction(1, default=point_mass(())))
    with pytest.raises(DomainError):
        kernel_check(xi, Window((POINT,), ((),)), 0.1, [], point_action(f2), diagonal="sup")


def test_weighted_finite_space_keeps_inner_exact(f2):
    T = trivial_action(Space.finite(["u", "v"], {"v": 2}), FreeAbelianGroup(1))
    f = NetFunction(1, {"u": uniform([0, 1]), "v": uniform([0, 1])})
    assert inner_fn_defect(f, Window(("u", "v"), (1,)), T) == (0, 0)
