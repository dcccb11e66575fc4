"""
Net constructions on semidirect products N⋊H: product nets, the twist operator
T_t, marginalization and the inequalities linking them.

All G-integrals use the Haar weight σ(h)·λ_N(n)·λ_H(h) of the semidirect group.
"""
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from components.action import TransformationGroup, act_left
from components.foelner import evaluate_stages, summarize
from components.measure import (
    FinSignedFunction,
    convolve,
    l1_distance,
    l1_norm,
    pushforward,
    scale,
    subtract,
    total_mass,
)
from components.groups import SemidirectGroup
from models.data_models import (
    DEFAULT_POINT,
    BoundCheck,
    DefectRow,
    DeficitReport,
    NetFunction,
    ProductNetFunction,
)
from utils.errors import DomainError
from utils.logging_utils import logger


def _factor_rows(net: NetFunction) -> List[Tuple[Any, FinSignedFunction]]:
    rows = [(x, net.section(x)) for x in net.points]
    if net.default is not None:
        rows.append((DEFAULT_POINT, net.default))
    return rows


def product_net(f: NetFunction, g: NetFunction, G: SemidirectGroup,
                stage: Optional[Tuple[Any, Any]] = None) -> ProductNetFunction:
    """e^{(x,y)}(n,h) = f^x(n)·g^y(h)·σ(h)⁻¹, with default sections carried to default slices"""
    slices = {}
    for x, fx in _factor_rows(f):
        for y, gy in _factor_rows(g):
            slices[(x, y)] = FinSignedFunction(
                {(n, h): a * b / G.sigma(h) for n, a in fx.items() for h, b in gy.items()}
            )
    return ProductNetFunction(
        stage if stage is not None else (f.stage, g.stage),
        slices,
        factors=(f, g),
        rows=frozenset(f.points),
        cols=frozenset(g.points),
    )


def g_mass(E: ProductNetFunction, x: Any, y: Any, G: SemidirectGroup) -> Fraction:
    """∫_G e^{(x,y)} dλ_G"""
    return total_mass(E.slice(x, y), G.haar_weight)


def twist(f: FinSignedFunction, t: Any, G: SemidirectGroup) -> FinSignedFunction:
    """T_t f(n) = f(τ_{t⁻¹}(n))·σ(t): support moves by τ_t"""
    tau_t = G.tau(G.acting.check(t))
    return scale(pushforward(f, tau_t), G.sigma(t))


def _n_weight(G: SemidirectGroup):
    return G.normal.haar_weight


def twist_norm_defect(f: FinSignedFunction, t: Any, G: SemidirectGroup) -> Fraction:
    """‖T_t f − f‖ in L¹(N)"""
    return l1_distance(twist(f, t, G), f, _n_weight(G))


def twist_defect(net: Sequence[NetFunction], K_H: Iterable[Any], K_X: Iterable[Any],
                 G: SemidirectGroup, schedule: Sequence[Fraction] = (),
                 workers: Optional[int] = None) -> DeficitReport:
    """Per-stage max over (x, t) of ‖T_t f^x − f^x‖"""
    K_H, K_X = tuple(K_H), tuple(K_X)

    def rows_for(f: NetFunction) -> List[DefectRow]:
        return [
            DefectRow(
                stage=f.stage,
                point=str(x),
                element=G.acting.format_element(t),
                values={"twist": twist_norm_defect(f.section(x), t, G)},
            )
            for x in K_X
            for t in K_H
        ]

    per_stage = evaluate_stages(rows_for, list(net), workers)
    report = summarize("twist", ("twist",), per_stage, [f.stage for f in net], schedule)
    logger.info(f"SUITE twist: {len(net)} stages, trend {report.trend}, verdict {report.verdict}")
    return report


def twist_isometry_defects(f: FinSignedFunction, g: FinSignedFunction, t: Any,
                           G: SemidirectGroup) -> Tuple[Fraction, Fraction]:
    """(|‖T_t f‖ − ‖f‖|, ‖T_t(f*g) − T_t f * T_t g‖), both 0 when σ ≡ 1"""
    weight = _n_weight(G)
    norm_gap = abs(l1_norm(twist(f, t, G), weight) - l1_norm(f, weight))
    left = twist(convolve(G.normal, f, g), t, G)
    right = convolve(G.normal, twist(f, t, G), twist(g, t, G))
    return norm_gap, l1_distance(left, right, weight)


def full_defect(E: ProductNetFunction, r: Tuple[Any, Any], point: Tuple[Any, Any],
                G: SemidirectGroup, T: TransformationGroup) -> Fraction:
    """∫_G |e^{r·(x,y)}(r*a) − e^{(x,y)}(a)| dλ_G(a)"""
    x, y = point
    moved_point = act_left(T, r, (x, y))
    r_inv = G.inverse(r)
    # a ↦ e^{r·(x,y)}(r*a) is the pushforward of that slice by b ↦ r⁻¹b
    shifted = pushforward(E.slice(*moved_point), lambda b: G.multiply(r_inv, b))
    return l1_distance(shifted, E.slice(x, y), G.haar_weight)


def three_term_bound(E: ProductNetFunction, f: NetFunction, g: NetFunction, r: Tuple[Any, Any],
                     point: Tuple[Any, Any], G: SemidirectGroup, T: TransformationGroup) -> BoundCheck:
    """lhs = full G-translation defect of e at r = (s,t); rhs = the three-term split

    term1 = ‖l_{s⁻¹}(σ(t)·T_{t⁻¹}f^x − f^{sx})‖·c‖g^{ty}‖
    term2 = Σ_n |f^{sx}(sn) − f^x(n)|·c‖g^{ty}‖
    term3 = ‖f^x‖·Σ_h |c·g^{ty}(th) − g^y(h)|
    with c = σ(t)⁻¹ and sx = x since N fixes X.
    """
    if E.factors is None or E.factors[0] is not f or E.factors[1] is not g:
        raise DomainError("product net was not built from the given factors")
    s, t = G.check(r)
    x, y = point
    sx = x
    _, ty = act_left(T, r, (x, y))
    c = 1 / G.sigma(t)
    weight_n = _n_weight(G)
    weight_h = G.acting.haar_weight

    fx, fsx = f.section(x), f.section(sx)
    g_ty, g_y = g.section(ty), g.section(y)
    g_ty_norm = c * l1_norm(g_ty, weight_h)

    # l_{s⁻¹} is an isometry, so term1 is ‖σ(t)·T_{t⁻¹}f^x − f^{sx}‖
    t_inv = G.acting.inverse(t)
    untwisted = scale(twist(fx, t_inv, G), G.sigma(t))
    term1 = l1_distance(untwisted, fsx, weight_n) * g_ty_norm
    shifted_f = pushforward(fsx, lambda m: G.normal.multiply(G.normal.inverse(s), m))
    term2 = l1_distance(shifted_f, fx, weight_n) * g_ty_norm
    shifted_g = scale(pushforward(g_ty, lambda k: G.acting.multiply(t_inv, k)), c)
    term3 = l1_norm(fx, weight_n) * l1_distance(shifted_g, g_y, weight_h)

    lhs = full_defect(E, r, point, G, T)
    check = BoundCheck(lhs, term1 + term2 + term3, {"term1": term1, "term2": term2, "term3": term3})
    if not check.holds:
        logger.warning(f"BOUND three-term violated at r={r!r}, point={point!r}: {lhs} > {check.rhs}")
    return check


def marginalize(E: ProductNetFunction, G: SemidirectGroup, y: Any, stage: Any = None) -> NetFunction:
    """f^x(n) = Σ_h E^{(x,y)}(n,h)·σ(h)·λ_H(h) on the designated y-slice"""

    def collapse(section: FinSignedFunction) -> FinSignedFunction:
        row: Dict[Any, Fraction] = {}
        for (n, h), v in section.items():
            row[n] = row.get(n, Fraction(0)) + v * G.sigma(h) * G.acting.haar_weight(h)
        return FinSignedFunction(row)

    xs = set(E.rows) | {x for x, _ in E.slices if x is not DEFAULT_POINT}
    values = {x: collapse(E.slice(x, y)) for x in sorted(xs, key=repr)}
    default_key = (DEFAULT_POINT, y if y in E.cols else DEFAULT_POINT)
    default = collapse(E.slices[default_key]) if default_key in E.slices else None
    return NetFunction(E.stage if stage is None else stage, values, default=default)


def _marginal_section(E: ProductNetFunction, G: SemidirectGroup, x: Any, y: Any) -> FinSignedFunction:
    return marginalize(E, G, y).section(x)


def marginal_defect_bound(E: ProductNetFunction, s: Any, point: Tuple[Any, Any],
                          G: SemidirectGroup, T: TransformationGroup) -> BoundCheck:
    """Σ_n |marginal^{s·x}(sn) − marginal^x(n)| ≤ full defect at (s, e_H)"""
    G.normal.check(s)
    x, y = point
    r = (s, G.acting.identity)
    sx, _ = act_left(T, r, (x, y))
    s_inv = G.normal.inverse(s)
    moved = pushforward(_marginal_section(E, G, sx, y), lambda m: G.normal.multiply(s_inv, m))
    lhs = l1_distance(moved, _marginal_section(E, G, x, y), _n_weight(G))
    return BoundCheck(lhs, full_defect(E, r, point, G, T))


def twist_from_full_defect(E: ProductNetFunction, t: Any, point: Tuple[Any, Any],
                           G: SemidirectGroup, T: TransformationGroup) -> BoundCheck:
    """‖T_t f_[y]^x − f_[y]^x‖ ≤ full defect at (e_N, t⁻¹) + ‖T_t(f_[y]^x − f_[t⁻¹y]^x)‖

    f_[y] is the marginal on the y-slice. The second term vanishes when t⁻¹·y = y.
    """
    x, y = point
    t_inv = G.acting.inverse(t)
    r = (G.normal.identity, t_inv)
    _, y_moved = act_left(T, r, (x, y))
    f_y = _marginal_section(E, G, x, y)
    f_moved = _marginal_section(E, G, x, y_moved)
    lhs = twist_norm_defect(f_y, t, G)
    displayed = full_defect(E, r, point, G, T)
    drift = l1_norm(twist(subtract(f_y, f_moved), t, G), _n_weight(G))
    return BoundCheck(lhs, displayed + drift, {"displayed": displayed, "drift": drift})


def twist_from_product_bound(f: NetFunction, g: NetFunction, t: Any, point: Tuple[Any, Any],
                             G: SemidirectGroup, T: TransformationGroup) -> BoundCheck:
    """‖T_t f^x − f^x‖ ≤ ‖T_t f^x‖·Σ_h |g^y(h) − g^{ty}(th)| + e-defect at (e_N, t)

    Needs σ ≡ 1 and ∫ g^y = 1.
    """
    if not G.sigma.is_unit:
        raise DomainError("the product-to-twist bound is stated for unit modular weight")
    x, y = point
    g_y = g.section(y)
    if any(v < 0 for v in g_y.values()) or total_mass(g_y, G.acting.haar_weight) != 1:
        raise DomainError(f"g^y must be a normalized nonnegative section at y={y!r}")
    r = (G.normal.identity, G.acting.check(t))
    _, ty = act_left(T, r, (x, y))
    E = product_net(f, g, G)
    fx = f.section(x)
    t_inv = G.acting.inverse(t)
    shifted_g = pushforward(g.section(ty), lambda k: G.acting.multiply(t_inv, k))
    g_term = l1_norm(twist(fx, t, G), _n_weight(G)) * l1_distance(g_y, shifted_g, G.acting.haar_weight)
    e_term = full_defect(E, r, point, G, T)
    lhs = twist_norm_defect(fx, t, G)
    return BoundCheck(lhs, g_term + e_term, {"g_term": g_term, "e_term": e_term})


def tau_compat_deficit(A: Iterable[Any], B: Iterable[Any], t: Any, G: SemidirectGroup,
                       T: Optional[TransformationGroup] = None) -> Fraction:
    """μ×λ_N((A × τ_{t⁻¹}B) △ (A × B)) / μ×λ_N(A × B)"""
    A, B = frozenset(A), frozenset(B)
    if not A or not B:
        raise DomainError("tau compatibility needs nonempty A and B")
    mu = T.space.weight if T is not None else (lambda x: Fraction(1))
    weight_n = _n_weight(G)
    tau_inv = G.tau(G.acting.inverse(G.acting.check(t)))
    moved = frozenset(tau_inv(n) for n in B)
    mass_A = sum((mu(x) for x in A), Fraction(0))
    numerator = mass_A * G.normal.weight_of(moved ^ B)
    return numerator / (mass_A * G.normal.weight_of(B))


def corollary_bridge(A: Iterable[Any], B: Iterable[Any], t: Any, G: SemidirectGroup,
                     T: Optional[TransformationGroup] = None) -> BoundCheck:
    """‖T_t f^x − f^x‖ ≤ tau_compat_deficit for the indicator section χ_B/λ(B)"""
    B = frozenset(B)
    if not B:
        raise DomainError("tau compatibility needs a nonempty B")
    section = FinSignedFunction({n: 1 / G.normal.weight_of(B) for n in B})
    return BoundCheck(twist_norm_defect(section, t, G), tau_compat_deficit(A, B, t, G, T))
