"""
Inner-amenability defects for mean nets and density nets, the smoothing
construction, boundary prefix means, the square-root (L²) picture and rank-one
positive-type kernels.

Floating point appears only in sqrt_net, l2_inner_defect, dual_sqrt_bounds and
kernel_check; everything else is exact.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from components.action import Space, TransformationGroup, act_left, act_right
from components.foelner import FAILED, FoelnerPair, evaluate_stages, indicator_net, region_mass, summarize
from components.groups import FreeGroup, Group
from components.measure import (
    FinSignedFunction,
    ProbMeasure,
    commutator_defect,
    convolve,
    l1_distance,
    normalize,
    push_left,
    push_right,
    total_mass,
    translate_left,
    translate_right,
    uniform,
)
from models.data_models import (
    BoundCheck,
    DefectRow,
    DeficitReport,
    MeanNet,
    NetFunction,
    SqrtNetFunction,
    Window,
)
from utils.config import Settings
from utils.errors import ConfigurationError, DomainError
from utils.logging_utils import logger


def _require_right(T: TransformationGroup):
    if not T.has_right_action:
        raise ConfigurationError(f"{T.label} has no right action; inner suites need both actions")


def _inner_mean_cell(m: MeanNet, x: Any, s: Any, T: TransformationGroup) -> Fraction:
    G = T.group
    s_inv = G.inverse(s)
    sx = act_left(T, s, x)
    xs = act_right(T, x, s)
    return l1_distance(push_right(G, m.at(sx), s_inv), push_left(G, s_inv, m.at(xs)))


def inner_mean_defect(m: MeanNet, K: Window, T: TransformationGroup) -> Fraction:
    """max over K of ‖m^{s·x}·s⁻¹ − s⁻¹·m^{x·s}‖₁"""
    _require_right(T)
    return max(_inner_mean_cell(m, x, s, T) for x, s in K.pairs())


def _inner_fn_cell(f: NetFunction, x: Any, s: Any, T: TransformationGroup) -> Fraction:
    G = T.group
    sx = act_left(T, s, x)
    xs = act_right(T, x, s)
    # t ↦ f^{sx}(s⁻¹t) is l_s f^{sx}; t ↦ f^{xs}(ts⁻¹) is r_{s⁻¹} f^{xs}
    left = translate_left(G, s, f.section(sx))
    right = translate_right(G, f.section(xs), G.inverse(s))
    return l1_distance(left, right, G.haar_weight)


def inner_fn_rows(f: NetFunction, K: Window, T: TransformationGroup) -> List[DefectRow]:
    _require_right(T)
    G = T.group
    rows = []
    for x in K.space_part:
        norm = abs(total_mass(f.section(x), G.haar_weight) - 1)
        for s in K.group_part:
            rows.append(
                DefectRow(
                    stage=f.stage,
                    point=T.space.format_point(x),
                    element=G.format_element(s),
                    values={"norm": norm, "inv": _inner_fn_cell(f, x, s, T)},
                )
            )
    return rows


def inner_fn_defect(f: NetFunction, K: Window, T: TransformationGroup) -> Tuple[Fraction, Fraction]:
    """(max_x |∫ f^x − 1|, max over K of Σ_t |f^{s·x}(s⁻¹t) − f^{x·s}(ts⁻¹)|)"""
    rows = inner_fn_rows(f, K, T)
    return max(r.values["norm"] for r in rows), max(r.values["inv"] for r in rows)


def verify_inner(net: Sequence[NetFunction], K: Window, schedule: Sequence[Fraction],
                 T: TransformationGroup, workers: Optional[int] = None) -> DeficitReport:
    per_stage = evaluate_stages(lambda f: inner_fn_rows(f, K, T), net, workers)
    report = summarize("inner", ("norm", "inv"), per_stage, [f.stage for f in net], schedule)
    logger.info(f"SUITE inner: {len(net)} stages, trend {report.trend}, verdict {report.verdict}")
    return report


def smooth_mean(m: MeanNet, bump: FinSignedFunction, G: Group) -> NetFunction:
    """f^x(s) = ∫ bump(t⁻¹s) dm^x(t), i.e. m^x * bump"""
    if any(v < 0 for v in bump.values()) or total_mass(bump, G.haar_weight) != 1:
        raise DomainError("smoothing bump must be nonnegative with mass 1")
    default = convolve(G, m.default, bump) if m.default is not None else None
    return NetFunction(m.stage, {x: convolve(G, m.at(x), bump) for x in m.points}, default=default)


def mean_from_density(f: NetFunction, G: Group) -> MeanNet:
    """m^x := f^x·λ for a normalized density net"""

    def as_measure(x: Any, section: FinSignedFunction) -> ProbMeasure:
        if total_mass(section, G.haar_weight) != 1:
            raise DomainError(f"density section at {x!r} is not normalized")
        return ProbMeasure({t: v * G.haar_weight(t) for t, v in section.items()})

    assignment = {x: as_measure(x, f.section(x)) for x in f.points}
    default = as_measure("default", f.default) if f.default is not None else None
    return MeanNet(f.stage, assignment, default=default)


def group_inner_defect(f: FinSignedFunction, s: Any, G: Group) -> Fraction:
    """‖δ_s*f − f*δ_s‖₁"""
    G.check(s)
    return commutator_defect(G, s, f)


def lift_group_inner_mean(net: Sequence[FinSignedFunction], space: Space,
                          limit: int = 16) -> List[MeanNet]:
    """x-constant mean nets m^x = f·λ over the first `limit` points of X"""
    points = space.enumerate(limit)
    return [
        MeanNet(stage, {x: normalize(f) for x in points}) for stage, f in enumerate(net, start=1)
    ]


def smoothing_bound(m: MeanNet, bump: FinSignedFunction, x: Any, s: Any,
                    T: TransformationGroup) -> BoundCheck:
    """inner fn defect of m*bump at (x,s) ≤ inner mean defect at (x,s) + ‖δ_s*b − b*δ_s‖

    The bump term is 0 for central bumps, which gives the bound without it.
    """
    _require_right(T)
    G = T.group
    smoothed = smooth_mean(m, bump, G)
    lhs = _inner_fn_cell(smoothed, x, s, T)
    mean_term = _inner_mean_cell(m, x, s, T)
    bump_term = commutator_defect(G, s, bump)
    return BoundCheck(lhs, mean_term + bump_term, {"mean": mean_term, "bump": bump_term})


def boundary_mean(space: Space, omega: Tuple[int, ...], n: int) -> ProbMeasure:
    """Uniform measure on the first n prefixes of ω"""
    if space.kind != "boundary":
        raise DomainError("boundary means need a boundary space")
    space.check(omega)
    if n < 1 or n > space.depth:
        raise DomainError(f"boundary mean needs 1 ≤ n ≤ depth {space.depth}, got {n}")
    return uniform(omega[:k] for k in range(1, n + 1))


def boundary_mean_net(space: Space, points: Iterable[Tuple[int, ...]], n: int, stage: Any = None) -> MeanNet:
    return MeanNet(n if stage is None else stage, {w: boundary_mean(space, w, n) for w in points})


def boundary_mean_defect(T: TransformationGroup, omega: Tuple[int, ...], s: Any, n: int) -> BoundCheck:
    """‖s·m_n^ω − m_n^{s·ω}‖₁ against 2|s|/n"""
    G = T.group
    if not isinstance(G, FreeGroup) or T.space.kind != "boundary":
        raise DomainError("boundary mean defects need the free-group boundary action")
    lhs = l1_distance(push_left(G, s, boundary_mean(T.space, omega, n)),
                      boundary_mean(T.space, act_left(T, s, omega), n))
    return BoundCheck(lhs, Fraction(2 * len(s), n))


def verify_boundary_means(T: TransformationGroup, K: Window, stages: Sequence[int],
                          schedule: Sequence[Fraction] = (), workers: Optional[int] = None) -> DeficitReport:
    """a.i.c.m. defects of the prefix-mean net over a boundary window; a broken length bound fails the report"""
    G = T.group

    def stage_rows(n: int) -> List[DefectRow]:
        rows = []
        for omega in K.space_part:
            for s in K.group_part:
                check = boundary_mean_defect(T, omega, s, n)
                rows.append(
                    DefectRow(
                        stage=n,
                        point=T.space.format_point(omega),
                        element=G.format_element(s),
                        values={"bound": check.rhs, "inv": check.lhs},
                        flags=[] if check.holds else ["bound-violated"],
                    )
                )
        return rows

    per_stage = evaluate_stages(stage_rows, list(stages), workers)
    report = summarize("boundary", ("bound", "inv"), per_stage, list(stages), schedule, certify=("inv",))
    violated = [flag for flag in report.flags if "bound-violated" in flag]
    if violated:
        report.verdict = FAILED
        logger.warning(f"SUITE boundary: {len(violated)} violated length bounds")
    logger.info(f"SUITE boundary: {len(stages)} stages, trend {report.trend}, verdict {report.verdict}")
    return report


def _root_section(section: FinSignedFunction) -> Dict[Any, float]:
    keys = list(section)
    roots = np.sqrt(np.array([float(section[t]) for t in keys], dtype=float))
    return dict(zip(keys, roots.tolist()))


def sqrt_net(f: NetFunction) -> SqrtNetFunction:
    """ξ^x(t) = √f^x(t)"""
    values = {x: _root_section(f.section(x)) for x in f.points}
    default = _root_section(f.default) if f.default is not None else {}
    return SqrtNetFunction(f.stage, values, default)


def _ordered_fsum(terms: Dict[Any, float]) -> float:
    return math.fsum(v for _, v in sorted(terms.items(), key=lambda kv: repr(kv[0])))


def _l2_pair(xi: SqrtNetFunction, x: Any, s: Any, T: TransformationGroup) -> Tuple[Dict[Any, float], Dict[Any, float]]:
    """t ↦ ξ(s·x, s⁻¹t) and t ↦ ξ(x·s, ts⁻¹) as dicts"""
    G = T.group
    sx = act_left(T, s, x)
    xs = act_right(T, x, s)
    left = {G.multiply(s, u): v for u, v in xi.section(sx).items()}
    right = {G.multiply(u, s): v for u, v in xi.section(xs).items()}
    return left, right


def _l2_cell(xi: SqrtNetFunction, x: Any, s: Any, T: TransformationGroup) -> float:
    left, right = _l2_pair(xi, x, s, T)
    weight = T.group.haar_weight
    return _ordered_fsum(
        {t: (left.get(t, 0.0) - right.get(t, 0.0)) ** 2 * float(weight(t)) for t in set(left) | set(right)}
    )


def _l2_norm_defect(xi: SqrtNetFunction, x: Any, T: TransformationGroup) -> float:
    weight = T.group.haar_weight
    return abs(_ordered_fsum({t: v * v * float(weight(t)) for t, v in xi.section(x).items()}) - 1.0)


def l2_rows(xi: SqrtNetFunction, K: Window, T: TransformationGroup) -> List[DefectRow]:
    _require_right(T)
    rows = []
    for x in K.space_part:
        norm2 = _l2_norm_defect(xi, x, T)
        for s in K.group_part:
            rows.append(
                DefectRow(
                    stage=xi.stage,
                    point=T.space.format_point(x),
                    element=T.group.format_element(s),
                    values={"norm2": norm2, "inv2": _l2_cell(xi, x, s, T)},
                )
            )
    return rows


def l2_inner_defect(xi: SqrtNetFunction, K: Window, T: TransformationGroup) -> Tuple[float, float]:
    """(max_x |Σ_t ξ(x,t)² − 1|, max over K of Σ_t (ξ(s·x, s⁻¹t) − ξ(x·s, ts⁻¹))²)"""
    rows = l2_rows(xi, K, T)
    return max(r.values["norm2"] for r in rows), max(r.values["inv2"] for r in rows)


def dual_sqrt_bounds(f: NetFunction, x: Any, s: Any, T: TransformationGroup,
                     tolerance: Optional[float] = None) -> Tuple[BoundCheck, BoundCheck]:
    """Both directions between the ℓ¹ defect of f and the L² defect of ξ = √f at (x, s)

    (a) Σ(ξ − ξ')² ≤ Σ|f − f'|
    (b) Σ|f − f'| ≤ √(Σ(ξ + ξ')²)·√(Σ(ξ − ξ')²)
    """
    _require_right(T)
    tolerance = Settings().float_tolerance if tolerance is None else tolerance
    xi = sqrt_net(f)
    l1 = float(_inner_fn_cell(f, x, s, T))
    l2 = _l2_cell(xi, x, s, T)
    left, right = _l2_pair(xi, x, s, T)
    weight = T.group.haar_weight
    plus = _ordered_fsum(
        {t: (left.get(t, 0.0) + right.get(t, 0.0)) ** 2 * float(weight(t)) for t in set(left) | set(right)}
    )
    lower = BoundCheck(l2, l1, tolerance=tolerance)
    upper = BoundCheck(l1, math.sqrt(plus) * math.sqrt(l2), {"plus": plus, "l2": l2}, tolerance=tolerance)
    return lower, upper


@dataclass(frozen=True)
class Kernel:
    """Rank-one kernel h(x,s,y,t) = ξ(x,s)·ξ(y,t)"""

    xi: SqrtNetFunction

    def __call__(self, x: Any, s: Any, y: Any, t: Any) -> float:
        return self.xi(x, s) * self.xi(y, t)

    def gram(self, sample: Sequence[Tuple[Any, Any]]) -> np.ndarray:
        vector = np.array([self.xi(x, t) for x, t in sample], dtype=float)
        return np.outer(vector, vector)


@dataclass
class KernelVerdict:
    """Outcome of a positive-type kernel check"""

    pointwise_diagonal: float
    integrated_diagonal: float
    min_eigenvalue: float
    epsilon: float
    diagonal: str
    sample: List[Tuple[Any, Any]] = field(default_factory=list)
    finite_support: bool = True
    tolerance: float = 1e-9

    @property
    def diagonal_defect(self) -> float:
        return self.pointwise_diagonal if self.diagonal == "pointwise" else self.integrated_diagonal

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -self.tolerance

    @property
    def passed(self) -> bool:
        return self.psd and self.diagonal_defect <= self.epsilon + self.tolerance


def kernel_check(xi: SqrtNetFunction, K: Window, epsilon: float, sample: Sequence[Tuple[Any, Any]],
                 T: TransformationGroup, diagonal: str = "pointwise",
                 tolerance: Optional[float] = None) -> KernelVerdict:
    """Diagonal proximity on K and positive semidefiniteness of the Gram matrix on the sample"""
    if diagonal not in ("pointwise", "integrated"):
        raise DomainError(f"diagonal mode must be pointwise or integrated, got {diagonal!r}")
    tolerance = Settings().float_tolerance if tolerance is None else tolerance
    pointwise = max(abs(xi(x, t) ** 2 - 1.0) for x, t in K.pairs())
    integrated = max(_l2_norm_defect(xi, x, T) for x in K.space_part)
    sample = list(sample)
    if sample:
        min_eig = float(np.linalg.eigvalsh(Kernel(xi).gram(sample)).min())
    else:
        min_eig = 0.0
    verdict = KernelVerdict(pointwise, integrated, min_eig, float(epsilon), diagonal, sample,
                            tolerance=tolerance)
    if not verdict.psd:
        logger.warning(f"KERNEL: Gram matrix has eigenvalue {min_eig} below tolerance")
    return verdict


def inner_foelner_deficit(W: FoelnerPair, s: Any, T: TransformationGroup) -> Fraction:
    """μ×λ(s·W △ W·s) / μ×λ(W) with s·(x,t) = (s·x, st), (x,t)·s = (x·s, ts)"""
    _require_right(T)
    if W.mass <= 0:
        raise DomainError("Følner pair mass must be positive")
    G = T.group
    left = frozenset((act_left(T, s, x), G.multiply(s, t)) for x, t in W.region)
    right = frozenset((act_right(T, x, s), G.multiply(t, s)) for x, t in W.region)
    return region_mass(left ^ right, T) / W.mass


def inner_indicator_bound(W: FoelnerPair, x: Any, s: Any, T: TransformationGroup) -> BoundCheck:
    """inner fn defect of indicator_net(W) at (x, s) against inner_foelner_deficit(W, s)"""
    f = indicator_net(W, T)
    return BoundCheck(_inner_fn_cell(f, x, s, T), inner_foelner_deficit(W, s, T))


def inner_cell(f: NetFunction, x: Any, s: Any, T: TransformationGroup) -> Fraction:
    """Σ_t |f^{s·x}(s⁻¹t) − f^{x·s}(ts⁻¹)| at one window pair"""
    _require_right(T)
    return _inner_fn_cell(f, x, s, T)


def inner_mean_cell(m: MeanNet, x: Any, s: Any, T: TransformationGroup) -> Fraction:
    _require_right(T)
    return _inner_mean_cell(m, x, s, T)
