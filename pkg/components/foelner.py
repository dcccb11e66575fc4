"""
Følner-pair deficits, indicator nets and the approximate-invariant-mean defect
functional for transformation groups.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from components.action import TransformationGroup, act_left
from components.groups import LampGroup, SemidirectGroup
from components.measure import FinSignedFunction, l1_distance, total_mass, translate_left
from models.data_models import (
    DefectRow,
    DeficitReport,
    NetFunction,
    StageSummary,
    Window,
    trend_of,
)
from utils.config import Settings
from utils.errors import DomainError
from utils.logging_utils import logger

CERTIFIED = "certified"
FAILED = "failed"


@dataclass(frozen=True)
class FoelnerPair:
    """A finite region of X×G with its μ×λ mass"""

    region: frozenset
    mass: Fraction

    @classmethod
    def build(cls, region: Iterable[Tuple[Any, Any]], T: TransformationGroup) -> "FoelnerPair":
        region = frozenset(region)
        if not region:
            raise DomainError("a Følner pair needs a nonempty region")
        for x, t in region:
            T.space.check(x)
            T.group.check(t)
        return cls(region, region_mass(region, T))

    @classmethod
    def product(cls, A: Iterable[Any], B: Iterable[Any], T: TransformationGroup) -> "FoelnerPair":
        """The product region A×B"""
        return cls.build(((x, t) for x in A for t in B), T)

    def section(self, x: Any) -> frozenset:
        """W_x = {t : (x, t) ∈ W}"""
        return frozenset(t for y, t in self.region if y == x)

    @property
    def points(self) -> frozenset:
        return frozenset(x for x, _ in self.region)

    @property
    def is_product(self) -> bool:
        """True when W = A×B for its point set A and a single section B"""
        sections = {self.section(x) for x in self.points}
        return len(sections) == 1


def region_mass(region: Iterable[Tuple[Any, Any]], T: TransformationGroup) -> Fraction:
    return sum((T.space.weight(x) * T.group.haar_weight(t) for x, t in region), Fraction(0))


def _diagonal_image(W: FoelnerPair, s: Any, T: TransformationGroup) -> frozenset:
    return frozenset((act_left(T, s, x), T.group.multiply(s, t)) for x, t in W.region)


def foelner_deficit(W: FoelnerPair, s: Any, T: TransformationGroup) -> Fraction:
    """μ×λ(s·W △ W) / μ×λ(W) under s·(x,t) = (s·x, st)"""
    if W.mass <= 0:
        raise DomainError("Følner pair mass must be positive")
    image = _diagonal_image(W, s, T)
    return region_mass(image ^ W.region, T) / W.mass


def indicator_net(W: FoelnerPair, T: TransformationGroup, stage: Any = 0) -> NetFunction:
    """f^x = χ_{W_x} / λ(W_x); for A×B this is μ(A)χ_B/(μ(A)λ(B)) on x ∈ A"""
    values = {}
    for x in W.points:
        section = W.section(x)
        weight = T.group.weight_of(section)
        values[x] = FinSignedFunction({t: 1 / weight for t in section})
    return NetFunction(stage, values)


def product_region(W_N: FoelnerPair, W_H: FoelnerPair, T: TransformationGroup) -> FoelnerPair:
    """{((x,y),(n,h)) : (x,n) ∈ W_N, (y,h) ∈ W_H} for the product action on X×X"""
    region = (
        ((x, y), (n, h)) for x, n in W_N.region for y, h in W_H.region
    )
    return FoelnerPair.build(region, T)


def lamplighter_set(G: SemidirectGroup, n: int) -> Tuple[Any, ...]:
    """{(c, h) : 0 ≤ h < n, supp c ⊂ [h−n+1, h]}, with deficit 2/n at (e, ±1) and 0 at lamp flips"""
    if n < 1:
        raise DomainError(f"lamplighter Følner sets need n ≥ 1, got {n}")
    if not isinstance(G.normal, LampGroup):
        raise DomainError(f"lamplighter Følner sets need a lamp factor, got {G.normal.name}")
    return tuple((c, h) for h in range(n) for c in G.normal.supported_in(h - n + 1, h))


def _section_mass(f: NetFunction, x: Any, T: TransformationGroup) -> Fraction:
    return total_mass(f.section(x), T.group.haar_weight)


def aicm_cell(f: NetFunction, x: Any, s: Any, T: TransformationGroup) -> Fraction:
    """Σ_t |f^{s·x}(st) − f^x(t)| at one window pair"""
    sx = act_left(T, s, x)
    # t ↦ f^{sx}(st) is l_{s⁻¹} f^{sx}
    moved = translate_left(T.group, T.group.inverse(s), f.section(sx))
    return l1_distance(moved, f.section(x), T.group.haar_weight)


def aicm_rows(f: NetFunction, K: Window, T: TransformationGroup) -> List[DefectRow]:
    """One row per (x, s) ∈ K with the normalization and invariance defects"""
    rows = []
    for x in K.space_part:
        norm = abs(_section_mass(f, x, T) - 1)
        for s in K.group_part:
            sx = act_left(T, s, x)
            flags = [f"empty-section:{T.space.format_point(p)}" for p in dict.fromkeys((x, sx)) if f.is_empty_at(p)]
            rows.append(
                DefectRow(
                    stage=f.stage,
                    point=T.space.format_point(x),
                    element=T.group.format_element(s),
                    values={"norm": norm, "inv": aicm_cell(f, x, s, T)},
                    flags=flags,
                )
            )
    return rows


def aicm_defect(f: NetFunction, K: Window, T: TransformationGroup) -> Tuple[Fraction, Fraction]:
    """(max_x |Σ_t f^x(t) − 1|, max_{x,s} Σ_t |f^{s·x}(st) − f^x(t)|) over K"""
    rows = aicm_rows(f, K, T)
    norm = max(row.values["norm"] for row in rows)
    inv = max(row.values["inv"] for row in rows)
    return norm, inv


def epsilon_at(schedule: Sequence[Fraction], index: int) -> Optional[Fraction]:
    if not schedule:
        return None
    return Fraction(schedule[min(index, len(schedule) - 1)])


def check_schedule(schedule: Sequence[Fraction]):
    schedule = [Fraction(e) for e in schedule]
    if any(e <= 0 for e in schedule):
        raise DomainError("epsilon schedule entries must be positive")
    if any(b > a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("epsilon schedule must be nonincreasing")
    return schedule


def summarize(suite: str, quantities: Tuple[str, ...], per_stage: List[List[DefectRow]],
              stages: Sequence[Any], schedule: Sequence[Fraction],
              certify: Optional[Tuple[str, ...]] = None) -> DeficitReport:
    """Fold per-stage rows into a report; certify the final stage against the last ε"""
    report = DeficitReport(suite=suite, quantities=quantities)
    for index, (stage, rows) in enumerate(zip(stages, per_stage)):
        maxima = {}
        for q in quantities:
            values = [row.values[q] for row in rows if q in row.values]
            if values:
                maxima[q] = max(values)
        report.rows.extend(rows)
        report.summaries.append(StageSummary(stage, maxima, epsilon_at(schedule, index)))
        for row in rows:
            report.flags.extend(f"stage {stage}: {flag}" for flag in row.flags)
    report.flags = list(dict.fromkeys(report.flags))
    lead = (certify or quantities)[-1]
    report.trend = trend_of(report.series(lead))
    final = report.final
    if schedule and final is not None:
        eps = Fraction(schedule[-1])
        below = all(final.maxima.get(q, 0) < eps for q in (certify or quantities))
        report.verdict = CERTIFIED if below else FAILED
    return report


def evaluate_stages(evaluate, net: Sequence[Any], workers: Optional[int] = None) -> List[Any]:
    """Map `evaluate` over stages, in stage order regardless of worker count"""
    workers = workers or Settings().workers
    if workers <= 1 or len(net) <= 1:
        return [evaluate(stage) for stage in net]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, net))


def verify_aicm(net: Sequence[NetFunction], K: Window, schedule: Sequence[Fraction],
                T: TransformationGroup, workers: Optional[int] = None) -> DeficitReport:
    """Per-stage a.i.c.m. defects; certified when the final stage is below the last ε"""
    if not net:
        raise DomainError("verify_aicm needs a nonempty net")
    schedule = check_schedule(schedule)
    per_stage = evaluate_stages(lambda f: aicm_rows(f, K, T), net, workers)
    report = summarize("aicm", ("norm", "inv"), per_stage, [f.stage for f in net], schedule)
    final = report.final
    logger.info(
        f"SUITE aicm: {len(net)} stages, final norm={final.maxima['norm']} "
        f"inv={final.maxima['inv']}, verdict {report.verdict}"
    )
    if report.flags:
        logger.warning(f"SUITE aicm: {len(report.flags)} empty-section flags")
    return report


def regularize(f: NetFunction, bump: FinSignedFunction, n: int, T: TransformationGroup,
               points: Optional[Iterable[Any]] = None) -> NetFunction:
    """f_n^x = (f^x + bump/n) / (∫ f^x dλ + 1/n) for each x"""
    if n < 1:
        raise DomainError(f"regularization index must be positive, got {n}")
    if total_mass(bump, T.group.haar_weight) != 1:
        raise DomainError("regularizing bump must have total mass 1")
    if any(v < 0 for v in bump.values()):
        raise DomainError("regularizing bump must be nonnegative")
    points = tuple(dict.fromkeys(points)) if points is not None else f.points
    inv_n = Fraction(1, n)

    def mix(section: FinSignedFunction) -> FinSignedFunction:
        denominator = total_mass(section, T.group.haar_weight) + inv_n
        support = set(section) | set(bump)
        return FinSignedFunction(
            {t: (section.get(t, 0) + inv_n * bump.get(t, 0)) / denominator for t in support}
        )

    default = mix(f.default if f.default is not None else FinSignedFunction())
    return NetFunction(f.stage, {x: mix(f.section(x)) for x in points}, default=default)


def window_deficits(W: FoelnerPair, K: Window, T: TransformationGroup) -> Fraction:
    """max over the window's group part of foelner_deficit"""
    return max(foelner_deficit(W, s, T) for s in K.group_part)
