"""
Data models for nets, windows and defect reports.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from components.measure import FinSignedFunction, ProbMeasure
from utils.errors import DomainError

Number = Union[Fraction, float]


@dataclass(frozen=True)
class Window:
    """Finite stand-in for a compact subset of X×G"""

    space_part: Tuple[Any, ...]
    group_part: Tuple[Any, ...]

    def __post_init__(self):
        if not self.space_part or not self.group_part:
            raise DomainError("window parts must both be nonempty")

    def pairs(self) -> List[Tuple[Any, Any]]:
        return [(x, s) for x in self.space_part for s in self.group_part]


@dataclass
class NetFunction:
    """One stage of a net: a finitely supported nonnegative function f^x(t) on X×G

    `default` is the section used at every point without its own entry, which
    makes x-independent nets cheap to express.
    """

    stage: Any
    values: Dict[Any, FinSignedFunction] = field(default_factory=dict)
    default: Optional[FinSignedFunction] = None

    def __post_init__(self):
        cleaned = {}
        for x, section in self.values.items():
            section = section if isinstance(section, FinSignedFunction) else FinSignedFunction(section)
            if any(v < 0 for v in section.values()):
                raise DomainError(f"net function values must be nonnegative (section {x!r})")
            cleaned[x] = section
        self.values = cleaned
        if self.default is not None:
            if not isinstance(self.default, FinSignedFunction):
                self.default = FinSignedFunction(self.default)
            if any(v < 0 for v in self.default.values()):
                raise DomainError("net function default section must be nonnegative")

    def section(self, x: Any) -> FinSignedFunction:
        """f^x; the zero function when x carries no mass"""
        if x in self.values:
            return self.values[x]
        return self.default if self.default is not None else FinSignedFunction()

    def __call__(self, x: Any, t: Any) -> Fraction:
        return self.section(x).get(t, Fraction(0))

    @property
    def points(self) -> Tuple[Any, ...]:
        return tuple(self.values)

    def is_empty_at(self, x: Any) -> bool:
        return not self.section(x)


class _DefaultPoint:
    """Key of the slices that stand for every point without its own factor section"""

    def __repr__(self) -> str:
        return "*"


DEFAULT_POINT = _DefaultPoint()


@dataclass
class ProductNetFunction:
    """e^{(x,y)}(n,h) on (X×X)×(N⋊H); `factors` records (f, g) when built by product_net

    `rows` and `cols` are the points with their own f- and g-sections. A slice
    at any other point is stored under DEFAULT_POINT on that side.
    """

    stage: Any
    slices: Dict[Tuple[Any, Any], FinSignedFunction] = field(default_factory=dict)
    factors: Optional[Tuple[NetFunction, NetFunction]] = None
    rows: frozenset = frozenset()
    cols: frozenset = frozenset()

    def __post_init__(self):
        cleaned = {}
        for key, section in self.slices.items():
            section = section if isinstance(section, FinSignedFunction) else FinSignedFunction(section)
            if any(v < 0 for v in section.values()):
                raise DomainError(f"product net values must be nonnegative (slice {key!r})")
            if section:
                cleaned[key] = section
        self.slices = cleaned

    def slice(self, x: Any, y: Any) -> FinSignedFunction:
        if (x, y) in self.slices:
            return self.slices[(x, y)]
        key = (x if x in self.rows else DEFAULT_POINT, y if y in self.cols else DEFAULT_POINT)
        return self.slices.get(key, FinSignedFunction())

    def __call__(self, x: Any, y: Any, n: Any, h: Any) -> Fraction:
        return self.slice(x, y).get((n, h), Fraction(0))


@dataclass
class MeanNet:
    """One stage of a mean net x ↦ m^x ∈ Prob(G)"""

    stage: Any
    assignment: Dict[Any, ProbMeasure] = field(default_factory=dict)
    default: Optional[ProbMeasure] = None

    def __post_init__(self):
        self.assignment = {
            x: m if isinstance(m, ProbMeasure) else ProbMeasure(m) for x, m in self.assignment.items()
        }
        if self.default is not None and not isinstance(self.default, ProbMeasure):
            self.default = ProbMeasure(self.default)

    def at(self, x: Any) -> ProbMeasure:
        if x in self.assignment:
            return self.assignment[x]
        if self.default is None:
            raise DomainError(f"mean net has no measure at {x!r}")
        return self.default

    @property
    def points(self) -> Tuple[Any, ...]:
        return tuple(self.assignment)


@dataclass
class SqrtNetFunction:
    """Floating net ξ^x(t) = √f^x(t)"""

    stage: Any
    values: Dict[Any, Dict[Any, float]] = field(default_factory=dict)
    default: Dict[Any, float] = field(default_factory=dict)

    def __call__(self, x: Any, t: Any) -> float:
        return self.section(x).get(t, 0.0)

    def section(self, x: Any) -> Dict[Any, float]:
        return self.values.get(x, self.default)


@dataclass
class BoundCheck:
    """An inequality lhs ≤ rhs evaluated at one input"""

    lhs: Number
    rhs: Number
    terms: Dict[str, Number] = field(default_factory=dict)
    tolerance: float = 0.0

    @property
    def holds(self) -> bool:
        if isinstance(self.lhs, Fraction) and isinstance(self.rhs, Fraction) and not self.tolerance:
            return self.lhs <= self.rhs
        return float(self.lhs) <= float(self.rhs) + self.tolerance


@dataclass
class DefectRow:
    """Defect values at one (stage, point, element) cell

    `sample` and `measures` hold the sampled (point, element) cells and the
    sections behind a stage-level row, both over formatted labels.
    """

    stage: Any
    point: str
    element: str
    window: int = 0
    values: Dict[str, Number] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)
    sample: List[Tuple[str, str]] = field(default_factory=list)
    measures: Dict[str, FinSignedFunction] = field(default_factory=dict)


@dataclass
class StageSummary:
    """Maxima of each quantity over the window at one stage"""

    stage: Any
    maxima: Dict[str, Number] = field(default_factory=dict)
    epsilon: Optional[Fraction] = None


@dataclass
class DeficitReport:
    """Per-stage, per-window defect table with a verdict and trend"""

    suite: str
    quantities: Tuple[str, ...]
    rows: List[DefectRow] = field(default_factory=list)
    summaries: List[StageSummary] = field(default_factory=list)
    verdict: str = "reported"
    trend: str = "single-stage"
    flags: List[str] = field(default_factory=list)

    @property
    def final(self) -> Optional[StageSummary]:
        return self.summaries[-1] if self.summaries else None

    @property
    def passed(self) -> bool:
        return self.verdict != "failed"

    def series(self, quantity: str) -> List[Number]:
        return [summary.maxima[quantity] for summary in self.summaries if quantity in summary.maxima]


def trend_of(values: Iterable[Number]) -> str:
    """Classify a per-stage series"""
    values = list(values)
    if len(values) < 2:
        return "single-stage"
    pairs = list(zip(values, values[1:]))
    if all(b < a for a, b in pairs):
        return "decreasing"
    if all(b <= a for a, b in pairs):
        return "nonincreasing"
    if all(b >= a for a, b in pairs):
        return "nondecreasing"
    return "mixed"


@dataclass
class Report:
    """A scenario run: echo, one DeficitReport per (suite, window) and provenance"""

    scenario: Dict[str, Any]
    suites: Dict[str, List[DeficitReport]] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(report.passed for reports in self.suites.values() for report in reports)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"
