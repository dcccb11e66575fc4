"""
Scenario runner: builds windows and nets from a parsed scenario, executes the
requested defect suites and assembles a Report.
"""
import random
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

from components.action import (
    TransformationGroup,
    act_left,
    act_right,
    boundary_point,
    diag_conjugation_window,
    product_action,
    rotation_action,
    trivial_action,
)
from components.foelner import (
    CERTIFIED,
    FAILED,
    FoelnerPair,
    aicm_cell,
    evaluate_stages,
    foelner_deficit,
    indicator_net,
    lamplighter_set,
    summarize,
    verify_aicm,
)
from components.groups import Group, ball, parse_word
from components.inner import (
    boundary_mean,
    dual_sqrt_bounds,
    inner_cell,
    inner_foelner_deficit,
    inner_mean_cell,
    kernel_check,
    l2_rows,
    sqrt_net,
    verify_boundary_means,
    verify_inner,
)
from components.measure import FinSignedFunction
from components.semidirect_nets import (
    g_mass,
    marginal_defect_bound,
    product_net,
    three_term_bound,
    twist_from_full_defect,
    twist_norm_defect,
)
from models.data_models import DefectRow, DeficitReport, MeanNet, NetFunction, Report, Window
from pipeline.scenario import PAIR_FAMILIES, Scenario
from utils.config import Settings
from utils.errors import ConfigurationError, ScenarioParseError
from utils.logging_utils import logger
from utils.rationals import parse_rational, round_float

ARTIFACT = "amenability-toolkit"
ARTIFACT_VERSION = "0.1.0"
FLOATING_SUITES = ("sqrt", "kernel")


def _density(elements, G: Group) -> FinSignedFunction:
    """χ_B / λ(B)"""
    elements = frozenset(elements)
    mass = G.weight_of(elements)
    return FinSignedFunction({t: 1 / mass for t in elements})


class ScenarioRunner:
    """Runs every suite of a scenario over every window"""

    def __init__(
        self,
        scenario: Scenario,
        stages: Optional[int] = None,
        window_radius: Optional[int] = None,
        workers: Optional[int] = None,
    ):
        if stages is not None and stages < 1:
            raise ConfigurationError(f"--stages must be at least 1, got {stages}")
        if window_radius is not None and window_radius < 0:
            raise ConfigurationError(f"--window-radius must be nonnegative, got {window_radius}")
        self.scenario = scenario
        self.T: TransformationGroup = scenario.action
        self.G: Group = scenario.group
        self.family = scenario.net["family"]
        self.stages = stages
        self.window_radius = window_radius
        self.workers = workers or Settings().workers
        self.schedule = list(scenario.epsilon)
        self.windows = self._build_windows()

    # Decoding

    def _decode_element(self, data: Any, location: str) -> Any:
        try:
            return self.G.element_from_json(data)
        except ValueError as e:
            raise ScenarioParseError(str(e), location)

    def _decode_point(self, data: Any, location: str) -> Any:
        space = self.T.space
        try:
            if space.kind == "boundary":
                if not isinstance(data, str):
                    raise ValueError(f"boundary points are periodic words such as 'ab', got {data!r}")
                return boundary_point(space, space.group.reduce(parse_word(data)))
            if space.kind == "carrier":
                return space.group.element_from_json(data)
            return space.check(data)
        except ValueError as e:
            raise ScenarioParseError(str(e), location)

    def _decode_function(self, rows: Any, location: str) -> FinSignedFunction:
        if not isinstance(rows, list):
            raise ScenarioParseError("functions are lists of [element, \"p/q\"] rows", location)
        values = {}
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 2:
                raise ScenarioParseError("expected an [element, \"p/q\"] row", f"{location}[{i}]")
            t = self._decode_element(row[0], f"{location}[{i}][0]")
            try:
                values[t] = values.get(t, Fraction(0)) + parse_rational(row[1])
            except ValueError as e:
                raise ScenarioParseError(str(e), f"{location}[{i}][1]")
        return FinSignedFunction(values)

    def _build_windows(self) -> List[Window]:
        windows = []
        for i, descriptor in enumerate(self.scenario.windows):
            location = f"$.windows[{i}]"
            if "elements" in descriptor:
                group_part = [
                    self._decode_element(e, f"{location}.elements[{j}]")
                    for j, e in enumerate(descriptor["elements"])
                ]
            else:
                radius = self.window_radius if self.window_radius is not None else descriptor.get("group_radius", 1)
                group_part = ball(self.G, self.G.generators, radius)
            if "points" in descriptor:
                points = descriptor["points"]
                if not isinstance(points, list) or not points:
                    raise ScenarioParseError("points must be a nonempty list", f"{location}.points")
                space_part = [self._decode_point(p, f"{location}.points[{j}]") for j, p in enumerate(points)]
            else:
                space_part = diag_conjugation_window(self.T, descriptor.get("space_radius", 1), 0).space_part
            windows.append(Window(tuple(dict.fromkeys(space_part)), tuple(dict.fromkeys(group_part))))
        return windows

    # Nets

    @property
    def space_points(self) -> Tuple[Any, ...]:
        """Union of the windows' space parts"""
        return tuple(dict.fromkeys(x for K in self.windows for x in K.space_part))

    def _radii(self) -> List[int]:
        net = self.scenario.net
        count = self.stages or net.get("stages", 3 if self.family == "product-net" else 5)
        start, step = net.get("start", 1), net.get("step", 1)
        return [start + i * step for i in range(count)]

    def _truncate(self, items: List[Any]) -> List[Any]:
        return items[: self.stages] if self.stages else items

    def _stage_set(self, radius: int) -> Tuple[Any, ...]:
        if self.family == "lamp-configs":
            return lamplighter_set(self.G, radius)
        return ball(self.G, self.G.generators, radius)

    @cached_property
    def foelner_pairs(self) -> List[Tuple[int, FoelnerPair]]:
        """(stage, W) for the Følner-pair families"""
        if self.family not in PAIR_FAMILIES:
            raise ConfigurationError(f"net family {self.family!r} has no Følner pairs")
        A = self.space_points
        if self.family != "indicator-pairs":
            return [(r, FoelnerPair.product(A, self._stage_set(r), self.T)) for r in self._radii()]
        pairs = []
        for i, pair in enumerate(self._truncate(self.scenario.net["pairs"])):
            location = f"$.net.pairs[{i}]"
            if "region" in pair:
                region = []
                for j, cell in enumerate(pair["region"]):
                    if not isinstance(cell, list) or len(cell) != 2:
                        raise ScenarioParseError("region cells are [point, element] pairs", f"{location}.region[{j}]")
                    region.append((
                        self._decode_point(cell[0], f"{location}.region[{j}][0]"),
                        self._decode_element(cell[1], f"{location}.region[{j}][1]"),
                    ))
            else:
                elements = [
                    self._decode_element(e, f"{location}.elements[{j}]") for j, e in enumerate(pair["elements"])
                ]
                points = A
                if "points" in pair:
                    points = [self._decode_point(p, f"{location}.points[{j}]") for j, p in enumerate(pair["points"])]
                region = [(x, t) for x in points for t in elements]
            try:
                W = FoelnerPair.build(region, self.T)
            except ValueError as e:
                raise ScenarioParseError(str(e), location)
            pairs.append((pair.get("stage", i + 1), W))
        return pairs

    @cached_property
    def density_net(self) -> List[NetFunction]:
        """Stages of the density net f^x(t) for the density families"""
        if self.family == "indicator-pairs":
            return [indicator_net(W, self.T, stage) for stage, W in self.foelner_pairs]
        if self.family in ("balls", "lamp-configs"):
            return [NetFunction(r, default=_density(self._stage_set(r), self.G)) for r in self._radii()]
        if self.family != "explicit":
            raise ConfigurationError(f"net family {self.family!r} is not a density net")
        net = []
        for i, entry in enumerate(self._truncate(self.scenario.net["stages"])):
            location = f"$.net.stages[{i}]"
            if not isinstance(entry, dict):
                raise ScenarioParseError("explicit stages are objects", location)
            sections = {}
            for j, item in enumerate(entry.get("sections", [])):
                if not isinstance(item, list) or len(item) != 2:
                    raise ScenarioParseError("sections are [point, rows] pairs", f"{location}.sections[{j}]")
                x = self._decode_point(item[0], f"{location}.sections[{j}][0]")
                sections[x] = self._decode_function(item[1], f"{location}.sections[{j}][1]")
            default = None
            if "default" in entry:
                default = self._decode_function(entry["default"], f"{location}.default")
            try:
                net.append(NetFunction(entry.get("stage", i + 1), sections, default))
            except ValueError as e:
                raise ScenarioParseError(str(e), location)
        return net

    def _factor_nets(self) -> List[Tuple[int, NetFunction, NetFunction]]:
        """(stage, f, g) with explicit sections at every point of X"""
        net = self.scenario.net
        points = self.T.space.points
        count = self.stages or net.get("stages", 3)
        stages = []
        for i in range(count):
            factors = []
            for side, factor in (("normal", self.G.normal), ("acting", self.G.acting)):
                spec = net.get(side, {"family": "balls"})
                radius = spec.get("start", 1) + i * spec.get("step", 1)
                if spec["family"] == "lamp-configs":
                    elements = factor.supported_in(-radius, radius)
                else:
                    elements = ball(factor, factor.generators, radius)
                section = _density(elements, factor)
                factors.append(NetFunction(radius, {x: section for x in points}))
            stages.append((i + 1, factors[0], factors[1]))
        return stages

    @cached_property
    def product_action(self) -> TransformationGroup:
        space = self.T.space
        if (self.scenario.raw.get("space") or {}).get("kind") == "rotation":
            T_H = rotation_action(len(space.points), self.G.acting)
        else:
            T_H = trivial_action(space, self.G.acting)
        T_N = trivial_action(T_H.space, self.G.normal)
        return product_action(T_N, T_H, self.G)

    # Suites

    def _flag_violations(self, report: DeficitReport, marker: str = "violated") -> DeficitReport:
        violated = [flag for flag in report.flags if marker in flag]
        if violated:
            report.verdict = FAILED
            logger.warning(f"SUITE {report.suite}: {len(violated)} violated bounds")
        return report

    def _bridge_rows(self, item: Tuple[int, FoelnerPair], K: Window, inner: bool) -> List[DefectRow]:
        stage, W = item
        T = self.T
        f = indicator_net(W, T, stage)
        applicable = T.space.kind == "point" or W.is_product
        rows = []
        for s in K.group_part:
            deficit = inner_foelner_deficit(W, s, T) if inner else foelner_deficit(W, s, T)
            for x in K.space_part:
                if inner:
                    touched = (act_left(T, s, x), act_right(T, x, s))
                    bridge = inner_cell(f, x, s, T)
                else:
                    touched = (x, act_left(T, s, x))
                    bridge = aicm_cell(f, x, s, T)
                empty = [p for p in dict.fromkeys(touched) if f.is_empty_at(p)]
                flags = [f"empty-section:{T.space.format_point(p)}" for p in empty]
                if not applicable:
                    flags.append("bridge-not-applicable")
                elif not empty and bridge > deficit:
                    flags.append("bridge-violated")
                rows.append(
                    DefectRow(
                        stage=stage,
                        point=T.space.format_point(x),
                        element=self.G.format_element(s),
                        values={"deficit": deficit, "bridge": bridge},
                        flags=flags,
                    )
                )
        return rows

    def _bridge_report(self, K: Window, inner: bool) -> DeficitReport:
        suite = "inner-foelner" if inner else "foelner"
        pairs = self.foelner_pairs
        per_stage = evaluate_stages(lambda item: self._bridge_rows(item, K, inner), pairs, self.workers)
        report = summarize(suite, ("deficit", "bridge"), per_stage, [stage for stage, _ in pairs],
                           self.schedule, certify=("deficit",))
        logger.info(f"SUITE {suite}: {len(pairs)} stages, trend {report.trend}, verdict {report.verdict}")
        return self._flag_violations(report)

    def _run_aicm(self, K: Window) -> Dict[str, DeficitReport]:
        if self.family == "boundary-means":
            report = verify_boundary_means(self.T, K, self._radii(), self.schedule, self.workers)
            return {"aicm": self._flag_violations(report)}
        return {"aicm": verify_aicm(self.density_net, K, self.schedule, self.T, self.workers)}

    def _run_foelner(self, K: Window) -> Dict[str, DeficitReport]:
        return {"foelner": self._bridge_report(K, inner=False)}

    def _mean_rows(self, n: int, K: Window) -> List[DefectRow]:
        T = self.T
        needed = set(K.space_part)
        for x in K.space_part:
            for s in K.group_part:
                needed.update((act_left(T, s, x), act_right(T, x, s)))
        m = MeanNet(n, {w: boundary_mean(T.space, w, n) for w in needed})
        return [
            DefectRow(
                stage=n,
                point=T.space.format_point(x),
                element=self.G.format_element(s),
                values={"inv": inner_mean_cell(m, x, s, T)},
            )
            for x in K.space_part
            for s in K.group_part
        ]

    def _run_inner(self, K: Window) -> Dict[str, DeficitReport]:
        if self.family == "boundary-means":
            radii = self._radii()
            per_stage = evaluate_stages(lambda n: self._mean_rows(n, K), radii, self.workers)
            report = summarize("inner", ("inv",), per_stage, radii, self.schedule)
            logger.info(f"SUITE inner: {len(radii)} mean stages, trend {report.trend}, verdict {report.verdict}")
            return {"inner": report}
        reports = {"inner": verify_inner(self.density_net, K, self.schedule, self.T, self.workers)}
        if self.family in PAIR_FAMILIES:
            reports["inner-foelner"] = self._bridge_report(K, inner=True)
        return reports

    def _sqrt_rows(self, f: NetFunction, K: Window) -> List[DefectRow]:
        rows = l2_rows(sqrt_net(f), K, self.T)
        for row, (x, s) in zip(rows, K.pairs()):
            lower, upper = dual_sqrt_bounds(f, x, s, self.T)
            row.values = {q: round_float(v) for q, v in row.values.items()}
            if not lower.holds:
                row.flags.append("bound-violated:l2-below-l1")
            if not upper.holds:
                row.flags.append("bound-violated:l1-below-l2")
        return rows

    def _run_sqrt(self, K: Window) -> Dict[str, DeficitReport]:
        net = self.density_net
        per_stage = evaluate_stages(lambda f: self._sqrt_rows(f, K), net, self.workers)
        report = summarize("sqrt", ("norm2", "inv2"), per_stage, [f.stage for f in net], self.schedule)
        logger.info(f"SUITE sqrt: {len(net)} stages, trend {report.trend}, verdict {report.verdict}")
        return {"sqrt": self._flag_violations(report)}

    def _kernel_sample(self, f: NetFunction, K: Window, size: int) -> List[Tuple[Any, Any]]:
        space, G = self.T.space, self.G
        candidates = {(x, t) for x in K.space_part for t in set(f.section(x)) | set(K.group_part)}
        ordered = sorted(candidates, key=lambda c: (space.format_point(c[0]), G.format_element(c[1])))
        rng = random.Random(Settings().seed)
        return rng.sample(ordered, min(size, len(ordered)))

    def _sampled_sections(self, f: NetFunction,
                          sample: List[Tuple[Any, Any]]) -> Dict[str, FinSignedFunction]:
        """f^x over formatted elements, for each point x of the sample"""
        space, G = self.T.space, self.G
        return {
            space.format_point(x): FinSignedFunction({G.format_element(t): v for t, v in f.section(x).items()})
            for x in dict.fromkeys(x for x, _ in sample)
        }

    def _run_kernel(self, K: Window) -> Dict[str, DeficitReport]:
        diagonal = self.scenario.raw.get("kernel_diagonal", "pointwise")
        size = self.scenario.raw.get("kernel_sample", 16)
        epsilon = float(self.schedule[-1])
        space = self.T.space
        per_stage, verdicts = [], []
        for f in self.density_net:
            verdict = kernel_check(sqrt_net(f), K, epsilon, self._kernel_sample(f, K, size), self.T, diagonal)
            verdicts.append(verdict)
            per_stage.append([
                DefectRow(
                    stage=f.stage,
                    point="*",
                    element="*",
                    values={
                        "pointwise": round_float(verdict.pointwise_diagonal),
                        "integrated": round_float(verdict.integrated_diagonal),
                        "min_eig": round_float(verdict.min_eigenvalue),
                    },
                    flags=[] if verdict.psd else ["not-positive-semidefinite"],
                    sample=[(space.format_point(x), self.G.format_element(t)) for x, t in verdict.sample],
                    measures=self._sampled_sections(f, verdict.sample),
                )
            ])
        stages = [f.stage for f in self.density_net]
        report = summarize("kernel", ("pointwise", "integrated", "min_eig"), per_stage, stages,
                           self.schedule, certify=(diagonal,))
        report.verdict = CERTIFIED if verdicts[-1].passed else FAILED
        logger.info(f"SUITE kernel: {len(stages)} stages, {diagonal} diagonal, verdict {report.verdict}")
        return {"kernel": report}

    def _theorem23_rows(self, item: Tuple[int, NetFunction, NetFunction], K: Window) -> List[DefectRow]:
        stage, f, g = item
        G, T = self.G, self.product_action
        E = product_net(f, g, G, stage=stage)
        rows = []
        for x in K.space_part:
            for y in K.space_part:
                point = (x, y)
                norm = abs(g_mass(E, x, y, G) - 1)
                for r in K.group_part:
                    s, t = r
                    checks = {
                        "three-term": three_term_bound(E, f, g, r, point, G, T),
                        "marginal": marginal_defect_bound(E, s, point, G, T),
                        "twist": twist_from_full_defect(E, t, point, G, T),
                    }
                    rows.append(
                        DefectRow(
                            stage=stage,
                            point=T.space.format_point(point),
                            element=G.format_element(r),
                            values={
                                "norm": norm,
                                "twist": twist_norm_defect(f.section(x), t, G),
                                "e_defect": checks["three-term"].lhs,
                            },
                            flags=[f"bound-violated:{name}" for name, check in checks.items() if not check.holds],
                        )
                    )
        return rows

    def _run_theorem23(self, K: Window) -> Dict[str, DeficitReport]:
        stages = self._factor_nets()
        per_stage = evaluate_stages(lambda item: self._theorem23_rows(item, K), stages, self.workers)
        report = summarize("theorem23", ("norm", "twist", "e_defect"), per_stage,
                           [stage for stage, _, _ in stages], self.schedule, certify=("e_defect",))
        logger.info(f"SUITE theorem23: {len(stages)} stages, trend {report.trend}, verdict {report.verdict}")
        return {"theorem23": self._flag_violations(report)}

    def validate(self) -> int:
        """Build the windows and every net stage without evaluating defects; returns the stage count"""
        if self.family == "product-net":
            self.product_action
            return len(self._factor_nets())
        if self.family == "boundary-means":
            return len(self._radii())
        return len(self.density_net)

    def run(self) -> Report:
        """Execute every requested suite over every window"""
        logger.info(
            f"RUNNER: '{self.scenario.name}' with {len(self.windows)} windows, suites {list(self.scenario.suites)}"
        )
        suites: Dict[str, List[DeficitReport]] = {}
        for suite in self.scenario.suites:
            handler = getattr(self, f"_run_{suite}")
            for index, K in enumerate(self.windows):
                for key, report in handler(K).items():
                    for row in report.rows:
                        row.window = index
                    suites.setdefault(key, []).append(report)
        overrides = {}
        if self.stages is not None:
            overrides["stages"] = self.stages
        if self.window_radius is not None:
            overrides["window_radius"] = self.window_radius
        provenance = {
            "artifact": ARTIFACT,
            "version": ARTIFACT_VERSION,
            "arithmetic": "mixed" if any(s in FLOATING_SUITES for s in self.scenario.suites) else "exact",
            "overrides": overrides,
        }
        report = Report(self.scenario.echo(), suites, provenance)
        logger.info(f"RUNNER: '{self.scenario.name}' verdict {report.verdict}")
        return report


def run_scenario(scenario: Scenario, stages: Optional[int] = None, window_radius: Optional[int] = None,
                 workers: Optional[int] = None) -> Report:
    return ScenarioRunner(scenario, stages, window_radius, workers).run()
