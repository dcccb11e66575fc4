"""
Declarative scenario files: JSON documents naming a group, a space and action,
a net family, test windows, the suites to run and an ε schedule.

Every parse failure raises ScenarioParseError carrying a JSON-path location.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from components.action import (
    Space,
    TransformationGroup,
    boundary_action,
    carrier_action,
    rotation_action,
    trivial_action,
    with_inverse_right,
)
from components.groups import (
    CyclicGroup,
    FiniteGroup,
    FreeAbelianGroup,
    FreeGroup,
    Group,
    LampGroup,
    ModularWeight,
    SemidirectGroup,
    TrivialTau,
    lamplighter,
    semidirect,
    shift_tau,
    sign_flip_tau,
    table_tau,
)
from utils.config import Settings
from utils.errors import ScenarioParseError
from utils.logging_utils import logger
from utils.rationals import parse_rational

SUITES = ("aicm", "foelner", "theorem23", "inner", "sqrt", "kernel")
NET_FAMILIES = ("balls", "indicator-pairs", "boundary-means", "product-net", "explicit", "lamp-configs")
SPACE_KINDS = ("point", "finite", "carrier", "boundary", "rotation")
RIGHT_MODES = ("natural", "inverse", "none")

DENSITY_FAMILIES = ("balls", "lamp-configs", "indicator-pairs", "explicit")
PAIR_FAMILIES = ("balls", "lamp-configs", "indicator-pairs")
SUITE_FAMILIES = {
    "aicm": DENSITY_FAMILIES + ("boundary-means",),
    "foelner": PAIR_FAMILIES,
    "theorem23": ("product-net",),
    "inner": DENSITY_FAMILIES + ("boundary-means",),
    "sqrt": DENSITY_FAMILIES,
    "kernel": DENSITY_FAMILIES,
}


@dataclass
class Scenario:
    """A validated scenario with its group and action built"""

    name: str
    group: Group
    action: TransformationGroup
    net: Dict[str, Any]
    windows: List[Dict[str, Any]]
    suites: Tuple[str, ...]
    epsilon: List[Fraction]
    raw: Dict[str, Any] = field(default_factory=dict)

    def echo(self) -> Dict[str, Any]:
        """The scenario as parsed, for report provenance"""
        return {
            "name": self.name,
            "group": self.group.describe(),
            "space": self.action.space.describe(),
            "action": self.action.label,
            "net": self.net,
            "windows": self.windows,
            "suites": list(self.suites),
            "epsilon": [f"{e.numerator}/{e.denominator}" for e in self.epsilon],
        }


def _require(data: Dict[str, Any], key: str, location: str) -> Any:
    if key not in data:
        raise ScenarioParseError(f"missing required key '{key}'", location)
    return data[key]


def _as_dict(data: Any, location: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ScenarioParseError(f"expected an object, got {type(data).__name__}", location)
    return data


def _as_int(data: Any, location: str, minimum: Optional[int] = None) -> int:
    if not isinstance(data, int) or isinstance(data, bool):
        raise ScenarioParseError(f"expected an integer, got {data!r}", location)
    if minimum is not None and data < minimum:
        raise ScenarioParseError(f"expected an integer ≥ {minimum}, got {data}", location)
    return data


def parse_group(data: Any, location: str = "$.group") -> Group:
    """Build a group from a family descriptor"""
    data = _as_dict(data, location)
    family = _require(data, "family", location)
    try:
        if family == "free-abelian":
            return FreeAbelianGroup(_as_int(data.get("rank", 1), f"{location}.rank", 1))
        if family == "free":
            return FreeGroup(_as_int(data.get("rank", 2), f"{location}.rank", 1))
        if family == "cyclic":
            return CyclicGroup(_as_int(_require(data, "order", location), f"{location}.order", 1))
        if family == "finite":
            table = _require(data, "table", location)
            if not isinstance(table, list) or not all(isinstance(row, list) for row in table):
                raise ScenarioParseError("table must be a list of rows", f"{location}.table")
            return FiniteGroup(table, data.get("label"))
        if family == "lamps":
            return LampGroup(_as_int(data.get("order", 2), f"{location}.order", 2))
        if family == "lamplighter":
            return lamplighter(_as_int(data.get("order", 2), f"{location}.order", 2))
        if family == "semidirect":
            return _parse_semidirect(data, location)
    except ScenarioParseError:
        raise
    except ValueError as e:
        raise ScenarioParseError(str(e), location)
    raise ScenarioParseError(f"unknown group family {family!r}", f"{location}.family")


def _parse_semidirect(data: Dict[str, Any], location: str) -> Group:
    normal = parse_group(_require(data, "normal", location), f"{location}.normal")
    acting = parse_group(_require(data, "acting", location), f"{location}.acting")
    tau_spec = data.get("tau", "trivial")
    if tau_spec == "trivial":
        tau = TrivialTau()
    elif tau_spec == "sign-flip":
        tau = sign_flip_tau(normal, acting)
    elif tau_spec == "shift":
        tau = shift_tau(normal, acting)
    elif isinstance(tau_spec, dict) and "table" in tau_spec:
        tau = table_tau(normal, acting, tau_spec["table"])
    else:
        raise ScenarioParseError(f"unknown tau {tau_spec!r}", f"{location}.tau")
    sigma_spec = data.get("sigma", 1)
    if sigma_spec == 1:
        sigma = ModularWeight.unit()
    elif isinstance(sigma_spec, dict) and "exponential" in sigma_spec:
        sigma = ModularWeight.exponential(parse_rational(sigma_spec["exponential"]))
    else:
        raise ScenarioParseError(f"unknown sigma {sigma_spec!r}", f"{location}.sigma")
    return semidirect(normal, acting, tau, sigma, seed=Settings().seed)


def _parse_weights(points: List[Any], data: Any, location: str) -> Dict[Any, Fraction]:
    """JSON object keys are strings; match each one to the point it spells"""
    by_text = {}
    for p in points:
        if by_text.setdefault(str(p), p) != p:
            raise ScenarioParseError(f"points {by_text[str(p)]!r} and {p!r} share the weight key {str(p)!r}", location)
    weights = {}
    for key, w in _as_dict(data, location).items():
        if key not in by_text:
            raise ScenarioParseError(f"weight for unknown point {key!r}", f"{location}.{key}")
        try:
            weights[by_text[key]] = parse_rational(w)
        except ValueError as e:
            raise ScenarioParseError(str(e), f"{location}.{key}")
    return weights


def parse_action(data: Any, group: Group, location: str = "$.space") -> TransformationGroup:
    """Build the transformation group from a space descriptor"""
    data = _as_dict(data if data is not None else {"kind": "point"}, location)
    kind = data.get("kind", "point")
    right = data.get("right", "natural")
    if right not in RIGHT_MODES:
        raise ScenarioParseError(f"right must be one of {', '.join(RIGHT_MODES)}", f"{location}.right")
    try:
        if kind == "point":
            T = trivial_action(Space.point(), group)
        elif kind == "finite":
            points = _require(data, "points", location)
            if not isinstance(points, list) or not points:
                raise ScenarioParseError("points must be a nonempty list", f"{location}.points")
            for i, p in enumerate(points):
                if not isinstance(p, (str, int)) or isinstance(p, bool):
                    raise ScenarioParseError(f"points are strings or integers, got {p!r}", f"{location}.points[{i}]")
            weights = _parse_weights(points, data.get("weights", {}), f"{location}.weights")
            T = trivial_action(Space.finite(points, weights), group)
        elif kind == "carrier":
            T = carrier_action(group)
        elif kind == "boundary":
            if not isinstance(group, FreeGroup):
                raise ScenarioParseError("boundary spaces need a free group", f"{location}.kind")
            depth = _as_int(data.get("depth", 8), f"{location}.depth", 1)
            T = boundary_action(group.rank, depth)
            T = TransformationGroup(T.space, group, T.left_act, label=T.label)
            if right == "natural":
                right = "none"
        elif kind == "rotation":
            T = rotation_action(_as_int(_require(data, "order", location), f"{location}.order", 1), group)
        else:
            raise ScenarioParseError(f"unknown space kind {kind!r}", f"{location}.kind")
    except ScenarioParseError:
        raise
    except ValueError as e:
        raise ScenarioParseError(str(e), location)
    if right == "inverse":
        T = with_inverse_right(T)
    elif right == "none":
        T = TransformationGroup(T.space, T.group, T.left_act, None, T.label)
    return T


def _parse_net(data: Any, location: str = "$.net") -> Dict[str, Any]:
    data = _as_dict(data, location)
    family = _require(data, "family", location)
    if family not in NET_FAMILIES:
        raise ScenarioParseError(f"unknown net family {family!r}", f"{location}.family")
    if family in ("balls", "lamp-configs", "boundary-means"):
        _as_int(data.get("stages", 5), f"{location}.stages", 1)
        _as_int(data.get("start", 1), f"{location}.start", 0)
        _as_int(data.get("step", 1), f"{location}.step", 1)
    if family == "indicator-pairs":
        pairs = _require(data, "pairs", location)
        if not isinstance(pairs, list) or not pairs:
            raise ScenarioParseError("pairs must be a nonempty list", f"{location}.pairs")
        for i, pair in enumerate(pairs):
            pair = _as_dict(pair, f"{location}.pairs[{i}]")
            if "region" not in pair:
                _require(pair, "elements", f"{location}.pairs[{i}]")
    if family == "product-net":
        for side in ("normal", "acting"):
            side_net = _parse_net(data.get(side, {"family": "balls"}), f"{location}.{side}")
            if side_net["family"] not in ("balls", "lamp-configs"):
                raise ScenarioParseError("product-net factors are balls or lamp-configs", f"{location}.{side}.family")
        _as_int(data.get("stages", 3), f"{location}.stages", 1)
    if family == "explicit":
        stages = _require(data, "stages", location)
        if not isinstance(stages, list) or not stages:
            raise ScenarioParseError("stages must be a nonempty list", f"{location}.stages")
    return data


def _parse_windows(data: Any, location: str = "$.windows") -> List[Dict[str, Any]]:
    if data is None:
        return [{"space_radius": 1, "group_radius": 1}]
    if not isinstance(data, list) or not data:
        raise ScenarioParseError("window schedule must be a nonempty list", location)
    windows = []
    for i, window in enumerate(data):
        window = _as_dict(window, f"{location}[{i}]")
        if "elements" in window:
            if not isinstance(window["elements"], list) or not window["elements"]:
                raise ScenarioParseError("elements must be a nonempty list", f"{location}[{i}].elements")
        else:
            _as_int(window.get("group_radius", 1), f"{location}[{i}].group_radius", 0)
        _as_int(window.get("space_radius", 1), f"{location}[{i}].space_radius", 0)
        windows.append(window)
    return windows


def _parse_epsilon(data: Any, location: str = "$.epsilon") -> List[Fraction]:
    if data is None:
        return [Fraction(1, 10)]
    if not isinstance(data, list) or not data:
        raise ScenarioParseError("epsilon schedule must be a nonempty list", location)
    schedule = []
    for i, entry in enumerate(data):
        try:
            value = parse_rational(entry)
        except ValueError as e:
            raise ScenarioParseError(str(e), f"{location}[{i}]")
        if value <= 0:
            raise ScenarioParseError(f"epsilon entries must be positive, got {entry!r}", f"{location}[{i}]")
        if schedule and value > schedule[-1]:
            raise ScenarioParseError("epsilon schedule must be nonincreasing", f"{location}[{i}]")
        schedule.append(value)
    return schedule


def _check_compatibility(net: Dict[str, Any], suites: List[str], group: Group,
                         action: TransformationGroup, data: Dict[str, Any]):
    family = net["family"]
    for i, suite in enumerate(suites):
        if family not in SUITE_FAMILIES[suite]:
            raise ScenarioParseError(f"suite {suite!r} does not run on net family {family!r}", f"$.suites[{i}]")
    if family == "boundary-means" and action.space.kind != "boundary":
        raise ScenarioParseError("boundary-means needs a boundary space", "$.net.family")
    if family == "lamp-configs" and not _is_lamplighter(group):
        raise ScenarioParseError("lamp-configs needs a lamplighter group", "$.net.family")
    if family == "product-net":
        if not isinstance(group, SemidirectGroup):
            raise ScenarioParseError("product-net needs a semidirect group", "$.group.family")
        if action.space.kind not in ("point", "finite"):
            raise ScenarioParseError("product-net needs a point, finite or rotation space", "$.space.kind")
        for side, factor in (("normal", group.normal), ("acting", group.acting)):
            side_net = net.get(side, {"family": "balls"})
            if side_net["family"] == "lamp-configs" and not isinstance(factor, LampGroup):
                raise ScenarioParseError(f"lamp-configs needs a lamp factor, got {factor.name}", f"$.net.{side}.family")
    diagonal = data.get("kernel_diagonal", "pointwise")
    if diagonal not in ("pointwise", "integrated"):
        raise ScenarioParseError("kernel_diagonal must be pointwise or integrated", "$.kernel_diagonal")
    sample = data.get("kernel_sample", 16)
    _as_int(sample, "$.kernel_sample", 1)


def _is_lamplighter(group: Group) -> bool:
    return (
        isinstance(group, SemidirectGroup)
        and isinstance(group.normal, LampGroup)
        and isinstance(group.acting, FreeAbelianGroup)
        and group.acting.rank == 1
    )


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario document and build its group and action"""
    data = _as_dict(data, "$")
    group = parse_group(_require(data, "group", "$"))
    action = parse_action(data.get("space"), group)
    suites = data.get("suites", [])
    if not isinstance(suites, list):
        raise ScenarioParseError("suites must be a list", "$.suites")
    for i, suite in enumerate(suites):
        if suite not in SUITES:
            raise ScenarioParseError(f"unknown suite {suite!r}", f"$.suites[{i}]")
    net = _parse_net(data.get("net", {"family": "balls"}))
    _check_compatibility(net, suites, group, action, data)
    scenario = Scenario(
        name=str(data.get("name", "scenario")),
        group=group,
        action=action,
        net=net,
        windows=_parse_windows(data.get("windows")),
        suites=tuple(suites),
        epsilon=_parse_epsilon(data.get("epsilon")),
        raw=data,
    )
    logger.info(f"SCENARIO: parsed '{scenario.name}' on {group.name} with suites {list(scenario.suites)}")
    return scenario


def load_scenario(path: str) -> Scenario:
    """Read and parse a scenario file"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario file: {e.strerror}", path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"invalid JSON: {e.msg}", f"{path}:{e.lineno}:{e.colno}")
    return parse_scenario(data)
