import json
from fractions import Fraction

import pytest

from components.groups import FreeGroup, SemidirectGroup
from pipeline.scenario import load_scenario, parse_action, parse_group, parse_scenario
from utils.errors import ScenarioParseError


def z_scenario(**overrides):
    data = {
        "name": "z",
        "group": {"family": "free-abelian", "rank": 1},
        "space": {"kind": "point"},
        "net": {"family": "balls", "stages": 3},
        "windows": [{"elements": [1, -1]}],
        "suites": ["aicm"],
        "epsilon": ["1/10"],
    }
    data.update(overrides)
    return data


def location_of(data):
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario(data)
    return excinfo.value.location


def test_parse_minimal_scenario():
    scenario = parse_scenario(z_scenario())
    assert scenario.group.name == "Z"
    assert scenario.suites == ("aicm",)
    assert scenario.epsilon == [Fraction(1, 10)]
    assert scenario.echo()["epsilon"] == ["1/10"]


def test_defaults():
    scenario = parse_scenario({"group": {"family": "free", "rank": 2}})
    assert isinstance(scenario.group, FreeGroup)
    assert scenario.action.space.kind == "point"
    assert scenario.net == {"family": "balls"}
    assert scenario.windows == [{"space_radius": 1, "group_radius": 1}]
    assert scenario.suites == ()


def test_semidirect_groups():
    group = parse_group({
        "family": "semidirect",
        "normal": {"family": "free-abelian"},
        "acting": {"family": "free-abelian"},
        "tau": "sign-flip",
        "sigma": {"exponential": "2"},
    })
    assert isinstance(group, SemidirectGroup)
    assert group.haar_weight((0, 3)) == 8
    assert parse_group({"family": "lamplighter"}).name == "lamplighter"


@pytest.mark.parametrize(
    "group, location",
    [
        ({"family": "hyperbolic"}, "$.group.family"),
        ({"rank": 2}, "$.group"),
        ({"family": "free", "rank": 0}, "$.group.rank"),
        ({"family": "cyclic"}, "$.group"),
        ({"family": "finite", "table": [[0, 1], [0, 1]]}, "$.group"),
        ({"family": "semidirect", "normal": {"family": "free"}, "acting": {"family": "free-abelian"},
          "tau": "sign-flip"}, "$.group"),
        ({"family": "semidirect", "normal": {"family": "free-abelian"}, "acting": {"family": "free-abelian"},
          "tau": "twist"}, "$.group.tau"),
        ({"family": "semidirect", "normal": {"family": "bogus"}, "acting": {"family": "free-abelian"}},
         "$.group.normal.family"),
    ],
)
def test_group_errors_carry_locations(group, location):
    assert location_of(z_scenario(group=group)) == location


def test_action_errors_carry_locations():
    assert location_of(z_scenario(space={"kind": "torus"})) == "$.space.kind"
    assert location_of(z_scenario(space={"kind": "boundary"})) == "$.space.kind"
    assert location_of(z_scenario(space={"kind": "point", "right": "left"})) == "$.space.right"
    assert location_of(z_scenario(space={"kind": "finite", "points": []})) == "$.space.points"
    assert location_of(z_scenario(space={"kind": "finite", "points": ["u", [1]]})) == "$.space.points[1]"
    assert location_of(z_scenario(space={"kind": "rotation", "order": 0})) == "$.space.order"


def test_finite_weights_are_keyed_by_point_text():
    T = parse_action({"kind": "finite", "points": [0, 1], "weights": {"0": "5", "1": "1/2"}}, FreeGroup(2))
    assert T.space.weight(0) == 5
    assert T.space.weight(1) == Fraction(1, 2)
    T = parse_action({"kind": "finite", "points": ["u", 2], "weights": {"2": "3"}}, FreeGroup(2))
    assert T.space.weight("u") == 1
    assert T.space.weight(2) == 3


def test_finite_weights_reject_unknown_and_ambiguous_keys():
    space = {"kind": "finite", "points": [0, 1], "weights": {"2": "5"}}
    assert location_of(z_scenario(space=space)) == "$.space.weights.2"
    space = {"kind": "finite", "points": [0, 1], "weights": {"1": "-1"}}
    assert location_of(z_scenario(space=space)) == "$.space"
    space = {"kind": "finite", "points": [1, "1"], "weights": {"1": "2"}}
    assert location_of(z_scenario(space=space)) == "$.space.weights"
    space = {"kind": "finite", "points": [0], "weights": ["0"]}
    assert location_of(z_scenario(space=space)) == "$.space.weights"


def test_boundary_spaces_have_no_natural_right_action():
    T = parse_action({"kind": "boundary", "depth": 5}, FreeGroup(2))
    assert not T.has_right_action
    T = parse_action({"kind": "boundary", "depth": 5, "right": "inverse"}, FreeGroup(2))
    assert T.has_right_action


def test_epsilon_schedule_validation():
    assert location_of(z_scenario(epsilon=["1/10", "1/2"])) == "$.epsilon[1]"
    assert location_of(z_scenario(epsilon=["0"])) == "$.epsilon[0]"
    assert location_of(z_scenario(epsilon=["one"])) == "$.epsilon[0]"
    assert location_of(z_scenario(epsilon=[])) == "$.epsilon"


def test_suite_and_net_validation():
    assert location_of(z_scenario(suites=["spectral"])) == "$.suites[0]"
    assert location_of(z_scenario(suites=["aicm", "theorem23"])) == "$.suites[1]"
    assert location_of(z_scenario(net={"family": "spheres"})) == "$.net.family"
    assert location_of(z_scenario(net={"family": "balls", "step": 0})) == "$.net.step"
    assert location_of(z_scenario(net={"family": "indicator-pairs", "pairs": [{}]})) == "$.net.pairs[0]"
    assert location_of(z_scenario(net={"family": "explicit", "stages": []})) == "$.net.stages"


def test_family_compatibility():
    assert location_of(z_scenario(net={"family": "boundary-means"})) == "$.net.family"
    assert location_of(z_scenario(net={"family": "lamp-configs"})) == "$.net.family"
    assert location_of(z_scenario(net={"family": "product-net"}, suites=["theorem23"])) == "$.group.family"
    assert location_of(z_scenario(kernel_diagonal="sup")) == "$.kernel_diagonal"
    assert location_of(z_scenario(kernel_sample=0)) == "$.kernel_sample"


def test_product_net_with_lamp_factor_needs_lamps():
    data = z_scenario(
        group={"family": "semidirect", "normal": {"family": "free-abelian"},
               "acting": {"family": "free-abelian"}, "tau": "sign-flip"},
        net={"family": "product-net", "normal": {"family": "lamp-configs"}},
        suites=["theorem23"],
    )
    assert location_of(data) == "$.net.normal.family"


def test_window_validation():
    assert location_of(z_scenario(windows=[])) == "$.windows"
    assert location_of(z_scenario(windows=[{"elements": []}])) == "$.windows[0].elements"
    assert location_of(z_scenario(windows=[{"group_radius": -1}])) == "$.windows[0].group_radius"


def test_load_scenario_reports_json_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "group": {"family": "free"\n', encoding="utf-8")
    with pytest.raises(ScenarioParseError) as excinfo:
        load_scenario(str(path))
    assert excinfo.value.location.startswith(f"{path}:")
    assert str(excinfo.value).startswith(excinfo.value.location)


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ScenarioParseError):
        load_scenario(str(tmp_path / "absent.json"))


def test_load_scenario_from_file(tmp_path):
    path = tmp_path / "z.json"
    path.write_text(json.dumps(z_scenario()), encoding="utf-8")
    assert load_scenario(str(path)).name == "z"


def test_parse_errors_are_value_errors():
    with pytest.raises(ValueError):
        parse_scenario([])
