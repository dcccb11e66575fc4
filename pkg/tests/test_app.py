import json
from fractions import Fraction
from pathlib import Path

import pytest

from app import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, main
from pipeline.report import parse_report

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def scenario_path(name):
    return str(SCENARIOS / name)


def test_run_passing_scenario(tmp_path):
    out = tmp_path / "report.json"
    assert main(["run", scenario_path("z_balls.json"), "--out", str(out), "--stages", "10"]) == EXIT_PASS
    report = parse_report(out.read_bytes())
    assert report.verdict == "pass"
    assert report.provenance["overrides"] == {"stages": 10}


def test_short_integer_run_misses_epsilon(tmp_path):
    out = tmp_path / "report.json"
    assert main(["run", scenario_path("z_balls.json"), "--out", str(out), "--stages", "4"]) == EXIT_FAIL
    report = parse_report(out.read_bytes())
    assert report.suites["aicm"][0].final.maxima["inv"] == Fraction(2, 9)
    assert report.verdict == "fail"


def test_run_failing_scenario(tmp_path):
    out = tmp_path / "report.csv"
    code = main(["run", scenario_path("f2_balls.json"), "--format", "tabular", "--out", str(out)])
    assert code == EXIT_FAIL
    assert out.read_text(encoding="utf-8").startswith("suite,window,stage,point,element")


def test_run_writes_to_stdout(capsys):
    assert main(["run", scenario_path("lamplighter_foelner.json"), "--stages", "2"]) == EXIT_FAIL
    document = json.loads(capsys.readouterr().out)
    assert document["verdict"] == "fail"


def test_malformed_scenario_is_an_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert main(["run", str(path)]) == EXIT_ERROR
    assert main(["validate", str(path)]) == EXIT_ERROR


def test_bad_overrides_are_errors():
    assert main(["run", scenario_path("z_balls.json"), "--stages", "0"]) == EXIT_ERROR
    assert main(["run", scenario_path("z_balls.json"), "--window-radius", "-2"]) == EXIT_ERROR


def test_missing_file_is_an_error(tmp_path):
    assert main(["run", str(tmp_path / "absent.json")]) == EXIT_ERROR


@pytest.mark.parametrize(
    "name",
    [
        "z_balls.json",
        "f2_balls.json",
        "lamplighter_foelner.json",
        "sign_flip_theorem23.json",
        "f2_boundary_means.json",
        "f2_inner_point_masses.json",
    ],
)
def test_bundled_scenarios_validate(name):
    assert main(["validate", scenario_path(name)]) == EXIT_PASS


def test_list_families(capsys):
    assert main(["list-families"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "lamplighter" in out
    assert "theorem23: product-net" in out
    assert "boundary" in out


def test_unknown_command_exits_through_argparse():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
