import csv
import json
import math
from pathlib import Path

import pytest

from beamcpp.cli import main
from beamcpp.scenarios import report_from_json

SCENES = Path(__file__).resolve().parents[1] / "scenes"


def write_scene(tmp_path, data, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


SKEW = {
    "slave": {"type": "line", "base": [0, 0, 0], "direction": [1, 0, 0], "t_lo": -1, "t_hi": 1},
    "master": {"type": "line", "base": [0, 0, 0.2], "direction": [0, 1, 0], "t_lo": -1, "t_hi": 1},
    "section": {"R1": 0.1, "R2": 0.1},
}


def test_analyze_skew_lines(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["analyze", "--scene", write_scene(tmp_path, SKEW), "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1] == "VERDICT unique=yes simplified_guaranteed=yes"
    rep = report_from_json(report.read_text())
    assert rep.multiplicity.solutions[0].kinematics.d == pytest.approx(0.2)


def test_analyze_circle_scene(tmp_path, capsys):
    code = main(["analyze", "--scene", str(SCENES / "circle_axis.json"),
                 "--report", str(tmp_path / "c.json")])
    assert code == 0
    assert "VERDICT unique=no simplified_guaranteed=no" in capsys.readouterr().out


def test_missing_radius_names_key(tmp_path, capsys):
    bad = json.loads(json.dumps(SKEW))
    del bad["section"]["R1"]
    code = main(["analyze", "--scene", write_scene(tmp_path, bad), "--report",
                 str(tmp_path / "r.json")])
    assert code == 2
    assert "R1" in capsys.readouterr().err


@pytest.mark.parametrize("patch, key", [
    ({"section": {"R1": 1, "R2": 1, "radius": 2}}, "radius"),
    ({"mu_max": float("inf")}, "mu_max"),
    ({"slave": {"type": "line", "base": [0, 0], "direction": [1, 0, 0]}}, "base"),
    ({"master": {"type": "spiral"}}, "master"),
])
def test_scene_validation_errors(tmp_path, capsys, patch, key):
    data = dict(SKEW)
    data.update(patch)
    # json.dumps writes inf as Infinity, which the schema must refuse
    path = write_scene(tmp_path, data)
    assert main(["oracle", "--scene", path, "--samples", "100"]) == 2
    assert key in capsys.readouterr().err


def test_unreadable_scene(tmp_path, capsys):
    assert main(["oracle", "--scene", str(tmp_path / "nope.json")]) == 2


def test_oracle_command(capsys):
    assert main(["oracle", "--scene", str(SCENES / "skew_lines.json"), "--samples", "120"]) == 0
    assert capsys.readouterr().out.startswith("oracle: UNIQUE from 14400 samples")
    assert main(["oracle", "--scene", str(SCENES / "skew_lines.json"), "--samples", "10"]) == 2


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--mu-lo", "0", "--mu-hi", "0.49", "--steps", "50", "--out",
                 str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh, strict=True))
    assert rows[0] == ["mu", "alpha_min_deg", "alpha_helix_deg"]
    body = rows[1:]
    assert len(body) == 50 and all(len(r) == 3 for r in body)
    mu0, amin0, ahel0 = map(float, body[0])
    assert (mu0, amin0, ahel0) == (0.0, 0.0, 0.0)
    mu1, amin1, ahel1 = map(float, body[1])
    assert mu1 == pytest.approx(0.01)
    assert amin1 == pytest.approx(11.478, abs=1e-3)
    assert ahel1 == pytest.approx(8.130, abs=1e-3)
    for r in body:
        mu, amin, ahel = map(float, r)
        assert ahel <= amin
        if mu > 0:
            digits = r[1].replace(".", "").replace("-", "").lstrip("0").split("e")[0]
            assert len(digits) >= 12


@pytest.mark.parametrize("args", [
    ["--mu-lo", "0.3", "--mu-hi", "0.2", "--steps", "5"],
    ["--mu-lo", "0", "--mu-hi", "0.5", "--steps", "5"],
    ["--mu-lo", "-0.1", "--mu-hi", "0.2", "--steps", "5"],
    ["--mu-lo", "0", "--mu-hi", "0.2", "--steps", "1"],
    ["--mu-lo", "nan", "--mu-hi", "0.2", "--steps", "3"],
])
def test_sweep_rejects_bad_range(tmp_path, args):
    assert main(["sweep", *args, "--out", str(tmp_path / "s.csv")]) == 2


def test_scenario_helix(tmp_path, capsys):
    out = tmp_path / "h.json"
    assert main(["scenario", "helix", "--mu", "0.01", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "VERDICT unique=no simplified_guaranteed=no" in text
    rep = report_from_json(out.read_text())
    assert rep.derived["alpha_deg"] == pytest.approx(8.13, abs=0.05)
    assert rep.derived["alpha_min_deg"] == pytest.approx(11.48, abs=0.05)


def test_scenario_parallel_gap(tmp_path):
    out = tmp_path / "p.json"
    assert main(["scenario", "parallel", "--d0", "1.5", "--R", "1", "--out", str(out)]) == 0
    rep = report_from_json(out.read_text())
    assert rep.multiplicity.kind.value == "CONTINUUM"
    assert rep.derived["gap"] == pytest.approx(-0.5)


def test_scenario_circle_ratio(tmp_path):
    out = tmp_path / "c.json"
    assert main(["scenario", "circle", "--rbar-over-2R", "1.0", "--out", str(out)]) == 0
    rep = report_from_json(out.read_text())
    assert not rep.criteria.assumptions.ii_ok
    assert rep.criteria.simplified.mu_max == pytest.approx(0.5)


def test_scenario_input_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scenario", "spiral"])
    assert exc.value.code == 2
    assert main(["scenario", "helix", "--mu", "0.7"]) == 2
    assert main(["scenario", "circle", "--rbar", "2", "--rbar-over-2R", "1"]) == 2
    assert main(["scenario", "parallel", "--R", "-1"]) == 2


def test_solver_failure_exit_code(monkeypatch, capsys):
    from beamcpp import scenarios
    from beamcpp.errors import ProjectionError

    def boom(*args, **kwargs):
        raise ProjectionError("no converged minimum")

    monkeypatch.setattr(scenarios, "bilateral_cpp", boom)
    assert main(["scenario", "parallel"]) == 3
    assert "solver failure" in capsys.readouterr().err


def test_outputs_are_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        main(["analyze", "--scene", str(SCENES / "crossing_hermite.json"), "--report", str(path)])
        outs.append((path.read_bytes(), capsys.readouterr().out))
    assert outs[0] == outs[1]


def test_degrees_in_human_output(capsys):
    main(["scenario", "helix", "--mu", "0.01"])
    out = capsys.readouterr().out
    assert "alpha=8.130102 deg" in out
    assert f"alpha_min={math.degrees(math.acos(0.98)):.6f} deg" in out
