"""Numbered acceptance criteria, one test each; the summary prints PASS/FAIL per number."""
import json
import math
import subprocess
import sys
import time

import mpmath
import numpy as np
import pytest

from _gen import random_master, random_pair
from beamcpp.criteria import (
    BeamSection,
    alpha_min,
    helix_contact_angle,
    parallel_curve_orthogonality_residual,
    sufficiency_sample_check,
)
from beamcpp.curves import CircleArc, HermiteSpline, make_parallel_curve
from beamcpp.diffgeo import contact_angle
from beamcpp.projection import (
    Multiplicity,
    bilateral_cpp,
    brute_force_oracle,
    tube_surface_cpp,
    unilateral_cpp,
)
from beamcpp.scenarios import ScenarioConfig, run_scenario

X, Y, Z = np.eye(3)


def cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "beamcpp", *args], capture_output=True,
                          cwd=cwd, check=False)


@pytest.mark.acceptance(1, "helix worked example via the CLI, under 1 s")
def test_helix_worked_example(tmp_path):
    out = tmp_path / "helix.json"
    cli("sweep", "--mu-lo", "0", "--mu-hi", "0.1", "--steps", "2", "--out",
        str(tmp_path / "warm.csv"))  # warm the bytecode cache
    start = time.perf_counter()
    proc = cli("scenario", "helix", "--mu", "0.01", "--out", str(out))
    elapsed = time.perf_counter() - start
    assert proc.returncode == 0, proc.stderr
    derived = json.loads(out.read_text())["derived"]
    print(f"helix: alpha={derived['alpha_deg']:.6f} alpha_min={derived['alpha_min_deg']:.6f} "
          f"in {elapsed:.3f} s")
    assert derived["alpha_deg"] == pytest.approx(8.13, abs=0.05)
    assert derived["alpha_min_deg"] == pytest.approx(11.48, abs=0.05)
    assert derived["alpha_deg"] < derived["alpha_min_deg"]
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "helix family never exceeds alpha_min")
def test_conservatism_over_helix_family():
    mus = np.linspace(0.001, 0.499, 100)
    for mu in mus:
        mu = float(mu)
        # cos(alpha_helix) = sqrt(1 - 2 mu), checked before relying on it
        assert math.cos(helix_contact_angle(mu)) == pytest.approx(math.sqrt(1 - 2 * mu),
                                                                   abs=1e-12)
        assert math.sqrt(1 - 2 * mu) > 1 - 2 * mu
        assert helix_contact_angle(mu) < alpha_min(mu)


@pytest.mark.acceptance(3, "sufficiency sampler: 10,000 trials, 0 violations, under 5 s")
def test_sufficiency_property():
    start = time.perf_counter()
    violations = sufficiency_sample_check(BeamSection(1.0, 1.0), 10_000, seed=20240601)
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 5.0


@pytest.mark.acceptance(4, "degenerate constant-distance configurations")
def test_constant_distance_geometries():
    for name in ("parallel", "circle", "helix"):
        report = run_scenario(ScenarioConfig(name))
        d = report.derived["d"]
        for rep in (report.multiplicity, report.oracle):
            assert rep.kind == Multiplicity.CONTINUUM, name
            assert rep.spread < 1e-9 * d, name
        assert not report.criteria.general_guaranteed, name
        assert not report.criteria.simplified_guaranteed, name
        if name == "circle":
            kin = report.multiplicity.best.kinematics
            assert kin.d == pytest.approx(report.config["section"]["R1"] * 2, abs=1e-12)
            assert kin.kappa2 * kin.d * math.cos(kin.beta2) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.acceptance(5, "tube-surface projection equals radial offset of centerline foot")
def test_tube_equivalence():
    rng = np.random.default_rng(5150)
    checked = 0
    while checked < 200:
        curve, x = random_master(rng)
        uni = unilateral_cpp(x, curve)
        if uni.kind != Multiplicity.UNIQUE:
            continue
        seed = uni.solutions[0]
        d = seed.kinematics.d
        ratio = rng.uniform(0.1, 1.6)
        if abs(ratio - 1.0) < 0.05:
            continue
        R2 = ratio * d
        state = tube_surface_cpp(x, curve, R2)
        x2 = np.array(seed.x2)
        expected = x2 + R2 * (x - x2) / d
        foot = np.array(state.x2)
        scale = max(np.linalg.norm(expected), d, R2)
        assert np.linalg.norm(foot - expected) <= 1e-9 * scale
        d_surf = math.copysign(np.linalg.norm(x - foot), d - R2)
        assert d_surf == pytest.approx(d - R2, abs=1e-10)
        assert state.kinematics.gap == pytest.approx(d - R2, abs=1e-10)
        checked += 1


def _reference_angle(a, b):
    A = [mpmath.mpf(float(v)) for v in a]
    B = [mpmath.mpf(float(v)) for v in b]
    dot = abs(sum(p * q for p, q in zip(A, B)))
    c = dot / mpmath.sqrt(sum(p * p for p in A) * sum(q * q for q in B))
    return float(mpmath.acos(min(c, 1)))


@pytest.mark.acceptance(6, "parallel-curve distance, angle formula and orthogonality residual")
def test_parallel_curve_checks():
    base = CircleArc(np.zeros(3), 3.0, X, Y)
    off = make_parallel_curve(base, 1.0)
    ts = np.linspace(0, 2 * math.pi, 100, endpoint=False)
    gap = np.linalg.norm(off.points(ts) - base.points(ts), axis=1)
    assert np.abs(gap - 1.0).max() <= 1e-10

    spline = HermiteSpline([[0, 0, 0], [1, 1, 0], [2, 0, 1]], [[1, 1, 0], [1, 0, 0.5],
                                                                [1, -1, 0]])
    pairs = [(base, make_parallel_curve(base, d0)) for d0 in (0.5, 1.0, 2.0, 2.9)]
    pairs.append((spline, make_parallel_curve(spline, 0.4, [0.0, 0.0, 1.0])))
    deviations = 0
    for a_curve, b_curve in pairs:
        for t in np.linspace(a_curve.t_lo, a_curve.t_hi, 100, endpoint=False):
            da = a_curve.derivatives(t, 1)[1]
            db = b_curve.derivatives(t, 1)[1]
            with mpmath.workdps(40):
                reference = _reference_angle(da, db)
            assert abs(contact_angle(da, db) - reference) <= 1e-12
            # the tangent of the base is unit in its arc length, that of the offset is not
            t_a = da / np.linalg.norm(da)
            t_b = db / np.linalg.norm(da)
            norm_b = np.linalg.norm(t_b)
            if abs(norm_b - 1.0) > 0.01:
                corrected = abs(t_a @ t_b) / norm_b
                unnormalized = abs(t_a @ t_b)
                assert abs(unnormalized - corrected) > 1e-3
                deviations += 1
    assert deviations > 0

    betas = np.linspace(0, math.pi, 2001)
    for d0 in (0.5, 1.0, 4.0):
        for frac in (0.0, 0.3, 0.9, 0.999):
            vals = [parallel_curve_orthogonality_residual(frac / d0, d0, b) for b in betas]
            assert min(vals) >= (1.0 - frac) - 1e-12
            assert min(vals) > 0
        assert parallel_curve_orthogonality_residual(1.0 / d0, d0, math.pi) == pytest.approx(
            0.0, abs=1e-15)


@pytest.mark.acceptance(7, "Newton and oracle agree on 200 random pairs, under 60 s")
def test_oracle_equivalence():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    mismatches = []
    for k in range(200):
        slave, master = random_pair(rng)
        newton = bilateral_cpp(slave, master)
        oracle = brute_force_oracle(slave, master)
        if newton.kind != oracle.kind:
            mismatches.append((k, newton.kind, oracle.kind))
            continue
        if newton.kind == Multiplicity.UNIQUE:
            a, b = newton.solutions[0], oracle.solutions[0]
            err = max(abs(a.t1 - b.t1) / slave.span, abs(a.t2 - b.t2) / master.span)
            if err > 1e-6:
                mismatches.append((k, "params", err))
    elapsed = time.perf_counter() - start
    assert not mismatches
    assert elapsed < 60.0


BUNDLE = r"""
import json, sys
import numpy as np
sys.path.insert(0, sys.argv[1])
from _gen import random_pair
from beamcpp.criteria import BeamSection, sufficiency_sample_check
from beamcpp.projection import bilateral_cpp
from beamcpp.scenarios import report_to_json, run_scenario, ScenarioConfig
rng = np.random.default_rng(77)
out = []
for _ in range(5):
    s, m = random_pair(rng)
    rep = bilateral_cpp(s, m)
    out.append([rep.kind.value, [(x.t1, x.t2, x.kinematics.d) for x in rep.solutions]])
out.append(sufficiency_sample_check(BeamSection(), 3000, seed=3))
out.append(report_to_json(run_scenario(ScenarioConfig("circle"))))
print(json.dumps(out))
"""


def _strip_workers(report_bytes):
    data = json.loads(report_bytes)
    data["config"]["solver"].pop("workers")
    return json.dumps(data, sort_keys=True)


@pytest.mark.acceptance(8, "byte-identical outputs across runs and worker counts")
def test_determinism(tmp_path):
    from pathlib import Path

    tests_dir = str(Path(__file__).resolve().parent)
    scenes = Path(__file__).resolve().parents[1] / "scenes"
    runs = [subprocess.run([sys.executable, "-c", BUNDLE, tests_dir], capture_output=True,
                           check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1]

    commands = [
        ["analyze", "--scene", str(scenes / "crossing_hermite.json"), "--report", "{out}"],
        ["scenario", "helix", "--mu", "0.01", "--out", "{out}"],
        ["scenario", "parallel-curve", "--out", "{out}"],
        ["sweep", "--mu-lo", "0", "--mu-hi", "0.45", "--steps", "31", "--out", "{out}"],
    ]
    for i, cmd in enumerate(commands):
        seen = []
        out = tmp_path / f"c{i}.out"
        for _ in range(2):
            proc = cli(*[a.replace("{out}", str(out)) for a in cmd])
            assert proc.returncode == 0, proc.stderr
            seen.append((proc.stdout, out.read_bytes()))
        assert seen[0] == seen[1], cmd
        if cmd[0] == "scenario":
            proc = cli(*[a.replace("{out}", str(out)) for a in cmd], "--workers", "4")
            assert proc.stdout == seen[0][0]
            assert _strip_workers(out.read_bytes()) == _strip_workers(seen[0][1])
    oracle_runs = {cli("oracle", "--scene", str(scenes / "helix_axis.json")).stdout
                   for _ in range(2)}
    assert len(oracle_runs) == 1
