"""Command-line front end.

    beamcpp analyze --scene scene.json --report report.json
    beamcpp sweep --mu-lo 0 --mu-hi 0.49 --steps 50 --out sweep.csv
    beamcpp oracle --scene scene.json --samples 200
    beamcpp scenario helix --mu 0.01 --out helix.json

Exit codes: 0 success, 2 input error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace

import numpy as np

from .criteria import BeamSection, alpha_min, helix_contact_angle
from .errors import BeamCppError, ProjectionError
from .projection import brute_force_oracle
from .scenarios import ScenarioConfig, report_to_json, run_scenario, verdict_line
from .schema import load_scene

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3


class InputError(Exception):
    pass


def _deg(x):
    return "undefined" if x is None else f"{math.degrees(x):.6f} deg"


def _num(x):
    return "undefined" if x is None else f"{x:.12g}"


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _summary(report) -> list[str]:
    mult, crit = report.multiplicity, report.criteria
    best = mult.best
    kin = best.kinematics
    lines = [
        f"multiplicity: {mult.kind.value} ({len(mult.solutions)} solutions, "
        f"{len(mult.boundary_solutions)} on the boundary)",
        f"oracle: {report.oracle.kind.value} [{report.status}]",
        f"closest pair: t1={_num(best.t1)} t2={_num(best.t2)} d={_num(kin.d)} g={_num(kin.gap)}",
        f"alpha={_deg(kin.alpha)} beta1={_deg(kin.beta1)} beta2={_deg(kin.beta2)}",
        f"kappa1={_num(kin.kappa1)} kappa2={_num(kin.kappa2)}",
        f"general: (a) {_num(crit.general.lhs_a)} < 1 {crit.general.ok_a}; "
        f"(b) {_num(crit.general.lhs_b)} > {_num(crit.general.rhs_b)} {crit.general.ok_b}",
        f"simplified: mu_max={_num(crit.simplified.mu_max)} ({crit.mu_source}) "
        f"alpha_min={_deg(crit.simplified.alpha_min)} "
        f"(a) {crit.simplified.ok_2a} (b) {crit.simplified.ok_2b}",
        f"assumptions: i {crit.assumptions.i_ok} ii {crit.assumptions.ii_ok}",
    ]
    for key, value in report.derived.items():
        if key.endswith("_deg"):
            lines.append(f"{key}: {_num(value)}")
    lines.extend(f"note: {w}" for w in crit.warnings)
    return lines


def _emit(report, out):
    if out:
        _write(out, report_to_json(report))
    for line in _summary(report):
        print(line)
    print(verdict_line(report))


def cmd_analyze(args):
    slave, master, section, mu_max, solver = load_scene(args.scene)
    config = ScenarioConfig("custom", section=section, mu_max=mu_max, solver=solver,
                            slave=slave, master=master)
    _emit(run_scenario(config), args.report)


def cmd_sweep(args):
    lo, hi, steps = args.mu_lo, args.mu_hi, args.steps
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 <= lo < hi < 0.5):
        raise InputError("need 0 <= mu-lo < mu-hi < 0.5")
    if steps < 2:
        raise InputError("steps must be at least 2")
    rows = []
    for mu in np.linspace(lo, hi, steps):
        mu = float(mu)
        rows.append([f"{mu:.17g}", f"{math.degrees(alpha_min(mu)):.17g}",
                     f"{math.degrees(helix_contact_angle(mu)):.17g}"])
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mu", "alpha_min_deg", "alpha_helix_deg"])
            w.writerows(rows)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {steps} rows to {args.out}")


def cmd_oracle(args):
    if args.samples < 100:
        raise InputError("samples must be at least 100")
    slave, master, section, _, solver = load_scene(args.scene)
    rep = brute_force_oracle(slave, master, args.samples, solver.spread_tol,
                             solver.continuum_span, (section.R1, section.R2))
    print(f"oracle: {rep.kind.value} from {rep.samples} samples, spread {rep.spread:.3e}")
    for s in rep.solutions:
        print(f"  interior t1={s.t1:.12g} t2={s.t2:.12g} d={s.kinematics.d:.12g} "
              f"alpha={_deg(s.kinematics.alpha)}")
    for s in rep.boundary_solutions:
        print(f"  boundary t1={s.t1:.12g} t2={s.t2:.12g} d={s.kinematics.d:.12g}")


def cmd_scenario(args):
    R1 = args.R1 if args.R1 is not None else args.R
    R2 = args.R2 if args.R2 is not None else args.R
    section = BeamSection(R1, R2, args.k)
    rbar = args.rbar
    if args.rbar_over_2R is not None:
        if rbar is not None:
            raise InputError("give either --rbar or --rbar-over-2R")
        rbar = args.rbar_over_2R * (R1 + R2)
    config = ScenarioConfig(args.name, section=section, d0=args.d0, rbar=rbar, r=args.r,
                            h=args.h, mu=args.mu, mu_max=args.mu_max, turns=args.turns)
    overrides = {k: getattr(args, k) for k in ("n_start", "workers", "oracle_samples")
                 if getattr(args, k) is not None}
    if overrides:
        config = replace(config, solver=replace(config.solver, **overrides))
    _emit(run_scenario(config), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beamcpp",
                                description="Closest point projection analysis for beam contact.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="solve and check a scene file")
    a.add_argument("--scene", required=True)
    a.add_argument("--report", required=True)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="tabulate alpha_min and the helix contact angle over mu")
    s.add_argument("--mu-lo", type=float, required=True)
    s.add_argument("--mu-hi", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="brute-force classification of a scene")
    o.add_argument("--scene", required=True)
    o.add_argument("--samples", type=int, default=200)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("scenario", help="run a named geometry")
    c.add_argument("name", choices=["parallel", "circle", "helix", "parallel-curve"])
    c.add_argument("--R", type=float, default=1.0, help="both radii")
    c.add_argument("--R1", type=float)
    c.add_argument("--R2", type=float)
    c.add_argument("--k", type=float, default=1.0)
    c.add_argument("--d0", type=float)
    c.add_argument("--rbar", type=float)
    c.add_argument("--rbar-over-2R", dest="rbar_over_2R", type=float)
    c.add_argument("--r", type=float)
    c.add_argument("--h", type=float)
    c.add_argument("--mu", type=float)
    c.add_argument("--mu-max", type=float)
    c.add_argument("--turns", type=float, default=1.0)
    c.add_argument("--n-start", type=int)
    c.add_argument("--workers", type=int)
    c.add_argument("--oracle-samples", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ProjectionError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InputError, ValueError) as exc:
        # domain and config errors subclass ValueError
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BeamCppError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
