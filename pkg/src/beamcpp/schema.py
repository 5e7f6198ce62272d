"""Scene-file schema and report (de)serialization.

Scene files are JSON. Keys follow the symbols used throughout the package
(R1, R2, k, mu_max, d0, rbar, r, h). Unknown keys are rejected.
"""
from __future__ import annotations

import json
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from .criteria import BeamSection
from .curves import TWO_PI, CircleArc, Curve, Helix, HermiteSpline, Line, ParallelOffset
from .errors import ConfigError
from .projection import SolverSettings

Vec3 = tuple[float, float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, frozen=True)


class LineDef(_Strict):
    type: Literal["line"]
    base: Vec3
    direction: Vec3
    t_lo: float = 0.0
    t_hi: float = 1.0


class CircleDef(_Strict):
    type: Literal["circle"]
    center: Vec3
    rbar: float = Field(gt=0)
    e1: Vec3 = (1.0, 0.0, 0.0)
    e2: Vec3 = (0.0, 1.0, 0.0)
    t_lo: float = 0.0
    t_hi: float = TWO_PI


class HelixDef(_Strict):
    type: Literal["helix"]
    axis_point: Vec3
    axis: Vec3
    r: float = Field(gt=0)
    h: float = Field(ge=0)
    phase: float = 0.0
    t_lo: float = 0.0
    t_hi: float = TWO_PI


class HermiteDef(_Strict):
    type: Literal["hermite"]
    positions: list[Vec3] = Field(min_length=2)
    tangents: list[Vec3] = Field(min_length=2)


class ParallelDef(_Strict):
    type: Literal["parallel"]
    base: "CurveDef"
    d0: float = Field(gt=0)
    field: Union[Literal["frenet"], Vec3] = "frenet"


CurveDef = Annotated[Union[LineDef, CircleDef, HelixDef, HermiteDef, ParallelDef],
                     Field(discriminator="type")]
ParallelDef.model_rebuild()


class SectionDef(_Strict):
    R1: float = Field(gt=0)
    R2: float = Field(gt=0)
    k: float = Field(default=1.0, ge=1)


class SolverDef(_Strict):
    n_start: Optional[int] = Field(default=None, ge=2)
    newton_tol: Optional[float] = Field(default=None, gt=0)
    dedup_tol: Optional[float] = Field(default=None, gt=0)
    max_newton_iter: Optional[int] = Field(default=None, ge=1)
    spread_tol: Optional[float] = Field(default=None, gt=0)
    oracle_samples: Optional[int] = Field(default=None, ge=100)
    workers: Optional[int] = Field(default=None, ge=1)


class SceneFile(_Strict):
    slave: CurveDef
    master: CurveDef
    section: SectionDef
    mu_max: Optional[float] = Field(default=None, ge=0)
    solver: Optional[SolverDef] = None


def curve_from_def(c) -> Curve:
    if c.type == "line":
        return Line(c.base, c.direction, c.t_lo, c.t_hi)
    if c.type == "circle":
        return CircleArc(c.center, c.rbar, c.e1, c.e2, c.t_lo, c.t_hi)
    if c.type == "helix":
        return Helix(c.axis_point, c.axis, c.r, c.h, c.phase, c.t_lo, c.t_hi)
    if c.type == "hermite":
        return HermiteSpline(c.positions, c.tangents)
    from .curves import make_parallel_curve

    return make_parallel_curve(curve_from_def(c.base), c.d0, c.field)


def _t(v):
    return [float(x) for x in np.asarray(v).reshape(-1)]


def curve_to_dict(curve: Curve) -> dict:
    if isinstance(curve, Line):
        return {"type": "line", "base": _t(curve.base), "direction": _t(curve.direction),
                "t_lo": curve.t_lo, "t_hi": curve.t_hi}
    if isinstance(curve, CircleArc):
        return {"type": "circle", "center": _t(curve.center), "rbar": float(curve.radius),
                "e1": _t(curve.e1), "e2": _t(curve.e2), "t_lo": curve.t_lo, "t_hi": curve.t_hi}
    if isinstance(curve, Helix):
        return {"type": "helix", "axis_point": _t(curve.axis_point), "axis": _t(curve.axis),
                "r": float(curve.radius), "h": float(curve.slope), "phase": float(curve.phase),
                "t_lo": curve.t_lo, "t_hi": curve.t_hi}
    if isinstance(curve, HermiteSpline):
        return {"type": "hermite", "positions": curve.positions.tolist(),
                "tangents": curve.tangents.tolist()}
    if isinstance(curve, ParallelOffset):
        fld = "frenet" if curve.direction is None else _t(curve.direction)
        return {"type": "parallel", "base": curve_to_dict(curve.base), "d0": float(curve.d0),
                "field": fld}
    raise TypeError(f"cannot serialize {type(curve).__name__}")


_curve_adapter = TypeAdapter(CurveDef)


def curve_from_dict(data: dict) -> Curve:
    return curve_from_def(_curve_adapter.validate_python(data))


def describe_validation_error(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"])
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def load_scene(path) -> tuple[Curve, Curve, BeamSection, Optional[float], SolverSettings]:
    """Parse and validate a scene file; raises ConfigError naming offending keys."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scene file {path}: {exc}") from exc
    try:
        scene = SceneFile.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(describe_validation_error(exc)) from exc
    overrides = {}
    if scene.solver is not None:
        overrides = {k: v for k, v in scene.solver.model_dump().items() if v is not None}
    section = BeamSection(scene.section.R1, scene.section.R2, scene.section.k)
    return (curve_from_def(scene.slave), curve_from_def(scene.master), section, scene.mu_max,
            SolverSettings(**overrides))


def dumps(obj, adapter: TypeAdapter) -> str:
    data = adapter.dump_python(obj, mode="json")
    return json.dumps(data, indent=2) + "\n"
