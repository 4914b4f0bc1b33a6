"""Scenario files (JSON, schema version 1) and report serialization."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import jsonschema
import numpy as np
from scipy.spatial.transform import Rotation

from .body import Polygon2, Polytope, convex_hull
from .errors import ScenarioError
from .generators import (
    make_ball,
    make_box,
    make_cross_polytope,
    make_ellipsoid,
    make_random_polytope,
    make_revolution_body,
    rng_for,
)
from .geometry import Hyperplane, reflect_point
from .harness import SamplingPolicy, Scenario, Status, TheoremReport, TolerancePolicy

SCHEMA_VERSION = 1

_vector = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 4}
_hyperplane = {
    "type": "object",
    "required": ["normal", "offset"],
    "properties": {"normal": _vector, "offset": {"type": "number"}},
    "additionalProperties": False,
}
_transform = {
    "type": "object",
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {
        "mirror": _hyperplane,
        "translate": _vector,
        "rotate": {
            "type": "object",
            "required": ["axis", "angle_deg"],
            "properties": {"axis": _vector, "angle_deg": {"type": "number"}, "center": _vector},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}
_body = {
    "type": "object",
    "oneOf": [
        {"required": ["generator"]},
        {"required": ["vertices"]},
        {"required": ["of"]},
    ],
    "properties": {
        "generator": {
            "enum": ["ball", "ellipsoid", "revolution", "random_polytope", "box", "cross_polytope"]
        },
        "params": {"type": "object"},
        "vertices": {"type": "array", "items": _vector, "minItems": 3},
        "of": {"enum": ["K1"]},
        "transforms": {"type": "array", "items": _transform},
    },
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mirrortomo scenario",
    "type": "object",
    "required": ["schema_version", "K1", "K2", "H", "p1", "p2"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "dim": {"enum": [3, 4]},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "K1": _body,
        "K2": _body,
        "H": _hyperplane,
        "p1": _vector,
        "p2": _vector,
        "gamma": _hyperplane,
        "tolerance": {
            "type": "object",
            "properties": {
                "mirror_tol": {"type": "number", "exclusiveMinimum": 0},
                "conclusion_tol": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "sampling": {
            "type": "object",
            "properties": {
                "n_angles": {"type": "integer", "minimum": 0},
                "n_offsets": {"type": "integer", "minimum": 0},
                "n_random": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

POLYGON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mirrortomo polygon",
    "type": "object",
    "required": ["schema_version", "polygon"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "polygon": {
            "type": "object",
            "oneOf": [{"required": ["generator"]}, {"required": ["vertices"]}],
            "properties": {
                "generator": {"enum": ["regular", "ellipse"]},
                "params": {"type": "object"},
                "vertices": {"type": "array", "items": _vector, "minItems": 3},
            },
            "additionalProperties": False,
        },
        "n_dirs": {"type": "integer", "minimum": 1},
        "orbit": {
            "type": "object",
            "properties": {
                "start_angle_deg": {"type": "number"},
                "steps": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_finite = {"type": "number"}
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mirrortomo verify report",
    "type": "object",
    "required": [
        "schema_version", "scenario", "verdict", "verdict_text", "counts", "hypothesis_pass_rate",
        "conclusion_distance", "conclusion_threshold", "point_check", "mirror_threshold",
        "diameter", "sigma", "substituted", "note",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "scenario": {"type": "object"},
        "verdict": {"enum": ["CONSISTENT", "HYPOTHESIS_FAILS", "INCONSISTENT_WITNESS"]},
        "verdict_text": {"type": "string"},
        "counts": {
            "type": "object",
            "required": ["pass", "fail", "skipped", "total"],
            "properties": {k: {"type": "integer", "minimum": 0} for k in ("pass", "fail", "skipped", "total")},
        },
        "hypothesis_pass_rate": _finite,
        "conclusion_distance": _finite,
        "conclusion_threshold": _finite,
        "point_check": _finite,
        "mirror_threshold": _finite,
        "diameter": _finite,
        "sigma": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["point", "dist_p1", "dist_p2", "dist_gap"],
                    "properties": {"point": {"type": "array", "items": _finite}},
                },
            ]
        },
        "substituted": {"type": "boolean"},
        "note": {"type": "string"},
        "reduction": {"type": "object"},
        "timings": {"type": "object"},
    },
}

LINES_COLUMNS = [
    "index", "kind", "angle", "offset",
    "base_x", "base_y", "base_z", "dir_x", "dir_y", "dir_z",
    "status", "dist_bisector_0", "dist_bisector_1", "min_distance",
    "area_1", "area_2", "threshold",
]

SAMPLING_NOTE = (
    "the hypothesis is checked on sampled lines only; a CONSISTENT verdict "
    "means no sampled line failed, not that every line in H passes"
)


def _field_path(err: jsonschema.ValidationError) -> str:
    path = "/".join(str(p) for p in err.absolute_path)
    return path or "<root>"


def validate(doc: dict, schema: dict, source: str = "scenario") -> None:
    """Raise :class:`ScenarioError` naming the offending field."""
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as err:
        raise ScenarioError(f"{source}: field {_field_path(err)!r}: {err.message}") from None


def load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ScenarioError(f"cannot read {path}: {err.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"{path}: not valid JSON ({err.msg} at line {err.lineno})") from None


# --------------------------------------------------------------------------
# bodies
# --------------------------------------------------------------------------


def _generate(spec: dict, dim: int, seed: int, label: str) -> Polytope:
    name = spec["generator"]
    params = dict(spec.get("params", {}))
    try:
        if name == "random_polytope":
            params.setdefault("seed", int(rng_for(seed, label).integers(2**63)))
            params.setdefault("dim", dim)
            return make_random_polytope(**params)
        if name == "cross_polytope":
            params.setdefault("dim", dim)
            return make_cross_polytope(**params)
        factory = {
            "ball": make_ball,
            "ellipsoid": make_ellipsoid,
            "revolution": make_revolution_body,
            "box": make_box,
        }[name]
        return factory(**params)
    except TypeError as err:
        raise ScenarioError(f"{label}/params: {err}") from None


def _apply(body: Polytope, transform: dict, label: str) -> Polytope:
    (kind, arg), = transform.items()
    dim = body.dim
    if kind == "mirror":
        plane = Hyperplane(arg["normal"], arg["offset"])
        if plane.dim != dim:
            raise ScenarioError(f"{label}/transforms: mirror has dimension {plane.dim}, body {dim}")
        return Polytope(reflect_point(plane, body.vertices))
    if kind == "translate":
        shift = np.asarray(arg, dtype=float)
        if shift.shape != (dim,):
            raise ScenarioError(f"{label}/transforms: translate needs {dim} components")
        return Polytope(body.vertices + shift)
    if dim != 3:
        raise ScenarioError(f"{label}/transforms: rotate is only available in 3D")
    rot = Rotation.from_rotvec(np.deg2rad(arg["angle_deg"]) * np.asarray(arg["axis"], dtype=float)
                               / np.linalg.norm(arg["axis"]))
    center = np.asarray(arg.get("center", np.zeros(3)), dtype=float)
    return Polytope(rot.apply(body.vertices - center) + center)


def build_body(spec: dict, dim: int, seed: int, label: str, others: dict) -> Polytope:
    if "of" in spec:
        body = others[spec["of"]]
    elif "vertices" in spec:
        body = convex_hull(spec["vertices"])
    else:
        body = _generate(spec, dim, seed, label)
    for t in spec.get("transforms", []):
        body = _apply(body, t, label)
    if body.dim != dim:
        raise ScenarioError(f"{label}: body has dimension {body.dim}, scenario dim is {dim}")
    return body


def _plane(doc: dict, key: str, dim: int) -> Hyperplane:
    if len(doc[key]["normal"]) != dim:
        raise ScenarioError(f"field {key + '/normal'!r}: expected {dim} components")
    return Hyperplane(doc[key]["normal"], doc[key]["offset"])


def scenario_from_dict(doc: dict) -> tuple[Scenario, Hyperplane | None]:
    """Build the scenario (and the optional projection hyperplane gamma)."""
    validate(doc, SCENARIO_SCHEMA)
    dim = doc.get("dim", 3)
    seed = doc.get("seed", 0)
    for key in ("p1", "p2"):
        if len(doc[key]) != dim:
            raise ScenarioError(f"field {key!r}: expected {dim} components")
    bodies: dict = {}
    for label in ("K1", "K2"):
        if label == "K1" and "of" in doc["K1"]:
            raise ScenarioError("field 'K1/of': K1 cannot refer to another body")
        bodies[label] = build_body(doc[label], dim, seed, label, bodies)
    sampling = SamplingPolicy(**{**doc.get("sampling", {}), "seed": seed})
    tol = TolerancePolicy(**doc.get("tolerance", {}))
    try:
        scenario = Scenario(
            bodies["K1"], bodies["K2"], _plane(doc, "H", dim), doc["p1"], doc["p2"],
            tol, sampling, doc.get("name", ""),
        )
    except ValueError as err:
        raise ScenarioError(str(err)) from None
    gamma = _plane(doc, "gamma", dim) if "gamma" in doc else None
    return scenario, gamma


def load_scenario(path) -> tuple[dict, Scenario, Hyperplane | None]:
    doc = load_json(path)
    scenario, gamma = scenario_from_dict(doc)
    return doc, scenario, gamma


def polygon_from_dict(doc: dict) -> Polygon2:
    validate(doc, POLYGON_SCHEMA, "polygon file")
    spec = doc["polygon"]
    if "vertices" in spec:
        poly = Polygon2.hull_of(spec["vertices"])
    else:
        params = spec.get("params", {})
        try:
            if spec["generator"] == "regular":
                poly = Polygon2.regular(**params)
            else:
                poly = Polygon2.ellipse(**params)
        except TypeError as err:
            raise ScenarioError(f"polygon/params: {err}") from None
    if poly.is_degenerate:
        raise ScenarioError("polygon: vertices do not span a region")
    return poly


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def fmt(x) -> str:
    """Locale-free, round-trip exact text for a float."""
    return format(float(x), ".17g")


def report_dict(doc: dict, report: TheoremReport) -> dict:
    counts = {
        "pass": report.count(Status.PASS),
        "fail": report.count(Status.FAIL),
        "skipped": report.count(Status.SKIPPED_EMPTY),
        "total": len(report.results),
    }
    threshold = report.results[0].threshold if report.results else None
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": doc,
        "verdict": report.verdict.value,
        "verdict_text": report.verdict_text,
        "counts": counts,
        "hypothesis_pass_rate": report.hypothesis_pass_rate,
        "conclusion_distance": report.conclusion_distance,
        "conclusion_threshold": report.conclusion_threshold,
        "point_check": report.point_check,
        "mirror_threshold": threshold if threshold is not None else 0.0,
        "diameter": report.diameter,
        "sigma": report.sigma,
        "substituted": report.substituted,
        "note": SAMPLING_NOTE,
    }


def lines_csv(report: TheoremReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LINES_COLUMNS)
    for r in report.results:
        prov = r.line.provenance
        line = r.line.line
        dists = [fmt(d) for d in r.distances] + [""] * (2 - len(r.distances))
        w.writerow([
            prov["index"], prov["kind"], fmt(prov.get("angle", 0.0)), fmt(prov.get("offset", 0.0)),
            *(fmt(v) for v in line.base), *(fmt(v) for v in line.direction),
            r.status.value, *dists,
            fmt(r.min_distance) if r.distances else "",
            fmt(r.section_areas[0]), fmt(r.section_areas[1]), fmt(r.threshold),
        ])
    return buf.getvalue()


def rows_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, str)) else fmt(v) for v in row])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
