"""Command line entry point: ``mirrortomo {verify,sphere-lemmas,circle-char,project}``.

Exit codes: 0 success or CONSISTENT, 1 input error, 2 negative outcome
(HYPOTHESIS_FAILS, a failed planar test), 3 INCONSISTENT_WITNESS.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import scenario_io as sio
from .errors import ConstructionBreakdown, GeometryError, PointOutsideBody
from .geometry import Hyperplane
from .harness import Verdict, projection_reduction, projection_symmetry_check, verify_theorem
from .planar import boundary_tolerance, iterate_rectangles, rectangle_battery
from .sphere import ball_unequal_distance_search, sphere_offset_counterexample

log = logging.getLogger("mirrortomo")

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE, EXIT_WITNESS = 0, 1, 2, 3
VERDICT_EXIT = {
    Verdict.CONSISTENT: EXIT_OK,
    Verdict.HYPOTHESIS_FAILS: EXIT_NEGATIVE,
    Verdict.INCONSISTENT_WITNESS: EXIT_WITNESS,
}


class InputError(Exception):
    pass


def _floats(text: str, n: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{what}: expected {n} numbers, got {len(vals)}")
    if not all(np.isfinite(vals)):
        raise InputError(f"{what}: numbers must be finite")
    return vals


def _q_pairs(text: str) -> list[tuple[float, float]]:
    pairs = []
    for chunk in text.split(";"):
        if chunk.strip():
            pairs.append(tuple(_floats(chunk, 2, "--q-pairs")))
    return pairs


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _run_and_write(doc, scenario, out: Path, timings: bool, extra: dict | None = None) -> int:
    t0 = time.perf_counter()
    report = verify_theorem(scenario)
    elapsed = time.perf_counter() - t0
    log.info("%s: %s in %.2fs", scenario.name or "scenario", report.verdict.value, elapsed)
    body = sio.report_dict(doc, report)
    if extra:
        body.update(extra)
    if timings:
        body["timings"] = {"verify_seconds": elapsed}
    sio.write_text(out / "report.json", sio.dump_json(body))
    sio.write_text(out / "lines.csv", sio.lines_csv(report))
    print(f"{report.verdict.value}: {report.verdict_text}")
    return VERDICT_EXIT[report.verdict]


def cmd_verify(args) -> int:
    doc, scenario, _ = sio.load_scenario(args.scenario)
    if scenario.dim != 3:
        raise InputError("verify expects a 3D scenario; use 'project' for 4D files")
    return _run_and_write(doc, scenario, Path(args.out), args.timings)


def cmd_project(args) -> int:
    doc, scenario4, gamma = sio.load_scenario(args.scenario)
    if scenario4.dim != 4:
        raise InputError("project expects a scenario with dim 4")
    if args.gamma_normal is not None:
        gamma = Hyperplane(_floats(args.gamma_normal, 4, "--gamma-normal"), args.gamma_offset)
    if gamma is None:
        raise InputError("no projection hyperplane: pass --gamma-normal or set 'gamma' in the file")
    scenario = projection_reduction(scenario4, gamma)
    out = Path(args.out)

    sym = projection_symmetry_check(scenario.K1, scenario.K2, scenario.H, args.n_dirs, args.proj_tol)
    rows = [(float(t), float(d)) for t, d in zip(sym.angles, sym.distances)]
    sio.write_text(out / "projections.csv", sio.rows_csv(["angle", "hausdorff"], rows))
    extra = {
        "reduction": {
            "gamma": gamma.as_dict(),
            "projection_symmetry_passed": sym.passed,
            "projection_symmetry_max": float(sym.distances.max()) if len(rows) else 0.0,
            "projection_symmetry_tol": args.proj_tol,
            "co_occurs_with_conclusion": sym.co_occurs,
        }
    }
    return _run_and_write(doc, scenario, out, args.timings, extra)


def cmd_sphere_lemmas(args) -> int:
    x0s = _floats(args.x0_grid, what="--x0-grid")
    ks = _floats(args.k_grid, what="--k-grid")
    offsets = []
    for x0 in x0s:
        for k in ks:
            res = sphere_offset_counterexample(args.r, x0, k, n_vertices=args.n_vertices)
            offsets.append(res.as_dict())
    h0 = Hyperplane([0.0, 0.0, 1.0], args.h0)
    searches = []
    for z1, z2 in _q_pairs(args.q_pairs):
        res = ball_unequal_distance_search(args.r, (0, 0, z1), (0, 0, z2), h0)
        searches.append({"q1": [0.0, 0.0, z1], "q2": [0.0, 0.0, z2], "H0": h0.as_dict(), **res.as_dict()})

    margins_ok = all(c["margin"] > 0 for c in offsets)
    witnesses_ok = all(s["status"] == "WITNESS" for s in searches if not s["symmetric"])
    doc = {
        "r": args.r,
        "n_vertices": args.n_vertices,
        "offset_lemma": offsets,
        "unequal_distance_search": searches,
        "all_margins_positive": margins_ok,
        "all_asymmetric_pairs_have_witness": witnesses_ok,
        "note": (
            "areas are pi (r^2 - d^2) with d the plane's distance from the center; "
            "great_disc_area is pi r^2, the largest possible section area"
        ),
    }
    out = Path(args.out)
    sio.write_text(out / "sphere_lemmas.json", sio.dump_json(doc))
    failed_mirror = sum(c["mirror_status"] != "FAIL" for c in offsets)
    print(
        f"{len(offsets)} offset cells, margins positive: {margins_ok}; "
        f"{failed_mirror} cell(s) where the discretized mirror test did not fail; "
        f"{len(searches)} q-pairs, witnesses where required: {witnesses_ok}"
    )
    return EXIT_OK if margins_ok and witnesses_ok else EXIT_NEGATIVE


def cmd_circle_char(args) -> int:
    doc = sio.load_json(args.poly)
    poly = sio.polygon_from_dict(doc)
    a = np.array(_floats(args.a, 2, "--a"))
    b = np.array(_floats(args.b, 2, "--b"))
    n_dirs = doc.get("n_dirs", 128)
    orbit_cfg = doc.get("orbit", {})
    out = Path(args.out)

    battery = rectangle_battery(poly, a, b, n_dirs=n_dirs)
    rows = [
        (r.angle, r.chord_a.length, r.chord_b.length, r.ortho_residual, r.corner_residual)
        for r in battery.records
    ]
    sio.write_text(
        out / "circle_char.csv",
        sio.rows_csv(["angle", "chord_a_len", "chord_b_len", "ortho_residual", "corner_residual"], rows),
    )

    start = np.deg2rad(orbit_cfg.get("start_angle_deg", 40.0))
    orbit_rows, orbit_msg = [], "converged"
    try:
        orbit = iterate_rectangles(
            poly, a, b, (np.cos(start), np.sin(start)), steps=orbit_cfg.get("steps", 50)
        )
        dist = orbit.distance_to_limit()
        orbit_rows = [(n, float(c[0]), float(c[1]), float(dist[n])) for n, c in enumerate(orbit.c)]
        orbit_ok = bool(dist[-1] <= 1e-3)
        if not orbit_ok:
            orbit_msg = f"final distance to limit {dist[-1]:.3g}"
    except ConstructionBreakdown as err:
        orbit_ok, orbit_msg = False, f"construction broke down: {err}"
    sio.write_text(out / "rectangle_orbit.csv", sio.rows_csv(["step", "c_x", "c_y", "dist_to_limit"], orbit_rows))

    tol = boundary_tolerance(poly)
    print(
        f"rectangle battery: {'pass' if battery.passed else 'fail'} "
        f"(max residual {battery.max_residual:.3g}, tol {tol:.3g}); orbit: {orbit_msg}"
    )
    return EXIT_OK if battery.passed and orbit_ok else EXIT_NEGATIVE


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# options whose values are comma lists that may start with a minus sign
_LIST_OPTIONS = {"--a", "--b", "--gamma-normal", "--x0-grid", "--k-grid", "--q-pairs"}


def _glue_list_values(argv: list[str]) -> list[str]:
    """Rewrite ``--b -0.3,0`` as ``--b=-0.3,0`` so argparse does not read the
    value as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mirrortomo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the mirror-section test on a 3D scenario")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--timings", action="store_true", help="add wall-clock timings to report.json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sphere-lemmas", help="ball counterexample sweep and unequal-distance search")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--x0-grid", default="0.25,0.5,0.75")
    p.add_argument("--k-grid", default="0.1,0.5,2.0")
    p.add_argument("--q-pairs", default="0.3,-0.5;0.3,-0.3",
                   help="semicolon-separated z1,z2 pairs for q1=(0,0,z1), q2=(0,0,z2)")
    p.add_argument("--h0", type=float, default=-0.8, help="height of the plane H0: z = h0")
    p.add_argument("--n-vertices", type=int, default=2000)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_sphere_lemmas)

    p = sub.add_parser("circle-char", help="inscribed-rectangle battery and rectangle orbit on a polygon")
    p.add_argument("poly")
    p.add_argument("--a", required=True, help="x,y")
    p.add_argument("--b", required=True, help="x,y")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_circle_char)

    p = sub.add_parser("project", help="reduce a 4D scenario to 3D and verify it")
    p.add_argument("scenario")
    p.add_argument("--gamma-normal", help="a,b,c,d (default: 'gamma' from the file)")
    p.add_argument("--gamma-offset", type=float, default=0.0)
    p.add_argument("--n-dirs", type=int, default=50)
    p.add_argument("--proj-tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_project)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_list_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InputError, GeometryError) as err:
        kind = "point outside body" if isinstance(err, PointOutsideBody) else "input error"
        print(f"mirrortomo: {kind}: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
