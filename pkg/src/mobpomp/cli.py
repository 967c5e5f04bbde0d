"""Command-line interface.

Every command prints one JSON report on stdout. Exit statuses: 0 success,
1 property violation, 2 input error, 3 numerical failure, 4 I/O failure.

Coordinates are given as ``x,y`` (or ``x,y,z`` with ``--sphere``); negative
values such as ``-1,0`` are accepted as positionals.
"""

import argparse
import json
import re
import sys

import numpy as np

from . import __version__
from .classifier import (
    Triangle,
    alpha_beta_profile,
    classify_direct,
    classify_via_theorems,
    distance_triple,
    region_nonempty,
    sides,
)
from .curves import CIRCLE_RESIDUAL_TOL, QUARTIC_RESIDUAL_TOL, CurveCoefficientEstimator
from .exceptions import IllConditionedSample, InputError, IoFailure, MobPompError
from .metrics import DEFAULT_RESIDUAL_TOL, MetricKind, inverse_stereographic
from .render import (
    GridSpec,
    contour_fidelity,
    factor_field,
    figure_overlays,
    render_sign_map,
    write_image,
    zero_contour,
)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_COORDS = re.compile(rf"^{_NUMBER}(?:,{_NUMBER})+$")


class ParseError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def parse_coords(text, dims=(2,)):
    parts = text.strip().split(",")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ParseError(f"cannot parse coordinates {text!r}") from None
    if len(vals) not in dims:
        raise ParseError(f"expected {' or '.join(map(str, dims))} comma-separated numbers, got {text!r}")
    if not all(np.isfinite(vals)):
        raise ParseError(f"coordinates must be finite: {text!r}")
    return vals


def parse_grid(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise ParseError(f"--grid expects WxH, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _protect_negative_coords(argv):
    # argparse would read "-1,0" as an option flag
    return [" " + a if a.startswith("-") and _COORDS.match(a) else a for a in argv]


def build_parser():
    p = _Parser(prog="mobpomp", description="Mobius-Pompeiu point classification for metric spaces")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, vertices=True):
        if vertices:
            sp.add_argument("A", help="vertex A as x,y (or x,y,z with --sphere)")
            sp.add_argument("B")
            sp.add_argument("C")
            sp.add_argument("--sphere", action="store_true", help="vertices are unit-sphere points; project them")
            sp.add_argument("--metric", default="euclid", choices=["euclid", "euclidean", "chordal"])
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("classify", help="classify one query point")
    common(sp)
    sp.add_argument("--point", required=True, help="query point M as x,y")

    sp = sub.add_parser("coeffs", help="quartic and circle coefficients")
    common(sp)

    sp = sub.add_parser("render", help="write a region image")
    common(sp)
    sp.add_argument("--grid", default="400x400")
    sp.add_argument("--window", default=None, help="x0,x1,y0,y1")
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", default=None, choices=["ppm", "svg"])
    sp.add_argument("--great-circles", action="store_true")
    sp.add_argument("--circumcircle", action="store_true")

    sp = sub.add_parser("verify", help="run property suites")
    common(sp, vertices=False)
    sp.add_argument("--suite", default="all", choices=list(SUITES) + ["all"])
    sp.add_argument("--samples", type=int, default=10_000)
    return p


def _triangle(args):
    dims = (3,) if args.sphere else (2,)
    pts = [parse_coords(getattr(args, k).strip(), dims) for k in "ABC"]
    if args.sphere:
        pts = [list(inverse_stereographic(s)) for s in pts]
    return Triangle.from_vertices(pts, MetricKind.parse(args.metric))


def _triangle_payload(t):
    a, b, c = sides(t)
    return {"vertices": t.vertices.tolist(), "metric": t.metric.value, "sides": {"a": a, "b": b, "c": c}}


def cmd_classify(args):
    t = _triangle(args)
    raw = parse_coords(args.point.strip(), (2, 3) if args.sphere else (2,))
    M = list(inverse_stereographic(raw)) if len(raw) == 3 else raw
    d = distance_triple(t, M)
    direct = classify_direct(d, args.tol)
    theorems = classify_via_theorems(d, args.tol)
    agree = direct.verdict == theorems.verdict
    results = {
        "triangle": _triangle_payload(t),
        "point": M,
        "distance_triple": d._asdict(),
        "profile": alpha_beta_profile(d).to_dict(),
        "direct": direct.to_dict(),
        "via_theorems": theorems.to_dict(),
        "agreement": agree,
        "verdict": direct.verdict.name,
        "region_nonempty": {str(w): region_nonempty(t, w) for w in (1, 2, 3)},
    }
    violations = [] if agree else [{"check": "route-agreement", "direct": direct.to_dict(), "via_theorems": theorems.to_dict()}]
    return results, violations


def cmd_coeffs(args):
    t = _triangle(args)
    est = CurveCoefficientEstimator(metric=t.metric.value, random_state=args.seed).fit(t.vertices)
    results = {"triangle": _triangle_payload(t), **est.report().to_dict()}
    violations = []
    if est.alpha_.certificate.residual > QUARTIC_RESIDUAL_TOL:
        violations.append({"check": "quartic-residual", "residual": est.alpha_.certificate.residual})
    for i, b in enumerate(est.betas_, start=1):
        if b.certificate.residual > CIRCLE_RESIDUAL_TOL:
            violations.append({"check": "circle-residual", "which": i, "residual": b.certificate.residual})
    return results, violations


def cmd_render(args):
    t = _triangle(args)
    w, h = parse_grid(args.grid)
    if args.window:
        g = GridSpec(*parse_coords(args.window, (4,)), w, h)
    else:
        g = GridSpec.around(t, w, h)
    fmt = args.format or ("svg" if args.out.lower().endswith(".svg") else "ppm")
    img = render_sign_map(t, g, args.tol)
    overlays = figure_overlays(t, g, great_circles=args.great_circles, circumcircle_overlay=args.circumcircle)
    write_image(img, args.out, fmt, overlays)
    counts = img.counts()
    violations = []
    for which in (1, 2, 3):
        if not region_nonempty(t, which) and counts.get(which, 0):
            violations.append({"check": "empty-region-pixels", "which": which, "pixels": counts[which]})
    fidelity = {}
    for which in (1, 2, 3):
        fld = factor_field(t, which)
        fidelity[str(which)] = contour_fidelity(fld, zero_contour(fld, g), g)
    results = {
        "triangle": _triangle_payload(t),
        "grid": g.__dict__,
        "format": fmt,
        "out": args.out,
        "pixel_counts": {str(k): v for k, v in counts.items()},
        "legend": {str(k): v for k, v in img.legend.items()},
        "polylines": len(overlays.polylines),
        "notes": overlays.notes,
        "region_nonempty": {str(w): region_nonempty(t, w) for w in (1, 2, 3)},
    }
    results["contour_fidelity"] = fidelity
    return results, violations


def cmd_verify(args):
    suites = run_suite(args.suite, args.samples, args.seed)
    results = {"suites": [s.to_dict() for s in suites]}
    violations = [v for s in suites for v in s.violations]
    return results, violations


COMMANDS = {"classify": cmd_classify, "coeffs": cmd_coeffs, "render": cmd_render, "verify": cmd_verify}


def run(argv=None):
    """Execute the CLI and return ``(report_dict, exit_status)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    report = {"command": argv, "seed": 0, "tolerance": None, "results": None, "violations": [], "errors": []}
    try:
        args = build_parser().parse_args(_protect_negative_coords(argv))
        report["seed"] = args.seed
        report["tolerance"] = {
            "classification": args.tol if args.tol is not None else "1e-12*(d1+d2+d3)",
            "residual": DEFAULT_RESIDUAL_TOL,
        }
        if args.tol is not None and (not np.isfinite(args.tol) or args.tol < 0):
            raise ParseError("--tol must be finite and nonnegative")
        results, violations = COMMANDS[args.command](args)
        report["results"] = results
        report["violations"] = violations
        status = EXIT_VIOLATION if violations else EXIT_OK
    except IllConditionedSample as exc:
        report["errors"].append({"type": type(exc).__name__, "message": str(exc)})
        status = EXIT_NUMERIC
    except IoFailure as exc:
        report["errors"].append({"type": type(exc).__name__, "message": str(exc)})
        status = EXIT_IO
    except (InputError, MobPompError, ValueError) as exc:
        report["errors"].append({"type": type(exc).__name__, "message": str(exc)})
        status = EXIT_INPUT
    report["exit_status"] = status
    return report, status


def main(argv=None):
    report, status = run(argv)
    json.dump(report, sys.stdout, indent=2, sort_keys=False, default=_json_default)
    sys.stdout.write("\n")
    return status


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
