"""Command-line front end.

Every command prints its JSON report on stdout; ``--out DIR`` also writes
report.json plus CSV/SVG views.  Errors map to exit codes: 2 for unparsable
input, 3 for invalid input, 4 for other library failures (caps, etc).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .chart import DiscPoint
from .coarse import (
    choose_epsilon,
    compute_W,
    distance_formula_rhs,
    horo_overlap_report,
    make_family,
    pvt_spectrum,
    sample_thick_pairs,
    systole_qi_experiment,
    undistortion_experiment,
    worker_count,
)
from .disc import electrified_distance, hyp_distance, truncated_distance
from .errors import InputError, ParseError, TeichcoreError
from .origami import l_origami, parse_origami, torus, vertex_data
from .report import csv_text, dumps, scatter_svg, write_outputs
from .veech import FuchsianSubgroup, parabolic_constants, veech_group

BUILTIN = {"torus": torus, "L": l_origami, "l": l_origami}


def load_surface(arg: str):
    if arg in BUILTIN:
        return BUILTIN[arg]()
    p = Path(arg)
    if p.exists():
        return parse_origami(p.read_text(), label=p.stem)
    if arg.lstrip().startswith(("h=", "{")):
        return parse_origami(arg)
    raise InputError(f"no such surface file: {arg}")


def load_group(arg: str | None, veech):
    if arg is None:
        return veech
    p = Path(arg)
    if not p.exists():
        raise InputError(f"no such subgroup file: {arg}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {arg}: {exc}") from None
    return FuchsianSubgroup.from_json(data, veech)


def parse_point(text: str) -> complex:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise ParseError(f"expected a point as x,y, got {text!r}") from None
    if not y > 0 or not math.isfinite(x):
        raise InputError(f"point {text} is not in the upper half-plane")
    return complex(x, y)


def positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return v

    return conv


def nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return v


def provenance(args, certificates: dict | None = None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return {
        "tool": "teichcore",
        "version": __version__,
        "config": config,
        "threads": worker_count(),
        "certificates": certificates or {},
    }


# --------------------------------------------------------------------------
# commands


def cmd_analyze(args):
    s = load_surface(args.surface)
    vd = vertex_data(s)
    veech = veech_group(s)
    classes = veech.cusp_classes
    consts = parabolic_constants(classes, args.eps0, args.eps0)
    report = {
        "surface": s.to_json(),
        "vertex_angles_over_2pi": list(vd.angles),
        "stratum": list(vd.stratum),
        "genus": vd.genus,
        "veech_index": veech.index,
        "veech_generators": [g.rows() for g in veech.generators],
        "rho": str(consts.rho) if consts.has_cusps else None,
        "cusp_classes": [c.summary() for c in classes],
    }
    rows = []
    for c in classes:
        for k, cyl in enumerate(c.cylinders):
            rows.append((c.index, c.direction.a, c.direction.b, k, cyl.area, cyl.circumference_multiplier))
    csvs = {"cylinders.csv": csv_text(["class", "a", "b", "cylinder", "area", "multiplier"], rows)}
    certs = {"veech_orbit": f"complete SL(2,Z) orbit of size {veech.index}"}
    return report, csvs, {}, certs


def cmd_constants(args):
    s = load_surface(args.surface)
    veech = veech_group(s)
    group = load_group(args.group, veech)
    choice = choose_epsilon(s, group, eps0=args.eps0, radius=args.radius)
    fam = make_family(s, group, eps0=args.eps0, eps=choice.eps, radius=args.radius)
    w = compute_W(s, group, fam, args.grid_step)
    overlap = horo_overlap_report(fam, args.radius)
    consts = parabolic_constants(fam.classes, fam.eps, fam.eps0)
    report = {
        "eps": choice.to_json(),
        "W": {"value": w.value, "argmin": [w.argmin.real, w.argmin.imag], "grid_points": w.points, "exact": False},
        "R": {"value": overlap.R, "pairs": overlap.pairs, "t": overlap.t, "bound": overlap.theoretical_bound},
        "rho": str(consts.rho),
        "m_low": float(consts.m_low),
        "m_high": float(consts.m_high),
    }
    certs = {
        "eps": f"wedge minimum {'certified' if choice.certified else 'over the enumerated range only'}; {choice.pairs_checked} horodisc pairs checked up to radius {choice.radius}",
        "W": f"grid minimum at step {args.grid_step}; upper-biased sampling estimate",
        "family": fam.certificate(),
    }
    return report, {}, {}, certs


def cmd_pvt(args):
    s = load_surface(args.surface)
    veech = veech_group(s)
    group = load_group(args.group, veech)
    spectrum = pvt_spectrum(s, group, args.bound, radius=args.radius, seed=args.seed)
    rows = [(str(v), float(v)) for v in spectrum.values]
    csvs = {"pvt.csv": csv_text(["value", "float"], rows)}
    certs = {"pvt": "complete for a lattice (class-conjugated enumeration)" if spectrum.certified else f"group-ball enumeration up to radius {args.radius}"}
    return spectrum.to_json(), csvs, {}, certs


def cmd_distance(args):
    s = load_surface(args.surface)
    x, y = parse_point(args.src), parse_point(args.dst)
    report = {"kind": args.kind, "from": [x.real, x.imag], "to": [y.real, y.imag]}
    certs = {}
    if args.kind == "hyp":
        report["distance"] = hyp_distance(x, y)
    else:
        veech = veech_group(s)
        group = load_group(args.group, veech)
        fam = make_family(s, group, eps0=args.eps0, radius=args.radius)
        res = truncated_distance(x, y, fam) if args.kind == "tr" else electrified_distance(x, y, fam)
        report["distance"] = res.distance
        report["path"] = [p.to_json() for p in res.path]
        report["eps"] = fam.eps
        if args.formula:
            val, terms = distance_formula_rhs(DiscPoint(x.real, x.imag, s), DiscPoint(y.real, y.imag, s), fam, args.c)
            report["formula"] = {"value": val, "terms": terms, "c": args.c}
        certs["family"] = fam.certificate()
    return report, {}, {}, certs


def cmd_experiment(args):
    s = load_surface(args.surface)
    veech = veech_group(s)
    group = load_group(args.group, veech)
    fam = make_family(s, group, eps0=args.eps0)
    if args.which == "undistortion":
        bp = parse_point(args.basepoint)
        q = undistortion_experiment(s, group, fam, args.radius, bp)
        header = ["word_length", "truncated_distance", "word"]
        xl, yl = "word length", "truncated distance"
    else:
        pairs = sample_thick_pairs(fam, args.pairs, seed=args.seed)
        q = systole_qi_experiment(s, group, fam, pairs)
        header = ["electrified_distance", "hempel_estimate", "pair"]
        xl, yl = "electrified distance", "Hempel estimate"
    report = q.to_json()
    report["eps"] = fam.eps
    csvs = {f"{args.which}.csv": csv_text(header, q.samples)}
    svgs = {f"{args.which}.svg": scatter_svg([(a, b) for a, b, _ in q.samples], xl, yl, f"K = {q.K:.4f}")}
    certs = {"family": fam.certificate(), "K": "re-checkable from the sample list"}
    return report, csvs, svgs, certs


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="teichcore", description="Teichmüller disc computations for origamis.")
    ap.add_argument("--version", action="version", version=f"teichcore {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, group=True):
        p.add_argument("surface", help="origami file (JSON or 'h=... v=...'), or torus / L")
        if group:
            p.add_argument("--group", help="subgroup JSON file (default: the whole Veech group)")
        p.add_argument("--eps0", type=positive(float), default=0.5)
        p.add_argument("--radius", type=nonneg_int, default=12, help="enumeration radius")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="directory for report.json and derived CSV/SVG")

    p = sub.add_parser("analyze", help="vertex data, Veech group and cusp classes")
    common(p, group=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("constants", help="eps, W and the overlap constant")
    common(p)
    p.add_argument("--grid-step", type=positive(float), default=0.02)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("pvt", help="parabolic wedge spectrum")
    common(p)
    p.add_argument("--bound", type=positive(float), required=True)
    p.set_defaults(func=cmd_pvt)

    p = sub.add_parser("distance", help="hyperbolic, truncated or electrified distance")
    common(p)
    p.add_argument("--kind", choices=["tr", "el", "hyp"], default="tr")
    p.add_argument("--from", dest="src", required=True, metavar="X,Y")
    p.add_argument("--to", dest="dst", required=True, metavar="X,Y")
    p.add_argument("--formula", action="store_true", help="also evaluate the coarse distance formula")
    p.add_argument("-c", type=positive(float), default=2.0)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("experiment", help="undistortion or systole quasi-isometry experiment")
    p.add_argument("which", choices=["undistortion", "systole"])
    common(p)
    p.add_argument("--basepoint", default="0.1,1.5", metavar="X,Y")
    p.add_argument("--pairs", type=positive(int), default=50)
    p.set_defaults(func=cmd_experiment, radius=6)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        report, csvs, svgs, certs = args.func(args)
    except TeichcoreError as exc:
        print(f"teichcore: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    report = {"result": report, "provenance": provenance(args, certs)}
    if args.out:
        write_outputs(args.out, report, csvs, svgs)
    sys.stdout.write(dumps(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
