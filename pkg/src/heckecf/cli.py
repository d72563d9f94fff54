"""Command-line surface: every library capability behind one subcommand.

Outputs are deterministic for fixed inputs: text and CSV use fixed-digit
decimals produced from exact enclosures, JSON carries a format_version and
pairs every decimal with its exact coefficient vector, SVG rendering strips
volatile metadata.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import attractor as attr
from . import measures as meas
from . import minkowski as mink
from . import render
from .errors import DomainError
from .field import AlgebraicNumber, make_field, to_float
from .hecke import GENERATOR_NAMES, generator
from .symbolic import embed, farey_map, parse_tree, selfdual_sufficient, word

FORMAT_VERSION = 1
OUTDIR_ENV = "HECKE_CF_OUTDIR"


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _dec(value, digits=12):
    if isinstance(value, AlgebraicNumber):
        return to_float(value, digits)[0]
    if isinstance(value, Fraction):
        return to_float(make_field(3).from_rational(value), digits)[0]
    return f"{float(value):.{digits}f}"


def _exact_json(value, digits=12):
    """Decimal string paired with the exact coefficient vector."""
    if isinstance(value, AlgebraicNumber):
        return {"dec": _dec(value, digits), "coeffs": [str(c) for c in value.coeffs]}
    frac = Fraction(value)
    return {"dec": _dec(frac, digits), "coeffs": [str(frac)]}


def _matrix_json(g, digits=12):
    return {"entries": [[_exact_json(g.a, digits), _exact_json(g.b, digits)],
                        [_exact_json(g.c, digits), _exact_json(g.d, digits)]],
            "det": g.det}


def _matrix_text(g):
    return f"[[{g.a}, {g.b}], [{g.c}, {g.d}]]  det {g.det:+d}"


def _resolve(path):
    if path is None:
        return None
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(args, text):
    path = _resolve(getattr(args, "output", None))
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_bytes(args, blob):
    path = _resolve(getattr(args, "output", None))
    if path:
        with open(path, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)


def _emit_figure(args, fig):
    path = _resolve(getattr(args, "figure", None))
    if path:
        with open(path, "wb") as fh:
            fh.write(render.figure_to_svg_bytes(fig))


def _json_text(payload):
    payload = {"format_version": FORMAT_VERSION, **payload}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _parse_fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational literal: {text!r}") from exc


def _tree_from_args(args):
    return parse_tree(args.m, args.tree)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_field(args):
    spec = make_field(args.m)
    lam = spec.lam()
    if args.format == "json":
        _emit(args, _json_text({
            "m": spec.m, "degree": spec.degree,
            "minpoly": list(spec.minpoly),
            "lambda": _exact_json(lam, args.digits),
            "inv_lambda": _exact_json(spec.inv_lambda(), args.digits)}))
    else:
        lines = [f"m = {spec.m}",
                 f"degree = {spec.degree}",
                 f"minpoly (little-endian) = {list(spec.minpoly)}",
                 f"lambda = {_dec(lam, args.digits)}",
                 f"1/lambda = {_dec(spec.inv_lambda(), args.digits)}"]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_generators(args):
    spec = make_field(args.m)
    gens = {name: generator(spec, name) for name in GENERATOR_NAMES}
    if args.format == "json":
        _emit(args, _json_text({
            "m": spec.m,
            "generators": {k: _matrix_json(g, args.digits) for k, g in gens.items()}}))
    elif args.format == "csv":
        rows = [[k, str(g.a), str(g.b), str(g.c), str(g.d), g.det]
                for k, g in gens.items()]
        _emit(args, _csv_text(["name", "a", "b", "c", "d", "det"], rows))
    else:
        _emit(args, "".join(f"{k} = {_matrix_text(g)}\n" for k, g in gens.items()))
    return 0


def _cmd_embed(args):
    w = word(args.m, args.word)
    image = embed(w, args.target)
    if args.target == "C":
        if args.format == "json":
            _emit(args, _json_text({"m": args.m, "word": str(w), "target": "C",
                                    "slope": str(image.a), "offset": str(image.b)}))
        else:
            _emit(args, f"{w} -> x |-> {image.a}*x + {image.b}\n")
    else:
        if args.format == "json":
            _emit(args, _json_text({"m": args.m, "word": str(w),
                                    "target": args.target,
                                    "matrix": _matrix_json(image, args.digits)}))
        else:
            _emit(args, f"{w} -> {_matrix_text(image)}\n")
    return 0


def _cmd_tree_validate(args):
    tree = _tree_from_args(args)
    status = selfdual_sufficient(tree).value
    payload = {
        "m": tree.m,
        "leaves": tree.leaf_strings(),
        "levels": [w.level for w in tree.leaves],
        "selfdual_sufficient": status,
    }
    if args.format == "json":
        _emit(args, _json_text({"valid": True, **payload}))
    else:
        _emit(args, f"valid tree over m={tree.m}: {tree}\n"
                    f"selfdual-sufficient check: {status}\n")
    return 0


def _cmd_map_table(args):
    tree = _tree_from_args(args)
    fmap = farey_map(tree)
    rows = []
    for i, br in enumerate(fmap.branches):
        rows.append([i, str(br.word),
                     _dec(br.domain.lo.num, args.digits),
                     _dec(br.domain.hi.num, args.digits),
                     str(br.matrix.a), str(br.matrix.b),
                     str(br.matrix.c), str(br.matrix.d), br.matrix.det])
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree),
            "branches": [{
                "index": i, "leaf": str(br.word),
                "domain": [_exact_json(br.domain.lo.num, args.digits),
                           _exact_json(br.domain.hi.num, args.digits)],
                "matrix": _matrix_json(br.matrix, args.digits)}
                for i, br in enumerate(fmap.branches)]}))
    elif args.format == "csv":
        _emit(args, _csv_text(
            ["index", "leaf", "lo", "hi", "a", "b", "c", "d", "det"], rows))
    else:
        lines = [f"branch {i}: leaf {r[1]} on [{r[2]}, {r[3]}]" for i, r in enumerate(rows)]
        _emit(args, "\n".join(lines) + "\n")
    fig = render.map_graph_figure(fmap, title=f"m={tree.m}: {tree}")
    if args.format == "svg":
        _emit_bytes(args, render.figure_to_svg_bytes(fig))
    else:
        _emit_figure(args, fig)
    return 0


def _interval_payload(pair, digits):
    lo, hi = pair
    return [_exact_json(lo, digits), _exact_json(hi, digits)]


def _cmd_attractor(args):
    tree = _tree_from_args(args)
    result = attr.attractor_cover(tree, args.level)
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree),
            "status": result.status, "level": result.level,
            "component_history": [list(t) for t in result.component_history],
            "cover": [_interval_payload(p, args.digits)
                      for p in result.cover.intervals]}))
    elif args.format == "csv":
        rows = [[_dec(lo, args.digits), _dec(hi, args.digits)]
                for lo, hi in result.cover.intervals]
        _emit(args, _csv_text(["lo", "hi"], rows))
    else:
        lines = [f"status = {result.status} (level {result.level})",
                 f"components = {result.cover.components}"]
        lines += [f"  [{_dec(lo, args.digits)}, {_dec(hi, args.digits)}]"
                  for lo, hi in result.cover.intervals]
        _emit(args, "\n".join(lines) + "\n")
    fig = render.cover_figure(tree, result.level, title=f"covers: {tree}")
    if args.format == "svg":
        _emit_bytes(args, render.figure_to_svg_bytes(fig))
    else:
        _emit_figure(args, fig)
    return 0


def _cmd_dual(args):
    tree = _tree_from_args(args)
    result = attr.attractor_cover(tree, args.level)
    dual = attr.dual_map(tree, result)
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree), "status": result.status,
            "branches": [{
                "index": i, "word": str(br.word),
                "matrix": _matrix_json(br.matrix, args.digits),
                "domain": [_interval_payload(p, args.digits)
                           for p in br.domain.intervals]}
                for i, br in enumerate(dual.branches)]}))
    else:
        lines = []
        for i, br in enumerate(dual.branches):
            doms = " u ".join(f"[{_dec(lo, args.digits)}, {_dec(hi, args.digits)}]"
                              for lo, hi in br.domain.intervals)
            lines.append(f"branch {i}: inverse of B_{br.word} on {doms}")
        _emit(args, "\n".join(lines) + "\n")
    fig = render.dual_graph_figure(dual, title=f"dual of {tree}")
    if args.format == "svg":
        _emit_bytes(args, render.figure_to_svg_bytes(fig))
    else:
        _emit_figure(args, fig)
    return 0


def _cmd_census(args):
    tree = _tree_from_args(args)
    report = attr.component_census(attr.attractor_cover(tree, args.level))
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree),
            "counts": list(report.counts), "stabilized": report.stabilized,
            "hint": report.hint, "note": report.note}))
    elif args.format == "csv":
        rows = list(enumerate(report.counts))
        _emit(args, _csv_text(["level", "components"], rows))
    else:
        _emit(args, f"counts by level: {list(report.counts)}\n"
                    f"stabilized: {report.stabilized}\n"
                    f"hint: {report.hint} ({report.note})\n")
    return 0


def _cmd_minkowski_eval(args):
    spec = make_field(args.m)
    if args.table:
        rows = []
        top = spec.inv_lambda()
        for k in range(args.table + 1):
            x = top * Fraction(k, args.table)
            val = mink.evaluate(spec, x, args.depth)
            rows.append([_dec(x, args.digits), _dec(Fraction(val), args.digits)])
        _emit(args, _csv_text(["x", "M(x)"], rows))
        return 0
    x = _parse_fraction(args.x)
    value = mink.evaluate(spec, x, args.depth)
    stream = mink.digits(spec, x, args.depth)
    if args.format == "json":
        _emit(args, _json_text({
            "m": args.m, "x": str(x), "depth": args.depth,
            "value": {"rational": str(value), "dec": _dec(value, args.digits)},
            "error_bound": str(Fraction(1, (args.m - 1) ** args.depth)),
            "digits": list(stream.digits)}))
    else:
        _emit(args, f"M({x}) = {value} = {_dec(value, args.digits)} "
                    f"(+- {(args.m - 1)}^-{args.depth})\n"
                    f"digits: {''.join(map(str, stream.digits))}\n")
    return 0


def _cmd_minkowski_invert(args):
    spec = make_field(args.m)
    y = _parse_fraction(args.y)
    bracket = mink.invert(spec, y, args.depth)
    width = bracket.length()
    if args.format == "json":
        _emit(args, _json_text({
            "m": args.m, "y": str(y), "depth": args.depth,
            "bracket": [_exact_json(bracket.lo.num, args.digits),
                        _exact_json(bracket.hi.num, args.digits)],
            "width": _exact_json(width, args.digits)}))
    else:
        _emit(args, f"M^-1({y}) in [{_dec(bracket.lo.num, args.digits)}, "
                    f"{_dec(bracket.hi.num, args.digits)}] "
                    f"(width {_dec(width, args.digits)})\n")
    return 0


def _cmd_hoelder(args):
    spec = make_field(args.m)
    data = mink.hoelder(spec)
    if args.format == "json":
        _emit(args, _json_text({
            "m": args.m,
            "frobenius_square": _exact_json(data.t, args.digits),
            "rho": {"dec": f"{data.rho:.15g}", "bounds": [f"{b:.17g}" for b in data.rho_bounds]},
            "alpha": {"dec": f"{data.alpha:.15g}",
                      "bounds": [f"{b:.17g}" for b in data.alpha_bounds]}}))
    else:
        _emit(args, f"t = {data.t} (Frobenius square of the extremal digit matrix)\n"
                    f"rho = {data.rho:.12f}\n"
                    f"alpha = {data.alpha:.6f}\n")
    return 0


def _cmd_jsr(args):
    spec = make_field(args.m)
    bounds = mink.jsr_bruteforce(spec, args.n_max)
    data = mink.hoelder(spec)
    if args.format == "json":
        _emit(args, _json_text({
            "m": args.m, "n_max": args.n_max,
            "lower": f"{bounds.lower:.15g}", "upper": f"{bounds.upper:.15g}",
            "rho": f"{data.rho:.15g}"}))
    else:
        _emit(args, f"lower = {bounds.lower:.12f}\nupper = {bounds.upper:.12f}\n"
                    f"rho   = {data.rho:.12f}\n")
    return 0


def _cmd_density(args):
    tree = _tree_from_args(args)
    ctx = meas.density_context(tree, level=args.level)
    top = ctx.field.inv_lambda()
    rows = []
    for k in range(1, args.points + 1):
        x = top * Fraction(k, args.points + 1)
        value, err = meas.mu_density(ctx, x)
        rows.append([_dec(x, args.digits), f"{value:.12g}", f"{err:.6g}"])
    _emit(args, _csv_text(["x", "h", "error_bound"], rows))
    return 0


def _cmd_transfer_check(args):
    tree = _tree_from_args(args)
    ctx = meas.density_context(tree, level=args.level, picture=args.picture)
    worst = 0.0
    rows = []
    count = 0
    k = 0
    while count < args.points and k < 100 * args.points:
        k += 1
        if args.picture == "infinite":
            x = ctx.field.from_rational(Fraction(4 * k, 4 * args.points + 1))
        else:
            x = ctx.field.inv_lambda() * Fraction(k, 4 * args.points + 1)
            if args.side == "dual" and not ctx.result.cover.contains(x):
                continue
        res = meas.transfer_residual(ctx, args.side, x)
        rows.append([_dec(x, args.digits), f"{res:.6g}"])
        worst = max(worst, res)
        count += 1
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree), "side": args.side,
            "picture": args.picture, "points": args.points,
            "max_residual": f"{worst:.6g}"}))
    elif args.format == "csv":
        _emit(args, _csv_text(["x", "residual"], rows))
    else:
        _emit(args, f"max residual over {args.points} points: {worst:.6g}\n")
    return 0


def _cmd_orbit(args):
    tree = _tree_from_args(args)
    ctx = meas.density_context(tree, level=args.level)
    if args.seed_preset:
        seed = meas.seed_preset(args.seed_preset)
    elif args.seed_x is not None and args.seed_y is not None:
        seed = meas.ExtensionPoint(x=_parse_fraction(args.seed_x),
                                   y=_parse_fraction(args.seed_y))
    else:
        raise DomainError("provide --seed-preset or both --seed-x and --seed-y")
    result = meas.orbit(ctx, seed, args.count,
                        precision_bits=args.precision_bits, mode=args.mode)
    digits = min(args.digits, 17)
    rows = [[f"{x:.{digits}f}", f"{y:.{digits}f}"] for x, y in result.points]
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree), "mode": result.mode,
            "precision_bits": result.precision_bits,
            "count": len(result.points),
            "points": rows}))
    else:
        _emit(args, _csv_text(["x", "y"], rows))
    fig = render.orbit_figure(result.points, title=f"orbit: {tree}")
    if args.format == "svg":
        _emit_bytes(args, render.figure_to_svg_bytes(fig))
    else:
        _emit_figure(args, fig)
    return 0


def _cmd_poincare(args):
    tree = _tree_from_args(args)
    ctx = meas.density_context(tree, level=2)
    sums = meas.poincare_partial_sum(ctx, args.n)
    if args.format == "json":
        _emit(args, _json_text({
            "m": tree.m, "tree": str(tree),
            "partial_sums": [f"{s:.12g}" for s in sums]}))
    elif args.format == "csv":
        _emit(args, _csv_text(["k", "S_k"], list(enumerate(f"{s:.12g}" for s in sums))))
    else:
        _emit(args, "\n".join(f"S_{k} = {s:.9f}" for k, s in enumerate(sums)) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p, formats=("text", "json"), digits=True, output=True):
    p.add_argument("--format", choices=formats, default="text")
    if digits:
        p.add_argument("--digits", type=int, default=12)
    if output:
        p.add_argument("--output", help="write the main output to this file")


def _add_tree(p):
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--tree", required=True,
                   help="comma-separated leaves, digits juxtaposed, optional trailing f")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hecke-cf",
        description="Slow continued-fraction maps over extended Hecke groups: "
                    "exact attractors, dual maps, conjugacy functions, densities, orbits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="field data for lam_m")
    p.add_argument("--m", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_field)

    p = sub.add_parser("generators", help="the L, S, F, R matrices")
    p.add_argument("--m", type=int, required=True)
    _add_common(p, formats=("text", "json", "csv"))
    p.set_defaults(func=_cmd_generators)

    p = sub.add_parser("embed", help="embed a word as a matrix or affine map")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--target", choices=("A", "B", "C"), required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("tree-validate", help="validate a decorated tree literal")
    _add_tree(p)
    _add_common(p, digits=False)
    p.set_defaults(func=_cmd_tree_validate)

    p = sub.add_parser("map-table", help="branch table and graph of the map")
    _add_tree(p)
    _add_common(p, formats=("text", "json", "csv", "svg"))
    p.add_argument("--figure", help="write the map graph (SVG) to this file")
    p.set_defaults(func=_cmd_map_table)

    p = sub.add_parser("attractor", help="dual-IFS attractor cover")
    _add_tree(p)
    p.add_argument("--level", type=int, default=8)
    _add_common(p, formats=("text", "json", "csv", "svg"))
    p.add_argument("--figure", help="write the cover diagram (SVG) to this file")
    p.set_defaults(func=_cmd_attractor)

    p = sub.add_parser("dual", help="dual map branches")
    _add_tree(p)
    p.add_argument("--level", type=int, default=8)
    _add_common(p, formats=("text", "json", "svg"))
    p.add_argument("--figure", help="write the dual graph (SVG) to this file")
    p.set_defaults(func=_cmd_dual)

    p = sub.add_parser("census", help="component counts by level with a hint")
    _add_tree(p)
    p.add_argument("--level", type=int, default=8)
    _add_common(p, formats=("text", "json", "csv"), digits=False)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("minkowski-eval", help="evaluate the conjugacy function")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", help="rational point p/q in [0, 1/lam]")
    p.add_argument("--depth", type=int, default=30)
    p.add_argument("--table", type=int, default=0,
                   help="emit a CSV of this many sample intervals instead")
    _add_common(p, formats=("text", "json", "csv"))
    p.set_defaults(func=_cmd_minkowski_eval)

    p = sub.add_parser("minkowski-invert", help="bracket a preimage of the conjugacy")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--y", required=True, help="rational value in [0, 1]")
    p.add_argument("--depth", type=int, default=30)
    _add_common(p)
    p.set_defaults(func=_cmd_minkowski_invert)

    p = sub.add_parser("hoelder", help="regularity exponent data")
    p.add_argument("--m", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_hoelder)

    p = sub.add_parser("jsr", help="joint spectral radius sandwich")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-max", type=int, default=8)
    _add_common(p, digits=False)
    p.set_defaults(func=_cmd_jsr)

    p = sub.add_parser("density", help="marginal invariant density table (CSV)")
    _add_tree(p)
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--points", type=int, default=20)
    _add_common(p, formats=("csv",))
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("transfer-check", help="transfer-operator invariance residuals")
    _add_tree(p)
    p.add_argument("--side", choices=("forward", "dual"), default="forward")
    p.add_argument("--picture", choices=("unit", "infinite"), default="unit")
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--points", type=int, default=25)
    _add_common(p, formats=("text", "json", "csv"))
    p.set_defaults(func=_cmd_transfer_check)

    p = sub.add_parser("orbit", help="natural-extension orbit")
    _add_tree(p)
    p.add_argument("--seed-preset", choices=("cubic",))
    p.add_argument("--seed-x")
    p.add_argument("--seed-y")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--precision-bits", type=int, default=256)
    p.add_argument("--mode", choices=("auto", "exact", "float"), default="auto")
    p.add_argument("--level", type=int, default=3,
                   help="cover level backing the dual branch domains")
    _add_common(p, formats=("csv", "json", "svg"))
    p.add_argument("--figure", help="write the orbit scatter (SVG) to this file")
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("poincare", help="Poincare-series partial sums")
    _add_tree(p)
    p.add_argument("--n", type=int, default=10)
    _add_common(p, formats=("text", "json", "csv"), digits=False)
    p.set_defaults(func=_cmd_poincare)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
