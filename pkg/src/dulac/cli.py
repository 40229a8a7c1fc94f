"""Command-line interface.

Every subcommand emits a report with the stable keys
{"system", "command", "result", "certificate", "notes"}; certificates carry
the exact carrier polynomial and, for violations, the witness as a rational
pair, so they can be re-checked independently.  The ``analyze`` exit code is
0 when the region is fully certified, 1 when a cycle was detected, 2 when
inconclusive coverage remains, and 3 on input errors (3 is shared by all
subcommands for bad input).
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from .analyze import AnalyzeConfig, exit_code, run_analyze
from .certify import (
    Box2,
    DEFAULT_MAX_DEPTH,
    OPEN_BOX_NOTE,
    bendixson,
    certify_dulac,
)
from .darboux import (
    check_integrating_factor,
    check_inverse_integrating_factor,
    cofactor_of,
    darboux_first_integral,
    exponential_factor_cofactor,
    verify_first_integral,
)
from .errors import (
    DulacError,
    NoNontrivialRelationError,
    NotInvariantError,
    ParseError,
)
from .flow import (
    CrossingDirection,
    Section,
    detect_limit_cycle,
    find_equilibria,
    integrate,
)
from .multiplier import PolyMultiplier
from .parse import parse_constant, parse_multiplier, parse_poly, parse_system
from .poly import VectorField
from .synthesis import (
    Matrix2,
    local_dulac_hyperbolic,
    printed_coefficients,
    quadratic_dulac_linear,
    RECORDED_READING,
)


def _load_system(args) -> VectorField:
    if not args.system:
        raise ParseError("--system <file.vf> is required")
    with open(args.system, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())


def parse_region(text: str) -> Box2:
    """Parse "xmin:xmax,ymin:ymax" with rational or decimal endpoints."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError('region must look like "x0:x1,y0:y1"')
    bounds = []
    for part in parts:
        ends = part.split(":")
        if len(ends) != 2:
            raise ParseError('region must look like "x0:x1,y0:y1"')
        bounds.extend(parse_constant(e) for e in ends)
    try:
        return Box2(bounds[0], bounds[1], bounds[2], bounds[3])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError('point must look like "x,y"')
    return (float(parse_constant(parts[0])), float(parse_constant(parts[1])))


def _split_polys(text: str) -> list:
    """Split a curve list on ';' (or ',' as a fallback separator)."""
    chunks = text.split(";") if ";" in text else text.split(",")
    return [parse_poly(c) for c in chunks if c.strip()]


def _report(command: str, system: str, result: dict,
            certificate: dict | None = None, notes: list | None = None) -> dict:
    return {
        "system": system,
        "command": command,
        "result": result,
        "certificate": certificate,
        "notes": notes or [],
    }


def _emit(args, report: dict, text_lines: list, csv_text: str | None = None) -> None:
    if args.format == "json":
        payload = json.dumps(report, indent=2) + "\n"
    elif args.format == "csv":
        if csv_text is None:
            raise ParseError("csv format is not available for this command")
        payload = csv_text
    else:
        payload = "\n".join(text_lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


# --- subcommand handlers -----------------------------------------------------


def _cmd_parse(args) -> int:
    system = _load_system(args)
    result = {
        "P": str(system.p),
        "Q": str(system.q),
        "degree": system.degree,
        "params": {k: str(v) for k, v in system.params.items()},
    }
    report = _report("parse", system.source_text, result)
    _emit(args, report, [f"P = {system.p}", f"Q = {system.q}",
                         f"degree = {system.degree}"])
    return 0


def _cmd_equilibria(args) -> int:
    system = _load_system(args)
    region = parse_region(args.region)
    reports = find_equilibria(system, region, args.grid, args.tol)
    result = {"equilibria": [e.to_dict() for e in reports]}
    lines = [f"{len(reports)} equilibria in {region}"]
    for e in reports:
        lines.append(
            f"  ({e.location.x:.9g}, {e.location.y:.9g})  "
            f"{e.classification.value}  hyperbolic={e.hyperbolic}  "
            f"eigenvalues={e.eigenvalues[0]:.6g}, {e.eigenvalues[1]:.6g}")
    _emit(args, _report("equilibria", system.source_text, result), lines)
    return 0


def _cmd_dulac_linear(args) -> int:
    if not args.matrix:
        raise ParseError('--matrix "a,b;c,d" is required')
    m = Matrix2.parse(args.matrix)
    quad = quadratic_dulac_linear(m)
    p20, p02, p11 = printed_coefficients(m)
    x_field = m.field()
    carrier = x_field.p * x_field.p + x_field.q * x_field.q
    result = {
        "matrix": str(m),
        "b20": str(quad.b20),
        "b11": str(quad.b11),
        "b02": str(quad.b02),
        "multiplier": str(quad.to_poly()),
        "carrier": str(carrier),
        "closed_form": {"b20": str(p20), "b02": str(p02), "b11": str(p11),
                        "reading": RECORDED_READING.value},
    }
    lines = [
        f"B = {quad.to_poly()}",
        f"Div(B*X) = |X|^2 = {carrier}",
        f"closed-form cross-check: b20={p20} b02={p02} "
        f"b11={p11} (reading: {RECORDED_READING.value})",
    ]
    _emit(args, _report("dulac-linear", str(m), result), lines)
    return 0


def _certify_common(args, command: str) -> int:
    system = _load_system(args)
    region = parse_region(args.region)
    if command == "bendixson":
        outcome = bendixson(system, region, args.depth)
    else:
        multiplier = parse_multiplier(args.multiplier)
        outcome = certify_dulac(system, multiplier, region, args.depth)
    cert = outcome.certificate
    result = {
        "conclusion": outcome.conclusion.value,
        "multiplier": str(outcome.multiplier),
        "box": region.to_dict(),
        "certificate_full": cert.to_full_dict(),
    }
    lines = [f"{command}: {outcome.conclusion.value}",
             f"  carrier = {cert.carrier}",
             f"  outcome = {cert.to_dict()['outcome']} (depth {cert.depth})"]
    if cert.witness_point is not None:
        lines.append(f"  witness = ({cert.outcome.witness[0]}, "
                     f"{cert.outcome.witness[1]}) with value "
                     f"{cert.outcome.value} <= 0")
    _emit(args, _report(command, system.source_text, result,
                        certificate=cert.to_dict(), notes=[OPEN_BOX_NOTE]),
          lines)
    return 0


def _cmd_certify(args) -> int:
    return _certify_common(args, "certify")


def _cmd_bendixson(args) -> int:
    return _certify_common(args, "bendixson")


def _cmd_local_dulac(args) -> int:
    system = _load_system(args)
    notes: list = []
    entries: list = []
    if args.point:
        points = [_parse_point(args.point)]
    else:
        if not args.region:
            raise ParseError("local-dulac needs --point or --region")
        region = parse_region(args.region)
        eqs = find_equilibria(system, region, args.grid, 1e-12)
        points = []
        for eq in eqs:
            if eq.hyperbolic:
                points.append((eq.location.x, eq.location.y))
            else:
                notes.append(f"skipping non-hyperbolic equilibrium at "
                             f"({eq.location.x:.6g}, {eq.location.y:.6g})")
    lines = []
    first_cert = None
    for pt in points:
        try:
            multiplier, box, cert = local_dulac_hyperbolic(
                system, pt, min_radius=args.min_radius, max_depth=args.depth)
        except DulacError as exc:
            notes.append(f"({pt[0]:.6g}, {pt[1]:.6g}): {exc}")
            lines.append(f"({pt[0]:.6g}, {pt[1]:.6g}): failed: {exc}")
            continue
        entries.append({
            "point": [pt[0], pt[1]],
            "multiplier": str(multiplier),
            "box": box.to_dict(),
            "certificate_full": cert.to_full_dict(),
        })
        if first_cert is None:
            first_cert = cert
        lines.append(f"({pt[0]:.6g}, {pt[1]:.6g}): certified punctured box "
                     f"{box} with B = {multiplier}")
    result = {"local_certificates": entries}
    _emit(args, _report("local-dulac", system.source_text, result,
                        certificate=first_cert.to_dict() if first_cert else None,
                        notes=notes),
          lines or ["no hyperbolic equilibria found"])
    return 0


def _cmd_cofactor(args) -> int:
    system = _load_system(args)
    if not args.curves:
        raise ParseError('--curves "f1;f2;..." is required')
    entries = []
    lines = []
    for f in _split_polys(args.curves):
        try:
            curve = cofactor_of(f, system)
            entries.append({"f": str(f), "k": str(curve.k)})
            lines.append(f"f = {f}: cofactor k = {curve.k}")
        except NotInvariantError as exc:
            entries.append({"f": str(f), "error": "not_invariant",
                            "remainder": str(exc.remainder)})
            lines.append(f"f = {f}: not invariant (remainder {exc.remainder})")
    _emit(args, _report("cofactor", system.source_text, {"curves": entries}),
          lines)
    return 0


def _cmd_expfactor(args) -> int:
    system = _load_system(args)
    if not args.g:
        raise ParseError('--g "<poly>" is required')
    g = parse_poly(args.g)
    h = parse_poly(args.h)
    ef = exponential_factor_cofactor(g, h, system)
    result = ef.to_dict()
    _emit(args, _report("expfactor", system.source_text, result),
          [f"{ef}: cofactor k = {ef.k}"])
    return 0


def _cmd_intfactor(args) -> int:
    system = _load_system(args)
    mu = parse_multiplier(args.multiplier)
    report = check_integrating_factor(mu, system)
    verdict = "integrating factor" if report.is_exact else "not an integrating factor"
    result = {"multiplier": str(mu), **report.to_dict(), "verdict": verdict}
    _emit(args, _report("intfactor", system.source_text, result),
          [f"mu = {mu}: {verdict} (residual {report.symbolic_residual})"])
    return 0


def _cmd_inv_intfactor(args) -> int:
    system = _load_system(args)
    mu = parse_multiplier(args.multiplier)
    if not isinstance(mu, PolyMultiplier):
        raise ParseError("inverse integrating factors must be polynomials")
    report = check_inverse_integrating_factor(mu.p, system)
    verdict = ("inverse integrating factor" if report.is_exact
               else "not an inverse integrating factor")
    result = {"V": str(mu.p), **report.to_dict(), "verdict": verdict}
    _emit(args, _report("inv-intfactor", system.source_text, result),
          [f"V = {mu.p}: {verdict} (residual {report.symbolic_residual})"])
    return 0


def _build_darboux(args, system: VectorField):
    if not args.curves:
        raise ParseError('--curves "f1;f2;..." is required')
    curves = [cofactor_of(f, system) for f in _split_polys(args.curves)]
    expf = []
    if args.expfactors:
        for chunk in args.expfactors.split(";"):
            if not chunk.strip():
                continue
            gh = chunk.split(":")
            if len(gh) != 2:
                raise ParseError('--expfactors must look like "g1:h1;g2:h2"')
            expf.append(exponential_factor_cofactor(
                parse_poly(gh[0]), parse_poly(gh[1]), system))
    return curves, expf


def _cmd_darboux(args) -> int:
    system = _load_system(args)
    curves, expf = _build_darboux(args, system)
    try:
        expr = darboux_first_integral(curves, expf)
    except NoNontrivialRelationError as exc:
        result = {"first_integral": None, "reason": str(exc),
                  "cofactors": [c.to_dict() for c in curves]
                  + [e.to_dict() for e in expf]}
        _emit(args, _report("darboux", system.source_text, result,
                            notes=[str(exc)]),
              [f"no Darboux first integral: {exc}"])
        return 0
    result = {"first_integral": expr.to_dict()}
    _emit(args, _report("darboux", system.source_text, result),
          [f"H = {expr}", "total cofactor = 0"])
    return 0


def _cmd_verify_integral(args) -> int:
    system = _load_system(args)
    curves, expf = _build_darboux(args, system)
    expr = darboux_first_integral(curves, expf)
    report = verify_first_integral(expr, system, trajectories=args.trajectories,
                                   t_span=args.t_span)
    result = {"first_integral": expr.to_dict(), **report.to_dict()}
    _emit(args, _report("verify-integral", system.source_text, result),
          [f"H = {expr}",
           f"symbolic residual = {report.symbolic_residual}",
           f"max drift = {report.numeric_max_drift:.3e} over "
           f"{report.trajectories_checked} trajectories"])
    return 0


def _cmd_simulate(args) -> int:
    system = _load_system(args)
    z0 = _parse_point(args.z0)
    domain = parse_region(args.region) if args.region else None
    traj = integrate(system, z0, args.t_span, args.tol, domain)
    buf = io.StringIO()
    traj.write_csv(buf)
    result = {
        "z0": list(z0),
        "t_span": args.t_span,
        "status": traj.status.value,
        "steps": len(traj.times) - 1,
        "endpoint": [traj.endpoint.x, traj.endpoint.y],
        "times": list(traj.times),
        "states": [[p.x, p.y] for p in traj.states],
    }
    lines = [f"integrated to t = {traj.times[-1]:.9g} "
             f"({traj.status.value}, {len(traj.times) - 1} steps)",
             f"endpoint = ({traj.endpoint.x:.12g}, {traj.endpoint.y:.12g})"]
    _emit(args, _report("simulate", system.source_text, result),
          lines, csv_text=buf.getvalue())
    return 0


def _cmd_limit_cycle(args) -> int:
    system = _load_system(args)
    seed = _parse_point(args.seed)
    vx, vy = system(seed)
    section = Section.through(seed, (vx, vy),
                              CrossingDirection.POSITIVE_CROSSING)
    report = detect_limit_cycle(system, section, seed, args.max_iters,
                                args.tol, args.max_time)
    buf = io.StringIO()
    report.write_csv(buf)
    result = {"limit_cycle": report.to_dict()}
    lines = [f"limit cycle: period = {report.period:.9g}, "
             f"amplitude_x = {report.amplitude_x:.9g}, "
             f"slope = {report.return_map_slope:.3e}, "
             f"stability = {report.stability.value}"]
    _emit(args, _report("limit-cycle", system.source_text, result),
          lines, csv_text=buf.getvalue())
    return 0


def _cmd_analyze(args) -> int:
    system = _load_system(args)
    region = parse_region(args.region)
    cfg = AnalyzeConfig(
        grid_n=args.grid,
        tile_n=args.tiles,
        tile_depth=args.depth,
        min_radius=args.min_radius,
        cycle_tol=args.tol,
        max_cycle_seeds=args.max_cycle_seeds,
    )
    report = run_analyze(system, region, cfg)
    d = report.to_dict()
    lines = [
        f"equilibria: {len(report.equilibria)}",
        f"local certificates: {len(report.local_certificates)}",
        f"certified boxes: {len(report.global_boxes_certified)}",
        f"uncovered tiles: {len(report.uncovered_regions)}",
        f"limit cycles: {len(report.limit_cycles)}",
    ]
    for cyc in report.limit_cycles:
        lines.append(f"  cycle: period {cyc.period:.6g}, amplitude_x "
                     f"{cyc.amplitude_x:.6g}, {cyc.stability.value}")
    for note in report.notes:
        lines.append(f"note: {note}")
    code = exit_code(report)
    lines.append(f"exit code: {code}")
    _emit(args, _report("analyze", system.source_text, d,
                        notes=list(report.notes)), lines)
    return code


# --- parser ----------------------------------------------------------------


def _add_common(sub, system=True, region=False):
    sub.add_argument("--out", help="write the report to this path")
    sub.add_argument("--format", choices=("text", "json", "csv"),
                     default="text")
    if system:
        sub.add_argument("--system", help="path to a .vf system file")
    if region:
        sub.add_argument("--region", help='rectangle "x0:x1,y0:y1"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dulac",
        description="Dulac/Bendixson certificates, Darboux integrability and "
                    "limit-cycle numerics for planar polynomial fields")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("parse", help="parse a .vf file and echo canonical form")
    _add_common(p)
    p.set_defaults(handler=_cmd_parse)

    p = subs.add_parser("equilibria", help="find and classify zeros of the field")
    _add_common(p, region=True)
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=_cmd_equilibria)

    p = subs.add_parser("dulac-linear",
                        help="quadratic multiplier for a linear field")
    _add_common(p, system=False)
    p.add_argument("--matrix", help='matrix "a,b;c,d" with rational entries')
    p.set_defaults(handler=_cmd_dulac_linear)

    p = subs.add_parser("certify",
                        help="certify Div(B*X) > 0 on a rectangle")
    _add_common(p, region=True)
    p.add_argument("--multiplier", default="1",
                   help='multiplier: polynomial or "exp(<poly>)*<poly>"')
    p.add_argument("--depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(handler=_cmd_certify)

    p = subs.add_parser("bendixson", help="certify with B = 1")
    _add_common(p, region=True)
    p.add_argument("--depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(handler=_cmd_bendixson)

    p = subs.add_parser("local-dulac",
                        help="certified local multiplier at hyperbolic equilibria")
    _add_common(p, region=True)
    p.add_argument("--point", help='equilibrium "x,y" (instead of --region)')
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--min-radius", type=float, default=1e-3)
    p.set_defaults(handler=_cmd_local_dulac)

    p = subs.add_parser("cofactor", help="cofactors of invariant curves")
    _add_common(p)
    p.add_argument("--curves", help='curves "f1;f2;..."')
    p.set_defaults(handler=_cmd_cofactor)

    p = subs.add_parser("expfactor", help="cofactor of exp(g/h)")
    _add_common(p)
    p.add_argument("--g", help="numerator polynomial")
    p.add_argument("--h", default="1", help="denominator polynomial")
    p.set_defaults(handler=_cmd_expfactor)

    p = subs.add_parser("intfactor", help="check an integrating factor")
    _add_common(p)
    p.add_argument("--multiplier", required=True)
    p.set_defaults(handler=_cmd_intfactor)

    p = subs.add_parser("inv-intfactor",
                        help="check an inverse integrating factor")
    _add_common(p)
    p.add_argument("--multiplier", required=True,
                   help="candidate V (polynomial)")
    p.set_defaults(handler=_cmd_inv_intfactor)

    p = subs.add_parser("darboux", help="Darboux first integral from curves")
    _add_common(p)
    p.add_argument("--curves", help='curves "f1;f2;..."')
    p.add_argument("--expfactors", help='exponential factors "g1:h1;g2:h2"')
    p.set_defaults(handler=_cmd_darboux)

    p = subs.add_parser("verify-integral",
                        help="build a Darboux integral and check drift")
    _add_common(p)
    p.add_argument("--curves", help='curves "f1;f2;..."')
    p.add_argument("--expfactors", help='exponential factors "g1:h1;g2:h2"')
    p.add_argument("--trajectories", type=int, default=5)
    p.add_argument("--t-span", dest="t_span", type=float, default=10.0)
    p.set_defaults(handler=_cmd_verify_integral)

    p = subs.add_parser("simulate", help="integrate a trajectory (CSV export)")
    _add_common(p, region=True)
    p.add_argument("--z0", required=True, help='initial point "x,y"')
    p.add_argument("--t-span", dest="t_span", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=_cmd_simulate)

    p = subs.add_parser("limit-cycle", help="detect a limit cycle from a seed")
    _add_common(p)
    p.add_argument("--seed", required=True, help='seed point "x,y"')
    p.add_argument("--max-iters", dest="max_iters", type=int, default=25)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-time", dest="max_time", type=float, default=100.0)
    p.set_defaults(handler=_cmd_limit_cycle)

    p = subs.add_parser("analyze", help="full best-effort pipeline on a region")
    _add_common(p, region=True)
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--tiles", type=int, default=10)
    p.add_argument("--depth", type=int, default=6,
                   help="certification depth for coverage tiles")
    p.add_argument("--min-radius", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="integration tolerance for the cycle scan")
    p.add_argument("--max-cycle-seeds", dest="max_cycle_seeds", type=int,
                   default=12)
    p.set_defaults(handler=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, DulacError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
