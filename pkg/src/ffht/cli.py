"""Command-line front end.

Every subcommand prints one JSON document (or CSV / a markdown table where
offered) on stdout.  Failures print {"error": {"code": ..., "message": ...}}
on stderr and exit with 2 (domain or input errors) or 3 (size budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import constants as C
from .dynsys import BudgetExceeded, DegenerateMap, HomogeneousMap, canonical_height, default_budget
from .elliptic import (
    CurvePoint,
    DuplicationSearchFailed,
    NotOnCurve,
    SingularCurve,
    WeierstrassCurve,
    arakelov_check,
    canonical_height_dyn,
    canonical_height_local,
    duplication_extension,
    faltings_height,
    height_places,
    hindry_silverman_check,
    local_height,
    torsion_points,
)
from .funcfield import INFINITY, ParseError, Place, parse
from .goodbasis import PlaneCubic, ProjectiveSpace, SpanningFailure, extract_basis, spanning_family
from .green import global_green_identity, green_value, sweep_csv
from .projheights import ProjPoint, weil_height

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET = 0, 2, 3

COMMANDS = (
    "weil",
    "curve-info",
    "canonical-height",
    "local-heights",
    "torsion",
    "faltings",
    "arakelov-check",
    "hindry-silverman",
    "green",
    "green-global",
    "gotzmann",
    "constants",
)


class InputError(ValueError):
    pass


def q(x) -> str:
    """Exact rationals as "p/q" (integers without a denominator)."""
    return str(Fraction(x))


def interval(lo, hi) -> dict:
    return {"lo": q(lo), "hi": q(hi)}


def load_json(text: str | None, what: str) -> Any:
    """Inline JSON, or a path to a UTF-8 JSON file."""
    if text is None:
        raise InputError(f"missing --{what}")
    stripped = text.lstrip()
    if stripped[:1] in "{[\"" or stripped[:1].isdigit():
        return json.loads(text)
    return json.loads(Path(text).read_text(encoding="utf-8"))


def parse_place(text: str) -> Place:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return Place.finite(parse(text))


def curve_arg(args) -> WeierstrassCurve:
    return WeierstrassCurve.from_json(load_json(args.curve, "curve"))


def curve_point(curve: WeierstrassCurve, data) -> CurvePoint:
    P = CurvePoint.from_json(data)
    if not curve.contains(P):
        raise NotOnCurve(f"{P} is not on the curve")
    return P


def config_header(args) -> dict:
    keys = ("command", "k", "n", "format", "place", "max_order")
    out = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    out["budget"] = args.budget or default_budget()
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_weil(args):
    P = ProjPoint.from_json(load_json(args.point, "point"))
    return {"point": P.to_json(), "height": q(weil_height(P))}


def cmd_curve_info(args):
    E = curve_arg(args)
    fh = faltings_height(E)
    return {
        "curve": E.to_json(),
        "b": [str(b) for b in (E.b2, E.b4, E.b6, E.b8)],
        "c4": str(E.c4),
        "c6": str(E.c6),
        "disc": str(E.disc),
        "j": str(E.j),
        "isotrivial": E.is_isotrivial,
        "bad_places": [r.to_json() for r in E.bad_reduction()],
        "faltings": _faltings_json(fh),
    }


def _faltings_json(fh):
    return {
        "stable": q(fh.stable),
        "semistable_sum": None if fh.semistable_sum is None else q(fh.semistable_sum),
        "isotrivial": fh.isotrivial,
    }


def cmd_canonical_height(args):
    if args.map:
        F = HomogeneousMap.from_json(load_json(args.map, "map"))
        P = ProjPoint.from_json(load_json(args.point, "point"))
        h = canonical_height(F, P, args.k, budget=args.budget)
        return {"point": P.to_json(), "dyn": interval(h.lo, h.hi), "approx": q(h.approx), "error_bound": q(h.error_bound)}
    E = curve_arg(args)
    P = curve_point(E, load_json(args.point, "point"))
    if P.is_zero:
        return {"point": "O", "dyn": interval(0, 0), "local": "0"}
    h = canonical_height_dyn(E, P, args.k, budget=args.budget)
    loc = canonical_height_local(E, P)
    return {
        "point": P.to_json(),
        "dyn": interval(h.lo, h.hi),
        "approx": q(h.approx),
        "error_bound": q(h.error_bound),
        "local": q(loc),
        "agree": h.contains(loc),
    }


def cmd_local_heights(args):
    E = curve_arg(args)
    P = curve_point(E, load_json(args.point, "point"))
    if P.is_zero:
        raise InputError("local heights of O are undefined")
    rows = [{"place": str(v), "lambda": q(local_height(E, P, v))} for v in height_places(E, P)]
    total = sum(Fraction(r["lambda"]) for r in rows)
    return {"point": P.to_json(), "normalization": "divisor (O)", "places": rows, "total": q(total), "total_O1": q(3 * total)}


def cmd_torsion(args):
    E = curve_arg(args)
    T = torsion_points(E, args.max_order)
    return {
        "points": [{"point": P.to_json(), "order": n} for P, n in T.points],
        "structure": list(T.structure),
        "size": T.size,
        "max_order": T.max_order,
        "complete": T.complete,
    }


def cmd_faltings(args):
    return _faltings_json(faltings_height(curve_arg(args)))


def cmd_arakelov(args):
    r = arakelov_check(curve_arg(args))
    return {"height": q(r.height), "bound": r.bound if isinstance(r.bound, str) else q(r.bound), "S": r.S, "holds": r.holds, "equality": r.equality}


def cmd_hindry_silverman(args):
    E = curve_arg(args)
    pts = [curve_point(E, p) for p in load_json(args.points, "points")]
    v = parse_place(args.place)
    r = hindry_silverman_check(E, pts, v)
    return {"place": str(v), "average": q(r.average), "bound": q(r.bound), "pass": r.passed, "pairs": r.pairs}


def _green_setup(args):
    if args.map:
        F = HomogeneousMap.from_json(load_json(args.map, "map"))
        target = ProjectiveSpace(F.N)
        pts = [ProjPoint.from_json(p) for p in load_json(args.points, "points")]
    else:
        E = curve_arg(args)
        F = duplication_extension(E)
        target = PlaneCubic(E)
        pts = [curve_point(E, p).projective() for p in load_json(args.points, "points")]
    basis = extract_basis(spanning_family(F, args.n), target)
    return F, basis, pts


def cmd_green(args):
    F, basis, pts = _green_setup(args)
    places = [parse_place(p) for p in args.place.split(",")] if args.place else sorted({INFINITY})
    values = [green_value(basis, F, pts, v, args.k, budget=args.budget) for v in places]
    if args.format == "csv":
        return sweep_csv(values)
    return {"n": args.n, "c": basis.size, "values": [g.to_json() for g in values]}


def cmd_green_global(args):
    F, basis, pts = _green_setup(args)
    gi = global_green_identity(basis, F, pts, args.k, budget=args.budget)
    return {"n": args.n, "c": basis.size, **gi.to_json()}


def cmd_gotzmann(args):
    P = C.HilbertPolynomial.parse(args.poly)
    dec = C.gotzmann_decomposition(P)
    out = {"poly": str(P), "gotzmann_number": len(dec), "decomposition": dec}
    if args.t is not None:
        rank, deg = C.hilbert_embedding_sizes(args.t, args.r, P)
        out["embedding"] = {"t": args.t, "r": args.r, "plucker_rank": rank, "equation_degree_bound": deg}
    return out


def constants_rows(gmax: int, dmax: int) -> list[dict]:
    rows = []
    for g in range(1, gmax + 1):
        for d in range(1, dmax + 1):
            degA, bound = C.polarization_degrees(d, g)
            s = C.least_s(d)
            rows.append(
                {
                    "g": g,
                    "d": d,
                    "s": s,
                    "four_square": list(C.four_square(s)),
                    "degA": degA,
                    "degAt_bound": bound,
                    "deligne_P1_S3": q(C.deligne_bound(g, 0, 3)),
                    "section_dim_n2": C.abelian_section_dim(degA, g, 2),
                }
            )
    return rows


def cmd_constants(args):
    rows = constants_rows(args.g_max, args.d_max)
    if args.format == "json":
        return {"rows": rows}
    headers = list(rows[0])
    cell = lambda r, h: " ".join(map(str, r[h])) if isinstance(r[h], list) else str(r[h])  # noqa: E731
    if args.format == "csv":
        lines = [",".join(headers)] + [",".join(cell(r, h) for h in headers) for r in rows]
    else:
        lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
        lines += ["| " + " | ".join(cell(r, h) for h in headers) + " |" for r in rows]
    return "\n".join(lines) + "\n"


HANDLERS = {
    "weil": cmd_weil,
    "curve-info": cmd_curve_info,
    "canonical-height": cmd_canonical_height,
    "local-heights": cmd_local_heights,
    "torsion": cmd_torsion,
    "faltings": cmd_faltings,
    "arakelov-check": cmd_arakelov,
    "hindry-silverman": cmd_hindry_silverman,
    "green": cmd_green,
    "green-global": cmd_green_global,
    "gotzmann": cmd_gotzmann,
    "constants": cmd_constants,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ffht", description="Heights, Green's functions and constants over Q(t).")
    p.add_argument("--budget", type=int, default=None, help="size budget in digits (default: $FFHT_BUDGET or 10^7)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, *opts):
        sp = sub.add_parser(name)
        for o in opts:
            if o == "curve":
                sp.add_argument("--curve", help="curve JSON {a1..a6} (inline or path)")
            elif o == "point":
                sp.add_argument("--point", help="point JSON (inline or path)")
            elif o == "points":
                sp.add_argument("--points", help="JSON list of points (inline or path)")
            elif o == "map":
                sp.add_argument("--map", help="map JSON {nvars, forms} (inline or path)")
            elif o == "k":
                sp.add_argument("-k", "--iterations", dest="k", type=int, default=12)
            elif o == "n":
                sp.add_argument("-n", "--degree", dest="n", type=int, default=1)
            elif o == "place":
                sp.add_argument("--place", help="place: monic irreducible polynomial in t, or inf")
            elif o == "format":
                sp.add_argument("--format", choices=("json", "csv", "table"), default="json")
        return sp

    add("weil", "point")
    add("curve-info", "curve")
    add("canonical-height", "curve", "map", "point", "k")
    add("local-heights", "curve", "point")
    t = add("torsion", "curve")
    t.add_argument("--max-order", dest="max_order", type=int, default=12)
    add("faltings", "curve")
    add("arakelov-check", "curve")
    add("hindry-silverman", "curve", "points", "place")
    add("green", "curve", "map", "points", "place", "k", "n", "format")
    add("green-global", "curve", "map", "points", "k", "n")
    g = add("gotzmann")
    g.add_argument("--poly", required=True, help='Hilbert polynomial in T, e.g. "2T+1"')
    g.add_argument("--t", type=int, default=None)
    g.add_argument("--r", type=int, default=2)
    c = add("constants", "format")
    c.add_argument("--g-max", dest="g_max", type=int, default=3)
    c.add_argument("--d-max", dest="d_max", type=int, default=4)
    return p


def _fail(code: str, message: str, status: int, **extra) -> int:
    err = {"code": code, "message": message, **extra}
    sys.stderr.write(json.dumps({"error": err}, sort_keys=True) + "\n")
    return status


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = HANDLERS[args.command](args)
    except ParseError as exc:
        return _fail("parse_error", str(exc), EXIT_DOMAIN, offset=exc.offset)
    except SingularCurve as exc:
        return _fail("singular_curve", str(exc), EXIT_DOMAIN)
    except DegenerateMap as exc:
        return _fail("degenerate_map", str(exc), EXIT_DOMAIN)
    except BudgetExceeded as exc:
        return _fail("budget_exceeded", str(exc), EXIT_BUDGET, used=exc.used, budget=exc.budget)
    except SpanningFailure as exc:
        return _fail("spanning_failure", str(exc), EXIT_DOMAIN)
    except DuplicationSearchFailed as exc:
        return _fail("duplication_search_failed", str(exc), EXIT_DOMAIN)
    except (InputError, NotOnCurve, json.JSONDecodeError, OSError, KeyError, TypeError, ValueError) as exc:
        return _fail("invalid_input", str(exc), EXIT_DOMAIN)
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        doc = {"config": config_header(args), "result": result}
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
