"""Command line interface: ``volconj <subcommand> [options]``.

Scalar answers are printed as one JSON object, sweeps as JSON Lines (one
record per line) or CSV.  Exit codes: 0 ok, 2 usage, 3 domain error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics, contour, geometry, invariant, potential
from .errors import DomainError, NumericalError
from .geometry import ConeAngles
from .qseries import Weights

SCHEMA_VERSION = 1
THREADS_ENV = "VOLCONJ_THREADS"


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be >= 1")
    return n


def _ordered_map(fn, items):
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))  # map keeps input order


def _angles(args) -> ConeAngles:
    vals = list(args.alpha or [])
    if args.pi_units:
        vals = [a * math.pi for a in vals]
    need = 1 if args.knot == "E" else 3
    if len(vals) != need:
        raise UsageError(f"--knot {args.knot} needs {need} value(s) for --alpha, got {len(vals)}")
    return ConeAngles.of(args.knot, *vals)


def _slv(x):
    return {"sign": x.sign, "log_mag": x.log_mag if x.sign else None}


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------------------
# subcommands; each returns a list of records


def cmd_jones(args):
    if args.j is not None:
        need = 1 if args.knot == "E" else 3
        if len(args.j) != need:
            raise UsageError(f"--knot {args.knot} needs {need} value(s) for --j")
        w = Weights.of(args.r, *args.j)
        branch = None
    else:
        wc = invariant.weights_for_angles(args.r, _angles(args), args.branch)
        w = wc.weights
        branch = wc.branch
    inv = invariant.colored_jones(args.r, w)
    rec = {
        "knot": w.knot,
        "r": args.r,
        "weights": list(w.js),
        "branch": branch,
        "total": _slv(inv.total),
        "value": _num(float(inv.total)) if inv.total.log_mag < 700 else None,
        "growth": _num(inv.growth) if inv.total.sign else None,
        "partials": {k: _slv(v) for k, v in inv.partials.items()},
        "ranges": {lab: [rg.start, rg.stop - 1] for lab, rg in inv.partition.ranges},
    }
    return [rec]


def cmd_volume(args):
    res = geometry.vol_cone(_angles(args))
    return [{"volume": res.volume, "theta": res.theta, "terms": {k: float(v) for k, v in res.terms.items()}}]


def cmd_potential(args):
    ang = _angles(args)
    sp = potential.PotentialSpec(ang)
    xs = np.linspace(args.x_lo, args.x_hi, args.n)
    ys = np.atleast_1d(potential.im_phi_real(sp, xs))
    return [{"x": float(x), "im_phi": float(y)} for x, y in zip(xs, ys)]


def cmd_critical(args):
    cp = potential.critical_points(potential.PotentialSpec(_angles(args)))
    rec = {"knot": cp.knot, "x0": cp.x0, "points": dict(cp.points)}
    for name, poly in cp.polynomials.items():
        rec[name] = {
            "coefficients": list(poly.coefficients),
            "real_roots": list(poly.real_roots),
            "selected": poly.selected,
            "residual": poly.residual,
        }
    return [rec]


def cmd_converge(args):
    ang = _angles(args)
    rs = list(args.r_list)
    for r in rs:
        if r < 5 or r % 2 == 0:
            raise DomainError(f"r values must be odd and >= 5, got {r}")
    recs = _ordered_map(lambda r: asymptotics.growth_rate(r, ang, args.branch), rs)
    coef, res = asymptotics.fit_log_model([g.r for g in recs], [g.growth for g in recs])
    out = [
        {"kind": "growth", "r": g.r, "weights": list(g.weights), "branch": g.branch, "growth": g.growth,
         "target": g.target, "error": g.error, "dominance": g.dominance}
        for g in recs
    ]
    out.append({
        "kind": "fit", "limit": float(coef[0]), "a": float(coef[1]), "b": float(coef[2]),
        "target": recs[0].target, "distance": abs(float(coef[0]) - recs[0].target),
        "residual_norm": float(np.linalg.norm(res)),
    })
    return out


def cmd_alpha0(args):
    t = asymptotics.threshold_alpha0(scan=args.scan)
    return [{"alpha0": t.value, "bracket_width": t.bracket_width}]


def cmd_bbound(args):
    t = asymptotics.equal_angle_bound_B(scan=args.scan)
    return [{"bbound": t.value, "bracket_width": t.bracket_width}]


def cmd_region(args):
    lo, hi = args.lo, args.hi
    if args.pi_units:
        lo, hi = lo * math.pi, hi * math.pi
    grid = asymptotics.omega0_grid(lo, hi, args.steps)
    out = []
    for s in grid.samples():
        a1, a2, a3 = s.angles
        out.append({"a1": a1, "a2": a2, "a3": a3, "condition": s.condition, "in_omega0": s.in_omega0})
    return out


def cmd_contour(args):
    ang = _angles(args)
    base = contour.default_grid(ang)
    grid = contour.GridSpec(base.u_lo, base.u_hi, base.v_lo, base.v_hi, args.nu, args.nv)
    choice = contour.default_level(ang)
    level = choice.level if args.level is None else args.level
    if args.grid_out:
        fg = contour.field(ang, args.m, grid)
        with open(args.grid_out, "wb") as fh:
            fh.write(contour.export_grid(fg, args.grid_format))
    path = contour.level_path(ang, args.m, level, args.quadrant, grid)
    rec = {
        "knot": ang.knot, "angles": list(ang.values), "m": args.m, "level": level,
        "regime": choice.regime if args.level is None else "user", "found": path is not None,
    }
    if path is not None:
        rec.update({
            "quadrant": path.quadrant,
            "humps": [list(h) for h in path.humps],
            "max_level_error": path.max_level_error,
            "points": [[float(u), float(v)] for u, v in path.points],
        })
    return [rec]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="volconj", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, angles=True):
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--output", "-o", help="write here instead of standard output")
        if angles:
            sp.add_argument("--knot", choices=["E", "B"], required=True, type=str.upper)
            sp.add_argument("--alpha", type=float, nargs="+", help="cone angle(s) in radians")
            sp.add_argument("--pi-units", action="store_true", help="read angles as multiples of pi")

    s = sub.add_parser("jones", help="colored Jones invariant and its partial sums")
    common(s)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--j", type=float, nargs="+", help="weights; otherwise chosen from --alpha")
    s.add_argument("--branch", choices=["minus", "plus"], default="minus")
    s.set_defaults(fn=cmd_jones)

    s = sub.add_parser("volume", help="cone-manifold volume")
    common(s)
    s.set_defaults(fn=cmd_volume)

    s = sub.add_parser("potential", help="Im Phi on a real-axis sweep")
    common(s)
    s.add_argument("--x-lo", type=float, default=0.0)
    s.add_argument("--x-hi", type=float, default=math.pi)
    s.add_argument("--n", type=int, default=101)
    s.set_defaults(fn=cmd_potential)

    s = sub.add_parser("critical", help="critical points of Im Phi on the real axis")
    common(s)
    s.set_defaults(fn=cmd_critical)

    s = sub.add_parser("converge", help="growth rates over several r and the log r / r fit")
    common(s)
    s.add_argument("--r-list", type=int, nargs="+", required=True)
    s.add_argument("--branch", choices=["minus", "plus"], default="minus")
    s.set_defaults(fn=cmd_converge)

    s = sub.add_parser("alpha0", help="threshold angle for E")
    common(s, angles=False)
    s.add_argument("--scan", type=int, default=64)
    s.set_defaults(fn=cmd_alpha0)

    s = sub.add_parser("bbound", help="equal-angle bound for B")
    common(s, angles=False)
    s.add_argument("--scan", type=int, default=64)
    s.set_defaults(fn=cmd_bbound)

    s = sub.add_parser("region", help="classify a cube of B angle triples")
    common(s, angles=False)
    s.add_argument("--lo", type=float, default=math.pi / 2)
    s.add_argument("--hi", type=float, default=math.pi)
    s.add_argument("--steps", type=int, default=40)
    s.add_argument("--pi-units", action="store_true", help="read --lo/--hi as multiples of pi")
    s.set_defaults(fn=cmd_region)

    s = sub.add_parser("contour", help="level-set integration path")
    common(s)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--level", type=float)
    s.add_argument("--quadrant", type=int, choices=[1, 4])
    s.add_argument("--nu", type=int, default=1200)
    s.add_argument("--nv", type=int, default=800)
    s.add_argument("--grid-out", help="also export the field grid to this file")
    s.add_argument("--grid-format", choices=["csv", "json"], default="csv")
    s.set_defaults(fn=cmd_contour)
    return p


def _flatten(rec, prefix=""):
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def render(records, fmt: str) -> str:
    if fmt == "csv":
        flat = [_flatten(r) for r in records]
        cols = []
        for r in flat:
            for k in r:
                if k not in cols:
                    cols.append(k)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in flat:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()
    lines = [json.dumps({"schema_version": SCHEMA_VERSION, **r}, allow_nan=False) for r in records]
    return "\n".join(lines) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        records = args.fn(args)
        text = render(records, args.format)
    except UsageError as e:
        print(f"volconj: usage error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"volconj: domain error: {e}", file=sys.stderr)
        return 3
    except NumericalError as e:
        print(f"volconj: numerical failure: {e}", file=sys.stderr)
        return 4
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
