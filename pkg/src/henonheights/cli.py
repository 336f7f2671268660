"""Command-line front end. Every subcommand prints one JSON document (or CSV)
with its inputs, constants and version attached.

Exit codes: 0 success, 2 invalid input, 3 unresolved within budget,
4 inapplicable input or hypothesis violated, 5 stabilization undetermined,
6 an exact certificate failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import __version__
from .exactring import Poly, Q, factor_rational
from .ffheight import UNDETERMINED, AssumptionUndetermined, degree_profile, stabilize
from .globalheight import canonical_height, h_P
from .henon import HenonFamily, InitialPoint, OrbitTable, orbit_polys
from .localgreen import Place, filtration_consts, green
from .periodic import (ZERO_MARKER, finite_field_sigma, resultant_in_b, sigma_empty_certificate,
                       sigma_n, sigma_witnesses)
from .render import Window, escape_map, write_image

EXIT_OK, EXIT_INPUT, EXIT_UNRESOLVED, EXIT_INAPPLICABLE, EXIT_UNDETERMINED, EXIT_CERT = 0, 2, 3, 4, 5, 6
CACHE_ENV = "HENONHEIGHTS_CACHE"

_RAT = {"type": ["string", "integer"], "pattern": r"^\s*-?\d+(/\d+)?\s*$"}
_POLY = {"oneOf": [_RAT, {"type": "object", "required": ["coeffs"],
                          "properties": {"var": {"type": "string"},
                                         "coeffs": {"type": "array", "items": _RAT}}}]}
FAMILY_SCHEMA = {"type": "object", "required": ["d", "delta", "c"],
                 "properties": {"d": {"type": "integer", "minimum": 2}, "delta": _RAT,
                                "c": {"type": "array", "items": _POLY}}}
POINT_SCHEMA = {"type": "object", "required": ["a", "b"], "properties": {"a": _POLY, "b": _POLY}}


class InputError(ValueError):
    pass


def _load_json_arg(s: str):
    p = Path(s)
    text = p.read_text() if p.exists() else s
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"not JSON: {s!r}") from e


def parse_family(spec: str | None, delta: str | None) -> HenonFamily:
    if spec is None or spec.startswith("quadratic") or spec.startswith("power:"):
        dl = Q(delta) if delta else Fraction(1)
        if spec and spec.startswith("power:"):
            return HenonFamily.power(int(spec.split(":")[1]), dl)
        return HenonFamily.quadratic(dl)
    obj = _load_json_arg(spec)
    try:
        jsonschema.validate(obj, FAMILY_SCHEMA)
        return HenonFamily.from_json(obj)
    except (jsonschema.ValidationError, ValueError) as e:
        raise InputError(f"invalid family: {e}") from e


def parse_point(spec: str) -> InitialPoint:
    if "," in spec and not spec.lstrip().startswith("{"):
        a, b = spec.split(",", 1)
        try:
            return InitialPoint.const(Q(a.strip()), Q(b.strip()))
        except ValueError as e:
            raise InputError(f"invalid point {spec!r}") from e
    obj = _load_json_arg(spec)
    try:
        jsonschema.validate(obj, POINT_SCHEMA)
        return InitialPoint.from_json(obj)
    except (jsonschema.ValidationError, ValueError) as e:
        raise InputError(f"invalid point: {e}") from e


def parse_param(s: str):
    try:
        return Q(s)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return complex(s.replace("i", "j").replace(" ", ""))
    except ValueError as e:
        raise InputError(f"invalid parameter {s!r}") from e


# ---------------------------------------------------------------------------
# orbit cache

def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "henonheights"))


def cached_orbit(family: HenonFamily, P: InitialPoint, n: int, use_cache: bool = True) -> OrbitTable:
    if not use_cache:
        return orbit_polys(family, P, n)
    key = hashlib.sha256(f"{family.canonical()}|{P.canonical()}|{n}".encode()).hexdigest()
    path = cache_dir() / f"orbit-{key}.json"
    if path.exists():
        return OrbitTable.from_json(json.loads(path.read_text()))
    table = orbit_polys(family, P, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(table.to_json(), separators=(",", ":")))
    tmp.replace(path)
    return table


# ---------------------------------------------------------------------------
# subcommands

def _provenance(args, family, P=None) -> dict:
    out = {"version": __version__, "command": args.cmd, "family": family.to_json()}
    if P is not None:
        out["point"] = P.to_json()
    return out


def cmd_orbit(args, family, P):
    table = cached_orbit(family, P, args.n, not args.no_cache)
    if args.csv:
        return EXIT_OK, degree_profile(table).to_csv()
    return EXIT_OK, {**_provenance(args, family, P), "n": args.n, "table": table.to_json(),
                     "degrees": degree_profile(table).elln}


def cmd_ffheight(args, family, P):
    table = cached_orbit(family, P, args.n_budget, not args.no_cache)
    cert = stabilize(family, P, args.n_budget, table)
    if cert == UNDETERMINED:
        return EXIT_UNDETERMINED, {**_provenance(args, family, P), "status": UNDETERMINED}
    return EXIT_OK, {**_provenance(args, family, P), "ell": str(cert.ell), "cert": cert.to_json(),
                     "exact": True}


def cmd_green(args, family, P):
    t = parse_param(args.t)
    place = Place.parse(args.place)
    tau = t
    tr = green(family, tau, P.at(tau), place, args.tol, budget=args.budget)
    consts = None
    try:
        consts = filtration_consts(family, P, place).to_json()
    except ArithmeticError:
        pass
    code = EXIT_OK if tr.G.resolved else EXIT_UNRESOLVED
    return code, {**_provenance(args, family, P), "t": str(t), "place": str(place), "tol": args.tol,
                  "budget": args.budget, "constants": consts, **tr.to_json()}


def cmd_height(args, family, P):
    t = parse_param(args.t)
    if isinstance(t, complex):
        raise InputError("height needs a rational parameter")
    h = canonical_height(family, t, P, args.tol, args.budget)
    out = {**_provenance(args, family, P), "t": str(t), "htilde": h.value, "tail": h.tail_bound,
           "places": [str(p) for p in h.places_used], "status": h.status,
           "local": h.to_json()["local"], "tol": args.tol, "budget": args.budget}
    try:
        hp = h_P(family, P, t, args.tol, args.budget)
        out.update({"hP": hp.value, "hP_tail": hp.tail_bound, "ell": str(hp.ell)})
    except AssumptionUndetermined:
        out["hP"] = None
    return (EXIT_OK if h.resolved else EXIT_UNRESOLVED), out


def cmd_sigma(args, family, P):
    table = cached_orbit(family, P, args.n, not args.no_cache)
    s = sigma_n(family, P, args.n, table)
    if s == ZERO_MARKER:
        return EXIT_INAPPLICABLE, {**_provenance(args, family, P), "n": args.n, "status": ZERO_MARKER}
    factors = factor_rational(s)
    rational_roots = [str(-g.coeff(0)) for g, _ in factors if g.degree == 1]
    return EXIT_OK, {**_provenance(args, family, P), "n": args.n, "poly": s.to_json(),
                     "degree": s.degree, "factors": [g.to_json() for g, _ in factors],
                     "rational_roots": rational_roots, "exact": True}


def cmd_witnesses(args, family, P):
    primes = [int(x) for x in args.primes.split(",") if x.strip()]
    try:
        ws = sigma_witnesses(family, P, primes, parallel=args.threads > 1)
    except ValueError as e:
        return EXIT_INAPPLICABLE, {**_provenance(args, family, P), "error": str(e)}
    docs = [w.to_json() for w in ws]
    if args.outdir:
        d = Path(args.outdir)
        d.mkdir(parents=True, exist_ok=True)
        for w in docs:
            (d / f"witness_p{w['p']}.json").write_text(json.dumps(w, indent=2, sort_keys=True) + "\n")
    return EXIT_OK, {**_provenance(args, family, P), "primes": primes, "witnesses": docs}


def cmd_resultant(args, family, P):
    if args.b is not None:
        verdict = sigma_empty_certificate(Q(args.b))
        return (EXIT_OK if verdict else EXIT_INAPPLICABLE), {
            **_provenance(args, family), "b": args.b,
            "sigma_empty": bool(verdict), "verdict": "empty" if verdict else "inapplicable"}
    try:
        rep = resultant_in_b(family, args.n)
    except ValueError as e:
        return EXIT_INAPPLICABLE, {**_provenance(args, family), "error": str(e)}
    if args.csv:
        rows = ["k,coeff"] + [f"{k},{c}" for k, c in enumerate(rep.poly.coeffs)]
        return EXIT_OK, "\n".join(rows) + "\n"
    ok = rep.degree_ok and rep.leading_unit and rep.integral and rep.clo_equal is not False
    return (EXIT_OK if ok else EXIT_CERT), {**_provenance(args, family), **rep.to_json()}


def cmd_ffcheck(args, family, P):
    table = finite_field_sigma(args.p, args.k, int(args.a), int(args.b), family.delta)
    periods = {str(t): n for t, n in table.items()}
    return EXIT_OK, {**_provenance(args, family), "p": args.p, "k": args.k, "a": args.a, "b": args.b,
                     "all_periodic": True, "count": len(periods), "periods": periods}


def cmd_render(args, family, P):
    c = complex(args.center.replace("i", "j").replace(" ", ""))
    win = Window.square(c, args.radius, args.res)
    grid = escape_map(family, P, win, args.n_max, args.R, args.threads)
    path = write_image(grid, args.out, args.format)
    return EXIT_OK, {**_provenance(args, family, P), "out": str(path), "center": [c.real, c.imag],
                     "radius": args.radius, "res": args.res, "n_max": args.n_max, "R": grid.R,
                     "bounded_pixels": int((grid.flag == 0).sum()),
                     "sha256": hashlib.sha256(Path(path).read_bytes()).hexdigest()}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="henonheights", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, point=True, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--family", default="quadratic",
                       help="'quadratic', 'power:d', a JSON file or inline JSON")
        p.add_argument("--delta", default=None, help="δ for the preset families")
        if point:
            p.add_argument("--point", default="0,0", help="'a,b' rationals, or JSON with polynomial a, b")
        p.add_argument("--out", default=None)
        p.add_argument("--no-cache", action="store_true", help="bypass the orbit-polynomial disk cache")
        p.set_defaults(fn=fn)
        return p

    p = add("orbit", cmd_orbit, help="orbit polynomials A_n, B_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv", action="store_true", help="degree profile as CSV")
    p = add("ffheight", cmd_ffheight, help="function-field height ℓ")
    p.add_argument("--n-budget", type=int, default=8)
    for name, fn in (("green", cmd_green), ("height", cmd_height)):
        p = add(name, fn, help="local Green values" if name == "green" else "global heights")
        p.add_argument("--t", required=True)
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--budget", type=int, default=256)
        if name == "green":
            p.add_argument("--place", default="inf")
    p = add("sigma", cmd_sigma, help="periodic parameters of exact period dividing n")
    p.add_argument("--n", type=int, required=True)
    p = add("witnesses", cmd_witnesses, help="certified periodic parameters from reversibility")
    p.add_argument("--primes", default="3,5,7")
    p.add_argument("--outdir", default=None)
    p.add_argument("--threads", type=int, default=1)
    p = add("resultant", cmd_resultant, point=False, help="resultants on the (0, b) slice")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--b", default=None, help="check emptiness for this b instead")
    p.add_argument("--csv", action="store_true")
    p = add("ffcheck", cmd_ffcheck, point=False, help="exhaustive periodicity over F_{p^k}")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="0")
    p = add("render", cmd_render, help="escape-rate raster")
    p.add_argument("--center", default="0")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--res", type=int, default=512)
    p.add_argument("--n-max", type=int, default=256)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("ppm", "png"), default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        family = parse_family(args.family, args.delta)
        P = parse_point(args.point) if hasattr(args, "point") else None
        if args.cmd == "render" and not args.out:
            raise InputError("render needs --out")
        code, result = args.fn(args, family, P)
    except InputError as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_INPUT
    except AssumptionUndetermined as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_UNDETERMINED
    except NotImplementedError as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_INAPPLICABLE
    except MemoryError as e:
        print(json.dumps({"error": f"budget exhausted: {e}"}), file=sys.stderr)
        return EXIT_UNRESOLVED
    except ArithmeticError as e:
        print(json.dumps({"error": str(e)}), file=sys.stderr)
        return EXIT_CERT
    text = result if isinstance(result, str) else json.dumps(result, indent=2, sort_keys=True, default=str) + "\n"
    if args.out and args.cmd != "render":
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
