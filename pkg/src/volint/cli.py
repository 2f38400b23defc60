"""Command-line front end: ``volint <subcommand> [options]``.

Exit codes: 0 on success, 2 on input or parse errors, 3 on numerical
failures.  Every failure prints one line starting with ``error:``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import circle_cocycles as cc
from . import dehn, hypvol, lattice_chains as lc, lorentz, transfer
from .errors import InputError, NumericalError, SchemaError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _render(value: Any, digits: int) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.{digits}g}")
    if isinstance(value, complex):
        return [_render(value.real, digits), _render(value.imag, digits)]
    if isinstance(value, np.ndarray):
        return _render(value.tolist(), digits)
    if isinstance(value, dict):
        return {str(k): _render(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(v, digits) for v in value]
    return str(value)


def _emit(payload: dict, args) -> None:
    data = _render(payload, args.digits)
    if args.format == "json":
        print(json.dumps(data, sort_keys=True, separators=(",", ":")))
        return
    for key in sorted(data):
        v = data[key]
        print(f"{key}: {v if isinstance(v, str) else json.dumps(v, sort_keys=True)}")


def _read_json(source: str) -> Any:
    text = source if source.lstrip().startswith(("{", "[")) else _read_text(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {source[:40]!r}: {exc.msg}") from exc


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _pair(text: str, kind=Fraction) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"expected a pair 'a,b', got {text!r}")
    try:
        return tuple(kind(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse {text!r}") from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {text!r}") from exc


# subcommands

def cmd_fund_cycle(args) -> dict:
    z = lc.fundamental_cycle(args.n, cap=args.cap)
    out = {"chain": z.to_json(), "terms": len(z),
           "boundary_zero": lc.boundary(z).is_zero(),
           "volume": lc.evaluate(lc.euclidean_volume_cocycle(args.n), z)}
    return out


def cmd_pairing(args) -> dict:
    if args.chain:
        chain = lc.LatticeChain.from_json(_read_json(args.chain))
    else:
        chain = lc.fundamental_cycle(args.dim, cap=args.cap)
    if args.cochain == "volume":
        alpha = lc.euclidean_volume_cocycle(chain.dim)
    else:
        alpha = lc.constant_cochain(1) if chain.degree == 0 else lc.zero_cochain(chain.degree)
    if alpha.degree != chain.degree:
        raise InputError(f"cochain degree {alpha.degree} does not match chain degree {chain.degree}")
    return {"cochain": args.cochain, "degree": chain.degree, "value": lc.evaluate(alpha, chain)}


def _load_hom(source: str) -> cc.TorusHom:
    return cc.TorusHom.from_json(_read_json(source))


def cmd_rotnum(args) -> dict:
    rho = _load_hom(args.hom)
    reduced = cc.o2_reduction(rho)
    if isinstance(reduced, cc.ZeroByReflection):
        return {"m": rho.m, "lift": Fraction(0), "reduced": Fraction(0),
                "route": f"reflection in factor {reduced.factor}"}
    v = cc.higher_rotation_number(reduced.hom, method=args.method, m_cap=args.m_cap)
    return {"m": rho.m, "lift": v.lift, "reduced": v.reduced, "route": args.method}


def cmd_audit(args) -> dict:
    homs = [_load_hom(h) for h in args.hom]
    report = cc.integrality_audit(_fraction(args.vol), homs, args.m, args.bieberbach)
    return {"defect": report.defect, "integral": report.integral, "modulus": report.modulus,
            "boundary_terms": list(report.boundary_terms)}


def _load_matrices(source: str, tol: float) -> list[lorentz.LorentzMatrix]:
    data = _read_json(source)
    if isinstance(data, dict) and "family" in data:
        items = data["family"]
        if not isinstance(items, list) or not items:
            raise SchemaError("'family' must be a non-empty list of matrices")
    else:
        items = [data]
    out = []
    for item in items:
        if not isinstance(item, dict):
            raise SchemaError("matrix must be an object with 'rows'")
        out.append(lorentz.LorentzMatrix.from_json(item, tol))
    return out


def cmd_classify(args) -> dict:
    mats = _load_matrices(args.matrix, args.tol)
    if len(mats) == 1:
        return lorentz.classify(mats[0], args.tol).to_json()
    case = lorentz.common_invariant_structure(mats, args.tol, seed=args.seed)
    return {"classes": [lorentz.classify(m, args.tol).to_json() for m in mats], **case.to_json()}


def cmd_decompose_p(args) -> dict:
    (p,) = _load_matrices(args.matrix, args.tol)[:1]
    U, t, x = lorentz.decompose_P(p, args.tol)
    return {"U": U, "t": t, "x": x}


def _load_points(source: str) -> list[hypvol.HPoint]:
    data = _read_json(source)
    if isinstance(data, dict):
        data = data.get("points")
    if not isinstance(data, list):
        raise SchemaError("points must be a list")
    return [hypvol.HPoint.from_json(p if isinstance(p, dict) else {"coords": p}) for p in data]


def cmd_area(args) -> dict:
    pts = _load_points(args.points)
    if len(pts) != 3:
        raise InputError(f"area takes 3 points, got {len(pts)}")
    return {"area": hypvol.area2(*pts)}


def cmd_ideal_vol(args) -> dict:
    if args.points:
        pts = _load_points(args.points)
        if len(pts) != 4:
            raise InputError(f"ideal-vol takes 4 points, got {len(pts)}")
        return {"volume": hypvol.vol3_ideal_points(*pts)}
    if args.z is None:
        raise InputError("give a shape parameter z or --points")
    try:
        z = complex(args.z.replace(" ", ""))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {args.z!r}") from exc
    return {"z": z, "volume": hypvol.vol3_ideal(z), "volume_lambda": hypvol.vol3_ideal_lambda(z)}


def _system(args) -> dehn.GluingSystem:
    if args.system is None:
        return dehn.figure_eight()
    return dehn.load_gluing_system(_read_text(args.system))


def cmd_dehn(args) -> dict:
    gs = _system(args)
    slope = None if args.slope is None else dehn.check_slope(_pair(args.slope, int))
    if args.action == "solve":
        return dehn.solve(gs, None, tol=args.tol, max_iter=args.max_iter).to_json(args.digits)
    if slope is None:
        raise InputError(f"dehn {args.action} needs --slope p,q")
    if args.action == "fill":
        return dehn.solve(gs, slope, tol=args.tol, max_iter=args.max_iter).to_json(args.digits)
    path = dehn.filling_path(gs, slope, args.steps, tol=args.tol, max_iter=args.max_iter)
    return path.to_json(args.digits)


def cmd_double(args) -> dict:
    vol, ratio = dehn.doubling_volume(args.base, args.k, args.ell)
    return {"volume": vol, "ratio": ratio}


def _domain(source: str) -> transfer.IntervalDomain:
    if source == "std":
        return transfer.standard_domain()
    if source.startswith("bad:"):
        try:
            n = int(source[4:])
        except ValueError as exc:
            raise InputError(f"bad:N needs an integer, got {source!r}") from exc
        return transfer.bad_domain(n)
    return transfer.IntervalDomain.from_json(_read_json(source))


ALPHAS = {
    "const": (1, lambda _g: 1),
    "dist": (2, lambda a, b: min(abs(b - a), 1)),
}


def cmd_transfer(args) -> dict:
    D = _domain(args.domain)
    if args.action == "count":
        K = _pair(args.K)
        return {"count": transfer.translate_overlap_count(D, K, args.N), "N": args.N, "K": list(K)}
    arity, alpha = ALPHAS[args.alpha]
    inputs = [_fraction(s) for s in args.inputs.split(",")] if args.inputs else [Fraction(0)] * arity
    if len(inputs) != arity:
        raise InputError(f"cochain {args.alpha} takes {arity} inputs, got {len(inputs)}")
    r = transfer.transfer_cochain(alpha, D, args.samples)(*inputs)
    return {"value": r.value, "quadrature_error": r.quadrature_error, "flagged": r.flagged}


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance (default 1e-9)")
    common.add_argument("--max-iter", type=int, default=100, help="iteration cap (default 100)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--digits", type=int, default=12, help="significant digits for reals")

    parser = _Parser(prog="volint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    p = add("fund-cycle", cmd_fund_cycle, "fundamental cycle of Z^n as a chain")
    p.add_argument("n", type=int)
    p.add_argument("--cap", type=int, default=lc.DEFAULT_CAP)

    p = add("pairing", cmd_pairing, "evaluate a cochain on a chain")
    p.add_argument("--chain", help="chain JSON file (default: fundamental cycle of --dim)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--cap", type=int, default=lc.DEFAULT_CAP)
    p.add_argument("--cochain", choices=("volume", "zero"), default="volume")

    p = add("rotnum", cmd_rotnum, "higher rotation number of a hom Z^(2m-1) -> O(2)^m")
    p.add_argument("--hom", required=True, help="hom JSON file or inline JSON")
    p.add_argument("--method", choices=("kernel", "chain"), default="kernel")
    p.add_argument("--m-cap", type=int, default=cc.DEFAULT_M_CAP)

    p = add("audit", cmd_audit, "integrality audit of a normalized volume against cusp data")
    p.add_argument("--vol", required=True, help="normalized volume as p/q")
    p.add_argument("--hom", action="append", default=[], help="cusp hom JSON (repeatable)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bieberbach", type=int, default=None)

    p = add("classify", cmd_classify, "classify a Lorentz matrix, or conjugate a commuting family")
    p.add_argument("--matrix", required=True, help="matrix JSON, or {\"family\": [...]}")

    p = add("decompose-p", cmd_decompose_p, "write an element of P as m(U) a(t) n(x)")
    p.add_argument("--matrix", required=True)

    p = add("area", cmd_area, "signed area of a hyperbolic triangle")
    p.add_argument("--points", required=True, help="JSON list of 3 points")

    p = add("ideal-vol", cmd_ideal_vol, "volume of an ideal tetrahedron")
    p.add_argument("z", nargs="?", help="shape parameter, e.g. 0.5+0.866j")
    p.add_argument("--points", help="JSON list of 4 ideal points of H^3")

    p = add("dehn", cmd_dehn, "gluing-equation solves and filling paths")
    p.add_argument("action", choices=("solve", "fill", "path"))
    p.add_argument("--system", help="gluing system JSON (default: bundled figure-eight)")
    p.add_argument("--slope", help="filling slope p,q")
    p.add_argument("--steps", type=int, default=20)

    p = add("double", cmd_double, "volume of the folded k-fold double")
    p.add_argument("--base", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, default=0)

    p = add("transfer", cmd_transfer, "translate counts and transfer integrals")
    p.add_argument("action", choices=("count", "demo"))
    p.add_argument("--domain", default="std", help="domain JSON file, 'std', or bad:N")
    p.add_argument("--K", default="0,1", help="closed interval a,b")
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--alpha", choices=sorted(ALPHAS), default="dist")
    p.add_argument("--inputs", help="comma-separated rationals")
    p.add_argument("--samples", type=int, default=64)
    return parser


def _one_line(message: str) -> str:
    return " ".join(str(message).split())


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.tol <= 0 or args.max_iter < 0 or args.digits < 1:
            raise InputError("--tol must be positive, --max-iter non-negative, --digits >= 1")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            payload = args.func(args)
        _emit(payload, args)
    except UsageError as exc:
        print(f"error: {_one_line(exc)}")
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {_one_line(exc)}")
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {_one_line(exc)}")
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
