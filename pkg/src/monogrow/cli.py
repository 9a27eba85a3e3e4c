"""Command-line front end.

Subcommands: monodromy, curves, example, bound-check, cut-check, kdb.
Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from monogrow import families
from monogrow.curves import GrowthCurve, RadiusGrid, run_curves
from monogrow.hamiltonian import (
    AngleProfile,
    HamburgerSpec,
    dump_spec,
    load_spec,
    reparameterize,
)
from monogrow.monodromy import PropagationError, monodromy_at
from monogrow.regvar import PowerLaw, PowerLogLaw, PowerModulus
from monogrow.spectrum import (
    ZeroIsolationError,
    cut_zero_count_report,
    eigenvalue_density,
    fit_order,
)
from monogrow.upper_bounds import check_order_conditions, modulus_recipe

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' literals (also plain 'a', 'bi', 'i')."""
    t = text.strip().replace(" ", "")
    num = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
    m = re.fullmatch(rf"(?P<re>{num})(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i", t)
    if m:
        im = m.group("im")
        if im in ("+", "-"):
            im += "1"
        return complex(float(m.group("re")), float(im))
    m = re.fullmatch(rf"(?P<im>{num}|[+-]?)i", t)
    if m:
        im = m.group("im")
        if im in ("", "+"):
            im = "1"
        elif im == "-":
            im = "-1"
        return complex(0.0, float(im))
    m = re.fullmatch(num, t)
    if m:
        return complex(float(t), 0.0)
    raise ValueError(f"cannot parse complex literal {text!r}; expected 'a+bi'")


def parse_law(text: str):
    """Parse c*r^p*log(r)^k1*loglog(r)^k2 mini-expressions."""
    scale = 1.0
    rho = 0.0
    k1 = 0.0
    k2 = 0.0
    seen_r = False
    for tok in text.replace(" ", "").split("*"):
        if not tok:
            raise ValueError(f"empty factor in law expression {text!r}")
        m = re.fullmatch(r"(loglog|log)\(r\)(?:\^([+-]?[\d.]+))?", tok)
        if m:
            expo = float(m.group(2)) if m.group(2) else 1.0
            if m.group(1) == "log":
                k1 += expo
            else:
                k2 += expo
            continue
        m = re.fullmatch(r"r(?:\^([+-]?[\d.]+))?", tok)
        if m:
            rho += float(m.group(1)) if m.group(1) else 1.0
            seen_r = True
            continue
        m = re.fullmatch(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?", tok)
        if m:
            scale *= float(tok)
            continue
        raise ValueError(f"cannot parse factor {tok!r} in law expression {text!r}")
    if not seen_r and (k1 or k2):
        raise ValueError(f"law expression {text!r} has log factors but no power of r")
    if k1 == 0.0 and k2 == 0.0:
        return PowerLaw(rho, scale)
    return PowerLogLaw(rho, k1, k2, scale)


def parse_modulus(text: str) -> PowerModulus:
    law = parse_law(text)
    if not isinstance(law, PowerLaw):
        raise ValueError("moduli accept pure power expressions c*r^a only")
    return PowerModulus(law.index, law.scale)


def _emit_json(doc, args) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)


def _write(outdir: str | None, name: str, text: str) -> None:
    if outdir is None:
        sys.stdout.write(text)
        return
    path = Path(outdir)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text, encoding="utf-8")


def _grid_from_args(args) -> RadiusGrid:
    return RadiusGrid(args.rmin, args.rmax, args.points)


def _complex_pair(value: complex) -> list[float]:
    return [float(np.real(value)), float(np.imag(value))]


def cmd_monodromy(args) -> int:
    spec = load_spec(args.system)
    z = parse_complex(args.z)
    w = monodromy_at(spec, z, tol=args.tol)
    log_det = w.log_det()
    doc = {
        "W_unit": [[_complex_pair(w.unit[i, j]) for j in range(2)] for i in range(2)],
        "logScale": w.log_scale,
        "logNorm": w.log_norm,
        "det_check": abs(log_det),
    }
    _emit_json(doc, args)
    return EXIT_OK


def cmd_curves(args) -> int:
    spec = load_spec(args.system)
    companion = load_spec(args.companion) if args.companion else None
    modulus = parse_modulus(args.modulus) if args.modulus else None
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    curve = run_curves(spec, _grid_from_args(args), which,
                       companion=companion, modulus=modulus, samples=args.samples)
    _write(args.out, "curves.csv", curve.to_csv_text())
    return EXIT_OK


def _report_slopes(curve: GrowthCurve) -> dict:
    slopes = {}
    for tag, key in (("lower", "lower"), ("maxmod", "maxmod"),
                     ("upper:recipe", "upper"), ("upper:opt", "upper_opt")):
        if tag in curve.tags():
            rs, vs = curve.column(tag)
            try:
                slopes[key] = fit_order(rs, vs).slope
            except ValueError:
                slopes[key] = None
    slopes.setdefault("lower", None)
    slopes.setdefault("maxmod", None)
    slopes.setdefault("upper", None)
    return slopes


def cmd_example(args) -> int:
    emit = {e.strip() for e in args.emit.split(",") if e.strip()}
    unknown = emit - {"spec", "curves", "report"}
    if unknown:
        raise ValueError(f"unknown emit target {sorted(unknown)[0]!r}")
    grid = RadiusGrid(args.rmin, args.rmax, args.points)
    params: dict = {}
    predicted = {"lower": None, "upper": None}
    extras: dict = {}
    companion = None
    modulus = None
    which = ["maxmod", "upper:recipe"]

    if args.family == "chirp":
        profile = families.chirp_profile(args.gamma, args.beta)
        if args.kappa and args.kappa > 1:
            profile = reparameterize(profile, args.kappa)
        spec = profile
        kappa = args.kappa or 1.0
        holder = args.gamma * kappa / (args.beta * kappa + 1.0)
        predicted["upper"] = 1.0 / (1.0 + holder)
        params = {"gamma": args.gamma, "beta": args.beta, "kappa": kappa}
        which = ["upper:recipe"]
        modulus = None  # estimated from the profile
    elif args.family == "sharpness":
        g = PowerLaw(args.rho)
        m = parse_law(args.m)
        fam = families.sharpness_family(families.SharpnessParams(g, m, args.segments))
        spec = fam.profile
        companion = fam.hamburger
        modulus = fam.modulus
        predicted = {"lower": fam.lower.index, "upper": fam.upper.index}
        extras["rescale_doublings"] = fam.rescale_doublings
        params = {"rho": args.rho, "m": args.m, "segments": args.segments}
        which = ["lower", "maxmod", "upper:recipe"]
    elif args.family == "polygon":
        amp = parse_modulus(args.pi)
        m = parse_law(args.m)
        js = np.arange(1, args.segments + 1, dtype=float)
        lengths = 1.0 / np.asarray(m(js), float)
        poly = families.PolygonParams(lengths, lengths.copy(), amp)
        profile, ham = families.polygon_profile(poly)
        spec = profile
        companion = ham
        modulus = amp
        params = {"pi": args.pi, "m": args.m, "segments": args.segments}
        which = ["lower", "maxmod", "upper:recipe"]
    elif args.family == "cantor":
        diag = families.cantor_diagonal(args.p, args.depth, args.removal)
        spec = diag
        params = {"p": args.p, "depth": args.depth}
        which = ["maxmod"]
        from monogrow.hamiltonian import diagonal_to_profile, hamburger_from_diagonal
        from monogrow.monodromy import transfer_chain_at

        rng = np.random.default_rng(args.seed)
        zs = rng.uniform(-80, 80, 8) + 1j * rng.uniform(0.5, 60, 8)
        ham = hamburger_from_diagonal(diag)
        prof = diagonal_to_profile(diag)
        u1, l1 = transfer_chain_at(ham, zs)
        u2, l2 = transfer_chain_at(prof, zs ** 2)
        w22 = u1[:, 3] * np.exp(l1)
        w22t = u2[:, 3] * np.exp(l2)
        extras["sqrt_identity_max_residual"] = float(
            np.max(np.abs(w22 - w22t) / (1.0 + np.abs(w22t)))
        )
    else:
        raise ValueError(f"unknown family {args.family!r}")

    if "spec" in emit:
        _write(args.out, "spec.json", json.dumps(dump_spec(spec), indent=2, sort_keys=True) + "\n")
        if companion is not None and args.out is not None:
            _write(args.out, "hamburger.json",
                   json.dumps(dump_spec(companion), indent=2, sort_keys=True) + "\n")
    if emit & {"curves", "report"}:
        curve = run_curves(spec, grid, which, companion=companion, modulus=modulus,
                           samples=args.samples, t_floor=args.t_floor)
        if "curves" in emit:
            _write(args.out, "curves.csv", curve.to_csv_text())
        if "report" in emit:
            report = {
                "family": args.family,
                "params": params,
                "slopes": _report_slopes(curve),
                "predicted": predicted,
            }
            if extras:
                report["extras"] = extras
            text = json.dumps(report, indent=2, sort_keys=True) + "\n"
            _write(args.out, "report.json", text)
    elif extras and "spec" not in emit:
        _emit_json({"family": args.family, "params": params, "extras": extras}, args)
    return EXIT_OK


def cmd_bound_check(args) -> int:
    spec = load_spec(args.system)
    if not isinstance(spec, AngleProfile):
        raise ValueError("bound-check drives the recipe family and needs a profile spec")
    modulus = parse_modulus(args.modulus)
    grid = _grid_from_args(args)

    def family(r: float):
        return modulus_recipe(spec, r, modulus)[0]

    report = check_order_conditions(spec, args.d, family, args.C, grid.values())
    doc = {
        "d": report.d,
        "C": report.constant,
        "implied_bound_constant": report.implied_bound_constant,
        "all_ok": report.all_ok,
        "rows": [
            {"r": row.r, "lhs": [float(v) for v in row.lhs],
             "limits": [float(v) for v in row.limits], "ok": [bool(v) for v in row.ok]}
            for row in report.rows
        ],
    }
    _emit_json(doc, args)
    return EXIT_OK


def cmd_cut_check(args) -> int:
    spec = load_spec(args.system)
    if not isinstance(spec, HamburgerSpec):
        raise ValueError("cut-check needs a hamburger spec")
    if args.keep:
        keep = [int(k) for k in args.keep.split(",") if k.strip()]
    else:
        rng = np.random.default_rng(args.seed)
        count = args.keep_count or max(1, spec.count // 2)
        keep = sorted(rng.choice(np.arange(1, spec.count + 1), size=count, replace=False).tolist())
    report = cut_zero_count_report(spec, keep, args.rmax)
    doc = {
        "keep": keep,
        "rmax": args.rmax,
        "max_violation": report.max_violation,
        "ok": report.ok,
        "checked_radii": int(report.radii.size),
    }
    _emit_json(doc, args)
    return EXIT_OK


def cmd_kdb(args) -> int:
    spec = load_spec(args.system)
    empirical, predicted = eigenvalue_density(spec, args.rmax)
    _emit_json({"empirical": empirical, "predicted": predicted}, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monogrow",
                                description="canonical-system monodromy growth toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, grid=False):
        sp.add_argument("--out", default=None, help="output directory (default: stdout)")
        sp.add_argument("--tol", type=float, default=1e-8, help="propagation tolerance")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
        if grid:
            sp.add_argument("--rmin", type=float, default=1e2)
            sp.add_argument("--rmax", type=float, default=1e6)
            sp.add_argument("--points", type=int, default=12)
            sp.add_argument("--samples", type=int, default=64, help="circle samples for maxmod")

    sp = sub.add_parser("monodromy", help="scaled monodromy matrix at one point")
    sp.add_argument("--system", required=True)
    sp.add_argument("--z", required=True, help="complex literal a+bi")
    add_common(sp)
    sp.set_defaults(fn=cmd_monodromy)

    sp = sub.add_parser("curves", help="growth curves as CSV")
    sp.add_argument("--system", required=True)
    sp.add_argument("--which", default="maxmod", help="comma list: lower,maxmod,upper:recipe,upper:opt")
    sp.add_argument("--companion", default=None, help="hamburger spec for the lower curve")
    sp.add_argument("--modulus", default=None, help="modulus expression c*r^a")
    add_common(sp, grid=True)
    sp.set_defaults(fn=cmd_curves)

    sp = sub.add_parser("example", help="generate a named family and optional curves/report")
    sp.add_argument("--family", required=True, choices=["chirp", "polygon", "sharpness", "cantor"])
    sp.add_argument("--emit", default="spec", help="comma list: spec,curves,report")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--rho", type=float, default=2.0 / 3.0)
    sp.add_argument("--m", default="r^1.5", help="length law expression")
    sp.add_argument("--pi", default="r^0.5", help="polygon amplitude expression")
    sp.add_argument("--segments", type=int, default=5000)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--removal", type=float, default=None)
    sp.add_argument("--t-floor", type=float, default=1e-4, dest="t_floor",
                    help="evaluation floor for modulus estimation")
    add_common(sp, grid=True)
    sp.set_defaults(fn=cmd_example)

    sp = sub.add_parser("bound-check", help="power-law order conditions for the recipe family")
    sp.add_argument("--system", required=True)
    sp.add_argument("--d", type=float, required=True)
    sp.add_argument("--C", type=float, required=True)
    sp.add_argument("--modulus", required=True, help="modulus expression c*r^a")
    add_common(sp, grid=True)
    sp.set_defaults(fn=cmd_bound_check)

    sp = sub.add_parser("cut-check", help="zero-count comparison after a segment cut")
    sp.add_argument("--system", required=True)
    sp.add_argument("--keep", default=None, help="comma list of 1-based segment indices")
    sp.add_argument("--keep-count", type=int, default=None, dest="keep_count")
    sp.add_argument("--rmax", type=float, default=1e3)
    add_common(sp)
    sp.set_defaults(fn=cmd_cut_check)

    sp = sub.add_parser("kdb", help="empirical vs predicted eigenvalue density")
    sp.add_argument("--system", required=True)
    sp.add_argument("--rmax", type=float, default=1e2)
    add_common(sp)
    sp.set_defaults(fn=cmd_kdb)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (PropagationError, ZeroIsolationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
