"""Command-line interface.

Subcommands mirror the library modules: ``constants``, ``steady``,
``linearize``, ``evolve``, ``diag``, ``blowdown`` and ``verify``.  Outputs
are CSV/JSON files written with round-trip numeric formatting; experiment
runs additionally leave a manifest.json from which they can be reproduced
bit for bit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .blowdown import cosine_sphere_profile, sphere_identity
from .exponents import ProblemParams, critical_exponents, spectral_constants
from .grids import RadialGrid
from .linearize import kernel_from_steady, kernel_residual, singular_kernel
from .runner import (
    fmt,
    profile_to_csv,
    run,
    run_batch,
    verify_suite,
    write_csv,
)
from .steady import singular_profile, solve_ground_profile

__all__ = ["main"]


def _constants_record(dim: int, p: float) -> dict:
    exps = critical_exponents(dim)
    record = {
        "N": dim,
        "p": p,
        "pF": exps.pF,
        "pS": fmt(exps.pS) if not isinstance(exps.pS, float) else exps.pS,
        "pc": fmt(exps.pc) if not isinstance(exps.pc, float) else exps.pc,
    }
    try:
        params = ProblemParams(dim, p)
        c = spectral_constants(params)
        record.update(m=c.m, L=c.L, lambda1=c.lambda1, lambda2=c.lambda2)
    except (ValueError, TypeError):
        record.update(m=2.0 / (p - 1.0) if p > 1 else None, L=None,
                      lambda1=None, lambda2=None)
    return record


def _cmd_constants(args) -> int:
    if args.table:
        lo, hi = (int(x) for x in args.table.split("..", 1))
        config = {
            "experiment": "constants-table",
            "table": {"min": lo, "max": hi},
        }
        if args.exponent is not None:
            config["exponent"] = args.exponent
        manifest = run(config, args.out_dir)
        print((Path(args.out_dir) / "constants.csv").read_text(), end="")
        return 0 if manifest.all_passed else 1
    if args.dim is None or args.exponent is None:
        print("constants: need --dim and --exponent (or --table)", file=sys.stderr)
        return 2
    record = _constants_record(args.dim, args.exponent)
    text = json.dumps(record, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_steady(args) -> int:
    params = ProblemParams(args.dim, args.exponent)
    grid = RadialGrid.make(rmax=args.rmax)
    sol = solve_ground_profile(params, grid, alpha=args.alpha)
    profile_to_csv(sol.phi, Path(args.out))
    report = {
        "coefficient": sol.tail.coefficient,
        "kind": sol.tail.kind,
        "window": list(sol.tail.window),
        "residual": sol.tail.residual,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.fit_report:
        Path(args.fit_report).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_linearize(args) -> int:
    params = ProblemParams(args.dim, args.exponent)
    grid = RadialGrid.make(rmax=args.rmax)
    if args.which == "Z":
        sol = solve_ground_profile(params, grid)
        element = kernel_from_steady(sol)
        res = kernel_residual(element, sol.phi)
        mask = grid.nodes <= grid.rmax / 2.0
        report = {"which": "Z", "sup_residual": float(np.max(np.abs(res[mask])))}
    else:
        which = "first" if args.which == "Zinf" else "second"
        element = singular_kernel(params, grid, which)
        res = kernel_residual(element, singular_profile(params, grid))
        r = grid.nodes
        mask = (r >= 1.0) & (r <= 100.0)
        c = spectral_constants(params)
        scale = params.p * c.L ** (params.p - 1.0) * r[mask] ** (-2.0)
        scale = scale * np.abs(element.profile.values[mask])
        report = {
            "which": args.which,
            "annulus": [1.0, 100.0],
            "sup_relative_residual": float(np.max(np.abs(res[mask]) / scale)),
        }
    values = element.profile.values
    write_csv(Path(args.out), ["r", "value"], zip(grid.nodes, values))
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_evolve(args) -> int:
    config = json.loads(Path(args.config).read_text())
    if isinstance(config, dict) and "experiments" in config:
        manifests = run_batch(config["experiments"], args.out_dir)
        return 0 if all(m.all_passed for m in manifests) else 1
    manifest = run(config, args.out_dir)
    for check in manifest.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.measured} (threshold: {check.threshold})")
    return 0 if manifest.all_passed else 1


def _cmd_diag(args) -> int:
    if args.diag_cmd != "interp":
        print("diag: unknown subcommand", file=sys.stderr)
        return 2
    radii = [float(x) for x in args.radii.split(",")]
    config = {"experiment": "interp", "dim": args.dim, "radii": radii}
    manifest = run(config, args.out_dir)
    if args.out:
        src = Path(args.out_dir) / "interp.json"
        Path(args.out).write_text(src.read_text())
    return 0 if manifest.all_passed else 1


def _cmd_blowdown(args) -> int:
    if args.action == "sphere-identity":
        params = ProblemParams(args.dim, args.exponent)
        if args.preset != "cos":
            print(f"blowdown: unknown preset {args.preset!r}", file=sys.stderr)
            return 2
        profile = cosine_sphere_profile(params, args.amplitude)
        value = sphere_identity(profile)
        print(json.dumps({"preset": args.preset, "amplitude": args.amplitude,
                          "value": value}, indent=2, sort_keys=True))
        return 0
    config = {
        "experiment": "blowdown",
        "dim": args.dim,
        "exponent": args.exponent,
        "scales": [float(s) for s in args.scales.split(",")],
    }
    if args.infile:
        config["input_csv"] = args.infile
    manifest = run(config, args.out_dir)
    if args.out:
        src = Path(args.out_dir) / "blowdown.csv"
        Path(args.out).write_text(src.read_text())
    return 0 if manifest.all_passed else 1


def _cmd_verify(args) -> int:
    return verify_suite(name_filter=args.filter)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlheat",
        description="Numerics for the radial supercritical nonlinear heat equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="critical exponents and spectral constants")
    p.add_argument("--dim", type=int)
    p.add_argument("--exponent", type=float)
    p.add_argument("--table", help="dimension range N_MIN..N_MAX, emits CSV")
    p.add_argument("--out", help="write the JSON record here instead of stdout")
    p.add_argument("--out-dir", default="runs/constants")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("steady", help="solve the radial steady profile")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--exponent", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--rmax", type=float, default=1e4)
    p.add_argument("--out", required=True, help="profile CSV (columns r,value)")
    p.add_argument("--fit-report", help="tail-fit JSON path (default: stdout)")
    p.set_defaults(func=_cmd_steady)

    p = sub.add_parser("linearize", help="kernel elements of the linearization")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--exponent", type=float, required=True)
    p.add_argument("--which", choices=["Z", "Zinf", "Zinf2"], required=True)
    p.add_argument("--rmax", type=float, default=1e4)
    p.add_argument("--out", required=True, help="kernel CSV (columns r,value)")
    p.set_defaults(func=_cmd_linearize)

    p = sub.add_parser("evolve", help="run a configured evolution experiment")
    p.add_argument("--config", required=True, help="experiment JSON")
    p.add_argument("--out-dir", default="runs/evolve")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("diag", help="diagnostics utilities")
    diag_sub = p.add_subparsers(dest="diag_cmd", required=True)
    q = diag_sub.add_parser("interp", help="parabolic interpolation inequality")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--radii", default="1,2,4,8")
    q.add_argument("--out", help="also copy interp.json here")
    q.add_argument("--out-dir", default="runs/interp")
    q.set_defaults(func=_cmd_diag)

    p = sub.add_parser("blowdown", help="blow-down rescaling and sphere identity")
    p.add_argument("action", nargs="?", default="rescale",
                   choices=["rescale", "sphere-identity"])
    p.add_argument("--in", dest="infile", help="input profile CSV")
    p.add_argument("--dim", type=int, default=13)
    p.add_argument("--exponent", type=float, default=3.0)
    p.add_argument("--scales", default="2,4,8,16")
    p.add_argument("--preset", default="cos")
    p.add_argument("--amplitude", type=float, default=0.5)
    p.add_argument("--out", help="also copy blowdown.csv here")
    p.add_argument("--out-dir", default="runs/blowdown")
    p.set_defaults(func=_cmd_blowdown)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--filter", help="run only criteria whose name contains this")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
