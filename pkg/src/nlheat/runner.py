"""Experiment orchestration: validated configs, reproducible outputs, manifests.

Every experiment is described by a JSON-serializable config dict, writes its
CSV/JSON outputs into its own directory, and returns a manifest echoing the
full config, the artifact version, wall-clock duration, a pass/fail summary
of the experiment's own checks, and a sha256 per output file.  All numeric
CSV fields use the shortest round-trip decimal representation, so a re-run
from the manifest's embedded config reproduces the outputs byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .blowdown import classify_limit, rescale
from .diagnostics import uniform_interp_constant
from .evolve import (
    EvolutionConfig,
    Monitor,
    evolve_until,
    initial_condition,
    pin_to_profile,
    quasiconvergence_experiment,
)
from .exponents import (
    ProblemParams,
    critical_exponents,
    decay_rate,
    indicial_residual,
    is_unbounded,
    joseph_lundgren_forms,
    lambda_roots,
    singular_amplitude,
    spectral_constants,
)
from .grids import RadialGrid, RadialProfile
from .steady import scale_family, solve_ground_profile

__all__ = [
    "ConfigInvalid",
    "Check",
    "RunManifest",
    "run",
    "run_batch",
    "verify_suite",
    "profile_to_csv",
    "profile_from_csv",
    "write_csv",
]

THREADS_ENV = "NLHEAT_THREADS"


class ConfigInvalid(ValueError):
    """A config field is missing or malformed; carries the field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: str
    threshold: str


@dataclass
class RunManifest:
    experiment: str
    config: dict
    version: str
    duration_s: float
    checks: list[Check]
    outputs: dict[str, str]  # relative path -> sha256
    notes: list[str]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "experiment": self.experiment,
            "config": self.config,
            "version": self.version,
            "duration_s": self.duration_s,
            "checks": [asdict(c) for c in self.checks],
            "outputs": self.outputs,
            "notes": self.notes,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# formatting and file helpers


def fmt(value) -> str:
    """Shortest round-trip representation; stable across runs."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if is_unbounded(value):
        return "inf"
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def profile_to_csv(profile: RadialProfile, path: Path) -> None:
    write_csv(path, ["r", "value"], zip(profile.grid.nodes, profile.values))


def profile_from_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    rows = [line.split(",") for line in path.read_text().strip().splitlines()[1:]]
    r = np.array([float(a) for a, _ in rows])
    v = np.array([float(b) for _, b in rows])
    return r, v


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# config access


def _need(cfg: dict, field: str, kind, path: str = ""):
    full = f"{path}{field}"
    if field not in cfg:
        raise ConfigInvalid(full, "missing")
    value = cfg[field]
    try:
        if kind is int:
            if int(value) != value:
                raise ValueError
            return int(value)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigInvalid(full, f"expected {kind.__name__}, got {value!r}") from None


def _opt(cfg: dict, field: str, kind, default, path: str = ""):
    if field not in cfg or cfg[field] is None:
        return default
    return _need(cfg, field, kind, path)


def _params_from(cfg: dict) -> ProblemParams:
    dim = _need(cfg, "dim", int)
    p = _need(cfg, "exponent", float)
    if dim < 3:
        raise ConfigInvalid("dim", f"must be an integer >= 3, got {dim}")
    if not p > 1.0:
        raise ConfigInvalid("exponent", f"must be > 1, got {p}")
    return ProblemParams(dim, p)


def _grid_from(cfg: dict) -> RadialGrid:
    sub = cfg.get("grid", {}) or {}
    return RadialGrid.make(
        rmax=_opt(sub, "rmax", float, _opt(cfg, "rmax", float, 1e4), "grid."),
        core_nodes=_opt(sub, "core_nodes", int, 201, "grid."),
        tail_nodes=_opt(sub, "tail_nodes", int, 1800, "grid."),
    )


# ---------------------------------------------------------------------------
# experiments


def _run_constants_table(cfg: dict, out_dir: Path):
    table = cfg.get("table")
    if table is not None:
        lo = _need(table, "min", int, "table.") if isinstance(table, dict) else int(table[0])
        hi = _need(table, "max", int, "table.") if isinstance(table, dict) else int(table[1])
        dims = list(range(lo, hi + 1))
    else:
        dims = [_need(cfg, "dim", int)]
    p_given = _opt(cfg, "exponent", float, None)

    rows, checks = [], []
    worst_forms = worst_vieta = worst_indicial = 0.0
    min_lambda1 = np.inf
    for dim in dims:
        exps = critical_exponents(dim)
        if p_given is not None:
            p = p_given
        elif not is_unbounded(exps.pc):
            p = exps.pc + 1.0  # supercritical default when no exponent is given
        else:
            p = exps.pF + 1.0
        m = decay_rate(p)
        try:
            params = ProblemParams(dim, p)
            L = singular_amplitude(params)
        except ValueError:
            L = None
        lam1 = lam2 = None
        if L is not None and not is_unbounded(exps.pc) and p >= exps.pc * (1 - 1e-9):
            lam1, lam2 = lambda_roots(params)
            f1, f2 = joseph_lundgren_forms(dim)
            worst_forms = max(worst_forms, abs(f1 - f2))
            worst_vieta = max(
                worst_vieta,
                abs(lam1 + lam2 - (dim - 2.0 - 2.0 * m)),
                abs(lam1 * lam2 - 2.0 * (dim - 2.0 - m)),
            )
            worst_indicial = max(
                worst_indicial,
                abs(indicial_residual(params, m + lam1)),
                abs(indicial_residual(params, m + lam2)),
            )
            min_lambda1 = min(min_lambda1, lam1)
        rows.append((dim, p, exps.pF, exps.pS, exps.pc, m, L, lam1, lam2))

    out = out_dir / "constants.csv"
    write_csv(out, ["N", "p", "pF", "pS", "pc", "m", "L", "lambda1", "lambda2"], rows)
    checks.append(Check("pc-forms-agree", worst_forms < 1e-10, f"{worst_forms:.3e}", "< 1e-10"))
    checks.append(Check("vieta-identities", worst_vieta < 1e-10, f"{worst_vieta:.3e}", "< 1e-10"))
    checks.append(
        Check("indicial-residual", worst_indicial < 1e-9, f"{worst_indicial:.3e}", "< 1e-9")
    )
    checks.append(
        Check(
            "lambda1-above-2",
            bool(min_lambda1 > 2.0),
            f"min lambda1 = {min_lambda1:.6g}",
            "> 2",
        )
    )
    return [out], checks, []


def _run_steady(cfg: dict, out_dir: Path):
    params = _params_from(cfg)
    grid = _grid_from(cfg)
    alpha = _opt(cfg, "alpha", float, 1.0)
    sol = solve_ground_profile(params, grid, alpha=alpha)
    prof_path = out_dir / "profile.csv"
    profile_to_csv(sol.phi, prof_path)
    fit = sol.tail
    report = {
        "coefficient": fit.coefficient,
        "kind": fit.kind,
        "window": list(fit.window),
        "residual": fit.residual,
        "terms": list(fit.terms),
    }
    fit_path = out_dir / "fit.json"
    fit_path.write_text(json.dumps(report, indent=2, sort_keys=True))
    checks = [
        Check("profile-positive", bool(np.all(sol.phi.values > 0)), "all samples > 0", "> 0"),
        Check(
            "profile-decreasing",
            bool(np.all(np.diff(sol.phi.values) < 0)),
            "strictly decreasing",
            "monotone",
        ),
        Check(
            "tail-coefficient-negative",
            fit.coefficient < 0.0,
            f"{fit.coefficient:.6g}",
            "< 0",
        ),
    ]
    return [prof_path, fit_path], checks, []


def _u0_spec(cfg: dict) -> dict:
    u0 = cfg.get("u0")
    if not isinstance(u0, dict) or "preset" not in u0:
        raise ConfigInvalid("u0", "expected an object with a 'preset' key")
    return u0


def _evolution_config(cfg: dict, params, grid, far_field) -> EvolutionConfig:
    return EvolutionConfig(
        params=params,
        grid=grid,
        far_field=far_field,
        scheme=_opt(cfg, "scheme", str, "implicit_euler"),
        dt=_opt(cfg, "dt", float, 1e-3),
        dt_control=_opt(cfg, "dt_control", float, 1e-6),
        t_max=_opt(cfg, "t_max", float, 1e7),
        convergence_eps=_opt(cfg, "convergence_eps", float, 1e-6),
        keep_states=_opt(cfg, "snapshots", int, 9),
    )


def _write_trajectory(trajectory, out_dir: Path):
    outputs = []
    for i, state in enumerate(trajectory.states):
        path = out_dir / f"profile_{i:04d}.csv"
        write_csv(
            path,
            ["r", "value"],
            zip(state.u.grid.nodes, state.u.values),
        )
        outputs.append(path)
    diag_path = out_dir / "diagnostics.csv"
    rows = []
    for rec in trajectory.diagnostics:
        lam_p = rec.lambda_plus if rec.lambda_plus is not None else ""
        lam_m = rec.lambda_minus if rec.lambda_minus is not None else ""
        sweep = max(rec.lambda_plus or 0.0, rec.lambda_minus or 0.0)
        rows.append(
            (
                rec.t,
                rec.residual,
                rec.gamma_est,
                rec.weighted_sup if rec.weighted_sup is not None else "",
                sweep,
                lam_p,
                lam_m,
                rec.ordering_ok if rec.ordering_ok is not None else "",
            )
        )
    write_csv(
        diag_path,
        [
            "t",
            "residual",
            "gamma_est",
            "weighted_decay",
            "sweep_ratio",
            "sweep_ratio_plus",
            "sweep_ratio_minus",
            "ordering_ok",
        ],
        rows,
    )
    outputs.append(diag_path)
    return outputs


def _monotone_after_transient(values, slack: float = 1e-8, skip_fraction: float = 0.1):
    """Max per-step increase after the initial transient (None entries skipped)."""
    vals = [v for v in values if v is not None]
    start = int(np.ceil(skip_fraction * len(vals)))
    worst = 0.0
    for a, b in zip(vals[start:], vals[start + 1 :]):
        worst = max(worst, b - a)
    return worst, worst <= slack


def _run_quasiconvergence(cfg: dict, out_dir: Path, with_liouville: bool):
    params = _params_from(cfg)
    grid = _grid_from(cfg)
    alpha = _opt(cfg, "alpha", float, 1.0)
    beta = _opt(cfg, "beta", float, 2.0)
    window = tuple(_opt(cfg, "window", list, [20.0, 200.0]))
    sol = solve_ground_profile(params, grid)
    lower = scale_family(sol, alpha, grid)
    config = _evolution_config(cfg, params, grid, pin_to_profile(lower))
    result = quasiconvergence_experiment(
        alpha, beta, _u0_spec(cfg), config, sol=sol, window=window
    )
    outputs = _write_trajectory(result.trajectory, out_dir)
    final = result.trajectory.diagnostics[-1]
    checks = [
        Check("converged", result.trajectory.converged, f"residual {final.residual:.3e}",
              f"< {config.convergence_eps:.1e}"),
        Check(
            "gamma-in-bracket",
            bool(alpha <= result.gamma_est <= beta),
            f"gamma = {result.gamma_est:.6f}",
            f"[{alpha:g}, {beta:g}]",
        ),
        Check("profile-match", result.match_error < 1e-3,
              f"{result.match_error:.3e}", "< 1e-3"),
        Check("ordering-flags", result.ordering_ok, "all steps", "all true"),
    ]
    notes = [
        "far-field decay checked over the computed horizon only; the"
        " uniform-in-time hypothesis is not verifiable on a finite run"
    ]
    if with_liouville:
        worst_w, ok_w = _monotone_after_transient(
            [r.weighted_sup for r in result.trajectory.diagnostics]
        )
        worst_p, ok_p = _monotone_after_transient(
            [r.lambda_plus for r in result.trajectory.diagnostics], skip_fraction=0.0
        )
        worst_m, ok_m = _monotone_after_transient(
            [r.lambda_minus for r in result.trajectory.diagnostics], skip_fraction=0.0
        )
        checks += [
            Check("weighted-decay-monotone", ok_w, f"max step increase {worst_w:.3e}",
                  "<= 1e-8"),
            Check("sweeping-plus-monotone", ok_p, f"max step increase {worst_p:.3e}",
                  "<= 1e-8"),
            Check("sweeping-minus-monotone", ok_m, f"max step increase {worst_m:.3e}",
                  "<= 1e-8"),
        ]
    return outputs, checks, notes


def _run_evolve(cfg: dict, out_dir: Path):
    params = _params_from(cfg)
    grid = _grid_from(cfg)
    sol = solve_ground_profile(params, grid)
    u0 = initial_condition(sol, _u0_spec(cfg), grid)
    config = _evolution_config(cfg, params, grid, pin_to_profile(u0))
    monitor = Monitor(window=tuple(_opt(cfg, "window", list, [20.0, 200.0])))
    trajectory = evolve_until(config, u0, monitor=monitor)
    outputs = _write_trajectory(trajectory, out_dir)
    final = trajectory.diagnostics[-1]
    checks = [
        Check(
            "completed",
            True,
            f"{len(trajectory.diagnostics) - 1} steps to t = {final.t:.6g}",
            "ran",
        ),
        Check("converged", trajectory.converged, f"residual {final.residual:.3e}",
              f"< {config.convergence_eps:.1e}"),
    ]
    return outputs, checks, []


def _run_blowdown(cfg: dict, out_dir: Path):
    params = _params_from(cfg)
    constants = spectral_constants(params)
    scales = [float(s) for s in _opt(cfg, "scales", list, [2.0, 4.0, 8.0, 16.0])]
    annulus = tuple(_opt(cfg, "annulus", list, [32.0, 128.0]))
    input_csv = cfg.get("input_csv")
    if input_csv:
        r, v = profile_from_csv(Path(input_csv))
        grid = RadialGrid(r, core_radius=r[1], stretch=1.0, rmax=float(r[-1]))
        base = RadialProfile(grid, v, "input")
    else:
        grid = _grid_from(cfg)
        base = solve_ground_profile(params, grid).phi
    target = RadialGrid.make(
        rmax=base.grid.rmax / max(scales), core_nodes=101, tail_nodes=700
    )
    rows = []
    errors = []
    mask = (target.nodes >= annulus[0]) & (target.nodes <= annulus[1])
    exact = constants.L * np.where(target.nodes > 0, target.nodes, 1.0) ** (-constants.m)
    for R in scales:
        w = rescale(base, R, constants, target)
        err = float(np.max(np.abs(w.values[mask] - exact[mask])))
        errors.append(err)
        for r_, v_ in zip(target.nodes, w.values):
            rows.append((R, r_, v_))
    out = out_dir / "blowdown.csv"
    write_csv(out, ["scale", "r", "value"], rows)
    rate = 2.0 ** (-constants.lambda1)
    ratio_dev = 0.0
    for e1, e2 in zip(errors, errors[1:]):
        ratio_dev = max(ratio_dev, abs(e2 / e1 / rate - 1.0))
    cls = classify_limit(base, constants)
    checks = [
        Check(
            "annulus-rate",
            ratio_dev <= 0.2,
            f"max ratio deviation {ratio_dev:.3f} from 2^-lambda1",
            "<= 0.2",
        ),
        Check("classify-input", True, f"limit = {cls.value}", "reported"),
    ]
    return [out], checks, []


def _run_interp(cfg: dict, out_dir: Path):
    dim = _need(cfg, "dim", int)
    radii = tuple(float(r) for r in _opt(cfg, "radii", list, [1.0, 2.0, 4.0, 8.0]))
    report = uniform_interp_constant(dim, radii)
    payload = {
        "dim": dim,
        "radii": list(radii),
        "constant": report["constant"],
        "checks": [asdict(c) for c in report["checks"]],
    }
    out = out_dir / "interp.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True))
    linear = [c for c in report["checks"] if c.name == "linear-x1"]
    exact = max(abs(c.fitted_C - 1.0) for c in linear)
    checks = [
        Check("uniform-constant", report["all_hold"],
              f"C({dim}) = {report['constant']:.6g}", "finite, covers all cases"),
        Check("linear-case-exact", exact < 1e-6, f"|C - 1| = {exact:.2e}", "< 1e-6"),
    ]
    return [out], checks, []


EXPERIMENTS = {
    "constants-table": _run_constants_table,
    "steady": _run_steady,
    "quasiconvergence": lambda cfg, out: _run_quasiconvergence(cfg, out, False),
    "liouville-diagnostics": lambda cfg, out: _run_quasiconvergence(cfg, out, True),
    "evolve": _run_evolve,
    "blowdown": _run_blowdown,
    "interp": _run_interp,
}


def run(config: dict, out_dir) -> RunManifest:
    """Execute one named experiment; write outputs and manifest.json."""
    if not isinstance(config, dict):
        raise ConfigInvalid("", "config must be a JSON object")
    kind = config.get("experiment")
    if kind not in EXPERIMENTS:
        raise ConfigInvalid(
            "experiment", f"must be one of {sorted(EXPERIMENTS)}, got {kind!r}"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.monotonic()
    files, checks, notes = EXPERIMENTS[kind](config, out_dir)
    duration = time.monotonic() - start
    manifest = RunManifest(
        experiment=kind,
        config=config,
        version=__version__,
        duration_s=duration,
        checks=checks,
        outputs={f.name: _sha256(f) for f in files},
        notes=notes,
    )
    (out_dir / "manifest.json").write_text(manifest.to_json())
    return manifest


def run_batch(configs: list[dict], out_dir) -> list[RunManifest]:
    """Run independent experiments concurrently, each in its own subdirectory."""
    out_dir = Path(out_dir)
    workers = int(os.environ.get(THREADS_ENV, "1") or "1")
    jobs = [
        (cfg, out_dir / f"exp-{i:02d}-{cfg.get('experiment', 'unknown')}")
        for i, cfg in enumerate(configs)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            manifests = list(pool.map(lambda job: run(*job), jobs))
    else:
        manifests = [run(cfg, sub) for cfg, sub in jobs]
    return manifests


def verify_suite(name_filter: str | None = None, printer=print) -> int:
    """Run the acceptance criteria; print one line each; 0 iff all passed."""
    from .acceptance import run_criteria

    results = run_criteria(name_filter=name_filter, printer=printer)
    return 0 if all(r.passed for r in results) else 1
