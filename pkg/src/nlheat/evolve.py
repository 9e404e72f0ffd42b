"""Implicit time stepping for the radial semilinear heat equation.

The semidiscrete system pairs the fourth-order radial Laplacian with the
exact signed nonlinearity |u|^(p-1) u, a symmetry (Neumann) condition at the
origin and a Dirichlet pin at rmax.  Implicit Euler with Newton inner
solves and step doubling is the workhorse: it is unconditionally stable, so
long quasiconvergence horizons cost only tens of steps, and for large dt a
step degenerates into a Newton iteration for the discrete equilibrium,
which is exactly where the flow is headed.  A trapezoidal scheme is
available for accuracy studies.

The time derivative field carried on each state is the elliptic residual
laplace(u) + |u|^(p-1) u through the same discrete operator, with the
pinned node set to zero (its value is constant in time by construction).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from . import diagnostics as _diag
from .exponents import ProblemParams, spectral_constants
from .fd import banded_form, radial_laplacian
from .grids import RadialGrid, RadialProfile
from .linearize import KernelElement
from .steady import SteadyStateSolution, scale_family

__all__ = [
    "NewtonDiverged",
    "BlowupDetected",
    "NotConverged",
    "FarField",
    "pin_to_profile",
    "pin_to_asymptotic",
    "EvolutionConfig",
    "EvolutionState",
    "StepDiagnostics",
    "Trajectory",
    "Monitor",
    "step",
    "linear_step",
    "evolve_until",
    "comparison_check",
    "QuasiconvergenceResult",
    "quasiconvergence_experiment",
    "initial_condition",
]

SCHEMES = ("implicit_euler", "crank_nicolson")


class NewtonDiverged(RuntimeError):
    """The nonlinear solve failed after the maximum number of dt halvings."""


class BlowupDetected(RuntimeError):
    """max|u| exceeded the blow-up guard multiple of the singular ceiling."""


class NotConverged(RuntimeError):
    """The steady-residual criterion was not met by the time horizon."""


@dataclass(frozen=True, eq=False)
class FarField:
    """Dirichlet value at rmax: pinned to a profile or to the two-term tail."""

    kind: str
    profile: RadialProfile | None = None
    coefficients: tuple[float, float, float, float] | None = None

    def resolve(self, grid: RadialGrid) -> float:
        if self.kind == "profile":
            prof = self.profile
            if prof.grid is grid:
                return float(prof.values[-1])
            return float(np.interp(grid.rmax, prof.grid.nodes, prof.values))
        L, m, a, lam1 = self.coefficients
        R = grid.rmax
        return float(L * R ** (-m) + a * R ** (-(m + lam1)))


def pin_to_profile(profile: RadialProfile) -> FarField:
    return FarField(kind="profile", profile=profile)


def pin_to_asymptotic(L: float, m: float, a: float, lambda1: float) -> FarField:
    return FarField(kind="asymptotic", coefficients=(L, m, a, lambda1))


@dataclass(eq=False)
class EvolutionConfig:
    """Discretization, far-field and control settings for a radial flow."""

    params: ProblemParams
    grid: RadialGrid
    far_field: FarField
    scheme: str = "implicit_euler"
    dt: float = 1e-3
    dt_control: float = 1e-6
    t_max: float = 1e7
    convergence_eps: float = 1e-6
    newton_tol: float = 1e-10
    max_newton: int = 25
    max_retries: int = 10
    dt_max: float = 1e6
    blowup_factor: float = 10.0
    keep_states: int = 200
    adaptive: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.dt <= 0.0 or self.t_max <= 0.0:
            raise ValueError("dt and t_max must be positive")


@dataclass(frozen=True, eq=False)
class EvolutionState:
    t: float
    u: RadialProfile
    u_t: RadialProfile


@dataclass(frozen=True)
class StepDiagnostics:
    t: float
    dt: float
    newton_iters: int
    residual: float
    gamma_est: float
    weighted_sup: float | None = None
    lambda_plus: float | None = None
    lambda_minus: float | None = None
    ordering_ok: bool | None = None


@dataclass(eq=False)
class Trajectory:
    states: list[EvolutionState]
    diagnostics: list[StepDiagnostics]
    converged: bool
    config: EvolutionConfig

    @property
    def final(self) -> EvolutionState:
        return self.states[-1]


@dataclass(eq=False)
class Monitor:
    """Optional per-step diagnostics evaluated during a run."""

    window: tuple[float, float] = (20.0, 200.0)
    kernel: KernelElement | None = None
    lower: RadialProfile | None = None
    upper: RadialProfile | None = None
    log_weight: bool = False
    ordering_tol: float | None = None


class _Stepper:
    """Banded Newton machinery shared by the public stepping entry points."""

    def __init__(self, config: EvolutionConfig):
        self.cfg = config
        self.params = config.params
        self.constants = spectral_constants(config.params)
        grid = config.grid
        self.n = len(grid)
        lap = radial_laplacian(grid, config.params.dim)
        self.lap_int = lap[: self.n - 1, : self.n - 1].tocsr()
        self.bc_col = np.asarray(lap[: self.n - 1, self.n - 1].todense()).ravel()
        self.pin = config.far_field.resolve(grid)
        self.lo, self.hi, self.ab_L = banded_form(self.lap_int)
        self.theta = 1.0 if config.scheme == "implicit_euler" else 0.5
        c = self.constants
        self.ceiling = config.blowup_factor * c.L * grid.nodes[1] ** (-c.m)

    def rhs(self, w: np.ndarray) -> np.ndarray:
        p = self.params.p
        return self.lap_int @ w + self.bc_col * self.pin + np.abs(w) ** (p - 1.0) * w

    def field(self, u_full: np.ndarray) -> np.ndarray:
        """u_t over all nodes; zero at the pinned node."""
        out = np.empty_like(u_full)
        out[:-1] = self.rhs(u_full[:-1])
        out[-1] = 0.0
        return out

    def _newton(self, u_int: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray, int]:
        p = self.params.p
        theta = self.theta
        f_old = self.rhs(u_int)
        explicit = u_int + (1.0 - theta) * dt * f_old
        # Predict explicitly only while that is a small move; at relaxation
        # step sizes the current state is the robust Newton start.
        move = dt * float(np.max(np.abs(f_old)))
        w = u_int + dt * f_old if move < 0.01 else u_int.copy()
        for it in range(self.cfg.max_newton):
            f_new = self.rhs(w)
            G = w - explicit - theta * dt * f_new
            worst = float(np.max(np.abs(G)))
            if not np.isfinite(worst):
                break
            if worst < self.cfg.newton_tol:
                return w, f_new, it
            ab = -theta * dt * self.ab_L
            ab[self.hi, :] += 1.0 - theta * dt * p * np.abs(w) ** (p - 1.0)
            w = w + solve_banded((self.lo, self.hi), ab, -G)
        raise _NewtonFail

    def advance(self, u_full: np.ndarray, dt: float) -> tuple[np.ndarray, float, float, int]:
        """One accepted step; returns (u_new, dt_used, dt_next, newton_iters).

        Step control follows the convergence-mode policy: dt doubles after
        every successful Newton solve (unconditional stability makes large
        relaxation steps safe and each one is close to a Newton step for the
        discrete equilibrium) and halves with a retry when the solve fails.
        Fixed-step accuracy studies set adaptive=False.
        """
        cfg = self.cfg
        if float(np.max(np.abs(u_full))) > self.ceiling:
            raise BlowupDetected(
                f"max|u| exceeded {cfg.blowup_factor} x the singular ceiling"
            )
        u_int = u_full[:-1]
        for _ in range(cfg.max_retries + 1):
            try:
                w, _, iters = self._newton(u_int, dt)
            except _NewtonFail:
                dt *= 0.5
                continue
            dt_next = min(2.0 * dt, cfg.dt_max) if cfg.adaptive else dt
            u_new = np.concatenate([w, [self.pin]])
            if float(np.max(np.abs(u_new))) > self.ceiling:
                raise BlowupDetected(
                    f"max|u| exceeded {cfg.blowup_factor} x the singular ceiling"
                )
            return u_new, dt, dt_next, iters
        raise NewtonDiverged(
            f"Newton failed down to dt = {dt:.3e} after {cfg.max_retries} halvings"
        )


class _NewtonFail(Exception):
    pass


def _make_state(stepper: _Stepper, t: float, u_full: np.ndarray) -> EvolutionState:
    grid = stepper.cfg.grid
    return EvolutionState(
        t=t,
        u=RadialProfile(grid, u_full, "u"),
        u_t=RadialProfile(grid, stepper.field(u_full), "u_t"),
    )


def step(state: EvolutionState, config: EvolutionConfig) -> EvolutionState:
    """Advance one implicit step of size config.dt (with halving retries)."""
    stepper = _Stepper(config)
    u = state.u.values.copy()
    u[-1] = stepper.pin
    u_new, dt_used, _, _ = stepper.advance(u, config.dt)
    return _make_state(stepper, state.t + dt_used, u_new)


def linear_step(
    w: np.ndarray, dt: float, sol: SteadyStateSolution, config: EvolutionConfig
) -> np.ndarray:
    """Reference implicit Euler step of the flow linearized at a steady state.

    Advances w_t = laplace(w) + p Phi^(p-1) w with w pinned to 0 at rmax;
    used by the linear-regime consistency tests.
    """
    params = config.params
    n = len(config.grid)
    lap = radial_laplacian(config.grid, params.dim)
    lap_int = lap[: n - 1, : n - 1].tocsr()
    lo, hi, ab_L = banded_form(lap_int)
    pot = params.p * np.abs(sol.phi.values[: n - 1]) ** (params.p - 1.0)
    ab = -dt * ab_L
    ab[hi, :] += 1.0 - dt * pot
    w_new = np.empty_like(w)
    w_new[: n - 1] = solve_banded((lo, hi), ab, w[: n - 1])
    w_new[-1] = 0.0
    return w_new


def _monitor_extras(monitor, stepper, state, tol):
    weighted = lam_p = lam_m = None
    ordering = None
    if monitor is None:
        return weighted, lam_p, lam_m, ordering
    weighted = _diag.weighted_decay(
        state, stepper.constants, monitor.window, log_weight=monitor.log_weight
    ).weighted_sup
    if monitor.kernel is not None:
        record = _diag.sweeping_ratio(state, monitor.kernel)
        lam_p, lam_m = record.lambda_plus, record.lambda_minus
    if monitor.lower is not None and monitor.upper is not None:
        otol = monitor.ordering_tol if monitor.ordering_tol is not None else tol
        u = state.u.values
        ordering = bool(
            np.all(u >= monitor.lower.values - otol)
            and np.all(u <= monitor.upper.values + otol)
        )
    return weighted, lam_p, lam_m, ordering


def evolve_until(
    config: EvolutionConfig,
    u0: RadialProfile,
    monitor: Monitor | None = None,
) -> Trajectory:
    """Run the flow until t_max or until the steady residual drops below eps.

    The initial value's node at rmax is replaced by the configured far-field
    pin.  Diagnostics are recorded at every step; the state list is thinned
    to at most config.keep_states entries (first and last always kept).
    The returned trajectory carries ``converged`` so callers can distinguish
    residual convergence from horizon exhaustion.
    """
    stepper = _Stepper(config)
    if u0.grid is not config.grid:
        raise ValueError("u0 must live on the configured grid")
    tol = 10.0 * config.dt_control
    u = u0.values.copy()
    u[-1] = stepper.pin
    t = 0.0
    state = _make_state(stepper, t, u)
    residual = float(np.max(np.abs(state.u_t.values[:-1])))
    weighted, lam_p, lam_m, ordering = _monitor_extras(monitor, stepper, state, tol)
    records = [
        StepDiagnostics(t, 0.0, 0, residual, float(u[0]), weighted, lam_p, lam_m, ordering)
    ]
    all_states = [state]
    converged = residual < config.convergence_eps
    dt = config.dt
    while not converged and t < config.t_max:
        dt = min(dt, config.t_max - t)
        u, dt_used, dt, iters = stepper.advance(u, dt)
        t += dt_used
        state = _make_state(stepper, t, u)
        residual = float(np.max(np.abs(state.u_t.values[:-1])))
        weighted, lam_p, lam_m, ordering = _monitor_extras(monitor, stepper, state, tol)
        records.append(
            StepDiagnostics(
                t, dt_used, iters, residual, float(u[0]), weighted, lam_p, lam_m, ordering
            )
        )
        all_states.append(state)
        converged = residual < config.convergence_eps

    if len(all_states) > config.keep_states:
        idx = np.unique(
            np.round(np.linspace(0, len(all_states) - 1, config.keep_states)).astype(int)
        )
        all_states = [all_states[i] for i in idx]
    return Trajectory(states=all_states, diagnostics=records, converged=converged,
                      config=config)


def comparison_check(
    trajectory: Trajectory,
    lower: RadialProfile,
    upper: RadialProfile,
    tol: float | None = None,
) -> list[bool]:
    """Ordering flags lower - tol <= u <= upper + tol for each retained state.

    Reports violations without aborting; the default tolerance is 10x the
    scheme's step-error control, the slack at which the discrete comparison
    principle is meaningful.
    """
    if tol is None:
        tol = 10.0 * trajectory.config.dt_control
    flags = []
    for state in trajectory.states:
        u = state.u.values
        flags.append(
            bool(
                np.all(u >= lower.values - tol) and np.all(u <= upper.values + tol)
            )
        )
    return flags


def _bump(grid: RadialGrid, center: float, width: float, height: float) -> np.ndarray:
    r = grid.nodes
    return height * np.exp(-(((r - center) / width) ** 2))


def initial_condition(sol: SteadyStateSolution, spec, grid: RadialGrid) -> RadialProfile:
    """Build an initial profile from a named preset or pass one through.

    Presets (dicts with a "preset" key):
      steady(alpha)                      the family member phi_alpha
      blend(alpha, beta, weight)         weight*phi_alpha + (1-weight)*phi_beta
      bump(alpha, center, width, height) phi_alpha plus a Gaussian bump
      capped_bump(alpha, beta, center, width, height)
                                         min(phi_beta, phi_alpha + bump)
    """
    if isinstance(spec, RadialProfile):
        return spec
    if not isinstance(spec, dict) or "preset" not in spec:
        raise ValueError(f"unrecognized initial condition spec: {spec!r}")
    kind = spec["preset"]
    if kind == "steady":
        return scale_family(sol, float(spec["alpha"]), grid)
    if kind == "blend":
        w = float(spec["weight"])
        lo = scale_family(sol, float(spec["alpha"]), grid)
        hi = scale_family(sol, float(spec["beta"]), grid)
        return RadialProfile(grid, w * lo.values + (1.0 - w) * hi.values, "blend")
    if kind == "bump":
        base = scale_family(sol, float(spec["alpha"]), grid)
        vals = base.values + _bump(grid, float(spec["center"]), float(spec["width"]),
                                   float(spec["height"]))
        return RadialProfile(grid, vals, "bump")
    if kind == "capped_bump":
        base = scale_family(sol, float(spec["alpha"]), grid)
        cap = scale_family(sol, float(spec["beta"]), grid)
        vals = np.minimum(
            cap.values,
            base.values + _bump(grid, float(spec["center"]), float(spec["width"]),
                                float(spec["height"])),
        )
        return RadialProfile(grid, vals, "capped_bump")
    raise ValueError(f"unknown initial condition preset {kind!r}")


@dataclass(eq=False)
class QuasiconvergenceResult:
    gamma_est: float
    match_error: float
    trajectory: Trajectory
    ordering_ok: bool


def quasiconvergence_experiment(
    alpha: float,
    beta: float,
    u0_spec,
    config: EvolutionConfig,
    sol: SteadyStateSolution | None = None,
    window: tuple[float, float] = (20.0, 200.0),
) -> QuasiconvergenceResult:
    """Evolve data bracketed by phi_alpha and phi_beta and identify the limit.

    The limit's family parameter is read off as gamma = u(0, T), since
    phi_gamma(0) = gamma exactly, and the whole converged profile is
    compared against phi_gamma on [0, rmax/2].  gamma must land in
    [alpha, beta]; the run carries ordering flags and the sweeping / decay
    diagnostics at every step.

    Raises NotConverged if the steady-residual criterion is not met by
    t_max.
    """
    from .linearize import kernel_from_steady
    from .steady import solve_ground_profile

    if not (0.0 < alpha < beta < np.inf):
        raise ValueError(f"need 0 < alpha < beta finite, got ({alpha}, {beta})")
    if sol is None:
        sol = solve_ground_profile(config.params, config.grid)
    lower = scale_family(sol, alpha, config.grid)
    upper = scale_family(sol, beta, config.grid)
    u0 = initial_condition(sol, u0_spec, config.grid)
    if np.any(u0.values < lower.values - 1e-12) or np.any(u0.values > upper.values + 1e-12):
        raise ValueError("u0 is not between the bracketing profiles")
    monitor = Monitor(
        window=window,
        kernel=kernel_from_steady(sol),
        lower=lower,
        upper=upper,
    )
    trajectory = evolve_until(config, u0, monitor=monitor)
    if not trajectory.converged:
        raise NotConverged(
            f"steady residual {trajectory.diagnostics[-1].residual:.3e} above "
            f"{config.convergence_eps:.1e} at t_max = {config.t_max:g}"
        )
    final = trajectory.final
    gamma = float(final.u.values[0])
    slack = 1e-9 * beta
    if not (alpha - slack <= gamma <= beta + slack):
        raise RuntimeError(f"gamma estimate {gamma!r} escaped [{alpha}, {beta}]")
    target = scale_family(sol, gamma, config.grid)
    mask = config.grid.nodes <= config.grid.rmax / 2.0
    match_error = float(
        np.max(np.abs(final.u.values[mask] - target.values[mask]) / target.values[mask])
    )
    ordering_ok = all(
        rec.ordering_ok for rec in trajectory.diagnostics if rec.ordering_ok is not None
    )
    return QuasiconvergenceResult(
        gamma_est=gamma,
        match_error=match_error,
        trajectory=trajectory,
        ordering_ok=ordering_ok,
    )
