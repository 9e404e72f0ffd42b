"""The acceptance suite: every exit criterion as an executable check.

Each criterion measures its quantities at the stated tolerance and reports
one pass/fail line.  The two long quasiconvergence runs are shared between
the convergence criterion and the monotonicity criterion that reads their
step diagnostics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .blowdown import (
    LimitClass,
    classify_limit,
    random_sphere_profiles,
    rescale,
    sphere_identity,
)
from .diagnostics import uniform_interp_constant
from .evolve import (
    EvolutionConfig,
    evolve_until,
    pin_to_profile,
    quasiconvergence_experiment,
)
from .exponents import (
    ProblemParams,
    critical_exponents,
    indicial_residual,
    joseph_lundgren_forms,
    lambda_roots,
    decay_rate,
    spectral_constants,
)
from .grids import RadialGrid, RadialProfile
from .linearize import (
    kernel_by_ode,
    kernel_from_steady,
    kernel_residual,
    kernel_tail_amplitude,
    singular_kernel,
)
from .steady import (
    fit_asymptotic_coefficient,
    scale_family,
    singular_profile,
    solve_ground_profile,
)

__all__ = ["CriterionResult", "CRITERIA", "run_criteria"]


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    measured: str
    threshold: str
    seconds: float


class AcceptanceContext:
    """Lazy shared fixtures: grids, steady solves, the long evolution runs."""

    def __init__(self):
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def grid(self) -> RadialGrid:
        return self._get("grid", lambda: RadialGrid.make())

    def params13(self) -> ProblemParams:
        return ProblemParams(13, 3.0)

    def params_pc11(self) -> ProblemParams:
        return ProblemParams(11, float(critical_exponents(11).pc))

    def steady13(self):
        return self._get(
            "steady13", lambda: solve_ground_profile(self.params13(), self.grid())
        )

    def steady_pc11(self):
        return self._get(
            "steady_pc11", lambda: solve_ground_profile(self.params_pc11(), self.grid())
        )

    def quasi(self, which: str):
        def build():
            sol = self.steady13() if which == "13" else self.steady_pc11()
            grid = self.grid()
            lower = scale_family(sol, 1.0, grid)
            config = EvolutionConfig(
                params=sol.params,
                grid=grid,
                far_field=pin_to_profile(lower),
                dt=1e-3,
                dt_control=1e-6,
                t_max=1e7,
                convergence_eps=1e-6,
            )
            u0 = {"preset": "blend", "alpha": 1.0, "beta": 2.0, "weight": 0.5}
            return quasiconvergence_experiment(1.0, 2.0, u0, config, sol=sol)

        return self._get(f"quasi{which}", build)


def criterion_1_exponents(ctx) -> CriterionResult:
    """Exponent identities over N = 11..100 and five supercritical p each."""
    worst_forms = worst_vieta = worst_indicial = 0.0
    min_lambda1 = math.inf
    for dim in range(11, 101):
        f1, f2 = joseph_lundgren_forms(dim)
        worst_forms = max(worst_forms, abs(f1 - f2))
        pc = float(critical_exponents(dim).pc)
        for offset in (0.0, 0.5, 1.0, 5.0, 10.0):
            params = ProblemParams(dim, pc + offset)
            m = decay_rate(params.p)
            lam1, lam2 = lambda_roots(params)
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
    passed = (
        worst_forms < 1e-10
        and worst_vieta < 1e-10
        and worst_indicial < 1e-9
        and min_lambda1 > 2.0
    )
    measured = (
        f"forms {worst_forms:.2e}, vieta {worst_vieta:.2e}, "
        f"indicial {worst_indicial:.2e}, min lambda1 {min_lambda1:.4f}"
    )
    return _result("1 constants: exponent identities", passed, measured,
                   "1e-10 / 1e-10 / 1e-9 / lambda1 > 2")


def criterion_2_steady(ctx) -> CriterionResult:
    """Ground profile at (13, 3): positivity, tail limit, stable negative fit."""
    sol = ctx.steady13()
    phi = sol.phi.values
    positive = bool(np.all(phi > 0.0))
    decreasing = bool(np.all(np.diff(phi) < 0.0))
    L = sol.constants.L
    tail_dev = abs(float(sol.evaluate(50.0)) * 50.0 - L) / L
    fit_a = fit_asymptotic_coefficient(sol, window=(5.0, 20.0))
    fit_b = fit_asymptotic_coefficient(sol, window=(10.0, 40.0))
    window_dev = abs(fit_a.coefficient - fit_b.coefficient) / abs(fit_b.coefficient)
    passed = (
        positive
        and decreasing
        and tail_dev < 1e-2
        and fit_a.coefficient < 0.0
        and fit_b.coefficient < 0.0
        and window_dev < 0.05
    )
    measured = (
        f"tail dev {tail_dev:.2e}, a[5,20] = {fit_a.coefficient:.1f}, "
        f"a[10,40] = {fit_b.coefficient:.1f}, window dev {window_dev:.3f}"
    )
    return _result("2 steady: profile and tail (13,3)", passed, measured,
                   "positive, decreasing, 1e-2, a < 0, 5%")


def criterion_3_kernel(ctx) -> CriterionResult:
    """Two routes to Z agree; Z tail amplitude matches the fitted a; Z = d(phi)/d(alpha)."""
    sol = ctx.steady13()
    grid = ctx.grid()
    z1 = kernel_from_steady(sol)
    z2 = kernel_by_ode(sol.params, sol)
    mask = grid.nodes <= 5e3
    scale = float(np.max(np.abs(z1.profile.values[mask])))
    cross = float(
        np.max(np.abs(z1.profile.values[mask] - z2.profile.values[mask]))
    ) / scale
    positive = bool(np.all(z1.profile.values > 0.0))

    window = (10.0, 40.0)  # outer edge at the checkpoint radius
    a = fit_asymptotic_coefficient(sol, window=window).coefficient
    amp = kernel_tail_amplitude(z1, window)
    c = sol.constants
    target = c.lambda1 / c.m * abs(a)
    tail_dev = abs(amp - target) / target

    h = 1e-4
    lo = scale_family(sol, 1.0 - h, grid)
    hi = scale_family(sol, 1.0 + h, grid)
    fd = (hi.values - lo.values) / (2.0 * h)
    fd_dev = float(np.max(np.abs(fd[mask] - z1.profile.values[mask])))

    passed = cross < 1e-3 and positive and tail_dev < 0.05 and fd_dev < 1e-6
    measured = (
        f"route diff {cross:.2e}, tail amplitude dev {tail_dev:.3f}, "
        f"family-derivative dev {fd_dev:.2e}"
    )
    return _result("3 linearize: kernel cross-validation (13,3)", passed, measured,
                   "1e-3 / 5% / 1e-6")


def criterion_4_singular_kernel(ctx) -> CriterionResult:
    """Fourth-order residual of the closed-form kernel on the annulus [1, 100]."""
    grid = ctx.grid()
    pairs = [
        ProblemParams(13, 3.0),
        ProblemParams(15, 4.0),
        ctx.params_pc11(),
    ]
    worst = 0.0
    for params in pairs:
        c = spectral_constants(params)
        element = singular_kernel(params, grid, "first")
        background = singular_profile(params, grid)
        res = kernel_residual(element, background)
        r = grid.nodes
        mask = (r >= 1.0) & (r <= 100.0)
        scale = (
            params.p * c.L ** (params.p - 1.0) * r[mask] ** (-2.0)
            * element.profile.values[mask]
        )
        worst = max(worst, float(np.max(np.abs(res[mask] / scale))))
    return _result(
        "4 linearize: singular kernel residual",
        worst < 1e-4,
        f"max relative residual {worst:.2e} over 3 pairs (incl. p = p_c)",
        "< 1e-4",
    )


def criterion_5_fixed_points(ctx) -> CriterionResult:
    """Family members are numerical fixed points; time error halves with dt."""
    sol = ctx.steady13()
    grid = ctx.grid()
    worst_dev = 0.0
    for alpha in (0.5, 1.0, 2.0):
        target = scale_family(sol, alpha, grid)
        config = EvolutionConfig(
            params=sol.params,
            grid=grid,
            far_field=pin_to_profile(target),
            dt=1e-3,
            dt_control=1e-6,
            t_max=10.0,
            convergence_eps=0.0,  # run the full horizon
        )
        trajectory = evolve_until(config, target)
        for state in trajectory.states:
            worst_dev = max(
                worst_dev, float(np.max(np.abs(state.u.values - target.values)))
            )

    # dt-refinement on a transient run: the difference between runs at dt and
    # dt/2 isolates the time error, which the implicit Euler order makes halve.
    blend = RadialProfile(
        grid,
        0.5 * scale_family(sol, 1.0, grid).values
        + 0.5 * scale_family(sol, 2.0, grid).values,
        "blend",
    )
    finals = []
    for dt in (0.2, 0.1, 0.05):
        config = EvolutionConfig(
            params=sol.params,
            grid=grid,
            far_field=pin_to_profile(blend),
            dt=dt,
            t_max=2.0,
            convergence_eps=0.0,
            adaptive=False,
        )
        finals.append(evolve_until(config, blend).final.u.values)
    d1 = float(np.max(np.abs(finals[0] - finals[1])))
    d2 = float(np.max(np.abs(finals[1] - finals[2])))
    ratio = d2 / d1
    passed = worst_dev < 1e-4 and abs(ratio - 0.5) <= 0.15
    measured = f"max fixed-point deviation {worst_dev:.2e}, halving ratio {ratio:.3f}"
    return _result("5 evolve: fixed points and dt refinement", passed, measured,
                   "< 1e-4; ratio 0.5 within 30%")


def criterion_6_quasiconvergence(ctx) -> CriterionResult:
    """Bracketed blends converge to a family member, at p > p_c and p = p_c."""
    parts = []
    passed = True
    for which, label in (("13", "(13,3)"), ("pc", "(11,p_c)")):
        result = ctx.quasi(which)
        final = result.trajectory.diagnostics[-1]
        ok = (
            result.trajectory.converged
            and final.residual < 1e-6
            and 1.0 <= result.gamma_est <= 2.0
            and result.match_error < 1e-3
            and result.ordering_ok
        )
        passed = passed and ok
        parts.append(
            f"{label}: gamma {result.gamma_est:.4f}, residual {final.residual:.1e}, "
            f"match {result.match_error:.1e}, ordering {result.ordering_ok}"
        )
    return _result("6 evolve: quasiconvergence", passed, "; ".join(parts),
                   "residual < 1e-6, gamma in [1,2], match < 1e-3, ordered")


def criterion_7_liouville(ctx) -> CriterionResult:
    """Weighted decay and sweeping ratios shrink monotonically along the runs."""
    slack = 1e-8
    worst = 0.0
    for which in ("13", "pc"):
        records = ctx.quasi(which).trajectory.diagnostics
        start = int(np.ceil(0.1 * len(records)))
        weighted = [r.weighted_sup for r in records]
        for a, b in zip(weighted[start:], weighted[start + 1 :]):
            worst = max(worst, b - a)
        # the sweeping ratios carry no transient allowance
        for attr in ("lambda_plus", "lambda_minus"):
            vals = [getattr(r, attr) for r in records]
            for a, b in zip(vals, vals[1:]):
                worst = max(worst, b - a)
    return _result(
        "7 diagnostics: Liouville monotonicity",
        worst <= slack,
        f"max per-step increase {worst:.2e}",
        "<= 1e-8 after the first 10% of steps",
    )


def criterion_8_interpolation(ctx) -> CriterionResult:
    """One constant covers the manufactured family; the linear case is exact."""
    report = uniform_interp_constant(13, radii=(1.0, 2.0, 4.0, 8.0))
    linear = [c for c in report["checks"] if c.name == "linear-x1"]
    exact_dev = max(abs(c.fitted_C - 1.0) for c in linear)
    passed = report["all_hold"] and exact_dev < 1e-6 and math.isfinite(report["constant"])
    measured = f"C(13) = {report['constant']:.4f}, linear-case |C-1| = {exact_dev:.1e}"
    return _result("8 diagnostics: interpolation inequality", passed, measured,
                   "uniform C exists; |C-1| < 1e-6 for psi = x1")


def criterion_9_blowdown(ctx) -> CriterionResult:
    """Blow-down error contracts at the kernel rate; limits classify correctly."""
    sol = ctx.steady13()
    c = sol.constants
    grid = ctx.grid()
    scales = (2.0, 4.0, 8.0, 16.0)
    target = RadialGrid.make(rmax=grid.rmax / max(scales), core_nodes=101,
                             tail_nodes=700)
    annulus = (target.nodes >= 32.0) & (target.nodes <= 128.0)
    exact = c.L * target.nodes[annulus] ** (-c.m)
    errors = []
    for R in scales:
        w = rescale(sol.phi, R, c, target)
        errors.append(float(np.max(np.abs(w.values[annulus] - exact))))
    rate = 2.0 ** (-c.lambda1)
    ratio_dev = max(abs(e2 / e1 / rate - 1.0) for e1, e2 in zip(errors, errors[1:]))
    decreasing = all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))

    classified = []
    for alpha in (0.5, 1.0, 2.0):
        classified.append(classify_limit(scale_family(sol, alpha, grid), c))
    neg = classify_limit(sol.phi.with_values(-sol.phi.values, "-Phi"), c)
    zero = classify_limit(RadialProfile(grid, np.zeros(len(grid)), "0"), c)
    class_ok = (
        all(cl is LimitClass.PLUS_L for cl in classified)
        and neg is LimitClass.MINUS_L
        and zero is LimitClass.ZERO
    )
    passed = decreasing and ratio_dev <= 0.2 and class_ok
    measured = (
        f"ratio deviation {ratio_dev:.3f} from 2^-lambda1, "
        f"classifications {'ok' if class_ok else 'WRONG'}"
    )
    return _result("9 blowdown: contraction rate and limits", passed, measured,
                   "within 20%; plus_L / minus_L / zero")


def criterion_10_sphere(ctx) -> CriterionResult:
    """Sphere identity vanishes on the constants, positive on everything else."""
    params = ctx.params13()
    c = spectral_constants(params)
    theta = np.linspace(0.0, np.pi, 181)
    from .blowdown import SphereProfile

    worst_const = 0.0
    for value in (c.L, 0.0, -c.L):
        prof = SphereProfile(theta, np.full_like(theta, value), params)
        worst_const = max(worst_const, abs(sphere_identity(prof)))
    values = [sphere_identity(f) for f in random_sphere_profiles(params, count=100)]
    min_random = min(values)
    passed = worst_const < 1e-10 and min_random > 0.0
    measured = f"|constants| <= {worst_const:.1e}, min random value {min_random:.3e}"
    return _result("10 blowdown: sphere identity", passed, measured,
                   "< 1e-10 on constants; > 0 on 100 random profiles")


def _result(name, passed, measured, threshold) -> CriterionResult:
    # seconds filled in by run_criteria
    return CriterionResult(name, bool(passed), measured, threshold, 0.0)


CRITERIA = [
    ("1 constants: exponent identities", criterion_1_exponents),
    ("2 steady: profile and tail (13,3)", criterion_2_steady),
    ("3 linearize: kernel cross-validation (13,3)", criterion_3_kernel),
    ("4 linearize: singular kernel residual", criterion_4_singular_kernel),
    ("5 evolve: fixed points and dt refinement", criterion_5_fixed_points),
    ("6 evolve: quasiconvergence", criterion_6_quasiconvergence),
    ("7 diagnostics: Liouville monotonicity", criterion_7_liouville),
    ("8 diagnostics: interpolation inequality", criterion_8_interpolation),
    ("9 blowdown: contraction rate and limits", criterion_9_blowdown),
    ("10 blowdown: sphere identity", criterion_10_sphere),
]

# wall-clock budgets in seconds; criterion 6 covers its two long runs and
# criterion 7 reuses them, so it carries no budget of its own
RUNTIME_BUDGETS = {
    "1 constants: exponent identities": 1.0,
    "2 steady: profile and tail (13,3)": 10.0,
    "3 linearize: kernel cross-validation (13,3)": 10.0,
    "4 linearize: singular kernel residual": 5.0,
    "5 evolve: fixed points and dt refinement": 60.0,
    "6 evolve: quasiconvergence": 600.0,
    "8 diagnostics: interpolation inequality": 30.0,
    "9 blowdown: contraction rate and limits": 10.0,
    "10 blowdown: sphere identity": 5.0,
}


def run_criteria(name_filter: str | None = None, printer=print) -> list[CriterionResult]:
    """Run (a filtered subset of) the criteria, printing one line per result."""
    ctx = AcceptanceContext()
    results = []
    for name, fn in CRITERIA:
        if name_filter and name_filter.lower() not in name.lower():
            continue
        start = time.perf_counter()
        try:
            res = fn(ctx)
        except Exception as exc:  # a crashed criterion is a failed criterion
            res = CriterionResult(name, False, f"raised {type(exc).__name__}: {exc}",
                                  "no exception", 0.0)
        elapsed = time.perf_counter() - start
        res = CriterionResult(res.name, res.passed, res.measured, res.threshold, elapsed)
        results.append(res)
        if printer is not None:
            status = "PASS" if res.passed else "FAIL"
            printer(
                f"[{status}] {res.name}: {res.measured} "
                f"(threshold: {res.threshold}) [{res.seconds:.1f}s]"
            )
    return results
