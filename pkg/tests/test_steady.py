import math

import numpy as np
import pytest

from nlheat.exponents import DiscriminantNegative, ProblemParams, spectral_constants
from nlheat.fd import radial_laplacian
from nlheat.grids import RadialGrid, RadialProfile
from nlheat.steady import (
    PrecisionLoss,
    WindowTooNarrow,
    default_fit_window,
    fit_asymptotic_coefficient,
    fit_tail_values,
    scale_family,
    singular_profile,
    solve_ground_profile,
)

SQRT10 = math.sqrt(10.0)


class TestGroundProfile:
    def test_center_conditions(self, sol13):
        assert sol13.phi.values[0] == 1.0
        assert sol13.dphi.values[0] == 0.0

    def test_origin_curvature(self, sol13):
        # laplace(u)(0) = dim * u''(0) = -u(0)^p, so u''(0) = -1/dim;
        # equivalently u'(r)/r -> -1/dim.
        r1 = sol13.grid.nodes[1]
        assert sol13.dphi.values[1] / r1 == pytest.approx(-1.0 / 13.0, abs=1e-5)

    def test_positive_decreasing(self, sol13):
        assert np.all(sol13.phi.values > 0)
        assert np.all(np.diff(sol13.phi.values) < 0)
        assert np.all(sol13.dphi.values[1:] < 0)

    def test_tail_approaches_singular_amplitude(self, sol13):
        value = float(sol13.evaluate(50.0)) * 50.0
        assert abs(value - SQRT10) / SQRT10 < 1e-2

    def test_weighted_profile_increases_to_amplitude(self, sol13):
        # r^m Phi climbs toward L from below (the tail coefficient is negative)
        c = sol13.constants
        y = sol13.grid.nodes ** c.m * sol13.phi.values
        assert np.all(np.diff(y) > 0)
        assert np.all(y < c.L)

    def test_discrete_residual(self, sol13):
        lap = radial_laplacian(sol13.grid, 13)
        phi = sol13.phi.values
        residual = lap @ phi + np.abs(phi) ** 2 * phi
        half = sol13.grid.nodes <= sol13.grid.rmax / 2
        assert np.max(np.abs(residual[half])) < 1e-8

    def test_requires_supercritical(self, grid_small):
        with pytest.raises(DiscriminantNegative):
            solve_ground_profile(ProblemParams(13, 2.0), grid_small)

    def test_rejects_nonpositive_alpha(self, params13, grid_small):
        with pytest.raises(ValueError):
            solve_ground_profile(params13, grid_small, alpha=0.0)

    def test_evaluate_is_continuous_across_stages(self, sol13):
        for r in (sol13.r_start, sol13.r_switch, sol13.grid.rmax):
            below = float(sol13.evaluate(r * (1 - 1e-9)))
            above = float(sol13.evaluate(r * (1 + 1e-9)))
            assert abs(above - below) < 1e-8 * below


class TestScaleFamily:
    def test_identity_at_one(self, sol13):
        out = scale_family(sol13, 1.0)
        assert np.max(np.abs(out.values - sol13.phi.values)) < 1e-12

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 2.0, 7.5])
    def test_center_value(self, sol13, alpha):
        assert scale_family(sol13, alpha).values[0] == pytest.approx(alpha, rel=1e-14)

    def test_monotone_in_alpha(self, sol13):
        lo = scale_family(sol13, 1.0)
        hi = scale_family(sol13, 2.0)
        assert np.all(hi.values > lo.values)

    def test_family_below_singular(self, sol13):
        # strict ordering where the gap is representable in doubles; the far
        # tail shares the leading term, so only allow epsilon-level contact
        sing = singular_profile(sol13.params, sol13.grid)
        near = (sol13.grid.nodes > 0) & (sol13.grid.nodes <= 1e3)
        for alpha in (0.5, 1.0, 2.0, 10.0):
            member = scale_family(sol13, alpha)
            assert np.all(member.values[near] < sing.values[near])
            assert np.all(member.values[1:] <= sing.values[1:] * (1 + 1e-12))

    def test_scaling_consistency_with_direct_solve(self, params13, grid_full, sol13):
        # solving with center value alpha must reproduce the scaling map
        for alpha in (0.5, 2.0):
            direct = solve_ground_profile(params13, grid_full, alpha=alpha)
            scaled = scale_family(sol13, alpha)
            rel = np.abs(direct.phi.values - scaled.values) / scaled.values
            assert np.max(rel) < 1e-6

    def test_rejects_nonpositive(self, sol13):
        with pytest.raises(ValueError):
            scale_family(sol13, -1.0)


class TestSingularProfile:
    def test_closed_form_value(self, params13):
        # a grid holding r = 10 exactly; the closed form gives sqrt(10)/10
        grid = RadialGrid(np.linspace(0.0, 16.0, 33), 1.0, 1.0, 16.0)
        sing = singular_profile(params13, grid)
        idx = np.searchsorted(grid.nodes, 10.0)
        assert grid.nodes[idx] == 10.0
        assert sing.values[idx] == pytest.approx(0.31622776601683794, rel=1e-15)

    def test_scaling_exact(self, params13, grid_full):
        c = spectral_constants(params13)
        sing = singular_profile(params13, grid_full)
        r = grid_full.nodes[1:]
        assert np.max(np.abs(sing.values[1:] * r**c.m - c.L)) < 1e-12

    def test_origin_flagged(self, params13, grid_full):
        sing = singular_profile(params13, grid_full)
        assert sing.singular_origin
        assert sing.values[0] == np.inf


class TestTailFit:
    def test_negative_coefficient(self, sol13):
        assert sol13.tail.kind == "power"
        assert sol13.tail.coefficient < 0.0

    def test_window_stability(self, sol13):
        a1 = fit_asymptotic_coefficient(sol13, window=(5.0, 20.0)).coefficient
        a2 = fit_asymptotic_coefficient(sol13, window=(10.0, 40.0)).coefficient
        assert abs(a1 - a2) / abs(a2) < 0.05

    def test_exact_leading_term_fits_zero(self, params13, grid_full):
        c = spectral_constants(params13)
        values = np.empty(len(grid_full))
        values[0] = 1.0
        values[1:] = c.L * grid_full.nodes[1:] ** (-c.m)
        fit = fit_tail_values(values, grid_full, c, window=(10.0, 40.0))
        assert abs(fit.coefficient) < 1e-12

    def test_window_too_narrow(self, sol13):
        with pytest.raises(WindowTooNarrow):
            fit_asymptotic_coefficient(sol13, window=(5.0, 5.02))

    def test_precision_loss(self, params13, grid_full):
        # a correction at 1e-15 of the leading term is below 100 eps
        c = spectral_constants(params13)
        values = np.empty(len(grid_full))
        values[0] = 1.0
        values[1:] = c.L * grid_full.nodes[1:] ** (-c.m) * (1.0 + 1e-15)
        with pytest.raises(PrecisionLoss):
            fit_tail_values(values, grid_full, c, window=(10.0, 40.0))

    def test_log_branch_at_critical(self, params_pc11, grid_full):
        sol = solve_ground_profile(params_pc11, grid_full)
        assert sol.tail.kind == "log"
        assert sol.tail.coefficient < 0.0  # b < 0

    def test_default_window_sane(self, params13, params_pc11):
        for params in (params13, params_pc11):
            lo, hi = default_fit_window(spectral_constants(params), 1e4)
            assert 0.0 < lo < hi <= 1e3


class TestProfileContainer:
    def test_with_values_keeps_grid(self, sol13):
        doubled = sol13.phi.with_values(2.0 * sol13.phi.values, "2 Phi")
        assert doubled.grid is sol13.grid
        assert doubled.label == "2 Phi"

    def test_rejects_mismatched_shape(self, sol13, grid_small):
        with pytest.raises(ValueError):
            RadialProfile(grid_small, sol13.phi.values)
