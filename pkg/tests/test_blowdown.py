import numpy as np
import pytest

from nlheat.blowdown import (
    DomainExceeded,
    LimitClass,
    SphereProfile,
    classify_limit,
    cosine_sphere_profile,
    random_sphere_profiles,
    rescale,
    sphere_identity,
)
from nlheat.exponents import spectral_constants
from nlheat.grids import RadialGrid, RadialProfile
from nlheat.linearize import BoundViolated
from nlheat.steady import scale_family, singular_profile


@pytest.fixture(scope="module")
def c13(params13):
    return spectral_constants(params13)


@pytest.fixture(scope="module")
def target_grid(grid_full):
    return RadialGrid.make(rmax=grid_full.rmax / 16.0, core_nodes=101, tail_nodes=700)


class TestRescale:
    def test_identity(self, sol13, c13):
        out = rescale(sol13.phi, 1.0, c13)
        assert np.max(np.abs(out.values - sol13.phi.values)) < 1e-12

    def test_group_law(self, sol13, c13, target_grid):
        inner = RadialGrid.make(
            rmax=target_grid.rmax / 2.0, core_nodes=101, tail_nodes=500
        )
        once = rescale(rescale(sol13.phi, 2.0, c13, target_grid), 2.0, c13, inner)
        direct = rescale(sol13.phi, 4.0, c13, inner)
        assert np.max(np.abs(once.values - direct.values)) < 1e-6

    def test_domain_guard(self, sol13, c13):
        with pytest.raises(DomainExceeded):
            rescale(sol13.phi, 2.0, c13)  # would need samples beyond rmax

    def test_contraction_rate(self, sol13, c13, target_grid):
        # the annulus error against the singular tail contracts by
        # 2^-lambda1 per doubling once the samples sit in the far field
        annulus = (target_grid.nodes >= 32.0) & (target_grid.nodes <= 128.0)
        exact = c13.L * target_grid.nodes[annulus] ** (-c13.m)
        errors = []
        for R in (2.0, 4.0, 8.0, 16.0):
            w = rescale(sol13.phi, R, c13, target_grid)
            errors.append(float(np.max(np.abs(w.values[annulus] - exact))))
        assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
        rate = 2.0 ** (-c13.lambda1)
        for e1, e2 in zip(errors, errors[1:]):
            assert abs(e2 / e1 / rate - 1.0) <= 0.2

    def test_error_decreases_on_unit_annulus(self, sol13, c13):
        # nearer in, the subleading tail spoils the clean rate but the decay
        # with R remains
        target = RadialGrid.make(rmax=4.0, core_nodes=201, tail_nodes=200)
        annulus = target.nodes >= 0.5
        exact = c13.L * target.nodes[annulus] ** (-c13.m)
        errors = []
        for R in (2.0, 4.0, 8.0, 16.0):
            w = rescale(sol13.phi, R, c13, target)
            errors.append(float(np.max(np.abs(w.values[annulus] - exact))))
        assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))


class TestClassifyLimit:
    def test_family_members(self, sol13, c13, grid_full):
        for alpha in (0.5, 1.0, 2.0):
            member = scale_family(sol13, alpha, grid_full)
            assert classify_limit(member, c13) is LimitClass.PLUS_L

    def test_negated_profile(self, sol13, c13):
        neg = sol13.phi.with_values(-sol13.phi.values, "-Phi")
        assert classify_limit(neg, c13) is LimitClass.MINUS_L

    def test_zero(self, c13, grid_full):
        zero = RadialProfile(grid_full, np.zeros(len(grid_full)), "0")
        assert classify_limit(zero, c13) is LimitClass.ZERO

    def test_undetermined(self, params13, c13, grid_full):
        half = singular_profile(params13, grid_full)
        prof = RadialProfile(
            grid_full,
            np.where(grid_full.nodes > 0, 0.5 * half.values, 0.0),
            "half-singular",
            singular_origin=True,
        )
        assert classify_limit(prof, c13) is LimitClass.UNDETERMINED

    def test_invariant_under_rescale(self, sol13, c13, target_grid):
        for R in (2.0, 8.0):
            w = rescale(sol13.phi, R, c13, target_grid)
            assert classify_limit(w, c13) is LimitClass.PLUS_L

    def test_requires_long_domain(self, params13, c13):
        grid = RadialGrid.make(rmax=50.0, core_nodes=51, tail_nodes=100)
        prof = RadialProfile(grid, np.ones(len(grid)))
        with pytest.raises(ValueError):
            classify_limit(prof, c13)


class TestSphereIdentity:
    def test_constants_vanish(self, params13, c13):
        theta = np.linspace(0.0, np.pi, 181)
        for value in (c13.L, 0.0, -c13.L):
            prof = SphereProfile(theta, np.full_like(theta, value), params13)
            assert abs(sphere_identity(prof)) < 1e-10

    def test_cosine_strictly_positive(self, params13):
        prof = cosine_sphere_profile(params13, 0.5)
        assert sphere_identity(prof) > 0.01

    def test_sign_symmetric(self, params13):
        prof = cosine_sphere_profile(params13, 0.5)
        flipped = SphereProfile(prof.theta, -prof.values, params13)
        assert sphere_identity(flipped) == pytest.approx(
            sphere_identity(prof), rel=1e-12
        )

    def test_random_admissible_positive(self, params13):
        for prof in random_sphere_profiles(params13, count=20):
            assert sphere_identity(prof) > 0.0

    def test_bound_violation(self, params13):
        with pytest.raises(BoundViolated):
            sphere_identity(cosine_sphere_profile(params13, 1.2))

    def test_profile_validation(self, params13):
        theta = np.linspace(0.0, np.pi, 50)
        with pytest.raises(ValueError):
            SphereProfile(theta[::-1], np.zeros(50), params13)
        with pytest.raises(ValueError):
            SphereProfile(theta + 0.1, np.zeros(50), params13)
