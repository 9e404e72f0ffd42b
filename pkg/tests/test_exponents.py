import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlheat.exponents import (
    UNBOUNDED,
    DiscriminantNegative,
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


class TestCriticalExponents:
    def test_dimension_one(self):
        exps = critical_exponents(1)
        assert exps.pF == 3.0
        assert is_unbounded(exps.pS)
        assert is_unbounded(exps.pc)

    def test_joseph_lundgren_infinite_through_ten(self):
        for dim in range(1, 11):
            assert is_unbounded(critical_exponents(dim).pc)

    def test_eleven_dimensional_value(self):
        exps = critical_exponents(11)
        assert exps.pc == pytest.approx(6.92202, abs=1e-4)
        rational, shifted = joseph_lundgren_forms(11)
        assert abs(rational - shifted) < 1e-10

    def test_sobolev(self):
        assert critical_exponents(3).pS == 5.0
        assert critical_exponents(6).pS == 2.0
        assert is_unbounded(critical_exponents(2).pS)

    def test_decreasing_to_one(self):
        values = [float(critical_exponents(d).pc) for d in range(11, 201)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] > 1.0
        assert values[-1] - 1.0 < 0.025

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            critical_exponents(0)


class TestDecayRate:
    @pytest.mark.parametrize("p,m", [(3.0, 1.0), (2.0, 2.0)])
    def test_values(self, p, m):
        assert decay_rate(p) == m

    @pytest.mark.parametrize("dim", [3, 5, 11, 40])
    def test_at_sobolev_exponent(self, dim):
        pS = float(critical_exponents(dim).pS)
        assert decay_rate(pS) == pytest.approx((dim - 2) / 2, rel=1e-14)

    @pytest.mark.parametrize("p", [1.0, 0.5, -2.0])
    def test_rejects_subunit(self, p):
        with pytest.raises(ValueError):
            decay_rate(p)


class TestSingularAmplitude:
    def test_thirteen_cubed(self):
        # m = 1 and L^2 = 13 - 2 - 1 = 10
        assert singular_amplitude(ProblemParams(13, 3.0)) == pytest.approx(
            math.sqrt(10.0), rel=1e-15
        )

    def test_at_sobolev_eleven(self):
        pS = float(critical_exponents(11).pS)
        expected = (4.5 * 4.5) ** (1.0 / (pS - 1.0))
        assert singular_amplitude(ProblemParams(11, pS)) == pytest.approx(
            expected, rel=1e-14
        )

    def test_rejects_undefined(self):
        # m = 2/(p-1) = 4 >= dim - 2
        with pytest.raises(ValueError):
            singular_amplitude(ProblemParams(3, 1.5))

    @given(
        dim=st.integers(min_value=11, max_value=100),
        offset=st.floats(min_value=0.0, max_value=10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_closed_form_identity(self, dim, offset):
        p = float(critical_exponents(dim).pc) + offset
        params = ProblemParams(dim, p)
        L = singular_amplitude(params)
        m = decay_rate(p)
        product = m * (dim - 2.0 - m)
        assert abs(L ** (p - 1.0) - product) < 1e-12 * product


class TestLambdaRoots:
    def test_integer_case(self):
        # m = 1: sum 9, product 20, discriminant 1
        lam1, lam2 = lambda_roots(ProblemParams(13, 3.0))
        assert lam1 == pytest.approx(4.0, abs=1e-12)
        assert lam2 == pytest.approx(5.0, abs=1e-12)

    def test_repeated_root_at_critical(self):
        dim = 11
        pc = float(critical_exponents(dim).pc)
        lam1, lam2 = lambda_roots(ProblemParams(dim, pc))
        m = decay_rate(pc)
        assert lam1 == lam2 == pytest.approx((dim - 2 - 2 * m) / 2, rel=1e-12)
        assert lam1 == pytest.approx(1.0 + math.sqrt(10.0), rel=1e-9)

    def test_indicial_identity_integer_case(self):
        # gamma = m + lambda1 = 5: 5 * (5 - 11) + 3 * 10 = 0 exactly
        params = ProblemParams(13, 3.0)
        assert indicial_residual(params, 5.0) == 0.0
        assert indicial_residual(params, 6.0) == 0.0

    def test_subcritical_raises(self):
        with pytest.raises(DiscriminantNegative):
            lambda_roots(ProblemParams(13, 2.0))
        with pytest.raises(DiscriminantNegative):
            lambda_roots(ProblemParams(5, 7.0))  # pc infinite below dim 11

    def test_boundary_band(self):
        pc = float(critical_exponents(11).pc)
        with pytest.raises(DiscriminantNegative):
            lambda_roots(ProblemParams(11, pc * (1 - 2e-9)))
        lam1, lam2 = lambda_roots(ProblemParams(11, pc * (1 - 0.5e-9)))
        assert lam1 == lam2  # inside the equality band
        lambda_roots(ProblemParams(11, pc * (1 + 2e-9)))  # no raise above

    @given(
        dim=st.integers(min_value=11, max_value=100),
        # either exactly p_c or clearly outside the equality band, where the
        # analytic branch applies; the band itself is tested separately
        offset=st.one_of(
            st.just(0.0), st.floats(min_value=1e-6, max_value=10.0)
        ),
    )
    @settings(max_examples=80, deadline=None)
    def test_identities_supercritical(self, dim, offset):
        p = float(critical_exponents(dim).pc) + offset
        params = ProblemParams(dim, p)
        m = decay_rate(p)
        lam1, lam2 = lambda_roots(params)
        assert lam1 > 2.0
        assert lam1 <= lam2
        assert abs(lam1 + lam2 - (dim - 2 - 2 * m)) < 1e-10
        assert abs(lam1 * lam2 - 2 * (dim - 2 - m)) < 1e-10
        for gamma in (m + lam1, m + lam2):
            assert abs(indicial_residual(params, gamma)) < 1e-9

    def test_perturbed_constant_fails_indicial(self):
        # negative control: a 1e-3 slip in lambda1 must be detectable
        params = ProblemParams(13, 3.0)
        m = decay_rate(params.p)
        lam1, _ = lambda_roots(params)
        assert abs(indicial_residual(params, m + lam1 + 1e-3)) > 1e-9


class TestSpectralConstants:
    def test_cached(self, params13):
        assert spectral_constants(params13) is spectral_constants(params13)

    def test_fields(self, params13):
        c = spectral_constants(params13)
        assert c.m == 1.0
        assert c.L == pytest.approx(math.sqrt(10.0))
        assert (c.lambda1, c.lambda2) == (pytest.approx(4.0), pytest.approx(5.0))
        assert not c.critical
        assert c.tail_exponent == pytest.approx(5.0)

    def test_critical_flag(self, params_pc11):
        assert spectral_constants(params_pc11).critical


class TestUnbounded:
    def test_total_order_against_floats(self):
        assert UNBOUNDED > 1e308
        assert not (UNBOUNDED < 1e308)
        assert 1e308 < UNBOUNDED
        assert UNBOUNDED >= UNBOUNDED
        assert not (UNBOUNDED > UNBOUNDED)
        assert UNBOUNDED == UNBOUNDED
        assert UNBOUNDED != 3.0

    def test_singleton_and_float_bridge(self):
        assert type(UNBOUNDED)() is UNBOUNDED
        assert float(UNBOUNDED) == math.inf


class TestProblemParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ProblemParams(2, 3.0)
        with pytest.raises(ValueError):
            ProblemParams(13, 1.0)
        with pytest.raises(ValueError):
            ProblemParams(13, float("nan"))
        with pytest.raises(TypeError):
            ProblemParams(13.0, 3.0)

    def test_supercritical_flag(self):
        assert ProblemParams(13, 3.0).is_supercritical
        assert not ProblemParams(13, 2.0).is_supercritical
        assert not ProblemParams(10, 50.0).is_supercritical  # pc infinite
        pc = float(critical_exponents(11).pc)
        assert ProblemParams(11, pc).is_supercritical
        assert ProblemParams(11, pc).is_critical
        assert not ProblemParams(11, pc + 0.1).is_critical
