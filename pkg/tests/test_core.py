import numpy as np
import pytest
from hypothesis import given, strategies as st

from asso.core import (
    AssoConfig,
    GroundTruthComponent,
    SampledSignal,
    WindowSpec,
    branch_sqrt,
    chirp_stft_closed_form,
    essential_half_width,
    m_factor,
    window_value,
)
from asso.errors import InvalidParameterError


def quad_chirp_stft(t, eta, amplitude, c, r, sigma, radius=10.0, n=200_001):
    # independent route: trapezoid quadrature of the defining integral
    tau = np.linspace(-radius * sigma, radius * sigma, n)
    x = amplitude * np.cos(2 * np.pi * (c * (t + tau) + 0.5 * r * (t + tau) ** 2))
    g = np.exp(-0.5 * (tau / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
    return np.trapezoid(x * g * np.exp(-2j * np.pi * eta * tau), tau)


class TestWindowValue:
    def test_peak_values(self):
        assert window_value(0.0, 1.0) == pytest.approx(1.0 / np.sqrt(2 * np.pi), abs=1e-15)
        assert window_value(0.0, 0.5) == pytest.approx(2.0 / np.sqrt(2 * np.pi), abs=1e-15)

    def test_unit_integral(self):
        for sigma in (0.02, 0.3, 1.7):
            t = np.linspace(-8 * sigma, 8 * sigma, 40_001)
            assert np.trapezoid(window_value(t, sigma), t) == pytest.approx(1.0, abs=1e-10)

    def test_even_and_positive(self):
        t = np.linspace(0.0, 5.0, 101)
        w = window_value(t, 0.8)
        assert np.array_equal(w, window_value(-t, 0.8))
        assert (w > 0).all()

    def test_scaling_identity(self):
        t = np.linspace(-1, 1, 55)
        sigma = 0.37
        np.testing.assert_allclose(window_value(t, sigma), window_value(t / sigma, 1.0) / sigma, rtol=1e-14)

    def test_sigma_domain(self):
        with pytest.raises(InvalidParameterError):
            window_value(0.0, 0.0)
        with pytest.raises(InvalidParameterError):
            window_value(0.0, -1.0)


class TestBranchSqrt:
    def test_real_one(self):
        assert branch_sqrt(1.0 + 0j) == 1.0 + 0j

    @given(
        st.floats(min_value=1e-6, max_value=1e6),
        st.floats(min_value=-1e6, max_value=1e6),
    )
    def test_square_roundtrip_and_quadrant(self, re, im):
        z = complex(re, im)
        w = branch_sqrt(z)
        assert w.real > 0
        assert np.sign(w.imag) == np.sign(im)
        assert abs(w * w - z) <= 1e-12 * abs(z)

    def test_domain_error(self):
        with pytest.raises(InvalidParameterError):
            branch_sqrt(-1.0 + 0.5j)
        with pytest.raises(InvalidParameterError):
            branch_sqrt(0.0 + 1.0j)


class TestMFactor:
    def test_center_is_one(self):
        assert m_factor(0.0, 0.05, 12.0) == pytest.approx(1.0 + 0j, abs=1e-15)

    def test_magnitude_bounded_and_even(self):
        xi = np.linspace(-40, 40, 201)
        m = m_factor(xi, 0.03, 25.0)
        assert (np.abs(m) <= 1.0 + 1e-15).all()
        np.testing.assert_allclose(m, m_factor(-xi, 0.03, 25.0), rtol=1e-14)

    @given(
        st.floats(min_value=0.005, max_value=2.0),
        st.floats(min_value=-200.0, max_value=200.0),
        st.floats(min_value=0.01, max_value=0.9),
    )
    def test_magnitude_at_half_width_equals_tau0(self, sigma, r, tau0):
        # the half-width formula inverts |m_factor| exactly, for any chirp rate
        lam = essential_half_width(sigma, r, tau0)
        assert abs(m_factor(lam, sigma, r)) == pytest.approx(tau0, rel=1e-12)

    def test_zero_rate_is_real_gaussian(self):
        xi = np.linspace(-3, 3, 31)
        m = m_factor(xi, 0.1, 0.0)
        np.testing.assert_allclose(m.imag, 0.0, atol=1e-15)
        np.testing.assert_allclose(m.real, np.exp(-2 * np.pi**2 * 0.01 * xi**2), rtol=1e-14)


class TestEssentialHalfWidth:
    def test_known_point(self):
        # sigma = 1/(2 pi), r = 0, tau0 = e^-2  ->  exactly 2
        assert essential_half_width(1.0 / (2 * np.pi), 0.0, float(np.exp(-2))) == pytest.approx(2.0, rel=1e-14)

    def test_minimizer_matches_grid_search(self):
        r = 37.0
        sigmas = np.linspace(1e-3, 0.5, 200_001)
        lam = np.sqrt(2 * abs(np.log(0.1))) * np.hypot(1.0 / (2 * np.pi * sigmas), r * sigmas)
        best = sigmas[np.argmin(lam)]
        assert best == pytest.approx(1.0 / np.sqrt(2 * np.pi * r), abs=3e-6)
        assert essential_half_width(1.0 / np.sqrt(2 * np.pi * r), r, 0.1) <= lam.min() + 1e-12

    def test_widens_with_rate_at_fixed_sigma(self):
        assert essential_half_width(0.1, 50.0, 0.1) > essential_half_width(0.1, 5.0, 0.1)

    def test_tau0_domain(self):
        for bad in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(InvalidParameterError):
                essential_half_width(0.1, 0.0, bad)


class TestChirpClosedForm:
    # parameter points chosen so the neglected negative-frequency image is < 1e-12
    CASES = [
        (0.5, 54.0, 1.0, 17.0, 37.0, 0.02),
        (0.5, 36.0, 1.0, 17.0, 37.0, 0.02),
        (0.3, 30.0, 0.7, 25.0, -15.0, 0.03),
    ]

    @pytest.mark.parametrize("t,eta,amp,c,r,sigma", CASES)
    def test_matches_quadrature(self, t, eta, amp, c, r, sigma):
        got = chirp_stft_closed_form(t, eta, amp, c, r, sigma)
        want = quad_chirp_stft(t, eta, amp, c, r, sigma)
        assert abs(got - want) <= 1e-8 * abs(want)

    def test_on_ridge_magnitude(self):
        amp, c, r, sigma, t = 1.0, 17.0, 37.0, 0.02, 0.5
        v = chirp_stft_closed_form(t, c + r * t, amp, c, r, sigma)
        b = 2 * np.pi * sigma * sigma * r
        assert abs(v) == pytest.approx(amp / (2 * (1 + b * b) ** 0.25), rel=1e-13)

    def test_zero_rate_reduces_to_tone(self):
        t, eta, amp, c, sigma = 0.4, 102.0, 0.9, 100.0, 0.05
        v = chirp_stft_closed_form(t, eta, amp, c, 0.0, sigma)
        want = amp / 2 * np.exp(2j * np.pi * c * t) * m_factor(eta - c, sigma, 0.0)
        assert abs(v - want) <= 1e-12 * abs(want)


class TestSampledSignal:
    def test_basic_properties(self):
        s = SampledSignal(np.arange(8.0), 4.0, start_time=1.0)
        assert len(s) == 8
        assert s.dt == 0.25
        assert s.duration == 2.0
        assert not s.is_complex
        np.testing.assert_allclose(s.times(), 1.0 + np.arange(8) / 4.0)

    def test_rejects_bad_shapes_and_values(self):
        with pytest.raises(InvalidParameterError):
            SampledSignal(np.zeros((2, 2)), 1.0)
        with pytest.raises(InvalidParameterError):
            SampledSignal(np.array([1.0]), 1.0)
        with pytest.raises(InvalidParameterError):
            SampledSignal(np.array([1.0, np.nan]), 1.0)
        with pytest.raises(InvalidParameterError):
            SampledSignal(np.arange(4.0), 0.0)

    def test_complex_preserved(self):
        s = SampledSignal(np.array([1 + 1j, 2 - 1j]), 10.0)
        assert s.is_complex


class TestGroundTruthComponent:
    def test_sample_matches_definition(self):
        comp = GroundTruthComponent(
            amplitude=lambda t: 0.5 + 0 * t,
            phase=lambda t: 3.0 * t,
            if_hz=lambda t: 3.0 + 0 * t,
            chirp_rate=lambda t: 0.0 * t,
        )
        t = np.linspace(0, 1, 17)
        np.testing.assert_allclose(comp.sample(t), 0.5 * np.cos(2 * np.pi * 3.0 * t), rtol=1e-14)


class TestWindowSpec:
    def test_half_support_floor(self):
        spec = WindowSpec()
        assert spec.half_support_samples(0.02, 512.0) == 51  # floor(5 * 0.02 * 512) = floor(51.2)
        assert spec.half_support_samples(0.02, 500.0) == 50  # exactly 50

    def test_half_width_uses_tau0(self):
        spec = WindowSpec(tau0=float(np.exp(-2)))
        assert spec.half_width_hz(1.0 / (2 * np.pi)) == pytest.approx(2.0, rel=1e-14)

    def test_domain(self):
        with pytest.raises(InvalidParameterError):
            WindowSpec(tau0=1.5)


class TestAssoConfig:
    def test_defaults_are_valid(self):
        cfg = AssoConfig()
        assert cfg.tau0 == 0.1
        assert cfg.gamma1_rel == 0.3
        assert cfg.gamma2_rel == 0.1
        assert cfg.window().truncation_radius == 5.0

    def test_threshold_ordering_enforced(self):
        with pytest.raises(InvalidParameterError):
            AssoConfig(gamma1_rel=0.1, gamma2_rel=0.3)

    def test_epsilon_open_interval(self):
        with pytest.raises(InvalidParameterError):
            AssoConfig(refine_epsilon=0.1)
        with pytest.raises(InvalidParameterError):
            AssoConfig(refine_epsilon=0.0)
        AssoConfig(refine_epsilon=0.09)

    def test_smooth_len_must_be_odd(self):
        with pytest.raises(InvalidParameterError):
            AssoConfig(smooth_len=10)

    def test_sigma_range_consistency(self):
        with pytest.raises(InvalidParameterError):
            AssoConfig(sigma_min=1.0, sigma_max=0.5)

    def test_choice_fields(self):
        with pytest.raises(InvalidParameterError):
            AssoConfig(lambda0_convention="other")
        with pytest.raises(InvalidParameterError):
            AssoConfig(recovery_model="quadratic")

    def test_replace(self):
        cfg = AssoConfig().replace(tau0=0.2)
        assert cfg.tau0 == 0.2
