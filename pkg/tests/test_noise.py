"""Noise kernel: quadrature oracle, closed forms, asymptotes, delta identities."""

import math

import numpy as np
import pytest

from qamp import (AmplifierParams, added_noise, added_noise_limit, caves_limit,
                  delta, delta_by_quadrature, gain, m_width, noise_integral,
                  noise_integral_even, noise_integral_limit, noise_integral_odd,
                  noise_record, standard_added_noise)

X_GRID = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]


class TestNoiseIntegral:
    def test_zero(self):
        assert noise_integral(0.7, 0.0) == 0.0

    def test_gudermannian(self):
        # A' = 1: I(x) = 2 arctan(tanh(x/2)), frozen oracle value at x = 1
        assert noise_integral(1.0, 1.0) == pytest.approx(0.86576948323965862, rel=1e-12)
        assert noise_integral(1.0, 1.0) == pytest.approx(
            2.0 * math.atan(math.tanh(0.5)), rel=1e-12)

    def test_limit_reached(self):
        assert noise_integral(1.0, 50.0) == pytest.approx(math.pi / 2.0, rel=1e-12)

    def test_odd(self):
        for x in X_GRID:
            assert noise_integral(0.35, -x) == pytest.approx(
                -noise_integral(0.35, x), rel=1e-14)

    def test_monotone_and_bounded(self):
        xs = np.linspace(0.0, 25.0, 101)
        vals = noise_integral(0.6, xs)
        assert np.all(np.diff(vals) > 0.0)
        assert vals[-1] < noise_integral_limit(0.6)

    def test_decreasing_in_exponent(self):
        for x in (0.5, 2.0, 10.0):
            vals = [noise_integral(a, x) for a in (0.2, 0.7, 1.5, 3.0, 8.0)]
            assert np.all(np.diff(vals) < 0.0)

    def test_array_matches_scalars(self):
        xs = np.array([-3.0, -0.4, 0.0, 0.7, 2.2, 9.0])
        arr = noise_integral(1.3, xs)
        ref = np.array([noise_integral(1.3, float(x)) for x in xs])
        assert np.allclose(arr, ref, rtol=1e-11, atol=1e-13)

    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            noise_integral(0.0, 1.0)


class TestClosedForms:
    def test_even_base_case_is_tanh(self):
        xs = np.linspace(-8.0, 8.0, 33)
        assert np.allclose(noise_integral_even(1, xs), np.tanh(xs), rtol=1e-14)

    def test_frozen_quadrature_values(self):
        assert noise_integral_even(1, 1.0) == pytest.approx(0.76159415595576489, rel=1e-12)
        # quadrature oracle of sech^4 on [0, 1]
        assert noise_integral_even(2, 1.0) == pytest.approx(0.61434610537871401, rel=1e-12)
        # quadrature oracle of sech^3 on [0, 1]
        assert noise_integral_odd(1, 1.0) == pytest.approx(0.67966191540211585, rel=1e-12)

    def test_odd_base_asymptote(self):
        assert noise_integral_odd(1, 80.0) == pytest.approx(math.pi / 4.0, rel=1e-12)
        assert noise_integral_limit(3.0) == pytest.approx(math.pi / 4.0, rel=1e-12)

    def test_odd_vanishes_at_origin(self):
        for m in range(1, 6):
            assert noise_integral_odd(m, 0.0) == 0.0
            assert noise_integral_even(m, 0.0) == 0.0

    @pytest.mark.parametrize("m", range(1, 6))
    @pytest.mark.parametrize("x", X_GRID)
    def test_even_matches_quadrature(self, m, x):
        assert noise_integral_even(m, x) == pytest.approx(
            noise_integral(2.0 * m, x, rtol=1e-12), rel=1e-10)

    @pytest.mark.parametrize("m", range(1, 6))
    @pytest.mark.parametrize("x", X_GRID)
    def test_odd_matches_quadrature(self, m, x):
        assert noise_integral_odd(m, x) == pytest.approx(
            noise_integral(2.0 * m + 1.0, x, rtol=1e-12), rel=1e-10)

    def test_large_argument_finite(self):
        # tanh-weighted arrangement: no overflow even at x = 1000
        assert np.isfinite(noise_integral_even(3, 1000.0))
        assert np.isfinite(noise_integral_odd(3, 1000.0))

    def test_integer_validation(self):
        with pytest.raises(ValueError):
            noise_integral_even(0, 1.0)
        with pytest.raises(ValueError):
            noise_integral_odd(1.5, 1.0)


class TestLimit:
    def test_gamma_identities(self):
        assert noise_integral_limit(1.0) == pytest.approx(math.pi / 2.0, rel=1e-14)
        assert noise_integral_limit(2.0) == pytest.approx(1.0, rel=1e-14)

    def test_divergence_sentinel(self):
        assert noise_integral_limit(1e-13) == math.inf

    def test_strictly_decreasing(self):
        vals = [noise_integral_limit(a) for a in (0.1, 0.5, 1.0, 2.0, 5.0, 20.0)]
        assert np.all(np.diff(vals) < 0.0)


class TestDelta:
    def test_zero_at_start(self):
        p = AmplifierParams(aprime=1.0, bprime=0.2, tau0=3.0)
        assert delta(p, 0.0) == 0.0

    def test_frozen_gudermannian_case(self):
        # oracle: (1/2) cosh(1) gd(1), confirmed by the defining integral
        p = AmplifierParams(aprime=1.0)
        assert delta(p, 1.0) == pytest.approx(0.66797606190055899, rel=1e-11)

    def test_symbolic_tanh_case(self):
        # A' = 2, tau0 = 0: delta = cosh^2 tau * tanh tau = sinh tau cosh tau
        p = AmplifierParams(aprime=2.0)
        for tau in (0.3, 1.0, 2.5):
            assert delta(p, tau) == pytest.approx(math.sinh(tau) * math.cosh(tau), rel=1e-10)
        assert delta(p, 1.0) == pytest.approx(1.8134302039235094, rel=1e-11)

    @pytest.mark.parametrize("aprime,bprime,tau0", [
        (0.05, 0.0, 0.0), (0.5, 0.005, 4.0), (1.0, 0.1, 2.0),
        (2.0, 0.0, 5.0), (5.5, 1.0, 1.0), (5.0, 0.0, 8.0),
    ])
    def test_matches_defining_integral(self, aprime, bprime, tau0):
        # the (5, 0, 8) cell is the cancellation regression: early on, the
        # two I terms agree to 17 digits and only their interval form survives
        p = AmplifierParams(aprime=aprime, bprime=bprime, tau0=tau0)
        for tau in (0.09, 0.5, 2.0, max(1.0, 2.0 * tau0), 2.0 * tau0 + 4.0):
            assert float(delta(p, tau)) == pytest.approx(
                delta_by_quadrature(p, tau), rel=1e-9)

    def test_nondecreasing(self):
        p = AmplifierParams(aprime=0.5, bprime=0.005, tau0=4.0)
        taus = np.linspace(0.0, 30.0, 301)
        assert np.all(np.diff(delta(p, taus)) >= 0.0)

    def test_negative_tau_rejected(self):
        with pytest.raises(ValueError):
            delta(AmplifierParams(aprime=1.0), -1.0)


class TestAddedNoise:
    def test_zero_at_start(self):
        p = AmplifierParams(aprime=2.0, tau0=1.0)
        assert added_noise(p, 0.0) == 0.0

    def test_ratio_identity(self):
        p = AmplifierParams(aprime=0.5, bprime=0.05, tau0=4.0)
        taus = np.linspace(0.1, 12.0, 40)
        lhs = added_noise(p, taus) * gain(p, taus)
        assert np.allclose(lhs, delta(p, taus), rtol=1e-12)

    def test_caves_values(self):
        assert caves_limit(0.0) == 0.5
        assert caves_limit(0.01) == 0.51
        assert caves_limit(1000.0) == 1000.5
        with pytest.raises(ValueError):
            caves_limit(-0.1)

    def test_asymptote_gudermannian(self):
        p = AmplifierParams(aprime=1.0)
        assert added_noise_limit(p) == pytest.approx(math.pi / 4.0, rel=1e-14)
        assert added_noise(p, 30.0) == pytest.approx(math.pi / 4.0, rel=1e-10)

    def test_asymptote_dominates_caves(self):
        for aprime in (0.01, 0.1, 0.5, 1.0, 2.0, 5.0):
            for n_medium in (0.0, 0.01, 0.1, 1000.0):
                p = AmplifierParams.from_medium_occupation(aprime, n_medium)
                assert added_noise_limit(p) > caves_limit(n_medium)

    def test_nondecreasing(self):
        p = AmplifierParams(aprime=1.0, bprime=0.01, tau0=2.0)
        taus = np.linspace(0.0, 30.0, 301)
        assert np.all(np.diff(added_noise(p, taus)) >= 0.0)


class TestStandardAmplifier:
    def test_caves_at_infinite_gain(self):
        assert standard_added_noise(1.0, 0.0, 1e12) == pytest.approx(0.5, rel=1e-11)

    def test_zero_at_unit_gain(self):
        assert standard_added_noise(1.0, 0.0, 1.0) == 0.0

    def test_arithmetic(self):
        assert standard_added_noise(2.0, 1.0, 2.0) == pytest.approx(0.75, rel=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            standard_added_noise(1.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            standard_added_noise(1.0, 0.0, 0.5)


class TestNoiseRecord:
    def test_consistency(self):
        p = AmplifierParams(aprime=0.5, bprime=0.005, tau0=4.0)
        rec = noise_record(p, 6.0)
        assert rec.delta >= 0.0
        assert rec.added_noise * float(gain(p, 6.0)) == pytest.approx(rec.delta, rel=1e-12)
        assert rec.m_width == pytest.approx(float(m_width(p, 6.0)), rel=1e-12)

    def test_m_width_nonnegative(self):
        # (G-1)/2 < 0 during damping but delta always wins for tau > 0
        for aprime, tau0 in ((1.0, 4.0), (0.05, 8.0), (5.5, 2.0)):
            p = AmplifierParams(aprime=aprime, tau0=tau0)
            taus = np.linspace(0.0, 2.0 * tau0 + 4.0, 200)
            assert np.all(m_width(p, taus) >= 0.0)
