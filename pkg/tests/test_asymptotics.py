import numpy as np
import pytest

from brl.asymptotics import (
    d_monotonicity_scan,
    ef_derivative,
    ef_residual,
    ef_transform,
    fit_decay_exponent,
    has_log_correction,
    kappa_predicted_of,
    kelvin_profile,
    minimal_remainder_fit,
    nonminimal_diagnostics,
    predicted_minimal_remainder,
    samples_to_csv,
)
from brl.charpoly import mean_roots_closed
from brl.errors import DegenerateFit, InsufficientSamples, InvalidTrajectory
from brl.params import Parameters, alpha_of, derive_constants
from brl.radial_ode import (
    IVP,
    Termination,
    integrate,
    integrate_from_state,
    singular_state,
)

P52 = Parameters(5, 2.0)
DC52 = derive_constants(Parameters(5, 2.0))


def _singular_traj(params, r_max=50.0, tol=1e-10):
    y0 = singular_state(params, 1.0)
    return integrate_from_state(params, 1.0, y0, r_max, tol=tol)


class TestTransforms:
    def test_kelvin_of_singular_solution_is_flat(self):
        params = Parameters(5, 3.0)
        dc = derive_constants(Parameters(5, 3.0))
        s, w = kelvin_profile(_singular_traj(params), dc)
        assert np.all(np.diff(s) > 0.0)
        assert np.max(np.abs(w)) < 1e-4 * dc.L

    def test_kelvin_ef_consistency(self):
        traj = integrate(IVP(1.0, 2.0, P52), r_max=20.0, tol=1e-10)
        s, w = kelvin_profile(traj, DC52)
        t, m = ef_transform(traj, DC52.alpha)
        # same profile in both charts: w(1/r) == m(ln r)
        assert np.allclose(np.sort(w), np.sort(m), rtol=0, atol=1e-12)
        assert np.allclose(np.sort(np.exp(-t)), s, rtol=1e-12)

    def test_ef_derivative_matches_finite_differences(self):
        traj = integrate(IVP(1.0, 2.0, P52), r_max=20.0, tol=1e-10)
        t, m = ef_transform(traj, DC52.alpha)
        mp = ef_derivative(traj, DC52.alpha)
        num = np.gradient(m, t)
        sel = slice(2, -2)
        assert np.max(np.abs(mp[sel] - num[sel])) < 1e-2 * np.max(np.abs(mp))

    def test_extinct_trajectory_rejected(self):
        traj = integrate(IVP(1.0, -1.0, P52), r_max=50.0)
        assert traj.termination == Termination.Extinct
        with pytest.raises(InvalidTrajectory):
            ef_transform(traj, DC52.alpha)


class TestEfResidual:
    def test_zero_profile(self):
        t = np.linspace(0.0, 5.0, 40)
        assert ef_residual(t, np.zeros_like(t), P52) == 0.0

    def test_unstructured_noise_is_order_one(self):
        # the residual is normalized by its largest term, so pure noise
        # (which satisfies no equation) sits near 1
        rng = np.random.default_rng(11)
        t = np.linspace(0.0, 5.0, 80)
        assert ef_residual(t, 1e-3 * rng.standard_normal(len(t)), P52) > 0.3

    def test_linearized_mode_residual_is_nonlinear_share(self):
        # m = eps e^(beta1 t) solves the linearized equation exactly, so the
        # residual is the superlinear term g(m) ~ m^2, small for small eps
        beta1 = mean_roots_closed(P52).roots[0].real
        t = np.linspace(0.0, 2.0, 200)
        m = 1e-4 * np.exp(beta1 * t)
        assert ef_residual(t, m, P52) < 1e-2

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples):
            ef_residual([0, 1, 2], [0.0, 0.0, 0.0], P52)


class TestFitDecayExponent:
    def test_pure_power(self):
        x = np.logspace(0, 3, 200)
        fit = fit_decay_exponent(x, 3.0 * x ** -2.5)
        assert fit.exponent == pytest.approx(-2.5, abs=1e-10)
        assert np.exp(fit.log_amplitude) == pytest.approx(3.0, rel=1e-9)
        assert not fit.oscillatory

    def test_noisy_power(self):
        rng = np.random.default_rng(3)
        x = np.logspace(0, 2, 400)
        y = x ** -1.5 * (1.0 + 0.01 * rng.standard_normal(len(x)))
        fit = fit_decay_exponent(x, y, window=(1.0, 100.0))
        assert fit.exponent == pytest.approx(-1.5, abs=0.05)

    def test_oscillatory_envelope(self):
        x = np.logspace(0, 6, 4000)
        y = x ** -1.5 * np.cos(1.58 * np.log(x))
        fit = fit_decay_exponent(x, y, window=(1.0, 1e6), envelope=True)
        assert fit.oscillatory
        assert fit.exponent == pytest.approx(-1.5, abs=0.15)

    def test_default_window_is_last_decade(self):
        x = np.logspace(0, 3, 300)
        y = x ** -2.0
        y[x < 100.0] = 1.0  # garbage outside the default window
        fit = fit_decay_exponent(x, y)
        assert fit.exponent == pytest.approx(-2.0, abs=1e-8)
        assert fit.window == (100.0, 1000.0)

    def test_all_below_floor_degenerate(self):
        x = np.logspace(0, 2, 50)
        with pytest.raises(DegenerateFit):
            fit_decay_exponent(x, np.full_like(x, 1e-16))

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamples):
            fit_decay_exponent([1.0, 2.0, 4.0], [1.0, 0.5, 0.25],
                               window=(1.0, 4.0))

    def test_too_few_extrema_degenerate(self):
        x = np.logspace(0, 1, 100)
        with pytest.raises(DegenerateFit):
            fit_decay_exponent(x, x ** -1.0, window=(1.0, 10.0),
                               envelope=True)


class TestPredictedRemainder:
    def test_complex_branch_equals_two_minus_half_n(self):
        for N, p in ((10, 5.0), (5, 2.0), (6, 3.0)):
            params = Parameters(N, p)
            dc = derive_constants(params)
            rem, tag = predicted_minimal_remainder(params, dc)
            assert tag == "Complex"
            assert rem == pytest.approx(2.0 - N / 2.0, abs=1e-10)

    def test_real_branch(self):
        params = Parameters(13, 2.0)
        dc = derive_constants(Parameters(13, 2.0))
        rem, tag = predicted_minimal_remainder(params, dc)
        assert tag == "Real"
        beta3 = mean_roots_closed(params).roots[2]
        assert beta3.imag == 0.0
        assert rem == pytest.approx(beta3.real + dc.alpha, abs=1e-12)

    def test_coherence_with_root_ordering(self):
        # the predicted rate minus alpha is the largest negative real part
        for N, p in ((5, 2.0), (13, 2.0), (3, 2.8), (7, 4.0)):
            params = Parameters(N, p)
            dc = derive_constants(params)
            rem, _ = predicted_minimal_remainder(params, dc)
            roots = mean_roots_closed(params).roots
            decaying = [z.real for z in roots if z.real < 0.0]
            assert rem - dc.alpha == pytest.approx(max(decaying), abs=1e-10)


class TestLogCorrection:
    @pytest.mark.parametrize("N,p,expect", [
        (5, 2.5, True),    # p == N/2
        (3, 1.5, True),    # 2(p-1) == ... hits the tie
        (6, 3.0, True),    # p == N/2
        (5, 2.0, True),    # 2(p-1) == 2
        (6, 2.2, False),
        (10, 5.0, True),   # p == N/2
        (7, 1.7, False),
    ])
    def test_cases(self, N, p, expect):
        assert has_log_correction(Parameters(N, p)) is expect

    def test_kappa_values(self):
        assert kappa_predicted_of(Parameters(5, 2.0)) == 2.0
        assert kappa_predicted_of(Parameters(3, 4.0)) == 1.0
        assert kappa_predicted_of(Parameters(8, 1.5)) == 1.0


class TestNonminimal:
    def test_diagnostics(self, shoot_cached):
        res = shoot_cached(5, 2.0)
        traj = integrate(IVP(1.0, 2.0 * res.b_tilde_est, P52),
                         r_max=1e3, tol=1e-10)
        diag = nonminimal_diagnostics(traj, P52)
        assert diag.d_from_laplacian > 0.0
        assert diag.d_from_quadratic == pytest.approx(
            diag.d_from_laplacian, rel=1e-3)
        assert diag.kappa_predicted == 2.0
        assert diag.log_correction is True
        d = diag.to_dict()
        assert set(d) == {"d_from_laplacian", "d_from_quadratic",
                          "kappa_predicted", "log_correction", "kappa_fitted"}

    def test_d_monotone_in_b(self, shoot_cached):
        res = shoot_cached(5, 2.0)
        bs = res.b_tilde_est * np.array([1.5, 2.0, 3.0])
        scan = d_monotonicity_scan(1.0, P52, bs, r_max=500.0)
        ds = [d for _, d in scan]
        assert ds == sorted(ds)
        assert all(d > 0.0 for d in ds)


class TestMinimalRemainderFit:
    def test_complex_branch_envelope_slope(self, shoot_cached):
        res = shoot_cached(5, 2.0)
        fit, rem = minimal_remainder_fit(res.minimal_traj, P52)
        pred, tag = predicted_minimal_remainder(P52, DC52)
        assert tag == "Complex"
        assert fit.oscillatory
        assert rem == pytest.approx(pred, abs=0.3)


class TestCsv:
    def test_samples_to_csv(self):
        x = np.array([1.0, 2.0])
        v = np.array([0.5, 0.25])
        csv = samples_to_csv(x, v, header="t,m")
        lines = csv.strip().split("\n")
        assert lines[0] == "t,m"
        assert len(lines) == 3
        assert float(lines[1].split(",")[1]) == 0.5
