import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import binom

from garchvi import distributions as dists
from garchvi.exceptions import ConstraintViolation
from garchvi.models import (ConstrainedParams, ModelSpec, figarch_weights, forecast_variance,
                            log_likelihood, loglik_batch, param_names, parameter_count,
                            qml_objective, satisfies_constraints, simulate, variance_batch,
                            variance_path)
from garchvi.transforms import inverse_transform_batch

LOG_2PI = math.log(2 * math.pi)
GARCH11 = ModelSpec.parse("GARCH(1,1)")


# -- independent reference implementations ------------------------------------------------

def ref_garch(eps, omega, alpha, gamma, beta, h0):
    q, o, p = len(alpha), len(gamma), len(beta)
    m = max(p, o, q)
    h = []
    for t in range(len(eps)):
        if t < m:
            h.append(h0)
            continue
        v = omega
        v += sum(alpha[j] * eps[t - 1 - j] ** 2 for j in range(q))
        v += sum(gamma[j] * eps[t - 1 - j] ** 2 * (eps[t - 1 - j] > 0) for j in range(o))
        v += sum(beta[j] * h[t - 1 - j] for j in range(p))
        h.append(v)
    return np.array(h)


def ref_egarch(eps, omega, alpha, gamma, psi, beta, h0, eabs):
    lh, z = [], []
    for t in range(len(eps)):
        v = omega
        for j in range(len(alpha)):
            if t - 1 - j >= 0:
                zz = z[t - 1 - j]
                v += alpha[j] * zz + psi[j] * (abs(zz) - eabs)
        for j in range(len(gamma)):
            if t - 1 - j >= 0 and z[t - 1 - j] > 0:
                v += gamma[j] * z[t - 1 - j]
        for j in range(len(beta)):
            v += beta[j] * (lh[t - 1 - j] if t - 1 - j >= 0 else math.log(h0))
        lh.append(v)
        z.append(eps[t] / math.exp(v / 2))
    return np.exp(lh)


def ref_figarch_weights(phi, beta, d, K):
    """Power-series expansion of 1 - (1 - phi L)(1 - L)^d / (1 - beta L)."""
    k = np.arange(K + 1)
    frac = binom(d, k) * (-1.0) ** k
    num = frac - phi * np.concatenate([[0.0], frac[:-1]])
    series = np.zeros(K + 1)
    for i in range(K + 1):
        series[i] = num[i] + (beta * series[i - 1] if i else 0.0)
    return -series[1:]


# -- specs ----------------------------------------------------------------------------

class TestModelSpec:
    @pytest.mark.parametrize("label, names", [
        ("ARCH(1)", ["omega", "alpha[1]"]),
        ("GARCH(2,1)", ["omega", "alpha[1]", "beta[1]", "beta[2]"]),
        ("GJR-GARCH(1,1)", ["omega", "alpha[1]", "gamma[1]", "beta[1]"]),
        ("EGARCH(0,1)", ["omega", "alpha[1]", "psi[1]"]),
        ("EGARCH(1,1)", ["omega", "alpha[1]", "psi[1]", "beta[1]"]),
        ("GJR-EGARCH(1,1)", ["omega", "alpha[1]", "gamma[1]", "psi[1]", "beta[1]"]),
        ("FIGARCH(1,d,1)", ["omega", "beta", "phi", "d"]),
        ("FIGARCH(0,d,1)", ["omega", "beta", "d"]),
    ])
    def test_names(self, label, names):
        assert param_names(ModelSpec.parse(label)) == names

    def test_shape_names_appended(self):
        spec = ModelSpec.parse("GARCH(1,1)", "SkewT")
        assert param_names(spec)[-2:] == ["nu", "lam"]
        assert parameter_count(spec) == 5

    @pytest.mark.parametrize("family, p, o, q", [("ARCH", 1, 0, 1), ("GARCH", 0, 0, 1), ("GARCH", 1, 1, 1),
                                                 ("GJR_GARCH", 1, 0, 1), ("FIGARCH", 2, 0, 1)])
    def test_invalid_orders(self, family, p, o, q):
        with pytest.raises(ValueError):
            ModelSpec(family, p, o, q)

    def test_label_round_trip(self):
        for label in ("ARCH(2)", "GARCH(1,1)", "GJR-GARCH(1,2,1)", "EGARCH(2,1)", "FIGARCH(1,d,0)"):
            spec = ModelSpec.parse(label)
            assert ModelSpec.parse(spec.label) == spec

    def test_params_vector_round_trip(self):
        spec = ModelSpec.parse("GJR-EGARCH(1,1)", "StudentT")
        vec = np.array([0.1, 0.2, -0.1, 0.3, 0.9, 7.0])
        np.testing.assert_array_equal(ConstrainedParams.from_vector(spec, vec).to_vector(spec), vec)


# -- variance paths --------------------------------------------------------------------------

class TestVariancePath:
    def test_garch_hand_value(self):
        path = variance_path(GARCH11, [0.1, 0.2, 0.7], np.array([1.0, 2.0]), h0=2.5)
        np.testing.assert_allclose(path.h, [2.5, 2.05])

    def test_arch_constant(self):
        eps = np.random.default_rng(0).standard_normal(20)
        path = variance_path(ModelSpec.parse("ARCH(1)"), [1.0, 0.0], eps, h0=7.0)
        np.testing.assert_allclose(path.h[1:], 1.0)

    def test_egarch_zero_params(self):
        eps = np.random.default_rng(0).standard_normal(20)
        path = variance_path(ModelSpec.parse("EGARCH(1,1)"), [0, 0, 0, 0], eps, h0=3.0)
        np.testing.assert_allclose(path.h, 1.0)

    @pytest.mark.parametrize("label, nu", [
        ("GARCH(1,1)", [0.1, 0.1, 0.8]),
        ("GARCH(2,2)", [0.1, 0.05, 0.05, 0.4, 0.3]),
        ("GJR-GARCH(1,1)", [0.1, 0.05, 0.1, 0.8]),
        ("GJR-GARCH(1,2,2)", [0.1, 0.05, 0.05, 0.1, 0.05, 0.6]),
        ("GJR-GARCH(0,1,1)", [0.5, 0.2, 0.1]),
        ("ARCH(3)", [0.3, 0.2, 0.2, 0.1]),
    ])
    def test_garch_family_matches_reference(self, label, nu):
        spec = ModelSpec.parse(label)
        eps = np.random.default_rng(1).standard_normal(200) * 1.3
        path = variance_path(spec, nu, eps, h0=1.7)
        from garchvi.models import split_columns
        c = split_columns(spec, np.array([nu]))
        ref = ref_garch(eps, nu[0], c["alpha"][0], c["gamma"][0], c["beta"][0], 1.7)
        np.testing.assert_allclose(path.h, ref, rtol=1e-12)

    @pytest.mark.parametrize("label, nu, kind, shape", [
        ("EGARCH(1,1)", [0.02, -0.05, 0.2, 0.95], "Normal", ()),
        ("EGARCH(2,1)", [0.02, -0.05, 0.2, 0.5, 0.3], "Normal", ()),
        ("EGARCH(0,1)", [0.1, -0.1, 0.3], "StudentT", (6.0,)),
        ("GJR-EGARCH(1,1)", [0.02, -0.05, -0.1, 0.25, 0.9], "GED", (1.4,)),
    ])
    def test_egarch_matches_reference(self, label, nu, kind, shape):
        spec = ModelSpec.parse(label, kind)
        full = list(nu) + list(shape)
        eps = np.random.default_rng(2).standard_normal(150)
        path = variance_path(spec, full, eps, h0=1.2)
        from garchvi.models import split_columns
        c = split_columns(spec, np.array([full]))
        eabs = float(dists.mean_abs(kind, *shape))
        ref = ref_egarch(eps, nu[0], c["alpha"][0], c["gamma"][0], c["psi"][0], c["beta"][0], 1.2, eabs)
        np.testing.assert_allclose(path.h, ref, rtol=1e-11)

    def test_egarch_clamp_counts(self):
        spec = ModelSpec.parse("EGARCH(1,1)")
        path = variance_path(spec, [5.0, 0.0, 0.0, 0.99], np.ones(50), h0=1.0)
        assert path.n_clamped > 0
        assert np.all(np.isfinite(path.h))

    def test_figarch_direct_vs_fft(self):
        spec = ModelSpec.parse("FIGARCH(1,d,1)")
        nu = np.array([[0.1, 0.3, 0.1, 0.4], [0.2, 0.1, 0.05, 0.6]])
        eps = np.random.default_rng(3).standard_normal(400)
        h_fft, _ = variance_batch(spec, nu, np.tile(eps, 3), 1.1)  # long enough for the FFT branch
        h_dir, _ = variance_batch(spec, nu, eps, 1.1)
        np.testing.assert_allclose(h_fft[:, :400], h_dir, rtol=1e-10)

    def test_figarch_reference(self):
        spec = ModelSpec.parse("FIGARCH(1,d,1)", figarch_truncation=50)
        eps = np.random.default_rng(4).standard_normal(80)
        phi, beta, d, omega, h0 = 0.1, 0.3, 0.4, 0.2, 1.3
        lam = ref_figarch_weights(phi, beta, d, 50)
        e2 = np.concatenate([np.full(50, h0), eps**2])
        ref = [omega + lam @ e2[50 + t - 1::-1][:50] for t in range(80)]
        path = variance_path(spec, [omega, beta, phi, d], eps, h0)
        np.testing.assert_allclose(path.h, ref, rtol=1e-12)

    def test_constraint_violation(self):
        with pytest.raises(ConstraintViolation):
            variance_path(GARCH11, [0.1, 0.5, 0.6], np.ones(5))
        with pytest.raises(ConstraintViolation):
            variance_path(GARCH11, [-0.1, 0.1, 0.6], np.ones(5))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_h_at_least_omega(self, seed):
        rng = np.random.default_rng(seed)
        spec = ModelSpec.parse("GJR-GARCH(1,1)")
        nu = inverse_transform_batch(spec, rng.uniform(-5, 5, (1, 4)))[0]
        eps = rng.standard_normal(100) * rng.uniform(0.1, 5)
        assert np.all(variance_path(spec, nu, eps).h[1:] >= nu[0] * (1 - 1e-12))  # h[0] is the back-cast

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_egarch_positive_for_any_params(self, seed):
        rng = np.random.default_rng(seed)
        nu = rng.normal(0, 2, 4)
        h = variance_path(ModelSpec.parse("EGARCH(1,1)"), nu, rng.standard_normal(60) * 3).h
        assert np.all(h > 0) and np.all(np.isfinite(h))


class TestFigarchWeights:
    def test_hand_values(self):
        np.testing.assert_allclose(figarch_weights(0.125, 0.3125, 0.5, 1), [0.3125], atol=1e-15)
        np.testing.assert_allclose(figarch_weights(0.125, 0.3125, 0.5, 2), [0.3125, 0.16015625], atol=1e-15)

    def test_zero(self):
        np.testing.assert_array_equal(figarch_weights(0, 0, 0, 3), [0, 0, 0])

    @pytest.mark.parametrize("phi, beta, d", [(0.1, 0.3, 0.4), (0.0, 0.5, 0.7), (0.2, 0.0, 0.3), (0.02, 0.9, 0.95)])
    def test_power_series_oracle(self, phi, beta, d):
        np.testing.assert_allclose(figarch_weights(phi, beta, d, 200), ref_figarch_weights(phi, beta, d, 200),
                                   rtol=1e-10, atol=1e-15)

    def test_constraint_violation(self):
        with pytest.raises(ConstraintViolation):
            figarch_weights(0.4, 0.1, 0.5, 10)


# -- objectives ---------------------------------------------------------------------------------

class TestObjectives:
    def test_qml_forced_unit_variance(self):
        spec = ModelSpec.parse("ARCH(1)")
        assert qml_objective(spec, [1.0, 0.0], np.array([0.0, 1.0]), h0=1.0) == pytest.approx(1.0)
        assert qml_objective(spec, [1.0, 0.0], np.zeros(3), h0=1.0) == 0.0

    def test_qml_garch_hand_value(self):
        expected = (math.log(2.5) + 1 / 2.5) + (math.log(2.05) + 4 / 2.05)
        got = qml_objective(GARCH11, [0.1, 0.2, 0.7], np.array([1.0, 2.0]), h0=2.5)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(3.98535, abs=1e-5)

    def test_loglik_unit_variance(self):
        spec = ModelSpec.parse("ARCH(1)")
        assert log_likelihood(spec, [1.0, 0.0], np.zeros(1), h0=1.0) == pytest.approx(-0.918938533)
        assert log_likelihood(spec, [1.0, 0.0], np.zeros(2), h0=1.0) == pytest.approx(-1.837877066)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(["GARCH(1,1)", "GJR-GARCH(1,1)", "EGARCH(1,1)",
                                                      "FIGARCH(1,d,1)", "ARCH(2)"]))
    def test_gaussian_identity(self, seed, label):
        rng = np.random.default_rng(seed)
        spec = ModelSpec.parse(label)
        nu = inverse_transform_batch(spec, rng.uniform(-3, 3, (1, len(param_names(spec)))))[0]
        eps = rng.standard_normal(rng.integers(5, 300)) * 2
        ll = log_likelihood(spec, nu, eps)
        q = qml_objective(spec, nu, eps)
        assert ll == pytest.approx(-0.5 * len(eps) * LOG_2PI - 0.5 * q, rel=1e-10)

    def test_batch_matches_single(self):
        spec = ModelSpec.parse("GJR-GARCH(1,1)", "StudentT")
        rng = np.random.default_rng(5)
        nu = inverse_transform_batch(spec, rng.normal(size=(7, 5)))
        eps = rng.standard_normal(120)
        batch = loglik_batch(spec, nu, eps, 1.0)
        single = [log_likelihood(spec, v, eps, 1.0) for v in nu]
        np.testing.assert_allclose(batch, single, rtol=1e-12)

    def test_batch_marks_invalid_rows(self):
        nu = np.array([[0.1, 0.1, 0.8], [0.1, 0.6, 0.6], [np.nan, 0.1, 0.1]])
        out = loglik_batch(GARCH11, nu, np.ones(10), 1.0)
        # the batch kernel only screens non-finite input; constraint checks belong to callers
        assert np.isfinite(out[0]) and np.isfinite(out[1]) and out[2] == -np.inf


# -- simulation --------------------------------------------------------------------------------

class TestSimulate:
    def test_deterministic(self):
        a = simulate(GARCH11, [0.1, 0.1, 0.8], 500, seed=4)
        b = simulate(GARCH11, [0.1, 0.1, 0.8], 500, seed=4)
        assert a == b
        assert a != simulate(GARCH11, [0.1, 0.1, 0.8], 500, seed=5)

    @pytest.mark.parametrize("nu, target, tol", [([0.1, 0.0, 0.0], 0.1, 0.05), ([0.1, 0.1, 0.8], 1.0, 0.10)])
    def test_unconditional_variance(self, nu, target, tol):
        r = simulate(GARCH11, nu, 100_000, seed=0).returns
        assert np.var(r) == pytest.approx(target, rel=tol)

    def test_rejects_invalid(self):
        with pytest.raises(ConstraintViolation):
            simulate(GARCH11, [0.1, 0.5, 0.6], 10)

    @pytest.mark.parametrize("label, nu", [("EGARCH(1,1)", [0.0, -0.05, 0.2, 0.9]),
                                           ("FIGARCH(1,d,1)", [0.1, 0.3, 0.1, 0.4]),
                                           ("GJR-GARCH(1,1)", [0.05, 0.03, 0.1, 0.85])])
    def test_other_families_finite(self, label, nu):
        r = simulate(ModelSpec.parse(label), nu, 2000, seed=1).returns
        assert np.all(np.isfinite(r)) and r.std() > 0

    @pytest.mark.slow
    def test_truth_beats_perturbation(self):
        truth = np.array([0.1, 0.1, 0.8])
        worse = np.array([0.15, 0.15, 0.7])
        diffs = []
        for seed in range(20):
            eps = simulate(GARCH11, truth, 100_000, seed=seed).returns
            diffs.append(qml_objective(GARCH11, worse, eps) - qml_objective(GARCH11, truth, eps))
        assert np.mean(diffs) > 0


# -- forecasting ---------------------------------------------------------------------------------

class TestForecast:
    def test_hand_values(self):
        fc = forecast_variance(GARCH11, [0.1, 0.2, 0.7], np.array([1.0, 1.0]), 2, h0=1.0)
        np.testing.assert_allclose(fc, [1.0, 1.0])

    def test_one_step_is_recursion(self):
        eps = np.random.default_rng(0).standard_normal(50)
        nu = [0.1, 0.15, 0.75]
        h = variance_path(GARCH11, nu, eps, h0=1.0).h
        fc = forecast_variance(GARCH11, nu, eps, 1, h0=1.0)
        assert fc[0] == pytest.approx(0.1 + 0.15 * eps[-1] ** 2 + 0.75 * h[-1])

    def test_constant_when_no_dynamics(self):
        fc = forecast_variance(GARCH11, [0.3, 0.0, 0.0], np.ones(10), 5)
        np.testing.assert_allclose(fc, 0.3)

    def test_multi_step_converges_to_unconditional(self):
        fc = forecast_variance(GARCH11, [0.1, 0.1, 0.8], np.array([5.0, 5.0]), 400, h0=1.0)
        assert fc[-1] == pytest.approx(1.0, rel=1e-6)

    def test_gjr_uses_half_gamma(self):
        spec = ModelSpec.parse("GJR-GARCH(1,1)")
        fc = forecast_variance(spec, [0.1, 0.1, 0.2, 0.6], np.array([1.0, -1.0]), 3, h0=1.0)
        h2 = 0.1 + 0.1 + 0.0 + 0.6 * 1.0
        h3 = 0.1 + (0.1 + 0.5 * 0.2 + 0.6) * h2
        np.testing.assert_allclose(fc[:2], [h2, h3])

    def test_egarch_one_step(self):
        spec = ModelSpec.parse("EGARCH(1,1)")
        nu = [0.02, -0.05, 0.2, 0.9]
        eps = np.random.default_rng(1).standard_normal(40)
        h = variance_path(spec, nu, eps, h0=1.0).h
        z = eps[-1] / math.sqrt(h[-1])
        expected = math.exp(0.02 - 0.05 * z + 0.2 * (abs(z) - math.sqrt(2 / math.pi)) + 0.9 * math.log(h[-1]))
        assert forecast_variance(spec, nu, eps, 1, h0=1.0)[0] == pytest.approx(expected)

    def test_figarch_one_step(self):
        spec = ModelSpec.parse("FIGARCH(1,d,1)", figarch_truncation=30)
        nu = [0.1, 0.3, 0.1, 0.4]
        eps = np.random.default_rng(2).standard_normal(60)
        fc = forecast_variance(spec, nu, eps, 1, h0=1.0)
        ext = variance_path(spec, nu, np.append(eps, 0.0), h0=1.0).h
        assert fc[0] == pytest.approx(ext[-1])


def test_satisfies_constraints_vectorized():
    rows = np.array([[0.1, 0.1, 0.8], [0.1, 0.1, 0.95], [0.0, 0.1, 0.1]])
    np.testing.assert_array_equal(satisfies_constraints(GARCH11, rows), [True, False, False])
