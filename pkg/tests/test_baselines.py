import math

import numpy as np
import pytest
from scipy.optimize import minimize

from garchvi.baselines import (Chain, MHConfig, QmlConfig, fit_mh, fit_mh_target, fit_qml,
                               mh_accept, numerical_gradient)
from garchvi.exceptions import NonFiniteEvaluation
from garchvi.models import ModelSpec, qml_objective, simulate
from garchvi.timeseries import split_train_test
from garchvi.vi import GaussianTarget, Prior

GARCH11 = ModelSpec.parse("GARCH(1,1)")


@pytest.fixture(scope="module")
def garch_train():
    return split_train_test(simulate(GARCH11, [0.1, 0.1, 0.8], 5000, seed=0), 0.75)[0]


class TestNumericalGradient:
    def test_quadratic(self):
        assert numerical_gradient(lambda t: float(t[0] ** 2), [3.0])[0] == pytest.approx(6.0, abs=1e-6)

    def test_constant(self):
        np.testing.assert_array_equal(numerical_gradient(lambda t: 4.0, np.ones(3)), np.zeros(3))

    def test_sin(self):
        assert numerical_gradient(lambda t: math.sin(t[0]), [0.0])[0] == pytest.approx(1.0, abs=1e-8)

    def test_non_finite(self):
        with pytest.raises(NonFiniteEvaluation):
            numerical_gradient(lambda t: math.log(t[0]) if t[0] > 0 else float("nan"), [0.0])


class TestQml:
    def test_recovers_truth(self, garch_train):
        res = fit_qml(GARCH11, garch_train)
        assert res.converged
        np.testing.assert_allclose(res.nu_vector, [0.1, 0.1, 0.8], atol=0.05)

    def test_trace_monotone(self, garch_train):
        trace = np.array(fit_qml(GARCH11, garch_train).trace)
        assert np.all(np.diff(trace) <= 1e-9 * np.abs(trace[:-1]))

    def test_matches_constrained_optimizer(self, garch_train):
        # independent oracle: a bounded optimizer on the constrained space directly
        eps = garch_train.returns
        res = fit_qml(GARCH11, garch_train)

        def obj(x):
            if x[1] + x[2] >= 1:
                return 1e10
            return qml_objective(GARCH11, x, eps) / len(eps)

        ref = minimize(obj, [0.2, 0.05, 0.7], method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 20000})
        np.testing.assert_allclose(res.nu_vector, ref.x, atol=2e-3)
        assert res.objective <= ref.fun * len(eps) + 1e-6

    def test_arch_boundary(self):
        series = simulate(ModelSpec.parse("ARCH(1)"), [1.0, 0.0], 3000, seed=2)
        res = fit_qml(ModelSpec.parse("ARCH(1)"), series)
        assert res.nu_star.alpha[0] <= 0.05

    def test_student_t_recovers_shape(self):
        spec = ModelSpec.parse("GARCH(1,1)", "StudentT")
        series = simulate(spec, [0.1, 0.1, 0.8, 6.0], 6000, seed=1)
        res = fit_qml(spec, series)
        assert 4.0 < res.nu_vector[3] < 10.0

    def test_serializes(self, garch_train):
        res = fit_qml(GARCH11, garch_train, QmlConfig(max_iters=3))
        d = res.to_dict()
        assert d["kind"] == "qml_fit" and len(d["nu_star"]) == 3

    def test_non_finite_start(self):
        with pytest.raises(NonFiniteEvaluation):
            fit_qml(GARCH11, np.array([1.0, np.inf, 2.0]))


class TestMH:
    def test_accept_rule(self):
        assert mh_accept(-5.0, -4.0, 0.999999)
        assert not mh_accept(-5.0, -np.inf, 1e-12)
        assert mh_accept(-5.0, -5.5, 0.5)  # log 0.5 < -0.5
        assert not mh_accept(-5.0, -6.0, 0.5)

    def test_standard_gaussian_target(self):
        cfg = MHConfig(n_total=70_000, n_keep=50_000, proposal_scale=1.0, seed=0)
        chain = fit_mh_target(GaussianTarget(np.zeros(3), 0.0), Prior(1.0), cfg)
        np.testing.assert_allclose(chain.draws.mean(axis=0), 0.0, atol=0.05)
        np.testing.assert_allclose(chain.draws.var(axis=0), 1.0, rtol=0.10)

    def test_tiny_scale_barely_moves(self):
        cfg = MHConfig(n_total=2000, n_keep=1000, proposal_scale=1e-6, adapt=False, seed=1)
        chain = fit_mh_target(GaussianTarget(np.zeros(2), 0.0), Prior(1.0), cfg)
        assert chain.acceptance_rate > 0.99
        assert np.var(np.diff(chain.draws, axis=0)) < 1e-10

    def test_adaptation_targets_rate(self):
        cfg = MHConfig(n_total=20_000, n_keep=5000, proposal_scale=5.0, seed=2)
        chain = fit_mh_target(GaussianTarget(np.zeros(3), np.eye(3) * 4), Prior(1.0), cfg)
        assert 0.2 < chain.acceptance_rate < 0.4

    def test_deterministic_and_round_trip(self):
        cfg = MHConfig(n_total=300, n_keep=100, seed=4)
        a = fit_mh_target(GaussianTarget(np.zeros(2), 0.0), Prior(), cfg)
        b = fit_mh_target(GaussianTarget(np.zeros(2), 0.0), Prior(), cfg)
        np.testing.assert_array_equal(a.draws, b.draws)
        back = Chain.from_json(a.to_json())
        np.testing.assert_array_equal(back.draws, a.draws)
        assert back.config == a.config

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MHConfig(n_total=10, n_keep=20)
        with pytest.raises(ValueError):
            MHConfig(proposal_scale=0.0)

    def test_garch_chain_near_qml(self, garch_train):
        chain = fit_mh(GARCH11, garch_train, cfg=MHConfig(n_total=8000, n_keep=3000, seed=0))
        qml = fit_qml(GARCH11, garch_train)
        theta_mean = chain.draws.mean(axis=0)
        theta_sd = chain.draws.std(axis=0)
        assert np.all(np.abs(theta_mean - qml.theta_star) < 4 * theta_sd)
