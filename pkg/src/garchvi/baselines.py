"""Frequentist and sampling baselines on the unconstrained parameter space.

``fit_qml`` minimizes the Gaussian quasi-likelihood objective composed with
the inverse transform, so every iterate is a valid model.  ``fit_mh`` runs a
random-walk Metropolis-Hastings chain on the same space with the same prior
the variational fits use.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .exceptions import NonFiniteEvaluation
from .models import (ConstrainedParams, ModelSpec, loglik_batch, ordering_tag,
                     param_names, qml_objective)
from .timeseries import ReturnSeries, backcast_variance
from .transforms import TransformSpec, default_start, inverse_transform, inverse_transform_batch
from .vi import FORMAT_VERSION, ModelTarget, Prior

LOG_2PI = float(np.log(2.0 * np.pi))


def numerical_gradient(f, theta, eps: float = 1e-5) -> np.ndarray:
    """Central differences ``(f(x + eps e_i) - f(x - eps e_i)) / (2 eps)``.

    Raises
    ------
    NonFiniteEvaluation
        If ``f`` is not finite at any of the probe points.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    grad = np.empty_like(theta)
    for i in range(theta.shape[0]):
        step = np.zeros_like(theta)
        step[i] = eps
        hi, lo = f(theta + step), f(theta - step)
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise NonFiniteEvaluation(f"objective is not finite around coordinate {i}")
        grad[i] = (hi - lo) / (2.0 * eps)
    return grad


# -- QML ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QmlConfig:
    """``tol`` bounds the gradient infinity-norm of the per-observation objective."""

    max_iters: int = 5000
    tol: float = 1e-6
    eps: float = 1e-6
    n_starts: int = 1
    seed: int = 0


@dataclass(frozen=True, eq=False)
class QmlResult:
    spec: ModelSpec
    nu_star: ConstrainedParams
    theta_star: np.ndarray
    objective: float
    converged: bool
    iterations: int
    loglik: float
    grad_norm: float
    trace: tuple = ()
    elapsed: float = 0.0

    @property
    def nu_vector(self) -> np.ndarray:
        return self.nu_star.to_vector(self.spec)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "qml_fit",
            "model": self.spec.label,
            "ordering": ordering_tag(self.spec),
            "names": param_names(self.spec),
            "theta_star": self.theta_star.tolist(),
            "nu_star": self.nu_vector.tolist(),
            "objective": self.objective,
            "loglik": self.loglik,
            "converged": self.converged,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "trace": list(self.trace),
            "elapsed": self.elapsed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class _Objective:
    """Batched per-observation objective ``-loglik / T`` on unconstrained vectors.

    With Normal innovations this is ``(qml + T log 2 pi) / (2 T)``, so it
    has the same minimizer as the quasi-likelihood.
    """

    def __init__(self, spec, eps_returns, h0, tspec):
        self.spec, self.eps, self.h0, self.tspec = spec, eps_returns, h0, tspec
        self.T = len(eps_returns)

    def batch(self, theta):
        nu = inverse_transform_batch(self.tspec, np.atleast_2d(theta))
        return -loglik_batch(self.spec, nu, self.eps, self.h0) / self.T

    def value(self, theta):
        v = self.batch(theta)[0]
        return v if np.isfinite(v) else 1e100

    def grad(self, theta, rel_eps):
        d = theta.shape[0]
        h = rel_eps * np.maximum(1.0, np.abs(theta))
        probes = np.repeat(theta[None, :], 2 * d, axis=0)
        probes[np.arange(d), np.arange(d)] += h
        probes[d + np.arange(d), np.arange(d)] -= h
        vals = self.batch(probes)
        g = (vals[:d] - vals[d:]) / (2.0 * h)
        return np.where(np.isfinite(g), g, 0.0)


def fit_qml(spec: ModelSpec, train, cfg: QmlConfig | None = None, theta0=None,
            h0: float | None = None, transform: TransformSpec | None = None) -> QmlResult:
    """Quasi-maximum-likelihood fit by BFGS on ``objective(inverse_transform(theta))``.

    With non-Normal innovations the full likelihood is maximized instead,
    since the shape parameters do not enter the Gaussian objective.

    Raises
    ------
    NonFiniteEvaluation
        If the objective is not finite at the starting point.
    """
    cfg = cfg or QmlConfig()
    start = time.perf_counter()
    tspec = transform or TransformSpec(spec)
    eps = np.ascontiguousarray(train.returns if isinstance(train, ReturnSeries) else train, dtype=float)
    h0 = backcast_variance(eps, max(spec.n_lags, 1)) if h0 is None else float(h0)
    obj = _Objective(spec, eps, h0, tspec)
    d = tspec.dim
    rng = np.random.default_rng(cfg.seed)
    starts = [default_start(tspec) if theta0 is None else np.asarray(theta0, dtype=float)]
    starts += [rng.standard_normal(d) for _ in range(cfg.n_starts - 1)]
    if not np.isfinite(obj.batch(starts[0])[0]):
        raise NonFiniteEvaluation("QML objective is not finite at the starting point")
    best = None
    for x0 in starts:
        trace = [obj.value(x0)]
        res = minimize(
            obj.value, x0, jac=lambda th: obj.grad(th, cfg.eps), method="BFGS",
            callback=lambda xk: trace.append(obj.value(xk)),
            options={"maxiter": cfg.max_iters, "gtol": cfg.tol},
        )
        if best is None or res.fun < best[0].fun:
            best = (res, trace)
    res, trace = best
    theta = np.asarray(res.x, dtype=float)
    gnorm = float(np.max(np.abs(obj.grad(theta, cfg.eps))))
    nu = inverse_transform(tspec, theta)
    ll = -obj.batch(theta)[0] * obj.T
    return QmlResult(
        spec=spec,
        nu_star=nu,
        theta_star=theta,
        objective=qml_objective(spec, nu, eps, h0),
        converged=bool(gnorm <= cfg.tol or res.success),
        iterations=int(res.nit),
        loglik=float(ll),
        grad_norm=gnorm,
        trace=tuple(float(t * obj.T) for t in trace),
        elapsed=time.perf_counter() - start,
    )


# -- Metropolis-Hastings --------------------------------------------------------------

@dataclass(frozen=True)
class MHConfig:
    """Random-walk MH settings.

    The proposal is ``N(theta, scale^2 I)``.  During the first
    ``n_total - n_keep`` steps (or ``adapt_window`` if given) the log-scale
    follows a Robbins-Monro recursion toward ``target_accept``; it is frozen
    afterwards so the kept draws come from a fixed kernel.
    """

    n_total: int = 30000
    n_keep: int = 7000
    proposal_scale: float = 0.1
    adapt: bool = True
    adapt_window: int | None = None
    target_accept: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n_keep < 1 or self.n_total < self.n_keep:
            raise ValueError("need 1 <= n_keep <= n_total")
        if not self.proposal_scale > 0:
            raise ValueError("proposal_scale must be positive")


@dataclass(frozen=True, eq=False)
class Chain:
    draws: np.ndarray
    log_posts: np.ndarray
    acceptance_rate: float
    burn_acceptance_rate: float
    final_scale: float
    config: MHConfig
    names: tuple = ()
    ordering: str = ""
    prior_tau: float = 1.0
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "mh_chain",
            "config": asdict(self.config),
            "seed": self.config.seed,
            "ordering": self.ordering,
            "names": list(self.names),
            "prior_tau": self.prior_tau,
            "acceptance_rate": self.acceptance_rate,
            "burn_acceptance_rate": self.burn_acceptance_rate,
            "final_scale": self.final_scale,
            "draws": self.draws.tolist(),
            "log_posts": self.log_posts.tolist(),
            "elapsed": self.elapsed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Chain":
        return cls(
            draws=np.asarray(data["draws"], dtype=float),
            log_posts=np.asarray(data["log_posts"], dtype=float),
            acceptance_rate=float(data["acceptance_rate"]),
            burn_acceptance_rate=float(data["burn_acceptance_rate"]),
            final_scale=float(data["final_scale"]),
            config=MHConfig(**data["config"]),
            names=tuple(data["names"]),
            ordering=data["ordering"],
            prior_tau=float(data["prior_tau"]),
            elapsed=float(data["elapsed"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "Chain":
        return cls.from_dict(json.loads(text))


def mh_accept(log_post_current: float, log_post_proposed: float, u: float) -> bool:
    """Symmetric-proposal acceptance: accept when ``log u < proposed - current``."""
    if not np.isfinite(log_post_proposed):
        return False
    return bool(np.log(u) < log_post_proposed - log_post_current)


def fit_mh_target(target, prior: Prior, cfg: MHConfig | None = None, theta0=None, ordering: str = "") -> Chain:
    """Random-walk MH on ``log p(theta) + target.loglik(theta)``."""
    cfg = cfg or MHConfig()
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    d = target.dim

    def log_post(th):
        v = prior.logpdf(th) + target.loglik(th[None, :])[0]
        return float(v) if np.isfinite(v) else -np.inf

    theta = np.zeros(d) if theta0 is None else np.asarray(theta0, dtype=float).copy()
    lp = log_post(theta)
    if not np.isfinite(lp):
        raise NonFiniteEvaluation("log-posterior is not finite at the starting point")
    n_burn = cfg.n_total - cfg.n_keep
    adapt_until = n_burn if cfg.adapt_window is None else min(cfg.adapt_window, n_burn)
    log_scale = np.log(cfg.proposal_scale)
    draws = np.empty((cfg.n_keep, d))
    log_posts = np.empty(cfg.n_keep)
    acc_burn = acc_keep = 0
    steps = rng.standard_normal((cfg.n_total, d))
    uniforms = rng.random(cfg.n_total)
    for it in range(cfg.n_total):
        prop = theta + np.exp(log_scale) * steps[it]
        lp_prop = log_post(prop)
        accepted = mh_accept(lp, lp_prop, uniforms[it])
        if accepted:
            theta, lp = prop, lp_prop
        if it < n_burn:
            acc_burn += accepted
            if cfg.adapt and it < adapt_until:
                log_scale += (float(accepted) - cfg.target_accept) / (it + 1) ** 0.6
        else:
            k = it - n_burn
            acc_keep += accepted
            draws[k] = theta
            log_posts[k] = lp
    return Chain(
        draws=draws,
        log_posts=log_posts,
        acceptance_rate=acc_keep / cfg.n_keep,
        burn_acceptance_rate=acc_burn / n_burn if n_burn else float("nan"),
        final_scale=float(np.exp(log_scale)),
        config=cfg,
        names=tuple(getattr(target, "names", ())),
        ordering=ordering,
        prior_tau=prior.tau,
        elapsed=time.perf_counter() - start,
    )


def fit_mh(spec: ModelSpec, train, prior: Prior | None = None, cfg: MHConfig | None = None,
           theta0=None, h0: float | None = None, transform: TransformSpec | None = None) -> Chain:
    """Posterior draws for ``spec`` on the training returns; the last ``n_keep`` are returned."""
    target = ModelTarget(spec, train, h0, transform)
    if theta0 is None:
        theta0 = default_start(target.transform)
    return fit_mh_target(target, prior or Prior(), cfg, theta0, ordering_tag(spec))
