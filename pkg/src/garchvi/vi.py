"""Fixed-form Gaussian variational inference with score-function gradients.

The variational family is ``q = N(mu, S)`` over the unconstrained parameter
vector.  Each iteration draws ``S`` samples from ``q``, evaluates

    h(theta) = log p(theta) + log p(y | theta) - log q(theta),

forms the score-function gradient of the lower bound ``E_q[h]`` and hands
it to one of four step rules:

``BBVI``
    Diagonal ``S``; Euclidean ascent on ``(mu, log var)`` with the step
    direction clipped to a maximum norm.
``QBVI``
    Diagonal ``S``; natural-gradient ascent in the natural parameters,
    which needs no Fisher matrix: ``P' = P - 2 lr g_S``,
    ``mu' = mu + lr S' g_mu`` with ``P`` the precision.
``MGVB``
    Full ``S``; ``mu' = mu + lr S g_mu`` and a retraction on the SPD
    manifold ``S' = S + xi + xi S^-1 xi / 2`` with ``xi = lr S g_S S``.
``EMGVB``
    Full ``S``; the exact natural gradient of the precision, ``-2 g_S``,
    applied through the same retraction on ``P``; then
    ``mu' = mu + lr S' g_mu``.

Momentum is an exponential moving average of the Euclidean gradient,
``m = momentum m + (1 - momentum) g``, taken before the step.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from .exceptions import CovarianceUpdateFailure, DimensionMismatch, SingularCovariance
from .models import ModelSpec, loglik_batch, ordering_tag, param_names
from .timeseries import ReturnSeries, backcast_variance
from .transforms import TransformSpec, default_start, inverse_transform_batch

LOG_2PI = float(np.log(2.0 * np.pi))
OPTIMIZERS = ("BBVI", "QBVI", "MGVB", "EMGVB")
DIAGONAL_OPTIMIZERS = ("BBVI", "QBVI")
FORMAT_VERSION = 1


# -- variational family ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VariationalParams:
    """Gaussian ``N(mu, cov)``; ``cov`` is a vector of variances when diagonal."""

    mu: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mu.ndim != 1:
            raise DimensionMismatch("mu must be a vector")
        d = mu.shape[0]
        if cov.shape not in ((d,), (d, d)):
            raise DimensionMismatch(f"cov must have shape ({d},) or ({d}, {d}), got {cov.shape}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(cov))):
            raise SingularCovariance("non-finite variational parameters")
        if cov.ndim == 1:
            if np.any(cov <= 0):
                raise SingularCovariance("variances must be positive")
            chol = np.sqrt(cov)
        else:
            cov = 0.5 * (cov + cov.T)
            try:
                chol = cholesky(cov, lower=True)
            except LinAlgError:
                raise SingularCovariance("covariance is not positive definite") from None
        for a in (mu, cov, chol):
            a.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_chol", chol)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    @property
    def diagonal(self) -> bool:
        return self.cov.ndim == 1

    @property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor, or standard deviations when diagonal."""
        return self._chol

    def cov_matrix(self) -> np.ndarray:
        return np.diag(self.cov) if self.diagonal else np.array(self.cov)

    def variances(self) -> np.ndarray:
        return np.array(self.cov) if self.diagonal else np.diag(self.cov).copy()

    def precision(self) -> np.ndarray:
        if self.diagonal:
            return 1.0 / self.cov
        return cho_solve((self._chol, True), np.eye(self.dim))

    @classmethod
    def isotropic(cls, dim: int, scale: float = 0.1, diagonal: bool = False, mu=None):
        mu = np.zeros(dim) if mu is None else np.asarray(mu, dtype=float)
        cov = np.full(dim, scale) if diagonal else scale * np.eye(dim)
        return cls(mu, cov)

    def to_dict(self) -> dict:
        if self.diagonal:
            cov = {"kind": "diag", "values": self.cov.tolist()}
        else:
            rows, cols = np.tril_indices(self.dim)
            cov = {"kind": "lower", "values": self.cov[rows, cols].tolist()}
        return {"mu": self.mu.tolist(), "cov": cov}

    @classmethod
    def from_dict(cls, data: dict) -> "VariationalParams":
        mu = np.asarray(data["mu"], dtype=float)
        vals = np.asarray(data["cov"]["values"], dtype=float)
        if data["cov"]["kind"] == "diag":
            return cls(mu, vals)
        d = mu.shape[0]
        cov = np.zeros((d, d))
        cov[np.tril_indices(d)] = vals
        cov = cov + np.tril(cov, -1).T
        return cls(mu, cov)


@dataclass(frozen=True)
class Prior:
    """Isotropic zero-mean Gaussian prior ``N(0, tau I)`` on the unconstrained vector."""

    tau: float = 1.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def logpdf(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        d = theta.shape[-1]
        return -0.5 * (d * (LOG_2PI + np.log(self.tau)) + np.sum(theta * theta, axis=-1) / self.tau)


def gaussian_log_density(theta, zeta: VariationalParams):
    """Exact ``log q(theta)``; accepts one vector or an ``(n, d)`` matrix."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != zeta.dim:
        raise DimensionMismatch(f"theta has {theta.shape[-1]} coordinates, q has {zeta.dim}")
    r = theta - zeta.mu
    if zeta.diagonal:
        quad = np.sum(r * r / zeta.cov, axis=-1)
        logdet = np.sum(np.log(zeta.cov))
    else:
        w = solve_triangular(zeta.chol, np.atleast_2d(r).T, lower=True)
        quad = np.sum(w * w, axis=0)
        quad = quad[0] if r.ndim == 1 else quad
        logdet = 2.0 * np.sum(np.log(np.diag(zeta.chol)))
    return -0.5 * (zeta.dim * LOG_2PI + logdet + quad)


def sample_posterior(zeta: VariationalParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` draws ``mu + L eta`` with ``eta`` standard normal."""
    if n < 1:
        raise ValueError("n must be positive")
    eta = rng.standard_normal((n, zeta.dim))
    if zeta.diagonal:
        return zeta.mu + eta * zeta.chol
    return zeta.mu + eta @ zeta.chol.T


# -- targets ----------------------------------------------------------------------

class ModelTarget:
    """Log-likelihood of a GARCH-family model as a function of unconstrained draws."""

    def __init__(self, spec: ModelSpec, series, h0: float | None = None, transform: TransformSpec | None = None):
        self.spec = spec
        self.transform = transform or TransformSpec(spec)
        self.eps = np.ascontiguousarray(
            series.returns if isinstance(series, ReturnSeries) else series, dtype=float
        )
        self.h0 = backcast_variance(self.eps, max(spec.n_lags, 1)) if h0 is None else float(h0)

    @property
    def dim(self) -> int:
        return self.transform.dim

    @property
    def names(self) -> list[str]:
        return param_names(self.spec)

    def loglik(self, theta) -> np.ndarray:
        theta = np.atleast_2d(theta)
        nu = inverse_transform_batch(self.transform, theta)
        return loglik_batch(self.spec, nu, self.eps, self.h0)


class GaussianTarget:
    """Quadratic stub likelihood ``const - (theta - c)' P (theta - c) / 2``.

    With a Gaussian prior the posterior is Gaussian and known exactly, which
    makes it an oracle for the optimizers.  ``precision = 0`` gives a
    constant likelihood.
    """

    def __init__(self, center, precision, const: float = 0.0):
        self.center = np.asarray(center, dtype=float)
        self.precision = np.atleast_2d(np.asarray(precision, dtype=float))
        self.const = float(const)
        self.names = [f"theta[{i + 1}]" for i in range(self.dim)]

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def loglik(self, theta) -> np.ndarray:
        r = np.atleast_2d(theta) - self.center
        return self.const - 0.5 * np.einsum("ni,ij,nj->n", r, self.precision, r)

    def posterior(self, prior: Prior) -> tuple[np.ndarray, np.ndarray]:
        """Exact posterior mean and covariance under ``prior``."""
        post_prec = self.precision + np.eye(self.dim) / prior.tau
        cov = np.linalg.inv(post_prec)
        return cov @ self.precision @ self.center, cov


def h_function(theta, zeta: VariationalParams, prior: Prior, target) -> np.ndarray:
    """``log p(theta) + log p(y | theta) - log q(theta)`` row-wise."""
    theta = np.atleast_2d(theta)
    return prior.logpdf(theta) + target.loglik(theta) - gaussian_log_density(theta, zeta)


def _draw_valid(zeta, prior, target, n, rng, max_redraws):
    """Draw ``n`` samples, redrawing rows whose h is not finite."""
    theta = sample_posterior(zeta, n, rng)
    h = h_function(theta, zeta, prior, target)
    rejected = 0
    for _ in range(max_redraws):
        bad = ~np.isfinite(h)
        if not bad.any():
            break
        rejected += int(bad.sum())
        theta[bad] = sample_posterior(zeta, int(bad.sum()), rng)
        h[bad] = h_function(theta[bad], zeta, prior, target)
    bad = ~np.isfinite(h)
    rejected += int(bad.sum())
    return theta, h, rejected, bool(bad.any())


def estimate_lb(zeta: VariationalParams, prior: Prior, target, n: int, rng, max_redraws: int = 10) -> float:
    """Monte Carlo lower bound ``mean(h(theta_s))`` over ``n`` draws from ``q``."""
    _, h, _, failed = _draw_valid(zeta, prior, target, n, rng, max_redraws)
    if failed:
        return float(np.mean(h[np.isfinite(h)])) if np.isfinite(h).any() else -np.inf
    return float(np.mean(h))


# -- gradients --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Gradient:
    """Euclidean gradient of the lower bound in ``mu`` and in the covariance.

    ``cov`` is ``dL/dvar`` per coordinate for diagonal families and the
    symmetric matrix ``dL/dS`` otherwise.
    """

    mu: np.ndarray
    cov: np.ndarray

    def scaled(self, factor: float) -> "Gradient":
        return Gradient(self.mu * factor, self.cov * factor)


def bb_gradient(zeta: VariationalParams, samples, h_values, baseline: str | None = None) -> Gradient:
    """Score-function estimate ``mean(grad log q(theta_s) * h_s)``.

    ``baseline="loo"`` subtracts from each ``h_s`` the mean of the other
    draws, which keeps the estimator unbiased and removes most of its
    variance when ``h`` carries a large common offset.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    h = np.asarray(h_values, dtype=float)
    n = samples.shape[0]
    if h.shape != (n,):
        raise DimensionMismatch("one h value per sample is required")
    if baseline == "loo" and n > 1:
        w = h - (h.sum() - h) / (n - 1)
    elif baseline in (None, "none") or n == 1:
        w = h
    else:
        raise ValueError(f"unknown baseline {baseline!r}")
    r = samples - zeta.mu
    if zeta.diagonal:
        z = r / zeta.cov
        g_mu = z.T @ w / n
        g_cov = 0.5 * (((z * z).T @ w) / n - w.mean() / zeta.cov)
        return Gradient(g_mu, g_cov)
    prec = zeta.precision()
    z = r @ prec
    g_mu = z.T @ w / n
    a = (z * w[:, None]).T @ z / n
    g_cov = 0.5 * (a - w.mean() * prec)
    return Gradient(g_mu, 0.5 * (g_cov + g_cov.T))


# -- step rules ---------------------------------------------------------------------

def _retract(base: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """``R_B(xi) = B + xi + xi B^-1 xi / 2``; stays SPD for SPD ``B``."""
    if not np.all(np.isfinite(xi)):
        raise CovarianceUpdateFailure("non-finite update direction")
    new = base + xi + 0.5 * xi @ np.linalg.solve(base, xi)
    return 0.5 * (new + new.T)


def _require_family(zeta, diagonal, name):
    if zeta.diagonal != diagonal:
        kind = "diagonal" if diagonal else "full"
        raise ValueError(f"{name} needs a {kind} covariance")


def _wrap(mu, cov) -> VariationalParams:
    try:
        return VariationalParams(mu, cov)
    except SingularCovariance as exc:
        raise CovarianceUpdateFailure(str(exc)) from None


def step_bbvi(zeta: VariationalParams, grad: Gradient, lr: float, clip: float | None = None) -> VariationalParams:
    _require_family(zeta, True, "BBVI")
    g_mu, g_lv = grad.mu, grad.cov * zeta.cov
    if clip is not None:
        norm = np.sqrt(np.sum(g_mu * g_mu) + np.sum(g_lv * g_lv))
        if norm > clip:
            g_mu, g_lv = g_mu * (clip / norm), g_lv * (clip / norm)
    return _wrap(zeta.mu + lr * g_mu, np.exp(np.log(zeta.cov) + lr * g_lv))


def step_qbvi(zeta: VariationalParams, grad: Gradient, lr: float) -> VariationalParams:
    _require_family(zeta, True, "QBVI")
    prec = 1.0 / zeta.cov - 2.0 * lr * grad.cov
    if np.any(prec <= 0) or not np.all(np.isfinite(prec)):
        raise CovarianceUpdateFailure("precision left the positive orthant")
    var = 1.0 / prec
    return _wrap(zeta.mu + lr * var * grad.mu, var)


def step_mgvb(zeta: VariationalParams, grad: Gradient, lr: float) -> VariationalParams:
    _require_family(zeta, False, "MGVB")
    cov = np.array(zeta.cov)
    xi = lr * cov @ grad.cov @ cov
    return _wrap(zeta.mu + lr * cov @ grad.mu, _retract(cov, xi))


def step_emgvb(zeta: VariationalParams, grad: Gradient, lr: float) -> VariationalParams:
    _require_family(zeta, False, "EMGVB")
    prec = zeta.precision()
    new_prec = _retract(prec, -2.0 * lr * grad.cov)
    try:
        chol = cholesky(new_prec, lower=True)
    except (LinAlgError, ValueError):
        raise CovarianceUpdateFailure("precision is not positive definite after retraction") from None
    cov = cho_solve((chol, True), np.eye(zeta.dim))
    return _wrap(zeta.mu + lr * cov @ grad.mu, cov)


STEP_RULES = {"BBVI": step_bbvi, "QBVI": step_qbvi, "MGVB": step_mgvb, "EMGVB": step_emgvb}


@dataclass
class MomentumState:
    mu: np.ndarray | None = None
    cov: np.ndarray | None = None

    def update(self, grad: Gradient, momentum: float) -> Gradient:
        """Fold ``grad`` into the moving average; an empty buffer counts as zero."""
        prev_mu = np.zeros_like(grad.mu) if self.mu is None else self.mu
        prev_cov = np.zeros_like(grad.cov) if self.cov is None else self.cov
        self.mu = momentum * prev_mu + (1.0 - momentum) * grad.mu
        self.cov = momentum * prev_cov + (1.0 - momentum) * grad.cov
        return Gradient(self.mu.copy(), self.cov.copy())


# -- fitting -----------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    """Step rule and its hyper-parameters.

    ``control_variate`` selects the leave-one-out baseline for the gradient
    (``"loo"``) or the plain estimator (``"none"``).  ``grad_clip`` caps the
    Euclidean norm of the BBVI ascent direction; without it BBVI diverges
    whenever the likelihood curvature exceeds ``2 / learning_rate``.  ``max_halvings``
    bounds how often a step that breaks positive definiteness is retried
    at half the rate.
    """

    optimizer: str = "EMGVB"
    learning_rate: float = 0.005
    n_samples: int = 50
    momentum: float = 0.4
    max_iters: int = 2500
    seed: int = 0
    mu0: tuple | None = None
    cov0_scale: float = 0.1
    n_posterior: int = 7000
    control_variate: str = "loo"
    max_redraws: int = 10
    max_halvings: int = 20
    smoothing_window: int = 100
    grad_clip: float | None = 10.0

    def __post_init__(self):
        opt = self.optimizer.upper()
        if opt not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
        object.__setattr__(self, "optimizer", opt)
        if self.mu0 is not None:
            object.__setattr__(self, "mu0", tuple(float(x) for x in self.mu0))
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.n_samples < 1 or self.max_iters < 1 or self.n_posterior < 1:
            raise ValueError("n_samples, max_iters and n_posterior must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if not self.cov0_scale > 0:
            raise ValueError("cov0_scale must be positive")

    @property
    def diagonal(self) -> bool:
        return self.optimizer in DIAGONAL_OPTIMIZERS


def moving_average(x, window: int) -> np.ndarray:
    """Trailing mean over up to ``window`` values (shorter at the start)."""
    x = np.asarray(x, dtype=float)
    c = np.cumsum(np.insert(x, 0, 0.0))
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)


@dataclass(frozen=True, eq=False)
class FitResult:
    optimizer: str
    config: OptimizerConfig
    zeta_star: VariationalParams
    lb_trace: np.ndarray
    posterior_samples: np.ndarray
    elapsed: float
    prior_tau: float = 1.0
    names: tuple = ()
    ordering: str = ""
    n_rejected: int = 0
    n_aborted: int = 0
    n_cov_failures: int = 0
    n_spd_checks: int = 0
    spd_ok: bool = True
    warnings: tuple = ()

    @property
    def lb_smoothed(self) -> np.ndarray:
        return moving_average(self.lb_trace, self.config.smoothing_window)

    @property
    def final_lb(self) -> float:
        """Mean LB over the final smoothing window."""
        return float(np.mean(self.lb_trace[-self.config.smoothing_window:]))

    @property
    def final_lb_se(self) -> float:
        tail = self.lb_trace[-self.config.smoothing_window:]
        return float(np.std(tail, ddof=1) / np.sqrt(len(tail))) if len(tail) > 1 else 0.0

    def to_dict(self, include_samples: bool = True) -> dict:
        out = {
            "format_version": FORMAT_VERSION,
            "kind": "vi_fit",
            "optimizer": self.optimizer,
            "config": asdict(self.config),
            "prior_tau": self.prior_tau,
            "seed": self.config.seed,
            "ordering": self.ordering,
            "names": list(self.names),
            "zeta": self.zeta_star.to_dict(),
            "lb_trace": self.lb_trace.tolist(),
            "elapsed": self.elapsed,
            "n_rejected": self.n_rejected,
            "n_aborted": self.n_aborted,
            "n_cov_failures": self.n_cov_failures,
            "n_spd_checks": self.n_spd_checks,
            "spd_ok": self.spd_ok,
            "warnings": list(self.warnings),
        }
        if include_samples:
            out["posterior_samples"] = self.posterior_samples.tolist()
        return out

    def to_json(self, include_samples: bool = True) -> str:
        return json.dumps(self.to_dict(include_samples))

    @classmethod
    def from_dict(cls, data: dict) -> "FitResult":
        cfg = dict(data["config"])
        zeta = VariationalParams.from_dict(data["zeta"])
        samples = data.get("posterior_samples")
        samples = np.asarray(samples, dtype=float) if samples is not None else np.empty((0, zeta.dim))
        return cls(
            optimizer=data["optimizer"],
            config=OptimizerConfig(**cfg),
            zeta_star=zeta,
            lb_trace=np.asarray(data["lb_trace"], dtype=float),
            posterior_samples=samples,
            elapsed=float(data["elapsed"]),
            prior_tau=float(data["prior_tau"]),
            names=tuple(data["names"]),
            ordering=data["ordering"],
            n_rejected=int(data["n_rejected"]),
            n_aborted=int(data["n_aborted"]),
            n_cov_failures=int(data["n_cov_failures"]),
            n_spd_checks=int(data["n_spd_checks"]),
            spd_ok=bool(data["spd_ok"]),
            warnings=tuple(data["warnings"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "FitResult":
        return cls.from_dict(json.loads(text))


def fit_target(target, prior: Prior, cfg: OptimizerConfig, ordering: str = "") -> FitResult:
    """Run the VI loop for exactly ``cfg.max_iters`` iterations against ``target``.

    ``target`` needs a ``dim`` attribute and a vectorized ``loglik(theta)``.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    d = target.dim
    if cfg.mu0 is not None:
        mu0 = np.asarray(cfg.mu0, dtype=float)
    else:
        mu0 = default_start(target.transform) if hasattr(target, "transform") else np.zeros(d)
    if mu0.shape != (d,):
        raise DimensionMismatch(f"mu0 has {mu0.shape[0]} entries, the target has {d}")
    zeta = VariationalParams.isotropic(d, cfg.cov0_scale, cfg.diagonal, mu0)
    step = STEP_RULES[cfg.optimizer]
    state = MomentumState()
    baseline = None if cfg.control_variate == "none" else cfg.control_variate
    lb = np.empty(cfg.max_iters)
    n_rejected = n_aborted = n_cov_failures = n_checks = 0
    spd_ok = True
    last_lb = -np.inf
    for it in range(cfg.max_iters):
        theta, h, rejected, failed = _draw_valid(zeta, prior, target, cfg.n_samples, rng, cfg.max_redraws)
        n_rejected += rejected
        if failed:
            n_aborted += 1
            lb[it] = last_lb
            continue
        last_lb = lb[it] = float(np.mean(h))
        grad = state.update(bb_gradient(zeta, theta, h, baseline), cfg.momentum)
        lr = cfg.learning_rate
        for _ in range(cfg.max_halvings + 1):
            try:
                if cfg.optimizer == "BBVI":
                    new = step(zeta, grad, lr, cfg.grad_clip)
                else:
                    new = step(zeta, grad, lr)
            except CovarianceUpdateFailure:
                n_cov_failures += 1
                lr *= 0.5
                continue
            if not new.diagonal:
                n_checks += 1
                spd_ok &= bool(np.all(np.diag(new.chol) > 0))
            zeta = new
            break
    samples = sample_posterior(zeta, cfg.n_posterior, rng)
    notes = []
    total = cfg.max_iters * cfg.n_samples
    if n_rejected > 0.01 * total:
        notes.append(f"{n_rejected} of {total} draws had a non-finite likelihood")
    if n_aborted:
        notes.append(f"{n_aborted} iterations skipped after repeated non-finite draws")
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return FitResult(
        optimizer=cfg.optimizer,
        config=cfg,
        zeta_star=zeta,
        lb_trace=lb,
        posterior_samples=samples,
        elapsed=time.perf_counter() - start,
        prior_tau=prior.tau,
        names=tuple(getattr(target, "names", ())),
        ordering=ordering,
        n_rejected=n_rejected,
        n_aborted=n_aborted,
        n_cov_failures=n_cov_failures,
        n_spd_checks=n_checks,
        spd_ok=spd_ok,
        warnings=tuple(notes),
    )


def fit(spec: ModelSpec, train, prior: Prior | None = None, cfg: OptimizerConfig | None = None,
        h0: float | None = None, transform: TransformSpec | None = None) -> FitResult:
    """Variational posterior for ``spec`` on the training returns."""
    prior = prior or Prior()
    cfg = cfg or OptimizerConfig()
    target = ModelTarget(spec, train, h0, transform)
    return fit_target(target, prior, cfg, ordering_tag(spec))


def with_optimizer(cfg: OptimizerConfig, optimizer: str, **changes) -> OptimizerConfig:
    return replace(cfg, optimizer=optimizer, **changes)
