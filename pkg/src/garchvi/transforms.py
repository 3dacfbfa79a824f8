"""Bijections between the constrained parameter set of a model and R^d.

Every optimizer and sampler in the package works on the unconstrained
vector ``theta``; the likelihood is evaluated at ``inverse_transform(theta)``.

GARCH-type models use a budget cascade.  A running budget ``s`` starts at
one and every coefficient takes a logistic share of what is left::

    alpha_j = f(theta) * s                       s -= alpha_j
    gamma_j = f(theta) * (2 s + alpha_j) - alpha_j   s -= gamma_j / 2
    beta_j  = f(theta) * s                       s -= beta_j

so ``alpha_j >= 0``, ``alpha_j + gamma_j >= 0``, ``beta_j >= 0`` and the
persistence ``sum(alpha + gamma / 2 + beta)`` stays below one.  At
GJR-GARCH(1, 1, 1) this is exactly ``gamma = f (2 (1 - alpha) + alpha) - alpha``
and ``beta = f (1 - alpha - gamma / 2)``; without gamma it is the GARCH rule
``beta = f (1 - alpha)``.

FIGARCH uses ``d = f``, ``phi = f (1 - d) / 2`` and ``beta = f (phi + d)``.
EGARCH coefficients are unconstrained and map through the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from .exceptions import BoundaryValue, ConstraintViolation, DimensionMismatch
from .models import ConstrainedParams, ModelSpec, param_names, parameter_count, split_columns

CLAMP = 1e-12
T_PEDESTAL = 1e-4


def logistic(x):
    """``1 / (1 + exp(-x))`` kept inside ``[1e-12, 1 - 1e-12]``."""
    return np.clip(expit(x), CLAMP, 1.0 - CLAMP)


@dataclass(frozen=True)
class TransformSpec:
    """Model plus the transform options; fixes the parameter ordering.

    ``ged_pedestal`` switches the GED shape map from ``exp(theta)`` to
    ``2 + theta^2 + pedestal``, which forces lambda above two.
    """

    spec: ModelSpec
    pedestal: float = T_PEDESTAL
    ged_pedestal: bool = False

    @property
    def ordering(self) -> tuple:
        return tuple(param_names(self.spec))

    @property
    def dim(self) -> int:
        return parameter_count(self.spec)


def _tspec(obj) -> TransformSpec:
    return obj if isinstance(obj, TransformSpec) else TransformSpec(obj)


def dist_shape_inverse(kind: str, theta_shape, pedestal: float = T_PEDESTAL, ged_pedestal: bool = False):
    """Map unconstrained shape values to valid innovation shapes.

    ``theta_shape`` has the shape values in its last axis.
    """
    th = np.asarray(theta_shape, dtype=float)
    out = np.empty_like(th)
    if kind in ("StudentT", "SkewT"):
        out[..., 0] = 2.0 + th[..., 0] ** 2 + pedestal
    if kind == "SkewT":
        out[..., 1] = 2.0 * logistic(th[..., 1]) - 1.0
    if kind == "GED":
        out[..., 0] = 2.0 + th[..., 0] ** 2 + pedestal if ged_pedestal else np.exp(th[..., 0])
    return out


def dist_shape_forward(kind: str, shape, pedestal: float = T_PEDESTAL, ged_pedestal: bool = False):
    """Inverse of :func:`dist_shape_inverse` on the non-negative branch of the squared maps."""
    sh = np.asarray(shape, dtype=float)
    out = np.empty_like(sh)

    def sqrt_part(v):
        excess = v - 2.0 - pedestal
        if np.any(excess < 0):
            raise BoundaryValue(f"shape {v} is not above 2 + pedestal")
        return np.sqrt(excess)

    if kind in ("StudentT", "SkewT"):
        out[..., 0] = sqrt_part(sh[..., 0])
    if kind == "SkewT":
        out[..., 1] = _logit_checked((sh[..., 1] + 1.0) / 2.0, "skew")
    if kind == "GED":
        if ged_pedestal:
            out[..., 0] = sqrt_part(sh[..., 0])
        else:
            if np.any(sh[..., 0] <= 0):
                raise BoundaryValue("GED shape must be positive")
            out[..., 0] = np.log(sh[..., 0])
    return out


def _logit_checked(u, what: str):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0) or np.any(u > 1):
        raise ConstraintViolation(f"{what} lies outside its admissible interval")
    if np.any(u == 0) or np.any(u == 1):
        raise BoundaryValue(f"{what} sits on the boundary of its interval")
    return logit(u)


DEFAULT_SHAPE = {"StudentT": (8.0,), "SkewT": (8.0, 0.0), "GED": (2.0,)}


def default_start(tspec) -> np.ndarray:
    """Zero vector except for the shape coordinates, which start at a moderate tail.

    ``theta = 0`` maps Student-t degrees of freedom to ``2 + pedestal``,
    where the likelihood has a degenerate ridge, so the shapes start at
    ``nu = 8`` (``lambda = 2`` for GED) instead.
    """
    ts = _tspec(tspec)
    theta = np.zeros(ts.dim)
    kind = ts.spec.innovation.kind
    if kind in DEFAULT_SHAPE:
        shape = np.array(DEFAULT_SHAPE[kind])
        if kind == "GED" and ts.ged_pedestal:
            shape = np.array([8.0])
        theta[ts.dim - len(shape):] = dist_shape_forward(kind, shape, ts.pedestal, ts.ged_pedestal)
    return theta


def inverse_transform_batch(tspec, theta: np.ndarray) -> np.ndarray:
    """Row-wise inverse transform of an ``(n, d)`` matrix into constrained vectors."""
    ts = _tspec(tspec)
    spec = ts.spec
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    if theta.shape[1] != ts.dim:
        raise DimensionMismatch(f"{spec.label} has {ts.dim} parameters, theta has {theta.shape[1]}")
    nu = np.empty_like(theta)
    c = split_columns(spec, theta)
    out = split_columns(spec, nu)
    if spec.is_egarch:
        for key in ("omega", "alpha", "gamma", "psi", "beta"):
            out[key][:] = c[key]
    elif spec.family == "FIGARCH":
        out["omega"][:] = np.exp(c["omega"])
        d = logistic(c["d"][:, 0])
        out["d"][:, 0] = d
        phi = logistic(c["phi"][:, 0]) * (1.0 - d) / 2.0 if spec.p else np.zeros(len(theta))
        if spec.p:
            out["phi"][:, 0] = phi
        if spec.q:
            out["beta"][:, 0] = logistic(c["beta"][:, 0]) * (phi + d)
    else:
        out["omega"][:] = np.exp(c["omega"])
        s = np.ones(len(theta))
        alpha = np.zeros((len(theta), spec.q))
        for j in range(spec.q):
            alpha[:, j] = logistic(c["alpha"][:, j]) * s
            s = s - alpha[:, j]
        out["alpha"][:] = alpha
        for j in range(spec.o):
            u = logistic(c["gamma"][:, j])
            if j < spec.q:
                g = u * (2.0 * s + alpha[:, j]) - alpha[:, j]
            else:
                g = u * 2.0 * s
            out["gamma"][:, j] = g
            s = s - 0.5 * g
        for j in range(spec.p):
            b = logistic(c["beta"][:, j]) * s
            out["beta"][:, j] = b
            s = s - b
    if spec.innovation.n_shape:
        out["shape"][:] = dist_shape_inverse(
            spec.innovation.kind, c["shape"], ts.pedestal, ts.ged_pedestal
        )
    return nu


def inverse_transform(tspec, theta) -> ConstrainedParams:
    """Constrained parameters for one unconstrained vector."""
    ts = _tspec(tspec)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1:
        raise DimensionMismatch("theta must be a vector; use inverse_transform_batch for matrices")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    return ConstrainedParams.from_vector(ts.spec, inverse_transform_batch(ts, theta)[0])


def forward_transform(tspec, nu) -> np.ndarray:
    """Unconstrained vector whose inverse transform is ``nu``.

    Raises
    ------
    BoundaryValue
        If a constraint holds with equality, where the logit is undefined.
    ConstraintViolation
        If ``nu`` lies outside the constraint set.
    """
    ts = _tspec(tspec)
    spec = ts.spec
    vec = nu.to_vector(spec) if isinstance(nu, ConstrainedParams) else np.asarray(nu, dtype=float)
    if vec.shape != (ts.dim,):
        raise DimensionMismatch(f"{spec.label} has {ts.dim} parameters, got shape {vec.shape}")
    theta = np.empty(ts.dim)
    c = split_columns(spec, vec[None, :])
    out = split_columns(spec, theta[None, :])
    if spec.is_egarch:
        theta[:] = vec
    else:
        omega = c["omega"][0, 0]
        if omega < 0:
            raise ConstraintViolation("omega must be positive")
        if omega == 0:
            raise BoundaryValue("omega = 0 is on the boundary")
        out["omega"][0, 0] = np.log(omega)
        if spec.family == "FIGARCH":
            d = c["d"][0, 0]
            out["d"][0, 0] = _logit_checked(d, "d")
            phi = c["phi"][0, 0] if spec.p else 0.0
            if spec.p:
                out["phi"][0, 0] = _logit_checked(phi / ((1.0 - d) / 2.0), "phi")
            if spec.q:
                out["beta"][0, 0] = _logit_checked(c["beta"][0, 0] / (phi + d), "beta")
        else:
            s = 1.0
            alpha = c["alpha"][0]
            for j in range(spec.q):
                out["alpha"][0, j] = _logit_checked(alpha[j] / s, f"alpha[{j + 1}]")
                s -= alpha[j]
            for j in range(spec.o):
                g = c["gamma"][0, j]
                if j < spec.q:
                    u = (g + alpha[j]) / (2.0 * s + alpha[j])
                else:
                    u = g / (2.0 * s)
                out["gamma"][0, j] = _logit_checked(u, f"gamma[{j + 1}]")
                s -= 0.5 * g
            for j in range(spec.p):
                b = c["beta"][0, j]
                out["beta"][0, j] = _logit_checked(b / s, f"beta[{j + 1}]")
                s -= b
    if spec.innovation.n_shape:
        out["shape"][0] = dist_shape_forward(
            spec.innovation.kind, c["shape"][0], ts.pedestal, ts.ged_pedestal
        )
    return theta
