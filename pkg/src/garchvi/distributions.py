"""Standardized (zero mean, unit variance) innovation densities.

Shape parameters are passed as arrays so a whole batch of parameter draws
can be evaluated against a ``(n, T)`` block of standardized residuals in one
call; shapes broadcast against ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .exceptions import ShapeViolation

LOG_2PI = float(np.log(2.0 * np.pi))

KINDS = ("Normal", "StudentT", "GED", "SkewT")
SHAPE_NAMES = {"Normal": (), "StudentT": ("nu",), "GED": ("lam",), "SkewT": ("nu", "lam")}
_ALIASES = {
    "normal": "Normal", "gaussian": "Normal", "n": "Normal",
    "studentt": "StudentT", "student-t": "StudentT", "t": "StudentT", "student": "StudentT",
    "ged": "GED",
    "skewt": "SkewT", "skew-t": "SkewT", "skewstudent": "SkewT",
}


def canonical_kind(kind: str) -> str:
    key = kind.replace("_", "").lower()
    if kind in KINDS:
        return kind
    if key in _ALIASES:
        return _ALIASES[key]
    raise ValueError(f"unknown innovation distribution {kind!r}")


@dataclass(frozen=True)
class InnovationDist:
    """Innovation family plus (optional) fixed shape values.

    When the distribution is estimated, the shape values live in the model
    parameter vector instead and ``shape`` here is only a default.
    """

    kind: str = "Normal"
    shape: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if self.shape:
            object.__setattr__(self, "shape", tuple(float(s) for s in self.shape))
            check_shape(self.kind, *self.shape)

    @property
    def n_shape(self) -> int:
        return len(SHAPE_NAMES[self.kind])

    @property
    def shape_names(self) -> tuple:
        return SHAPE_NAMES[self.kind]


def check_shape(kind: str, *shape) -> None:
    names = SHAPE_NAMES[kind]
    if len(shape) != len(names):
        raise ShapeViolation(f"{kind} takes {len(names)} shape parameters, got {len(shape)}")
    if kind in ("StudentT", "SkewT") and np.any(np.asarray(shape[0]) <= 2.0):
        raise ShapeViolation("degrees of freedom must exceed 2")
    if kind == "GED" and np.any(np.asarray(shape[0]) <= 0.0):
        raise ShapeViolation("GED shape must be positive")
    if kind == "SkewT" and np.any(np.abs(np.asarray(shape[1])) >= 1.0):
        raise ShapeViolation("skew parameter must lie in (-1, 1)")


def _t_logc(nu):
    return gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * np.log(np.pi * (nu - 2))


def _ged_logb(lam):
    return 0.5 * (-2.0 / lam * np.log(2.0) + gammaln(1.0 / lam) - gammaln(3.0 / lam))


def _skewt_ab(nu, lam):
    c = np.exp(_t_logc(nu))
    a = 4.0 * lam * c * (nu - 2) / (nu - 1)
    b = np.sqrt(1.0 + 3.0 * lam**2 - a**2)
    return a, b, c


def logpdf(kind: str, z, *shape):
    """Log-density of the standardized innovation at ``z``."""
    kind = canonical_kind(kind)
    check_shape(kind, *shape)
    z = np.asarray(z, dtype=float)
    if kind == "Normal":
        return -0.5 * (LOG_2PI + z * z)
    if kind == "StudentT":
        nu = np.asarray(shape[0], dtype=float)
        return _t_logc(nu) - 0.5 * (nu + 1) * np.log1p(z * z / (nu - 2))
    if kind == "GED":
        lam = np.asarray(shape[0], dtype=float)
        logb = _ged_logb(lam)
        return (
            np.log(lam) - 0.5 * np.abs(z / np.exp(logb)) ** lam
            - logb - (1.0 + 1.0 / lam) * np.log(2.0) - gammaln(1.0 / lam)
        )
    nu = np.asarray(shape[0], dtype=float)
    lam = np.asarray(shape[1], dtype=float)
    a, b, c = _skewt_ab(nu, lam)
    u = b * z + a
    side = np.where(z < -a / b, 1.0 - lam, 1.0 + lam)
    return np.log(b) + np.log(c) - 0.5 * (nu + 1) * np.log1p((u / side) ** 2 / (nu - 2))


def sample(kind: str, rng: np.random.Generator, size, *shape) -> np.ndarray:
    """Draw standardized innovations (scalar shapes only)."""
    kind = canonical_kind(kind)
    check_shape(kind, *shape)
    if kind == "Normal":
        return rng.standard_normal(size)
    if kind == "StudentT":
        nu = float(shape[0])
        return rng.standard_t(nu, size) * np.sqrt((nu - 2) / nu)
    if kind == "GED":
        lam = float(shape[0])
        # |x|^lam ~ Gamma(1/lam) gives density prop. to exp(-|x|^lam)
        mag = rng.gamma(1.0 / lam, 1.0, size) ** (1.0 / lam)
        sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        scale = np.exp(0.5 * (gammaln(1.0 / lam) - gammaln(3.0 / lam)))
        return sign * mag * scale
    nu, lam = float(shape[0]), float(shape[1])
    a, b, _ = _skewt_ab(nu, lam)
    x = np.abs(rng.standard_t(nu, size)) * np.sqrt((nu - 2) / nu)
    neg = rng.random(size) < (1.0 - lam) / 2.0
    u = np.where(neg, -(1.0 - lam) * x, (1.0 + lam) * x)
    return (u - a) / b


@lru_cache(maxsize=4096)
def _quad_moment(kind: str, shape: tuple, which: str) -> float:
    f = {
        "abs": lambda z: abs(z),
        "pos": lambda z: max(z, 0.0),
        "pos2": lambda z: z * z if z > 0 else 0.0,
    }[which]

    def integrand(z):
        return f(z) * np.exp(logpdf(kind, z, *shape))

    lo, _ = integrate.quad(integrand, -np.inf, 0.0, limit=200)
    hi, _ = integrate.quad(integrand, 0.0, np.inf, limit=200)
    return lo + hi


def mean_abs(kind: str, *shape):
    """E|z|; closed form except for the skewed t."""
    kind = canonical_kind(kind)
    check_shape(kind, *shape)
    if kind == "Normal":
        return np.sqrt(2.0 / np.pi)
    if kind == "StudentT":
        nu = np.asarray(shape[0], dtype=float)
        return np.exp(
            np.log(2.0) + 0.5 * np.log(nu - 2) + gammaln((nu + 1) / 2)
            - 0.5 * np.log(np.pi) - np.log(nu - 1) - gammaln(nu / 2)
        )
    if kind == "GED":
        lam = np.asarray(shape[0], dtype=float)
        return np.exp(gammaln(2.0 / lam) - 0.5 * (gammaln(1.0 / lam) + gammaln(3.0 / lam)))
    return _vector_quad(kind, shape, "abs")


def mean_positive_part(kind: str, *shape):
    """E[max(z, 0)]."""
    kind = canonical_kind(kind)
    if kind != "SkewT":
        return 0.5 * mean_abs(kind, *shape)
    return _vector_quad(kind, shape, "pos")


def positive_second_moment(kind: str, *shape):
    """E[z^2 1{z > 0}]."""
    kind = canonical_kind(kind)
    if kind != "SkewT":
        return 0.5 if not shape else np.full(np.shape(shape[0]), 0.5)[()]
    return _vector_quad(kind, shape, "pos2")


def _vector_quad(kind, shape, which):
    arrs = np.broadcast_arrays(*[np.asarray(s, dtype=float) for s in shape])
    out = np.empty(arrs[0].shape)
    for idx in np.ndindex(out.shape):
        out[idx] = _quad_moment(kind, tuple(float(a[idx]) for a in arrs), which)
    return out[()]
