"""GARCH-family conditional-variance models.

Six families are supported: ARCH(q), GARCH(p, q), GJR-GARCH(p, o, q),
EGARCH(p, q), GJR-EGARCH(p, o, q) and FIGARCH(p, d, q) with p, q in {0, 1}.
The conditional mean is zero, so returns are the innovations.

Parameter vectors use one canonical ordering (see :func:`param_names`):
``omega, alpha_1..q, gamma_1..o, psi_1..q, beta_1..p`` for the GARCH and
EGARCH families, ``omega, [beta], [phi], d`` for FIGARCH, followed by the
innovation shape parameters when the innovation is not Normal.

Conventions worth knowing:

* Order ``p`` counts lagged-variance (beta) terms and ``q`` counts news
  (alpha) terms, so GARCH(2, 1) has two betas.  For FIGARCH the first order
  is the phi flag and the last the beta flag, as in FIGARCH(1, d, 1).
* GARCH-type recursions set the first ``max(p, o, q)`` variances to the
  back-cast value; EGARCH and FIGARCH run from t = 1 with back-cast
  pre-sample values.
* GJR asymmetry switches on positive shocks, ``gamma_j 1{eps > 0} eps^2``.
  In GJR-EGARCH the news term gains ``gamma_j 1{z > 0} z``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from . import _recursions as _rec
from . import distributions as dists
from .distributions import InnovationDist
from .exceptions import ConstraintViolation, NonFiniteVariance
from .timeseries import ReturnSeries, backcast_variance

FAMILIES = ("ARCH", "GARCH", "GJR_GARCH", "EGARCH", "GJR_EGARCH", "FIGARCH")
_LABELS = {
    "ARCH": "ARCH", "GARCH": "GARCH", "GJR_GARCH": "GJR-GARCH",
    "EGARCH": "EGARCH", "GJR_EGARCH": "GJR-EGARCH", "FIGARCH": "FIGARCH",
}
_CHUNK = 512


@dataclass(frozen=True)
class ModelSpec:
    family: str
    p: int = 0
    o: int = 0
    q: int = 1
    innovation: InnovationDist = field(default_factory=InnovationDist)
    figarch_truncation: int = 1000

    def __post_init__(self):
        fam = self.family.upper().replace("-", "_")
        if fam not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if isinstance(self.innovation, str):
            object.__setattr__(self, "innovation", InnovationDist(self.innovation))
        p, o, q = self.p, self.o, self.q
        if min(p, o, q) < 0:
            raise ValueError("orders must be non-negative")
        ok = {
            "ARCH": p == 0 and o == 0 and q >= 1,
            "GARCH": o == 0 and p >= 1 and q >= 1,
            "GJR_GARCH": o >= 1,
            "EGARCH": o == 0 and q >= 1,
            "GJR_EGARCH": o >= 1,
            "FIGARCH": o == 0 and p in (0, 1) and q in (0, 1),
        }[fam]
        if not ok:
            raise ValueError(f"invalid orders (p={p}, o={o}, q={q}) for {fam}")
        if self.figarch_truncation < 1:
            raise ValueError("figarch_truncation must be positive")

    # -- naming -----------------------------------------------------------
    @property
    def label(self) -> str:
        name = _LABELS[self.family]
        if self.family == "ARCH":
            core = f"{name}({self.q})"
        elif self.family in ("GARCH", "EGARCH"):
            core = f"{name}({self.p},{self.q})"
        elif self.family == "FIGARCH":
            core = f"{name}({self.p},d,{self.q})"
        else:
            core = f"{name}({self.p},{self.o},{self.q})"
        if self.innovation.kind != "Normal":
            core += f"-{self.innovation.kind}"
        return core

    @property
    def is_egarch(self) -> bool:
        return self.family in ("EGARCH", "GJR_EGARCH")

    @property
    def n_lags(self) -> int:
        return max(self.p, self.o, self.q)

    @classmethod
    def parse(cls, text: str, innovation="Normal", figarch_truncation: int = 1000) -> "ModelSpec":
        """Parse labels such as ``GARCH(1,1)``, ``GJR-GARCH(1,1,1)`` or ``FIGARCH(1,d,1)``.

        Two-order GJR labels mean one asymmetry lag: GJR-GARCH(1,1) is (1, 1, 1).
        """
        m = re.fullmatch(r"\s*([A-Za-z_-]+)\s*\(([^)]*)\)\s*", text)
        if not m:
            raise ValueError(f"cannot parse model label {text!r}")
        fam = m.group(1).upper().replace("-", "_")
        args = [a.strip() for a in m.group(2).split(",") if a.strip()]
        if isinstance(innovation, str):
            innovation = InnovationDist(innovation)
        kw = dict(innovation=innovation, figarch_truncation=figarch_truncation)
        if fam == "FIGARCH":
            if len(args) != 3 or args[1].lower() != "d":
                raise ValueError("FIGARCH label must look like FIGARCH(p,d,q)")
            return cls(fam, p=int(args[0]), q=int(args[2]), **kw)
        ints = [int(a) for a in args]
        if fam == "ARCH" and len(ints) == 1:
            return cls(fam, p=0, o=0, q=ints[0], **kw)
        if fam in ("GARCH", "EGARCH") and len(ints) == 2:
            return cls(fam, p=ints[0], o=0, q=ints[1], **kw)
        if fam in ("GJR_GARCH", "GJR_EGARCH"):
            if len(ints) == 2:
                return cls(fam, p=ints[0], o=1, q=ints[1], **kw)
            if len(ints) == 3:
                return cls(fam, p=ints[0], o=ints[1], q=ints[2], **kw)
        raise ValueError(f"wrong number of orders in {text!r}")


def param_names(spec: ModelSpec) -> list[str]:
    """Canonical parameter ordering shared by all serialized vectors."""
    names = ["omega"]
    if spec.family == "FIGARCH":
        if spec.q:
            names.append("beta")
        if spec.p:
            names.append("phi")
        names.append("d")
    else:
        names += [f"alpha[{j + 1}]" for j in range(spec.q)]
        names += [f"gamma[{j + 1}]" for j in range(spec.o)]
        if spec.is_egarch:
            names += [f"psi[{j + 1}]" for j in range(spec.q)]
        names += [f"beta[{j + 1}]" for j in range(spec.p)]
    names += list(spec.innovation.shape_names)
    return names


def parameter_count(spec: ModelSpec) -> int:
    return len(param_names(spec))


def ordering_tag(spec: ModelSpec) -> str:
    """Stable identifier of the parameter layout, written into every output file."""
    return f"{spec.label}:" + ",".join(param_names(spec))


def _layout(spec: ModelSpec) -> dict[str, slice]:
    out, i = {}, 1
    out["omega"] = slice(0, 1)
    if spec.family == "FIGARCH":
        for key, present in (("beta", spec.q), ("phi", spec.p), ("d", 1)):
            out[key] = slice(i, i + present)
            i += present
        for key in ("alpha", "gamma", "psi"):
            out[key] = slice(i, i)
    else:
        sizes = [("alpha", spec.q), ("gamma", spec.o),
                 ("psi", spec.q if spec.is_egarch else 0), ("beta", spec.p)]
        for key, n in sizes:
            out[key] = slice(i, i + n)
            i += n
        out["phi"] = slice(i, i)
        out["d"] = slice(i, i)
    out["shape"] = slice(i, i + spec.innovation.n_shape)
    return out


def split_columns(spec: ModelSpec, mat: np.ndarray) -> dict[str, np.ndarray]:
    """Named column blocks of a ``(n, d)`` parameter matrix."""
    return {k: mat[:, s] for k, s in _layout(spec).items()}


@dataclass(frozen=True)
class ConstrainedParams:
    """Model parameters in their natural (constrained) space."""

    omega: float
    alpha: tuple = ()
    gamma: tuple = ()
    beta: tuple = ()
    psi: tuple = ()
    phi: float | None = None
    d: float | None = None
    dist_shape: tuple = ()

    @classmethod
    def from_vector(cls, spec: ModelSpec, vec) -> "ConstrainedParams":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (parameter_count(spec),):
            raise ValueError(f"expected {parameter_count(spec)} parameters, got shape {vec.shape}")
        lay = _layout(spec)
        get = lambda k: tuple(float(x) for x in vec[lay[k]])  # noqa: E731
        return cls(
            omega=float(vec[0]),
            alpha=get("alpha"),
            gamma=get("gamma"),
            beta=get("beta"),
            psi=get("psi"),
            phi=(get("phi")[0] if get("phi") else (0.0 if spec.family == "FIGARCH" else None)),
            d=(get("d")[0] if get("d") else None),
            dist_shape=get("shape"),
        )

    def to_vector(self, spec: ModelSpec) -> np.ndarray:
        lay = _layout(spec)
        vec = np.empty(parameter_count(spec))
        vec[0] = self.omega
        for key in ("alpha", "gamma", "psi", "beta"):
            vals = getattr(self, key)
            if len(vals) != lay[key].stop - lay[key].start:
                raise ValueError(f"{spec.label} expects {lay[key].stop - lay[key].start} {key} values")
            vec[lay[key]] = vals
        if spec.family == "FIGARCH":
            if self.d is None:
                raise ValueError("FIGARCH needs d")
            vec[lay["d"]] = self.d
            if spec.p:
                vec[lay["phi"]] = self.phi if self.phi is not None else 0.0
        shape = self.dist_shape or spec.innovation.shape
        if len(shape) != spec.innovation.n_shape:
            raise ValueError(f"{spec.innovation.kind} needs {spec.innovation.n_shape} shape values")
        vec[lay["shape"]] = shape
        return vec

    def as_dict(self, spec: ModelSpec) -> dict[str, float]:
        return dict(zip(param_names(spec), self.to_vector(spec).tolist()))


@dataclass(frozen=True)
class VariancePath:
    h: np.ndarray
    loglik_per_obs: np.ndarray
    n_clamped: int = 0


# -- constraints ---------------------------------------------------------------

def constraint_margins(spec: ModelSpec, nu: np.ndarray) -> np.ndarray:
    """Slack of every inequality for each row of ``nu`` (>= 0 means satisfied).

    Returns an ``(n, m)`` array.  GJR news terms are checked lag by lag
    (``alpha_j + gamma_j >= 0``), which implies the summed condition and is
    what keeps the variance positive.
    """
    nu = np.atleast_2d(np.asarray(nu, dtype=float))
    c = split_columns(spec, nu)
    cols = []
    fam = spec.family
    if not spec.is_egarch:
        cols.append(c["omega"][:, 0])
    if fam in ("ARCH", "GARCH", "GJR_GARCH"):
        cols += list(c["alpha"].T) + list(c["beta"].T)
        for j in range(spec.o):
            a = c["alpha"][:, j] if j < spec.q else 0.0
            cols.append(a + c["gamma"][:, j])
        budget = (c["alpha"].sum(1) + 0.5 * c["gamma"].sum(1) + c["beta"].sum(1))
        cols.append(1.0 - budget)
    elif fam == "FIGARCH":
        d = c["d"][:, 0]
        phi = c["phi"][:, 0] if spec.p else np.zeros(len(nu))
        beta = c["beta"][:, 0] if spec.q else np.zeros(len(nu))
        cols += [d, 1.0 - d, phi, (1.0 - d) / 2.0 - phi, beta, d + phi - beta]
    shape = c["shape"]
    kind = spec.innovation.kind
    if kind in ("StudentT", "SkewT"):
        cols.append(shape[:, 0] - 2.0)
    if kind == "GED":
        cols.append(shape[:, 0])
    if kind == "SkewT":
        cols.append(1.0 - np.abs(shape[:, 1]))
    if not cols:
        return np.zeros((len(nu), 0))
    return np.column_stack(cols)


_STRICT_FIRST = {"ARCH", "GARCH", "GJR_GARCH", "FIGARCH"}


def satisfies_constraints(spec: ModelSpec, nu, tol: float = 0.0) -> np.ndarray:
    """Boolean per row: finite, ``omega > 0``, stationarity strict, others within ``tol``."""
    nu = np.atleast_2d(np.asarray(nu, dtype=float))
    ok = np.all(np.isfinite(nu), axis=1)
    marg = constraint_margins(spec, nu)
    if marg.shape[1]:
        ok &= np.all(marg >= -tol, axis=1)
    if spec.family in _STRICT_FIRST:
        ok &= nu[:, 0] > 0
    if spec.family in ("ARCH", "GARCH", "GJR_GARCH"):
        # stationarity column is the last GARCH-type margin before shapes
        n_shape_cols = {"Normal": 0, "StudentT": 1, "GED": 1, "SkewT": 2}[spec.innovation.kind]
        ok &= marg[:, marg.shape[1] - 1 - n_shape_cols] > -tol
    return ok


def check_constraints(spec: ModelSpec, nu) -> None:
    vec = nu.to_vector(spec) if isinstance(nu, ConstrainedParams) else np.asarray(nu, float)
    if not satisfies_constraints(spec, vec)[0]:
        raise ConstraintViolation(f"parameters outside the {spec.label} constraint set: {vec}")


def _as_vector(spec, nu) -> np.ndarray:
    if isinstance(nu, ConstrainedParams):
        return nu.to_vector(spec)
    vec = np.asarray(nu, dtype=float)
    if vec.shape != (parameter_count(spec),):
        raise ValueError(f"expected {parameter_count(spec)} parameters")
    return vec


def _returns(series) -> np.ndarray:
    if isinstance(series, ReturnSeries):
        return np.asarray(series.returns, dtype=float)
    return np.ascontiguousarray(series, dtype=float)


# -- FIGARCH weights -----------------------------------------------------------

def figarch_weights(phi: float, beta: float, d: float, K: int = 1000) -> np.ndarray:
    """ARCH(inf) weights lambda_1..lambda_K of FIGARCH(1, d, 1).

    Pass ``phi=0`` or ``beta=0`` for the models without those terms.
    """
    if K < 1:
        raise ValueError("K must be positive")
    if not (0.0 <= d <= 1.0 and 0.0 <= phi <= (1.0 - d) / 2.0 and 0.0 <= beta <= d + phi):
        raise ConstraintViolation(f"FIGARCH constraints violated: phi={phi}, beta={beta}, d={d}")
    return _rec.figarch_weights_batch(
        np.array([phi], float), np.array([beta], float), np.array([d], float), int(K)
    )[0]


def _figarch_cols(spec, c):
    n = c["omega"].shape[0]
    phi = c["phi"][:, 0] if spec.p else np.zeros(n)
    beta = c["beta"][:, 0] if spec.q else np.zeros(n)
    return np.ascontiguousarray(phi), np.ascontiguousarray(beta), np.ascontiguousarray(c["d"][:, 0])


# -- batched evaluation ---------------------------------------------------------

def _eabs(spec: ModelSpec, shape_cols: np.ndarray) -> np.ndarray:
    n = shape_cols.shape[0]
    kind = spec.innovation.kind
    if kind == "Normal":
        return np.full(n, np.sqrt(2.0 / np.pi))
    return np.broadcast_to(dists.mean_abs(kind, *shape_cols.T), (n,)).astype(float)


def variance_batch(spec: ModelSpec, nu: np.ndarray, eps: np.ndarray, h0: float):
    """Conditional variances for every row of ``nu``: ``(h, n_clamped)``."""
    nu = np.ascontiguousarray(np.atleast_2d(nu), dtype=float)
    eps = np.ascontiguousarray(eps, dtype=float)
    n, T = nu.shape[0], eps.shape[0]
    c = split_columns(spec, nu)
    h = np.empty((n, T))
    clamped = np.zeros(n, dtype=np.int64)
    omega = np.ascontiguousarray(c["omega"][:, 0])
    cont = np.ascontiguousarray
    if spec.family == "FIGARCH":
        phi, beta, d = _figarch_cols(spec, c)
        K = spec.figarch_truncation
        lam = _rec.figarch_weights_batch(phi, beta, d, K)
        if T * K <= 200_000:
            _rec.figarch_filter_direct(eps, omega, lam, float(h0), h)
        else:
            x = np.concatenate([np.full(K, float(h0)), eps * eps])
            conv = fftconvolve(x[None, :], lam, axes=1)
            # conv[m] = sum_k lam_k x[m - k + 1]; h_t needs m = K + t - 1
            h[:] = omega[:, None] + conv[:, K - 1:K - 1 + T]
            np.maximum(h, omega[:, None], out=h)
    elif spec.is_egarch:
        _rec.egarch_filter(
            eps, omega, cont(c["alpha"]), cont(c["gamma"]), cont(c["psi"]), cont(c["beta"]),
            _eabs(spec, c["shape"]), float(h0), h, clamped,
        )
    else:
        _rec.garch_filter(eps, omega, cont(c["alpha"]), cont(c["gamma"]), cont(c["beta"]), float(h0), h)
    return h, clamped


def _loglik_from_h(spec, h, eps, shape_cols, start):
    kind = spec.innovation.kind
    if kind == "Normal":
        terms = _rec.gaussian_terms(h, eps, int(start))
        return -0.5 * ((h.shape[1] - start) * dists.LOG_2PI + terms)
    hs = h[:, start:]
    z = eps[None, start:] / np.sqrt(hs)
    shape = [s[:, None] for s in shape_cols.T]
    lp = dists.logpdf(kind, z, *shape) - 0.5 * np.log(hs)
    return lp.sum(axis=1)


def loglik_batch(spec: ModelSpec, nu: np.ndarray, eps, h0: float, start: int = 0) -> np.ndarray:
    """Log-likelihood of observations ``t >= start`` for each row of ``nu``.

    Rows that produce a non-finite or non-positive variance get ``-inf``.
    Rows are processed in chunks so memory stays bounded.
    """
    nu = np.atleast_2d(np.asarray(nu, dtype=float))
    eps = np.ascontiguousarray(eps, dtype=float)
    out = np.full(nu.shape[0], -np.inf)
    kind = spec.innovation.kind
    for lo in range(0, nu.shape[0], _CHUNK):
        block = nu[lo:lo + _CHUNK]
        finite = np.all(np.isfinite(block), axis=1)
        if kind != "Normal":
            finite &= satisfies_constraints(spec, block) | spec.is_egarch
            if spec.is_egarch:
                marg = constraint_margins(spec, block)
                finite &= np.all(marg > 0, axis=1) if marg.shape[1] else True
        if not finite.any():
            continue
        good = block[finite]
        if kind == "Normal" and spec.family in ("ARCH", "GARCH", "GJR_GARCH"):
            c = split_columns(spec, good)
            terms = _rec.garch_gaussian_terms(
                eps, np.ascontiguousarray(c["omega"][:, 0]), np.ascontiguousarray(c["alpha"]),
                np.ascontiguousarray(c["gamma"]), np.ascontiguousarray(c["beta"]), float(h0), int(start),
            )
            ll = -0.5 * ((len(eps) - start) * dists.LOG_2PI + terms)
            ll[~np.isfinite(ll)] = -np.inf
            out[lo:lo + _CHUNK][finite] = ll
            continue
        h, _ = variance_batch(spec, good, eps, h0)
        valid = np.all(np.isfinite(h) & (h > 0), axis=1)
        ll = np.full(len(good), -np.inf)
        if valid.any():
            c = split_columns(spec, good[valid])
            ll[valid] = _loglik_from_h(spec, h[valid], eps, c["shape"], start)
        ll[~np.isfinite(ll)] = -np.inf
        out[lo:lo + _CHUNK][finite] = ll
    return out


# -- single-parameter API --------------------------------------------------------

def variance_path(spec: ModelSpec, nu, series, h0: float | None = None) -> VariancePath:
    """Conditional variance path and per-observation log-likelihood."""
    vec = _as_vector(spec, nu)
    check_constraints(spec, vec)
    eps = _returns(series)
    if len(eps) < 1:
        raise ValueError("series is empty")
    if h0 is None:
        h0 = backcast_variance(eps, max(spec.n_lags, 1))
    h, clamped = variance_batch(spec, vec[None, :], eps, h0)
    h = h[0]
    if not np.all(np.isfinite(h)) or np.any(h <= 0):
        raise NonFiniteVariance(f"{spec.label} produced a non-finite or non-positive variance")
    shape = split_columns(spec, vec[None, :])["shape"][0]
    z = eps / np.sqrt(h)
    lp = dists.logpdf(spec.innovation.kind, z, *shape) - 0.5 * np.log(h)
    return VariancePath(h=h, loglik_per_obs=lp, n_clamped=int(clamped[0]))


def qml_objective(spec: ModelSpec, nu, series, h0: float | None = None) -> float:
    """Gaussian QML objective ``sum_t log h_t + eps_t^2 / h_t`` (to be minimized)."""
    path = variance_path(spec, nu, series, h0)
    eps = _returns(series)
    return float(np.sum(np.log(path.h) + eps * eps / path.h))


def log_likelihood(spec: ModelSpec, nu, series, h0: float | None = None) -> float:
    """Full log-likelihood including normalizing constants."""
    return float(np.sum(variance_path(spec, nu, series, h0).loglik_per_obs))


def unconditional_variance(spec: ModelSpec, nu) -> float:
    """Long-run variance where it exists, else ``inf``."""
    vec = _as_vector(spec, nu)
    c = split_columns(spec, vec[None, :])
    shape = tuple(c["shape"][0])
    if spec.family in ("ARCH", "GARCH", "GJR_GARCH"):
        kappa = float(dists.positive_second_moment(spec.innovation.kind, *shape))
        pers = c["alpha"].sum() + kappa * c["gamma"].sum() + c["beta"].sum()
        return float(c["omega"][0, 0] / (1 - pers)) if pers < 1 else np.inf
    if spec.is_egarch:
        bsum = c["beta"].sum()
        if abs(bsum) >= 1:
            return np.inf
        return float(np.exp(c["omega"][0, 0] / (1 - bsum)))
    return np.inf


def simulate(spec: ModelSpec, nu, T: int, seed: int = 0, burn: int | None = None) -> ReturnSeries:
    """Simulate ``T`` returns; deterministic given ``seed``.

    A burn-in (default 500, or the truncation length for FIGARCH) is
    discarded so the start-up values do not matter.
    """
    if T < 1:
        raise ValueError("T must be positive")
    vec = _as_vector(spec, nu)
    check_constraints(spec, vec)
    c = split_columns(spec, vec[None, :])
    shape = tuple(c["shape"][0]) or ()
    kind = spec.innovation.kind
    if burn is None:
        burn = max(500, spec.figarch_truncation if spec.family == "FIGARCH" else 0)
    rng = np.random.default_rng(seed)
    m = spec.n_lags if not spec.is_egarch and spec.family != "FIGARCH" else 0
    z = dists.sample(kind, rng, T + burn + m, *shape)
    omega = float(c["omega"][0, 0])
    if spec.family == "FIGARCH":
        phi, beta, d = _figarch_cols(spec, c)
        lam = _rec.figarch_weights_batch(phi, beta, d, spec.figarch_truncation)[0]
        e2_init = omega / max(1.0 - lam.sum(), 1e-3)
        eps, _ = _rec.figarch_simulate(z, omega, lam, e2_init)
    elif spec.is_egarch:
        bsum = c["beta"].sum()
        lh_init = omega / (1 - bsum) if abs(bsum) < 1 else omega
        eps, _ = _rec.egarch_simulate(
            z, omega, c["alpha"][0].copy(), c["gamma"][0].copy(), c["psi"][0].copy(),
            c["beta"][0].copy(), float(_eabs(spec, c["shape"])[0]), float(lh_init),
        )
    else:
        uv = unconditional_variance(spec, vec)
        h_init = uv if np.isfinite(uv) else omega
        eps, _ = _rec.garch_simulate(
            z, omega, c["alpha"][0].copy(), c["gamma"][0].copy(), c["beta"][0].copy(), float(h_init)
        )
    return ReturnSeries.from_array(eps[burn:], name=f"sim-{spec.label}-{seed}")


def forecast_batch(spec: ModelSpec, nu: np.ndarray, eps, horizon: int, h0: float) -> np.ndarray:
    """Multi-step variance forecasts ``h_{T+1..T+horizon}`` for each row of ``nu``.

    Unknown future squared shocks are replaced by their conditional
    expectation; EGARCH news terms by their mean, so EGARCH forecasts are
    ``exp(E[log h])``.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    nu = np.atleast_2d(np.asarray(nu, dtype=float))
    eps = np.ascontiguousarray(eps, dtype=float)
    out = np.empty((nu.shape[0], horizon))
    for lo in range(0, nu.shape[0], _CHUNK):
        block = nu[lo:lo + _CHUNK]
        out[lo:lo + _CHUNK] = _forecast_block(spec, block, eps, horizon, h0)
    return out


def _forecast_block(spec, nu, eps, horizon, h0):
    n, T = nu.shape[0], eps.shape[0]
    h, _ = variance_batch(spec, nu, eps, h0)
    c = split_columns(spec, nu)
    kind = spec.innovation.kind
    shape = c["shape"]
    omega = c["omega"][:, 0]
    fc = np.empty((n, horizon))
    if spec.family == "FIGARCH":
        phi, beta, d = _figarch_cols(spec, c)
        K = spec.figarch_truncation
        lam = _rec.figarch_weights_batch(phi, beta, d, K)
        e2 = np.concatenate([np.full(max(K - T, 0), h0), eps[-K:] ** 2])
        e2 = np.broadcast_to(e2, (n, len(e2))).copy()
        for k in range(horizon):
            # newest first against lam_1..lam_K
            hist = e2[:, ::-1][:, :K]
            fc[:, k] = omega + np.sum(lam * hist, axis=1)
            e2 = np.concatenate([e2, fc[:, k:k + 1]], axis=1)
        return fc
    if spec.is_egarch:
        z = eps[None, :] / np.sqrt(h)
        lh = np.log(h)
        eabs = _eabs(spec, shape)
        zpos = (np.broadcast_to(dists.mean_positive_part(kind, *shape.T), (n,))
                if spec.o else np.zeros(n))
        lh_ext = np.concatenate([lh, np.zeros((n, horizon))], axis=1)
        for k in range(horizon):
            t = T + k
            v = omega.copy()
            for j in range(spec.q):
                s = t - 1 - j
                if s < T:
                    v += c["alpha"][:, j] * z[:, s] + c["psi"][:, j] * (np.abs(z[:, s]) - eabs)
            for j in range(spec.o):
                s = t - 1 - j
                if s < T:
                    v += c["gamma"][:, j] * np.where(z[:, s] > 0, z[:, s], 0.0)
                else:
                    v += c["gamma"][:, j] * zpos
            for j in range(spec.p):
                s = t - 1 - j
                v += c["beta"][:, j] * (lh_ext[:, s] if s >= 0 else np.log(h0))
            v = np.clip(v, -_rec.LOG_H_BOUND, _rec.LOG_H_BOUND)
            lh_ext[:, t] = v
            fc[:, k] = np.exp(v)
        return fc
    kappa = np.broadcast_to(dists.positive_second_moment(kind, *shape.T), (n,))
    h_ext = np.concatenate([h, np.zeros((n, horizon))], axis=1)
    e2 = eps * eps
    for k in range(horizon):
        t = T + k
        v = omega.copy()
        for j in range(spec.q):
            s = t - 1 - j
            v += c["alpha"][:, j] * (e2[s] if s < T else h_ext[:, s])
        for j in range(spec.o):
            s = t - 1 - j
            if s < T:
                v += c["gamma"][:, j] * (e2[s] if eps[s] > 0 else 0.0)
            else:
                v += c["gamma"][:, j] * kappa * h_ext[:, s]
        for j in range(spec.p):
            v += c["beta"][:, j] * h_ext[:, t - 1 - j]
        h_ext[:, t] = v
        fc[:, k] = v
    return fc


def forecast_variance(spec: ModelSpec, nu, history, horizon: int, h0: float | None = None) -> np.ndarray:
    """Point forecasts of the conditional variance after the end of ``history``."""
    vec = _as_vector(spec, nu)
    check_constraints(spec, vec)
    eps = _returns(history)
    if len(eps) < spec.n_lags + 1:
        raise ValueError(f"{spec.label} needs at least {spec.n_lags + 1} observations")
    if h0 is None:
        h0 = backcast_variance(eps, max(spec.n_lags, 1))
    return forecast_batch(spec, vec[None, :], eps, horizon, h0)[0]
