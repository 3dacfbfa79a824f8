"""Posterior summaries, forecast-accuracy metrics and forecast bands.

Squared returns are the variance proxy.  For each scored observation

* NLL is minus the full log-likelihood (Gaussian constant included),
* RMSE is ``sqrt(mean((r^2 - h)^2))``,
* MAD is ``mean(|r^2 - h|)``,
* QLIK is ``mean(log h + r^2 / h)``.

Test-segment scores re-run the recursion over train and test together and
score only the test observations, so the test variances see the true
history.  The back-cast value always comes from the training segment.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import distributions as dists
from .models import (ConstrainedParams, ModelSpec, check_constraints, forecast_batch,
                     split_columns, variance_batch)
from .timeseries import ReturnSeries, backcast_variance
from .transforms import TransformSpec, inverse_transform_batch

METRICS = ("nll", "rmse", "mad", "qlik")
_CHUNK = 512


@dataclass(frozen=True)
class MetricSet:
    nll: float
    rmse: float
    mad: float
    qlik: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MetricSummary:
    """Metric means with the sample standard deviation over posterior draws."""

    mean: MetricSet
    std: MetricSet
    n_draws: int


@dataclass(frozen=True, eq=False)
class ForecastBand:
    dates: np.ndarray
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["date", "point", "lower", "upper"])
            for row in zip(self.dates, self.point, self.lower, self.upper):
                w.writerow([str(row[0])] + [repr(float(x)) for x in row[1:]])


def posterior_mean_constrained(samples, tspec) -> ConstrainedParams:
    """Mean of the inverse-transformed draws."""
    ts = tspec if isinstance(tspec, TransformSpec) else TransformSpec(tspec)
    nu = inverse_transform_batch(ts, np.atleast_2d(samples))
    return ConstrainedParams.from_vector(ts.spec, nu.mean(axis=0))


def _returns(series) -> np.ndarray:
    r = series.returns if isinstance(series, ReturnSeries) else series
    return np.ascontiguousarray(r, dtype=float)


def _metrics_matrix(spec: ModelSpec, nu: np.ndarray, eps: np.ndarray, h0: float, start: int) -> np.ndarray:
    """``(n, 4)`` metrics for every row of ``nu`` over observations ``t >= start``."""
    out = np.empty((nu.shape[0], 4))
    proxy = eps[start:] ** 2
    kind = spec.innovation.kind
    for lo in range(0, nu.shape[0], _CHUNK):
        block = nu[lo:lo + _CHUNK]
        h, _ = variance_batch(spec, block, eps, h0)
        hs = h[:, start:]
        err = proxy - hs
        shape = [s[:, None] for s in split_columns(spec, block)["shape"].T]
        z = eps[None, start:] / np.sqrt(hs)
        ll = np.sum(dists.logpdf(kind, z, *shape) - 0.5 * np.log(hs), axis=1)
        out[lo:lo + _CHUNK, 0] = -ll
        out[lo:lo + _CHUNK, 1] = np.sqrt(np.mean(err * err, axis=1))
        out[lo:lo + _CHUNK, 2] = np.mean(np.abs(err), axis=1)
        out[lo:lo + _CHUNK, 3] = np.mean(np.log(hs) + proxy / hs, axis=1)
    return out


def _as_metricset(row) -> MetricSet:
    return MetricSet(*(float(x) for x in row))


def compute_metrics(spec: ModelSpec, nu, series, h_init: float | None = None, start: int = 0) -> MetricSet:
    """Metrics for one parameter vector over ``series[start:]``.

    ``h_init`` defaults to the back-cast of ``series[:start]`` (or of the
    whole series when ``start == 0``).
    """
    vec = nu.to_vector(spec) if isinstance(nu, ConstrainedParams) else np.asarray(nu, dtype=float)
    check_constraints(spec, vec)
    eps = _returns(series)
    if not 0 <= start < len(eps):
        raise ValueError("start must index an observation")
    if h_init is None:
        h_init = backcast_variance(eps[:start] if start else eps, max(spec.n_lags, 1))
    return _as_metricset(_metrics_matrix(spec, vec[None, :], eps, h_init, start)[0])


def evaluate_split(spec: ModelSpec, nu, train: ReturnSeries, test: ReturnSeries) -> tuple[MetricSet, MetricSet]:
    """Train and test metrics; the test recursion runs through the training data."""
    full = np.concatenate([_returns(train), _returns(test)])
    h0 = backcast_variance(_returns(train), max(spec.n_lags, 1))
    return (
        compute_metrics(spec, nu, _returns(train), h0),
        compute_metrics(spec, nu, full, h0, start=len(train)),
    )


def deviation_vs_qml(metric_e: float, metric_qml: float) -> float:
    """Percentage deviation ``100 (M_E / M_QML - 1)``."""
    if metric_qml == 0:
        raise ZeroDivisionError("QML metric is zero")
    return 100.0 * (metric_e / metric_qml - 1.0)


def metrics_from_samples(spec: ModelSpec, samples, series, mode: str = "mean_of_metrics",
                         h_init: float | None = None, start: int = 0,
                         tspec: TransformSpec | None = None) -> MetricSummary:
    """Metrics from posterior draws of the unconstrained vector.

    ``mean_of_metrics`` scores every draw and reports mean and standard
    deviation; ``metrics_at_mean`` scores the mean of the transformed draws
    once (standard deviation zero).
    """
    ts = tspec or TransformSpec(spec)
    eps = _returns(series)
    if h_init is None:
        h_init = backcast_variance(eps[:start] if start else eps, max(spec.n_lags, 1))
    nu = inverse_transform_batch(ts, np.atleast_2d(samples))
    if mode == "metrics_at_mean":
        m = _metrics_matrix(spec, nu.mean(axis=0)[None, :], eps, h_init, start)[0]
        return MetricSummary(_as_metricset(m), MetricSet(0.0, 0.0, 0.0, 0.0), nu.shape[0])
    if mode != "mean_of_metrics":
        raise ValueError("mode must be 'mean_of_metrics' or 'metrics_at_mean'")
    mat = _metrics_matrix(spec, nu, eps, h_init, start)
    std = mat.std(axis=0, ddof=1) if len(mat) > 1 else np.zeros(4)
    return MetricSummary(_as_metricset(mat.mean(axis=0)), _as_metricset(std), nu.shape[0])


def _future_dates(history, horizon):
    if isinstance(history, ReturnSeries):
        return np.busday_offset(history.dates[-1], np.arange(1, horizon + 1), roll="forward")
    return np.arange(1, horizon + 1)


def forecast_bands(spec: ModelSpec, samples, history, horizon: int, level: float = 0.95,
                   h0: float | None = None, tspec: TransformSpec | None = None) -> ForecastBand:
    """Posterior-mean variance forecast with an empirical ``level`` band."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    samples = np.atleast_2d(samples)
    if samples.shape[0] < 2:
        raise ValueError("at least two posterior draws are needed")
    eps = _returns(history)
    if h0 is None:
        h0 = backcast_variance(eps, max(spec.n_lags, 1))
    nu = inverse_transform_batch(tspec or TransformSpec(spec), samples)
    paths = forecast_batch(spec, nu, eps, horizon, h0)
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(paths, [tail, 1.0 - tail], axis=0)
    return ForecastBand(_future_dates(history, horizon), paths.mean(axis=0), lower, upper, level)


# -- emitters ----------------------------------------------------------------------------

TIDY_FIELDS = ("series", "model", "estimator", "split", "metric", "value", "std")


def write_tidy_csv(rows, path) -> None:
    """One row per series x model x estimator x split x metric."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=TIDY_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow({k: row.get(k, "") for k in TIDY_FIELDS})


def tidy_rows(series: str, model: str, estimator: str, split: str, summary) -> list[dict]:
    if isinstance(summary, MetricSummary):
        mean, std = summary.mean.as_dict(), summary.std.as_dict()
    else:
        mean, std = summary.as_dict(), {k: 0.0 for k in METRICS}
    return [
        {"series": series, "model": model, "estimator": estimator, "split": split,
         "metric": m, "value": mean[m], "std": std[m]}
        for m in METRICS
    ]


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True), encoding="utf-8")
