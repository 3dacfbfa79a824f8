"""Gaussian variational inference for GARCH-family volatility models."""

__version__ = "0.1.0"

from .baselines import Chain, MHConfig, QmlConfig, QmlResult, fit_mh, fit_qml, numerical_gradient
from .distributions import InnovationDist
from .evaluation import (ForecastBand, MetricSet, compute_metrics, deviation_vs_qml, evaluate_split,
                         forecast_bands, metrics_from_samples, posterior_mean_constrained)
from .models import (ConstrainedParams, ModelSpec, VariancePath, figarch_weights, forecast_variance,
                     log_likelihood, param_names, qml_objective, simulate, variance_path)
from .timeseries import ReturnSeries, backcast_variance, load_returns, split_train_test, write_returns
from .transforms import TransformSpec, forward_transform, inverse_transform, logistic
from .vi import FitResult, OptimizerConfig, Prior, VariationalParams, fit

__all__ = [
    "Chain", "ConstrainedParams", "FitResult", "ForecastBand", "InnovationDist", "MHConfig",
    "MetricSet", "ModelSpec", "OptimizerConfig", "Prior", "QmlConfig", "QmlResult", "ReturnSeries",
    "TransformSpec", "VariancePath", "VariationalParams", "backcast_variance", "compute_metrics",
    "deviation_vs_qml", "evaluate_split", "figarch_weights", "fit", "fit_mh", "fit_qml",
    "forecast_bands", "forecast_variance", "forward_transform", "inverse_transform", "load_returns",
    "log_likelihood", "logistic", "metrics_from_samples", "numerical_gradient", "param_names",
    "posterior_mean_constrained", "qml_objective", "simulate", "split_train_test", "variance_path",
    "write_returns",
]
