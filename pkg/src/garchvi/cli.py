"""Batch command line: ``garchvi {fit,compare,forecast,simulate,convert-prices}``.

Settings come from an optional INI file (section ``[run]``, key
``schema_version = 1``) and are overridden by command-line flags.  Every
file written carries the parameter-ordering tag and a format version.

Exit codes: 0 success, 1 invocation error, 2 partial failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import glob
import hashlib
import json
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import MHConfig, QmlConfig, fit_mh, fit_qml
from .evaluation import (METRICS, MetricSet, MetricSummary, deviation_vs_qml, forecast_bands,
                         metrics_from_samples, tidy_rows, write_json, write_tidy_csv)
from .exceptions import GarchVIError, MissingBaseline
from .models import ModelSpec, ordering_tag, param_names, simulate
from .timeseries import (backcast_variance, load_returns, prices_to_returns, split_train_test,
                         write_returns)
from .vi import FORMAT_VERSION, OPTIMIZERS, OptimizerConfig, Prior, fit, moving_average

ESTIMATORS = ("QML", "MH") + OPTIMIZERS
SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    data: tuple = ()
    models: tuple = ("GARCH(1,1)",)
    estimators: tuple = ("QML", "EMGVB")
    split: float = 0.75
    tau: float = 1.0
    iters: int = 2500
    samples: int = 50
    lr: float = 0.005
    momentum: float = 0.4
    dist: str = "Normal"
    out: str = "results"
    jobs: int = 1
    seed: int = 0
    mh_total: int = 30000
    mh_keep: int = 7000
    qml_starts: int = 1
    date_column: str = "date"
    return_column: str = "return"

    def validate(self) -> None:
        if not self.models:
            raise ValueError("at least one model is required")
        if not self.estimators:
            raise ValueError("at least one estimator is required")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad:
            raise ValueError(f"unknown estimators {bad}; choose from {ESTIMATORS}")
        for m in self.models:
            ModelSpec.parse(m, self.dist)


_LIST_KEYS = {"data", "models", "estimators"}
_FLAG_KEYS = {
    "data", "models", "estimators", "split", "tau", "iters", "samples", "lr",
    "momentum", "dist", "out", "jobs", "seed",
}


def _split_list(text: str) -> tuple:
    # model labels contain commas inside parentheses
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in ",;" and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    return tuple(p for p in parts if p)


def _coerce(key: str, value):
    default = getattr(RunConfig, key)
    if key in _LIST_KEYS:
        return _split_list(value) if isinstance(value, str) else tuple(value)
    return type(default)(value)


def load_config(path) -> dict:
    """Read ``[run]`` from an INI file; unknown keys are an error."""
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise FileNotFoundError(path)
    if "run" not in parser:
        raise ValueError(f"{path} has no [run] section")
    sec = dict(parser["run"])
    version = int(sec.pop("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported config schema_version {version}")
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(sec) - known
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    return {k: _coerce(k, v) for k, v in sec.items()}


def build_config(args) -> RunConfig:
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for key in _FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = _coerce(key, v)
    cfg = RunConfig(**values)
    paths = []
    for pattern in cfg.data:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits if hits else [pattern])
    cfg = replace(cfg, data=tuple(paths), estimators=tuple(e.upper() for e in cfg.estimators))
    cfg.validate()
    return cfg


def cell_seed(master: int, series: str, model: str, estimator: str) -> int:
    """First 4 bytes of SHA-256 over ``master|series|model|estimator``."""
    key = f"{master}|{series}|{model}|{estimator}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:4], "big")


def _cell_name(series: str, model: str, estimator: str) -> str:
    safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in model)
    return f"{series}__{safe}__{estimator}.json"


def _metric_block(spec, samples, train, test, theta_single=None):
    full = np.concatenate([train.returns, test.returns])
    h0 = backcast_variance(train.returns, max(spec.n_lags, 1))
    out = {}
    for mode in ("metrics_at_mean", "mean_of_metrics"):
        draws = samples if theta_single is None else np.vstack([theta_single, theta_single])
        tr = metrics_from_samples(spec, draws, train, mode, h_init=h0)
        te = metrics_from_samples(spec, draws, full, mode, h_init=h0, start=len(train))
        out[mode] = {
            "train": {"mean": tr.mean.as_dict(), "std": tr.std.as_dict()},
            "test": {"mean": te.mean.as_dict(), "std": te.std.as_dict()},
        }
    return out


def run_cell(cfg: RunConfig, path: str, model: str, estimator: str) -> tuple[dict, dict]:
    """Fit one series x model x estimator; returns (payload, manifest entry)."""
    start = time.perf_counter()
    series_id = Path(path).stem
    seed = cell_seed(cfg.seed, series_id, model, estimator)
    entry = {"series": series_id, "model": model, "estimator": estimator, "seed": seed,
             "file": _cell_name(series_id, model, estimator)}
    try:
        series = load_returns(path, cfg.date_column, cfg.return_column)
        train, test = split_train_test(series, cfg.split)
        spec = ModelSpec.parse(model, cfg.dist)
        payload = {
            "format_version": FORMAT_VERSION,
            "series": series_id,
            "model": spec.label,
            "model_label": model,
            "dist": spec.innovation.kind,
            "estimator": estimator,
            "seed": seed,
            "ordering": ordering_tag(spec),
            "names": param_names(spec),
            "split": cfg.split,
            "n_train": len(train),
            "n_test": len(test),
        }
        if estimator == "QML":
            res = fit_qml(spec, train, QmlConfig(n_starts=cfg.qml_starts, seed=seed))
            body = res.to_dict()
            payload["samples"] = [res.theta_star.tolist()]
            payload["metrics"] = _metric_block(spec, None, train, test, res.theta_star)
        elif estimator == "MH":
            chain = fit_mh(spec, train, Prior(cfg.tau),
                           MHConfig(n_total=cfg.mh_total, n_keep=cfg.mh_keep, seed=seed))
            body = chain.to_dict()
            payload["samples"] = body.pop("draws")
            payload["metrics"] = _metric_block(spec, chain.draws, train, test)
        else:
            ocfg = OptimizerConfig(estimator, learning_rate=cfg.lr, n_samples=cfg.samples,
                                   momentum=cfg.momentum, max_iters=cfg.iters, seed=seed)
            res = fit(spec, train, Prior(cfg.tau), ocfg)
            body = res.to_dict()
            payload["samples"] = body.pop("posterior_samples")
            payload["metrics"] = _metric_block(spec, res.posterior_samples, train, test)
        body.pop("elapsed", None)
        payload["fit"] = body
        entry["status"] = "ok"
    except FileNotFoundError as exc:
        payload = None
        entry.update(status="error", code="file_not_found", message=str(exc))
    except GarchVIError as exc:
        payload = None
        entry.update(status="error", code=exc.code, message=str(exc))
    except Exception as exc:  # one bad cell must not abort the batch
        payload = None
        entry.update(status="error", code=type(exc).__name__, message=str(exc))
    entry["wall_time"] = time.perf_counter() - start
    return payload, entry


def _run_cell_star(args):
    return run_cell(*args)


def _write_lb_csv(fit_body: dict, path: Path) -> None:
    lb = np.asarray(fit_body["lb_trace"], dtype=float)
    smooth = moving_average(lb, fit_body["config"]["smoothing_window"])
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "lb", "lb_smoothed"])
        for i, (a, b) in enumerate(zip(lb, smooth), start=1):
            w.writerow([i, repr(float(a)), repr(float(b))])


def cmd_fit(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cells = [(cfg, p, m, e) for p in cfg.data for m in cfg.models for e in cfg.estimators]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_cell_star, cells))
    else:
        results = [run_cell(*c) for c in cells]
    entries, rows = [], []
    for payload, entry in results:
        if payload is not None:
            (out / entry["file"]).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
            if "lb_trace" in payload["fit"]:
                _write_lb_csv(payload["fit"], out / entry["file"].replace(".json", ".lb.csv"))
            for split, block in payload["metrics"]["mean_of_metrics"].items():
                summary = MetricSummary(MetricSet(**block["mean"]), MetricSet(**block["std"]), 0)
                rows += tidy_rows(payload["series"], payload["model"], payload["estimator"], split, summary)
        entries.append(entry)
    write_tidy_csv(rows, out / "metrics.csv")
    manifest = {
        "format_version": FORMAT_VERSION,
        "garchvi_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "master_seed": cfg.seed,
        "config": asdict(cfg),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "cells": entries,
    }
    write_json(manifest, out / "manifest.json")
    failed = sum(e["status"] != "ok" for e in entries)
    print(f"{len(entries) - failed} of {len(entries)} cells succeeded; results in {out}")
    return EXIT_PARTIAL if failed else EXIT_OK


def _load_results(results_dir: Path) -> list[dict]:
    out = []
    for p in sorted(results_dir.glob("*.json")):
        if p.name.startswith(("manifest", "compare")):
            continue
        data = json.loads(p.read_text(encoding="utf-8"))
        if "estimator" in data and "metrics" in data:
            out.append(data)
    return out


def compare_results(results: list[dict], mode: str = "metrics_at_mean") -> tuple[list[dict], list[dict]]:
    """Per-series deviations from QML and their cross-series mean and std.

    Raises
    ------
    MissingBaseline
        If no QML result exists for any series x model pair.
    """
    qml = {(r["series"], r["model"]): r for r in results if r["estimator"] == "QML"}
    if not qml:
        raise MissingBaseline("no QML results found")
    per_series = []
    for r in results:
        base = qml.get((r["series"], r["model"]))
        if base is None:
            continue
        for split in ("train", "test"):
            for m in METRICS:
                dev = deviation_vs_qml(
                    r["metrics"][mode][split]["mean"][m], base["metrics"][mode][split]["mean"][m]
                )
                per_series.append({"series": r["series"], "model": r["model"], "estimator": r["estimator"],
                                   "split": split, "metric": m, "deviation": dev})
    groups: dict = {}
    for row in per_series:
        groups.setdefault((row["model"], row["estimator"], row["split"], row["metric"]), []).append(row["deviation"])
    table = []
    for (model, est, split, metric), vals in sorted(groups.items()):
        vals = np.asarray(vals)
        table.append({
            "model": model, "estimator": est, "split": split, "metric": metric,
            "mean": float(vals.mean()),
            "std": float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
            "n_series": int(len(vals)),
            "single_series": bool(len(vals) == 1),
        })
    return per_series, table


def cmd_compare(results_dir, out=None, mode: str = "metrics_at_mean") -> int:
    results_dir = Path(results_dir)
    _, table = compare_results(_load_results(results_dir), mode)
    out = Path(out) if out else results_dir
    out.mkdir(parents=True, exist_ok=True)
    fields = ["model", "estimator", "split", "metric", "mean", "std", "n_series", "single_series"]
    with (out / "compare.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(table)
    layout: dict = {}
    for row in table:
        layout.setdefault(row["model"], {}).setdefault(row["estimator"], {}).setdefault(row["split"], {})[
            row["metric"]] = {"mean": row["mean"], "std": row["std"]}
    write_json({"format_version": FORMAT_VERSION, "mode": mode, "unit": "percent of QML",
                "table": layout}, out / "compare.json")
    print(f"wrote {out / 'compare.csv'}")
    return EXIT_OK


def cmd_forecast(result_path, data_path, horizon: int, level: float, out, cfg: RunConfig | None = None) -> int:
    cfg = cfg or RunConfig()
    payload = json.loads(Path(result_path).read_text(encoding="utf-8"))
    spec = ModelSpec.parse(payload["model_label"], payload["dist"])
    history = load_returns(data_path, cfg.date_column, cfg.return_column)
    train, _ = split_train_test(history, payload["split"])
    samples = np.asarray(payload["samples"], dtype=float)
    if samples.shape[0] == 1:
        samples = np.vstack([samples, samples])
    h0 = backcast_variance(train.returns, max(spec.n_lags, 1))
    band = forecast_bands(spec, samples, history, horizon, level, h0=h0)
    out = Path(out)
    band.to_csv(out)
    meta = {"format_version": FORMAT_VERSION, "ordering": payload["ordering"], "level": level,
            "horizon": horizon, "source": str(result_path)}
    write_json(meta, out.with_suffix(".json"))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_simulate(model: str, params, T: int, seed: int, out, dist: str = "Normal") -> int:
    spec = ModelSpec.parse(model, dist)
    series = simulate(spec, np.asarray(params, dtype=float), T, seed=seed)
    write_returns(series, out)
    write_json({"format_version": FORMAT_VERSION, "ordering": ordering_tag(spec),
                "params": list(map(float, params)), "T": T, "seed": seed}, Path(out).with_suffix(".json"))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_convert_prices(path, out, date_column="date", price_column="price", scale=100.0) -> int:
    dates, prices = [], []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            dates.append(row[date_column])
            prices.append(float(row[price_column]))
    order = np.argsort(np.asarray(dates, dtype="datetime64[D]"))
    series = prices_to_returns(np.asarray(prices)[order], np.asarray(dates, dtype="datetime64[D]")[order], scale)
    write_returns(series, out)
    print(f"wrote {out}")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="garchvi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config")
        sp.add_argument("--data", help="CSV paths or globs, comma separated")
        sp.add_argument("--models", help='e.g. "GARCH(1,1),GJR-GARCH(1,1)"')
        sp.add_argument("--estimators", help=f"subset of {','.join(ESTIMATORS)}")
        sp.add_argument("--split", type=float)
        sp.add_argument("--tau", type=float)
        sp.add_argument("--iters", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--lr", type=float)
        sp.add_argument("--momentum", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--dist")

    common(sub.add_parser("fit", help="fit every series x model x estimator cell"))
    sp = sub.add_parser("compare", help="percentage deviations from QML")
    sp.add_argument("results")
    sp.add_argument("--out")
    sp.add_argument("--mode", default="metrics_at_mean", choices=["metrics_at_mean", "mean_of_metrics"])
    sp = sub.add_parser("forecast", help="variance forecast band from a fit result")
    sp.add_argument("result")
    sp.add_argument("--data", required=True)
    sp.add_argument("--horizon", type=int, default=20)
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--out", required=True)
    sp = sub.add_parser("simulate", help="simulate returns from a model")
    sp.add_argument("--models", required=True, help="a single model label")
    sp.add_argument("--params", required=True, help="comma-separated values in canonical order")
    sp.add_argument("--T", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dist", default="Normal")
    sp.add_argument("--out", required=True)
    sp = sub.add_parser("convert-prices", help="prices CSV to percent log returns CSV")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--date-column", default="date")
    sp.add_argument("--price-column", default="price")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "fit":
            return cmd_fit(build_config(args))
        if args.command == "compare":
            return cmd_compare(args.results, args.out, args.mode)
        if args.command == "forecast":
            return cmd_forecast(args.result, args.data, args.horizon, args.level, args.out)
        if args.command == "simulate":
            params = [float(x) for x in args.params.split(",")]
            return cmd_simulate(args.models, params, args.T, args.seed, args.out, args.dist)
        return cmd_convert_prices(args.data, args.out, args.date_column, args.price_column)
    except (GarchVIError, ValueError, FileNotFoundError) as exc:
        print(f"garchvi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
