"""Writers for analysis results (CSV and JSON) and plot-data files."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .communities import CommunitySummary, Partition
from .homophily import EIReport
from .metrics import MEASURES, MetricsReport
from .permtest import PermTestResult
from .regression import CurvePoint, FitResult


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == 0:
            return "0"
        return format(v, ".12g")
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        w = csv.writer(handle, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_table(path, header: Sequence[str], rows: list[Sequence], fmt_: str) -> Path:
    """CSV, or JSON as a list of objects, depending on ``fmt_``."""
    path = Path(path)
    if fmt_ == "json":
        return write_json(path.with_suffix(".json"), [dict(zip(header, r)) for r in rows])
    return write_rows(path.with_suffix(".csv"), header, rows)


def write_metrics(path, report: MetricsReport, fmt_: str = "csv") -> Path:
    data = report.to_dict()
    path = Path(path)
    if fmt_ == "json":
        return write_json(path.with_suffix(".json"), data)
    return write_rows(path.with_suffix(".csv"), ("key", "value"), data.items())


def write_centrality(path, nodes: Sequence[str], scores: dict, fmt_: str = "csv") -> Path:
    rows = [[node, *(scores[m][node] for m in MEASURES)] for node in nodes]
    return write_table(path, ("id", *MEASURES), rows, fmt_)


EI_FIELDS = ("layer", "attribute", "ties_external", "ties_internal", "excluded_ties", "ei_raw",
             "ei_expected_mean", "ei_expected_sd", "ei_normalized", "permutations", "exhaustive", "seed")


def write_homophily(path, reports: Sequence[EIReport], fmt_: str = "csv") -> Path:
    rows = [[r.to_row()[f] for f in EI_FIELDS] for r in reports]
    return write_table(path, EI_FIELDS, rows, fmt_)


FIT_HEADER = ("term", "estimate", "std_error", "z", "p_value", "stars")


def fit_rows(fit: FitResult) -> list[list]:
    """Coefficient rows followed by the model-level statistics."""
    rows = [[name, fit.coef[k], fit.se[k], fit.z[k], fit.p[k], fit.stars[k]] for k, name in enumerate(fit.names)]
    rows += [
        ["AIC", fit.aic, None, None, None, None],
        ["BIC", fit.bic, None, None, None, None],
        ["LogLikelihood", fit.loglik, None, None, None, None],
        ["Deviance", fit.deviance, None, None, None, None],
        ["n_obs", fit.n_obs, None, None, None, None],
    ]
    return rows


def write_fit(path, fit: FitResult, fmt_: str = "csv") -> Path:
    if fmt_ == "json":
        payload = {
            "coefficients": [dict(zip(FIT_HEADER, r)) for r in fit_rows(fit)[: fit.k]],
            "aic": fit.aic, "bic": fit.bic, "loglik": fit.loglik, "deviance": fit.deviance,
            "n_obs": fit.n_obs, "k": fit.k, "iterations": fit.iterations, "converged": fit.converged,
            "dropped_columns": list(fit.dropped_columns), "distance_scale_km": fit.distance_scale,
            "covariance": fit.cov,
        }
        return write_json(Path(path).with_suffix(".json"), payload)
    return write_rows(Path(path).with_suffix(".csv"), FIT_HEADER, fit_rows(fit))


def write_curve(path, points: Sequence[CurvePoint], fmt_: str = "csv") -> Path:
    rows = [[p.distance_km, p.p_hat, p.lo, p.hi] for p in points]
    return write_table(path, ("distance_km", "p_hat", "lo", "hi"), rows, fmt_)


def write_partition(path, partition: Partition, fmt_: str = "csv") -> Path:
    return write_table(path, ("id", "community"), list(zip(partition.nodes, partition.labels)), fmt_)


def write_community_summary(path, summary: CommunitySummary, fmt_: str = "csv") -> Path:
    return write_table(path, ("community", "size"), [list(r) for r in summary.rows], fmt_)


def write_merges(path, partition: Partition, fmt_: str = "csv") -> Path:
    rows = [[m.step, m.left, m.right, m.merged, m.delta_sigma, m.modularity] for m in partition.merges]
    return write_table(path, ("step", "left", "right", "merged", "delta_sigma", "modularity"), rows, fmt_)


def write_permtest_summary(path, results: Sequence[PermTestResult], fmt_: str = "csv") -> Path:
    if not results:
        return write_table(path, ("statistic",), [], fmt_)
    header = tuple(results[0].summary())
    return write_table(path, header, [list(r.summary().values()) for r in results], fmt_)


def write_histogram(path, result: PermTestResult, bins: int = 30) -> Path:
    """Histogram bins plus the observed value and 95% interval in every row."""
    edges, counts = result.histogram(bins)
    rows = [[edges[k], edges[k + 1], counts[k], result.observed, result.interval_low, result.interval_high]
            for k in range(len(counts))]
    return write_rows(Path(path).with_suffix(".csv"),
                      ("bin_low", "bin_high", "count", "observed", "interval_low", "interval_high"), rows)
