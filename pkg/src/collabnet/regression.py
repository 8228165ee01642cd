"""Dyadic logistic regression of tie formation on distance covariates.

Each dyad (pair of researchers) is one observation.  The outcome is whether
the tie exists; covariates are the geographic distance between the pair and
0/1 indicators that are 0 when the two share an attribute value.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (ConvergenceError, DegenerateInputError, IdentifierError, RankDeficiencyError,
                     SeparationError)
from .geo import distance_matrix, haversine_km  # noqa: F401  (re-exported)
from .model import ATTRIBUTE_ALIASES, ATTRIBUTES, Network, Roster, canonical_attribute

log = logging.getLogger(__name__)

DEFAULT_COVARIATES = ("distance", "education", "employer", "gender", "discipline")
DEFAULT_DISTANCE_SCALE = 100.0
MAX_ITER = 100
TOL = 1e-8


def canonical_covariate(name: str) -> str:
    if name in ("distance", "distance_km"):
        return "distance"
    key = name[len("diff_"):] if name.startswith("diff_") else name
    if key in ATTRIBUTES or key in ATTRIBUTE_ALIASES:
        return canonical_attribute(key)
    raise IdentifierError(f"unknown covariate {name!r}")


@dataclass(frozen=True)
class DyadTable:
    """Design table with one row per dyad.

    ``distance_km`` holds raw kilometres; :meth:`design` divides by
    ``distance_scale``.  Attribute columns are keyed ``diff_<attribute>``.
    """

    ordering: str
    i: tuple[str, ...]
    j: tuple[str, ...]
    outcome: np.ndarray
    columns: dict
    covariates: tuple[str, ...]
    distance_scale: float = DEFAULT_DISTANCE_SCALE
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.outcome)

    @property
    def distance_km(self) -> Optional[np.ndarray]:
        return self.columns.get("distance_km")

    def column(self, covariate: str) -> np.ndarray:
        cov = canonical_covariate(covariate)
        key = "distance_km" if cov == "distance" else f"diff_{cov}"
        if key not in self.columns:
            raise IdentifierError(f"covariate {covariate!r} is not in the dyad table")
        col = self.columns[key]
        return col / self.distance_scale if cov == "distance" else col.astype(float)

    def design(self, include: Optional[Sequence[str]] = None) -> tuple[np.ndarray, list[str]]:
        names = [canonical_covariate(c) for c in (include if include is not None else self.covariates)]
        cols = [np.ones(len(self))] + [self.column(c) for c in names]
        return np.column_stack(cols), ["intercept", *names]

    def equals(self, other: "DyadTable") -> bool:
        return (
            self.ordering == other.ordering
            and self.i == other.i
            and self.j == other.j
            and np.array_equal(self.outcome, other.outcome)
            and self.columns.keys() == other.columns.keys()
            and all(np.array_equal(self.columns[k], other.columns[k]) for k in self.columns)
            and self.distance_scale == other.distance_scale
        )


def build_dyads(
    net: Network,
    roster: Roster,
    covariates: Sequence[str] = DEFAULT_COVARIATES,
    ordering: Optional[str] = None,
    distance_scale: float = DEFAULT_DISTANCE_SCALE,
) -> DyadTable:
    """Build the dyad table for ``net``.

    Ordered tables hold ``n(n-1)`` rows (every ``i != j``); unordered tables
    hold ``n(n-1)/2`` rows with ``i`` before ``j`` in node order.  The outcome
    of an unordered dyad on a directed layer is 1 when either arc exists.
    Rows missing any requested covariate (or a location, when distance is
    requested) are dropped and counted in ``dropped``.
    """
    if ordering is None:
        ordering = "ordered" if net.directed else "unordered"
    if ordering not in ("ordered", "unordered"):
        raise ValueError(f"ordering must be 'ordered' or 'unordered', not {ordering!r}")
    if not distance_scale > 0:
        raise ValueError("distance_scale must be positive")
    covs = tuple(dict.fromkeys(canonical_covariate(c) for c in covariates))
    for node in net.nodes:
        roster[node]
    n = net.n
    if ordering == "ordered":
        ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    else:
        ii, jj = np.triu_indices(n, k=1)
    a = net.adjacency() > 0
    if ordering == "ordered" or not net.directed:
        y = a[ii, jj]
    else:
        y = a[ii, jj] | a[jj, ii]
    valid = np.ones(len(ii), dtype=bool)
    columns = {}
    for cov in covs:
        if cov == "distance":
            d = distance_matrix([roster[v].location for v in net.nodes])[ii, jj]
            valid &= ~np.isnan(d)
            columns["distance_km"] = d
        else:
            vals = roster.values(cov, net.nodes)
            levels = {v: k for k, v in enumerate(sorted({v for v in vals if v is not None}))}
            codes = np.array([-1 if v is None else levels[v] for v in vals])
            ci, cj = codes[ii], codes[jj]
            valid &= (ci >= 0) & (cj >= 0)
            columns[f"diff_{cov}"] = (ci != cj).astype(np.int8)
    dropped = int(len(valid) - valid.sum())
    if not valid.any():
        raise DegenerateInputError("no dyads left after dropping rows with missing covariates")
    nodes = np.array(net.nodes, dtype=object)
    return DyadTable(
        ordering=ordering,
        i=tuple(nodes[ii[valid]]),
        j=tuple(nodes[jj[valid]]),
        outcome=y[valid].astype(np.int8),
        columns={k: v[valid] for k, v in columns.items()},
        covariates=covs,
        distance_scale=float(distance_scale),
        dropped=dropped,
    )


def expit(eta):
    eta = np.asarray(eta, dtype=float)
    e = np.exp(-np.abs(eta))
    return np.where(eta >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def loglik(beta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    eta = x @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def score(beta: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of :func:`loglik` with respect to ``beta``."""
    return x.T @ (y - expit(x @ beta))


def information(beta: np.ndarray, x: np.ndarray) -> np.ndarray:
    p = expit(x @ beta)
    return (x * (p * (1 - p))[:, None]).T @ x


def _stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def _normal_two_sided(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


@dataclass(frozen=True)
class FitResult:
    names: tuple[str, ...]
    coef: np.ndarray
    cov: np.ndarray
    loglik: float = float("nan")
    n_obs: int = 0
    iterations: int = 0
    converged: bool = True
    dropped_columns: tuple[str, ...] = ()
    distance_scale: float = DEFAULT_DISTANCE_SCALE
    loglik_trace: tuple[float, ...] = field(default=(), repr=False)

    @classmethod
    def from_coefficients(cls, coefficients: Mapping[str, float], cov=None,
                          distance_scale: float = DEFAULT_DISTANCE_SCALE) -> "FitResult":
        """A fit built from published or hand-picked estimates (no data)."""
        names = tuple(coefficients)
        k = len(names)
        cov = np.zeros((k, k)) if cov is None else np.asarray(cov, dtype=float)
        return cls(names, np.array([coefficients[n] for n in names], dtype=float), cov,
                   distance_scale=distance_scale)

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))

    @property
    def z(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coef / self.se

    @property
    def p(self) -> np.ndarray:
        return np.array([_normal_two_sided(z) if np.isfinite(z) else (0.0 if np.isinf(z) else np.nan)
                         for z in self.z])

    @property
    def stars(self) -> tuple[str, ...]:
        return tuple(_stars(p) for p in self.p)

    @property
    def deviance(self) -> float:
        return -2.0 * self.loglik

    @property
    def aic(self) -> float:
        return self.deviance + 2 * self.k

    @property
    def bic(self) -> float:
        return self.deviance + self.k * math.log(self.n_obs)

    def coefficient(self, name: str) -> float:
        return float(self.coef[self._pos(name)])

    def _pos(self, name: str) -> int:
        key = name if name == "intercept" else canonical_covariate(name)
        try:
            return self.names.index(key)
        except ValueError:
            raise IdentifierError(f"covariate {name!r} is not in the fit") from None

    def confint(self, level_z: float = 1.959963984540054) -> np.ndarray:
        return np.column_stack([self.coef - level_z * self.se, self.coef + level_z * self.se])


def _check_rank(x: np.ndarray, names: list[str]) -> None:
    for k in range(1, x.shape[1] + 1):
        if np.linalg.matrix_rank(x[:, :k]) < k:
            raise RankDeficiencyError(names[k - 1])


def fit_logistic(table: DyadTable, include: Optional[Sequence[str]] = None,
                 max_iter: int = MAX_ITER, tol: float = TOL) -> FitResult:
    """Maximum-likelihood logistic fit by iteratively reweighted least squares.

    Constant covariate columns are dropped (and listed in
    ``dropped_columns``) before the rank check.  Each Newton step is halved
    until the log-likelihood does not decrease.  Iteration stops once the
    log-likelihood changes by less than ``tol``; a final Newton step then
    drives the score to rounding level.  Standard errors come from
    the inverse information matrix at the estimate.

    Raises
    ------
    SeparationError
        The likelihood flattens while coefficients keep moving.
    RankDeficiencyError
        A covariate is a linear combination of earlier columns.
    ConvergenceError
        No convergence within ``max_iter`` iterations.
    """
    x, names = table.design(include)
    y = table.outcome.astype(float)
    if y.min() == y.max():
        raise DegenerateInputError("outcome has a single class; need at least one 0 and one 1")
    keep = [0] + [c for c in range(1, x.shape[1]) if np.ptp(x[:, c]) > 0]
    dropped = tuple(names[c] for c in range(1, x.shape[1]) if c not in keep)
    if dropped:
        log.warning("dropping constant covariate column(s): %s", ", ".join(dropped))
    x = x[:, keep]
    names = [names[c] for c in keep]
    _check_rank(x, names)

    beta = np.zeros(x.shape[1])
    ll = loglik(beta, x, y)
    trace = [ll]
    converged = False
    step = np.zeros_like(beta)
    it = 0
    for it in range(1, max_iter + 1):
        try:
            step = np.linalg.solve(information(beta, x), score(beta, x, y))
        except np.linalg.LinAlgError:
            raise SeparationError("information matrix became singular; the outcome is separated") from None
        new_ll = loglik(beta + step, x, y)
        halvings = 0
        while new_ll < ll and halvings < 50:
            step /= 2.0
            new_ll = loglik(beta + step, x, y)
            halvings += 1
        if new_ll < ll:
            step[:] = 0.0
            new_ll = ll
        beta = beta + step
        change = new_ll - ll
        ll = new_ll
        trace.append(ll)
        if abs(change) < tol:
            converged = True
            break
    if not np.all(np.isfinite(beta)) or (converged and np.max(np.abs(step)) > 1e-3) or ll > -1e-6:
        worst = names[int(np.argmax(np.abs(beta)))]
        raise SeparationError(
            f"coefficients diverge (largest |beta| on {worst!r} = {np.max(np.abs(beta)):.3g}); "
            "the outcome is perfectly or quasi-perfectly separated"
        )
    if not converged:
        raise ConvergenceError(f"IRLS did not converge in {max_iter} iterations")
    # The log-likelihood test can fire while the score is still O(step^2).
    # One more Newton step brings it to rounding level; log-likelihood
    # differences are noise this close, so the step is judged by the score.
    grad = score(beta, x, y)
    candidate = beta + np.linalg.solve(information(beta, x), grad)
    if np.max(np.abs(score(candidate, x, y))) < np.max(np.abs(grad)):
        beta = candidate
        ll = loglik(beta, x, y)
    cov = np.linalg.inv(information(beta, x))
    cov = (cov + cov.T) / 2.0
    return FitResult(
        names=tuple(names),
        coef=beta,
        cov=cov,
        loglik=ll,
        n_obs=len(y),
        iterations=it,
        converged=converged,
        dropped_columns=dropped,
        distance_scale=table.distance_scale,
        loglik_trace=tuple(trace),
    )


@dataclass(frozen=True)
class CurvePoint:
    distance_km: float
    p_hat: float
    lo: float
    hi: float


def predict_curve(fit: FitResult, distances_km: Sequence[float],
                  fixed: Optional[Mapping[str, float]] = None, z: float = 1.959963984540054) -> list[CurvePoint]:
    """Fitted tie probability along a distance grid with a delta-method band.

    Covariates not named in ``fixed`` are held at 0 (the pair shares that
    attribute).  The band is ``expit(eta +/- z * se(eta))``, so it always
    stays inside [0, 1].  Points are returned sorted by distance.
    """
    fixed = dict(fixed or {})
    base = np.zeros(fit.k)
    base[fit._pos("intercept")] = 1.0
    dpos = fit._pos("distance")
    for name, value in fixed.items():
        pos = fit._pos(name)
        if pos == dpos:
            raise ValueError("distance is varied along the grid; do not fix it")
        base[pos] = float(value)
    grid = sorted(set(float(d) for d in distances_km))
    if any(d < 0 for d in grid):
        raise ValueError("distances must be non-negative")
    out = []
    for d in grid:
        xv = base.copy()
        xv[dpos] = d / fit.distance_scale
        eta = float(xv @ fit.coef)
        se = math.sqrt(max(0.0, float(xv @ fit.cov @ xv)))
        out.append(CurvePoint(d, float(expit(eta)), float(expit(eta - z * se)), float(expit(eta + z * se))))
    return out
