"""Permutation tests for geographic compactness and national segmentation
of communities.

The null model reassigns researchers to communities at random while keeping
the community-size profile fixed.  Singleton communities hold no pairs and
therefore never contribute to either statistic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .communities import Partition
from .errors import DegenerateInputError
from .geo import distance_matrix
from .model import Roster
from .parallel import map_replicates, replicate_rng

STATISTICS = ("mean_intra_distance", "same_country_share")
# Alternative that signals spatial or national clustering.
DEFAULT_DIRECTION = {"mean_intra_distance": "less", "same_country_share": "greater"}


@dataclass(frozen=True)
class PairData:
    """Pair values (``value``) and usability mask (``valid``) over partition nodes."""

    value: np.ndarray
    valid: np.ndarray


def _distance_pairs(partition: Partition, roster: Roster) -> PairData:
    d = distance_matrix([roster[v].location for v in partition.nodes])
    valid = ~np.isnan(d)
    np.fill_diagonal(valid, False)
    return PairData(np.where(valid, d, 0.0), valid.astype(float))


def _country_pairs(partition: Partition, roster: Roster) -> PairData:
    countries = roster.values("country_residence", partition.nodes)
    known = np.array([c is not None for c in countries])
    levels = {c: k for k, c in enumerate(sorted({c for c in countries if c is not None}))}
    codes = np.array([levels.get(c, -1) for c in countries])
    valid = known[:, None] & known[None, :]
    np.fill_diagonal(valid, False)
    same = (codes[:, None] == codes[None, :]) & valid
    return PairData(same.astype(float), valid.astype(float))


_PAIRS = {"mean_intra_distance": _distance_pairs, "same_country_share": _country_pairs}


def _statistic(labels: np.ndarray, pairs: PairData, pooled: bool) -> float:
    same = labels[:, None] == labels[None, :]
    if pooled:
        count = float(np.sum(pairs.valid * same))
        if count == 0:
            return float("nan")
        return float(np.sum(pairs.value * same)) / count
    k = int(labels.max()) + 1
    rows = np.broadcast_to(labels[:, None], same.shape)
    sums = np.bincount(rows[same], weights=(pairs.value * same)[same], minlength=k)
    counts = np.bincount(rows[same], weights=(pairs.valid * same)[same], minlength=k)
    use = counts > 0
    if not use.any():
        return float("nan")
    return float(np.mean(sums[use] / counts[use]))


def _evaluate(name: str, partition: Partition, roster: Roster, pooled: bool) -> float:
    value = _statistic(np.asarray(partition.labels), _PAIRS[name](partition, roster), pooled)
    if np.isnan(value):
        raise DegenerateInputError(f"{name}: no intra-community pairs with usable data")
    return value


def stat_mean_intra_distance(partition: Partition, roster: Roster, pooled: bool = True) -> float:
    """Mean great-circle distance (km) between members of the same community.

    ``pooled=True`` averages over all intra-community pairs at once;
    ``pooled=False`` averages the per-community means instead.  Pairs with a
    missing location are skipped.
    """
    return _evaluate("mean_intra_distance", partition, roster, pooled)


def stat_same_country_share(partition: Partition, roster: Roster, pooled: bool = True) -> float:
    """Share of intra-community pairs whose members share ``country_residence``."""
    return _evaluate("same_country_share", partition, roster, pooled)


@dataclass(frozen=True)
class PermTestResult:
    statistic: str
    observed: float
    permutations: int
    permuted_mean: float
    permuted_sd: float
    interval_low: float
    interval_high: float
    p_value: float
    direction: str
    seed: int
    communities_used: int
    pooled: bool = True
    values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def histogram(self, bins: int = 30) -> tuple[np.ndarray, np.ndarray]:
        """Bin edges and counts of the permutation distribution (observed included in the range)."""
        lo = min(float(self.values.min()), self.observed)
        hi = max(float(self.values.max()), self.observed)
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        counts, edges = np.histogram(self.values, bins=bins, range=(lo, hi))
        return edges, counts

    def summary(self) -> dict:
        return {
            "statistic": self.statistic,
            "observed": self.observed,
            "permutations": self.permutations,
            "permuted_mean": self.permuted_mean,
            "permuted_sd": self.permuted_sd,
            "interval_low": self.interval_low,
            "interval_high": self.interval_high,
            "p_value": self.p_value,
            "direction": self.direction,
            "seed": self.seed,
            "communities_used": self.communities_used,
            "pooled": self.pooled,
        }


def permutation_test(
    statistic: str,
    partition: Partition,
    roster: Roster,
    permutations: int = 1000,
    seed: int = 0,
    direction: str = "less",
    pooled: bool = True,
    threads: int = 1,
) -> PermTestResult:
    """Compare a community statistic with its size-preserving permutation null.

    Each replicate shuffles researchers over the observed community-size
    profile and recomputes the statistic.  The p-value counts replicates at
    least as extreme as the observed value in the chosen ``direction``
    (``"less"`` or ``"greater"``) with the add-one correction, so it is never 0.
    """
    if statistic not in _PAIRS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")
    if direction not in ("less", "greater"):
        raise ValueError("direction must be 'less' or 'greater'")
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    labels = np.asarray(partition.labels)
    pairs = _PAIRS[statistic](partition, roster)
    observed = _statistic(labels, pairs, pooled)
    if np.isnan(observed):
        raise DegenerateInputError(f"{statistic}: no intra-community pairs with usable data")

    def one(r: int) -> float:
        return _statistic(replicate_rng(seed, r).permutation(labels), pairs, pooled)

    values = np.array(map_replicates(one, permutations, threads))
    finite = values[~np.isnan(values)]
    if len(finite) == 0:
        raise DegenerateInputError(f"{statistic}: statistic undefined under every permutation")
    slack = 1e-12 * max(1.0, abs(observed))
    if direction == "less":
        extreme = np.count_nonzero(finite <= observed + slack)
    else:
        extreme = np.count_nonzero(finite >= observed - slack)
    low, high = np.percentile(finite, [2.5, 97.5])
    return PermTestResult(
        statistic=statistic,
        observed=observed,
        permutations=len(finite),
        permuted_mean=float(finite.mean()),
        permuted_sd=float(finite.std(ddof=1)) if len(finite) > 1 else 0.0,
        interval_low=float(low),
        interval_high=float(high),
        p_value=(1 + extreme) / (len(finite) + 1),
        direction=direction,
        seed=seed,
        communities_used=sum(1 for s in partition.sizes if s > 1),
        pooled=pooled,
        values=finite,
    )


def permuted_labels(partition: Partition, seed: int, index: int) -> np.ndarray:
    """Labels of replicate ``index``; exposes the null model for inspection."""
    return replicate_rng(seed, index).permutation(np.asarray(partition.labels))
