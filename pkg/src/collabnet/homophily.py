"""E-I index with a label-permutation null model."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, fields, replace
from itertools import combinations
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import DegenerateInputError
from .model import Network, Roster, canonical_attribute
from .parallel import map_replicates, replicate_rng

EXHAUSTIVE_LIMIT = 100_000

# Attribute panel reported per layer.
DEFAULT_ATTRIBUTES = ("discipline", "education", "employer", "gender", "country_origin",
                      "country_residence", "race_ethnicity")


@dataclass(frozen=True)
class EIReport:
    attribute: str
    ties_external: int
    ties_internal: int
    excluded_ties: int
    ei_raw: float
    ei_expected_mean: Optional[float] = None
    ei_expected_sd: Optional[float] = None
    ei_normalized: Optional[float] = None
    permutations: int = 0
    exhaustive: bool = False
    seed: Optional[int] = None
    layer: Optional[str] = None

    def to_row(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _codes(net: Network, roster: Roster, attribute: str) -> np.ndarray:
    """Integer codes per node; -1 marks a missing value."""
    values = roster.values(attribute, net.nodes)
    levels = {v: k for k, v in enumerate(sorted({v for v in values if v is not None}))}
    return np.array([-1 if v is None else levels[v] for v in values], dtype=np.int64)


def _edge_arrays(net: Network) -> tuple[np.ndarray, np.ndarray]:
    idx = net.index
    src = np.array([idx[e.src] for e in net.edges], dtype=np.int64)
    dst = np.array([idx[e.dst] for e in net.edges], dtype=np.int64)
    return src, dst


def _ei(labels: np.ndarray, src: np.ndarray, dst: np.ndarray) -> float:
    internal = int(np.count_nonzero(labels[src] == labels[dst]))
    total = len(src)
    return (total - 2 * internal) / total


def ei_index(net: Network, roster: Roster, attribute: str) -> EIReport:
    """Raw E-I index ``(E - I) / (E + I)`` for one attribute.

    Ties with a missing value at either end are excluded and counted.  On a
    directed layer every arc counts separately.
    """
    attribute = canonical_attribute(attribute)
    codes = _codes(net, roster, attribute)
    src, dst = _edge_arrays(net)
    known = (codes[src] >= 0) & (codes[dst] >= 0) if len(src) else np.zeros(0, bool)
    if not known.any():
        raise DegenerateInputError(f"no ties with both {attribute} values known")
    s, d = src[known], dst[known]
    internal = int(np.count_nonzero(codes[s] == codes[d]))
    external = len(s) - internal
    return EIReport(
        attribute=attribute,
        ties_external=external,
        ties_internal=internal,
        excluded_ties=int(len(src) - len(s)),
        ei_raw=(external - internal) / (external + internal),
        layer=net.layer.value if net.layer is not None else None,
    )


def count_assignments(counts: Iterable[int]) -> int:
    """Number of distinct ways to place labels with the given group sizes."""
    counts = list(counts)
    total = math.factorial(sum(counts))
    for c in counts:
        total //= math.factorial(c)
    return total


def _distinct_assignments(counts: list[int], n: int) -> Iterator[np.ndarray]:
    # Choose positions for group 0, then group 1 among the rest, and so on.
    def rec(g: int, free: tuple[int, ...], labels: np.ndarray):
        if g == len(counts) - 1:
            out = labels.copy()
            out[list(free)] = g
            yield out
            return
        for chosen in combinations(free, counts[g]):
            labels[list(chosen)] = g
            taken = set(chosen)
            rest = tuple(p for p in free if p not in taken)
            yield from rec(g + 1, rest, labels)

    yield from rec(0, tuple(range(n)), np.zeros(n, dtype=np.int64))


def ei_normalized(
    net: Network,
    roster: Roster,
    attribute: str,
    permutations: int = 1000,
    seed: int = 0,
    exhaustive: Optional[bool] = None,
    threads: int = 1,
) -> EIReport:
    """E-I index standardised against label permutations.

    Known attribute values are shuffled across the nodes that carry them, so
    group sizes and the tie set stay fixed.  The normalised score is
    ``(raw - mean) / sd`` of the permutation distribution and 0 when that
    distribution has no spread.  When the number of distinct label
    assignments is at most ``EXHAUSTIVE_LIMIT`` (or ``exhaustive=True``), the
    full distribution is enumerated instead of sampled; ``permutations`` then
    reports the number of assignments evaluated.
    """
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    raw = ei_index(net, roster, attribute)
    codes = _codes(net, roster, raw.attribute)
    src, dst = _edge_arrays(net)
    known_nodes = np.flatnonzero(codes >= 0)
    keep = (codes[src] >= 0) & (codes[dst] >= 0)
    # Re-index the retained ties onto the known nodes only.
    pos = -np.ones(net.n, dtype=np.int64)
    pos[known_nodes] = np.arange(len(known_nodes))
    s, d = pos[src[keep]], pos[dst[keep]]
    base = codes[known_nodes]
    counts = [c for _, c in sorted(Counter(base.tolist()).items())]
    n_assign = count_assignments(counts)
    if exhaustive is None:
        exhaustive = n_assign <= EXHAUSTIVE_LIMIT

    if exhaustive:
        values = np.array([_ei(lab, s, d) for lab in _distinct_assignments(counts, len(base))])
    else:
        def one(r: int) -> float:
            return _ei(replicate_rng(seed, r).permutation(base), s, d)

        values = np.array(map_replicates(one, permutations, threads))
    if values.min() == values.max():
        mean, sd = float(values[0]), 0.0
    else:
        mean, sd = float(values.mean()), float(values.std())
    norm = 0.0 if sd == 0.0 else (raw.ei_raw - mean) / sd
    return replace(
        raw,
        ei_expected_mean=mean,
        ei_expected_sd=sd,
        ei_normalized=norm,
        permutations=len(values),
        exhaustive=bool(exhaustive),
        seed=seed,
    )


def ei_table(net: Network, roster: Roster, attributes=DEFAULT_ATTRIBUTES, permutations: int = 1000,
             seed: int = 0, threads: int = 1) -> list[EIReport]:
    """Normalised E-I reports for every attribute that has at least one usable tie."""
    out = []
    for attr in attributes:
        try:
            out.append(ei_normalized(net, roster, attr, permutations, seed, threads=threads))
        except DegenerateInputError:
            continue
    return out
