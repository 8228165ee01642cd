"""Synthetic networks with known ground truth.

Two generators: a dyad-independent logistic tie model (truth = coefficient
vector) and a planted partition (truth = community labels).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .communities import Partition
from .errors import SpecError
from .geo import offset_km
from .model import Edge, Layer, Network, Researcher, Roster, canonical_attribute
from .regression import DyadTable, build_dyads, canonical_covariate, expit


@dataclass(frozen=True)
class FixedLocations:
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class BoxLocations:
    """Uniform in latitude and longitude (not in area) within a box."""

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float


@dataclass(frozen=True)
class ClusterLocations:
    """Node ``i`` sits near ``centers[i % k]`` with Gaussian north/east jitter."""

    centers: tuple[tuple[float, float], ...]
    spread_km: float = 50.0
    countries: Optional[tuple[str, ...]] = None


LocationModel = Union[FixedLocations, BoxLocations, ClusterLocations, None]


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    beta: Mapping[str, float]
    locations: LocationModel = None
    attributes: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    distance_scale: float = 100.0
    seed: int = 0
    directed: bool = True

    @property
    def covariates(self) -> tuple[str, ...]:
        return tuple(canonical_covariate(k) for k in self.beta if k != "intercept")


def node_ids(n: int, prefix: str = "r") -> list[str]:
    width = max(3, len(str(n - 1)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def _locations(model: LocationModel, n: int, rng: np.random.Generator):
    if model is None:
        return [None] * n, [None] * n
    if isinstance(model, FixedLocations):
        if len(model.points) != n:
            raise SpecError(f"fixed location list has {len(model.points)} points for {n} nodes")
        return [tuple(p) for p in model.points], [None] * n
    if isinstance(model, BoxLocations):
        lat = rng.uniform(model.lat_min, model.lat_max, n)
        lon = rng.uniform(model.lon_min, model.lon_max, n)
        return list(zip(lat.tolist(), lon.tolist())), [None] * n
    if isinstance(model, ClusterLocations):
        k = len(model.centers)
        if k == 0:
            raise SpecError("cluster location model needs at least one center")
        if model.countries is not None and len(model.countries) != k:
            raise SpecError("one country per cluster center is required")
        offsets = rng.normal(0.0, model.spread_km, (n, 2))
        locs = [offset_km(*model.centers[i % k], *offsets[i]) for i in range(n)]
        countries = [model.countries[i % k] if model.countries else None for i in range(n)]
        return locs, countries
    raise SpecError(f"unknown location model {model!r}")


def _sample_attributes(spec_attrs: Mapping[str, Mapping[str, float]], n: int, rng) -> dict[str, list]:
    out = {}
    for attr, weights in spec_attrs.items():
        key = canonical_attribute(attr)
        levels = list(weights)
        w = np.array([weights[lv] for lv in levels], dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise SpecError(f"invalid weights for attribute {attr!r}")
        out[key] = [levels[k] for k in rng.choice(len(levels), size=n, p=w / w.sum())]
    return out


def generate_dyadic_network(spec: GeneratorSpec) -> tuple[Roster, Network, DyadTable]:
    """Draw every dyad independently with probability ``expit(x'beta)``.

    The returned table is rebuilt from the generated network with
    :func:`~collabnet.regression.build_dyads` and checked against the draws.
    """
    if spec.n < 2:
        raise SpecError("need at least 2 nodes")
    if "intercept" not in spec.beta:
        raise SpecError("beta must include an 'intercept'")
    covs = spec.covariates
    attrs = {canonical_attribute(a): w for a, w in spec.attributes.items()}
    for cov in covs:
        if cov == "distance":
            if spec.locations is None:
                raise SpecError("a distance coefficient needs a location model")
            continue
        levels = [lv for lv, w in attrs.get(cov, {}).items() if w > 0]
        if len(levels) < 2:
            raise SpecError(f"covariate {cov!r} needs an attribute with at least two levels")
    rng = np.random.default_rng(spec.seed)
    ids = node_ids(spec.n)
    locs, countries = _locations(spec.locations, spec.n, rng)
    sampled = _sample_attributes(attrs, spec.n, rng)
    if any(c is not None for c in countries) and "country_residence" not in sampled:
        sampled["country_residence"] = countries
    roster = Roster(
        Researcher(ids[i], location=locs[i], **{a: vals[i] for a, vals in sampled.items()})
        for i in range(spec.n)
    )
    layer = Layer.INFORMATION if spec.directed else Layer.COAUTHORSHIP
    ordering = "ordered" if spec.directed else "unordered"
    empty = Network.build(ids, [], layer=layer)
    template = build_dyads(empty, roster, covs, ordering, spec.distance_scale)
    x, names = template.design(covs)
    beta = np.array([spec.beta["intercept"], *(spec.beta[k] for k in spec.beta if k != "intercept")])
    draws = rng.random(len(template)) < expit(x @ beta)
    edges = [Edge(a, b, 1.0) for a, b, hit in zip(template.i, template.j, draws) if hit]
    net = Network.build(ids, edges, layer=layer)
    table = build_dyads(net, roster, covs, ordering, spec.distance_scale)
    assert np.array_equal(table.outcome.astype(bool), draws), "dyad table does not match the draws"
    return roster, net, table


def generate_planted_partition(
    n_communities: int,
    sizes: Union[int, Sequence[int]],
    p_in: float,
    p_out: float,
    centers: Optional[Sequence[tuple[float, float]]] = None,
    spread_km: float = 50.0,
    seed: int = 0,
    countries: Optional[Sequence[str]] = None,
) -> tuple[Roster, Network, Partition]:
    """Undirected planted-partition graph with optional geographic clustering.

    Community ``c`` holds ``sizes[c]`` consecutive node ids.  Pairs inside a
    community are linked with probability ``p_in``, pairs across with
    ``p_out``.  With ``centers``, members of community ``c`` are scattered
    around ``centers[c]`` with ``spread_km`` Gaussian jitter.
    """
    if isinstance(sizes, int):
        sizes = [sizes] * n_communities
    sizes = list(sizes)
    if len(sizes) != n_communities or any(s < 1 for s in sizes):
        raise SpecError(f"sizes {sizes} do not describe {n_communities} communities")
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise SpecError("need 0 <= p_out <= p_in <= 1")
    if centers is not None and len(centers) != n_communities:
        raise SpecError("one center per community is required")
    if countries is not None and len(countries) != n_communities:
        raise SpecError("one country per community is required")
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    ids = node_ids(n)
    labels = np.repeat(np.arange(n_communities), sizes)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[ju], p_in, p_out)
    hits = rng.random(len(iu)) < prob
    edges = [Edge(ids[i], ids[j], 1.0) for i, j in zip(iu[hits], ju[hits])]
    offsets = rng.normal(0.0, spread_km, (n, 2))
    people = []
    for i in range(n):
        c = int(labels[i])
        loc = offset_km(*centers[c], *offsets[i]) if centers is not None else None
        people.append(Researcher(ids[i], location=loc,
                                 country_residence=countries[c] if countries is not None else None))
    net = Network.build(ids, edges, layer=Layer.COAUTHORSHIP)
    truth = Partition(tuple(ids), tuple(int(c) for c in labels))
    return Roster(people), net, truth


DEMO_SEED = 2023
DEMO_CENTERS = ((29.65, -82.32), (5.60, -0.19), (13.51, 2.11), (9.03, 38.74))
DEMO_COUNTRIES = ("US", "GH", "NE", "ET")


def demo_spec(seed: int = DEMO_SEED) -> GeneratorSpec:
    """Specification of the bundled demo co-authorship network."""
    return GeneratorSpec(
        n=80,
        beta={"intercept": -0.4, "distance": -0.08, "employer": -1.0, "discipline": -0.5,
              "education": -0.3, "gender": -0.2},
        locations=ClusterLocations(DEMO_CENTERS, spread_km=300.0, countries=DEMO_COUNTRIES),
        attributes={
            "gender": {"female": 0.45, "male": 0.55},
            "education": {"bachelor": 0.1, "masters": 0.3, "doctorate": 0.6},
            "discipline": {"geography": 0.3, "economics": 0.25, "agronomy": 0.25, "sociology": 0.2},
            "employer": {"UF": 0.35, "UG": 0.25, "UAM": 0.2, "ILRI": 0.2},
        },
        distance_scale=100.0,
        seed=seed,
        directed=False,
    )
