"""Attributed graph data model and basic graph primitives.

Everything here is immutable once built.  Networks store node ids only;
researcher attributes live in a :class:`Roster` that analyses take alongside
the network.
"""
from __future__ import annotations

import enum
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import DataError, DuplicateIdentifierError, IdentifierError

log = logging.getLogger(__name__)

EDUCATION_LEVELS = ("high school", "bachelor", "masters", "doctorate")

ATTRIBUTES = (
    "gender",
    "education",
    "discipline",
    "employer",
    "country_origin",
    "country_residence",
    "race_ethnicity",
)

# Long-form names accepted wherever an attribute name is expected.
ATTRIBUTE_ALIASES = {
    "country_of_origin": "country_origin",
    "country_of_residence": "country_residence",
    "race": "race_ethnicity",
    "origin": "country_origin",
    "residence": "country_residence",
}


def canonical_attribute(name: str) -> str:
    key = ATTRIBUTE_ALIASES.get(name, name)
    if key not in ATTRIBUTES:
        raise IdentifierError(f"unknown attribute {name!r}")
    return key


def parse_education(value: Optional[str]) -> Optional[str]:
    """Normalise an education string to one of :data:`EDUCATION_LEVELS`."""
    if value is None:
        return None
    text = value.strip().lower().replace("_", " ").replace("-", " ")
    text = " ".join(text.split())
    aliases = {"highschool": "high school", "master": "masters", "phd": "doctorate",
               "doctoral": "doctorate", "bachelors": "bachelor"}
    text = aliases.get(text, text)
    if text not in EDUCATION_LEVELS:
        raise DataError(f"education value {value!r} is not one of {EDUCATION_LEVELS}")
    return text


class Layer(str, enum.Enum):
    INFORMATION = "information"
    TRUST = "trust"
    COAUTHORSHIP = "coauthorship"

    @property
    def directed(self) -> bool:
        return self is not Layer.COAUTHORSHIP


@dataclass(frozen=True)
class Researcher:
    id: str
    label: Optional[str] = None
    gender: Optional[str] = None
    education: Optional[str] = None
    discipline: Optional[str] = None
    employer: Optional[str] = None
    country_origin: Optional[str] = None
    country_residence: Optional[str] = None
    race_ethnicity: Optional[str] = None
    location: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id.strip():
            raise DataError("researcher id must be a non-empty string")
        if self.education is not None:
            object.__setattr__(self, "education", parse_education(self.education))
        if self.location is not None:
            lat, lon = (float(v) for v in self.location)
            if not (math.isfinite(lat) and math.isfinite(lon)):
                raise DataError(f"{self.id}: non-finite coordinates")
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise DataError(f"{self.id}: coordinates out of range ({lat}, {lon})")
            object.__setattr__(self, "location", (lat, lon))

    def attribute(self, name: str) -> Optional[str]:
        return getattr(self, canonical_attribute(name))


class Roster:
    """Ordered collection of researchers with unique ids."""

    def __init__(self, researchers: Iterable[Researcher] = ()):
        self._items: tuple[Researcher, ...] = tuple(researchers)
        self._by_id: dict[str, Researcher] = {}
        for r in self._items:
            if r.id in self._by_id:
                raise DuplicateIdentifierError(f"duplicate researcher id {r.id!r}")
            self._by_id[r.id] = r

    @classmethod
    def from_ids(cls, ids: Iterable[str]) -> "Roster":
        return cls(Researcher(i) for i in ids)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self._items)

    def __getitem__(self, rid: str) -> Researcher:
        try:
            return self._by_id[rid]
        except KeyError:
            raise IdentifierError(f"unknown researcher id {rid!r}") from None

    def __contains__(self, rid) -> bool:
        return rid in self._by_id

    def __iter__(self) -> Iterator[Researcher]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Roster) and self._items == other._items

    def __repr__(self) -> str:
        return f"Roster(n={len(self)})"

    def values(self, attribute: str, ids: Optional[Iterable[str]] = None) -> list[Optional[str]]:
        attr = canonical_attribute(attribute)
        ids = self.ids if ids is None else ids
        return [getattr(self[i], attr) for i in ids]


class Edge(NamedTuple):
    src: str
    dst: str
    weight: float = 1.0


@dataclass(frozen=True)
class Network:
    """A single layer of ties over a fixed node set.

    Build instances with :meth:`Network.build`, which canonicalises the edge
    list; the raw constructor trusts its input.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    directed: bool
    layer: Optional[Layer] = None
    _meta: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def build(
        cls,
        nodes: Iterable[str],
        edges: Iterable,
        directed: Optional[bool] = None,
        layer: Optional[Layer | str] = None,
    ) -> "Network":
        """Validate and canonicalise an edge list.

        Self-loops are dropped with a warning.  Duplicate ties are collapsed
        for unweighted layers and accumulate weight for co-authorship (or any
        undirected network without a layer).  Undirected edges are stored with
        ``src < dst``.
        """
        layer = Layer(layer) if layer is not None else None
        if directed is None:
            directed = layer.directed if layer is not None else False
        if layer is not None and directed != layer.directed:
            raise DataError(f"layer {layer.value} must have directed={layer.directed}")
        nodes = tuple(nodes)
        known = set(nodes)
        if len(known) != len(nodes):
            dup = sorted(n for n in known if nodes.count(n) > 1)[0]
            raise DuplicateIdentifierError(f"duplicate node id {dup!r}")
        unweighted = layer in (Layer.INFORMATION, Layer.TRUST)
        accumulate = not directed and not unweighted
        weights: dict[tuple[str, str], float] = {}
        loops = 0
        for e in edges:
            src, dst, *rest = e
            w = float(rest[0]) if rest else 1.0
            for endpoint in (src, dst):
                if endpoint not in known:
                    raise IdentifierError(f"edge endpoint {endpoint!r} is not in the roster")
            if not (w > 0 and math.isfinite(w)):
                raise DataError(f"edge ({src}, {dst}) has non-positive weight {w}")
            if src == dst:
                loops += 1
                continue
            if unweighted:
                w = 1.0
            key = (src, dst) if directed or src < dst else (dst, src)
            if key in weights and accumulate:
                weights[key] += w
            else:
                weights.setdefault(key, w)
        if loops:
            log.warning("dropped %d self-loop(s)", loops)
        order = {n: i for i, n in enumerate(nodes)}
        keys = sorted(weights, key=lambda k: (order[k[0]], order[k[1]]))
        return cls(nodes, tuple(Edge(s, d, weights[(s, d)]) for s, d in keys), directed, layer,
                   {"self_loops_dropped": loops})

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def out_neighbors(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in self.nodes]
        for s, d, _ in self.edges:
            adj[self.index[s]].add(self.index[d])
            if not self.directed:
                adj[self.index[d]].add(self.index[s])
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def in_neighbors(self) -> tuple[frozenset[int], ...]:
        if not self.directed:
            return self.out_neighbors
        adj = [set() for _ in self.nodes]
        for s, d, _ in self.edges:
            adj[self.index[d]].add(self.index[s])
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        """Neighbour sets ignoring direction."""
        if not self.directed:
            return self.out_neighbors
        return tuple(o | i for o, i in zip(self.out_neighbors, self.in_neighbors))

    def has_edge(self, src: str, dst: str) -> bool:
        i, j = self._idx(src), self._idx(dst)
        return j in self.out_neighbors[i]

    def _idx(self, node: str) -> int:
        try:
            return self.index[node]
        except KeyError:
            raise IdentifierError(f"unknown node id {node!r}") from None

    def adjacency(self, weighted: bool = False):
        """Dense adjacency matrix (numpy) in node order."""
        import numpy as np

        a = np.zeros((self.n, self.n))
        for s, d, w in self.edges:
            i, j = self.index[s], self.index[d]
            a[i, j] += w if weighted else 1.0
            if not self.directed:
                a[j, i] += w if weighted else 1.0
        return a


def degree(net: Network, node: str, mode: str = "total", weighted: bool = False) -> float:
    """Degree of ``node``; ``mode`` is ``in``, ``out`` or ``total``.

    Undirected networks report the same value for every mode.
    """
    i = net._idx(node)
    if mode not in ("in", "out", "total"):
        raise ValueError(f"unknown degree mode {mode!r}")
    if not weighted:
        if not net.directed:
            return len(net.out_neighbors[i])
        if mode == "in":
            return len(net.in_neighbors[i])
        if mode == "out":
            return len(net.out_neighbors[i])
        return len(net.in_neighbors[i]) + len(net.out_neighbors[i])
    total = 0.0
    for s, d, w in net.edges:
        if not net.directed:
            total += w * ((s == node) + (d == node))
        elif mode in ("out", "total") and s == node:
            total += w
        elif mode in ("in", "total") and d == node:
            total += w
    return total


def _bfs(adj, source: int) -> list[Optional[int]]:
    dist: list[Optional[int]] = [None] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path_lengths(net: Network, source: str, respect_direction: bool = True) -> dict[str, Optional[int]]:
    """Hop distances from ``source``; unreachable nodes map to ``None``."""
    adj = net.out_neighbors if respect_direction else net.neighbors
    dist = _bfs(adj, net._idx(source))
    return dict(zip(net.nodes, dist))


def undirected_view(net: Network) -> Network:
    """Symmetrise: ``{i, j}`` exists iff either direction does, weights summed."""
    if not net.directed:
        return net
    weights: dict[tuple[str, str], float] = {}
    for s, d, w in net.edges:
        key = (s, d) if s < d else (d, s)
        weights[key] = weights.get(key, 0.0) + w
    order = net.index
    keys = sorted(weights, key=lambda k: (order[k[0]], order[k[1]]))
    return Network(net.nodes, tuple(Edge(s, d, weights[(s, d)]) for s, d in keys), False, net.layer)


def connected_components(net: Network) -> list[set[str]]:
    """Weak components, ordered by their first node in roster order."""
    seen = [False] * net.n
    comps = []
    for start in range(net.n):
        if seen[start]:
            continue
        dist = _bfs(net.neighbors, start)
        members = [i for i, d in enumerate(dist) if d is not None]
        for i in members:
            seen[i] = True
        comps.append({net.nodes[i] for i in members})
    return comps
