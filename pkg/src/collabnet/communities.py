"""Random-walk (walktrap) community detection and modularity."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from .errors import DegenerateInputError, IdentifierError
from .model import Network, undirected_view


@dataclass(frozen=True)
class Merge:
    step: int
    left: int
    right: int
    merged: int
    delta_sigma: float
    modularity: float


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to exactly one community (indices dense from 0)."""

    nodes: tuple[str, ...]
    labels: tuple[int, ...]
    modularity: float = 0.0
    walk_length: Optional[int] = None
    merges: tuple[Merge, ...] = field(default=(), repr=False)
    cut: int = 0
    q_trace: tuple[float, ...] = field(default=(), repr=False)

    @classmethod
    def from_assignment(cls, assignment: Mapping[str, int], nodes=None, **kw) -> "Partition":
        nodes = tuple(assignment) if nodes is None else tuple(nodes)
        raw = [assignment[n] for n in nodes]
        dense: dict = {}
        for lab in raw:
            dense.setdefault(lab, len(dense))
        return cls(nodes, tuple(dense[lab] for lab in raw), **kw)

    @property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.nodes, self.labels))

    @property
    def n_communities(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    @property
    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.n_communities).tolist()

    @property
    def communities(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.n_communities)]
        for node, lab in zip(self.nodes, self.labels):
            out[lab].append(node)
        return out

    @property
    def modularity_trace(self) -> list[float]:
        """Modularity after 0, 1, 2, ... merges."""
        return list(self.q_trace) if self.q_trace else [self.modularity]

    def same_grouping(self, other: "Partition") -> bool:
        """True when both partitions group the nodes identically (labels may differ)."""
        mine = sorted(sorted(c) for c in self.communities)
        theirs = sorted(sorted(c) for c in other.communities)
        return mine == theirs


def modularity(net: Network, partition: Union[Partition, Mapping[str, int]]) -> float:
    """Newman modularity on the undirected weighted view.

    Returns 0 for a network without edges.
    """
    assignment = partition.assignment if isinstance(partition, Partition) else dict(partition)
    for node in net.nodes:
        if node not in assignment:
            raise IdentifierError(f"node {node!r} is not covered by the partition")
    g = undirected_view(net)
    total = sum(e.weight for e in g.edges)
    if total == 0:
        return 0.0
    internal: dict = {}
    strength: dict = {}
    for s, d, w in g.edges:
        cs, cd = assignment[s], assignment[d]
        strength[cs] = strength.get(cs, 0.0) + w
        strength[cd] = strength.get(cd, 0.0) + w
        if cs == cd:
            internal[cs] = internal.get(cs, 0.0) + w
    q = 0.0
    for c in sorted(strength, key=repr):
        q += internal.get(c, 0.0) / total - (strength[c] / (2.0 * total)) ** 2
    return q


def _key(ds: float) -> float:
    # Quantise so that mathematically equal distances compare equal.
    return float(f"{ds:.11e}")


def walktrap(net: Network, t: int = 4) -> Partition:
    """Pons-Latapy agglomerative clustering with walks of length ``t``.

    Works on the undirected weighted view.  Isolated nodes stay singletons.
    Starting from singletons, the adjacent pair of communities with the
    smallest increase in mean squared walk distance is merged until no
    adjacent pairs remain; ties go to the smallest ``(id, id)`` pair.  The
    partition along that sequence with the highest modularity is returned,
    and the full merge history is kept on the result.
    """
    if t < 1:
        raise ValueError("walk length t must be >= 1")
    if net.n == 0:
        raise DegenerateInputError("empty network")
    g = undirected_view(net)
    n = g.n
    a = g.adjacency(weighted=True)
    deg = a.sum(axis=1)
    total = deg.sum() / 2.0
    if total == 0:
        return Partition(net.nodes, tuple(range(n)), 0.0, t)
    active = deg > 0
    p = np.zeros_like(a)
    p[active] = a[active] / deg[active, None]
    pt = np.linalg.matrix_power(p, t)
    scale = np.zeros(n)
    scale[active] = 1.0 / np.sqrt(deg[active])
    vec = {i: pt[i] * scale for i in range(n)}
    size = {i: 1 for i in range(n)}
    members = {i: [i] for i in range(n)}
    inner = {i: 0.0 for i in range(n)}
    strength = {i: float(deg[i]) for i in range(n)}
    links: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    for s, d, w in g.edges:
        i, j = g.index[s], g.index[d]
        links[i][j] = links[i].get(j, 0.0) + w
        links[j][i] = links[j].get(i, 0.0) + w

    def delta_sigma(c1: int, c2: int) -> float:
        diff = vec[c1] - vec[c2]
        return float(size[c1] * size[c2] / (size[c1] + size[c2]) * (diff @ diff) / n)

    dsig: dict[tuple[int, int], float] = {}
    heap: list = []
    for i in range(n):
        for j in links[i]:
            if i < j:
                ds = delta_sigma(i, j)
                dsig[(i, j)] = ds
                heapq.heappush(heap, (_key(ds), i, j))

    def q_of(c: int) -> float:
        return inner[c] / total - (strength[c] / (2.0 * total)) ** 2

    q = sum(q_of(i) for i in range(n))
    trace = [q]
    merges: list[Merge] = []
    next_id = n
    while heap:
        _, c1, c2 = heapq.heappop(heap)
        if (c1, c2) not in dsig:
            continue
        ds = dsig.pop((c1, c2))
        c3 = next_id
        next_id += 1
        q -= q_of(c1) + q_of(c2)
        size[c3] = size[c1] + size[c2]
        vec[c3] = (size[c1] * vec[c1] + size[c2] * vec[c2]) / size[c3]
        members[c3] = members[c1] + members[c2]
        inner[c3] = inner[c1] + inner[c2] + links[c1].get(c2, 0.0)
        strength[c3] = strength[c1] + strength[c2]
        merged_links: dict[int, float] = {}
        for old in (c1, c2):
            for other, w in links[old].items():
                if other in (c1, c2):
                    continue
                merged_links[other] = merged_links.get(other, 0.0) + w
                links[other].pop(old, None)
                dsig.pop((min(old, other), max(old, other)), None)
        links[c3] = merged_links
        for old in (c1, c2):
            del links[old], vec[old], members[old]
        q += q_of(c3)
        for other, w in merged_links.items():
            links[other][c3] = w
            ds_new = delta_sigma(other, c3)
            dsig[(other, c3)] = ds_new
            heapq.heappush(heap, (_key(ds_new), other, c3))
        merges.append(Merge(len(merges) + 1, c1, c2, c3, ds, q))
        trace.append(q)

    best = int(np.argmax(trace))
    parent = list(range(next_id))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in merges[:best]:
        parent[m.left] = m.merged
        parent[m.right] = m.merged
    roots = [find(i) for i in range(n)]
    part = Partition.from_assignment(dict(zip(net.nodes, roots)), net.nodes, walk_length=t,
                                     merges=tuple(merges), cut=best)
    exact_q = modularity(net, part)
    return Partition(part.nodes, part.labels, exact_q, t, tuple(merges), best, tuple(trace))


@dataclass(frozen=True)
class CommunitySummary:
    rows: list[tuple[int, int]]
    n_nodes: int
    singletons: int
    largest_share: float

    @property
    def n_communities(self) -> int:
        return len(self.rows)


def community_summary(partition: Partition) -> CommunitySummary:
    """Communities sorted by size (largest first, ties by index)."""
    sizes = partition.sizes
    rows = sorted(enumerate(sizes), key=lambda r: (-r[1], r[0]))
    n = len(partition.nodes)
    return CommunitySummary(
        rows=rows,
        n_nodes=n,
        singletons=sum(1 for s in sizes if s == 1),
        largest_share=(rows[0][1] / n) if rows else 0.0,
    )
