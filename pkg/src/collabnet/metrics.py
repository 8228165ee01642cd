"""Descriptive whole-network metrics and Freeman centralization.

Geodesics are hop counts; edge weights never enter these measures.
Centrality scores are computed on the undirected view so that directed
survey layers and the undirected co-authorship layer share one scale.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateInputError
from .model import Network, _bfs, connected_components, undirected_view

MEASURES = ("degree", "betweenness", "closeness", "eigenvector")


def density(net: Network) -> float:
    n, m = net.n, net.m
    if n < 2:
        raise DegenerateInputError("density needs at least 2 nodes")
    pairs = n * (n - 1)
    return m / pairs if net.directed else 2 * m / pairs


def average_degree(net: Network) -> float:
    """Mean total degree, ``2m/n`` for directed and undirected networks alike."""
    if net.n < 1:
        raise DegenerateInputError("empty network")
    return 2 * net.m / net.n


def local_clustering(net: Network) -> list[float]:
    adj = net.neighbors
    out = []
    for i in range(net.n):
        nbrs = sorted(adj[i])
        k = len(nbrs)
        if k < 2:
            out.append(0.0)
            continue
        links = sum(1 for a in range(k) for b in range(a + 1, k) if nbrs[b] in adj[nbrs[a]])
        out.append(2.0 * links / (k * (k - 1)))
    return out


def clustering_coefficient(net: Network) -> float:
    """Mean local clustering on the undirected view; low-degree nodes count as 0."""
    if net.n < 3:
        raise DegenerateInputError("clustering needs at least 3 nodes")
    return sum(local_clustering(net)) / net.n


def average_path_length(net: Network, respect_direction: bool | None = None) -> float:
    """Mean hop distance over reachable ordered pairs of distinct nodes."""
    if respect_direction is None:
        respect_direction = net.directed
    adj = net.out_neighbors if respect_direction else net.neighbors
    total = 0
    count = 0
    for s in range(net.n):
        for t, d in enumerate(_bfs(adj, s)):
            if d is not None and t != s:
                total += d
                count += 1
    if count == 0:
        raise DegenerateInputError("no reachable pairs of distinct nodes")
    return total / count


def unreachable_pairs(net: Network, respect_direction: bool | None = None) -> int:
    if respect_direction is None:
        respect_direction = net.directed
    adj = net.out_neighbors if respect_direction else net.neighbors
    return sum(1 for s in range(net.n) for d in _bfs(adj, s) if d is None)


def _degree_scores(g: Network) -> np.ndarray:
    return np.array([len(a) for a in g.neighbors], dtype=float) / (g.n - 1)


def _betweenness_scores(g: Network) -> np.ndarray:
    # Brandes accumulation; each unordered pair is visited from both ends.
    n = g.n
    adj = g.neighbors
    bc = np.zeros(n)
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    bc /= 2.0
    scale = (n - 1) * (n - 2) / 2.0
    return bc / scale if scale > 0 else np.zeros(n)


def _closeness_scores(g: Network) -> np.ndarray:
    n = g.n
    out = np.zeros(n)
    for s in range(n):
        dists = [d for t, d in enumerate(_bfs(g.neighbors, s)) if d is not None and t != s]
        if dists:
            reach = len(dists)
            out[s] = (reach / sum(dists)) * (reach / (n - 1))
    return out


def _eigenvector_scores(g: Network, tol: float = 1e-12, max_iter: int = 100_000) -> np.ndarray:
    comps = connected_components(g)
    biggest = max(comps, key=len)
    if len(biggest) < 2:
        raise DegenerateInputError("eigenvector centrality needs at least one edge")
    idx = sorted(g.index[v] for v in biggest)
    a = g.adjacency()[np.ix_(idx, idx)]
    # Shift by the identity so bipartite components do not oscillate.
    shifted = a + np.eye(len(idx))
    x = np.ones(len(idx)) / math.sqrt(len(idx))
    for _ in range(max_iter):
        y = shifted @ x
        y /= np.linalg.norm(y)
        lam = y @ (a @ y)
        if np.max(np.abs(a @ y - lam * y)) < tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceError("eigenvector power iteration did not converge")
    out = np.zeros(g.n)
    out[idx] = x / x.max()
    return out


_SCORERS = {
    "degree": _degree_scores,
    "betweenness": _betweenness_scores,
    "closeness": _closeness_scores,
    "eigenvector": _eigenvector_scores,
}


def centrality(net: Network, measure: str) -> dict[str, float]:
    """Normalised centrality scores in ``[0, 1]`` keyed by node id.

    Parameters
    ----------
    net : Network
        Any layer; scores are taken on its undirected view.
    measure : {"degree", "betweenness", "closeness", "eigenvector"}
        ``degree`` is divided by ``n - 1``; ``betweenness`` by
        ``(n - 1)(n - 2) / 2``; ``closeness`` is the inverse mean distance
        to reachable nodes scaled by the reachable fraction; ``eigenvector``
        is the principal eigenvector of the largest component, scaled to a
        maximum of 1 (nodes outside that component score 0).
    """
    if measure not in _SCORERS:
        raise ValueError(f"unknown centrality measure {measure!r}")
    if net.n < 2:
        raise DegenerateInputError("centrality needs at least 2 nodes")
    g = undirected_view(net)
    scores = _SCORERS[measure](g)
    return dict(zip(net.nodes, (float(s) for s in scores)))


def star_maximum(n: int, measure: str) -> float:
    """Freeman sum of differences attained by the n-node star for ``measure``."""
    if measure == "degree":
        return float(n - 2)
    if measure == "betweenness":
        return float(n - 1)
    if measure == "closeness":
        return (n - 1) * (n - 2) / (2 * n - 3)
    if measure == "eigenvector":
        return (n - 1) * (1 - 1 / math.sqrt(n - 1))
    raise ValueError(f"unknown centrality measure {measure!r}")


def centralization(net: Network, measure: str) -> float:
    """Freeman centralization: ``sum(max - c_i)`` over the star-graph value, clamped to [0, 1]."""
    if net.n < 3:
        raise DegenerateInputError("centralization needs at least 3 nodes")
    scores = np.array(list(centrality(net, measure).values()))
    raw = float(np.sum(scores.max() - scores))
    return min(1.0, max(0.0, raw / star_maximum(net.n, measure)))


@dataclass(frozen=True)
class MetricsReport:
    nodes: int
    ties: int
    density: float
    avg_degree: float
    clustering: float
    avg_path_length: float
    centralization: dict
    unreachable_pairs: int = 0

    KEYS = ("nodes", "ties", "density", "avg_degree", "clustering", "avg_path_length",
            "centralization_degree", "centralization_betweenness", "centralization_closeness",
            "centralization_eigenvector")

    def to_dict(self) -> dict:
        out = {
            "nodes": self.nodes,
            "ties": self.ties,
            "density": self.density,
            "avg_degree": self.avg_degree,
            "clustering": self.clustering,
            "avg_path_length": self.avg_path_length,
        }
        for m in MEASURES:
            out[f"centralization_{m}"] = self.centralization[m]
        return out


def metrics_report(net: Network) -> MetricsReport:
    return MetricsReport(
        nodes=net.n,
        ties=net.m,
        density=density(net),
        avg_degree=average_degree(net),
        clustering=clustering_coefficient(net),
        avg_path_length=average_path_length(net),
        centralization={m: centralization(net, m) for m in MEASURES},
        unreachable_pairs=unreachable_pairs(net),
    )
