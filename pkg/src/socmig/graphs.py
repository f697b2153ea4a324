"""Social graphs: small-world and star construction plus hop-count distances.

Distances are shortest-path hop counts computed by repeated BFS; the
generated graphs are guaranteed connected so every entry is finite.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .rng import as_seed_sequence

UNREACHABLE = -1

MAX_CONNECT_ATTEMPTS = 100


class GraphParameterError(ValueError):
    """Invalid n/k/p arguments for a graph generator."""


class GraphGenerationError(RuntimeError):
    """Generator could not produce a connected graph within its retry budget."""


@dataclass
class SocialGraph:
    """Undirected agent graph with precomputed all-pairs hop distances.

    `center` is set for star graphs and None otherwise. Instances are
    treated as immutable after construction and are safe to share.
    """

    n: int
    edges: list[tuple[int, int]]
    dist: np.ndarray
    center: int | None = None
    adj: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.adj is None:
            self.adj = adjacency_matrix(self.n, self.edges)

    def degree(self, i: int) -> int:
        return int(self.adj[i].sum())

    def degrees(self) -> list[int]:
        return [self.degree(i) for i in range(self.n)]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in sorted_edges(self.edges)],
            "center": self.center,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


def sorted_edges(edges) -> list[tuple[int, int]]:
    """Canonical edge order: each pair (i, j) with i < j, lexicographic."""
    return sorted((min(i, j), max(i, j)) for i, j in edges)


def adjacency_matrix(n: int, edges) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        if i == j:
            raise GraphParameterError(f"self-loop on node {i}")
        adj[i, j] = True
        adj[j, i] = True
    return adj


def graph_from_edges(n: int, edges, center: int | None = None) -> SocialGraph:
    """Build a graph with distances; raises if any node pair is unreachable."""
    edges = sorted_edges(edges)
    dist = all_pairs_distance_from_edges(n, edges)
    if (dist == UNREACHABLE).any():
        pairs = unreachable_pairs(dist)
        raise GraphGenerationError(
            f"graph is disconnected; {len(pairs)} unreachable pairs, "
            f"first is {pairs[0]}"
        )
    return SocialGraph(n=n, edges=edges, dist=dist, center=center)


def graph_from_json(text: str) -> SocialGraph:
    obj = json.loads(text)
    edges = [tuple(e) for e in obj["edges"]]
    return graph_from_edges(int(obj["n"]), edges, center=obj.get("center"))


def _bfs_hops(adj_lists: list[list[int]], source: int, n: int) -> np.ndarray:
    hops = np.full(n, UNREACHABLE, dtype=np.int32)
    hops[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj_lists[v]:
            if hops[w] == UNREACHABLE:
                hops[w] = hops[v] + 1
                queue.append(w)
    return hops


def all_pairs_distance_from_edges(n: int, edges) -> np.ndarray:
    """Hop-count shortest paths via one BFS per node.

    Unreachable pairs are marked with -1; generators treat any such
    entry as a failed construction.
    """
    adj_lists: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj_lists[i].append(j)
        adj_lists[j].append(i)
    dist = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        dist[s] = _bfs_hops(adj_lists, s, n)
    return dist


def all_pairs_distance(g: SocialGraph) -> np.ndarray:
    return all_pairs_distance_from_edges(g.n, g.edges)


def unreachable_pairs(dist: np.ndarray) -> list[tuple[int, int]]:
    ii, jj = np.nonzero(dist == UNREACHABLE)
    return [(int(i), int(j)) for i, j in zip(ii, jj) if i < j]


def _ring_lattice_edges(n: int, k: int) -> list[tuple[int, int]]:
    edges = []
    for i in range(n):
        for step in range(1, k // 2 + 1):
            edges.append((i, (i + step) % n))
    return edges


def _is_connected(n: int, edges) -> bool:
    adj_lists: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj_lists[i].append(j)
        adj_lists[j].append(i)
    return (_bfs_hops(adj_lists, 0, n) != UNREACHABLE).all()


def gen_small_world(n: int, k: int = 4, p_rewire: float = 0.3, seed=0) -> SocialGraph:
    """Watts-Strogatz small-world graph, regenerated until connected.

    Ring lattice of even degree k; each lattice edge is rewired with
    probability p_rewire to a uniformly random non-self, non-duplicate
    target. Edge count is preserved (n*k/2). Up to MAX_CONNECT_ATTEMPTS
    regenerations with fresh derived sub-seeds before giving up.
    """
    if n < 3:
        raise GraphParameterError(f"need n >= 3, got n={n}")
    if k % 2 != 0 or not 2 <= k < n:
        raise GraphParameterError(f"need even k with 2 <= k < n, got k={k}")
    if not 0.0 <= p_rewire <= 1.0:
        raise GraphParameterError(f"need 0 <= p_rewire <= 1, got {p_rewire}")

    ss = as_seed_sequence(seed)
    for _ in range(MAX_CONNECT_ATTEMPTS):
        rng = np.random.default_rng(ss.spawn(1)[0])
        edge_set = set(_ring_lattice_edges(n, k))
        for i in range(n):
            for step in range(1, k // 2 + 1):
                j = (i + step) % n
                key = (i, j)
                if key not in edge_set:
                    continue  # already rewired away
                if rng.random() >= p_rewire:
                    continue
                neighbors = {a if b == i else b for a, b in edge_set if i in (a, b)}
                if len(neighbors) >= n - 1:
                    continue  # saturated; keep the lattice edge
                w = int(rng.integers(n))
                while w == i or w in neighbors:
                    w = int(rng.integers(n))
                edge_set.discard(key)
                edge_set.add((i, w))
        edges = sorted_edges(edge_set)
        if _is_connected(n, edges):
            return graph_from_edges(n, edges)
    raise GraphGenerationError(
        f"no connected graph in {MAX_CONNECT_ATTEMPTS} attempts "
        f"(n={n}, k={k}, p_rewire={p_rewire})"
    )


def gen_star(n: int) -> SocialGraph:
    """Star graph: node 0 is the center, every other node links only to it."""
    if n < 2:
        raise GraphParameterError(f"star needs n >= 2, got n={n}")
    edges = [(0, j) for j in range(1, n)]
    return graph_from_edges(n, edges, center=0)


def community_distance(dist: np.ndarray, i: int, members) -> float | None:
    """Mean hop distance from agent i to a community's members.

    The member set includes i itself when i belongs to the community
    (its zero self-distance is part of the average). Empty communities
    have no defined distance; callers decide how to handle None.
    """
    members = list(members)
    if not members:
        return None
    return float(dist[i, members].mean())
