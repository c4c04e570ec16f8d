"""Immutable weighted graphs with exact shortest-path queries.

Edges of the undirected graph are stored once with a fixed orientation
(tail, head, weight); signed edge flows elsewhere in the package are
relative to that orientation.  Weights may be ints, floats, or Fractions
and are kept as exact Fractions internally so that shortest-path
distances (and everything built on them) admit exact equality tests.
"""
from __future__ import annotations

import heapq
import json
import math
from fractions import Fraction

import numpy as np

from .errors import DisconnectedGraphError, InvalidArgumentError

__all__ = ["Graph", "grid_graph", "shortest_path_matrix", "diameter", "load_graph", "save_graph"]


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidArgumentError(f"edge weight must be finite, got {value}")
        return Fraction(value)
    raise InvalidArgumentError(f"unsupported weight type: {type(value).__name__}")


class Graph:
    """Connected undirected graph with positive edge weights.

    :param vertex_count: number of vertices, ids 0..vertex_count-1.
    :param edges: iterable of (tail, head, weight) triples; each undirected
        edge appears exactly once.  Weight defaults to 1 when a pair is given.
    """

    __slots__ = ("vertex_count", "edges", "_adj", "_weight_scale", "_int_weights", "_dist_cache")

    def __init__(self, vertex_count: int, edges):
        if vertex_count < 1:
            raise InvalidArgumentError("vertex_count must be >= 1")
        norm = []
        seen: set[tuple[int, int]] = set()
        for edge in edges:
            if len(edge) == 2:
                tail, head = edge
                weight = Fraction(1)
            else:
                tail, head, weight = edge
                weight = _to_fraction(weight)
            if not (0 <= tail < vertex_count and 0 <= head < vertex_count):
                raise InvalidArgumentError(f"edge ({tail},{head}) out of range")
            if tail == head:
                raise InvalidArgumentError(f"self-loop at vertex {tail}")
            key = (min(tail, head), max(tail, head))
            if key in seen:
                raise InvalidArgumentError(f"duplicate undirected edge {key}")
            seen.add(key)
            if weight <= 0:
                raise InvalidArgumentError(f"edge ({tail},{head}) has non-positive weight")
            norm.append((int(tail), int(head), weight))
        self.vertex_count = int(vertex_count)
        self.edges = tuple(norm)

        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(vertex_count)]
        for idx, (tail, head, _) in enumerate(self.edges):
            adj[tail].append((idx, head, 1))
            adj[head].append((idx, tail, -1))
        self._adj = adj

        scale = 1
        for _, _, w in self.edges:
            scale = scale * w.denominator // math.gcd(scale, w.denominator)
        self._weight_scale = scale
        self._int_weights = [int(w * scale) for _, _, w in self.edges]
        self._dist_cache: dict[int, list[Fraction]] = {}

        if not self._is_connected():
            raise DisconnectedGraphError("graph must be connected")

    def _is_connected(self) -> bool:
        seen = [False] * self.vertex_count
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for _, v, _ in self._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == self.vertex_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int):
        """(edge index, other endpoint, orientation sign) triples at v."""
        return self._adj[v]

    def int_dijkstra(self, source: int) -> list[int]:
        """Shortest distances from source in integer-scaled weight units."""
        n = self.vertex_count
        dist = [-1] * n
        heap = [(0, source)]
        wint = self._int_weights
        adj = self._adj
        while heap:
            d, u = heapq.heappop(heap)
            if dist[u] != -1:
                continue
            dist[u] = d
            for idx, v, _ in adj[u]:
                if dist[v] == -1:
                    heapq.heappush(heap, (d + wint[idx], v))
        if any(d < 0 for d in dist):
            raise DisconnectedGraphError("unreachable vertex in shortest-path computation")
        return dist

    def distances_from(self, source: int) -> list[Fraction]:
        """Exact shortest-path distances from a vertex, cached per source."""
        cached = self._dist_cache.get(source)
        if cached is None:
            scale = self._weight_scale
            cached = [Fraction(d, scale) for d in self.int_dijkstra(source)]
            self._dist_cache[source] = cached
        return cached

    def distance(self, v: int, w: int) -> Fraction:
        return self.distances_from(v)[w]

    def to_json_dict(self) -> dict:
        return {
            "n": self.vertex_count,
            "edges": [[t, h, float(w)] for t, h, w in self.edges],
        }


def grid_graph(rows: int, cols: int) -> Graph:
    """4-neighbor lattice with unit weights; vertex id = row * cols + col."""
    if rows < 1 or cols < 1:
        raise InvalidArgumentError("grid dimensions must be >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, 1))
            if r + 1 < rows:
                edges.append((v, v + cols, 1))
    return Graph(rows * cols, edges)


def shortest_path_matrix(g: Graph) -> np.ndarray:
    """All-pairs shortest-path distances as a dense float matrix."""
    n = g.vertex_count
    out = np.zeros((n, n))
    for v in range(n):
        row = g.distances_from(v)
        for w in range(n):
            out[v, w] = float(row[w])
    return out


def diameter(g: Graph) -> Fraction:
    """Maximum shortest-path distance, as an exact Fraction."""
    best = Fraction(0)
    for v in range(g.vertex_count):
        row = g.distances_from(v)
        m = max(row)
        if m > best:
            best = m
    return best


def load_graph(path) -> Graph:
    """Read a graph from JSON: {"n": int, "edges": [[tail, head, weight?], ...]}."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        n = data["n"]
        raw_edges = data["edges"]
    except (TypeError, KeyError) as exc:
        raise InvalidArgumentError(f"malformed graph file {path}: missing {exc}") from exc
    return Graph(n, raw_edges)


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        json.dump(g.to_json_dict(), fh)
        fh.write("\n")
