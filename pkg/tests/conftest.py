"""Shared fixtures and independent oracles for the test suite."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from partdist.graph import Graph, grid_graph
from partdist.partition import MassDistribution, from_labels
from partdist.ensemble import enumerate_grid_partitions


# ---------------------------------------------------------------------------
# random instance generators


def random_connected_graph(n: int, rng: random.Random, rational_weights: bool = True) -> Graph:
    """Random spanning tree plus extra edges; weights rational or unit."""
    edges = []
    nodes = list(range(n))
    rng.shuffle(nodes)
    for i in range(1, n):
        u, v = nodes[i], nodes[rng.randrange(i)]
        edges.append((min(u, v), max(u, v)))
    seen = set(edges)
    for _ in range(rng.randrange(0, n)):
        u, v = rng.sample(range(n), 2)
        key = (min(u, v), max(u, v))
        if key not in seen:
            seen.add(key)
            edges.append(key)
    if rational_weights:
        return Graph(n, [(u, v, Fraction(rng.randint(1, 9), rng.randint(1, 4))) for u, v in edges])
    return Graph(n, [(u, v, 1) for u, v in edges])


def random_masses(n: int, rng: random.Random) -> MassDistribution:
    masses = [Fraction(rng.randint(0, 6), rng.randint(1, 6)) for _ in range(n)]
    if not any(masses):
        masses[rng.randrange(n)] = Fraction(1)
    return MassDistribution(tuple(masses))


def random_mass_pair(n: int, rng: random.Random, balanced: bool):
    x = random_masses(n, rng)
    y = random_masses(n, rng)
    if balanced:
        ratio = x.total / y.total
        y = MassDistribution(tuple(m * ratio for m in y.masses))
    return x, y


def random_labels(n: int, k: int, rng: random.Random) -> list[int]:
    """Random surjective label vector (components may be disconnected)."""
    while True:
        labels = [rng.randrange(k) for _ in range(n)]
        if len(set(labels)) == k:
            return labels


# ---------------------------------------------------------------------------
# independent oracles


def floyd_warshall(g: Graph) -> list[list[Fraction]]:
    n = g.vertex_count
    big = None
    dist = [[big] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = Fraction(0)
    for tail, head, w in g.edges:
        if dist[tail][head] is None or w < dist[tail][head]:
            dist[tail][head] = w
            dist[head][tail] = w
    for mid in range(n):
        for i in range(n):
            via = dist[i][mid]
            if via is None:
                continue
            row = dist[i]
            for j in range(n):
                leg = dist[mid][j]
                if leg is None:
                    continue
                cand = via + leg
                if row[j] is None or cand < row[j]:
                    row[j] = cand
    return dist


def linprog_w1(g: Graph, x: MassDistribution, y: MassDistribution) -> float:
    """Float LP solution of the edge-flow formulation (split J = J+ - J-)."""
    from scipy.optimize import linprog

    m, n = len(g.edges), g.vertex_count
    A = np.zeros((n, 2 * m))
    c = np.zeros(2 * m)
    for e, (tail, head, w) in enumerate(g.edges):
        A[head, e] += 1
        A[tail, e] -= 1
        A[head, m + e] -= 1
        A[tail, m + e] += 1
        c[e] = c[m + e] = float(w)
    b = np.array([float(b_ - a_) for a_, b_ in zip(x.masses, y.masses)])
    res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert res.success, res.message
    return res.fun


def linprog_unbalanced(g: Graph, x: MassDistribution, y: MassDistribution, lam) -> float:
    from scipy.optimize import linprog

    m, n = len(g.edges), g.vertex_count
    A = np.zeros((n, 2 * m + 2 * n))
    c = np.zeros(2 * m + 2 * n)
    for e, (tail, head, w) in enumerate(g.edges):
        A[head, e] += 1
        A[tail, e] -= 1
        A[head, m + e] -= 1
        A[tail, m + e] += 1
        c[e] = c[m + e] = float(w)
    for v in range(n):
        A[v, 2 * m + v] = -1
        A[v, 2 * m + n + v] = 1
        c[2 * m + v] = c[2 * m + n + v] = float(lam)
    b = np.array([float(b_ - a_) for a_, b_ in zip(x.masses, y.masses)])
    res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert res.success, res.message
    return res.fun


def brute_force_assignment(costs) -> tuple:
    """Exhaustive minimum over all permutations (value, lex-min argmin)."""
    k = len(costs)
    best = None
    best_perm = None
    for perm in itertools.permutations(range(k)):
        value = sum(costs[i][perm[i]] for i in range(k))
        if best is None or value < best or (value == best and perm < best_perm):
            best, best_perm = value, perm
    return best, best_perm


# ---------------------------------------------------------------------------
# canned ensembles and constructions


@pytest.fixture(scope="session")
def grid33():
    return grid_graph(3, 3)


@pytest.fixture(scope="session")
def parts_3x3_equal():
    return enumerate_grid_partitions(3, 3, 3, 3, 3)


@pytest.fixture(scope="session")
def parts_4x4_equal():
    return enumerate_grid_partitions(4, 4, 4, 4, 4)


@pytest.fixture(scope="session")
def parts_3x3_loose():
    return enumerate_grid_partitions(3, 3, 3, 1, 5)


def snake_band_pair():
    """Two partitions of the 12x12 grid into serpentine path bands, the
    second with band breakpoints shifted half a band along the path.

    The components interleave: under the best vertex matching half of
    each 24-cell band is mislabeled, yet mass only has to cross to the
    adjacent row, so the overlap-counting distance dwarfs the transport
    distance.
    """
    rows = cols = 12
    g = grid_graph(rows, cols)

    def path_index(v: int) -> int:
        r, c = divmod(v, cols)
        return r * cols + (c if r % 2 == 0 else cols - 1 - c)

    def bands(breaks):
        labels = [0] * (rows * cols)
        for v in range(rows * cols):
            p = path_index(v)
            for i, hi in enumerate(breaks):
                if p < hi:
                    labels[v] = i
                    break
        return labels

    a = from_labels(g, bands([24, 48, 72, 96, 120, 144]), 6)
    b = from_labels(g, bands([12, 36, 60, 84, 108, 144]), 6)
    return g, a, b
