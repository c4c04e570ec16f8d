"""Partition ensembles: exhaustive grid enumeration, flip-walk Markov
chains with optional annealing, and parallel pairwise distance matrices.

Enumeration walks restricted-growth label strings depth-first (new
component ids appear in first-use order, so each partition shows up
exactly once, components ordered by minimum vertex id) and prunes on
size feasibility, sealed components, and reachability of every open
component through the unassigned region.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .assignment import METRICS, lifted_distance
from .errors import InvalidArgumentError, InvalidPartitionError
from .graph import Graph, grid_graph
from .partition import Partition, from_labels

__all__ = [
    "EnsembleSpec",
    "DistanceMatrix",
    "enumerate_grid_partitions",
    "flip_chain",
    "pairwise_matrix",
    "boundary_length",
]


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters for generating an ensemble.

    ``beta_schedule`` is a list of (step, beta) breakpoints interpolated
    piecewise-linearly; an empty schedule means beta = 0 throughout
    (every valid flip is accepted).  ``anneal_sign`` sets the direction
    of the Metropolis weighting on boundary length: -1 (default) favors
    compact partitions, +1 favors long boundaries.
    """

    source: str = "flip_chain"
    k: int = 2
    size_bounds: tuple[int, int] | None = None
    steps: int = 0
    stride: int = 1
    seed: int = 0
    beta_schedule: tuple[tuple[int, float], ...] = ()
    tolerance: float = 0.05
    anneal_sign: int = -1

    def __post_init__(self):
        if self.source not in ("enumerate", "flip_chain"):
            raise InvalidArgumentError("source must be 'enumerate' or 'flip_chain'")
        if self.size_bounds is not None and self.size_bounds[0] > self.size_bounds[1]:
            raise InvalidArgumentError("size_bounds min must be <= max")
        if self.steps < 0:
            raise InvalidArgumentError("steps must be >= 0")
        if self.stride < 1:
            raise InvalidArgumentError("stride must be >= 1")
        if self.tolerance < 0:
            raise InvalidArgumentError("tolerance must be >= 0")
        if self.anneal_sign not in (-1, 1):
            raise InvalidArgumentError("anneal_sign must be -1 or +1")
        steps = [s for s, _ in self.beta_schedule]
        if steps != sorted(steps):
            raise InvalidArgumentError("beta schedule breakpoints must be nondecreasing")


# ---------------------------------------------------------------------------
# exhaustive enumeration


def enumerate_grid_partitions(
    rows: int,
    cols: int,
    k: int,
    min_size: int,
    max_size: int,
    connected: bool = True,
) -> list[Partition]:
    """All partitions of the rows-by-cols grid into exactly k components
    with sizes in [min_size, max_size], each connected when flagged.

    Infeasible bounds yield an empty list.  Output order is the
    deterministic depth-first order of the canonical label strings.
    """
    if min_size < 1:
        raise InvalidArgumentError("min_size must be >= 1")
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    g = grid_graph(rows, cols)
    n = g.vertex_count
    if n < k or k * min_size > n or k * max_size < n:
        return []

    neighbors = [[w for _, w, _ in g.neighbors(v)] for v in range(n)]
    max_nbr_of = [max(nbrs, default=-1) for nbrs in neighbors]
    labels = [-1] * n
    sizes = [0] * k
    members: list[list[int]] = [[] for _ in range(k)]
    comp_maxnbr = [-1] * k
    out: list[Partition] = []

    def comp_connected(c: int) -> bool:
        target = members[c]
        first = target[0]
        seen = {first}
        stack = [first]
        while stack:
            u = stack.pop()
            for w in neighbors[u]:
                if labels[w] == c and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(target)

    def reachable_through_unassigned(c: int) -> bool:
        # Every member of c must sit in one region of members(c) + unassigned.
        target = members[c]
        first = target[0]
        seen = {first}
        stack = [first]
        found = 1
        want = len(target)
        while stack and found < want:
            u = stack.pop()
            for w in neighbors[u]:
                if w in seen:
                    continue
                lw = labels[w]
                if lw == c or lw == -1:
                    seen.add(w)
                    if lw == c:
                        found += 1
                    stack.append(w)
        return found == want

    def closure_ok(v: int, used: int) -> bool:
        # Only meaningful in connected mode: in the unconstrained mode any
        # component may still gain arbitrary (non-adjacent) vertices later,
        # so size feasibility is the whole story.
        for c in range(used):
            if comp_maxnbr[c] <= v:
                if sizes[c] < min_size or not comp_connected(c):
                    return False
            elif not reachable_through_unassigned(c):
                return False
        return True

    def extend(v: int, used: int) -> None:
        if v == n:
            if connected or all(s >= min_size for s in sizes):
                out.append(from_labels(g, labels, k))
            return
        rem = n - v
        allow_new = used < k
        for c in range(used + (1 if allow_new else 0)):
            if c < used:
                if sizes[c] >= max_size:
                    continue
                if connected and comp_maxnbr[c] < v:
                    continue  # sealed: can never reconnect to a new member
            new_used = used + 1 if c == used else used
            labels[v] = c
            sizes[c] += 1
            members[c].append(v)
            old_maxnbr = comp_maxnbr[c]
            comp_maxnbr[c] = max(old_maxnbr, max_nbr_of[v])

            if _feasible(sizes, new_used, k, min_size, max_size, rem - 1) and (
                not connected or closure_ok(v, new_used)
            ):
                extend(v + 1, new_used)

            comp_maxnbr[c] = old_maxnbr
            members[c].pop()
            sizes[c] -= 1
            labels[v] = -1

    extend(0, 0)
    return out


def _feasible(sizes, used, k, min_size, max_size, rem):
    deficit = sum(min_size - s for s in sizes[:used] if s < min_size)
    deficit += (k - used) * min_size
    if deficit > rem:
        return False
    room = sum(max_size - s for s in sizes[:used]) + (k - used) * max_size
    return room >= rem


# ---------------------------------------------------------------------------
# flip-walk chains


def boundary_length(g: Graph, p) -> int:
    """Number of edges joining vertices in different components."""
    labels = p.labels() if isinstance(p, Partition) else p
    return sum(1 for tail, head, _ in g.edges if labels[tail] != labels[head])


def _beta_at(schedule, step: int) -> float:
    if not schedule:
        return 0.0
    if step <= schedule[0][0]:
        return schedule[0][1]
    for (s0, b0), (s1, b1) in zip(schedule, schedule[1:]):
        if step <= s1:
            if s1 == s0:
                return b1
            return b0 + (b1 - b0) * (step - s0) / (s1 - s0)
    return schedule[-1][1]


def _removal_keeps_connected(neighbors, labels, v: int) -> bool:
    lab = labels[v]
    same = [w for w in neighbors[v] if labels[w] == lab]
    if len(same) <= 1:
        return True
    want = set(same)
    seen = {same[0], v}
    stack = [same[0]]
    found = 1
    while stack and found < len(want):
        u = stack.pop()
        for w in neighbors[u]:
            if w not in seen and labels[w] == lab:
                seen.add(w)
                if w in want:
                    found += 1
                stack.append(w)
    return found == len(want)


def flip_chain(g: Graph, start: Partition, spec: EnsembleSpec, seed: int | None = None) -> list[Partition]:
    """Run a boundary-flip Markov chain from a valid starting partition.

    Each step draws uniformly from the current (boundary vertex,
    adjacent component) pairs and relabels the vertex unless that would
    empty a component, disconnect the donor component, or push a
    component size outside (1 +- tolerance) * n/k.  With a beta schedule
    set, surviving proposals are additionally accepted with probability
    min(1, exp(anneal_sign * beta * boundary_delta)).

    Returns the start partition followed by one sample every ``stride``
    accepted-or-rejected steps; identical seeds give identical chains.
    """
    if not start.connected:
        raise InvalidPartitionError("flip_chain requires a start with connected components")
    if start.n != g.vertex_count:
        raise InvalidArgumentError("start partition does not match the graph")
    rng = random.Random(spec.seed if seed is None else seed)
    n = g.vertex_count
    k = start.k
    labels = start.labels()
    sizes = list(start.component_sizes())
    neighbors = [[w for _, w, _ in g.neighbors(v)] for v in range(n)]

    if math.isinf(spec.tolerance):
        lo, hi = 0, n
    else:
        tol = Fraction(spec.tolerance)
        share = Fraction(n, k)
        lo, hi = (1 - tol) * share, (1 + tol) * share

    # Uniform sampling over boundary pairs needs O(1) removal: keep the
    # pairs in a list with swap-delete plus a position index.
    pairs: list[tuple[int, int]] = []
    pos: dict[tuple[int, int], int] = {}
    vertex_pairs: list[set[int]] = [set() for _ in range(n)]

    def add_pair(v, c):
        pos[(v, c)] = len(pairs)
        pairs.append((v, c))
        vertex_pairs[v].add(c)

    def drop_pair(v, c):
        idx = pos.pop((v, c))
        last = pairs.pop()
        if idx < len(pairs):
            pairs[idx] = last
            pos[last] = idx
        vertex_pairs[v].discard(c)

    def refresh_vertex(v):
        fresh = {labels[w] for w in neighbors[v]}
        fresh.discard(labels[v])
        old = set(vertex_pairs[v])
        for c in old - fresh:
            drop_pair(v, c)
        for c in sorted(fresh - old):
            add_pair(v, c)

    for v in range(n):
        refresh_vertex(v)

    def snapshot() -> Partition:
        return from_labels(
            g, labels, k,
            representation=start.representation,
            vertex_weights=start.vertex_weights,
        )

    samples = [snapshot()]
    for step in range(1, spec.steps + 1):
        if pairs:
            v, target = pairs[rng.randrange(len(pairs))]
            donor = labels[v]
            valid = (
                sizes[donor] > 1
                and lo <= sizes[donor] - 1
                and sizes[target] + 1 <= hi
                and _removal_keeps_connected(neighbors, labels, v)
            )
            if valid:
                beta = _beta_at(spec.beta_schedule, step)
                if beta != 0.0:
                    before = sum(1 for w in neighbors[v] if labels[w] != donor)
                    after = sum(1 for w in neighbors[v] if labels[w] != target)
                    prob = min(1.0, math.exp(spec.anneal_sign * beta * (after - before)))
                    accept = rng.random() < prob
                else:
                    accept = True
                if accept:
                    labels[v] = target
                    sizes[donor] -= 1
                    sizes[target] += 1
                    refresh_vertex(v)
                    for w in neighbors[v]:
                        refresh_vertex(w)
        if step % spec.stride == 0:
            samples.append(snapshot())
    return samples


# ---------------------------------------------------------------------------
# pairwise distance matrices


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with a zero diagonal.

    Entries are kept exact (Fractions) when produced by the library's
    own metrics; ``values`` gives the float view.
    """

    n: int
    entries: tuple[tuple, ...]

    def __post_init__(self):
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise InvalidArgumentError("distance matrix must be n x n")
        for i in range(self.n):
            if self.entries[i][i] != 0:
                raise InvalidArgumentError("distance matrix diagonal must be zero")
            for j in range(i + 1, self.n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise InvalidArgumentError("distance matrix must be symmetric")
                if self.entries[i][j] < 0:
                    raise InvalidArgumentError("distance matrix entries must be nonnegative")

    @property
    def values(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def entry(self, i: int, j: int):
        return self.entries[i][j]


def _pair_chunk(args):
    g, parts, metric, lam, chunk = args
    cache: dict = {}
    out = []
    for i, j in chunk:
        m = lifted_distance(g, parts[i], parts[j], metric=metric, lam=lam, cost_cache=cache)
        out.append((i, j, m.value))
    return out


def pairwise_matrix(
    g: Graph,
    ensemble: list[Partition],
    metric: str = "transport",
    lam=None,
    workers: int = 1,
) -> DistanceMatrix:
    """Lifted distances between all unordered pairs of the ensemble.

    Independent pairs are farmed out to a process pool when workers > 1;
    results are exact either way, so the output is identical for any
    worker count.
    """
    if not ensemble:
        raise InvalidArgumentError("ensemble must be nonempty")
    if metric not in METRICS:
        raise InvalidArgumentError(f"unknown metric {metric!r}")
    k = ensemble[0].k
    rep = ensemble[0].representation
    for p in ensemble:
        if p.k != k or p.n != g.vertex_count or p.representation != rep:
            raise InvalidArgumentError("ensemble partitions must share graph, k, representation")
    n = len(ensemble)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    results: list[tuple[int, int, Fraction]] = []
    if workers <= 1 or len(pairs) < 2:
        results = _pair_chunk((g, ensemble, metric, lam, pairs))
    else:
        chunks = [pairs[c::workers] for c in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(
                _pair_chunk, [(g, ensemble, metric, lam, chunk) for chunk in chunks]
            ):
                results.extend(part)
    grid = [[Fraction(0)] * n for _ in range(n)]
    for i, j, val in results:
        grid[i][j] = val
        grid[j][i] = val
    return DistanceMatrix(n=n, entries=tuple(tuple(row) for row in grid))
