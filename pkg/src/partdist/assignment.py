"""Lifting a component-level metric to a partition-level metric.

The lift is a minimum-cost perfect matching of the two partitions'
components: build the k-by-k matrix of pairwise component distances and
solve the assignment problem at a vertex of the doubly stochastic
polytope.  The assignment solver is a potentials-based Hungarian method
that works unchanged on exact Fractions, so lifted distances inherit
the exactness of the component metrics.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .baselines import hamming_component_cost, l1_component_cost
from .errors import InvalidArgumentError, UnbalancedInputError
from .graph import Graph
from .partition import Partition, component_distribution
from .transport import unbalanced_cost, w1_beckmann

__all__ = ["CostMatrix", "Matching", "hungarian", "lifted_distance", "METRICS"]

METRICS = ("transport", "unbalanced", "l1", "hamming")


@dataclass(frozen=True)
class CostMatrix:
    """Square matrix of nonnegative component-to-component costs."""

    k: int
    costs: tuple[tuple, ...]

    def __post_init__(self):
        if self.k < 1 or len(self.costs) != self.k:
            raise InvalidArgumentError("cost matrix must be square and nonempty")
        for row in self.costs:
            if len(row) != self.k:
                raise InvalidArgumentError("cost matrix must be square")
            for c in row:
                if c < 0:
                    raise InvalidArgumentError("cost matrix entries must be nonnegative")


@dataclass(frozen=True)
class Matching:
    """A permutation assigning row i to column permutation[i], and its cost."""

    permutation: tuple[int, ...]
    value: Fraction


def _hungarian_core(costs: tuple[tuple, ...], k: int):
    """Potentials-based assignment solver (1-indexed internally).

    Returns the optimal permutation together with the final dual
    potentials u, v, which satisfy u[i] + v[j] <= costs[i][j] with
    equality on every matched pair.
    """
    infinite = float("inf")
    u = [0] * (k + 1)
    v = [0] * (k + 1)
    match_col = [0] * (k + 1)  # row currently assigned to each column; 0 = free
    for i in range(1, k + 1):
        match_col[0] = i
        j0 = 0
        minv = [infinite] * (k + 1)
        way = [0] * (k + 1)
        used = [False] * (k + 1)
        while True:
            used[j0] = True
            i0 = match_col[j0]
            delta = infinite
            j1 = -1
            for j in range(1, k + 1):
                if used[j]:
                    continue
                cur = costs[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(k + 1):
                if used[j]:
                    u[match_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_col[j0] = match_col[j1]
            j0 = j1
    perm = [0] * k
    for j in range(1, k + 1):
        perm[match_col[j] - 1] = j - 1
    return perm, u, v


def _lex_min_optimal(costs: tuple[tuple, ...], k: int) -> tuple[int, ...]:
    """Lexicographically smallest permutation among the optimal matchings.

    By complementary slackness the optimal matchings are exactly the
    perfect matchings on edges tight for the optimal duals, so commit
    rows in order to the smallest tight column that still leaves the
    remaining rows matchable.
    """
    perm, u, v = _hungarian_core(costs, k)
    scale = 1.0
    inexact = any(isinstance(c, float) for row in costs for c in row)
    if inexact:
        scale = max(1.0, max(abs(float(c)) for row in costs for c in row))

    def tight(i: int, j: int) -> bool:
        slack = costs[i][j] - u[i + 1] - v[j + 1]
        if inexact:
            return abs(slack) <= 1e-9 * scale
        return slack == 0

    tight_rows = [[tight(i, j) for j in range(k)] for i in range(k)]
    chosen: list[int] = []
    used_cols = [False] * k
    for i in range(k):
        for j in range(k):
            if used_cols[j] or not tight_rows[i][j]:
                continue
            used_cols[j] = True
            if _matchable(tight_rows, k, i + 1, used_cols):
                chosen.append(j)
                break
            used_cols[j] = False
        else:
            # Numerical fuzz on float inputs can starve the tight graph;
            # fall back to the solver's own matching (value unaffected).
            return tuple(perm)
    return tuple(chosen)


def _matchable(tight, k: int, start_row: int, used_cols) -> bool:
    """Can rows start_row..k-1 be perfectly matched into the free columns?"""
    match_of_col = [-1] * k

    def try_row(i, seen):
        for j in range(k):
            if used_cols[j] or not tight[i][j] or j in seen:
                continue
            seen.add(j)
            if match_of_col[j] == -1 or try_row(match_of_col[j], seen):
                match_of_col[j] = i
                return True
        return False

    for i in range(start_row, k):
        if not try_row(i, set()):
            return False
    return True


def hungarian(costs: CostMatrix) -> Matching:
    """Minimum-cost perfect matching of a square nonnegative matrix.

    Ties between optimal matchings are broken toward the
    lexicographically smallest permutation; only the value is part of
    the contract.
    """
    k = costs.k
    perm = _lex_min_optimal(costs.costs, k)
    value = sum((costs.costs[i][perm[i]] for i in range(k)), Fraction(0))
    return Matching(permutation=perm, value=value)


def _component_metric(g: Graph, X: Partition, Y: Partition, metric: str, lam):
    """Return f(i, j) computing the chosen component-level distance."""
    if metric == "transport":
        if X.representation == "unbalanced" or Y.representation == "unbalanced":
            raise UnbalancedInputError(
                "transport metric requires balanced representations; "
                "use metric='unbalanced'"
            )
        xs = [component_distribution(X, i) for i in range(X.k)]
        ys = [component_distribution(Y, j) for j in range(Y.k)]
        return lambda i, j: w1_beckmann(g, xs[i], ys[j]).objective
    if metric == "unbalanced":
        if lam is None:
            raise InvalidArgumentError("metric 'unbalanced' requires lambda")
        xs = [component_distribution(X, i) for i in range(X.k)]
        ys = [component_distribution(Y, j) for j in range(Y.k)]
        return lambda i, j: unbalanced_cost(g, xs[i], ys[j], lam).objective
    if metric == "l1":
        return lambda i, j: l1_component_cost(X, Y, i, j)
    if metric == "hamming":
        return lambda i, j: Fraction(hamming_component_cost(X, Y, i, j))
    raise InvalidArgumentError(f"unknown metric {metric!r}; choose from {METRICS}")


def lifted_distance(
    g: Graph,
    X: Partition,
    Y: Partition,
    metric: str = "transport",
    lam=None,
    cost_cache: dict | None = None,
) -> Matching:
    """Partition-level distance: optimal component matching under ``metric``.

    ``cost_cache`` optionally memoizes component-pair costs across calls
    (keyed by member sets); safe because the costs are pure functions of
    the component distributions.
    """
    if X.n != g.vertex_count or Y.n != g.vertex_count:
        raise InvalidArgumentError("partitions must cover the given graph")
    if X.k != Y.k:
        raise InvalidArgumentError(f"partitions have different k ({X.k} vs {Y.k})")
    if X.representation != Y.representation:
        raise InvalidArgumentError("partitions use different representations")
    pair_cost = _component_metric(g, X, Y, metric, lam)
    k = X.k
    if cost_cache is None or metric in ("l1", "hamming"):
        rows = tuple(tuple(pair_cost(i, j) for j in range(k)) for i in range(k))
    else:
        # Component costs depend only on (members, representation, weights)
        # per side, and the component metrics are symmetric, so a pair and
        # its swap share one cache slot.  Uniform masses ignore weights.
        rep = (X.representation, metric, lam)
        wx = () if X.representation == "uniform" else (X.vertex_weights or ())
        wy = () if Y.representation == "uniform" else (Y.vertex_weights or ())
        rows_list = []
        for i in range(k):
            row = []
            for j in range(k):
                a = (X.components[i], wx)
                b = (Y.components[j], wy)
                key = (a, b, rep) if a <= b else (b, a, rep)
                got = cost_cache.get(key)
                if got is None:
                    got = pair_cost(i, j)
                    cost_cache[key] = got
                row.append(got)
            rows_list.append(tuple(row))
        rows = tuple(rows_list)
    return hungarian(CostMatrix(k=k, costs=rows))
