"""Hamming and total-variation baselines for comparing partitions.

Hamming counts vertices of one component missing from the other and is
representation-independent; the L1 (total variation) cost is half the
entrywise absolute difference of the two components' mass vectors under
whichever representation the partitions carry.  Both lift to partition
distances through the same assignment step as the transport metric.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import InvalidArgumentError
from .partition import Partition, component_distribution

__all__ = ["hamming_component_cost", "l1_component_cost", "lifted_baseline"]


def _check_pair(X: Partition, Y: Partition) -> None:
    if X.n != Y.n:
        raise InvalidArgumentError("partitions cover different vertex sets")
    if X.k != Y.k:
        raise InvalidArgumentError(f"partitions have different k ({X.k} vs {Y.k})")


def hamming_component_cost(X: Partition, Y: Partition, i: int, j: int) -> int:
    """Number of vertices in component i of X that are not in component j of Y."""
    _check_pair(X, Y)
    if not (0 <= i < X.k and 0 <= j < Y.k):
        raise InvalidArgumentError("component index out of range")
    other = set(Y.components[j])
    return sum(1 for v in X.components[i] if v not in other)


def l1_component_cost(X: Partition, Y: Partition, i: int, j: int) -> Fraction:
    """Half the L1 distance between the two components' mass vectors."""
    _check_pair(X, Y)
    if not (0 <= i < X.k and 0 <= j < Y.k):
        raise InvalidArgumentError("component index out of range")
    xi = component_distribution(X, i).masses
    yj = component_distribution(Y, j).masses
    return sum((abs(a - b) for a, b in zip(xi, yj)), Fraction(0)) / 2


def lifted_baseline(X: Partition, Y: Partition, which: str):
    """Lift a baseline cost to a partition distance via optimal matching."""
    from .assignment import CostMatrix, hungarian  # circular at module level

    _check_pair(X, Y)
    if which == "hamming":
        cost = lambda i, j: Fraction(hamming_component_cost(X, Y, i, j))
    elif which == "l1":
        cost = lambda i, j: l1_component_cost(X, Y, i, j)
    else:
        raise InvalidArgumentError(f"unknown baseline {which!r}; use 'hamming' or 'l1'")
    k = X.k
    rows = tuple(tuple(cost(i, j) for j in range(k)) for i in range(k))
    return hungarian(CostMatrix(k=k, costs=rows))
