"""Partitions of a graph's vertex set and their mass representations.

A partition can be represented three ways, following the redistricting
conventions: ``uniform`` spreads probability mass 1/|V_i| over each
component's vertices, ``weighted`` normalizes a positive vertex weight
within each component, and ``unbalanced`` keeps the raw vertex weights
(so components carry unequal total mass).  All masses are exact
rationals.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError, InvalidPartitionError
from .graph import Graph

__all__ = [
    "MassDistribution",
    "Partition",
    "REPRESENTATIONS",
    "from_labels",
    "component_distribution",
    "same_partition",
    "load_partition_csv",
    "save_partition_csv",
    "load_ensemble",
    "save_ensemble",
    "load_vertex_weights",
]

REPRESENTATIONS = ("uniform", "weighted", "unbalanced")


@dataclass(frozen=True)
class MassDistribution:
    """Nonnegative mass per vertex, stored as exact Fractions."""

    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if any(m < 0 for m in self.masses):
            raise InvalidArgumentError("mass distribution entries must be nonnegative")

    @property
    def total(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    @property
    def floats(self) -> np.ndarray:
        return np.array([float(m) for m in self.masses])

    def support(self) -> list[int]:
        return [v for v, m in enumerate(self.masses) if m > 0]


@dataclass(frozen=True)
class Partition:
    """Ordered list of disjoint vertex sets covering 0..n-1.

    ``components`` holds each component's vertices sorted ascending;
    component order follows the label ids it was built from.  ``connected``
    records whether every component induced a connected subgraph of the
    source graph at construction time.
    """

    components: tuple[tuple[int, ...], ...]
    representation: str
    k: int
    n: int
    connected: bool
    vertex_weights: tuple[Fraction, ...] | None = None

    def labels(self) -> list[int]:
        out = [-1] * self.n
        for i, comp in enumerate(self.components):
            for v in comp:
                out[v] = i
        return out

    def component_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.components)

    def weight_of(self, v: int) -> Fraction:
        if self.vertex_weights is None:
            return Fraction(1)
        return self.vertex_weights[v]


def _component_connected(g: Graph, members: tuple[int, ...]) -> bool:
    member_set = set(members)
    start = members[0]
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for _, v, _ in g.neighbors(u):
            if v in member_set and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(members)


def from_labels(
    g: Graph,
    labels,
    k: int,
    representation: str = "uniform",
    vertex_weights=None,
    require_connected: bool = False,
) -> Partition:
    """Build a Partition from a vertex-indexed label vector.

    Every label 0..k-1 must occur at least once.  ``vertex_weights`` is
    required only in spirit for the weighted/unbalanced representations;
    it defaults to the all-ones weighting.
    """
    labels = list(labels)
    if len(labels) != g.vertex_count:
        raise InvalidArgumentError(
            f"labels length {len(labels)} != vertex count {g.vertex_count}"
        )
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    if representation not in REPRESENTATIONS:
        raise InvalidArgumentError(f"unknown representation {representation!r}")
    members: list[list[int]] = [[] for _ in range(k)]
    for v, lab in enumerate(labels):
        if not isinstance(lab, int) or isinstance(lab, bool):
            lab = int(lab)
        if not 0 <= lab < k:
            raise InvalidArgumentError(f"label {lab} at vertex {v} out of range 0..{k - 1}")
        members[lab].append(v)
    for i, comp in enumerate(members):
        if not comp:
            raise InvalidPartitionError(f"component {i} is empty")

    weights = None
    if vertex_weights is not None:
        weights = tuple(Fraction(w) for w in vertex_weights)
        if len(weights) != g.vertex_count:
            raise InvalidArgumentError("vertex_weights length != vertex count")
        if any(w <= 0 for w in weights):
            raise InvalidArgumentError("vertex weights must be strictly positive")

    components = tuple(tuple(comp) for comp in members)
    connected = all(_component_connected(g, comp) for comp in components)
    if require_connected and not connected:
        raise InvalidPartitionError("a component induces a disconnected subgraph")
    return Partition(
        components=components,
        representation=representation,
        k=k,
        n=g.vertex_count,
        connected=connected,
        vertex_weights=weights,
    )


def component_distribution(p: Partition, i: int) -> MassDistribution:
    """Mass distribution of component i under the partition's representation."""
    if not 0 <= i < p.k:
        raise InvalidArgumentError(f"component index {i} out of range 0..{p.k - 1}")
    masses = [Fraction(0)] * p.n
    comp = p.components[i]
    if p.representation == "uniform":
        share = Fraction(1, len(comp))
        for v in comp:
            masses[v] = share
    elif p.representation == "weighted":
        total = sum((p.weight_of(v) for v in comp), Fraction(0))
        for v in comp:
            masses[v] = p.weight_of(v) / total
    else:  # unbalanced
        for v in comp:
            masses[v] = p.weight_of(v)
    return MassDistribution(tuple(masses))


def same_partition(x: Partition, y: Partition) -> bool:
    """True when the two partitions have the same components up to reordering."""
    if x.n != y.n or x.k != y.k:
        return False
    return sorted(x.components) == sorted(y.components)


# ---------------------------------------------------------------------------
# file formats


def save_partition_csv(p: Partition, path) -> None:
    """One row per vertex: vertex_id,label."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex_id", "label"])
        for v, lab in enumerate(p.labels()):
            writer.writerow([v, lab])


def load_partition_csv(
    path,
    g: Graph,
    representation: str = "uniform",
    vertex_weights=None,
    k: int | None = None,
) -> Partition:
    """Read a vertex_id,label CSV (header optional) into a Partition."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append((int(row[0]), int(row[1])))
            except ValueError:
                if rows:
                    raise InvalidArgumentError(f"malformed partition row {row!r} in {path}")
                continue  # header line
    labels = [-1] * g.vertex_count
    for v, lab in rows:
        if not 0 <= v < g.vertex_count:
            raise InvalidArgumentError(f"vertex id {v} out of range in {path}")
        labels[v] = lab
    if any(lab < 0 for lab in labels):
        raise InvalidArgumentError(f"partition file {path} does not cover every vertex")
    if k is None:
        k = max(labels) + 1
    return from_labels(g, labels, k, representation=representation, vertex_weights=vertex_weights)


def save_ensemble(partitions, path) -> None:
    """Write one JSON object per line: {"labels": [...]}."""
    with open(path, "w") as fh:
        for p in partitions:
            fh.write(json.dumps({"labels": p.labels()}))
            fh.write("\n")


def load_ensemble(
    path,
    g: Graph,
    representation: str = "uniform",
    vertex_weights=None,
) -> list[Partition]:
    """Read a JSON-lines ensemble of label arrays."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels = json.loads(line)["labels"]
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: bad ensemble line") from exc
            k = max(labels) + 1
            out.append(
                from_labels(
                    g, labels, k, representation=representation, vertex_weights=vertex_weights
                )
            )
    return out


def load_vertex_weights(path, g: Graph) -> tuple[Fraction, ...]:
    """Read vertex_id,weight CSV (header optional); weights must cover V."""
    weights: list[Fraction | None] = [None] * g.vertex_count
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                v = int(row[0])
            except ValueError:
                continue  # header
            weights[v] = Fraction(row[1])
    if any(w is None for w in weights):
        raise InvalidArgumentError(f"weights file {path} does not cover every vertex")
    return tuple(weights)  # type: ignore[arg-type]
