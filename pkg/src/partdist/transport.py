"""Exact transport costs between mass distributions on a graph.

Three routes are provided and kept deliberately independent so they can
cross-check each other:

* ``w1_beckmann`` solves the flow formulation directly on the graph's
  edges (uncapacitated min-cost flow, successive shortest augmenting
  paths with potentials, all integer-scaled).
* ``kantorovich_oracle`` solves the coupling formulation over the two
  supports as a dense bipartite transportation problem with
  shortest-path costs.
* ``unbalanced_cost`` handles unequal totals (penalty exponent fixed to
  1) by adding a single auxiliary sink vertex joined to every vertex at
  weight lambda and solving the same flow problem on that augmented
  graph; ``sink_augmented_oracle`` is the coupling-side counterpart.

All masses and weights are rationals, supplies and costs are scaled to
integers before solving, and every returned objective is an exact
Fraction, so equalities that hold mathematically hold as ``==`` here.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidArgumentError, UnbalancedInputError
from .graph import Graph
from .partition import MassDistribution

__all__ = [
    "FlowSolution",
    "TransportPlan",
    "w1_beckmann",
    "kantorovich_oracle",
    "unbalanced_cost",
    "sink_augmented_oracle",
    "plan_to_flow",
    "divergence",
]


@dataclass(frozen=True)
class FlowSolution:
    """Optimal signed edge flows (relative to the graph's stored edge
    orientation), plus per-vertex slack in the unbalanced case."""

    objective: Fraction
    edge_flows: tuple[Fraction, ...]
    vertex_slack: tuple[Fraction, ...] | None = None
    lam: Fraction | None = None

    def to_json_dict(self) -> dict:
        return {
            "objective": float(self.objective),
            "flows": [float(f) for f in self.edge_flows],
            "slack": None if self.vertex_slack is None else [float(z) for z in self.vertex_slack],
        }


@dataclass(frozen=True)
class TransportPlan:
    """Coupling between two distributions: mass per (source, target) pair."""

    plan: dict[tuple[int, int], Fraction]

    def mass(self, v: int, w: int) -> Fraction:
        return self.plan.get((v, w), Fraction(0))

    def row_marginals(self, n: int) -> list[Fraction]:
        out = [Fraction(0)] * n
        for (v, _), q in self.plan.items():
            if v < n:
                out[v] += q
        return out

    def col_marginals(self, n: int) -> list[Fraction]:
        out = [Fraction(0)] * n
        for (_, w), q in self.plan.items():
            if w < n:
                out[w] += q
        return out

    def total_cost(self, cost) -> Fraction:
        return sum((cost(v, w) * q for (v, w), q in self.plan.items()), Fraction(0))


def _as_fraction(value, name: str) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} must be a rational number") from exc


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _check_masses(g: Graph, x: MassDistribution, y: MassDistribution) -> None:
    if len(x.masses) != g.vertex_count or len(y.masses) != g.vertex_count:
        raise InvalidArgumentError("mass distribution length must equal vertex count")


def _scaled_excess(x: MassDistribution, y: MassDistribution) -> tuple[list[int], int]:
    """Integer vector D*(x - y) together with the denominator D."""
    scale = 1
    for m in x.masses:
        scale = _lcm(scale, m.denominator)
    for m in y.masses:
        scale = _lcm(scale, m.denominator)
    excess = [int((a - b) * scale) for a, b in zip(x.masses, y.masses)]
    return excess, scale


# ---------------------------------------------------------------------------
# successive shortest paths on the graph's own edges


def _ssp_flow(n: int, adj, costs: list[int], excess: list[int]) -> tuple[int, list[int]]:
    """Uncapacitated min-cost flow with integer costs and supplies.

    ``adj[u]`` lists (edge index, other endpoint, +1 if u is the stored
    tail).  ``excess[v] > 0`` means v must ship mass out.  Returns the
    integer objective and signed per-edge flows.

    Each round runs Dijkstra under reduced costs, seeded from every
    remaining source at once; traversing against an existing flow is
    credited with the negative cost, which stays nonnegative after the
    potential shift.  Augmentation pushes as much as the nearest deficit,
    the source's surplus, and any cancelled flow on the path allow, so
    the total surplus strictly drops every round and the loop terminates.
    """
    m = len(costs)
    flow = [0] * m
    potential = [0] * n
    excess = list(excess)
    remaining = sum(e for e in excess if e > 0)
    infinite = float("inf")
    while remaining > 0:
        dist: list = [infinite] * n
        settled = [False] * n
        parent_edge = [-1] * n
        parent_node = [-1] * n
        parent_sign = [0] * n
        heap = []
        for v in range(n):
            if excess[v] > 0:
                dist[v] = 0
                heap.append((0, v))
        heapq.heapify(heap)
        target = -1
        target_dist = infinite
        while heap:
            d, u = heapq.heappop(heap)
            if settled[u]:
                continue
            settled[u] = True
            if excess[u] < 0:
                target = u
                target_dist = d
                break
            pu = potential[u]
            for idx, v, sign in adj[u]:
                if settled[v]:
                    continue
                c = -costs[idx] if sign * flow[idx] < 0 else costs[idx]
                nd = d + c + pu - potential[v]
                if nd < dist[v]:
                    dist[v] = nd
                    parent_edge[v] = idx
                    parent_node[v] = u
                    parent_sign[v] = sign
                    heapq.heappush(heap, (nd, v))
        if target == -1:
            raise InvalidArgumentError("flow problem is infeasible (disconnected input?)")
        # Capped potential update: settled nodes by their distance, the
        # rest by the target's, which keeps reduced costs nonnegative.
        for v in range(n):
            potential[v] += dist[v] if settled[v] else target_dist

        # Trace the path back to whichever source the tree grew from.
        path = []
        node = target
        while parent_node[node] != -1:
            path.append((parent_edge[node], parent_sign[node]))
            node = parent_node[node]
        source = node
        push = min(excess[source], -excess[target])
        for idx, sign in path:
            if sign * flow[idx] < 0:
                push = min(push, abs(flow[idx]))
        excess[source] -= push
        excess[target] += push
        remaining -= push
        for idx, sign in path:
            flow[idx] += sign * push
    objective = sum(c * abs(f) for c, f in zip(costs, flow))
    return objective, flow


def w1_beckmann(g: Graph, x: MassDistribution, y: MassDistribution) -> FlowSolution:
    """Transport distance via minimum-cost flow on the graph's edges.

    Requires equal total mass; raises UnbalancedInputError otherwise
    (use :func:`unbalanced_cost` in that case).
    """
    _check_masses(g, x, y)
    if x.total != y.total:
        raise UnbalancedInputError(
            f"total masses differ ({x.total} vs {y.total}); use unbalanced_cost"
        )
    excess, denom = _scaled_excess(x, y)
    if not any(excess):
        zeros = tuple(Fraction(0) for _ in g.edges)
        return FlowSolution(objective=Fraction(0), edge_flows=zeros)
    obj_int, flow = _ssp_flow(g.vertex_count, g._adj, g._int_weights, excess)
    objective = Fraction(obj_int, denom * g._weight_scale)
    flows = tuple(Fraction(f, denom) for f in flow)
    return FlowSolution(objective=objective, edge_flows=flows)


def unbalanced_cost(g: Graph, x: MassDistribution, y: MassDistribution, lam) -> FlowSolution:
    """Transport with mass creation/destruction at per-unit price lam.

    Solved on the augmented graph: one extra sink vertex joined to every
    vertex by an edge of weight lam; the net imbalance is routed through
    the sink, and the signed flow on the sink edge at v is the slack
    z(v) (positive = mass removed at v).
    """
    _check_masses(g, x, y)
    lam = _as_fraction(lam, "lambda")
    if lam < 0:
        raise InvalidArgumentError("lambda must be nonnegative")
    excess, denom = _scaled_excess(x, y)
    n = g.vertex_count
    m = len(g.edges)

    if not any(excess):
        zeros = tuple(Fraction(0) for _ in g.edges)
        slack = tuple(Fraction(0) for _ in range(n))
        return FlowSolution(objective=Fraction(0), edge_flows=zeros, vertex_slack=slack, lam=lam)

    weight_scale = _lcm(g._weight_scale, lam.denominator)
    bump = weight_scale // g._weight_scale
    costs = [w * bump for w in g._int_weights]
    lam_int = int(lam * weight_scale)

    adj: list[list[tuple[int, int, int]]] = [list(g._adj[v]) for v in range(n)]
    adj.append([])
    for v in range(n):
        idx = m + v  # sink edge oriented v -> sink
        costs.append(lam_int)
        adj[v].append((idx, n, 1))
        adj[n].append((idx, v, -1))

    full_excess = excess + [-sum(excess)]
    obj_int, flow = _ssp_flow(n + 1, adj, costs, full_excess)
    objective = Fraction(obj_int, denom * weight_scale)
    flows = tuple(Fraction(f, denom) for f in flow[:m])
    slack = tuple(Fraction(flow[m + v], denom) for v in range(n))
    return FlowSolution(objective=objective, edge_flows=flows, vertex_slack=slack, lam=lam)


# ---------------------------------------------------------------------------
# coupling-side solvers (bipartite transportation over supports)


def _transportation(
    supplies: list[int], demands: list[int], cost: list[list[int]]
) -> tuple[int, dict[tuple[int, int], int]]:
    """Dense bipartite transportation problem with integer data.

    ``cost[i][j]`` is the price per unit from source i to sink j.  Works
    on the residual network: a forward arc is always available and a
    backward arc exists wherever the current plan is positive.  Returns
    the integer objective and the plan's positive cells.
    """
    ns, nt = len(supplies), len(demands)
    if sum(supplies) != sum(demands):
        raise InvalidArgumentError("transportation supplies and demands must balance")
    plan: dict[tuple[int, int], int] = {}
    back: list[set[int]] = [set() for _ in range(nt)]  # sinks -> sources with plan > 0
    pot_s = [0] * ns
    pot_t = [0] * nt
    supplies = list(supplies)
    demands = list(demands)
    remaining = sum(supplies)
    infinite = float("inf")
    while remaining > 0:
        dist_s: list = [infinite] * ns
        dist_t: list = [infinite] * nt
        parent_t = [-1] * nt  # source index feeding this sink in the tree
        parent_s = [-1] * ns  # sink index feeding this source (via backward arc)
        settled_s = [False] * ns
        settled_t = [False] * nt
        heap = []
        for i in range(ns):
            if supplies[i] > 0:
                dist_s[i] = 0
                heap.append((0, 0, i))  # (dist, side: 0=source 1=sink, index)
        heapq.heapify(heap)
        target = -1
        target_dist = infinite
        while heap:
            d, side, u = heapq.heappop(heap)
            if side == 0:
                if settled_s[u]:
                    continue
                settled_s[u] = True
                pu = pot_s[u]
                row = cost[u]
                for j in range(nt):
                    if settled_t[j]:
                        continue
                    nd = d + row[j] + pu - pot_t[j]
                    if nd < dist_t[j]:
                        dist_t[j] = nd
                        parent_t[j] = u
                        heapq.heappush(heap, (nd, 1, j))
            else:
                if settled_t[u]:
                    continue
                settled_t[u] = True
                if demands[u] > 0:
                    target = u
                    target_dist = d
                    break
                pu = pot_t[u]
                for i in back[u]:
                    if settled_s[i]:
                        continue
                    nd = d - cost[i][u] + pu - pot_s[i]
                    if nd < dist_s[i]:
                        dist_s[i] = nd
                        parent_s[i] = u
                        heapq.heappush(heap, (nd, 0, i))
        if target == -1:
            raise InvalidArgumentError("transportation problem is infeasible")
        # Capped potential update, as in _ssp_flow.
        for i in range(ns):
            pot_s[i] += dist_s[i] if settled_s[i] else target_dist
        for j in range(nt):
            pot_t[j] += dist_t[j] if settled_t[j] else target_dist

        # Walk the alternating path back to its source, collecting arcs.
        arcs = []  # (i, j, +1 forward / -1 backward)
        j = target
        while True:
            i = parent_t[j]
            arcs.append((i, j, 1))
            if parent_s[i] == -1:
                # Seed sources are never relaxed into (that would need a
                # negative reduced cost), so a missing parent marks one.
                source = i
                break
            j = parent_s[i]
            arcs.append((i, j, -1))
        push = min(supplies[source], demands[target])
        for i, j, direction in arcs:
            if direction < 0:
                push = min(push, plan[(i, j)])
        supplies[source] -= push
        demands[target] -= push
        remaining -= push
        for i, j, direction in arcs:
            key = (i, j)
            newval = plan.get(key, 0) + direction * push
            if newval:
                plan[key] = newval
                back[j].add(i)
            else:
                plan.pop(key, None)
                back[j].discard(i)
    objective = sum(cost[i][j] * q for (i, j), q in plan.items())
    return objective, plan


def _scale_cost_matrix(costs: list[list[Fraction]]) -> tuple[list[list[int]], int]:
    scale = 1
    for row in costs:
        for c in row:
            scale = _lcm(scale, c.denominator)
    return [[int(c * scale) for c in row] for row in costs], scale


def kantorovich_oracle(
    g: Graph, x: MassDistribution, y: MassDistribution
) -> tuple[Fraction, TransportPlan]:
    """Transport distance via an explicit coupling over the two supports.

    Intended for small instances; costs are exact shortest-path
    distances.  Returns the objective and an optimal plan whose
    marginals equal x and y.
    """
    _check_masses(g, x, y)
    if x.total != y.total:
        raise UnbalancedInputError(
            f"total masses differ ({x.total} vs {y.total}); use sink_augmented_oracle"
        )
    sources = x.support()
    targets = y.support()
    if not sources:
        return Fraction(0), TransportPlan({})

    mass_scale = 1
    for v in sources:
        mass_scale = _lcm(mass_scale, x.masses[v].denominator)
    for w in targets:
        mass_scale = _lcm(mass_scale, y.masses[w].denominator)
    supplies = [int(x.masses[v] * mass_scale) for v in sources]
    demands = [int(y.masses[w] * mass_scale) for w in targets]

    rows = {v: g.int_dijkstra(v) for v in sources}
    cost = [[rows[v][w] for w in targets] for v in sources]
    obj_int, plan_int = _transportation(supplies, demands, cost)
    objective = Fraction(obj_int, mass_scale * g._weight_scale)
    plan = {
        (sources[i], targets[j]): Fraction(q, mass_scale) for (i, j), q in plan_int.items()
    }
    return objective, TransportPlan(plan)


def sink_augmented_oracle(
    g: Graph, x: MassDistribution, y: MassDistribution, lam
) -> tuple[Fraction, TransportPlan]:
    """Coupling formulation of the unbalanced problem.

    The node set gains one sink (id = vertex_count) adjacent to every
    vertex at distance lam; between original vertices the ground cost is
    min(d(v, w), 2*lam) since mass may pass through the sink.  Marginals
    are enforced on original vertices only, which is arranged by giving
    the sink a supply equal to y's total and a demand equal to x's total
    (surplus parks on the free sink-to-sink cell).
    """
    _check_masses(g, x, y)
    lam = _as_fraction(lam, "lambda")
    if lam < 0:
        raise InvalidArgumentError("lambda must be nonnegative")
    sink = g.vertex_count
    sources = x.support()
    targets = y.support()

    mass_scale = 1
    for v in sources:
        mass_scale = _lcm(mass_scale, x.masses[v].denominator)
    for w in targets:
        mass_scale = _lcm(mass_scale, y.masses[w].denominator)
    sup_total = sum(int(x.masses[v] * mass_scale) for v in sources)
    dem_total = sum(int(y.masses[w] * mass_scale) for w in targets)
    if sup_total == 0 and dem_total == 0:
        return Fraction(0), TransportPlan({})

    supplies = [int(x.masses[v] * mass_scale) for v in sources] + [dem_total]
    demands = [int(y.masses[w] * mass_scale) for w in targets] + [sup_total]
    two_lam = 2 * lam

    frac_cost: list[list[Fraction]] = []
    for v in sources:
        row_exact = g.distances_from(v)
        frac_cost.append([min(row_exact[w], two_lam) for w in targets] + [lam])
    frac_cost.append([lam] * len(targets) + [Fraction(0)])
    cost, cost_scale = _scale_cost_matrix(frac_cost)

    obj_int, plan_int = _transportation(supplies, demands, cost)
    objective = Fraction(obj_int, mass_scale * cost_scale)

    node_of_source = sources + [sink]
    node_of_target = targets + [sink]
    plan: dict[tuple[int, int], Fraction] = {}
    for (i, j), q in plan_int.items():
        key = (node_of_source[i], node_of_target[j])
        plan[key] = plan.get(key, Fraction(0)) + Fraction(q, mass_scale)
    plan.pop((sink, sink), None)
    # Cancel opposing sink traffic at the same vertex, parking the mass on
    # the free diagonal cell to preserve marginals.  With lam > 0 an
    # optimal plan never has both directions positive, and with lam = 0
    # the rewrite is cost-neutral, so the objective is unaffected.
    for v in list({v for (v, w) in plan if w == sink}):
        fwd = plan.get((v, sink), Fraction(0))
        bwd = plan.get((sink, v), Fraction(0))
        overlap = min(fwd, bwd)
        if overlap > 0:
            _set_or_del(plan, (v, sink), fwd - overlap)
            _set_or_del(plan, (sink, v), bwd - overlap)
            plan[(v, v)] = plan.get((v, v), Fraction(0)) + overlap
    return objective, TransportPlan(plan)


def _set_or_del(plan: dict, key, value: Fraction) -> None:
    if value:
        plan[key] = value
    else:
        plan.pop(key, None)


# ---------------------------------------------------------------------------
# plan -> flow reconstruction


def _shortest_path_edges(g: Graph, source: int) -> tuple[list[int], list[int]]:
    """Deterministic shortest-path tree: per-vertex parent edge and node."""
    n = g.vertex_count
    dist = [None] * n
    parent_edge = [-1] * n
    parent_node = [-1] * n
    tentative = [None] * n
    heap = [(0, source)]
    tentative[source] = 0
    wint = g._int_weights
    while heap:
        d, u = heapq.heappop(heap)
        if dist[u] is not None:
            continue
        dist[u] = d
        for idx, v, _ in g.neighbors(u):
            if dist[v] is not None:
                continue
            nd = d + wint[idx]
            if tentative[v] is None or nd < tentative[v]:
                tentative[v] = nd
                parent_edge[v] = idx
                parent_node[v] = u
                heapq.heappush(heap, (nd, v))
    return parent_edge, parent_node


def plan_to_flow(
    g: Graph, plan: TransportPlan, lam=None
) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...] | None]:
    """Route a coupling along fixed shortest paths to get edge flows.

    For a plan over the sink-augmented node set, pass the lam used to
    build it: entries between original vertices that are cheaper through
    the sink are first split into explicit to-sink and from-sink legs
    (cost-neutral), then everything else is routed inside the graph.
    Returns signed flows on the original edges plus the slack vector
    (z(v) = plan mass v->sink minus sink->v), or None when lam is None.
    """
    sink = g.vertex_count
    entries = dict(plan.plan)
    slack = None
    if lam is not None:
        lam = _as_fraction(lam, "lambda")
        two_lam = 2 * lam
        for (v, w), q in list(entries.items()):
            if v != sink and w != sink and g.distance(v, w) > two_lam:
                del entries[(v, w)]
                entries[(v, sink)] = entries.get((v, sink), Fraction(0)) + q
                entries[(sink, w)] = entries.get((sink, w), Fraction(0)) + q
        slack = [Fraction(0)] * g.vertex_count
        for (v, w), q in entries.items():
            if w == sink and v != sink:
                slack[v] += q
            elif v == sink and w != sink:
                slack[w] -= q

    flows = [Fraction(0)] * len(g.edges)
    trees: dict[int, tuple[list[int], list[int]]] = {}
    for (v, w), q in entries.items():
        if v == sink or w == sink or v == w or q == 0:
            continue
        if v not in trees:
            trees[v] = _shortest_path_edges(g, v)
        parent_edge, parent_node = trees[v]
        node = w
        while node != v:
            idx = parent_edge[node]
            prev = parent_node[node]
            tail = g.edges[idx][0]
            flows[idx] += q if tail == prev else -q
            node = prev
    return tuple(flows), None if slack is None else tuple(slack)


def divergence(g: Graph, edge_flows) -> list[Fraction]:
    """Net inflow per vertex of a signed edge-flow vector (P^T J)."""
    out = [Fraction(0)] * g.vertex_count
    for (tail, head, _), f in zip(g.edges, edge_flows):
        out[head] += f
        out[tail] -= f
    return out
