"""Agmon-type distances on graphs.

The node cost of ``v`` at energy ``E`` is ``log(1 + (W(v) - E)_+ / deg(v))``;
the Agmon distance of ``v`` is the cheapest sum of node costs along a path
from ``v`` into the allowed region ``{W <= E}``. The comparison distance
:func:`fmt_distance` charges edges instead of vertices.

All distances are computed by Dijkstra with a binary heap and lazy deletion.
Costs are nonnegative, so the standard correctness argument applies.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyAllowedRegion, TargetNotAllowed
from .graph import Graph, as_potential

__all__ = [
    "AgmonField",
    "node_cost",
    "node_costs",
    "allowed_mask",
    "agmon_distance",
    "agmon_distance_to",
    "fmt_edge_cost",
    "fmt_distance",
    "witness_path",
]

NO_PREDECESSOR = -1


@dataclass(frozen=True)
class AgmonField:
    """Agmon distance for one energy.

    ``predecessor[v]`` is the next vertex on a cheapest path from ``v`` to the
    allowed region (``-1`` on the allowed region and on unreachable vertices).
    ``energy`` is the level used for classification, i.e. the requested
    energy plus ``energy_shift``.
    """

    energy: float
    node_cost: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    predecessor: np.ndarray = field(repr=False)
    energy_shift: float = 0.0

    @property
    def allowed(self) -> np.ndarray:
        return self.node_cost == 0.0

    def path(self, v: int) -> list[int]:
        return witness_path(self.predecessor, v)


def node_cost(graph: Graph, potential, energy: float, v: int) -> float:
    excess = max(float(potential[v]) - energy, 0.0)
    return math.log1p(excess / graph.degrees[v])


def node_costs(graph: Graph, potential, energy: float) -> np.ndarray:
    w = np.asarray(potential, dtype=np.float64)
    excess = np.maximum(w - energy, 0.0)
    return np.log1p(excess / graph.degree_array)


def allowed_mask(potential, energy: float) -> np.ndarray:
    # exact comparison on purpose: no tolerance band around E
    return np.asarray(potential, dtype=np.float64) <= energy


def _dijkstra_nodes(graph: Graph, cost: np.ndarray, sources) -> tuple[np.ndarray, np.ndarray]:
    """Multi-source Dijkstra where entering vertex ``u`` costs ``cost[u]``.

    Sources start at distance 0 and pay nothing. Returns distances and, for
    each vertex, the neighbour it was reached from (towards the sources).
    """
    n = graph.n
    dist = np.full(n, np.inf)
    pred = np.full(n, NO_PREDECESSOR, dtype=np.int64)
    heap = []
    for s in sources:
        dist[s] = 0.0
        heap.append((0.0, int(s)))
    heapq.heapify(heap)
    done = np.zeros(n, dtype=bool)
    adj = graph.adjacency
    while heap:
        d, w = heapq.heappop(heap)
        if done[w]:
            continue
        done[w] = True
        for u in adj[w]:
            if done[u]:
                continue
            nd = d + cost[u]
            if nd < dist[u]:
                dist[u] = nd
                pred[u] = w
                heapq.heappush(heap, (nd, u))
    return dist, pred


def witness_path(predecessor: np.ndarray, v: int) -> list[int]:
    """Follow predecessor links from ``v`` until a vertex without one."""
    path = [int(v)]
    seen = {int(v)}
    while predecessor[path[-1]] != NO_PREDECESSOR:
        nxt = int(predecessor[path[-1]])
        if nxt in seen:
            raise RuntimeError(f"predecessor cycle through vertex {nxt}")
        seen.add(nxt)
        path.append(nxt)
    return path


def agmon_distance(graph: Graph, potential, energy: float, energy_shift: float = 0.0) -> AgmonField:
    """Agmon distance ``rho_E`` of every vertex to the allowed region.

    ``energy_shift`` is added to ``energy`` before classifying vertices;
    it exists for sensitivity experiments and defaults to zero. If no vertex
    is allowed, :class:`EmptyAllowedRegion` is raised carrying a field with
    ``rho = inf`` everywhere.

    >>> from agmon.graph import gen_path
    >>> f = agmon_distance(gen_path(3), [0.0, 10.0, 0.0], 1.0)
    >>> round(float(f.rho[1]), 5)
    1.70475
    """
    w = as_potential(potential, graph.n)
    level = energy + energy_shift
    cost = node_costs(graph, w, level)
    sources = np.flatnonzero(allowed_mask(w, level))
    dist, pred = _dijkstra_nodes(graph, cost, sources)
    for a in (cost, dist, pred):
        a.flags.writeable = False
    result = AgmonField(level, cost, dist, pred, energy_shift)
    if sources.size == 0:
        raise EmptyAllowedRegion(f"no vertex has W(v) <= {level!r}", field=result)
    return result


def agmon_distance_to(graph: Graph, potential, energy: float, target: int) -> np.ndarray:
    """Cheapest node-cost sum over paths from each vertex ending at ``target``.

    Allowed vertices cost nothing, so paths may cross the allowed region
    freely; ``target`` itself must be allowed.
    """
    w = as_potential(potential, graph.n)
    if not w[target] <= energy:
        raise TargetNotAllowed(f"target {target} has W = {w[target]!r} > E = {energy!r}")
    dist, _ = _dijkstra_nodes(graph, node_costs(graph, w, energy), [target])
    return dist


def fmt_edge_cost(potential, energy: float, u: int, v: int) -> float:
    w = np.asarray(potential, dtype=np.float64)
    prod = max(float(w[u]) - energy, 0.0) * max(float(w[v]) - energy, 0.0)
    return math.log1p(prod**0.25)


def fmt_distance(graph: Graph, potential, energy: float) -> np.ndarray:
    """Edge-cost distance to the allowed region with edge weight
    ``log(1 + ((W(u)-E)_+ (W(v)-E)_+)^(1/4))``.

    Any edge touching the allowed region has weight zero.
    """
    w = as_potential(potential, graph.n)
    excess = np.maximum(w - energy, 0.0)
    sources = np.flatnonzero(allowed_mask(w, energy))
    n = graph.n
    dist = np.full(n, np.inf)
    if sources.size == 0:
        raise EmptyAllowedRegion(f"no vertex has W(v) <= {energy!r}")
    heap = [(0.0, int(s)) for s in sources]
    dist[sources] = 0.0
    done = np.zeros(n, dtype=bool)
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y in graph.adjacency[x]:
            if done[y]:
                continue
            nd = d + math.log1p((excess[x] * excess[y]) ** 0.25)
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist
