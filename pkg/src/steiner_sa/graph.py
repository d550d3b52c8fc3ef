"""Directed graph instances and all-pairs shortest paths.

Node ids are 0-based integers.  Commodity k corresponds to ``terminals[k]``
by list position.  Arcs are referenced everywhere else in the package by
their index into ``Instance.arcs``, which keeps parallel arcs distinct.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveCost, RootIsTerminal, UnreachableTerminal

Arc = tuple[int, int, float]


@dataclass(frozen=True)
class Instance:
    """Validated directed Steiner tree instance.

    Immutable after construction; safe to share across threads.
    """

    node_count: int
    arcs: tuple[Arc, ...]
    root: int
    terminals: tuple[int, ...]

    @property
    def commodity_count(self) -> int:
        return len(self.terminals)

    def arc_cost(self, arc_id: int) -> float:
        return self.arcs[arc_id][2]

    def total_cost(self, arc_ids) -> float:
        return float(sum(self.arcs[a][2] for a in arc_ids))


def build_instance(node_count, arcs, root, terminals) -> Instance:
    """Validate and freeze an instance.

    Raises NonPositiveCost, RootIsTerminal or UnreachableTerminal on
    contract violations; plain ValueError for malformed ids.
    """
    arcs = tuple((int(u), int(v), float(c)) for u, v, c in arcs)
    terminals = tuple(int(t) for t in terminals)
    if node_count <= 0:
        raise ValueError("node_count must be positive")
    if not terminals:
        raise ValueError("terminal list must not be empty")
    for u, v, c in arcs:
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise ValueError(f"arc ({u},{v}) out of node range")
        if c <= 0:
            raise NonPositiveCost(f"arc ({u},{v}) has cost {c}")
    if not 0 <= root < node_count:
        raise ValueError(f"root {root} out of node range")
    if root in terminals:
        raise RootIsTerminal(f"root {root} appears in the terminal list")
    if len(set(terminals)) != len(terminals):
        raise ValueError("terminals must be distinct")
    for t in terminals:
        if not 0 <= t < node_count:
            raise ValueError(f"terminal {t} out of node range")

    instance = Instance(node_count, arcs, root, terminals)
    reached = _reachable_from(instance, root)
    for k, t in enumerate(terminals):
        if t not in reached:
            raise UnreachableTerminal(f"terminal {t} (commodity {k}) unreachable from root")
    return instance


def bidirect(undirected_edges) -> list[Arc]:
    """Expand each undirected edge {u,v,c} into the arc pair (u,v,c),(v,u,c)."""
    arcs: list[Arc] = []
    for u, v, c in undirected_edges:
        if c <= 0:
            raise NonPositiveCost(f"edge ({u},{v}) has cost {c}")
        arcs.append((u, v, float(c)))
        arcs.append((v, u, float(c)))
    return arcs


def out_adjacency(instance: Instance) -> list[list[tuple[int, int]]]:
    """Per-node list of (head, arc_id) pairs."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(instance.node_count)]
    for idx, (u, v, _) in enumerate(instance.arcs):
        adj[u].append((v, idx))
    return adj


def _reachable_from(instance: Instance, source: int) -> set[int]:
    adj = out_adjacency(instance)
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def dijkstra(instance: Instance, source: int, adj=None, cost_override=None):
    """Single-source shortest paths with deterministic tie-breaking.

    Ties between equal-length paths are resolved toward the lower-numbered
    predecessor node (and lower arc id among parallel arcs).  Returns
    (dist, pred_node, pred_arc) arrays with -1 sentinels for "none".
    cost_override, when given, replaces the instance arc costs and may
    contain zeros (label-setting stays correct for costs >= 0).
    """
    n = instance.node_count
    if adj is None:
        adj = out_adjacency(instance)
    costs = cost_override if cost_override is not None else [a[2] for a in instance.arcs]

    dist = np.full(n, np.inf)
    pred_node = np.full(n, -1, dtype=np.int32)
    pred_arc = np.full(n, -1, dtype=np.int64)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, arc_id in adj[u]:
            nd = d + costs[arc_id]
            if nd < dist[v]:
                dist[v] = nd
                pred_node[v] = u
                pred_arc[v] = arc_id
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and not done[v]:
                if u < pred_node[v] or (u == pred_node[v] and arc_id < pred_arc[v]):
                    pred_node[v] = u
                    pred_arc[v] = arc_id
    return dist, pred_node, pred_arc


@dataclass(frozen=True, eq=False)
class ApspTable:
    """All-pairs shortest path costs plus predecessors for reconstruction.

    dist[i][j] is +inf for unreachable pairs, pred[i][j] is -1 when j has no
    predecessor on a shortest i-j path (unreachable, or j == i).
    """

    dist: np.ndarray
    pred: np.ndarray
    arc_of: dict[tuple[int, int], int] = field(repr=False)

    def path_nodes(self, i: int, j: int) -> list[int]:
        if i == j:
            return [i]
        if not np.isfinite(self.dist[i, j]):
            raise ValueError(f"node {j} unreachable from {i}")
        rev = [j]
        v = j
        while v != i:
            v = int(self.pred[i, v])
            rev.append(v)
        rev.reverse()
        return rev

    def path_arcs(self, i: int, j: int) -> tuple[int, ...]:
        nodes = self.path_nodes(i, j)
        return tuple(self.arc_of[(u, v)] for u, v in zip(nodes, nodes[1:]))


def compute_apsp(instance: Instance) -> ApspTable:
    """Run one label-setting search per source node; O(n^2) memory."""
    n = instance.node_count
    adj = out_adjacency(instance)
    dist = np.full((n, n), np.inf)
    pred = np.full((n, n), -1, dtype=np.int32)
    for s in range(n):
        d, p, _ = dijkstra(instance, s, adj=adj)
        dist[s] = d
        pred[s] = p

    # cheapest arc per ordered node pair; ties go to the lower arc id so
    # reconstructed path costs match dist entries exactly
    arc_of: dict[tuple[int, int], int] = {}
    for idx, (u, v, c) in enumerate(instance.arcs):
        cur = arc_of.get((u, v))
        if cur is None or c < instance.arcs[cur][2]:
            arc_of[(u, v)] = idx
    return ApspTable(dist=dist, pred=pred, arc_of=arc_of)
