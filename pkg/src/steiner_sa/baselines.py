"""Shortest-path benchmark heuristics used as the desk-scale comparator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import ApspTable, Instance, dijkstra, out_adjacency


@dataclass(frozen=True)
class BaselineResult:
    arcs: frozenset[int]
    cost: float
    algorithm: str


def shp1(instance: Instance, apsp: ApspTable) -> BaselineResult:
    """Union of the shortest paths from the root to every terminal."""
    arcs: set[int] = set()
    for t in instance.terminals:
        arcs.update(apsp.path_arcs(instance.root, t))
    return BaselineResult(arcs=frozenset(arcs), cost=instance.total_cost(arcs), algorithm="shp1")


def shp2(instance: Instance) -> BaselineResult:
    """Greedy nearest-terminal heuristic with arc-cost zeroing.

    Repeatedly routes the closest unreached terminal from the root on the
    working costs, then zeroes the used arcs so later terminals ride the
    established paths for free.  Cost is reported on the original arc
    costs over distinct arcs; ties on the closest terminal break toward
    the lowest commodity index.
    """
    adj = out_adjacency(instance)
    working = np.array([a[2] for a in instance.arcs])
    unreached = list(range(instance.commodity_count))
    chosen: set[int] = set()
    while unreached:
        dist, _, pred_arc = dijkstra(instance, instance.root, adj=adj, cost_override=working)
        k = min(unreached, key=lambda k: (dist[instance.terminals[k]], k))
        v = instance.terminals[k]
        while v != instance.root:
            a = int(pred_arc[v])
            chosen.add(a)
            working[a] = 0.0
            v = instance.arcs[a][0]
        unreached.remove(k)
    return BaselineResult(arcs=frozenset(chosen), cost=instance.total_cost(chosen), algorithm="shp2")


def best_benchmark(instance: Instance, apsp: ApspTable) -> BaselineResult:
    """Cheapest of the two baselines, labeled bb2 (shp1 wins ties)."""
    a = shp1(instance, apsp)
    b = shp2(instance)
    winner = a if a.cost <= b.cost else b
    return BaselineResult(arcs=winner.arcs, cost=winner.cost, algorithm="bb2")
