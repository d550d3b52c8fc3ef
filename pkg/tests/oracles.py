"""Independent reference computations used to check the solver.

Everything here is deliberately written with different algorithms than the
package: exhaustive path enumeration instead of label-setting searches,
Floyd-Warshall instead of repeated Dijkstra, subset dynamic programming
and in-arc product enumeration instead of the structure DP and the
contraction arborescence algorithm.
"""

from __future__ import annotations

import itertools

import numpy as np

from steiner_sa.graph import Instance, build_instance


def apsp_by_enumeration(instance: Instance) -> np.ndarray:
    """Exact distances by enumerating every simple path (n <= 8 or so)."""
    n = instance.node_count
    adj: dict[int, list[tuple[int, float]]] = {u: [] for u in range(n)}
    for u, v, c in instance.arcs:
        adj[u].append((v, c))
    dist = np.full((n, n), np.inf)
    for s in range(n):
        dist[s, s] = 0.0

        def walk(u, cost, visited):
            if cost < dist[s, u]:
                dist[s, u] = cost
            for v, c in adj[u]:
                if v not in visited:
                    walk(v, cost + c, visited | {v})

        walk(s, 0.0, {s})
    return dist


def floyd_warshall(instance: Instance) -> np.ndarray:
    n = instance.node_count
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v, c in instance.arcs:
        if c < dist[u, v]:
            dist[u, v] = c
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def structured_cost_brute(instance: Instance, dist: np.ndarray, family) -> float:
    """Minimum structured cost by trying every splitting-node assignment."""
    terms = instance.terminals
    internal = [m for m in family.sets if m.bit_count() >= 2]
    n = instance.node_count

    def cost(mask: int, i: int, assign) -> float:
        if mask.bit_count() == 1:
            return dist[i, terms[mask.bit_length() - 1]]
        j = assign[mask]
        c1, c2 = family.children[mask]
        return dist[i, j] + cost(c1, j, assign) + cost(c2, j, assign)

    best = np.inf
    for combo in itertools.product(range(n), repeat=len(internal)):
        assign = dict(zip(internal, combo))
        c = cost(family.K, instance.root, assign)
        if c < best:
            best = c
    return float(best)


def steiner_opt_exact(instance: Instance) -> float:
    """Exact directed Steiner optimum via subset dynamic programming.

    T[S][v] = cost of the best solution rooted at v covering terminal set S,
    combining subset splits with shortest-path moves.
    """
    dist = floyd_warshall(instance)
    terms = instance.terminals
    b = len(terms)
    T: dict[int, np.ndarray] = {1 << k: dist[:, t].copy() for k, t in enumerate(terms)}
    for size in range(2, b + 1):
        for bits in itertools.combinations(range(b), size):
            mask = 0
            for k in bits:
                mask |= 1 << k
            low = mask & -mask
            rest = mask ^ low
            merged = None
            sub = rest
            while True:
                s1 = low | sub
                if s1 != mask:
                    cand = T[s1] + T[mask ^ s1]
                    merged = cand if merged is None else np.minimum(merged, cand)
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            T[mask] = (dist + merged[None, :]).min(axis=1)
    return float(T[(1 << b) - 1][instance.root])


def min_arborescence_brute(arc_ids, instance: Instance, root: int):
    """Cheapest spanning arborescence by brute force over in-arc choices."""
    arcs = sorted(set(arc_ids))
    out: dict[int, list[int]] = {}
    for a in arcs:
        u, v, _ = instance.arcs[a]
        out.setdefault(u, []).append(a)
    reach = {root}
    frontier = [root]
    while frontier:
        u = frontier.pop()
        for a in out.get(u, ()):
            v = instance.arcs[a][1]
            if v not in reach:
                reach.add(v)
                frontier.append(v)
    others = sorted(reach - {root})
    in_arcs = {
        v: [a for a in arcs if instance.arcs[a][1] == v and instance.arcs[a][0] in reach]
        for v in others
    }
    best_cost, best_set = np.inf, None
    for combo in itertools.product(*(in_arcs[v] for v in others)):
        chosen = set(combo)
        seen = {root}
        frontier = [root]
        heads = {instance.arcs[a][1]: a for a in chosen}
        tails: dict[int, list[int]] = {}
        for a in chosen:
            tails.setdefault(instance.arcs[a][0], []).append(instance.arcs[a][1])
        while frontier:
            u = frontier.pop()
            for v in tails.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        if seen != reach:
            continue
        cost = instance.total_cost(chosen)
        if cost < best_cost:
            best_cost, best_set = cost, chosen
    return best_cost, best_set


def steiner_opt_tiny(instance: Instance) -> float:
    """Steiner optimum by enumerating node subsets (cross-check, n <= 7)."""
    need = set(instance.terminals) | {instance.root}
    optional = [v for v in range(instance.node_count) if v not in need]
    best = np.inf
    for r in range(len(optional) + 1):
        for extra in itertools.combinations(optional, r):
            nodes = need | set(extra)
            arcs = [
                a
                for a, (u, v, _) in enumerate(instance.arcs)
                if u in nodes and v in nodes
            ]
            # a spanning arborescence of the reachable part only helps if it
            # still covers every terminal
            reach = {instance.root}
            frontier = [instance.root]
            heads: dict[int, list[int]] = {}
            for a in arcs:
                heads.setdefault(instance.arcs[a][0], []).append(instance.arcs[a][1])
            while frontier:
                u = frontier.pop()
                for v in heads.get(u, ()):
                    if v not in reach:
                        reach.add(v)
                        frontier.append(v)
            if not need <= reach:
                continue
            cost, _ = min_arborescence_brute(arcs, instance, instance.root)
            if cost < best:
                best = cost
    return float(best)


def all_full_binary_collections(b: int) -> list[tuple[int, ...]]:
    """Every full-binary admissible family on b commodities, as mask tuples."""

    def rec(mask: int) -> list[list[int]]:
        bits = [k for k in range(b) if mask >> k & 1]
        if len(bits) == 1:
            return [[mask]]
        out = []
        low = 1 << bits[0]
        rest = bits[1:]
        for r in range(1 << len(rest)):
            s1 = low
            for i, k in enumerate(rest):
                if r >> i & 1:
                    s1 |= 1 << k
            s2 = mask ^ s1
            if s2 == 0:
                continue
            for f1 in rec(s1):
                for f2 in rec(s2):
                    out.append([mask] + f1 + f2)
        return out

    return [tuple(sorted(f, key=lambda m: (m.bit_count(), m))) for f in rec((1 << b) - 1)]


def masks_to_sets(collection) -> list[list[int]]:
    return [[k for k in range(64) if m >> k & 1] for m in collection]


def random_instance(rng: np.random.Generator, n: int, b: int, extra_arcs: int,
                    cost_hi: int = 10) -> Instance:
    """Random instance with guaranteed terminal reachability.

    A random recursive arborescence rooted at node 0 makes every node
    reachable; extra random arcs add shortcuts.  Integer costs 1..cost_hi.
    """
    arcs = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        arcs.append((u, v, float(rng.integers(1, cost_hi + 1))))
    for _ in range(extra_arcs):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        arcs.append((u, v, float(rng.integers(1, cost_hi + 1))))
    terminals = rng.choice(np.arange(1, n), size=b, replace=False)
    return build_instance(n, arcs, 0, [int(t) for t in sorted(terminals)])
