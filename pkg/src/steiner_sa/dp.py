"""Exact solver for the fixed-structure subproblem, plus solution improvement.

For a full-binary family the cost of the best tree following that structure
satisfies, for every set s with children s1, s2,

    z(i, s) = min_j [ c(sp(i, j)) + z(j, s1) + z(j, s2) ]

with z(i, {k}) = c(sp(i, t_k)).  Sets are processed in increasing
cardinality; for the full set only the root row is needed.  Rows are
memoized by the composition of the whole subtree they describe, so after a
local tree rearrangement only the sets on the affected root path are
recomputed.
"""

from __future__ import annotations

from collections import OrderedDict, deque
from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible, NotArborescence, Unreachable
from .graph import ApspTable, Instance
from .laminar import LaminarFamily, family_from_tree, random_binarize


@dataclass(frozen=True)
class SteinerTree:
    """Arc set forming an r-arborescence whose leaves are terminals."""

    arcs: frozenset[int]
    cost: float


@dataclass(eq=False)
class DpTables:
    """Per-set cost vectors z and splitting-node vectors j*.

    ``z[mask][i]`` is the cost of serving set ``mask`` rooted at node i;
    ``j_star[mask][i]`` the node where the set splits.  The full set K is
    only evaluated at the instance root (root_cost / root_split).
    """

    z: dict[int, np.ndarray]
    j_star: dict[int, np.ndarray]
    root_cost: float
    root_split: int


@dataclass(eq=False)
class StructuredSolution:
    """Optimal structured solution for one laminar family.

    ``segments`` maps each set to the arc sequence of its path segment
    (arcs shared between different sets are paid once per set in
    ``structured_cost``); ``support`` is the deduplicated arc union.
    """

    family: LaminarFamily
    structured_cost: float
    segments: dict[int, tuple[int, ...]] = field(repr=False)
    support: frozenset[int]
    tables: DpTables = field(repr=False)


class DpCache:
    """LRU memo of z/j* rows keyed by subtree composition.

    Keys encode every set of the subtree they summarize, so entries stay
    valid across arbitrary families of the same instance.  One cache per
    search thread; do not share across instances.
    """

    def __init__(self, max_entries: int | None = 200_000):
        self.max_entries = max_entries
        self._data: OrderedDict = OrderedDict()
        self.hits = 0
        self.misses = 0

    def get(self, key):
        entry = self._data.get(key)
        if entry is None:
            self.misses += 1
            return None
        self._data.move_to_end(key)
        self.hits += 1
        return entry

    def put(self, key, value) -> None:
        self._data[key] = value
        if self.max_entries is not None and len(self._data) > self.max_entries:
            self._data.popitem(last=False)


def solve_structure(
    instance: Instance,
    apsp: ApspTable,
    family: LaminarFamily,
    cache: DpCache | None = None,
) -> StructuredSolution:
    """Solve the subproblem of one full-binary family exactly.

    Minimizes over all splitting nodes j (including j = i, an empty
    segment); ties are broken toward the lowest node id.  Raises
    Infeasible when the structure cannot be realized.
    """
    if not family.full_binary:
        raise ValueError("solve_structure requires a full-binary family")
    if family.b != instance.commodity_count:
        raise ValueError("family and instance disagree on the number of commodities")
    dist = apsp.dist
    terms = instance.terminals
    K = family.K

    z: dict[int, np.ndarray] = {1 << k: dist[:, t] for k, t in enumerate(terms)}
    j_star: dict[int, np.ndarray] = {}
    for mask in family.sets:
        if mask.bit_count() < 2 or mask == K:
            continue
        key = family.subtree_key[mask]
        hit = cache.get(key) if cache is not None else None
        if hit is not None:
            z[mask], j_star[mask] = hit
            continue
        c1, c2 = family.children[mask]
        w = z[c1] + z[c2]
        board = dist + w[None, :]
        row = board.min(axis=1)
        arg = board.argmin(axis=1).astype(np.int32)
        z[mask] = row
        j_star[mask] = arg
        if cache is not None:
            cache.put(key, (row, arg))

    r = instance.root
    if family.b == 1:
        root_cost = float(dist[r, terms[0]])
        root_split = -1
    else:
        key = ("root", family.subtree_key[K])
        hit = cache.get(key) if cache is not None else None
        if hit is not None:
            root_cost, root_split = hit
        else:
            c1, c2 = family.children[K]
            row = dist[r] + z[c1] + z[c2]
            root_split = int(row.argmin())
            root_cost = float(row[root_split])
            if cache is not None:
                cache.put(key, (root_cost, root_split))
    if not np.isfinite(root_cost):
        raise Infeasible("structure cannot be realized: infinite cost at the root")

    segments: dict[int, tuple[int, ...]] = {}
    support: set[int] = set()

    def expand(mask: int, i: int) -> None:
        if mask.bit_count() == 1:
            seg = apsp.path_arcs(i, terms[mask.bit_length() - 1])
        else:
            j = root_split if mask == K else int(j_star[mask][i])
            seg = apsp.path_arcs(i, j)
            for child in family.children[mask]:
                expand(child, j)
        segments[mask] = seg
        support.update(seg)

    expand(K, r)
    tables = DpTables(z=z, j_star=j_star, root_cost=root_cost, root_split=root_split)
    return StructuredSolution(
        family=family,
        structured_cost=root_cost,
        segments=segments,
        support=frozenset(support),
        tables=tables,
    )


# --- arborescence utilities ---------------------------------------------------

def is_r_arborescence(arc_ids, instance: Instance) -> bool:
    """True iff the arcs form a directed tree rooted at the instance root.

    In-degree <= 1 everywhere, no arc into the root, and every arc endpoint
    reachable from the root (which rules out cycles given the in-degree
    bound).  The empty set qualifies vacuously.
    """
    arc_ids = set(arc_ids)
    if not arc_ids:
        return True
    out: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    nodes: set[int] = set()
    for a in arc_ids:
        u, v, _ = instance.arcs[a]
        out.setdefault(u, []).append(v)
        indeg[v] = indeg.get(v, 0) + 1
        if indeg[v] > 1:
            return False
        nodes.add(u)
        nodes.add(v)
    if indeg.get(instance.root, 0) > 0:
        return False
    seen = {instance.root}
    queue = deque([instance.root])
    while queue:
        u = queue.popleft()
        for v in out.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return nodes <= seen


def _leaves_are_terminals(arc_ids, instance: Instance) -> bool:
    heads = set()
    tails = set()
    for a in arc_ids:
        u, v, _ = instance.arcs[a]
        tails.add(u)
        heads.add(v)
    terminal = set(instance.terminals)
    return all(v in terminal for v in heads - tails)


def min_cost_arborescence(arc_subset, instance: Instance, root: int) -> frozenset[int]:
    """Cheapest arborescence from ``root`` spanning its reachable nodes.

    Classic contraction scheme: pick the cheapest entering arc per node,
    contract any cycle with reduced costs, recurse, expand.  Ties go to the
    lower arc id.  Raises Unreachable when a terminal cannot be reached
    inside the subset.
    """
    arc_subset = sorted(set(arc_subset))
    out: dict[int, list[tuple[int, int]]] = {}
    for a in arc_subset:
        u, v, _ = instance.arcs[a]
        out.setdefault(u, []).append((v, a))
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v, _ in out.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    for t in instance.terminals:
        if t not in seen:
            raise Unreachable(f"terminal {t} unreachable within the arc subset")

    arcs = [
        (u, v, c, a)
        for a in arc_subset
        for u, v, c in (instance.arcs[a],)
        if u in seen and v in seen and v != root and u != v
    ]
    records = [(u, v, c, rank, a) for rank, (u, v, c, a) in enumerate(arcs)]
    chosen = _edmonds(seen, records, root)
    return frozenset(chosen)


def _edmonds(nodes, records, root):
    # records: (tail, head, cost, rank, payload); returns chosen payloads
    best: dict[int, tuple] = {}
    for rec in records:
        u, v, c, rank, _ = rec
        cur = best.get(v)
        if cur is None or (c, rank) < (cur[2], cur[3]):
            best[v] = rec

    cycle = None
    for start in best:
        path_index = {}
        v = start
        while v in best and v not in path_index:
            path_index[v] = len(path_index)
            v = best[v][0]
        if v in path_index:
            ordered = sorted(path_index, key=path_index.__getitem__)
            cycle = ordered[path_index[v]:]
            break
    if cycle is None:
        return [rec[4] for rec in best.values()]

    in_cycle = set(cycle)
    cnode = max(nodes) + 1
    sub_records = []
    for rec in records:
        u, v, c, _, _ = rec
        uc, vc = u in in_cycle, v in in_cycle
        if uc and vc:
            continue
        if vc:
            sub_records.append((u, cnode, c - best[v][2], len(sub_records), rec))
        elif uc:
            sub_records.append((cnode, v, c, len(sub_records), rec))
        else:
            sub_records.append((u, v, c, len(sub_records), rec))
    sub_nodes = (set(nodes) - in_cycle) | {cnode}
    chosen = _edmonds(sub_nodes, sub_records, root)

    entry_head = None
    out = []
    for rec in chosen:
        out.append(rec[4])
        if rec[1] in in_cycle:
            entry_head = rec[1]
    for v in cycle:
        if v != entry_head:
            out.append(best[v][4])
    return out


def prune_steiner_leaves(arc_ids, instance: Instance) -> SteinerTree:
    """Drop non-terminal leaves (repeatedly) from an r-arborescence."""
    arcs = set(arc_ids)
    in_arc: dict[int, int] = {}
    out_deg: dict[int, int] = {}
    for a in arcs:
        u, v, _ = instance.arcs[a]
        in_arc[v] = a
        out_deg[u] = out_deg.get(u, 0) + 1
        out_deg.setdefault(v, 0)
    terminal = set(instance.terminals)
    queue = deque(
        v for v, d in out_deg.items() if d == 0 and v not in terminal and v != instance.root
    )
    while queue:
        v = queue.popleft()
        a = in_arc.pop(v, None)
        if a is None or a not in arcs:
            continue
        arcs.discard(a)
        u = instance.arcs[a][0]
        out_deg[u] -= 1
        if out_deg[u] == 0 and u not in terminal and u != instance.root:
            queue.append(u)
    return SteinerTree(arcs=frozenset(arcs), cost=instance.total_cost(arcs))


def improve_solution(
    solution: StructuredSolution,
    instance: Instance,
    apsp: ApspTable,
    rng: np.random.Generator,
    cache: DpCache | None = None,
) -> tuple[SteinerTree, LaminarFamily, StructuredSolution]:
    """Turn a structured solution into a Steiner tree, improving if possible.

    When the support already is an r-arborescence with terminal leaves it
    is returned as-is with the family unchanged.  Otherwise a minimum-cost
    arborescence is carved out of the support, Steiner leaves are pruned,
    and the subproblem of the pruned tree's own structure (binarized at
    random when needed) is re-solved.  The re-solve can only reduce the
    structured cost, because the tree itself is feasible for the new
    structure and costs at most the support.
    """
    support = solution.support
    if is_r_arborescence(support, instance) and _leaves_are_terminals(support, instance):
        tree = SteinerTree(arcs=support, cost=instance.total_cost(support))
        return tree, solution.family, solution
    arb = min_cost_arborescence(support, instance, instance.root)
    tree = prune_steiner_leaves(arb, instance)
    improved = family_from_tree(tree, instance)
    if not improved.full_binary:
        improved = random_binarize(improved, rng)
    new_solution = solve_structure(instance, apsp, improved, cache)
    return tree, improved, new_solution
