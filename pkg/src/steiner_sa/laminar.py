"""Laminar families of commodity subsets and their tree operations.

A commodity subset is stored as an int bitmask over commodities 0..b-1.
A family is kept in canonical form: the collection of masks sorted by
(popcount, value).  Two families are equal iff their canonical collections
are equal, which is what deduplication and the golden tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DisconnectedTerminals,
    DuplicateSet,
    MissingCoordinates,
    NoNeighbor,
    NotAdmissible,
    NotArborescence,
    NotLaminar,
)

# regraft slot sitting above the remainder's root (creates a new root node)
_ABOVE_ROOT = -1


@dataclass(frozen=True)
class LaminarFamily:
    """Admissible laminar family with its containment-tree structure.

    ``sets`` is the canonical collection S(l).  ``children``/``parent`` mirror
    set containment; the root is the full commodity set K, leaves are the
    singletons.  Immutable after construction.
    """

    b: int
    sets: tuple[int, ...]
    children: Mapping[int, tuple[int, ...]] = field(compare=False, repr=False)
    parent: Mapping[int, int] = field(compare=False, repr=False)
    subtree_key: Mapping[int, tuple[int, ...]] = field(compare=False, repr=False)
    full_binary: bool = field(compare=False)

    @property
    def K(self) -> int:
        return (1 << self.b) - 1

    def __len__(self) -> int:
        return len(self.sets)

    def debug_lines(self) -> list[str]:
        """One 0/1 string per set (commodity 0 leftmost), canonical order."""
        return ["".join("1" if m >> k & 1 else "0" for k in range(self.b)) for m in self.sets]


def _mask_of(commodities: Iterable[int]) -> int:
    mask = 0
    for k in commodities:
        if k < 0:
            raise ValueError(f"negative commodity id {k}")
        mask |= 1 << k
    return mask


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _family_from_masks(masks: Iterable[int]) -> LaminarFamily:
    sets = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    if not sets or sets[0] == 0:
        raise NotAdmissible("family contains an empty set or is empty")
    union = 0
    for m in sets:
        union |= m
    b = union.bit_length()
    full = (1 << b) - 1
    if sets[-1] != full:
        raise NotAdmissible("family does not contain the full commodity set")
    for k in range(b):
        if (1 << k) not in sets:
            raise NotAdmissible(f"family is missing singleton {{{k}}}")
    for i, a in enumerate(sets):
        for c in sets[i + 1:]:
            inter = a & c
            if inter and inter != a and inter != c:
                raise NotLaminar(f"sets {a:#x} and {c:#x} cross")

    # parent = smallest strict superset; increasing-cardinality order makes
    # children available before their parents everywhere downstream
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {m: [] for m in sets}
    for i, m in enumerate(sets):
        if m == full:
            continue
        for cand in sets[i + 1:]:
            if cand & m == m and cand != m:
                parent[m] = cand
                children[cand].append(m)
                break
    children_t = {m: tuple(sorted(ch)) for m, ch in children.items()}
    full_binary = all(len(children_t[m]) == 2 for m in sets if m.bit_count() >= 2)

    key: dict[int, tuple[int, ...]] = {}
    for m in sets:
        if m.bit_count() == 1:
            key[m] = (m,)
        else:
            merged: list[int] = [m]
            for c in children_t[m]:
                merged.extend(key[c])
            key[m] = tuple(sorted(merged))

    return LaminarFamily(
        b=b,
        sets=tuple(sets),
        children=children_t,
        parent=parent,
        subtree_key=key,
        full_binary=full_binary,
    )


def from_sets(collection) -> LaminarFamily:
    """Build and validate a family from an iterable of commodity subsets."""
    masks = [_mask_of(s) for s in collection]
    if len(masks) != len(set(masks)):
        seen: set[int] = set()
        for m in masks:
            if m in seen:
                raise DuplicateSet(f"set {m:#x} appears more than once")
            seen.add(m)
    return _family_from_masks(masks)


def random_binarize(family: LaminarFamily, rng: np.random.Generator) -> LaminarFamily:
    """Merge random child pairs until every non-singleton has two children.

    Every set of the input family is preserved; each merge reduces one
    node's child count by 1, so the loop terminates.  Already full-binary
    families are returned unchanged.
    """
    if family.full_binary:
        return family
    masks = set(family.sets)
    wide = [m for m in family.sets if len(family.children[m]) >= 3]
    for s in wide:
        ch = list(family.children[s])
        while len(ch) >= 3:
            i, j = sorted(rng.choice(len(ch), size=2, replace=False))
            merged = ch[i] | ch[j]
            del ch[j]
            del ch[i]
            ch.append(merged)
            masks.add(merged)
    return _family_from_masks(masks)


# --- SPR neighborhood -------------------------------------------------------

def _topology(family: LaminarFamily):
    """Mutable copy of the tree: node handles are 0..2b-2 in canonical order."""
    index = {m: i for i, m in enumerate(family.sets)}
    children = {index[m]: [index[c] for c in family.children[m]] for m in family.sets}
    parent = {index[m]: index[p] for m, p in family.parent.items()}
    leaf_mask = {index[m]: m for m in family.sets if m.bit_count() == 1}
    root = index[family.sets[-1]]
    return root, children, parent, leaf_mask


def _node_masks(root, children, leaf_mask) -> dict[int, int]:
    masks: dict[int, int] = {}

    def walk(node):
        if not children.get(node):
            masks[node] = leaf_mask[node]
            return masks[node]
        m = 0
        for c in children[node]:
            m |= walk(c)
        masks[node] = m
        return m

    walk(root)
    return masks


def _prune_and_slots(family: LaminarFamily, v: int):
    """Detach the subtree below node v and suppress its parent.

    Returns (root, children, parent, leaf_mask, slots, new_handle) where
    slots is the ordered list of regraft positions of the remainder: one per
    non-root node (the edge above it) plus _ABOVE_ROOT, minus the position
    recreated by the suppression (regrafting there rebuilds the input).
    """
    root, children, parent, leaf_mask = _topology(family)
    u = parent[v]
    sibling = next(c for c in children[u] if c != v)
    if u == root:
        new_root = sibling
        parent.pop(sibling)
        excluded = _ABOVE_ROOT
    else:
        g = parent[u]
        children[g][children[g].index(u)] = sibling
        parent[sibling] = g
        new_root = root
        excluded = sibling
    masks = _node_masks(new_root, children, leaf_mask)
    slots = sorted((nd for nd in masks if nd != new_root), key=masks.__getitem__)
    slots.append(_ABOVE_ROOT)
    slots.remove(excluded)
    handle = 2 * family.b  # first id past the original node range
    return new_root, children, parent, leaf_mask, slots, handle


def _regraft(root, children, parent, leaf_mask, v, slot, handle) -> LaminarFamily:
    m = handle
    if slot == _ABOVE_ROOT:
        children[m] = [root, v]
        root = m
    else:
        p = parent[slot]
        children[p][children[p].index(slot)] = m
        children[m] = [slot, v]
    masks = _node_masks(root, children, leaf_mask)
    return _family_from_masks(masks.values())


def _slot_count(family: LaminarFamily, mask: int) -> int:
    # remainder is a full binary tree on b' = b - |subtree| leaves, giving
    # 2b'-2 edges; +1 above-root slot, -1 for the suppressed position
    b_rem = family.b - mask.bit_count()
    return max(0, 2 * b_rem - 2)


def spr_neighbor(family: LaminarFamily, rng: np.random.Generator) -> LaminarFamily:
    """Sample a subtree-prune-and-regraft neighbor uniformly over moves.

    A move picks a prune edge (detaching the subtree below it), suppresses
    the freed degree-2 node, then subdivides a regraft position of the
    remainder with a new node carrying the subtree.  Set values are
    recomputed bottom-up, so the result is always admissible and
    full-binary; the suppressed position is excluded, which makes the
    result distinct from the input.
    """
    if not family.full_binary:
        raise ValueError("SPR requires a full-binary family")
    prunable = [(m, _slot_count(family, m)) for m in family.sets[:-1]]
    total = sum(c for _, c in prunable)
    if total == 0:
        raise NoNeighbor(f"no SPR moves exist for b={family.b}")
    index = {m: i for i, m in enumerate(family.sets)}
    for _ in range(64):
        pick = int(rng.integers(total))
        for mask, count in prunable:
            if pick < count:
                break
            pick -= count
        root, children, parent, leaf_mask, slots, handle = _prune_and_slots(family, index[mask])
        neighbor = _regraft(root, children, parent, leaf_mask, index[mask], slots[pick], handle)
        if neighbor != family:
            return neighbor
    raise RuntimeError("SPR sampling failed to produce a distinct neighbor")


def spr_neighborhood(family: LaminarFamily) -> list[LaminarFamily]:
    """All distinct SPR neighbors, deduplicated canonically; [] for b=2."""
    if not family.full_binary:
        raise ValueError("SPR requires a full-binary family")
    index = {m: i for i, m in enumerate(family.sets)}
    out: dict[tuple[int, ...], LaminarFamily] = {}
    for mask in family.sets[:-1]:
        if _slot_count(family, mask) == 0:
            continue
        _, _, _, _, slots, _ = _prune_and_slots(family, index[mask])
        for slot in slots:
            root, children, parent, leaf_mask, _, handle = _prune_and_slots(family, index[mask])
            neighbor = _regraft(root, children, parent, leaf_mask, index[mask], slot, handle)
            if neighbor != family:
                out[neighbor.sets] = neighbor
    return [out[k] for k in sorted(out)]


# --- extracting a family from a tree ----------------------------------------

def family_from_tree(steiner_tree, instance) -> LaminarFamily:
    """Read the sharing structure off an r-arborescence with terminal leaves.

    Each arc is labeled with the commodities whose root-terminal path uses
    it; the distinct labels plus all singletons and K form the family.  The
    result is laminar by construction but may not be full-binary.
    """
    arc_ids = getattr(steiner_tree, "arcs", steiner_tree)
    in_arc: dict[int, int] = {}
    for a in arc_ids:
        u, v, _ = instance.arcs[a]
        if v in in_arc:
            raise NotArborescence(f"node {v} has two incoming arcs")
        if v == instance.root:
            raise NotArborescence("root has an incoming arc")
        in_arc[v] = a

    b = instance.commodity_count
    arc_commodities: dict[int, int] = {}
    for k, t in enumerate(instance.terminals):
        v = t
        steps = 0
        while v != instance.root:
            if v not in in_arc or steps > instance.node_count:
                raise NotArborescence(f"terminal {t} is not connected to the root")
            a = in_arc[v]
            arc_commodities[a] = arc_commodities.get(a, 0) | (1 << k)
            v = instance.arcs[a][0]
            steps += 1

    unlabeled = set(arc_ids) - set(arc_commodities)
    if unlabeled:
        raise NotArborescence(f"arcs {sorted(unlabeled)} lie on no root-terminal path")

    masks = set(arc_commodities.values())
    masks.update(1 << k for k in range(b))
    masks.add((1 << b) - 1)
    return _family_from_masks(masks)


# --- initializers ------------------------------------------------------------

def initial_single_linkage(instance, apsp) -> LaminarFamily:
    """Single-linkage agglomeration over the terminal metric closure.

    Builds the complete terminal graph weighted by shortest-path costs
    (symmetrized with min of both directions), takes its minimum spanning
    tree, then merges the maximal containing sets edge by edge in
    increasing length.  Every merge joins exactly two maximal sets, so the
    result is full-binary.
    """
    b = instance.commodity_count
    if b == 1:
        return _family_from_masks([1])
    if b == 2:
        # the only admissible full-binary family; no clustering needed
        return _family_from_masks([1, 2, 3])
    dist = apsp.dist
    terms = instance.terminals
    edges = []
    for i in range(b):
        for j in range(i + 1, b):
            d = min(dist[terms[i], terms[j]], dist[terms[j], terms[i]])
            if np.isfinite(d):
                edges.append((float(d), i, j))
    edges.sort()

    comp = list(range(b))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    leader = {k: 1 << k for k in range(b)}
    masks = {1 << k for k in range(b)}
    merges = 0
    for _, i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        merged = leader[ri] | leader[rj]
        masks.add(merged)
        comp[rj] = ri
        leader[ri] = merged
        merges += 1
        if merges == b - 1:
            break
    if merges != b - 1:
        raise DisconnectedTerminals("terminal metric closure is not connected")
    return _family_from_masks(masks)


def _two_means(ids, coords, rng: np.random.Generator):
    """Lloyd's algorithm with k=2 on the points of the given commodities."""
    pts = np.array([coords[k] for k in ids], dtype=float)
    m = len(ids)
    if len(np.unique(pts, axis=0)) < 2:
        mid = (m + 1) // 2
        return ids[:mid], ids[mid:]
    while True:
        i0, i1 = rng.choice(m, size=2, replace=False)
        if not np.array_equal(pts[i0], pts[i1]):
            break
    centers = pts[[i0, i1]].copy()
    assign = np.zeros(m, dtype=int)
    for _ in range(100):
        d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        for c in (0, 1):
            if not (assign == c).any():
                assign[int(d2[:, 1 - c].argmax())] = c
        new_centers = np.array([pts[assign == c].mean(axis=0) for c in (0, 1)])
        shift = float(np.abs(new_centers - centers).max())
        centers = new_centers
        if shift < 1e-9:
            break
    left = [k for k, a in zip(ids, assign) if a == 0]
    right = [k for k, a in zip(ids, assign) if a == 1]
    return left, right


def part_kmeans(coords, commodities, rng: np.random.Generator) -> LaminarFamily:
    """Recursive 2-means bipartition of the commodity set.

    Size-1 inputs contribute themselves; size-2 inputs contribute the pair
    and its singletons; larger sets are split with 2-means and both halves
    recursed.  Called on all commodities this yields an admissible
    full-binary family.
    """
    ids = sorted(commodities)
    missing = [k for k in ids if k not in coords]
    if missing:
        raise MissingCoordinates(f"no coordinates for commodities {missing}")
    masks: list[int] = []

    def part(group):
        masks.append(_mask_of(group))
        if len(group) == 1:
            return
        if len(group) == 2:
            masks.extend((1 << group[0], 1 << group[1]))
            return
        left, right = _two_means(group, coords, rng)
        part(left)
        part(right)

    part(ids)
    return _family_from_masks(masks)


def pick_central_root(coords, terminals) -> int:
    """Most central terminal under the boundary-count rule.

    For each terminal, count terminals strictly right/left/above/below it
    (equal coordinates count on neither side) and minimize
    |right-left| + |above-below|; ties go to the lowest terminal id.
    """
    best = None
    for t in sorted(terminals):
        x, y = coords[t]
        right = left = up = down = 0
        for s in terminals:
            if s == t:
                continue
            sx, sy = coords[s]
            if sx > x:
                right += 1
            elif sx < x:
                left += 1
            if sy > y:
                up += 1
            elif sy < y:
                down += 1
        delta = abs(right - left) + abs(up - down)
        if best is None or delta < best[0]:
            best = (delta, t)
    if best is None:
        raise ValueError("empty terminal list")
    return best[1]
