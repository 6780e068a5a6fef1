"""Flattened, cell-indexed form of a decision tree.

Every feature domain is cut into *cells* such that each tree test accepts or
rejects a whole cell: categorical values are their own cells, and ordered
domains are cut at the tree's thresholds, giving ``[lo, t1], (t1, t2], ...,
(tk, hi]`` with empty cells dropped.  A child edge then carries a bitmask of
the cells it admits, and path consistency reduces to bitmask intersection.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    UNSPECIFIED,
    Categorical,
    DecisionTree,
    Integer,
    PartialInstance,
    Threshold,
)


@dataclass(frozen=True)
class FeatureCells:
    """Cell layout of one feature.

    ``cuts`` are the effective thresholds (ordered features only); ``sizes``
    the number of domain values per cell (``None`` for reals).
    """

    n: int
    cuts: tuple = ()
    values: tuple = ()
    sizes: tuple | None = None

    def cell_of(self, v) -> int:
        if self.values:
            return self.values.index(v)
        return bisect.bisect_left(self.cuts, v)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1


def _feature_cells(dom, thresholds) -> FeatureCells:
    if isinstance(dom, Categorical):
        return FeatureCells(len(dom.values), values=dom.values, sizes=(1,) * len(dom.values))
    if isinstance(dom, Integer):
        cuts = sorted({math.floor(t) for t in thresholds if dom.lo <= math.floor(t) < dom.hi})
        bounds = [dom.lo - 1] + cuts + [dom.hi]
        sizes = tuple(b - a for a, b in zip(bounds, bounds[1:]))
        return FeatureCells(len(cuts) + 1, cuts=tuple(cuts), sizes=sizes)
    cuts = sorted({float(t) for t in thresholds if dom.lo <= t < dom.hi})
    return FeatureCells(len(cuts) + 1, cuts=tuple(cuts))


def _upper_ends(fc: FeatureCells, dom) -> list:
    return list(fc.cuts) + [dom.hi]


class CompiledTree:
    """Array form of a :class:`DecisionTree` consumed by the kernels.

    Node ``k`` (0 is the root) has ``feature[k]`` (0-based, ``-1`` for
    leaves), ``label[k]`` (class index, ``-1`` for internal nodes) and its
    children in ``child_node[child_start[k]:child_start[k]+child_count[k]]``
    with admitted cells ``child_mask[...]``.
    """

    def __init__(self, tree: DecisionTree):
        self.tree = tree
        sp = tree.space
        self.space = sp
        thresholds: list[list] = [[] for _ in range(sp.m)]
        for n in tree.nodes:
            if not n.is_leaf and isinstance(n.test, Threshold):
                thresholds[n.feature - 1].append(n.test.threshold)
        self.cells = tuple(_feature_cells(d, ts) for d, ts in zip(sp.domains, thresholds))

        order = []
        index = {}
        stack = [tree.root]
        while stack:
            nid = stack.pop()
            index[nid] = len(order)
            order.append(nid)
            stack.extend(reversed(tree.node(nid).children))
        n_nodes = len(order)
        feature = np.full(n_nodes, -1, dtype=np.int32)
        label = np.full(n_nodes, -1, dtype=np.int32)
        child_start = np.zeros(n_nodes, dtype=np.int32)
        child_count = np.zeros(n_nodes, dtype=np.int32)
        child_node: list[int] = []
        child_mask: list[int] = []
        class_index = {c: k for k, c in enumerate(sp.classes)}
        for k, nid in enumerate(order):
            node = tree.node(nid)
            if node.is_leaf:
                label[k] = class_index[node.label]
                continue
            f = node.feature - 1
            fc = self.cells[f]
            feature[k] = f
            child_start[k] = len(child_node)
            child_count[k] = len(node.children)
            for b, c in enumerate(node.children):
                child_node.append(index[c])
                child_mask.append(self._branch_mask(fc, sp.domains[f], node.test, b))
        self.node_ids = tuple(order)
        self.index = index
        self.feature = feature
        self.label = label
        self.child_start = child_start
        self.child_count = child_count
        self.child_node = np.asarray(child_node, dtype=np.int32)
        self.child_mask_list = child_mask
        self.lists = (
            feature.tolist(),
            label.tolist(),
            child_start.tolist(),
            child_count.tolist(),
            self.child_node.tolist(),
            child_mask,
        )
        self.n_classes = len(sp.classes)
        self.full_masks = [fc.full for fc in self.cells]
        self.fits_u64 = self.n_classes <= 64 and all(fc.n <= 64 for fc in self.cells)
        if self.fits_u64:
            self.child_mask = np.asarray(child_mask, dtype=np.uint64)
        else:
            self.child_mask = None

    @staticmethod
    def _branch_mask(fc: FeatureCells, dom, test, branch: int) -> int:
        mask = 0
        if fc.values:
            group = test.groups[branch]
            for k, v in enumerate(fc.values):
                if v in group:
                    mask |= 1 << k
            return mask
        for k, upper in enumerate(_upper_ends(fc, dom)):
            if isinstance(dom, Integer):
                upper = int(upper)
            if test.branch(upper) == branch:
                mask |= 1 << k
        return mask

    def __len__(self) -> int:
        return len(self.node_ids)

    def class_mask(self, classes) -> int:
        mask = 0
        for k, c in enumerate(self.space.classes):
            if c in classes:
                mask |= 1 << k
        return mask

    def classes_of(self, mask: int) -> frozenset:
        return frozenset(c for k, c in enumerate(self.space.classes) if mask >> k & 1)

    def instance_cells(self, z: PartialInstance) -> list[int]:
        """Cell index of each specified value of ``z``, ``-1`` where unspecified."""
        return [
            -1 if v is UNSPECIFIED else fc.cell_of(v)
            for v, fc in zip(z.values, self.cells)
        ]

    def leaf_paths(self, fixed) -> list:
        """``(node index, per-feature allowed cell masks)`` for each consistent leaf.

        ``fixed[f]`` is a cell index or ``-1``.
        """
        allowed = [
            self.full_masks[f] if c < 0 else 1 << c for f, c in enumerate(fixed)
        ]
        out = []
        stack = [(0, allowed)]
        while stack:
            k, al = stack.pop()
            f = self.feature[k]
            if f < 0:
                out.append((k, al))
                continue
            s = self.child_start[k]
            for j in range(s, s + self.child_count[k]):
                m = al[f] & self.child_mask_list[j]
                if m:
                    nxt = list(al)
                    nxt[f] = m
                    stack.append((int(self.child_node[j]), nxt))
        return out

    def cell_values(self, f: int, mask: int) -> list:
        """Domain values of feature ``f`` (0-based) inside the cells of ``mask``."""
        fc = self.cells[f]
        dom = self.space.domains[f]
        out: list = []
        if fc.values:
            return [v for k, v in enumerate(fc.values) if mask >> k & 1]
        if not isinstance(dom, Integer):
            raise ValueError("real cells cannot be enumerated")
        bounds = [dom.lo - 1] + list(fc.cuts) + [dom.hi]
        for k in range(fc.n):
            if mask >> k & 1:
                out.extend(range(bounds[k] + 1, bounds[k + 1] + 1))
        return out

    def cell_count(self, f: int, mask: int) -> int:
        """Number of domain values of feature ``f`` inside ``mask`` (finite domains)."""
        sizes = self.cells[f].sizes
        if sizes is None:
            raise ValueError("real cells have no finite size")
        return sum(s for k, s in enumerate(sizes) if mask >> k & 1)
