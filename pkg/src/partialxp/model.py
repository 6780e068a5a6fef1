"""Feature spaces, partially specified instances and decision trees.

A partially specified instance carries :data:`UNSPECIFIED` in every
coordinate whose value is unknown.  The generalized prediction of such an
instance is the set of classes reachable by some fully specified point it
covers; for trees this is decided by path consistency, never by enumerating
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence, Union


class DomainError(ValueError):
    """A value lies outside its feature's domain."""


class ModelError(ValueError):
    """A feature space, tree or problem violates a structural invariant."""


class UsageError(ValueError):
    """An operation was called outside its precondition."""


class _Unspecified:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNSPECIFIED"

    def __reduce__(self):
        return (_Unspecified, ())


UNSPECIFIED = _Unspecified()


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Categorical:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ModelError("categorical domain is empty")
        if len(set(self.values)) != len(self.values):
            raise ModelError(f"categorical domain has duplicates: {self.values!r}")

    finite = True
    ordered = False

    def __contains__(self, v) -> bool:
        return v in self.values

    def size(self) -> int:
        return len(self.values)

    def iter_values(self) -> Iterator:
        return iter(self.values)


@dataclass(frozen=True)
class Integer:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ModelError(f"integer domain has lo > hi: [{self.lo}, {self.hi}]")

    finite = True
    ordered = True

    def __contains__(self, v) -> bool:
        return (
            isinstance(v, int)
            and not isinstance(v, bool)
            and self.lo <= v <= self.hi
        )

    def size(self) -> int:
        return self.hi - self.lo + 1

    def iter_values(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))


@dataclass(frozen=True)
class Real:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ModelError("real domain bounds must be finite")
        if self.lo > self.hi:
            raise ModelError(f"real domain has lo > hi: [{self.lo}, {self.hi}]")

    finite = False
    ordered = True

    def __contains__(self, v) -> bool:
        return (
            isinstance(v, (int, float))
            and not isinstance(v, bool)
            and self.lo <= v <= self.hi
        )

    def size(self) -> int:
        raise DomainError("real domain has no finite size")

    def iter_values(self) -> Iterator:
        raise DomainError("real domain cannot be enumerated")


Domain = Union[Categorical, Integer, Real]


@dataclass(frozen=True)
class FeatureSpace:
    """Features ``1..m`` with their domains and the class set.

    ``names`` defaults to ``f1..fm``; ``classes`` is an ordered tuple of
    hashable class labels.
    """

    domains: tuple
    classes: tuple
    names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.names:
            names = tuple(f"f{i}" for i in range(1, len(self.domains) + 1))
        else:
            names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not self.domains:
            raise ModelError("feature space needs at least one feature")
        if len(names) != len(self.domains):
            raise ModelError("one name per feature is required")
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate feature names: {names!r}")
        if len(self.classes) < 2:
            raise ModelError("at least two classes are required")
        if len(set(self.classes)) != len(self.classes):
            raise ModelError(f"duplicate classes: {self.classes!r}")
        for d in self.domains:
            if not isinstance(d, (Categorical, Integer, Real)):
                raise ModelError(f"unknown domain type {d!r}")

    @property
    def m(self) -> int:
        return len(self.domains)

    @property
    def features(self) -> range:
        return range(1, self.m + 1)

    def domain(self, i: int) -> Domain:
        self._check_id(i)
        return self.domains[i - 1]

    def name(self, i: int) -> str:
        self._check_id(i)
        return self.names[i - 1]

    def feature_id(self, name: str) -> int:
        try:
            return self.names.index(name) + 1
        except ValueError:
            raise ModelError(f"unknown feature {name!r}") from None

    @property
    def finite(self) -> bool:
        return all(d.finite for d in self.domains)

    def _check_id(self, i: int) -> None:
        if not (isinstance(i, int) and 1 <= i <= self.m):
            raise UsageError(f"feature id {i!r} not in 1..{self.m}")


# ---------------------------------------------------------------------------
# Partial instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialInstance:
    """A point of the extended feature space.

    ``values[i-1]`` is the value of feature ``i`` or :data:`UNSPECIFIED`.
    """

    space: FeatureSpace
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != self.space.m:
            raise UsageError(
                f"instance has {len(self.values)} entries, space has {self.space.m}"
            )
        for i, (v, d) in enumerate(zip(self.values, self.space.domains), 1):
            if v is not UNSPECIFIED and v not in d:
                raise DomainError(
                    f"value {v!r} of feature {self.space.names[i - 1]} not in {d!r}"
                )

    @classmethod
    def from_mapping(cls, space: FeatureSpace, values: Mapping[int, Any]) -> "PartialInstance":
        """Build from ``{feature id: value}``; missing ids are unspecified."""
        return cls(space, tuple(values.get(i, UNSPECIFIED) for i in space.features))

    def __getitem__(self, i: int):
        self.space._check_id(i)
        return self.values[i - 1]

    @property
    def specified(self) -> frozenset:
        return frozenset(i for i, v in enumerate(self.values, 1) if v is not UNSPECIFIED)

    @property
    def unspecified(self) -> frozenset:
        return frozenset(i for i, v in enumerate(self.values, 1) if v is UNSPECIFIED)

    @property
    def is_complete(self) -> bool:
        return UNSPECIFIED not in self.values

    def restrict(self, keep: Iterable[int]) -> "PartialInstance":
        """Unspecify every feature outside ``keep``."""
        keep = frozenset(keep)
        return PartialInstance(
            self.space,
            tuple(v if i in keep else UNSPECIFIED for i, v in enumerate(self.values, 1)),
        )

    def completions(self) -> Iterator[tuple]:
        """All fully specified points covered by this instance (finite domains only)."""
        import itertools

        pools = []
        for v, d in zip(self.values, self.space.domains):
            pools.append((v,) if v is not UNSPECIFIED else tuple(d.iter_values()))
        return itertools.product(*pools)


def covers(v: Sequence, z: PartialInstance) -> bool:
    """``v`` is covered by ``z``: it agrees with every specified coordinate."""
    if len(v) != len(z.values):
        raise UsageError("point and instance have different lengths")
    return all(zi is UNSPECIFIED or vi == zi for vi, zi in zip(v, z.values))


# ---------------------------------------------------------------------------
# Decision trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Threshold:
    """Ordered split: child 0 takes ``x <= threshold``, child 1 takes ``x > threshold``."""

    threshold: float
    arity = 2

    def branch(self, x) -> int:
        return 0 if x <= self.threshold else 1


@dataclass(frozen=True)
class ValueSplit:
    """Categorical split: child ``k`` takes the values in ``groups[k]``."""

    groups: tuple

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(frozenset(g) for g in self.groups))

    @property
    def arity(self) -> int:
        return len(self.groups)

    def branch(self, x) -> int:
        for k, g in enumerate(self.groups):
            if x in g:
                return k
        raise DomainError(f"value {x!r} matched by no branch")


Test = Union[Threshold, ValueSplit]


@dataclass(frozen=True)
class Node:
    id: Hashable
    feature: int | None = None
    test: Test | None = None
    children: tuple = ()
    label: Hashable = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def leaf(node_id, label) -> Node:
    return Node(node_id, label=label)


def split(node_id, feature: int, test: Test, children: Sequence) -> Node:
    return Node(node_id, feature=feature, test=test, children=tuple(children))


@dataclass(frozen=True)
class DecisionTree:
    """A rooted decision tree over ``space``.

    Validated at construction: single root, every other node with exactly one
    parent, child arity matching the test, categorical splits partitioning
    the domain, threshold splits only on ordered features, and every class
    labelling at least one leaf.
    """

    space: FeatureSpace
    nodes: tuple
    root: Hashable
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        index: dict = {}
        for n in self.nodes:
            if n.id in index:
                raise ModelError(f"duplicate node id {n.id!r}")
            index[n.id] = n
        object.__setattr__(self, "_index", index)
        self._validate()

    def _validate(self) -> None:
        sp = self.space
        if self.root not in self._index:
            raise ModelError(f"root {self.root!r} is not a node")
        parents: dict = {}
        for n in self.nodes:
            if n.is_leaf:
                if n.label not in sp.classes:
                    raise ModelError(f"node {n.id!r}: unknown class {n.label!r}")
                if n.children:
                    raise ModelError(f"leaf {n.id!r} has children")
                continue
            if not (isinstance(n.feature, int) and 1 <= n.feature <= sp.m):
                raise ModelError(f"node {n.id!r}: unknown feature {n.feature!r}")
            dom = sp.domains[n.feature - 1]
            if isinstance(n.test, Threshold):
                if not dom.ordered:
                    raise ModelError(
                        f"node {n.id!r}: threshold split on categorical feature "
                        f"{sp.names[n.feature - 1]}"
                    )
            elif isinstance(n.test, ValueSplit):
                if not isinstance(dom, Categorical):
                    raise ModelError(f"node {n.id!r}: value split on ordered feature")
                seen: set = set()
                for g in n.test.groups:
                    if not g:
                        raise ModelError(f"node {n.id!r}: empty branch value set")
                    if g & seen:
                        raise ModelError(f"node {n.id!r}: split branches overlap")
                    if not g <= set(dom.values):
                        raise ModelError(f"node {n.id!r}: split uses values outside the domain")
                    seen |= g
                if seen != set(dom.values):
                    raise ModelError(f"node {n.id!r}: split does not cover domain")
            else:
                raise ModelError(f"node {n.id!r}: unknown test {n.test!r}")
            if len(n.children) != n.test.arity:
                raise ModelError(
                    f"node {n.id!r}: {len(n.children)} children for a test of arity {n.test.arity}"
                )
            for c in n.children:
                if c not in self._index:
                    raise ModelError(f"node {n.id!r}: unknown child {c!r}")
                if c in parents or c == self.root:
                    raise ModelError(f"node {c!r} has more than one parent")
                parents[c] = n.id
        # reachability from the root also rules out cycles, given single parents
        seen_nodes = set()
        stack = [self.root]
        while stack:
            nid = stack.pop()
            if nid in seen_nodes:
                raise ModelError("tree contains a cycle")
            seen_nodes.add(nid)
            stack.extend(self._index[nid].children)
        if len(seen_nodes) != len(self.nodes):
            missing = sorted(map(repr, set(self._index) - seen_nodes))
            raise ModelError(f"nodes unreachable from root: {', '.join(missing)}")
        labels = {n.label for n in self.nodes if n.is_leaf}
        for c in sp.classes:
            if c not in labels:
                raise ModelError(f"class {c!r} labels no leaf")
        free = PartialInstance(sp, (UNSPECIFIED,) * sp.m)
        reachable = {n.label for n, _ in consistent_paths(self, free)}
        for c in sp.classes:
            if c not in reachable:
                raise ModelError(f"class {c!r} labels only unreachable leaves")

    def node(self, node_id) -> Node:
        return self._index[node_id]

    def __len__(self) -> int:
        return len(self.nodes)

    def leaves(self) -> list:
        return [n for n in self.nodes if n.is_leaf]

    def path_to(self, leaf_id) -> list:
        """``[(node, branch index), ...]`` from the root down to ``leaf_id``."""
        parent = {}
        for n in self.nodes:
            for k, c in enumerate(n.children):
                parent[c] = (n, k)
        if leaf_id not in self._index:
            raise UsageError(f"no node {leaf_id!r}")
        path = []
        cur = leaf_id
        while cur != self.root:
            p, k = parent[cur]
            path.append((p, k))
            cur = p.id
        path.reverse()
        return path

    def depth(self) -> int:
        def rec(nid):
            n = self._index[nid]
            return 0 if n.is_leaf else 1 + max(rec(c) for c in n.children)

        return rec(self.root)


def evaluate(tree: DecisionTree, x: Sequence) -> Hashable:
    """Class of the unique leaf whose root path accepts the fully specified ``x``."""
    sp = tree.space
    if len(x) != sp.m:
        raise UsageError(f"point has {len(x)} entries, space has {sp.m}")
    for i, (v, d) in enumerate(zip(x, sp.domains), 1):
        if v is UNSPECIFIED:
            raise UsageError(f"feature {sp.names[i - 1]} is unspecified")
        if v not in d:
            raise DomainError(f"value {v!r} of feature {sp.names[i - 1]} not in {d!r}")
    node = tree.node(tree.root)
    while not node.is_leaf:
        node = tree.node(node.children[node.test.branch(x[node.feature - 1])])
    return node.label


# ---------------------------------------------------------------------------
# Path consistency over the original (uncompiled) tree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Interval:
    lo: float
    lo_open: bool
    hi: float
    hi_open: bool

    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def cut(self, test: Threshold, branch: int) -> "_Interval":
        t = test.threshold
        if branch == 0:
            if t < self.hi or (t == self.hi and self.hi_open):
                return _Interval(self.lo, self.lo_open, t, False)
            return self
        if t > self.lo or (t == self.lo and not self.lo_open):
            return _Interval(t, True, self.hi, self.hi_open)
        return self

    def contains(self, x) -> bool:
        lo_ok = x > self.lo if self.lo_open else x >= self.lo
        hi_ok = x < self.hi if self.hi_open else x <= self.hi
        return lo_ok and hi_ok


def _initial_region(dom: Domain, value):
    """Region of feature values still allowed: a frozenset or an interval."""
    if isinstance(dom, Categorical):
        return frozenset(dom.values) if value is UNSPECIFIED else frozenset([value])
    if value is not UNSPECIFIED:
        return _Interval(value, False, value, False)
    return _Interval(dom.lo, False, dom.hi, False)


def _refine(region, dom: Domain, test: Test, branch: int):
    if isinstance(test, ValueSplit):
        return region & test.groups[branch]
    out = region.cut(test, branch)
    if isinstance(dom, Integer) and not out.empty():
        # snap to integers so that emptiness is decided over the integer lattice
        lo = math.floor(out.lo) + 1 if out.lo_open else math.ceil(out.lo)
        hi = math.ceil(out.hi) - 1 if out.hi_open else math.floor(out.hi)
        out = _Interval(lo, False, hi, False)
    return out


def _region_empty(region) -> bool:
    return (not region) if isinstance(region, frozenset) else region.empty()


def consistent_paths(tree: DecisionTree, z: PartialInstance) -> Iterator[tuple]:
    """Yield ``(leaf, regions)`` for each leaf consistent with ``z``.

    ``regions[i-1]`` is the set (categorical) or interval (ordered) of values
    of feature ``i`` compatible with both the path and ``z``.
    """
    sp = tree.space
    start = tuple(_initial_region(d, v) for d, v in zip(sp.domains, z.values))
    stack = [(tree.root, start)]
    while stack:
        nid, regions = stack.pop()
        node = tree.node(nid)
        if node.is_leaf:
            yield node, regions
            continue
        f = node.feature - 1
        for k, c in enumerate(node.children):
            r = _refine(regions[f], sp.domains[f], node.test, k)
            if _region_empty(r):
                continue
            stack.append((c, regions[:f] + (r,) + regions[f + 1 :]))


def _pick(region, dom: Domain):
    if isinstance(region, frozenset):
        return next(v for v in dom.values if v in region)
    if region.lo == region.hi:
        return region.lo
    mid = (region.lo + region.hi) / 2
    if isinstance(dom, Integer):
        mid = math.floor(mid)
        if not region.contains(mid):
            mid += 1
    return mid


def witness(tree: DecisionTree, z: PartialInstance, cls) -> tuple | None:
    """A point covered by ``z`` that the tree classifies as ``cls``, or None.

    Unspecified categorical features take the first allowed domain value,
    ordered ones the midpoint of their allowed interval.
    """
    for node, regions in consistent_paths(tree, z):
        if node.label == cls:
            return tuple(
                _pick(r, d) if v is UNSPECIFIED else v
                for r, d, v in zip(regions, tree.space.domains, z.values)
            )
    return None


def prediction_set(tree: DecisionTree, z: PartialInstance) -> frozenset:
    """Classes predicted by some point covered by ``z``.

    Decided leaf by leaf through path consistency; runs in time polynomial in
    the tree size even when ``z`` covers infinitely many points.
    """
    if z.space != tree.space:
        raise UsageError("instance and tree use different feature spaces")
    return frozenset(node.label for node, _ in consistent_paths(tree, z))


def is_sufficient(tree: DecisionTree, z: PartialInstance, targets: Iterable) -> bool:
    return prediction_set(tree, z) <= frozenset(targets)


# ---------------------------------------------------------------------------
# Explanation problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplanationProblem:
    """A tree, a partial instance ``z`` and the target class set.

    The target set must be a nonempty proper subset of the classes, and ``z``
    must be sufficient for it.  ``check=False`` skips the sufficiency check
    (the brute-force oracle accepts insufficient problems).
    """

    tree: DecisionTree
    z: PartialInstance
    targets: frozenset
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(self.targets))
        classes = set(self.space.classes)
        if self.z.space != self.tree.space:
            raise UsageError("instance and tree use different feature spaces")
        if not self.targets:
            raise UsageError("target class set is empty")
        if not self.targets <= classes:
            raise UsageError(f"unknown target classes {sorted(map(repr, self.targets - classes))}")
        if self.targets == classes:
            raise UsageError("target class set must be a proper subset of the classes")
        if self.check and not is_sufficient(self.tree, self.z, self.targets):
            raise UsageError("instance is not sufficient for the target classes")

    @property
    def space(self) -> FeatureSpace:
        return self.tree.space

    @property
    def specified(self) -> frozenset:
        return self.z.specified

    @property
    def unspecified(self) -> frozenset:
        return self.z.unspecified

    def with_instance(self, z: PartialInstance) -> "ExplanationProblem":
        return ExplanationProblem(self.tree, z, self.targets, check=self.check)

    def restricted(self, keep: Iterable[int]) -> "ExplanationProblem":
        """The induced problem where only the features in ``keep`` stay specified."""
        return self.with_instance(self.z.restrict(keep))
