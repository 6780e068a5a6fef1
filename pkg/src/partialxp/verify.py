"""Brute-force ground truth and property checkers for desk-scale problems.

Nothing here uses path consistency: every predicate is decided by
evaluating the tree on each fully specified point, so the results are an
independent reference for the oracle, the extraction and the enumeration.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .enumeration import check_mhs_duality, is_hitting_set
from .model import (
    UNSPECIFIED,
    Categorical,
    DecisionTree,
    ExplanationProblem,
    FeatureSpace,
    PartialInstance,
    UsageError,
    ValueSplit,
    covers,
    evaluate,
    leaf,
    prediction_set,
    split,
)
from .oracle import InputConstraint, TreeOracle

MAX_SPECIFIED = 12
MAX_COMPLETIONS = 10**6


class CapacityError(RuntimeError):
    """The problem is too large to settle by exhaustion."""


@dataclass
class BruteForceResult:
    all_weak_axps: set
    axps: set
    all_weak_cxps: set
    cxps: set
    completions_examined: int


def _minimal(family: set) -> set:
    return {s for s in family if not any(t < s for t in family)}


def subsets(items: Iterable[int]) -> Iterable[frozenset]:
    items = sorted(items)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def _guard(problem: ExplanationProblem) -> int:
    sp = problem.space
    if not sp.finite:
        raise CapacityError("brute force needs finite domains")
    if len(problem.specified) > MAX_SPECIFIED:
        raise CapacityError(f"more than {MAX_SPECIFIED} specified features")
    total = math.prod(d.size() for d in sp.domains)
    if total > MAX_COMPLETIONS:
        raise CapacityError(f"{total} points exceed the limit of {MAX_COMPLETIONS}")
    return total


def off_target_agreements(problem: ExplanationProblem) -> tuple[set, int]:
    """Agreement sets with ``z`` (over the specified features) of every off-target point."""
    total = _guard(problem)
    z = problem.z
    spec = sorted(problem.specified)
    agree = set()
    full = PartialInstance(problem.space, (UNSPECIFIED,) * problem.space.m)
    for v in full.completions():
        if evaluate(problem.tree, v) not in problem.targets:
            agree.add(frozenset(i for i in spec if v[i - 1] == z[i]))
    return agree, total


def brute_force_xps(problem: ExplanationProblem) -> BruteForceResult:
    """Weak and minimal AXp/CXp families by exhaustion over all points.

    A set ``W`` is a weak AXp iff no off-target point agrees with ``z`` on
    all of ``W``; ``Y`` is a weak CXp iff some off-target point agrees with
    ``z`` on all of ``S - Y``.
    """
    agree, total = off_target_agreements(problem)
    spec = problem.specified
    weak_a, weak_c = set(), set()
    for w in subsets(spec):
        blocked = any(w <= a for a in agree)
        if not blocked:
            weak_a.add(w)
        if any(spec - w <= a for a in agree):
            weak_c.add(w)
    return BruteForceResult(weak_a, _minimal(weak_a), weak_c, _minimal(weak_c), total)


def brute_waxp(
    problem: ExplanationProblem, w: Iterable[int], constraint: InputConstraint | None = None
) -> bool:
    """Weak AXp by checking every (allowed) point that agrees with ``z`` on ``w``."""
    _guard(problem)
    for v in problem.z.restrict(w).completions():
        if constraint is not None and not constraint.allows(v):
            continue
        if evaluate(problem.tree, v) not in problem.targets:
            return False
    return True


def brute_paxp_probability(problem: ExplanationProblem, x: Iterable[int]) -> Fraction:
    """Frequency of target predictions over all points agreeing with ``z`` on ``x``."""
    _guard(problem)
    hits = total = 0
    for v in problem.z.restrict(x).completions():
        total += 1
        hits += evaluate(problem.tree, v) in problem.targets
    return Fraction(hits, total)


def brute_prediction_set(tree: DecisionTree, z: PartialInstance) -> frozenset:
    return frozenset(evaluate(tree, v) for v in z.completions())


# ---------------------------------------------------------------------------
# Property checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinementPair:
    """A problem and its refinement at a covered point ``v`` predicted in the targets."""

    relaxed: ExplanationProblem
    refined: ExplanationProblem

    def __post_init__(self):
        r, o = self.relaxed, self.refined
        if r.tree is not o.tree and r.tree != o.tree:
            raise UsageError("pair problems must share the tree")
        if r.targets != o.targets:
            raise UsageError("pair problems must share the target set")
        if not o.z.is_complete:
            raise UsageError("refined instance must be fully specified")
        if not covers(o.z.values, r.z):
            raise UsageError("refined point is not covered by the relaxed instance")

    @classmethod
    def at(cls, problem: ExplanationProblem, v: Sequence) -> "RefinementPair":
        return cls(problem, problem.with_instance(PartialInstance(problem.space, tuple(v))))


def check_refinement(pair: RefinementPair, families=None) -> bool:
    """AXp's survive refinement; each CXp grows by unspecified features only.

    ``families`` optionally replaces the brute-forced ``(relaxed, refined)``
    results, so that corrupted families can be checked.
    """
    if families is None:
        families = brute_force_xps(pair.relaxed), brute_force_xps(pair.refined)
    fr, f0 = families
    unspec = pair.relaxed.unspecified
    if not fr.axps <= f0.axps:
        return False
    return all(any(y <= w <= y | unspec for w in f0.cxps) for y in fr.cxps)


def validate_chain(problem: ExplanationProblem, chain: Sequence[Iterable[int]]) -> list:
    chain = [frozenset(c) for c in chain]
    if not chain or chain[0] != problem.specified:
        raise UsageError("deletion chain must start at the specified features")
    for a, b in zip(chain, chain[1:]):
        if not b <= a or len(a - b) > 1:
            raise UsageError(f"chain step {sorted(a)} -> {sorted(b)} is not a single deletion")
    return chain


def check_nested_duality(problem: ExplanationProblem, chain: Sequence[Iterable[int]]) -> bool:
    """Duality inside every problem induced by the chain, and the relations between them.

    For ``j <= k``: AXp's of the ``k``-th problem are AXp's of the ``j``-th,
    and every CXp of the ``k``-th extends to a CXp of the ``j``-th.
    """
    chain = validate_chain(problem, chain)
    distinct = list(dict.fromkeys(chain))
    fams = [brute_force_xps(problem.restricted(x)) for x in distinct]
    for f in fams:
        if not check_mhs_duality(f.axps, f.cxps):
            return False
    for j in range(len(distinct)):
        for k in range(j, len(distinct)):
            if not fams[k].axps <= fams[j].axps:
                return False
            for y in fams[k].cxps:
                if not any(y <= w and w <= distinct[j] for w in fams[j].cxps):
                    return False
    return True


def check_hitting_lemmas(problem: ExplanationProblem, result: BruteForceResult | None = None) -> bool:
    """Hitting sets of the AXp's are weak CXp's; hitting sets of the CXp's are weak AXp's."""
    result = result or brute_force_xps(problem)
    oracle = TreeOracle(problem)
    for s in subsets(problem.specified):
        if is_hitting_set(s, result.axps) and not oracle.wcxp_holds(s):
            return False
        if is_hitting_set(s, result.cxps) and not oracle.waxp_holds(s):
            return False
    return True


def check_monotone(problem: ExplanationProblem) -> bool:
    """Both predicates are up-closed over the subsets of the specified features."""
    oracle = TreeOracle(problem)
    spec = problem.specified
    wa = {s: oracle.waxp_holds(s) for s in subsets(spec)}
    wc = {s: oracle.wcxp_holds(s) for s in subsets(spec)}
    for s in wa:
        for i in spec - s:
            bigger = s | {i}
            if wa[s] and not wa[bigger]:
                return False
            if wc[s] and not wc[bigger]:
                return False
    return True


# ---------------------------------------------------------------------------
# Random desk-scale problems
# ---------------------------------------------------------------------------


@dataclass
class GeneratorConfig:
    features: tuple = (3, 6)
    domain_sizes: tuple = (2, 3)
    max_depth: int = 4
    classes: tuple = (2, 4)
    max_specified: int = 6
    p_unspecified: float = 1 / 3
    p_leaf: float = 0.25


def random_tree(rng: random.Random, cfg: GeneratorConfig = GeneratorConfig()) -> DecisionTree:
    """A categorical tree in which every class labels some reachable leaf."""
    m = rng.randint(*cfg.features)
    n_classes = rng.randint(*cfg.classes)
    domains = tuple(Categorical(tuple(range(rng.randint(*cfg.domain_sizes)))) for _ in range(m))
    classes = tuple(f"c{k}" for k in range(n_classes))
    space = FeatureSpace(domains, classes)
    while True:
        nodes: list = []
        leaves: list = []  # (node id, reachable)

        def grow(depth, allowed):
            nid = len(nodes)
            nodes.append(None)
            if depth >= cfg.max_depth or (depth > 0 and rng.random() < cfg.p_leaf):
                nodes[nid] = ("leaf",)
                leaves.append((nid, all(allowed)))
                return nid
            f = rng.randint(1, m)
            vals = list(domains[f - 1].values)
            rng.shuffle(vals)
            k = rng.randint(2, len(vals))
            cuts = sorted(rng.sample(range(1, len(vals)), k - 1))
            groups = [vals[a:b] for a, b in zip([0] + cuts, cuts + [len(vals)])]
            kids = []
            for g in groups:
                narrowed = list(allowed)
                narrowed[f - 1] = allowed[f - 1] & set(g)
                kids.append(grow(depth + 1, narrowed))
            nodes[nid] = ("split", f, groups, kids)
            return nid

        grow(0, [set(d.values) for d in domains])
        live = [nid for nid, ok in leaves if ok]
        if len(live) >= n_classes:
            break
    label_of = {nid: rng.randrange(n_classes) for nid, _ in leaves}
    # every class must label some reachable leaf
    for c, nid in zip(range(n_classes), rng.sample(live, n_classes)):
        label_of[nid] = c
    built = []
    for nid, spec in enumerate(nodes):
        if spec[0] == "leaf":
            built.append(leaf(nid, classes[label_of[nid]]))
        else:
            _, f, groups, kids = spec
            built.append(split(nid, f, ValueSplit(tuple(groups)), kids))
    return DecisionTree(space, tuple(built), 0)


def random_problem(
    rng: random.Random, cfg: GeneratorConfig = GeneratorConfig(), tries: int = 200
) -> ExplanationProblem:
    """A random valid problem: target set contains the generalized prediction."""
    while True:
        tree = random_tree(rng, cfg)
        sp = tree.space
        for _ in range(tries):
            x = [rng.choice(d.values) for d in sp.domains]
            z_vals = [UNSPECIFIED if rng.random() < cfg.p_unspecified else v for v in x]
            z = PartialInstance(sp, tuple(z_vals))
            if len(z.specified) > cfg.max_specified:
                continue
            pred = prediction_set(tree, z)
            others = [c for c in sp.classes if c not in pred]
            if not others:
                continue
            extra = [c for c in others if rng.random() < 0.5]
            if len(extra) == len(others):
                extra.pop(rng.randrange(len(extra)))
            return ExplanationProblem(tree, z, pred | frozenset(extra))


def problem_corpus(seed: int, n: int, cfg: GeneratorConfig = GeneratorConfig()) -> list:
    rng = random.Random(seed)
    return [random_problem(rng, cfg) for _ in range(n)]


def random_refinement(rng: random.Random, problem: ExplanationProblem) -> RefinementPair:
    """Pair ``problem`` with a random covered point predicted in the targets."""
    points = [
        v for v in problem.z.completions() if evaluate(problem.tree, v) in problem.targets
    ]
    return RefinementPair.at(problem, rng.choice(points))


# ---------------------------------------------------------------------------
# Suite runner
# ---------------------------------------------------------------------------


@dataclass
class SuiteReport:
    seed: int
    instances: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_suite(seed: int, instances: int) -> SuiteReport:
    """Check every property on ``instances`` random problems drawn from ``seed``."""
    from .enumeration import enumerate_xps, is_relevant
    from .extract import ASCENDING, DESCENDING, find_one_xp, is_necessary
    from .sat import PREFER_FALSE, PREFER_TRUE

    rng = random.Random(seed)
    report = SuiteReport(seed, instances)
    for n in range(instances):
        p = random_problem(rng)

        def fail(what):
            report.failures.append(f"seed={seed} instance={n}: {what}")

        bf = brute_force_xps(p)
        for bias in (PREFER_TRUE, PREFER_FALSE):
            rep = enumerate_xps(p, bias)
            if len(rep.entries) != len(set(rep.entries)):
                fail(f"duplicate explanations ({bias})")
            if rep.axps != bf.axps or rep.cxps != bf.cxps:
                fail(f"enumeration differs from brute force ({bias})")
        if not check_mhs_duality(bf.axps, bf.cxps):
            fail("duality")
        chain: list = []
        for order in (ASCENDING, DESCENDING):
            if find_one_xp(p, "axp", order, chain if order == ASCENDING else None) not in bf.axps:
                fail(f"AXp extraction ({order})")
            if find_one_xp(p, "cxp", order) not in bf.cxps:
                fail(f"CXp extraction ({order})")
        if not check_monotone(p):
            fail("monotonicity")
        if not check_hitting_lemmas(p, bf):
            fail("hitting-set lemmas")
        if not check_nested_duality(p, chain):
            fail("nested duality")
        if not check_refinement(random_refinement(rng, p)):
            fail("refinement")
        inter = frozenset.intersection(*bf.axps) if bf.axps else frozenset()
        union = frozenset().union(*bf.axps)
        for i in p.specified:
            if is_necessary(p, i) != (i in inter):
                fail(f"necessity of feature {i}")
            if is_relevant(p, i) != (i in union):
                fail(f"relevancy of feature {i}")
    return report
