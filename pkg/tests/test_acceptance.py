"""Acceptance criteria 1-8, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, and also when this file is run directly.
"""

import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import conftest
from conftest import EX4_AXPS, EX4_CXPS, FIXTURES, example4_oracle
from partialxp import (
    ASCENDING,
    AXP,
    CXP,
    DESCENDING,
    PREFER_FALSE,
    PREFER_TRUE,
    ExplanationProblem,
    InputConstraint,
    PartialInstance,
    SelectorFormula,
    TreeOracle,
    check_mhs_duality,
    constrained_waxp,
    enumerate_xps,
    find_one_xp,
    is_weak_paxp,
    paxp_probability,
    parse_model,
    prediction_set,
    sat_solve,
    waxp_holds,
)
from partialxp.assess import SUFFICIENT, assess
from partialxp.verify import (
    GeneratorConfig,
    brute_force_xps,
    brute_paxp_probability,
    check_hitting_lemmas,
    check_monotone,
    check_nested_duality,
    check_refinement,
    problem_corpus,
    random_refinement,
    random_tree,
    subsets,
)

SEED = 2024
N_PROBLEMS = 500
N_REFINEMENTS = 200
N_PAXP = 200
N_CONSTRAINED = 100


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE[n] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def corpus():
    t0 = time.perf_counter()
    problems = problem_corpus(SEED, N_PROBLEMS)
    families = [brute_force_xps(p) for p in problems]
    return problems, families, time.perf_counter() - t0


def test_criterion_1_extraction_traces():
    expected = [
        (AXP, ASCENDING, {4, 6}),
        (AXP, DESCENDING, {1, 4}),
        (CXP, ASCENDING, {4}),
        (CXP, DESCENDING, {4}),
    ]
    bad = []
    slowest = 0.0
    for kind, order, want in expected:
        oracle = example4_oracle()
        t0 = time.perf_counter()
        got = find_one_xp(oracle, kind, order)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if got != want or oracle.total_calls != 4 or dt >= 1e-3:
            bad.append((kind, order, sorted(got), oracle.total_calls, dt))
    record(1, not bad, f"4 traces exact with 4 queries each, slowest {slowest * 1e6:.0f} us {bad or ''}")


def test_criterion_2_enumeration_traces():
    pos = enumerate_xps(example4_oracle(), PREFER_TRUE)
    neg = enumerate_xps(example4_oracle(), PREFER_FALSE)
    want_pos = [(CXP, {4}), (CXP, {1, 6}), (AXP, {1, 4}), (AXP, {4, 6})]
    want_neg = [(AXP, {4, 6}), (CXP, {4}), (AXP, {1, 4}), (CXP, {1, 6})]
    clauses = [(-4,), (-1, -6), (1, 4), (4, 6)]
    final = SelectorFormula((1, 2, 4, 6), list(pos.clauses))
    ok = (
        [(k, set(s)) for k, s in pos] == want_pos
        and pos.clauses == clauses
        and sat_solve(final) == (False, None)
        and [(k, set(s)) for k, s in neg] == want_neg
    )
    record(2, ok, "PreferTrue order, blocking clauses and final UNSAT; PreferFalse order")


def test_criterion_3_example_duality():
    ok = check_mhs_duality(EX4_AXPS, EX4_CXPS)
    for k in range(2):
        ok &= not check_mhs_duality(EX4_AXPS[:k] + EX4_AXPS[k + 1 :], EX4_CXPS)
        ok &= not check_mhs_duality(EX4_AXPS, EX4_CXPS[:k] + EX4_CXPS[k + 1 :])
    record(3, ok, "duality holds and breaks when any single set is dropped")


def test_criterion_4_oracle_equivalence(corpus):
    problems, families, setup = corpus
    rng = random.Random(SEED)
    t0 = time.perf_counter()
    failures = []
    for n, (p, bf) in enumerate(zip(problems, families)):
        for bias in (PREFER_TRUE, PREFER_FALSE):
            rep = enumerate_xps(p, bias)
            if rep.axps != bf.axps or rep.cxps != bf.cxps or len(rep) != len(set(rep.entries)):
                failures.append((n, "enumerate", bias))
        spec = sorted(p.specified)
        orders = [ASCENDING, DESCENDING] + [rng.sample(spec, len(spec)) for _ in range(3)]
        for order in orders:
            if find_one_xp(p, AXP, order) not in bf.axps:
                failures.append((n, AXP, order))
            if find_one_xp(p, CXP, order) not in bf.cxps:
                failures.append((n, CXP, order))
    elapsed = setup + time.perf_counter() - t0
    cfg_ok = all(len(p.specified) <= 6 and len(p.space.classes) <= 4 for p in problems) and all(
        d.size() <= 3 for p in problems for d in p.space.domains
    )
    ok = not failures and cfg_ok and len(problems) >= 500 and elapsed <= 60
    record(4, ok, f"{len(problems)} problems, {len(failures)} mismatches, {elapsed:.1f} s")


def test_criterion_5_properties(corpus):
    problems, families, _ = corpus
    rng = random.Random(SEED + 5)
    counts = dict(monotone=0, duality=0, refinement=0, nested=0, lemmas=0)
    pairs = 0
    for n, (p, bf) in enumerate(zip(problems, families)):
        counts["monotone"] += not check_monotone(p)
        counts["duality"] += not check_mhs_duality(bf.axps, bf.cxps)
        counts["lemmas"] += not check_hitting_lemmas(p, bf)
        chain = []
        find_one_xp(p, AXP, rng.choice([ASCENDING, DESCENDING]), chain)
        counts["nested"] += not check_nested_duality(p, chain)
        if pairs < N_REFINEMENTS:
            counts["refinement"] += not check_refinement(random_refinement(rng, p))
            pairs += 1
    violations = sum(counts.values())
    record(5, violations == 0 and pairs >= 200, f"{len(problems)} problems, {pairs} refinement pairs, violations {counts}")


def _fixed_trees():
    rng = random.Random(SEED + 6)
    cfg = GeneratorConfig(features=(5, 5), domain_sizes=(2, 3), max_depth=5, classes=(4, 4), p_leaf=0.15)
    while True:
        yield random_tree(rng, cfg)


def test_criterion_6_call_counts():
    covered = set()
    checked = 0
    bad = []
    trees = _fixed_trees()
    for _ in range(50):
        tree = next(trees)
        m = tree.space.m
        rng = random.Random(checked)
        x = tuple(rng.choice(d.values) for d in tree.space.domains)
        for u in range(m):
            for free in subsets(range(1, m + 1)):
                if len(free) != u:
                    continue
                z = PartialInstance(tree.space, x).restrict(set(range(1, m + 1)) - free)
                pred = prediction_set(tree, z)
                if pred == set(tree.space.classes):
                    continue
                p = ExplanationProblem(tree, z, pred)
                for kind in (AXP, CXP):
                    oracle = TreeOracle(p)
                    find_one_xp(oracle, kind)
                    checked += 1
                    if oracle.total_calls != len(p.specified) or oracle.max_visits > len(tree):
                        bad.append((u, kind, oracle.total_calls, len(p.specified)))
                covered.add(u)
        if covered == set(range(m)):
            break
    ok = not bad and covered == set(range(5))
    record(6, ok, f"{checked} extractions, |U| sizes {sorted(covered)}, calls == |S| and one traversal per call")


def test_criterion_7_extensions(corpus):
    problems, _, _ = corpus
    n_paxp = n_cons = 0
    bad = []
    vacuous = InputConstraint(())
    for n, p in enumerate(problems):
        if n_paxp < N_PAXP:
            n_paxp += 1
            for x in subsets(p.specified):
                prob = paxp_probability(p, x)
                waxp = waxp_holds(p, x)
                if prob != brute_paxp_probability(p, x) or (prob == 1) != waxp:
                    bad.append((n, "paxp", sorted(x)))
                if not is_weak_paxp(p, x, 0) or is_weak_paxp(p, x, 1) != waxp:
                    bad.append((n, "delta", sorted(x)))
        if n_cons < N_CONSTRAINED:
            n_cons += 1
            for w in subsets(p.specified):
                if constrained_waxp(p, w, vacuous) != waxp_holds(p, w):
                    bad.append((n, "constrained", sorted(w)))
    ok = not bad and n_paxp >= 200 and n_cons >= 100
    record(7, ok, f"{n_paxp} paxp instances exact, {n_cons} vacuous-constraint instances, delta 0/1 boundaries, {len(bad)} mismatches")


def test_criterion_8_assessment_fixture():
    tree = parse_model((FIXTURES / "symptoms.model.json").read_text()).tree
    symptoms = {1: 1, 2: 1}
    a = assess(tree, "b0_md", symptoms)
    bf = brute_force_xps(ExplanationProblem(tree, a.instance, {a.leaf_class}))
    ok = (
        a.outcome == SUFFICIENT
        and a.no_active_symptom
        and not (a.axp & set(symptoms))
        and a.axp in bf.axps
        and all(not (s & set(symptoms)) for s in bf.axps)
    )
    record(8, ok, f"assessment AXp {sorted(a.axp)} avoids symptoms {sorted(symptoms)}; flag raised; brute force agrees")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
