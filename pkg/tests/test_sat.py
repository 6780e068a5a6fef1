import itertools
import random

import pytest

from partialxp import PREFER_FALSE, PREFER_TRUE, SelectorFormula, sat_solve


def brute_sat(variables, clauses, assumptions=None):
    for bits in itertools.product([False, True], repeat=len(variables)):
        a = dict(zip(variables, bits))
        if assumptions and any(a[v] != b for v, b in assumptions.items()):
            continue
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def test_empty_formula_follows_the_bias():
    assert sat_solve(SelectorFormula((1, 2, 3))) == (True, {1: True, 2: True, 3: True})
    assert sat_solve(SelectorFormula((1, 2, 3), bias=PREFER_FALSE)) == (
        True,
        {1: False, 2: False, 3: False},
    )


def test_unit_propagation_and_unsat():
    f = SelectorFormula((1, 2), [(1,), (-1, 2)])
    assert sat_solve(f) == (True, {1: True, 2: True})
    f.add((-2,))
    assert sat_solve(f) == (False, None)


def test_rejects_foreign_literals():
    with pytest.raises(ValueError):
        SelectorFormula((1, 2), [(3,)])
    with pytest.raises(ValueError):
        SelectorFormula((1,), bias="maybe")
    with pytest.raises(ValueError):
        sat_solve(SelectorFormula((1,)), {2: True})


def test_decisions_take_the_highest_variable_first():
    # preferring true everywhere is impossible; the solver keeps u3 and flips u1
    f = SelectorFormula((1, 2, 3), [(-1, -3)])
    assert sat_solve(f) == (True, {1: False, 2: True, 3: True})


@pytest.mark.parametrize("seed", range(200))
def test_agrees_with_truth_tables(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    vs = tuple(range(1, n + 1))
    clauses = [
        tuple(v if rng.random() < 0.5 else -v for v in rng.sample(vs, rng.randint(1, min(3, n))))
        for _ in range(rng.randint(0, 10))
    ]
    bias = rng.choice([PREFER_TRUE, PREFER_FALSE])
    assumptions = {v: rng.random() < 0.5 for v in rng.sample(vs, rng.randint(0, n))}
    ok, model = sat_solve(SelectorFormula(vs, clauses, bias), assumptions)
    assert ok == brute_sat(vs, clauses, assumptions)
    if ok:
        assert all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)
        assert all(model[v] == b for v, b in assumptions.items())
