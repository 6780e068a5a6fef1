import random

import pytest

from conftest import EX4_SPECIFIED, example4_oracle, instance, xor_tree
from partialxp import (
    ASCENDING,
    AXP,
    CXP,
    DESCENDING,
    ExplanationProblem,
    TreeOracle,
    UsageError,
    find_one_xp,
    is_necessary,
    shrink,
)
from partialxp.verify import brute_force_xps, problem_corpus


@pytest.mark.parametrize(
    "kind, order, expected",
    [
        (AXP, ASCENDING, {4, 6}),
        (AXP, DESCENDING, {1, 4}),
        (CXP, ASCENDING, {4}),
        (CXP, DESCENDING, {4}),
    ],
)
def test_trace_tables(kind, order, expected):
    o = example4_oracle()
    assert find_one_xp(o, kind, order) == expected
    assert o.total_calls == len(EX4_SPECIFIED) == 4


def test_ascending_axp_trace_steps():
    o = example4_oracle()
    chain = []
    find_one_xp(o, AXP, ASCENDING, chain)
    # drop 1, drop 2, keep 4, keep 6
    assert [sorted(s) for s in chain] == [[1, 2, 4, 6], [2, 4, 6], [4, 6], [4, 6], [4, 6]]
    assert [q for _, q, _ in o.log] == [
        frozenset({2, 4, 6}),
        frozenset({4, 6}),
        frozenset({6}),
        frozenset({4}),
    ]


def test_explicit_order():
    o = example4_oracle()
    assert find_one_xp(o, AXP, [6, 1, 2, 4]) == {1, 4}
    with pytest.raises(UsageError):
        find_one_xp(example4_oracle(), AXP, [1, 2, 4])
    with pytest.raises(UsageError):
        find_one_xp(example4_oracle(), AXP, "sideways")


def test_no_specified_features():
    t = xor_tree()
    p = ExplanationProblem(t, instance(t.space, None, None, None), {"yes"}, check=False)
    with pytest.raises(UsageError):
        find_one_xp(p)


@pytest.mark.parametrize("seed", range(40))
def test_outputs_belong_to_the_families(seed):
    rng = random.Random(seed)
    (p,) = problem_corpus(seed, 1)
    bf = brute_force_xps(p)
    for _ in range(3):
        order = rng.sample(sorted(p.specified), len(p.specified))
        assert find_one_xp(p, AXP, order) in bf.axps
        assert find_one_xp(p, CXP, order) in bf.cxps
    inter = frozenset.intersection(*bf.axps)
    for i in p.specified:
        assert is_necessary(p, i) == (i in inter)


def test_shrink_from_a_weak_seed():
    o = example4_oracle()
    assert shrink(o, AXP, {1, 4, 6}, DESCENDING) == {1, 4}
    assert o.total_calls == 3


def test_necessity_guard():
    with pytest.raises(UsageError):
        is_necessary(example4_oracle(), 3)
    assert is_necessary(example4_oracle(), 4)
    assert not is_necessary(example4_oracle(), 6)
