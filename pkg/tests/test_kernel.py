import os
import random
import subprocess
import sys

import pytest

from partialxp import (
    UNSPECIFIED,
    Categorical,
    DecisionTree,
    FeatureSpace,
    PartialInstance,
    ValueSplit,
    leaf,
    prediction_set,
    split,
)
from partialxp import _kernel_py, kernel
from partialxp.compiled import CompiledTree
from partialxp.verify import GeneratorConfig, random_tree
from test_model import mixed_tree

try:
    from partialxp import _kernel
except ImportError:
    _kernel = None

needs_ext = pytest.mark.skipif(_kernel is None, reason="compiled kernel not built")


def random_fixed(rng, ct):
    return [rng.randrange(fc.n) if rng.random() < 0.5 else -1 for fc in ct.cells]


def class_set(ct, mask):
    return {c for k, c in enumerate(ct.space.classes) if mask >> k & 1}


@pytest.mark.parametrize("seed", range(30))
def test_reach_agrees_with_prediction_set(seed):
    rng = random.Random(seed)
    tree = random_tree(rng) if seed % 2 else mixed_tree(rng)
    ct = CompiledTree(tree)
    for _ in range(20):
        z = PartialInstance(
            tree.space,
            tuple(
                UNSPECIFIED if rng.random() < 0.4 else next(iter(_sample(rng, d)))
                for d in tree.space.domains
            ),
        )
        mask, visits = kernel.reach(ct, ct.instance_cells(z))
        assert class_set(ct, mask) == prediction_set(tree, z)
        assert 1 <= visits <= len(tree)


def _sample(rng, d):
    if d.finite:
        return [rng.choice(list(d.iter_values()))]
    return [rng.uniform(d.lo, d.hi)]


@needs_ext
@pytest.mark.parametrize("seed", range(20))
def test_compiled_kernel_matches_fallback(seed):
    rng = random.Random(seed)
    cfg = GeneratorConfig(features=(4, 10), max_depth=7, p_leaf=0.15)
    ct = CompiledTree(random_tree(rng, cfg))
    full = (1 << ct.n_classes) - 1
    for _ in range(50):
        fixed = random_fixed(rng, ct)
        stop = rng.randrange(full + 1)
        assert _kernel.reach(ct, fixed, stop) == _kernel_py.reach(ct, fixed, stop)


@pytest.mark.parametrize("seed", range(10))
def test_early_stop_is_sound(seed):
    rng = random.Random(seed)
    ct = CompiledTree(random_tree(rng))
    for _ in range(30):
        fixed = random_fixed(rng, ct)
        stop = 1 << rng.randrange(ct.n_classes)
        full, v_full = kernel.reach(ct, fixed)
        early, v_early = kernel.reach(ct, fixed, stop)
        assert bool(full & stop) == bool(early & stop)
        assert v_early <= v_full


def test_wide_domains_use_the_fallback():
    values = tuple(range(70))
    sp = FeatureSpace((Categorical(values),), ("a", "b"))
    groups = (values[:35], values[35:])
    tree = DecisionTree(sp, [split(0, 1, ValueSplit(groups), [1, 2]), leaf(1, "a"), leaf(2, "b")], 0)
    ct = CompiledTree(tree)
    assert not ct.fits_u64
    assert kernel.reach(ct, [69]) == (0b10, 2)
    assert kernel.reach(ct, [-1]) == (0b11, 3)


def test_pure_python_switch():
    env = dict(os.environ, PARTIALXP_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import partialxp.kernel as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
