"""Compare the compiled and pure-Python path-consistency kernels.

    python benchmarks/bench_kernel.py [--trees 5] [--queries 2000] [--seed 0]

Each query pins a random subset of features to random cells and asks for
the reachable class mask with no early stop, so both kernels walk the same
nodes.  Results are checked for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import random
import time

from partialxp import _kernel_py
from partialxp.compiled import CompiledTree
from partialxp.verify import GeneratorConfig, random_tree

try:
    from partialxp import _kernel
except ImportError:  # extension not built
    _kernel = None


def _queries(rng, ct, n):
    out = []
    for _ in range(n):
        out.append([rng.randrange(f.n) if rng.random() < 0.5 else -1 for f in ct.cells])
    return out


def _time(fn, ct, queries):
    t0 = time.perf_counter()
    results = [fn(ct, q, 0) for q in queries]
    return time.perf_counter() - t0, results


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trees", type=int, default=5)
    ap.add_argument("--queries", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernel is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    cfg = GeneratorConfig(features=(16, 16), domain_sizes=(2, 3), max_depth=12, p_leaf=0.2)
    rng = random.Random(args.seed)
    print(f"{'nodes':>7} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    tot_py = tot_cy = 0.0
    for _ in range(args.trees):
        ct = CompiledTree(random_tree(rng, cfg))
        qs = _queries(rng, ct, args.queries)
        t_py, r_py = _time(_kernel_py.reach, ct, qs)
        t_cy, r_cy = _time(_kernel.reach, ct, qs)
        if r_py != r_cy:
            raise SystemExit("kernels disagree")
        tot_py += t_py
        tot_cy += t_cy
        print(f"{len(ct.feature):>7} {t_py * 1e3:>10.1f} {t_cy * 1e3:>10.1f} {t_py / t_cy:>7.1f}x")
    print(f"{'total':>7} {tot_py * 1e3:>10.1f} {tot_cy * 1e3:>10.1f} {tot_py / tot_cy:>7.1f}x")


if __name__ == "__main__":
    main()
