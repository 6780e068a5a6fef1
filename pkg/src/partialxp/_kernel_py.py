"""Pure-Python path-consistency kernel (fallback for ``_kernel``)."""


def reach(ct, fixed, stop_mask):
    """Classes reachable when feature ``f`` is pinned to cell ``fixed[f]``.

    Depth-first over ``ct``; features with ``fixed[f] < 0`` range over all
    cells, narrowed by the tests met along each path.  Returns
    ``(class mask, nodes visited)`` and stops as soon as a class in
    ``stop_mask`` is reached.  Each node is visited at most once.
    """
    allowed = [full if c < 0 else 1 << c for full, c in zip(ct.full_masks, fixed)]
    feature, label, start, count, child, cmask = ct.lists
    acc = 0
    visits = 0

    def rec(k):
        nonlocal acc, visits
        visits += 1
        f = feature[k]
        if f < 0:
            acc |= 1 << label[k]
            return
        cur = allowed[f]
        for j in range(start[k], start[k] + count[k]):
            m = cur & cmask[j]
            if m:
                allowed[f] = m
                rec(child[j])
                allowed[f] = cur
                if acc & stop_mask:
                    return

    rec(0)
    return acc, visits
