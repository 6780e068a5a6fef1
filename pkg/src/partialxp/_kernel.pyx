# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled path-consistency kernel; same contract as ``_kernel_py.reach``.

Only usable for trees whose class count and per-feature cell counts fit
in 64-bit masks (``CompiledTree.fits_u64``).
"""

import numpy as np

from libc.stdint cimport int32_t, uint64_t
from libc.stdlib cimport free, malloc


cdef struct Tree:
    const int32_t* feature
    const int32_t* label
    const int32_t* start
    const int32_t* count
    const int32_t* child
    const uint64_t* cmask
    uint64_t* allowed
    uint64_t stop
    uint64_t acc
    long visits


cdef void _rec(Tree* t, int k) noexcept nogil:
    cdef int f, j, end
    cdef uint64_t cur, m
    t.visits += 1
    f = t.feature[k]
    if f < 0:
        t.acc |= (<uint64_t>1) << t.label[k]
        return
    cur = t.allowed[f]
    end = t.start[k] + t.count[k]
    for j in range(t.start[k], end):
        m = cur & t.cmask[j]
        if m:
            t.allowed[f] = m
            _rec(t, t.child[j])
            t.allowed[f] = cur
            if t.acc & t.stop:
                return


def reach(ct, fixed, stop_mask):
    cdef const int32_t[::1] feature = ct.feature
    cdef const int32_t[::1] label = ct.label
    cdef const int32_t[::1] start = ct.child_start
    cdef const int32_t[::1] count = ct.child_count
    cdef const int32_t[::1] child = ct.child_node
    cdef const uint64_t[::1] cmask = ct.child_mask
    cdef Py_ssize_t m = len(ct.full_masks)
    cdef Py_ssize_t f
    cdef Tree t
    cdef uint64_t* allowed = <uint64_t*> malloc(max(m, 1) * sizeof(uint64_t))
    if allowed == NULL:
        raise MemoryError()
    try:
        for f in range(m):
            c = fixed[f]
            if c < 0:
                allowed[f] = <uint64_t> ct.full_masks[f]
            else:
                allowed[f] = (<uint64_t>1) << (<int> c)
        t.feature = &feature[0]
        t.label = &label[0]
        t.start = &start[0]
        t.count = &count[0]
        t.child = &child[0] if child.shape[0] else NULL
        t.cmask = &cmask[0] if cmask.shape[0] else NULL
        t.allowed = allowed
        t.stop = <uint64_t> stop_mask
        t.acc = 0
        t.visits = 0
        with nogil:
            _rec(&t, 0)
        return int(t.acc), int(t.visits)
    finally:
        free(allowed)
