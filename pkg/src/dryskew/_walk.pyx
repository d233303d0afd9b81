# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice-walk kernel.

Must stay step-for-step identical to ``_walk_py.walk_counts``; the two are
compared bitwise in the test suite.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel import prange
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void _one_path(
    uint64_t seed,
    uint64_t index,
    int64_t n_steps,
    int64_t K,
    uint64_t thr_pos,
    uint64_t thr_zero,
    uint64_t thr_neg,
    int64_t* out,
) noexcept nogil:
    cdef uint64_t ctr = _mix(seed ^ _mix(index))
    cdef uint64_t z, thr
    cdef int64_t k = 0
    cdef int64_t n, a
    cdef int64_t win2 = 0, nonneg = 0, last_zero = 0, v_count = 0, zeros = 0

    for n in range(n_steps):
        # state k is held over [n, n + 1) lattice time steps
        if k == 0:
            last_zero = n
            v_count = nonneg
            zeros += 1
            thr = thr_zero
        elif k > 0:
            thr = thr_pos
        else:
            thr = thr_neg
        if k >= 0:
            nonneg += 1
        a = k if k >= 0 else -k
        if a < K:
            win2 += 2
        elif a == K:
            win2 += 1
        # branchy update is faster than the cmov form here (mispredict < dependency stall)
        ctr = ctr + GAMMA
        z = _mix(ctr)
        if z < thr:
            k += 1
        else:
            k -= 1

    if k == 0:
        last_zero = n_steps
        v_count = nonneg

    out[0] = k
    out[1] = win2
    out[2] = nonneg
    out[3] = last_zero
    out[4] = v_count
    out[5] = zeros


def walk_counts(
    uint64_t seed,
    int64_t first_index,
    int64_t n_paths,
    int64_t n_steps,
    int64_t K,
    uint64_t thr_pos,
    uint64_t thr_zero,
    uint64_t thr_neg,
    int num_threads=1,
):
    """Integer bookkeeping for ``n_paths`` walks, one row per path."""
    out = np.zeros((n_paths, 6), dtype=np.int64)
    cdef int64_t[:, ::1] view = out
    cdef Py_ssize_t i
    if n_paths == 0:
        return out
    if num_threads < 1:
        num_threads = 1
    with nogil:
        for i in prange(n_paths, num_threads=num_threads, schedule="static"):
            _one_path(seed, <uint64_t>(first_index + i), n_steps, K,
                      thr_pos, thr_zero, thr_neg, &view[i, 0])
    return out
