"""Pure numpy twin of the compiled walk kernel.

Paths are advanced in lock-step across a batch, so the per-step cost is a
handful of array operations instead of a Python loop per path. Output is
bitwise identical to ``dryskew._walk.walk_counts``.
"""

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)

BATCH = 8192


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _batch(seed, first_index, n_paths, n_steps, K, thr_pos, thr_zero, thr_neg):
    idx = np.arange(first_index, first_index + n_paths, dtype=np.int64).astype(np.uint64)
    ctr = _mix(np.uint64(seed) ^ _mix(idx))
    k = np.zeros(n_paths, dtype=np.int64)
    win2 = np.zeros(n_paths, dtype=np.int64)
    nonneg = np.zeros(n_paths, dtype=np.int64)
    last_zero = np.zeros(n_paths, dtype=np.int64)
    v_count = np.zeros(n_paths, dtype=np.int64)
    zeros = np.zeros(n_paths, dtype=np.int64)
    tp, tz, tn = np.uint64(thr_pos), np.uint64(thr_zero), np.uint64(thr_neg)

    for n in range(n_steps):
        at0 = k == 0
        last_zero[at0] = n
        v_count[at0] = nonneg[at0]
        zeros += at0
        thr = np.where(k > 0, tp, np.where(k < 0, tn, tz))
        nonneg += k >= 0
        a = np.abs(k)
        win2 += 2 * (a < K) + (a == K)
        ctr += GAMMA
        k += np.where(_mix(ctr) < thr, 1, -1)

    at0 = k == 0
    last_zero[at0] = n_steps
    v_count[at0] = nonneg[at0]
    return np.stack([k, win2, nonneg, last_zero, v_count, zeros], axis=1)


def walk_counts(seed, first_index, n_paths, n_steps, K, thr_pos, thr_zero, thr_neg,
                num_threads=1):
    """Same contract as the compiled kernel; ``num_threads`` is accepted and ignored."""
    out = np.zeros((n_paths, 6), dtype=np.int64)
    with np.errstate(over="ignore"):
        for start in range(0, n_paths, BATCH):
            stop = min(start + BATCH, n_paths)
            out[start:stop] = _batch(seed, first_index + start, stop - start, n_steps, K,
                                     thr_pos, thr_zero, thr_neg)
    return out
