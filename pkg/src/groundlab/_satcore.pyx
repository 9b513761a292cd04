# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Hot kernel: clause-violation counts over all 2^n assignments.

Streams every assignment through the clause list and accumulates an energy
histogram without retaining a 2^n vector per clause.  This is the inner loop
of the SAT sweeps; the pure-numpy fallback lives in _satcore_py.py.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def violation_histogram(int n, cnp.uint64_t[::1] masks, cnp.uint64_t[::1] targets):
    """Histogram of Σ_c [assignment & mask_c == target_c] over 2^n assignments.

    masks/targets encode one clause each: the clause is violated exactly when
    the masked bits equal the target pattern (every literal false).
    """
    cdef Py_ssize_t m = masks.shape[0]
    cdef cnp.uint64_t dim = (<cnp.uint64_t>1) << n
    cdef cnp.ndarray[cnp.uint16_t, ndim=1] counts = np.zeros(dim, dtype=np.uint16)
    cdef cnp.uint16_t[::1] cview = counts
    cdef cnp.uint64_t x, mask, targ, stride, base, sub, idx
    cdef Py_ssize_t c, j, nfree
    cdef cnp.uint64_t[64] free_bits
    for c in range(m):
        mask = masks[c]
        targ = targets[c]
        # enumerate the subcube of assignments matching the clause pattern
        nfree = 0
        for j in range(n):
            x = (<cnp.uint64_t>1) << j
            if not (mask & x):
                free_bits[nfree] = x
                nfree += 1
        sub = 0
        while True:
            idx = targ | sub
            cview[idx] += 1
            # next subset of the free bits (Gray-style carry walk)
            j = 0
            while j < nfree and (sub & free_bits[j]):
                sub ^= free_bits[j]
                j += 1
            if j == nfree:
                break
            sub |= free_bits[j]
    cdef cnp.uint64_t max_count = 0
    for idx in range(dim):
        if cview[idx] > max_count:
            max_count = cview[idx]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist = np.zeros(max_count + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] hview = hist
    for idx in range(dim):
        hview[cview[idx]] += 1
    return hist
