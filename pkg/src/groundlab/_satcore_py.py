"""Pure-numpy fallback for the clause-violation histogram kernel.

Counts live in a 2^n uint16 array viewed as an n-dimensional cube; each
clause increments its violating subcube through a strided slice, so the work
per clause is 2^{n-k} elements rather than 2^n.
"""

import numpy as np


def violation_histogram(n: int, masks: np.ndarray, targets: np.ndarray) -> np.ndarray:
    counts = np.zeros((2,) * n, dtype=np.uint16) if n else np.zeros((1,), dtype=np.uint16)
    for mask, targ in zip(masks, targets):
        index = []
        for j in range(n - 1, -1, -1):  # axis 0 is the most significant bit
            bit = 1 << j
            if mask & bit:
                index.append(1 if (targ & bit) else 0)
            else:
                index.append(slice(None))
        counts[tuple(index)] += 1
    return np.bincount(counts.reshape(-1))
