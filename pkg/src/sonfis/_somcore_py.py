"""Pure-NumPy fallback for the batch-SOM hot kernels.

Mirrors `sonfis._somcore` (the Cython extension) function for function so
`sonfis.kernels` can swap them freely.
"""

import numpy as np

BACKEND = "numpy"


def assign_bmus(data, protos):
    """Index of the best-matching prototype for every row of `data`.

    Squared Euclidean distance; np.argmin keeps the first (lowest) index
    on ties, matching the compiled kernel.
    """
    d2 = ((data[:, None, :] - protos[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1).astype(np.int64)


def accumulate_by_bmu(data, bmus, m):
    """Per-neuron sum of assigned rows and assignment counts."""
    sums = np.zeros((m, data.shape[1]), dtype=np.float64)
    np.add.at(sums, bmus, data)
    counts = np.bincount(bmus, minlength=m).astype(np.float64)
    return sums, counts
