"""Pure-numpy CSR kernels, used when the compiled extension is unavailable.

`np.add.reduceat` accumulates rows in a fixed (SIMD-blocked) order, so
repeated runs are bit-identical; against the compiled kernel's strictly
sequential accumulation the results agree to a couple of ulp.
"""
import numpy as np


def csr_spmv(row_offsets, col_indices, values, v, out):
    """out[i] = sum_k values[k] * v[col_indices[k]] over row i's entries."""
    if values.shape[0] == 0:
        out[:] = 0.0
        return
    prod = values * v[col_indices]
    # reduceat treats an empty segment as a copy of the element at its
    # start index, so empty rows are masked out and zeroed explicitly.
    nonempty = row_offsets[:-1] < row_offsets[1:]
    out[:] = 0.0
    out[nonempty] = np.add.reduceat(prod, row_offsets[:-1][nonempty])
