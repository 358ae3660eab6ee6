# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled CSR kernels (the hot path of every solver iteration).

Row accumulation is strictly left to right: results are deterministic
and bit-identical across repeated runs.
"""
from libc.stdint cimport int64_t


def csr_spmv(const int64_t[::1] row_offsets,
             const int64_t[::1] col_indices,
             const double[::1] values,
             const double[::1] v,
             double[::1] out):
    """out[i] = sum_k values[k] * v[col_indices[k]] over row i's entries."""
    cdef Py_ssize_t n = row_offsets.shape[0] - 1
    cdef Py_ssize_t i
    cdef int64_t k, k0, k1
    cdef double acc
    with nogil:
        for i in range(n):
            acc = 0.0
            k0 = row_offsets[i]
            k1 = row_offsets[i + 1]
            for k in range(k0, k1):
                acc = acc + values[k] * v[col_indices[k]]
            out[i] = acc
