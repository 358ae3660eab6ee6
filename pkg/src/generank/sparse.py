"""Sparse symmetric matrix storage, SpMV, and Matrix Market exchange.

Storage is CSR with both triangles stored (full symmetric storage), which
keeps SpMV a plain row sweep. Matrices are immutable after construction
(the underlying arrays are marked read-only) and safe to share between
threads; SpMV accumulates each row left to right, so repeated runs are
bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from generank import _backend


class MatrixFormatError(ValueError):
    """Raised for malformed or inconsistent Matrix Market files."""


def _as_readonly(a, dtype):
    arr = np.ascontiguousarray(a, dtype=dtype)
    if arr is a:
        arr = a.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SparseSymMatrix:
    """Symmetric sparse matrix in CSR form with full symmetric storage.

    Parameters
    ----------
    n : int
        Matrix dimension.
    row_offsets : array of int64, shape (n+1,)
        CSR row pointer; ``row_offsets[0] == 0`` and
        ``row_offsets[n] == nnz``.
    col_indices : array of int64, shape (nnz,)
        Column index of each stored entry, strictly increasing per row.
    values : array of float64, shape (nnz,)
        Entry values; entry (i, j) is stored iff (j, i) is stored, with
        equal values.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", _as_readonly(self.row_offsets, np.int64))
        object.__setattr__(self, "col_indices", _as_readonly(self.col_indices, np.int64))
        object.__setattr__(self, "values", _as_readonly(self.values, np.float64))
        if not self._checked:
            self.validate()
            object.__setattr__(self, "_checked", True)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_edges(cls, n, rows, cols, values=None):
        """Build from one (i, j) pair per undirected off-diagonal entry.

        Each pair must satisfy i != j and appear once (in either
        orientation); the mirrored entry is added automatically.
        `values` defaults to all ones (0/1 adjacency).
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise ValueError("rows and cols must have the same length")
        if values is None:
            vals = np.ones(rows.shape[0], dtype=np.float64)
        else:
            vals = np.asarray(values, dtype=np.float64)
            if vals.shape != rows.shape:
                raise ValueError("values length must match rows/cols")
        if np.any(rows == cols):
            raise ValueError("self-loop (diagonal) entries are not allowed in from_edges")
        full_r = np.concatenate([rows, cols])
        full_c = np.concatenate([cols, rows])
        full_v = np.concatenate([vals, vals])
        return cls._from_triplets(n, full_r, full_c, full_v)

    @classmethod
    def _from_triplets(cls, n, rows, cols, vals):
        """Assemble CSR from a full (both triangles) triplet list."""
        if n < 1:
            raise ValueError(f"matrix dimension must be >= 1, got {n}")
        if rows.size and (rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n):
            raise ValueError("entry index out of bounds")
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        dup = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
        if np.any(dup):
            k = int(np.flatnonzero(dup)[0])
            raise ValueError(f"duplicate entry at ({rows[k]}, {cols[k]}) (0-based)")
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=offsets[1:])
        return cls(n, offsets, cols, vals)

    @classmethod
    def empty(cls, n):
        """The n-by-n zero matrix (no stored entries)."""
        return cls(n, np.zeros(n + 1, dtype=np.int64),
                   np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64))

    # -- validation -----------------------------------------------------

    def validate(self):
        """Check all structural invariants; raises ValueError on violation."""
        n, off, col, val = self.n, self.row_offsets, self.col_indices, self.values
        if n < 1:
            raise ValueError(f"matrix dimension must be >= 1, got {n}")
        if off.shape != (n + 1,):
            raise ValueError(f"row_offsets must have length n+1={n + 1}, got {off.shape[0]}")
        if off[0] != 0:
            raise ValueError("row_offsets[0] must be 0")
        if np.any(np.diff(off) < 0):
            raise ValueError("row_offsets must be nondecreasing")
        if col.shape != val.shape:
            raise ValueError("col_indices and values must have the same length")
        if off[n] != col.shape[0]:
            raise ValueError("row_offsets[n] must equal the number of stored entries")
        nnz = col.shape[0]
        if nnz == 0:
            return
        if col.min() < 0 or col.max() >= n:
            raise ValueError("column index out of bounds")
        row_of = np.repeat(np.arange(n, dtype=np.int64), np.diff(off))
        same_row = row_of[1:] == row_of[:-1]
        if np.any(same_row & (col[1:] <= col[:-1])):
            raise ValueError("column indices must be strictly increasing within each row")
        # structural + value symmetry: sorting the triplets by (col, row)
        # must reproduce (row, col, value)
        order = np.lexsort((row_of, col))
        if not (np.array_equal(col[order], row_of) and np.array_equal(row_of[order], col)):
            raise ValueError("matrix structure is not symmetric")
        if not np.array_equal(val[order], val):
            raise ValueError("matrix values are not symmetric")

    def validate_adjacency(self):
        """Check the 0/1 no-diagonal adjacency contract; raises ValueError."""
        if self.nnz:
            row_of = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_offsets))
            if np.any(row_of == self.col_indices):
                i = int(row_of[np.flatnonzero(row_of == self.col_indices)[0]])
                raise ValueError(f"adjacency matrix has a self-loop at node {i} (0-based)")
            if np.any(self.values != 1.0):
                raise ValueError("adjacency matrix entries must all equal 1")

    # -- queries ----------------------------------------------------------

    @property
    def nnz(self):
        """Number of stored entries (both triangles counted)."""
        return int(self.row_offsets[self.n])

    def row_sums(self):
        """Sum of stored values per row (node degrees for 0/1 adjacency)."""
        out = np.zeros(self.n, dtype=np.float64)
        if self.nnz:
            nonempty = self.row_offsets[:-1] < self.row_offsets[1:]
            out[nonempty] = np.add.reduceat(self.values, self.row_offsets[:-1][nonempty])
        return out

    def to_dense(self, cap=None):
        """Dense ndarray copy; refuses n above `cap` when given."""
        if cap is not None and self.n > cap:
            raise ValueError(f"dense assembly refused for n={self.n} > cap={cap}")
        out = np.zeros((self.n, self.n), dtype=np.float64)
        row_of = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_offsets))
        out[row_of, self.col_indices] = self.values
        return out

    def equals(self, other):
        """Exact structural and value equality."""
        return (
            self.n == other.n
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.col_indices, other.col_indices)
            and np.array_equal(self.values, other.values)
        )

    # -- kernels ----------------------------------------------------------

    def spmv(self, v, out=None):
        """Matrix-vector product; deterministic accumulation order."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n,):
            raise ValueError(f"vector length {v.shape} does not match matrix dimension {self.n}")
        if out is None:
            out = np.empty(self.n, dtype=np.float64)
        _backend.csr_spmv(self.row_offsets, self.col_indices, self.values, v, out)
        return out


def spmv(A, v, out=None):
    """Functional alias for ``A.spmv(v)``."""
    return A.spmv(v, out=out)


# -- Matrix Market exchange ------------------------------------------------
#
# Coordinate format, 1-based on disk, 0-based in memory. Symmetric files
# store the lower triangle only and are expanded on read; `general` files
# must contain both triangles and are checked for symmetry. Duplicate
# coordinates are an error, never summed.

_BANNER = "%%MatrixMarket"


def read_matrix_market(path):
    """Read a coordinate pattern/real matrix file into a SparseSymMatrix.

    Accepts `symmetric` (lower triangle stored) and `general` (both
    triangles stored, symmetry verified) headers. Raises
    MatrixFormatError on malformed headers, out-of-bounds indices,
    duplicates, or asymmetry.
    """
    with open(path, "r", encoding="ascii") as fh:
        banner = fh.readline()
        tokens = banner.split()
        if len(tokens) != 5 or tokens[0] != _BANNER:
            raise MatrixFormatError(f"{path}: malformed Matrix Market banner: {banner.strip()!r}")
        _, obj, fmt, fieldtype, symmetry = (t.lower() for t in tokens)
        if obj != "matrix" or fmt != "coordinate":
            raise MatrixFormatError(f"{path}: only 'matrix coordinate' files are supported")
        if fieldtype not in ("real", "integer", "pattern"):
            raise MatrixFormatError(f"{path}: unsupported field type {fieldtype!r}")
        if symmetry not in ("symmetric", "general"):
            raise MatrixFormatError(f"{path}: unsupported symmetry {symmetry!r}")
        size_line = fh.readline()
        while size_line and size_line.lstrip().startswith("%"):
            size_line = fh.readline()
        parts = size_line.split()
        if len(parts) != 3:
            raise MatrixFormatError(f"{path}: malformed size line: {size_line.strip()!r}")
        try:
            m, n, nnz = (int(p) for p in parts)
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: malformed size line: {size_line.strip()!r}") from exc
        if m != n:
            raise MatrixFormatError(f"{path}: matrix must be square, got {m}x{n}")
        ncols = 2 if fieldtype == "pattern" else 3
        if nnz == 0:
            data = np.zeros((0, ncols))
        else:
            try:
                data = np.loadtxt(fh, comments="%", dtype=np.float64, ndmin=2)
            except ValueError as exc:
                raise MatrixFormatError(f"{path}: malformed coordinate data: {exc}") from exc
    if data.size == 0:
        data = data.reshape(0, ncols)
    if data.shape[1] != ncols:
        raise MatrixFormatError(
            f"{path}: expected {ncols} columns per coordinate line, got {data.shape[1]}"
        )
    if data.shape[0] != nnz:
        raise MatrixFormatError(
            f"{path}: header declares {nnz} entries but file has {data.shape[0]}"
        )
    rows = data[:, 0]
    cols = data[:, 1]
    if np.any(rows != np.floor(rows)) or np.any(cols != np.floor(cols)):
        raise MatrixFormatError(f"{path}: non-integer coordinate index")
    rows = rows.astype(np.int64) - 1
    cols = cols.astype(np.int64) - 1
    if nnz and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
        raise MatrixFormatError(f"{path}: coordinate index out of bounds for {n}x{n} matrix")
    vals = np.ones(nnz, dtype=np.float64) if fieldtype == "pattern" else data[:, 2].copy()

    if symmetry == "symmetric":
        if np.any(rows < cols):
            raise MatrixFormatError(
                f"{path}: symmetric file must store the lower triangle only (row >= col)"
            )
        off_diag = rows != cols
        full_r = np.concatenate([rows, cols[off_diag]])
        full_c = np.concatenate([cols, rows[off_diag]])
        full_v = np.concatenate([vals, vals[off_diag]])
    else:
        full_r, full_c, full_v = rows, cols, vals
    try:
        return SparseSymMatrix._from_triplets(n, full_r, full_c, full_v)
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc


def write_matrix_market(A, path):
    """Write the lower triangle with a `symmetric` header.

    Emits a `pattern` file when every value equals 1, a `real` file
    otherwise. Output is deterministic byte for byte.
    """
    row_of = np.repeat(np.arange(A.n, dtype=np.int64), np.diff(A.row_offsets))
    keep = row_of >= A.col_indices
    r = row_of[keep] + 1
    c = A.col_indices[keep] + 1
    v = A.values[keep]
    pattern = v.size == 0 or bool(np.all(v == 1.0))
    fieldtype = "pattern" if pattern else "real"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {fieldtype} symmetric\n")
        fh.write(f"{A.n} {A.n} {r.size}\n")
        if pattern:
            for i in range(r.size):
                fh.write(f"{r[i]} {c[i]}\n")
        else:
            for i in range(r.size):
                fh.write(f"{r[i]} {c[i]} {v[i]:.17g}\n")
