"""Compressed-sparse-column matrices built two ways.

``csc_from_triplets`` is the fast path: it collapses a (rows, cols, values)
triplet stream into canonical CSC with Matlab ``sparse`` semantics (input
zeros ignored, duplicates summed, positions whose sum is exactly zero
dropped).  The summation order is pinned so results are reproducible
bit-for-bit: entries are stably sorted by (column, row) and each position
is accumulated left-to-right in input order.

``CscBuilder`` is the deliberately naive path: it keeps a live CSC image
with exact-fit storage, so every insertion of a *new* position rewrites
the whole value and row-index arrays (prefix, new entry, shifted tail)
and bumps all later column offsets.  Each fresh insertion therefore
costs time proportional to the number of stored entries, independent of
where it lands.  That cost is the object of study for the benchmark
CLI, so it must not be amortized away (no slack capacity, no per-column
gaps, no batching).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CscBuilder",
    "CscMatrix",
    "TripletBatch",
    "csc_from_triplets",
    "max_abs_diff",
    "write_matrix_market",
]

# to_dense() refuses anything larger than this many entries.
DENSE_LIMIT = 10**8


class CscMatrix:
    """Immutable CSC matrix: ``col_ptr`` (n_cols+1), ``row_idx`` and
    ``values`` (both nnz long, column-major, rows strictly increasing
    within each column)."""

    __slots__ = ("n_rows", "n_cols", "col_ptr", "row_idx", "values")

    def __init__(self, n_rows, n_cols, col_ptr, row_idx, values, validate=True):
        n_rows = int(n_rows)
        n_cols = int(n_cols)
        if n_rows < 1 or n_cols < 1:
            raise ValueError("matrix dimensions must be positive")
        col_ptr = np.ascontiguousarray(col_ptr, dtype=np.int64)
        row_idx = np.ascontiguousarray(row_idx, dtype=np.int64)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if validate:
            if col_ptr.shape != (n_cols + 1,):
                raise ValueError("col_ptr must have n_cols+1 entries")
            if col_ptr[0] != 0 or col_ptr[-1] != row_idx.size:
                raise ValueError("col_ptr must start at 0 and end at nnz")
            if (np.diff(col_ptr) < 0).any():
                raise ValueError("col_ptr must be nondecreasing")
            if row_idx.shape != values.shape:
                raise ValueError("row_idx and values must have equal length")
            if row_idx.size:
                if row_idx.min() < 0 or row_idx.max() >= n_rows:
                    raise ValueError("row index out of range")
                inside = np.ones(row_idx.size, dtype=bool)
                starts = col_ptr[1:-1]
                inside[starts[starts < row_idx.size]] = False  # boundaries may step down
                if (np.diff(row_idx) <= 0)[inside[1:]].any():
                    raise ValueError("row indices must increase within a column")
        for arr in (col_ptr, row_idx, values):
            arr.flags.writeable = False
        object.__setattr__(self, "n_rows", n_rows)
        object.__setattr__(self, "n_cols", n_cols)
        object.__setattr__(self, "col_ptr", col_ptr)
        object.__setattr__(self, "row_idx", row_idx)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("CscMatrix is immutable")

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def get(self, i: int, j: int) -> float:
        """Stored value at (i, j), or 0.0 when the position is absent."""
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise ValueError(f"index ({i}, {j}) out of range for {self.shape}")
        lo, hi = int(self.col_ptr[j]), int(self.col_ptr[j + 1])
        pos = lo + np.searchsorted(self.row_idx[lo:hi], i)
        if pos < hi and self.row_idx[pos] == i:
            return float(self.values[pos])
        return 0.0

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, values) in column-major storage order."""
        cols = np.repeat(np.arange(self.n_cols, dtype=np.int64), np.diff(self.col_ptr))
        return self.row_idx.copy(), cols, self.values.copy()

    def to_dense(self) -> np.ndarray:
        if self.n_rows * self.n_cols > DENSE_LIMIT:
            raise ValueError(
                f"dense expansion of {self.shape} exceeds the {DENSE_LIMIT} entry guard"
            )
        dense = np.zeros((self.n_rows, self.n_cols))
        rows, cols, vals = self.triplets()
        dense[rows, cols] = vals
        return dense

    def drop_zeros(self) -> "CscMatrix":
        """Copy without explicitly stored zeros."""
        rows, cols, vals = self.triplets()
        return csc_from_triplets(rows, cols, vals, self.n_rows, self.n_cols)

    def __repr__(self) -> str:
        return f"CscMatrix(shape={self.shape}, nnz={self.nnz})"


def _as_index_array(idx) -> np.ndarray:
    idx = np.asarray(idx)
    if idx.dtype.kind != "i":
        idx = idx.astype(np.int64)
    return np.ascontiguousarray(idx).ravel()


def _check_indices(idx: np.ndarray, bound: int, what: str) -> None:
    bad = (idx < 0) | (idx >= bound)
    if bad.any():
        pos = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"{what} index {idx[pos]} at position {pos} out of range [0, {bound})"
        )


def csc_from_triplets(rows, cols, vals, n_rows: int, n_cols: int) -> CscMatrix:
    """Build a CSC matrix from triplets, summing duplicate positions.

    Entries whose value is exactly 0.0 are ignored, and positions whose
    accumulated sum is exactly 0.0 are not stored.  Per position the sum
    is taken left-to-right in input order, which makes the result a
    deterministic function of the triplet stream.
    """
    rows = _as_index_array(rows)
    cols = _as_index_array(cols)
    vals = np.ascontiguousarray(vals, dtype=np.float64).ravel()
    if not (rows.size == cols.size == vals.size):
        raise ValueError(
            f"triplet arrays disagree in length: {rows.size}, {cols.size}, {vals.size}"
        )
    if n_rows < 1 or n_cols < 1:
        raise ValueError("matrix dimensions must be positive")
    _check_indices(rows, n_rows, "row")
    _check_indices(cols, n_cols, "column")

    keep = vals != 0.0
    if not keep.all():
        rows, cols, vals = rows[keep], cols[keep], vals[keep]

    code = np.multiply(cols, n_rows, dtype=np.int64)
    code += rows
    order = np.argsort(code, kind="stable")  # stable: ties stay in input order
    code = code[order]
    vals = vals[order]

    if code.size:
        head = np.empty(code.size, dtype=bool)
        head[0] = True
        np.not_equal(code[1:], code[:-1], out=head[1:])
        group = np.cumsum(head) - 1
        # bincount accumulates sequentially, preserving the pinned order
        sums = np.bincount(group, weights=vals, minlength=int(group[-1]) + 1)
        ucode = code[head]
        nonzero = sums != 0.0
        sums, ucode = sums[nonzero], ucode[nonzero]
        out_rows = ucode % n_rows
        out_cols = ucode // n_rows
    else:
        sums = np.empty(0, dtype=np.float64)
        out_rows = np.empty(0, dtype=np.int64)
        out_cols = np.empty(0, dtype=np.int64)

    col_ptr = np.zeros(n_cols + 1, dtype=np.int64)
    np.cumsum(np.bincount(out_cols, minlength=n_cols), out=col_ptr[1:])
    return CscMatrix(n_rows, n_cols, col_ptr, out_rows, sums, validate=False)


def max_abs_diff(a: CscMatrix, b: CscMatrix) -> float:
    """max |a - b| over every position, treating absent entries as zero."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    ra, ca, va = a.triplets()
    rb, cb, vb = b.triplets()
    diff = csc_from_triplets(
        np.concatenate([ra, rb]),
        np.concatenate([ca, cb]),
        np.concatenate([va, -vb]),
        a.n_rows,
        a.n_cols,
    )
    return float(np.abs(diff.values).max()) if diff.nnz else 0.0


class CscBuilder:
    """Mutable CSC image with naive single-entry insertion.

    Adding to an existing position is a binary search plus in-place add.
    Adding a *new* position rebuilds the exact-fit value and row-index
    arrays around the inserted slot and increments every later column
    offset, so each fresh insertion costs time proportional to the
    number of entries already stored.  Explicit zeros are stored like
    any other value; this path never filters them.  Single-writer; not
    thread safe.
    """

    __slots__ = ("n_rows", "n_cols", "_aa", "_ia", "_ja")

    def __init__(self, n_rows: int, n_cols: int):
        if n_rows < 1 or n_cols < 1:
            raise ValueError("matrix dimensions must be positive")
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self._aa = np.empty(0, dtype=np.float64)  # values, column-major
        self._ia = np.empty(0, dtype=np.int64)  # row indices, column-major
        self._ja = np.zeros(n_cols + 1, dtype=np.int64)  # column offsets

    @property
    def nnz(self) -> int:
        return int(self._aa.size)

    def add(self, i: int, j: int, v: float) -> None:
        """Add v to entry (i, j)."""
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise ValueError(f"index ({i}, {j}) out of range for ({self.n_rows}, {self.n_cols})")
        aa, ia, ja = self._aa, self._ia, self._ja
        lo, hi = ja[j], ja[j + 1]
        pos = lo + np.searchsorted(ia[lo:hi], i)
        if pos < hi and ia[pos] == i:
            aa[pos] += v
        else:
            n = aa.size
            new_aa = np.empty(n + 1, dtype=np.float64)
            new_ia = np.empty(n + 1, dtype=np.int64)
            new_aa[:pos] = aa[:pos]
            new_ia[:pos] = ia[:pos]
            new_aa[pos] = v
            new_ia[pos] = i
            new_aa[pos + 1 :] = aa[pos:]
            new_ia[pos + 1 :] = ia[pos:]
            self._aa = new_aa
            self._ia = new_ia
            ja[j + 1 :] += 1

    def add_block(self, row_ids, col_ids, block) -> None:
        """Add a dense block via repeated single-entry insertions."""
        block = np.asarray(block, dtype=np.float64)
        if block.shape != (len(row_ids), len(col_ids)):
            raise ValueError(
                f"block shape {block.shape} does not match ids "
                f"({len(row_ids)}, {len(col_ids)})"
            )
        for b, j in enumerate(col_ids):
            for a, i in enumerate(row_ids):
                self.add(i, j, block[a, b])

    def get(self, i: int, j: int) -> float:
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise ValueError(f"index ({i}, {j}) out of range for ({self.n_rows}, {self.n_cols})")
        lo, hi = self._ja[j], self._ja[j + 1]
        pos = lo + np.searchsorted(self._ia[lo:hi], i)
        if pos < hi and self._ia[pos] == i:
            return float(self._aa[pos])
        return 0.0

    def to_matrix(self) -> CscMatrix:
        """Snapshot as an immutable CscMatrix.  Explicit zeros are kept."""
        return CscMatrix(
            self.n_rows,
            self.n_cols,
            self._ja.copy(),
            self._ia.copy(),
            self._aa.copy(),
            validate=False,
        )

    def __repr__(self) -> str:
        return f"CscBuilder(shape=({self.n_rows}, {self.n_cols}), nnz={self.nnz})"


@dataclass(frozen=True)
class TripletBatch:
    """Element-matrix values and their global positions, one column per
    triangle: ``rows_per_elem`` is 9 for scalar kinds and 36 for the
    vector-valued elastic kind."""

    rows_per_elem: int
    Ig: np.ndarray
    Jg: np.ndarray
    Kg: np.ndarray

    def __post_init__(self):
        if self.rows_per_elem not in (9, 36):
            raise ValueError(f"rows_per_elem must be 9 or 36, got {self.rows_per_elem}")
        shape = (self.rows_per_elem, self.Ig.shape[1] if self.Ig.ndim == 2 else -1)
        for name in ("Ig", "Jg", "Kg"):
            arr = getattr(self, name)
            if arr.ndim != 2 or arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")

    @property
    def nme(self) -> int:
        return self.Ig.shape[1]

    def flat(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Column-major 1d views: element k occupies slots
        [k*rows_per_elem, (k+1)*rows_per_elem)."""
        return (
            self.Ig.ravel(order="F"),
            self.Jg.ravel(order="F"),
            self.Kg.ravel(order="F"),
        )

    def to_csc(self, n_rows: int, n_cols: int) -> CscMatrix:
        i, j, k = self.flat()
        return csc_from_triplets(i, j, k, n_rows, n_cols)


def write_matrix_market(matrix: CscMatrix, path) -> None:
    """Write the coordinate MatrixMarket format (1-based indices)."""
    rows, cols, vals = matrix.triplets()
    with open(path, "w", encoding="ascii") as f:
        f.write("%%MatrixMarket matrix coordinate real general\n")
        f.write(f"{matrix.n_rows} {matrix.n_cols} {matrix.nnz}\n")
        for i, j, v in zip(rows, cols, vals):
            f.write(f"{i + 1} {j + 1} {'%.17g' % v}\n")
