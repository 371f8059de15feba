"""Sparse payoff matrices with dual row/column layouts and read accounting.

The randomized game solver touches one row and one column per step, so the
matrix keeps both CSR and CSC layouts. Element-read counters are bumped at
the call sites that consume slices; verification passes (duality gap) are
booked on a separate counter so the solver's sublinearity claim stays
auditable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.io import mmread

__all__ = ["ReadCounter", "SparseGameMatrix", "load_matrix_market"]


@dataclass
class ReadCounter:
    """Per-run element-access tally, split by purpose."""

    solver: int = 0
    verify: int = 0

    @property
    def total(self) -> int:
        return self.solver + self.verify


class SparseGameMatrix:
    """Payoff matrix stored in both row-major and column-major sparse form.

    Carries the entry bound M = max |a_ij| and the sparsity statistic s
    (average nonzeros per row and per column).
    """

    def __init__(self, matrix, entry_bound: float | None = None):
        csr = sp.csr_matrix(matrix, dtype=float)
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        self._csr = csr
        self._csc = csr.tocsc()
        self._csc.sort_indices()
        self.n_rows, self.n_cols = csr.shape
        self.nnz = int(csr.nnz)
        worst = float(np.max(np.abs(csr.data))) if self.nnz else 0.0
        self.entry_bound = float(entry_bound) if entry_bound is not None else max(worst, 1e-300)
        if worst > self.entry_bound * (1.0 + 1e-12):
            raise ValueError(f"entry magnitude {worst} exceeds declared bound {self.entry_bound}")
        row_nnz = np.diff(csr.indptr)
        col_nnz = np.diff(self._csc.indptr)
        self.max_row_nnz = int(row_nnz.max()) if self.nnz else 0
        self.max_col_nnz = int(col_nnz.max()) if self.nnz else 0
        # Average nonzeros per row and per column (equal for square matrices).
        self.sparsity = 0.5 * (self.nnz / self.n_rows + self.nnz / self.n_cols)

    @classmethod
    def from_dense(cls, array, entry_bound: float | None = None) -> "SparseGameMatrix":
        return cls(np.asarray(array, dtype=float), entry_bound=entry_bound)

    @classmethod
    def from_coo(cls, rows, cols, values, shape, entry_bound: float | None = None) -> "SparseGameMatrix":
        return cls(sp.coo_matrix((values, (rows, cols)), shape=shape), entry_bound=entry_bound)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def scipy_csr(self) -> sp.csr_matrix:
        return self._csr

    @property
    def max_slice_nnz(self) -> int:
        """Largest row or column nonzero count (drives the per-step read bound)."""
        return max(self.max_row_nnz, self.max_col_nnz)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and values of row ``i`` (sorted by column)."""
        a, b = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[a:b], self._csr.data[a:b]

    def col(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Row indices and values of column ``j`` (sorted by row)."""
        a, b = self._csc.indptr[j], self._csc.indptr[j + 1]
        return self._csc.indices[a:b], self._csc.data[a:b]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """A @ x (full pass; callers account it on the verify counter)."""
        return self._csr @ np.asarray(x, dtype=float)

    def rmatvec(self, w: np.ndarray) -> np.ndarray:
        """w @ A (full pass; callers account it on the verify counter)."""
        return self._csr.T @ np.asarray(w, dtype=float)

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def entry_set(self) -> set:
        """(row, col, value) triples; used to check both layouts agree."""
        coo = self._csr.tocoo()
        return set(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def entry_set_from_columns(self) -> set:
        coo = self._csc.tocoo()
        return set(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def row_sums(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=1)).ravel()


def load_matrix_market(path, entry_bound: float | None = None) -> SparseGameMatrix:
    """Read a Matrix Market coordinate file (real, general) as a game matrix."""
    return SparseGameMatrix(sp.csr_matrix(mmread(path)), entry_bound=entry_bound)
