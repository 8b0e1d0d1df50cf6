"""Sinc interpolation of sampled TD GCCs onto candidate TDOAs.

The dense interpolation operator has one J x (2 N_p + 1) block per pair with
entries sinc(dt_p(i) / T - n) (normalized sinc), columns in the same circular
lag order as the sample vectors.  Two cheaper stand-ins are provided: an
optimal fixed-rank truncation (SVD) and an optimal fixed-cardinality sparse
truncation (globally largest magnitudes).

Map evaluation streams rows through one shared reduction kernel.  This keeps
the keep-everything sparse operator bit-for-bit identical to the dense
product, not just close.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .frontend import FrameSpec
from .sampling import SampleSpec, TdGccSamples
from .scene import TdoaTable
from .srp import DEFAULT_MATRIX_CAP_BYTES, check_capacity


@dataclass(frozen=True)
class InterpMatrix:
    """Dense sinc interpolation operator, J x total_samples, real."""

    matrix: np.ndarray
    spec: SampleSpec

    @property
    def num_candidates(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_samples(self) -> int:
        return self.matrix.shape[1]

    def pair_block(self, p: int) -> np.ndarray:
        off = self.spec.offsets
        return self.matrix[:, off[p]:off[p + 1]]


@dataclass(frozen=True)
class LowRankInterp:
    """Rank-R factorization of the interpolation operator.

    tall is J x R (left singular vectors scaled by the retained singular
    values), fat is R x total_samples; their product is the Frobenius-optimal
    rank-R approximation.
    """

    tall: np.ndarray
    fat: np.ndarray
    singular_values: np.ndarray

    @property
    def rank(self) -> int:
        return self.tall.shape[1]

    def to_dense(self) -> np.ndarray:
        return self.tall @ self.fat


@dataclass(frozen=True)
class SparseInterp:
    """Row-compressed sparse truncation of the interpolation operator."""

    values: np.ndarray        # (Q,) nonzeros, row-major
    col_indices: np.ndarray   # (Q,) int64
    row_splits: np.ndarray    # (J + 1,) int64
    num_cols: int

    @property
    def num_rows(self) -> int:
        return self.row_splits.shape[0] - 1

    @property
    def num_kept(self) -> int:
        return self.values.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.num_rows, self.num_cols))
        rows = np.repeat(np.arange(self.num_rows),
                         np.diff(self.row_splits))
        out[rows, self.col_indices] = self.values
        return out


def build_interp_matrix(tdoa: TdoaTable, spec: SampleSpec, frame: FrameSpec,
                        max_bytes: int = DEFAULT_MATRIX_CAP_BYTES) -> InterpMatrix:
    """Sinc weights from every retained lag to every candidate TDOA."""
    if tdoa.num_pairs != spec.num_pairs:
        raise DimensionError("TDOA table and sample spec disagree on pair count")
    shape = (tdoa.num_candidates, spec.total_samples)
    check_capacity(shape, 8, max_bytes, "interpolation matrix")
    out = np.empty(shape)
    off = spec.offsets
    for p in range(spec.num_pairs):
        frac = tdoa.delta_t[:, p] / frame.sample_period
        out[:, off[p]:off[p + 1]] = np.sinc(frac[:, None] - spec.lag_indices(p)[None, :])
    return InterpMatrix(matrix=out, spec=spec)


def _sample_values(samples) -> np.ndarray:
    return samples.values if isinstance(samples, TdGccSamples) else np.asarray(samples)


def _dot_rows(matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Row-streamed reduction; must stay in lockstep with _dot_sparse_rows so
    # a keep-all sparse operator reproduces the dense map bit-exactly.
    out = np.empty(matrix.shape[0])
    for i in range(matrix.shape[0]):
        out[i] = np.dot(matrix[i], x)
    return out


def _dot_sparse_rows(values, cols, splits, x) -> np.ndarray:
    out = np.empty(splits.shape[0] - 1)
    for i in range(out.shape[0]):
        lo, hi = splits[i], splits[i + 1]
        out[i] = np.dot(values[lo:hi], x[cols[lo:hi]])
    return out


def si_map(interp: InterpMatrix, samples) -> np.ndarray:
    """Sampling + interpolation map: dense product of operator and samples."""
    x = _sample_values(samples)
    if x.shape != (interp.num_samples,):
        raise DimensionError(
            f"sample vector of shape {x.shape} does not match operator with "
            f"{interp.num_samples} columns")
    return _dot_rows(interp.matrix, x)


def truncate_low_rank(interp: InterpMatrix, rank: int) -> LowRankInterp:
    """Frobenius-optimal rank-R truncation via the SVD."""
    full = min(interp.matrix.shape)
    if not 1 <= rank <= full:
        raise ValueError(f"rank must be in [1, {full}], got {rank}")
    u, s, vt = np.linalg.svd(interp.matrix, full_matrices=False)
    return low_rank_interp_from_svd(u, s, vt, rank)


def low_rank_interp_from_svd(u, s, vt, rank: int) -> LowRankInterp:
    """Assemble a rank-R interpolation factorization from a precomputed SVD."""
    return LowRankInterp(tall=u[:, :rank] * s[:rank],
                         fat=vt[:rank],
                         singular_values=s[:rank].copy())


def truncate_sparse(interp: InterpMatrix, keep: int) -> SparseInterp:
    """Keep the `keep` largest-magnitude entries, zero the rest.

    Selection is global over the whole operator, not per row.  Ties are
    broken deterministically in row-major order (lower row first, then lower
    column).
    """
    mat = interp.matrix
    size = mat.size
    if not 0 <= keep <= size:
        raise ValueError(f"keep must be in [0, {size}], got {keep}")
    flat_mag = np.abs(mat).ravel()
    # Stable sort on descending magnitude preserves row-major order at ties.
    order = np.argsort(-flat_mag, kind="stable")[:keep]
    sel = np.sort(order)
    rows = sel // mat.shape[1]
    cols = sel % mat.shape[1]
    splits = np.zeros(mat.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=mat.shape[0]), out=splits[1:])
    return SparseInterp(values=mat.ravel()[sel], col_indices=cols.astype(np.int64),
                        row_splits=splits, num_cols=mat.shape[1])


def slri_map(lr: LowRankInterp, samples) -> np.ndarray:
    """Low-rank interpolation map: two cascaded real matrix-vector products."""
    x = _sample_values(samples)
    if x.shape != (lr.fat.shape[1],):
        raise DimensionError(
            f"sample vector of shape {x.shape} does not match factor with "
            f"{lr.fat.shape[1]} columns")
    return lr.tall @ (lr.fat @ x)


def sspi_map(sp: SparseInterp, samples) -> np.ndarray:
    """Sparse interpolation map: row-compressed sparse product."""
    x = _sample_values(samples)
    if x.shape != (sp.num_cols,):
        raise DimensionError(
            f"sample vector of shape {x.shape} does not match operator with "
            f"{sp.num_cols} columns")
    return _dot_sparse_rows(sp.values, sp.col_indices, sp.row_splits, x)
