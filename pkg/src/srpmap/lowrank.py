"""Low-rank truncation of the dense steering matrix (baseline backend).

The complex steering matrix is replaced by its Frobenius-optimal rank-R
approximation, factored as tall (J x R) times fat (R x P(K-1)), so the map
costs two small products instead of one large one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .frontend import FdGcc
from .srp import SrpMatrix


@dataclass(frozen=True)
class LowRankSrp:
    """Rank-R factorization of the steering matrix (complex factors)."""

    tall: np.ndarray
    fat: np.ndarray
    singular_values: np.ndarray

    @property
    def rank(self) -> int:
        return self.tall.shape[1]

    def to_dense(self) -> np.ndarray:
        return self.tall @ self.fat


def truncate_srp_matrix(srp: SrpMatrix, rank: int) -> LowRankSrp:
    """Frobenius-optimal rank-R truncation of the steering matrix."""
    full = min(srp.matrix.shape)
    if not 1 <= rank <= full:
        raise ValueError(f"rank must be in [1, {full}], got {rank}")
    u, s, vt = np.linalg.svd(srp.matrix, full_matrices=False)
    return low_rank_srp_from_svd(u, s, vt, rank)


def low_rank_srp_from_svd(u, s, vt, rank: int) -> LowRankSrp:
    """Assemble a rank-R steering factorization from a precomputed SVD."""
    return LowRankSrp(tall=u[:, :rank] * s[:rank],
                      fat=vt[:rank],
                      singular_values=s[:rank].copy())


def lr_map(lr: LowRankSrp, gcc: FdGcc) -> np.ndarray:
    """Low-rank map 2 Re(tall (fat psi)), length J."""
    if gcc.values.shape != (lr.fat.shape[1],):
        raise DimensionError(
            f"cross-spectrum of shape {gcc.values.shape} does not match factor "
            f"with {lr.fat.shape[1]} columns")
    return 2.0 * (lr.tall @ (lr.fat @ gcc.values)).real
