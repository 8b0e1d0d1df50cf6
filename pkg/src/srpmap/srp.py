"""Conventional SRP: dense steering transform, full map, and argmax location.

The transform stacks one J x (K-1) phase block per microphone pair; applied
to the stacked cross-spectra it yields the map z = 2 Re(H psi), equal to the
sum of time-domain GCCs evaluated at every candidate TDOA.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError
from .frontend import FdGcc, FrameSpec
from .scene import CandidateGrid, TdoaTable

DEFAULT_MATRIX_CAP_BYTES = 2 * 1024 ** 3
"""Refuse to materialize dense operators larger than this."""


@dataclass(frozen=True)
class SrpMatrix:
    """Dense steering matrix, J x P(K-1) complex with unit-magnitude entries."""

    matrix: np.ndarray
    num_pairs: int
    num_bins: int

    @property
    def num_candidates(self) -> int:
        return self.matrix.shape[0]

    def pair_block(self, p: int) -> np.ndarray:
        return self.matrix[:, p * self.num_bins:(p + 1) * self.num_bins]


def srp_matrix_shape(tdoa: TdoaTable, frame: FrameSpec) -> tuple[int, int]:
    return tdoa.num_candidates, tdoa.num_pairs * frame.num_bins


def check_capacity(shape: tuple[int, int], itemsize: int, max_bytes: int,
                   what: str) -> None:
    need = shape[0] * shape[1] * itemsize
    if need > max_bytes:
        raise CapacityError(
            f"{what} of shape {shape} needs {need / 1e9:.2f} GB, "
            f"above the cap of {max_bytes / 1e9:.2f} GB")


def build_srp_matrix(tdoa: TdoaTable, frame: FrameSpec,
                     max_bytes: int = DEFAULT_MATRIX_CAP_BYTES) -> SrpMatrix:
    """Steering phases exp(j w_k dt_p(i)) for all candidates, pairs, and bins."""
    shape = srp_matrix_shape(tdoa, frame)
    check_capacity(shape, 16, max_bytes, "SRP matrix")
    bins = frame.num_bins
    freqs = frame.bin_freqs
    out = np.empty(shape, dtype=np.complex128)
    for p in range(tdoa.num_pairs):
        np.exp(1j * tdoa.delta_t[:, p:p + 1] * freqs[None, :],
               out=out[:, p * bins:(p + 1) * bins])
    return SrpMatrix(matrix=out, num_pairs=tdoa.num_pairs, num_bins=bins)


def srp_map_exact(srp: SrpMatrix, gcc: FdGcc) -> np.ndarray:
    """Conventional SRP map z = 2 Re(H psi), length J."""
    if (gcc.num_pairs, gcc.num_bins) != (srp.num_pairs, srp.num_bins):
        raise DimensionError(
            f"cross-spectra for {gcc.num_pairs} pairs x {gcc.num_bins} bins "
            f"do not match a {srp.num_pairs} x {srp.num_bins} transform")
    return 2.0 * (srp.matrix @ gcc.values).real


def locate(z: np.ndarray, grid: CandidateGrid) -> tuple[int, np.ndarray]:
    """Index and coordinates of the map maximum; ties go to the lowest index."""
    z = np.asarray(z)
    if z.shape != (grid.num_points,):
        raise DimensionError(
            f"map of length {z.shape} does not match grid with {grid.num_points} points")
    i_max = int(np.argmax(z))
    return i_max, grid.points[i_max].copy()
