"""Critical sampling of time-domain GCCs, plus two-sided helper builders.

Each pair's TD GCC is sampled at lags n T for n in {-N_p, ..., N_p}, where
N_p = floor(limit_p / T) + n_aux covers the physical TDOA interval plus a few
auxiliary points.  The samples can be computed two ways: a per-pair
matrix-vector product with the single-sided sampling blocks, or an inverse
FFT of the two-sided spectrum followed by index selection.  Both agree to
rounding error; the iFFT path is the cheap one for realistic frame sizes.

Normalization: the inverse transform used here is UNNORMALIZED, i.e.
xi(nT) = sum_k psi(w_k) e^{j pi k n / K} with no 1/2K factor.  NumPy's
`ifft`/`irfft` include 1/2K, so results from those routines are scaled by 2K
before use.  Keep this in mind when comparing against other libraries.

Lag-index layout: sample vectors are stored circularly, index
n mod (2 N_p + 1), so lags 0..N_p come first, then -N_p..-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .frontend import FdGcc, FrameSpec
from .scene import TdoaTable
from .srp import DEFAULT_MATRIX_CAP_BYTES, check_capacity


@dataclass(frozen=True)
class SampleSpec:
    """Per-pair one-sided sample counts N_p and the frame half-length K."""

    counts: np.ndarray   # (P,) int
    n_aux: int
    half_len: int

    @property
    def num_pairs(self) -> int:
        return self.counts.shape[0]

    @property
    def samples_per_pair(self) -> np.ndarray:
        """2 N_p + 1 retained lags per pair."""
        return 2 * self.counts + 1

    @property
    def total_samples(self) -> int:
        return int(np.sum(self.samples_per_pair))

    @property
    def mean_samples(self) -> float:
        """Average number of retained lags per pair."""
        return self.total_samples / self.num_pairs

    @property
    def offsets(self) -> np.ndarray:
        """Start offset of each pair's block in the stacked sample vector."""
        return np.concatenate([[0], np.cumsum(self.samples_per_pair)])

    def lag_indices(self, p: int) -> np.ndarray:
        """Signed lags of pair p in storage order: 0..N_p, then -N_p..-1."""
        c = int(self.counts[p])
        return np.concatenate([np.arange(c + 1), np.arange(-c, 0)])


def sample_spec(tdoa: TdoaTable, frame: FrameSpec, n_aux: int = 2) -> SampleSpec:
    """Sample counts N_p = floor(limit_p / T) + n_aux for every pair.

    Raises ConfigError if any pair would need more lags than one frame
    provides (2 N_p + 1 must not exceed the frame length, which should in
    practice well exceed twice the largest TDOA limit).
    """
    if n_aux < 0:
        raise ConfigError("n_aux must be non-negative")
    counts = np.floor(tdoa.limits / frame.sample_period).astype(np.int64) + n_aux
    worst = int(np.argmax(counts))
    if 2 * counts[worst] + 1 > frame.frame_len:
        raise ConfigError(
            f"frame length {frame.frame_len} too short: pair {worst} needs "
            f"{2 * counts[worst] + 1} lag samples; use a longer frame or fewer "
            f"auxiliary samples")
    return SampleSpec(counts=counts, n_aux=n_aux, half_len=frame.half_len)


@dataclass(frozen=True)
class TdGccSamples:
    """Stacked real TD GCC samples, one block of 2 N_p + 1 lags per pair."""

    values: np.ndarray
    spec: SampleSpec

    def per_pair(self, p: int) -> np.ndarray:
        off = self.spec.offsets
        return self.values[off[p]:off[p + 1]]


def _check_gcc(gcc: FdGcc, spec: SampleSpec) -> None:
    if gcc.num_pairs != spec.num_pairs or gcc.num_bins != spec.half_len - 1:
        raise DimensionError(
            f"cross-spectra ({gcc.num_pairs} pairs x {gcc.num_bins} bins) do not "
            f"match sampling for {spec.num_pairs} pairs at K={spec.half_len}")


def td_gcc_samples(gcc: FdGcc, spec: SampleSpec, path: str = "ifft") -> TdGccSamples:
    """TD GCC samples of every pair, via "matrix" or "ifft" path.

    Matrix path: xi_p = 2 Re(S_p psi_p) with on-the-fly phase blocks.
    iFFT path: unnormalized inverse FFT of the two-sided spectrum, then
    selection of the 2 N_p + 1 retained lags at indices n mod 2K.
    """
    _check_gcc(gcc, spec)
    if path not in ("matrix", "ifft"):
        raise ValueError(f"unknown sampling path {path!r}")
    k_half = spec.half_len
    per_pair = gcc.per_pair()
    out = np.empty(spec.total_samples)
    off = spec.offsets
    for p in range(spec.num_pairs):
        if path == "matrix":
            lags = spec.lag_indices(p)
            k = np.arange(1, k_half)
            phases = np.exp(1j * np.pi * np.outer(lags, k) / k_half)
            out[off[p]:off[p + 1]] = 2.0 * (phases @ per_pair[p]).real
        else:
            half = np.zeros(k_half + 1, dtype=np.complex128)
            half[1:k_half] = per_pair[p]
            full = np.fft.irfft(half, n=2 * k_half) * (2 * k_half)
            c = int(spec.counts[p])
            sel = np.concatenate([np.arange(c + 1),
                                  np.arange(2 * k_half - c, 2 * k_half)])
            out[off[p]:off[p + 1]] = full[sel]
    return TdGccSamples(values=out, spec=spec)


def two_sided_gcc(gcc: FdGcc) -> np.ndarray:
    """Two-sided stacked spectrum of length P * 2K.

    Per pair, bins are laid out circularly at index k mod 2K for
    k = -K+1..K; negative bins carry the conjugates of positive bins, and
    bins 0 and K are zero.
    """
    k_half = gcc.num_bins + 1
    per_pair = gcc.per_pair()
    out = np.zeros((gcc.num_pairs, 2 * k_half), dtype=np.complex128)
    out[:, 1:k_half] = per_pair
    out[:, k_half + 1:] = np.conj(per_pair[:, ::-1])
    return out.ravel()


def _signed_bins(k_half: int) -> np.ndarray:
    """Signed bin numbers in circular storage order 0..K, -K+1..-1."""
    k = np.arange(2 * k_half)
    return np.where(k <= k_half, k, k - 2 * k_half)


def two_sided_srp_matrix(tdoa: TdoaTable, frame: FrameSpec,
                         max_bytes: int = DEFAULT_MATRIX_CAP_BYTES) -> np.ndarray:
    """Two-sided steering matrix (J x P*2K) with z = Hbar psibar."""
    k_half = frame.half_len
    shape = (tdoa.num_candidates, tdoa.num_pairs * 2 * k_half)
    check_capacity(shape, 16, max_bytes, "two-sided SRP matrix")
    freqs = _signed_bins(k_half) * frame.bandlimit / k_half
    out = np.empty(shape, dtype=np.complex128)
    for p in range(tdoa.num_pairs):
        np.exp(1j * tdoa.delta_t[:, p:p + 1] * freqs[None, :],
               out=out[:, p * 2 * k_half:(p + 1) * 2 * k_half])
    return out


def two_sided_map(tdoa: TdoaTable, frame: FrameSpec, gcc: FdGcc,
                  max_bytes: int = DEFAULT_MATRIX_CAP_BYTES) -> np.ndarray:
    """SRP map computed from the two-sided formulation, z = Hbar psibar."""
    product = two_sided_srp_matrix(tdoa, frame, max_bytes) @ two_sided_gcc(gcc)
    return product.real


def dense_sampling_matrix(spec: SampleSpec,
                          max_bytes: int = DEFAULT_MATRIX_CAP_BYTES) -> np.ndarray:
    """Dense block-diagonal single-sided sampling matrix (test use only).

    The runtime paths never materialize this; it exists to validate the
    matrix form and for small-scale factored products.
    """
    k_half = spec.half_len
    bins = k_half - 1
    shape = (spec.total_samples, spec.num_pairs * bins)
    check_capacity(shape, 16, max_bytes, "dense sampling matrix")
    out = np.zeros(shape, dtype=np.complex128)
    off = spec.offsets
    k = np.arange(1, k_half)
    for p in range(spec.num_pairs):
        lags = spec.lag_indices(p)
        block = np.exp(1j * np.pi * np.outer(lags, k) / k_half)
        out[off[p]:off[p + 1], p * bins:(p + 1) * bins] = block
    return out


def two_sided_sampling_matrix(spec: SampleSpec,
                              max_bytes: int = DEFAULT_MATRIX_CAP_BYTES) -> np.ndarray:
    """Dense block-diagonal two-sided sampling matrix Sbar (test use only).

    Rows are rows of the unnormalized 2K inverse-DFT matrix at indices
    n mod 2K, hence Sbar Sbar^H = 2K I.
    """
    k_half = spec.half_len
    shape = (spec.total_samples, spec.num_pairs * 2 * k_half)
    check_capacity(shape, 16, max_bytes, "dense two-sided sampling matrix")
    out = np.zeros(shape, dtype=np.complex128)
    off = spec.offsets
    k = np.arange(2 * k_half)
    for p in range(spec.num_pairs):
        lags = spec.lag_indices(p)
        block = np.exp(1j * np.pi * np.outer(lags, k) / k_half)
        out[off[p]:off[p + 1], p * 2 * k_half:(p + 1) * 2 * k_half] = block
    return out
