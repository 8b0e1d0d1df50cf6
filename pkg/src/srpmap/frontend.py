"""STFT framing and frequency-domain cross-correlation (GCC) with PHAT.

A frame of 2K samples per channel is windowed and transformed with a
length-2K DFT, giving bins 0..K.  The cross-spectra of all microphone pairs
at bins 1..K-1 (bin 0 and the Nyquist bin K are dropped) are stacked
pair-major into a single vector, the runtime input of all map backends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .errors import DimensionError
from .scene import PairTable

PHAT_FLOOR_SCALE = 1e-12
"""Default PHAT regularization floor as a fraction of the frame energy."""


@dataclass(frozen=True)
class FrameSpec:
    """Framing parameters: frame length 2K, sample rate, hop, window.

    The window is a square-root Hann by default; "rect" is a test hook.
    Hop defaults to half the frame length (50% overlap).
    """

    frame_len: int
    sample_rate: float
    hop: int = 0
    window: str = "sqrt_hann"

    def __post_init__(self):
        if self.frame_len < 4 or self.frame_len % 2 != 0:
            raise ValueError("frame_len must be even and >= 4")
        if not self.sample_rate > 0.0:
            raise ValueError("sample_rate must be positive")
        if self.hop == 0:
            object.__setattr__(self, "hop", self.frame_len // 2)
        if self.hop < 1:
            raise ValueError("hop must be >= 1")
        if self.window not in ("sqrt_hann", "rect"):
            raise ValueError(f"unknown window {self.window!r}")

    @property
    def half_len(self) -> int:
        """K: half the frame length."""
        return self.frame_len // 2

    @property
    def num_bins(self) -> int:
        """Number of usable single-sided bins, K - 1."""
        return self.half_len - 1

    @property
    def sample_period(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def bandlimit(self) -> float:
        """Angular bandlimit pi / T in rad/s."""
        return np.pi * self.sample_rate

    @property
    def bin_freqs(self) -> np.ndarray:
        """Angular frequencies of bins k = 1..K-1: k * pi / (K T)."""
        k = np.arange(1, self.half_len)
        return k * self.bandlimit / self.half_len


def frame_window(spec: FrameSpec) -> np.ndarray:
    if spec.window == "rect":
        return np.ones(spec.frame_len)
    # periodic sqrt-Hann: sqrt(sin^2(pi n / 2K)) = sin(pi n / 2K)
    n = np.arange(spec.frame_len)
    return np.sin(np.pi * n / spec.frame_len)


def num_frames(spec: FrameSpec, num_samples: int) -> int:
    """Number of complete frames available in a signal of given length."""
    if num_samples < spec.frame_len:
        return 0
    return (num_samples - spec.frame_len) // spec.hop + 1


def stft_frame(samples: np.ndarray, spec: FrameSpec, frame_index: int) -> np.ndarray:
    """Windowed DFT of one frame of a multichannel signal.

    Args:
        samples: (channels, num_samples) real array.
        spec: framing parameters.
        frame_index: 0-based frame number; frame f covers samples
            [f * hop, f * hop + frame_len).

    Returns:
        (channels, K + 1) complex spectra at bins 0..K.
    """
    samples = np.atleast_2d(np.asarray(samples))
    start = frame_index * spec.hop
    if frame_index < 0 or start + spec.frame_len > samples.shape[1]:
        raise IndexError(
            f"frame {frame_index} out of range for {samples.shape[1]} samples")
    segment = samples[:, start:start + spec.frame_len]
    return np.fft.rfft(segment * frame_window(spec)[None, :], axis=1)


@dataclass(frozen=True)
class FdGcc:
    """Stacked single-sided cross-spectra of all pairs at bins 1..K-1.

    `values` has length P * (K - 1), pair-major (all bins of pair 0 first).
    """

    values: np.ndarray
    num_pairs: int
    num_bins: int
    weighting: str

    def per_pair(self) -> np.ndarray:
        """(P, K-1) view of the stacked vector."""
        return self.values.reshape(self.num_pairs, self.num_bins)


def fd_gcc(spectra: np.ndarray, pairs: PairTable, weighting: str = "phat",
           floor: float | None = None) -> FdGcc:
    """Frequency-domain GCC of all microphone pairs for one frame.

    For each pair (m, m') the raw cross-spectrum is y_m(w) y_m'*(w).  With
    PHAT weighting every bin is normalized to unit magnitude; bins whose raw
    magnitude falls below the regularization floor come out with magnitude
    below one (exactly zero for zero input).  Bin 0 and the Nyquist bin are
    discarded.

    Args:
        spectra: (M, K+1) output of `stft_frame`.
        pairs: pair enumeration of the same array.
        weighting: "phat" or "none".
        floor: PHAT denominator floor; default 1e-12 times the frame energy.
    """
    spectra = np.asarray(spectra)
    if spectra.ndim != 2 or spectra.shape[0] != pairs.num_mics:
        raise DimensionError(
            f"expected spectra for {pairs.num_mics} channels, got {spectra.shape}")
    if weighting not in ("phat", "none"):
        raise ValueError(f"unknown weighting {weighting!r}")
    num_bins = spectra.shape[1] - 2
    if num_bins < 1:
        raise DimensionError("spectra must cover at least bins 0..2")
    m, mp = pairs.pairs[:, 0], pairs.pairs[:, 1]
    raw = spectra[m, 1:-1] * np.conj(spectra[mp, 1:-1])
    if weighting == "phat":
        if floor is None:
            floor = PHAT_FLOOR_SCALE * float(np.sum(np.abs(spectra) ** 2))
        denom = np.maximum(np.abs(raw), floor)
        raw = np.divide(raw, denom, out=np.zeros_like(raw), where=denom > 0.0)
    return FdGcc(values=raw.ravel(), num_pairs=pairs.num_pairs,
                 num_bins=num_bins, weighting=weighting)


def load_audio(path: str, sample_rate: float | None = None,
               channels: int | None = None) -> tuple[np.ndarray, float]:
    """Load a multichannel recording as (channels, num_samples) float64.

    WAV files (16-bit PCM or 32-bit float) carry their own sample rate;
    headerless ".f32" files are interleaved little-endian float32 and require
    `sample_rate` and `channels`.  16-bit PCM is scaled to [-1, 1).
    """
    path = str(path)
    if path.endswith(".f32") or path.endswith(".raw"):
        if sample_rate is None or channels is None:
            raise ValueError("raw float32 input needs sample_rate and channels")
        flat = np.fromfile(path, dtype="<f4").astype(np.float64)
        if flat.size % channels != 0:
            raise ValueError(f"raw file length not divisible by {channels} channels")
        return flat.reshape(-1, channels).T, float(sample_rate)
    rate, data = wavfile.read(path)
    if data.dtype == np.int16:
        data = data.astype(np.float64) / 32768.0
    else:
        data = data.astype(np.float64)
    if data.ndim == 1:
        data = data[:, None]
    return data.T, float(rate)
