"""Multiplication-count cost model and approximation/localization metrics.

Cost convention: the reference count for the conventional map is
C = 2 J P (K-1), i.e. the complex matrix-vector product with a factor 2
because only the real part is needed.  All relative complexities divide by
this C.  (Counts reported elsewhere as J P (K-1) correspond to the same
product without the factor 2; the relative numbers below are consistent only
with the factor-2 convention.)

Per-backend counts for a map evaluation:

    conv:  2 J P (K-1)
    lr:    2 J R + 4 R P (K-1)
    si:    J S + C_samp
    slri:  J R + R S + C_samp
    sspi:  Q + C_samp

with S the total number of retained TD GCC lags (P times the mean per pair),
R the truncation rank, Q the kept nonzero count, and the sampling term

    C_samp = 2 S (K-1)            (matrix path)
    C_samp = 8 P K log2(2K)       (iFFT path)

The automatic path picks the iFFT exactly when it is strictly cheaper, which
happens iff S/P > 4 K log2(2K) / (K-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_NF_THRESHOLD = 0.2
"""Near-field localization accuracy threshold in meters."""

DEFAULT_FF_THRESHOLD = math.radians(2.5)
"""Far-field localization accuracy threshold in radians (2.5 degrees)."""

DEFAULT_STEEPNESS = 6.0
"""Steepness of the sigmoid localization-accuracy function."""

METHODS = ("conv", "lr", "si", "slri", "sspi")


@dataclass(frozen=True)
class CostReport:
    """Multiplication count of one backend and its ratio to conventional SRP."""

    method: str
    multiplications: float
    relative: float
    sampling_path: str | None = None
    params: dict = field(default_factory=dict)


def _as_int_if_exact(x: float):
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def sampling_cost(num_pairs: int, num_bins: int, total_samples: float,
                  path: str = "auto") -> tuple[float, str]:
    """Multiplications needed to compute the TD GCC samples, and chosen path."""
    k_half = num_bins + 1
    matrix_cost = 2.0 * total_samples * num_bins
    ifft_cost = 8.0 * num_pairs * k_half * math.log2(2 * k_half)
    if path == "matrix":
        return matrix_cost, "matrix"
    if path == "ifft":
        return ifft_cost, "ifft"
    if path == "auto":
        # iFFT wins only when strictly cheaper.
        if ifft_cost < matrix_cost:
            return ifft_cost, "ifft"
        return matrix_cost, "matrix"
    raise ValueError(f"unknown sampling path {path!r}")


def cost(method: str, *, num_candidates: int, num_pairs: int, num_bins: int,
         total_samples: float | None = None, mean_samples: float | None = None,
         rank: int | None = None, keep: int | None = None,
         path: str = "auto") -> CostReport:
    """Multiplication count of one map evaluation for the given backend.

    The sampling-based backends need the retained lag count, either as
    `total_samples` (sum over pairs, exact) or `mean_samples` (per-pair
    average, as reported in scenario tables).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    base = 2 * num_candidates * num_pairs * num_bins
    chosen_path = None
    if method == "conv":
        total = float(base)
    elif method == "lr":
        if rank is None:
            raise ValueError("lr cost needs a rank")
        total = 2.0 * num_candidates * rank + 4.0 * rank * num_pairs * num_bins
    else:
        if total_samples is None:
            if mean_samples is None:
                raise ValueError(f"{method} cost needs total_samples or mean_samples")
            total_samples = mean_samples * num_pairs
        samp, chosen_path = sampling_cost(num_pairs, num_bins, total_samples, path)
        if method == "si":
            total = num_candidates * total_samples + samp
        elif method == "slri":
            if rank is None:
                raise ValueError("slri cost needs a rank")
            total = num_candidates * rank + rank * total_samples + samp
        else:
            if keep is None:
                raise ValueError("sspi cost needs a keep count")
            total = keep + samp
    return CostReport(method=method,
                      multiplications=_as_int_if_exact(float(total)),
                      relative=float(total) / base,
                      sampling_path=chosen_path,
                      params={"num_candidates": num_candidates,
                              "num_pairs": num_pairs, "num_bins": num_bins,
                              "total_samples": total_samples, "rank": rank,
                              "keep": keep})


def _relative_error_db(diff_sq: float, ref_sq: float) -> float:
    if ref_sq == 0.0:
        raise ValueError("reference has zero norm; relative error undefined")
    if diff_sq == 0.0:
        return -math.inf
    return 10.0 * math.log10(diff_sq / ref_sq)


def matrix_error(approx: np.ndarray, reference: np.ndarray) -> float:
    """Relative Frobenius error in dB; -inf when the matrices are equal."""
    approx = np.asarray(approx)
    reference = np.asarray(reference)
    if approx.shape != reference.shape:
        raise ValueError(f"shape mismatch {approx.shape} vs {reference.shape}")
    diff_sq = float(np.sum(np.abs(approx - reference) ** 2))
    ref_sq = float(np.sum(np.abs(reference) ** 2))
    return _relative_error_db(diff_sq, ref_sq)


def map_error(z_approx: np.ndarray, z_reference: np.ndarray) -> float:
    """Relative squared-norm map error in dB; -inf when the maps are equal."""
    return matrix_error(z_approx, z_reference)


def error_db_from_singular_values(singular_values: np.ndarray, rank: int) -> float:
    """Truncation error of an optimal rank-R approximation, from the spectrum.

    Equals 10 log10(sum_{i>R} s_i^2 / sum_i s_i^2) for a non-increasing
    spectrum; -inf when nothing is discarded.
    """
    s = np.asarray(singular_values, dtype=float)
    total = float(np.sum(s ** 2))
    tail = float(np.sum(s[rank:] ** 2))
    return _relative_error_db(tail, total)


def loc_error(estimate: np.ndarray, truth: np.ndarray, mode: str) -> float:
    """Localization error: meters (NF) or radians between directions (FF)."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if mode == "nf":
        return float(np.linalg.norm(estimate - truth))
    if mode == "ff":
        return float(math.acos(min(1.0, max(-1.0, float(estimate @ truth)))))
    raise ValueError(f"unknown mode {mode!r}")


def loc_accuracy(error: float, threshold: float,
                 steepness: float = DEFAULT_STEEPNESS) -> float:
    """Sigmoid accuracy score in (0, 1); 0.5 exactly at the threshold."""
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    arg = steepness * (error - threshold) / threshold
    arg = min(700.0, max(-700.0, arg))
    return 1.0 / (1.0 + math.exp(arg))


@dataclass(frozen=True)
class LocResult:
    """Argmax-based source estimate with its error and accuracy score."""

    index: int
    location: np.ndarray
    error: float
    accuracy: float


def score_location(z: np.ndarray, grid, truth: np.ndarray,
                   threshold: float | None = None,
                   steepness: float = DEFAULT_STEEPNESS) -> LocResult:
    """Locate the map maximum and score it against the true source."""
    from .srp import locate

    index, location = locate(z, grid)
    if threshold is None:
        threshold = DEFAULT_NF_THRESHOLD if grid.mode == "nf" else DEFAULT_FF_THRESHOLD
    err = loc_error(location, truth, grid.mode)
    return LocResult(index=index, location=location, error=err,
                     accuracy=loc_accuracy(err, threshold, steepness))
