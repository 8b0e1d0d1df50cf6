"""Microphone-array geometry, candidate grids, and TDOA tables.

Everything in this module is pure construction: the returned objects are
frozen and safe to share across threads.

Conventions
-----------
* Microphone and candidate indices are 0-based everywhere, including in
  exported artifacts (CSV, logs).
* Near-field (NF) candidates are Cartesian points in meters.
* Far-field (FF) candidates are unit incident-direction vectors, i.e. the
  direction of wave travel from the source towards the array.  A grid over
  the lower half-sphere (polar angle 90..180 degrees from the +z zenith)
  therefore corresponds to sources located above the array plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometryError, InvalidGridError

SPEED_OF_SOUND = 340.0
"""Default speed of sound in m/s."""

_AXIS_TOL = 1e-9


@dataclass(frozen=True)
class MicrophoneArray:
    """Microphone positions (M x 3, meters) and the speed of sound."""

    positions: np.ndarray
    speed_of_sound: float = SPEED_OF_SOUND

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidGeometryError(f"positions must be (M, 3), got {pos.shape}")
        if pos.shape[0] < 2:
            raise InvalidGeometryError("need at least 2 microphones")
        diffs = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diffs, axis=-1)
        np.fill_diagonal(dist, np.inf)
        if np.min(dist) <= 0.0:
            raise InvalidGeometryError("microphone positions must be pairwise distinct")
        if not self.speed_of_sound > 0.0:
            raise InvalidGeometryError("speed of sound must be positive")
        object.__setattr__(self, "positions", pos)

    @property
    def num_mics(self) -> int:
        return self.positions.shape[0]

    @property
    def center(self) -> np.ndarray:
        return self.positions.mean(axis=0)

    @property
    def aperture(self) -> float:
        """Largest inter-microphone distance."""
        diffs = self.positions[:, None, :] - self.positions[None, :, :]
        return float(np.linalg.norm(diffs, axis=-1).max())

    @classmethod
    def circular(cls, center, radius: float, count: int,
                 speed_of_sound: float = SPEED_OF_SOUND) -> "MicrophoneArray":
        """Equispaced ring of `count` microphones in the horizontal plane."""
        if radius <= 0.0:
            raise InvalidGeometryError("radius must be positive")
        center = np.asarray(center, dtype=float)
        angles = 2.0 * np.pi * np.arange(count) / count
        pos = np.column_stack([
            center[0] + radius * np.cos(angles),
            center[1] + radius * np.sin(angles),
            np.full(count, center[2]),
        ])
        return cls(pos, speed_of_sound)


@dataclass(frozen=True)
class PairTable:
    """Unique microphone pairs (m, m_prime) with m > m_prime, 0-based.

    Pairs are ordered by (m_prime, m) lexicographically ascending, so the
    ordering is reproducible across runs.
    """

    pairs: np.ndarray       # (P, 2) int
    distances: np.ndarray   # (P,) meters
    num_mics: int

    @property
    def num_pairs(self) -> int:
        return self.pairs.shape[0]


def enumerate_pairs(array: MicrophoneArray) -> PairTable:
    """List all M(M-1)/2 microphone pairs of `array` with their spacings."""
    m_count = array.num_mics
    pairs = [(m, mp) for mp in range(m_count) for m in range(mp + 1, m_count)]
    pairs = np.asarray(pairs, dtype=np.int64)
    dist = np.linalg.norm(
        array.positions[pairs[:, 0]] - array.positions[pairs[:, 1]], axis=1)
    return PairTable(pairs=pairs, distances=dist, num_mics=m_count)


@dataclass(frozen=True)
class CandidateGrid:
    """Candidate locations the acoustic map is evaluated over.

    `points` is (J, 3): positions in meters for mode "nf", unit
    incident-direction vectors for mode "ff".  `axes` holds the per-axis
    sample values used to build the lattice (meters for NF, degrees for FF)
    so exported tables can be reshaped.
    """

    mode: str
    points: np.ndarray
    axes: tuple
    axis_names: tuple

    def __post_init__(self):
        if self.mode not in ("nf", "ff"):
            raise InvalidGridError(f"unknown grid mode {self.mode!r}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise InvalidGridError(f"points must be (J, 3) with J >= 1, got {pts.shape}")
        if self.mode == "ff":
            norms = np.linalg.norm(pts, axis=1)
            if np.max(np.abs(norms - 1.0)) > _AXIS_TOL:
                raise InvalidGridError("far-field candidates must be unit vectors")
        object.__setattr__(self, "points", pts)

    @property
    def num_points(self) -> int:
        return self.points.shape[0]


def _axis_samples(start: float, extent: float, resolution: float) -> np.ndarray:
    # Inclusive lattice: floor(extent / resolution) + 1 samples per axis.
    steps = int(np.floor(extent / resolution + _AXIS_TOL))
    return start + resolution * np.arange(steps + 1)


def build_nf_grid(origin, extents, resolution: float) -> CandidateGrid:
    """Regular volumetric lattice of near-field candidate positions.

    The lattice starts at `origin`, spans `extents` per axis (inclusive
    endpoints) and is enumerated row-major with x fastest.
    """
    origin = np.asarray(origin, dtype=float)
    extents = np.asarray(extents, dtype=float)
    if origin.shape != (3,) or extents.shape != (3,):
        raise InvalidGridError("origin and extents must be 3-vectors")
    if resolution <= 0.0:
        raise InvalidGridError("resolution must be positive")
    if np.any(extents < 0.0):
        raise InvalidGridError("extents must be non-negative")
    xs, ys, zs = (_axis_samples(origin[d], extents[d], resolution) for d in range(3))
    zz, yy, xx = np.meshgrid(zs, ys, xs, indexing="ij")
    points = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])
    return CandidateGrid(mode="nf", points=points, axes=(xs, ys, zs),
                         axis_names=("x", "y", "z"))


def build_ff_grid(resolution_deg: float, polar_deg=(90.0, 180.0),
                  azimuth_deg=(0.0, 360.0)) -> CandidateGrid:
    """Angular lattice of far-field incident directions.

    Polar angle is measured from the +z zenith; the default ranges cover the
    lower half-sphere.  The polar range is sampled with inclusive endpoints;
    a full 360-degree azimuth range excludes the duplicate endpoint.  Poles
    (polar 0 or 180) are emitted once instead of once per azimuth, since all
    azimuths collapse to the same direction there.  Enumeration is row-major
    with azimuth fastest.
    """
    if resolution_deg <= 0.0:
        raise InvalidGridError("resolution must be positive")
    pol_lo, pol_hi = float(polar_deg[0]), float(polar_deg[1])
    az_lo, az_hi = float(azimuth_deg[0]), float(azimuth_deg[1])
    if not (0.0 <= pol_lo <= pol_hi <= 180.0):
        raise InvalidGridError("polar range must lie within [0, 180] degrees")
    for span in (pol_hi - pol_lo, az_hi - az_lo):
        if abs(span / resolution_deg - round(span / resolution_deg)) > _AXIS_TOL:
            raise InvalidGridError("angular resolution must divide the angular ranges")
    polar = pol_lo + resolution_deg * np.arange(round((pol_hi - pol_lo) / resolution_deg) + 1)
    az_steps = round((az_hi - az_lo) / resolution_deg)
    full_circle = abs((az_hi - az_lo) - 360.0) <= _AXIS_TOL
    azimuth = az_lo + resolution_deg * np.arange(az_steps if full_circle else az_steps + 1)
    if azimuth.size == 0:
        raise InvalidGridError("azimuth range is empty")

    points = []
    for pol in polar:
        theta = np.deg2rad(pol)
        if abs(pol) <= _AXIS_TOL or abs(pol - 180.0) <= _AXIS_TOL:
            points.append(np.array([[0.0, 0.0, 1.0 if pol <= 90.0 else -1.0]]))
            continue
        phi = np.deg2rad(azimuth)
        points.append(np.column_stack([
            np.sin(theta) * np.cos(phi),
            np.sin(theta) * np.sin(phi),
            np.full(azimuth.size, np.cos(theta)),
        ]))
    return CandidateGrid(mode="ff", points=np.vstack(points),
                         axes=(polar, azimuth),
                         axis_names=("polar_deg", "azimuth_deg"))


def build_grid(mode: str, **descriptor) -> CandidateGrid:
    """Build a candidate grid from a mode tag and a descriptor.

    NF descriptors: origin, extents, resolution.
    FF descriptors: resolution_deg and optional polar_deg/azimuth_deg ranges.
    """
    if mode == "nf":
        return build_nf_grid(**descriptor)
    if mode == "ff":
        return build_ff_grid(**descriptor)
    raise InvalidGridError(f"unknown grid mode {mode!r}")


@dataclass(frozen=True)
class TdoaTable:
    """Per-candidate, per-pair time differences of arrival (seconds).

    `delta_t[i, p]` is the arrival-time difference of pair p for candidate i;
    `limits[p]` is the physical bound d_p / c that |delta_t| cannot exceed.
    """

    delta_t: np.ndarray   # (J, P)
    limits: np.ndarray    # (P,)

    @property
    def num_candidates(self) -> int:
        return self.delta_t.shape[0]

    @property
    def num_pairs(self) -> int:
        return self.delta_t.shape[1]


def tdoa_table(array: MicrophoneArray, pairs: PairTable,
               grid: CandidateGrid) -> TdoaTable:
    """TDOAs of every candidate for every microphone pair.

    NF uses the range difference |p_m - q| - |p_m' - q| over c; FF uses the
    baseline projection (p_m - p_m')^T q over c, where q is the unit incident
    direction.
    """
    pos = array.positions
    c = array.speed_of_sound
    m, mp = pairs.pairs[:, 0], pairs.pairs[:, 1]
    if grid.mode == "nf":
        dist_m = np.linalg.norm(grid.points[:, None, :] - pos[None, m, :], axis=2)
        dist_mp = np.linalg.norm(grid.points[:, None, :] - pos[None, mp, :], axis=2)
        delta = (dist_m - dist_mp) / c
    else:
        norms = np.linalg.norm(grid.points, axis=1)
        if np.max(np.abs(norms - 1.0)) > _AXIS_TOL:
            raise InvalidGridError("far-field candidates must be unit vectors")
        baselines = pos[m] - pos[mp]
        delta = grid.points @ baselines.T / c
    return TdoaTable(delta_t=delta, limits=pairs.distances / c)
