"""Synthetic scenario generation: source placement, room rendering, noise.

Rendering is deterministic for a given configuration, source position, and
placement index: the generator is seeded from (seed, placement index), so
repeated runs are bit-identical.

The direct path is rendered with a 64-tap windowed-sinc fractional-delay
filter and 1/r amplitude.  Reflections come from the classical image method
for shoebox rooms, limited to a configurable total order with per-wall
absorption.  Noise is independent per channel and scaled so the mix hits the
configured SNR relative to the direct-path power exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .frontend import FrameSpec, load_audio
from .scene import CandidateGrid, MicrophoneArray

DELAY_FILTER_TAPS = 64

MIN_FF_RANGE = 2.0
"""Far-field sources must be at least this far from the array center."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to render random source placements in one room."""

    mode: str                      # "nf" | "ff"
    room: np.ndarray               # (3,) meters
    array: MicrophoneArray
    grid: CandidateGrid
    sample_rate: float
    source: str = "pink"           # "pink" or a path to a mono WAV file
    reflection_order: int = 0      # 0 = anechoic
    absorption: float = 0.5        # scalar or (6,) per wall: x lo/hi, y lo/hi, z lo/hi
    snr_db: float = math.inf
    num_placements: int = 1
    frames_per_placement: int = 1
    seed: int = 0
    placement: str = "random"      # "random" | "on_grid"
    ff_range: tuple = (2.5, 3.0)   # source distance range from array center (FF)

    def __post_init__(self):
        if self.mode not in ("nf", "ff"):
            raise ConfigError(f"unknown scenario mode {self.mode!r}")
        room = np.asarray(self.room, dtype=float)
        if room.shape != (3,) or np.any(room <= 0.0):
            raise ConfigError("room must be three positive dimensions")
        object.__setattr__(self, "room", room)
        if self.mode != self.grid.mode:
            raise ConfigError("scenario mode and grid mode disagree")
        if self.placement not in ("random", "on_grid"):
            raise ConfigError(f"unknown placement policy {self.placement!r}")
        if self.mode == "ff":
            lo, hi = self.ff_range
            if not (MIN_FF_RANGE <= lo <= hi):
                raise ConfigError(
                    f"far-field source range must start at >= {MIN_FF_RANGE} m")
        if self.num_placements < 1 or self.frames_per_placement < 1:
            raise ConfigError("need at least one placement and one frame")
        if self.reflection_order < 0:
            raise ConfigError("reflection order must be >= 0")
        absorp = np.broadcast_to(np.asarray(self.absorption, dtype=float), (6,)).copy()
        if np.any(absorp < 0.0) or np.any(absorp > 1.0):
            raise ConfigError("absorption must lie in [0, 1]")
        object.__setattr__(self, "absorption", absorp)


def _inside_room(point: np.ndarray, room: np.ndarray, margin: float = 1e-6) -> bool:
    return bool(np.all(point > margin) and np.all(point < room - margin))


def place_sources(cfg: ScenarioConfig) -> np.ndarray:
    """Random true source positions, (num_placements, 3), seeded by the config.

    NF positions are confined to the box spanned by the search grid.  FF
    positions lie along grid (or random lower half-sphere) incident
    directions at a distance of at least 2 m from the array center; the
    incident direction points from the source towards the array.
    """
    rng = np.random.default_rng([cfg.seed, 0])
    out = np.empty((cfg.num_placements, 3))
    if cfg.mode == "nf":
        pts = cfg.grid.points
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        if not (_inside_room(lo, cfg.room) and _inside_room(hi, cfg.room)):
            raise ConfigError("search grid extends outside the room")
        for i in range(cfg.num_placements):
            if cfg.placement == "on_grid":
                out[i] = pts[rng.integers(len(pts))]
            else:
                out[i] = rng.uniform(lo, hi)
        return out
    center = cfg.array.center
    lo_r, hi_r = cfg.ff_range
    for i in range(cfg.num_placements):
        for _ in range(1000):
            if cfg.placement == "on_grid":
                direction = cfg.grid.points[rng.integers(len(cfg.grid.points))]
            else:
                # uniform direction over the grid's polar cap
                polar = np.deg2rad(rng.uniform(cfg.grid.axes[0][0], cfg.grid.axes[0][-1]))
                azimuth = rng.uniform(0.0, 2.0 * np.pi)
                direction = np.array([np.sin(polar) * np.cos(azimuth),
                                      np.sin(polar) * np.sin(azimuth),
                                      np.cos(polar)])
            radius = rng.uniform(lo_r, hi_r)
            candidate = center - radius * direction
            if _inside_room(candidate, cfg.room):
                out[i] = candidate
                break
        else:
            raise ConfigError(
                "could not place a far-field source inside the room; "
                "check room size, array center, and ff_range")
    return out


def incident_direction(cfg: ScenarioConfig, source: np.ndarray) -> np.ndarray:
    """Unit direction of wave travel from `source` towards the array center."""
    d = cfg.array.center - np.asarray(source, dtype=float)
    return d / np.linalg.norm(d)


def true_location(cfg: ScenarioConfig, source: np.ndarray) -> np.ndarray:
    """Ground truth in grid coordinates: position (NF) or direction (FF)."""
    return np.asarray(source, dtype=float) if cfg.mode == "nf" \
        else incident_direction(cfg, source)


def fractional_delay_kernel(frac: float, taps: int = DELAY_FILTER_TAPS) -> np.ndarray:
    """Windowed-sinc interpolation kernel delaying by (taps/2 - 1 + frac).

    The Hann window is centered on the sinc peak, so the kernel stays
    symmetric around the fractional delay and the group delay is flat well
    below Nyquist.
    """
    u = np.arange(taps) - (taps // 2 - 1) - frac
    window = 0.5 * (1.0 + np.cos(np.pi * u / (taps // 2)))
    window[np.abs(u) >= taps // 2] = 0.0
    return np.sinc(u) * window


def pink_noise(rng: np.random.Generator, num_samples: int) -> np.ndarray:
    """Unit-variance pink (1/f power) noise; speech-shaped stand-in."""
    white = rng.standard_normal(num_samples)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(num_samples)
    spectrum[0] = 0.0
    spectrum[1:] /= np.sqrt(freqs[1:])
    out = np.fft.irfft(spectrum, n=num_samples)
    return out / np.std(out)


def image_sources(source: np.ndarray, room: np.ndarray, max_order: int,
                  absorption: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Image positions, gains, and reflection orders for a shoebox room.

    Walls are indexed x lo/hi, y lo/hi, z lo/hi with pressure reflection
    coefficient sqrt(1 - absorption).  Only images with a total reflection
    count up to `max_order` are returned; order 0 is the direct source.
    """
    source = np.asarray(source, dtype=float)
    beta = np.sqrt(1.0 - np.asarray(absorption, dtype=float))
    span = max_order // 2 + 1
    per_axis = []
    for d in range(3):
        entries = []
        for n in range(-span, span + 1):
            for mirrored in (0, 1):
                coord = (1 - 2 * mirrored) * source[d] + 2 * n * room[d]
                if mirrored == 0:
                    lo_hits, hi_hits = abs(n), abs(n)
                elif n >= 1:
                    lo_hits, hi_hits = n - 1, n
                else:
                    lo_hits, hi_hits = 1 - n, -n
                if lo_hits + hi_hits <= max_order:
                    gain = beta[2 * d] ** lo_hits * beta[2 * d + 1] ** hi_hits
                    entries.append((coord, lo_hits + hi_hits, gain))
        per_axis.append(entries)
    positions, gains, orders = [], [], []
    for cx, ox, gx in per_axis[0]:
        for cy, oy, gy in per_axis[1]:
            for cz, oz, gz in per_axis[2]:
                order = ox + oy + oz
                if order <= max_order:
                    positions.append((cx, cy, cz))
                    gains.append(gx * gy * gz)
                    orders.append(order)
    positions = np.asarray(positions)
    gains = np.asarray(gains)
    orders = np.asarray(orders)
    idx = np.lexsort((np.arange(len(orders)), orders))
    return positions[idx], gains[idx], orders[idx]


def _source_signal(cfg: ScenarioConfig, rng: np.random.Generator,
                   num_samples: int) -> np.ndarray:
    if cfg.source == "pink":
        return pink_noise(rng, num_samples)
    data, rate = load_audio(cfg.source)
    if abs(rate - cfg.sample_rate) > 1e-9:
        raise ConfigError(
            f"source file rate {rate} Hz does not match scenario rate "
            f"{cfg.sample_rate} Hz")
    mono = data[0]
    if mono.shape[0] < num_samples:
        raise ConfigError("source file too short for the requested render")
    return mono[:num_samples]


def synthesize(cfg: ScenarioConfig, source_pos: np.ndarray, num_samples: int,
               seed_offset: int = 0) -> np.ndarray:
    """Render one placement to (M, num_samples) microphone signals.

    The room response (direct path plus image reflections) is applied per
    microphone with fractional-delay filters; channel noise is then added at
    the configured SNR relative to the direct-path power.
    """
    source_pos = np.asarray(source_pos, dtype=float)
    if not _inside_room(source_pos, cfg.room):
        raise ConfigError(f"source {source_pos} outside the room")
    mics = cfg.array.positions
    if np.min(np.linalg.norm(mics - source_pos[None, :], axis=1)) < 1e-9:
        raise ConfigError("source coincides with a microphone")
    rng = np.random.default_rng([cfg.seed, 1 + seed_offset])
    dry = _source_signal(cfg, rng, num_samples)
    fs = cfg.sample_rate
    c = cfg.array.speed_of_sound
    positions, gains, orders = image_sources(source_pos, cfg.room,
                                             cfg.reflection_order, cfg.absorption)
    direct = np.zeros((cfg.array.num_mics, num_samples))
    reverb = np.zeros_like(direct)
    half = DELAY_FILTER_TAPS // 2 - 1
    for m in range(cfg.array.num_mics):
        for img, gain, order in zip(positions, gains, orders):
            dist = float(np.linalg.norm(mics[m] - img))
            delay = dist * fs / c
            base = int(np.floor(delay))
            kernel = fractional_delay_kernel(delay - base)
            rendered = np.convolve(dry, kernel) * (gain / max(dist, 1e-6))
            start = base - half
            lo, hi = max(start, 0), min(start + rendered.shape[0], num_samples)
            if hi > lo:
                target = direct if order == 0 else reverb
                target[m, lo:hi] += rendered[lo - start:hi - start]
    mix = direct + reverb
    if math.isfinite(cfg.snr_db):
        direct_power = float(np.mean(direct ** 2))
        if direct_power == 0.0:
            raise ConfigError("direct path has zero power; cannot set an SNR")
        noise = np.stack([pink_noise(rng, num_samples)
                          for _ in range(cfg.array.num_mics)])
        noise_power = float(np.mean(noise ** 2))
        scale = math.sqrt(direct_power * 10.0 ** (-cfg.snr_db / 10.0) / noise_power)
        mix = mix + scale * noise
    return mix


def render_for_frames(cfg: ScenarioConfig, frame: FrameSpec,
                      source_pos: np.ndarray, seed_offset: int = 0) -> np.ndarray:
    """Render enough signal for the configured frame count, in steady state.

    One extra frame length is rendered and trimmed from the front so the
    analyzed frames do not straddle the onset transient.
    """
    if abs(frame.sample_rate - cfg.sample_rate) > 1e-9:
        raise ConfigError("frame spec and scenario sample rates disagree")
    needed = frame.frame_len + frame.hop * (cfg.frames_per_placement - 1)
    lead = frame.frame_len
    full = synthesize(cfg, source_pos, needed + lead, seed_offset)
    return full[:, lead:]
