"""Shared desk-scale scenario fixtures.

Two small scenarios are used throughout the suite: a near-field room with
four corner microphones at two heights (so the two grid layers in z are
physically distinguishable) and a far-field hexagonal ring.  Session scope
keeps the dense operators built once.
"""

from dataclasses import dataclass

import numpy as np
import pytest

from srpmap import (CandidateGrid, FrameSpec, MicrophoneArray, PairTable,
                    ScenarioConfig, TdoaTable, build_ff_grid, build_nf_grid,
                    build_srp_matrix, enumerate_pairs, tdoa_table)

NF_MIC_POSITIONS = np.array([
    [0.45, 0.45, 1.0],
    [4.45, 0.45, 3.0],
    [0.45, 5.45, 3.0],
    [4.45, 5.45, 1.0],
])
NF_ROOM = np.array([4.9, 5.9, 3.5])
FF_ROOM = np.array([6.5, 9.0, 4.5])
FF_CENTER = np.array([3.25, 4.5, 1.0])


@dataclass(frozen=True)
class Scenario:
    mode: str
    room: np.ndarray
    array: MicrophoneArray
    pairs: PairTable
    grid: CandidateGrid
    frame: FrameSpec
    tdoa: TdoaTable

    def scenario_config(self, **overrides) -> ScenarioConfig:
        base = dict(mode=self.mode, room=self.room, array=self.array,
                    grid=self.grid, sample_rate=self.frame.sample_rate)
        base.update(overrides)
        return ScenarioConfig(**base)


def _bundle(mode, room, array, grid, frame) -> Scenario:
    pairs = enumerate_pairs(array)
    return Scenario(mode=mode, room=room, array=array, pairs=pairs, grid=grid,
                    frame=frame, tdoa=tdoa_table(array, pairs, grid))


@pytest.fixture(scope="session")
def nf_mini() -> Scenario:
    return _bundle(
        "nf", NF_ROOM, MicrophoneArray(NF_MIC_POSITIONS),
        build_nf_grid((2.15, 2.65, 1.45), (0.6, 0.6, 0.1), 0.1),
        FrameSpec(frame_len=512, sample_rate=4000))


@pytest.fixture(scope="session")
def ff_mini() -> Scenario:
    return _bundle(
        "ff", FF_ROOM, MicrophoneArray.circular(FF_CENTER, 0.3, 6),
        build_ff_grid(10.0),
        FrameSpec(frame_len=1024, sample_rate=16000))


@pytest.fixture(scope="session")
def nf_srp(nf_mini):
    return build_srp_matrix(nf_mini.tdoa, nf_mini.frame)


@pytest.fixture(scope="session")
def ff_srp(ff_mini):
    return build_srp_matrix(ff_mini.tdoa, ff_mini.frame)


@dataclass(frozen=True)
class TinyInstance:
    """Random small instance (J=16, P=3, K=8) for brute-force oracles."""

    array: MicrophoneArray
    pairs: PairTable
    grid: CandidateGrid
    frame: FrameSpec
    tdoa: TdoaTable


@pytest.fixture()
def tiny() -> TinyInstance:
    array = MicrophoneArray(np.array([
        [0.0, 0.0, 0.0], [0.04, 0.0, 0.0], [0.0, 0.05, 0.0]]))
    grid = build_nf_grid((0.2, 0.2, 0.2), (0.3, 0.3, 0.0), 0.1)
    frame = FrameSpec(frame_len=16, sample_rate=8000)
    pairs = enumerate_pairs(array)
    return TinyInstance(array=array, pairs=pairs, grid=grid, frame=frame,
                        tdoa=tdoa_table(array, pairs, grid))


def random_gcc(rng, num_pairs, num_bins, unit=False):
    """Random stacked cross-spectrum; `unit` makes it PHAT-like."""
    from srpmap import FdGcc

    vals = rng.standard_normal(num_pairs * num_bins) \
        + 1j * rng.standard_normal(num_pairs * num_bins)
    if unit:
        vals = vals / np.abs(vals)
    return FdGcc(values=vals, num_pairs=num_pairs, num_bins=num_bins,
                 weighting="phat" if unit else "none")


NF_CONFIG = """\
[scenario]
mode = nf
room = 4.9 5.9 3.5
source = pink
reflection_order = {reflection_order}
snr_db = {snr_db}
num_placements = {num_placements}
frames_per_placement = {frames_per_placement}
seed = {seed}
placement = {placement}

[array]
kind = positions
positions = 0.45 0.45 1.0; 4.45 0.45 3.0; 0.45 5.45 3.0; 4.45 5.45 1.0

[grid]
origin = 2.15 2.65 1.45
extents = 0.6 0.6 0.1
resolution = 0.1

[pipeline]
frame_len = 512
sample_rate = 4000
weighting = phat
n_aux = 2

[method]
name = {method}
rank = {rank}
sparsity = {sparsity}
path = auto

[sweep]
methods = {sweep_methods}
ranks = {sweep_ranks}
sparsities = {sweep_sparsities}
"""

FF_CONFIG = """\
[scenario]
mode = ff
room = 6.5 9.0 4.5
source = pink
reflection_order = {reflection_order}
snr_db = {snr_db}
num_placements = {num_placements}
frames_per_placement = {frames_per_placement}
seed = {seed}
placement = {placement}
ff_range = 2.5 3.0

[array]
kind = circular
center = 3.25 4.5 1.0
radius = 0.3
count = 6

[grid]
polar_deg = 90 180
azimuth_deg = 0 360
resolution_deg = 10

[pipeline]
frame_len = 1024
sample_rate = 16000
weighting = phat
n_aux = 2

[method]
name = {method}
rank = {rank}
sparsity = {sparsity}
path = auto

[sweep]
methods = {sweep_methods}
ranks = {sweep_ranks}
sparsities = {sweep_sparsities}
"""

CONFIG_DEFAULTS = dict(reflection_order=0, snr_db="inf", num_placements=2,
                       frames_per_placement=2, seed=42, placement="on_grid",
                       method="conv", rank=8, sparsity="2jp",
                       sweep_methods="si lr slri sspi",
                       sweep_ranks="4 16 full",
                       sweep_sparsities="1jp 2jp all")


def write_config(path, mode="nf", **overrides):
    """Write a desk-scale INI config and return its path as a string."""
    params = dict(CONFIG_DEFAULTS)
    params.update(overrides)
    template = NF_CONFIG if mode == "nf" else FF_CONFIG
    path.write_text(template.format(**params))
    return str(path)
