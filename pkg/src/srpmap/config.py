"""Run configuration: INI-style file with strict schema validation.

The file has five fixed sections plus two optional ones.  Unknown sections
or keys are rejected.  Vectors are space-separated numbers; microphone
position lists separate entries with semicolons.

    [scenario]                         [array]
    mode = nf | ff                     kind = positions | circular
    room = 4.9 5.9 3.5                 positions = x y z; x y z; ...
    source = pink | <wav path>         center = x y z      (circular)
    reflection_order = 0               radius = 0.3        (circular)
    absorption = 0.5                   count = 6           (circular)
    snr_db = inf                       speed_of_sound = 340
    num_placements = 50
    frames_per_placement = 4           [grid]       (nf)    [grid]      (ff)
    seed = 1234                        origin = x y z       polar_deg = 90 180
    placement = on_grid | random       extents = dx dy dz   azimuth_deg = 0 360
    ff_range = 2.5 3.0                 resolution = 0.1     resolution_deg = 10

    [pipeline]                         [method]
    frame_len = 512                    name = conv | lr | si | slri | sspi
    sample_rate = 4000                 rank = 8 | full          (lr, slri)
    hop = 256          (optional)      sparsity = 2jp | all | N (sspi)
    weighting = phat | none            path = auto | matrix | ifft
    n_aux = 2

    [sweep]                            [output]
    methods = lr slri sspi             dir = out
    ranks = 2 4 8 full
    sparsities = 0.5jp 1jp 2jp 4jp all

Rank tokens are integers or "full"; sparsity tokens are integers, "all", or
multiples of J*P like "2jp".
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .frontend import FrameSpec
from .scene import MicrophoneArray, build_ff_grid, build_nf_grid
from .simulate import ScenarioConfig

_SCHEMA = {
    "scenario": {"mode", "room", "source", "reflection_order", "absorption",
                 "snr_db", "num_placements", "frames_per_placement", "seed",
                 "placement", "ff_range"},
    "array": {"kind", "positions", "center", "radius", "count", "speed_of_sound"},
    "grid": {"origin", "extents", "resolution", "polar_deg", "azimuth_deg",
             "resolution_deg"},
    "pipeline": {"frame_len", "sample_rate", "hop", "weighting", "n_aux"},
    "method": {"name", "rank", "sparsity", "path"},
    "sweep": {"methods", "ranks", "sparsities"},
    "output": {"dir"},
}


@dataclass(frozen=True)
class MethodSpec:
    """Selected backend plus its rank/sparsity/path settings (unresolved tokens)."""

    name: str
    rank: str | None = None
    sparsity: str | None = None
    path: str = "auto"


@dataclass(frozen=True)
class SweepSpec:
    methods: tuple
    ranks: tuple = ()
    sparsities: tuple = ()


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig
    frame: FrameSpec
    weighting: str
    n_aux: int
    method: MethodSpec | None = None
    sweep: SweepSpec | None = None
    output_dir: str = "out"


def _floats(text: str, count: int | None = None) -> np.ndarray:
    try:
        vals = np.array([float(tok) for tok in text.split()])
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc
    if count is not None and vals.size != count:
        raise ConfigError(f"expected {count} numbers, got {text!r}")
    return vals


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {text!r}") from exc


def _choice(text: str, key: str, options: tuple) -> str:
    if text not in options:
        raise ConfigError(f"{key} must be one of {options}, got {text!r}")
    return text


def _validate_sections(parser: configparser.ConfigParser) -> None:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    for required in ("scenario", "array", "grid", "pipeline"):
        if required not in parser:
            raise ConfigError(f"missing required section [{required}]")


def _build_array(section) -> MicrophoneArray:
    kind = _choice(section.get("kind", "positions"), "array.kind",
                   ("positions", "circular"))
    c = float(section.get("speed_of_sound", "340"))
    if kind == "circular":
        for key in ("center", "radius", "count"):
            if key not in section:
                raise ConfigError(f"circular array needs array.{key}")
        return MicrophoneArray.circular(_floats(section["center"], 3),
                                        float(section["radius"]),
                                        _int(section["count"], "array.count"), c)
    if "positions" not in section:
        raise ConfigError("array.kind=positions needs array.positions")
    rows = [_floats(part, 3) for part in section["positions"].split(";") if part.strip()]
    return MicrophoneArray(np.vstack(rows), c)


def _build_grid(section, mode: str):
    if mode == "nf":
        for key in ("origin", "extents", "resolution"):
            if key not in section:
                raise ConfigError(f"nf grid needs grid.{key}")
        return build_nf_grid(_floats(section["origin"], 3),
                             _floats(section["extents"], 3),
                             float(section["resolution"]))
    if "resolution_deg" not in section:
        raise ConfigError("ff grid needs grid.resolution_deg")
    polar = _floats(section.get("polar_deg", "90 180"), 2)
    azimuth = _floats(section.get("azimuth_deg", "0 360"), 2)
    return build_ff_grid(float(section["resolution_deg"]),
                         polar_deg=tuple(polar), azimuth_deg=tuple(azimuth))


def load_config(path: str) -> RunConfig:
    """Parse and validate a run configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    _validate_sections(parser)

    scen = parser["scenario"]
    mode = _choice(scen.get("mode", ""), "scenario.mode", ("nf", "ff"))
    array = _build_array(parser["array"])
    grid = _build_grid(parser["grid"], mode)

    pipe = parser["pipeline"]
    for key in ("frame_len", "sample_rate"):
        if key not in pipe:
            raise ConfigError(f"pipeline needs {key}")
    frame = FrameSpec(frame_len=_int(pipe["frame_len"], "frame_len"),
                      sample_rate=float(pipe["sample_rate"]),
                      hop=_int(pipe.get("hop", "0"), "hop"))
    weighting = _choice(pipe.get("weighting", "phat"), "weighting",
                        ("phat", "none"))
    n_aux = _int(pipe.get("n_aux", "2"), "n_aux")

    snr_text = scen.get("snr_db", "inf")
    snr = math.inf if snr_text in ("inf", "+inf") else float(snr_text)
    absorption_vals = _floats(scen.get("absorption", "0.5"))
    absorption = float(absorption_vals[0]) if absorption_vals.size == 1 \
        else absorption_vals
    kwargs = {}
    if "ff_range" in scen:
        kwargs["ff_range"] = tuple(_floats(scen["ff_range"], 2))
    scenario = ScenarioConfig(
        mode=mode, room=_floats(scen.get("room", ""), 3), array=array, grid=grid,
        sample_rate=frame.sample_rate, source=scen.get("source", "pink"),
        reflection_order=_int(scen.get("reflection_order", "0"), "reflection_order"),
        absorption=absorption, snr_db=snr,
        num_placements=_int(scen.get("num_placements", "1"), "num_placements"),
        frames_per_placement=_int(scen.get("frames_per_placement", "1"),
                                  "frames_per_placement"),
        seed=_int(scen.get("seed", "0"), "seed"),
        placement=_choice(scen.get("placement", "random"), "placement",
                          ("random", "on_grid")),
        **kwargs)

    method = None
    if "method" in parser:
        sec = parser["method"]
        method = MethodSpec(
            name=_choice(sec.get("name", ""), "method.name",
                         ("conv", "lr", "si", "slri", "sspi")),
            rank=sec.get("rank"), sparsity=sec.get("sparsity"),
            path=_choice(sec.get("path", "auto"), "method.path",
                         ("auto", "matrix", "ifft")))

    sweep = None
    if "sweep" in parser:
        sec = parser["sweep"]
        methods = tuple(sec.get("methods", "lr slri sspi").split())
        for name in methods:
            _choice(name, "sweep.methods", ("lr", "si", "slri", "sspi"))
        sweep = SweepSpec(methods=methods,
                          ranks=tuple(sec.get("ranks", "").split()),
                          sparsities=tuple(sec.get("sparsities", "").split()))

    output_dir = parser["output"].get("dir", "out") if "output" in parser else "out"
    return RunConfig(scenario=scenario, frame=frame, weighting=weighting,
                     n_aux=n_aux, method=method, sweep=sweep,
                     output_dir=output_dir)


def resolve_rank(token: str, full: int) -> int:
    """Turn a rank token ("8" or "full") into an integer rank."""
    if token is None:
        raise ConfigError("method needs a rank")
    if token == "full":
        return full
    rank = _int(token, "rank")
    if not 1 <= rank <= full:
        raise ConfigError(f"rank {rank} outside [1, {full}]")
    return rank


def resolve_sparsity(token: str, num_candidates: int, num_pairs: int,
                     size: int) -> int:
    """Turn a sparsity token ("all", "2jp", or an integer) into a kept count."""
    if token is None:
        raise ConfigError("method needs a sparsity")
    if token == "all":
        return size
    if token.endswith("jp"):
        try:
            factor = float(token[:-2])
        except ValueError as exc:
            raise ConfigError(f"bad sparsity token {token!r}") from exc
        keep = round(factor * num_candidates * num_pairs)
    else:
        keep = _int(token, "sparsity")
    if not 0 <= keep <= size:
        raise ConfigError(f"sparsity {keep} outside [0, {size}]")
    return keep
