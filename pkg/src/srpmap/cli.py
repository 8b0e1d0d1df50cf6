"""Command-line benchmark runner.

Subcommands:
    simulate    render random placements to multichannel WAV files
    precompute  build one backend's operator, report its cost, write a cache
    map         compute per-frame maps for an audio file using a cache
    sweep       run the synthetic error/accuracy sweep and write a metrics CSV
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from . import interpolation, lowrank, metrics, sampling
from .cache import CacheBundle, load_cache, save_cache
from .config import MethodSpec, RunConfig, load_config, resolve_rank, resolve_sparsity
from .errors import ConfigError
from .frontend import FdGcc, fd_gcc, load_audio, num_frames, stft_frame
from .interpolation import InterpMatrix, LowRankInterp, SparseInterp
from .lowrank import LowRankSrp
from .sampling import SampleSpec
from .scene import enumerate_pairs, tdoa_table
from .simulate import place_sources, render_for_frames, true_location
from .srp import SrpMatrix, build_srp_matrix, srp_map_exact


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return format(value, ".17g")
    return str(value)


def params_hash(cfg: RunConfig, method: MethodSpec, rank=None, keep=None) -> str:
    """Digest tying an operator cache to the scene, pipeline, and method."""
    scen = cfg.scenario
    payload = {
        "mode": scen.mode,
        "room": scen.room.tolist(),
        "positions": scen.array.positions.tolist(),
        "speed_of_sound": scen.array.speed_of_sound,
        "grid_axes": [axis.tolist() for axis in scen.grid.axes],
        "frame_len": cfg.frame.frame_len,
        "sample_rate": cfg.frame.sample_rate,
        "hop": cfg.frame.hop,
        "weighting": cfg.weighting,
        "n_aux": cfg.n_aux,
        "method": method.name,
        "rank": rank,
        "keep": keep,
        "path": method.path,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def build_scene(cfg: RunConfig):
    pairs = enumerate_pairs(cfg.scenario.array)
    tdoa = tdoa_table(cfg.scenario.array, pairs, cfg.scenario.grid)
    return pairs, tdoa


def build_operator(cfg: RunConfig, method: MethodSpec):
    """Build the selected backend operator.

    Returns (kind, operator, sample_spec, arrays, meta, cost_report) where
    `arrays`/`meta` are ready for the cache writer.
    """
    pairs, tdoa = build_scene(cfg)
    frame = cfg.frame
    grid = cfg.scenario.grid
    j_count, p_count, bins = grid.num_points, pairs.num_pairs, frame.num_bins
    common = dict(num_candidates=j_count, num_pairs=p_count, num_bins=bins)
    meta = {"num_pairs": p_count, "num_bins": bins, "num_candidates": j_count,
            "half_len": frame.half_len, "n_aux": cfg.n_aux, "path": method.path}

    if method.name == "conv":
        op = build_srp_matrix(tdoa, frame)
        report = metrics.cost("conv", **common)
        return "conv", op, None, {"matrix": op.matrix}, meta, report

    if method.name == "lr":
        full = min(j_count, p_count * bins)
        rank = resolve_rank(method.rank, full)
        op = lowrank.truncate_srp_matrix(build_srp_matrix(tdoa, frame), rank)
        report = metrics.cost("lr", rank=rank, **common)
        meta["rank"] = rank
        arrays = {"tall": op.tall, "fat": op.fat,
                  "singular_values": op.singular_values}
        return "lr", op, None, arrays, meta, report

    spec = sampling.sample_spec(tdoa, frame, cfg.n_aux)
    interp = interpolation.build_interp_matrix(tdoa, spec, frame)
    samp = dict(total_samples=spec.total_samples, path=method.path, **common)

    if method.name == "si":
        report = metrics.cost("si", **samp)
        arrays = {"matrix": interp.matrix, "counts": spec.counts}
        return "si", interp, spec, arrays, meta, report

    if method.name == "slri":
        full = min(interp.matrix.shape)
        rank = resolve_rank(method.rank, full)
        op = interpolation.truncate_low_rank(interp, rank)
        report = metrics.cost("slri", rank=rank, **samp)
        meta["rank"] = rank
        arrays = {"tall": op.tall, "fat": op.fat,
                  "singular_values": op.singular_values, "counts": spec.counts}
        return "slri", op, spec, arrays, meta, report

    keep = resolve_sparsity(method.sparsity, j_count, p_count, interp.matrix.size)
    op = interpolation.truncate_sparse(interp, keep)
    report = metrics.cost("sspi", keep=keep, **samp)
    meta["keep"] = keep
    meta["num_cols"] = op.num_cols
    arrays = {"values": op.values, "col_indices": op.col_indices,
              "row_splits": op.row_splits, "counts": spec.counts}
    return "sspi", op, spec, arrays, meta, report


def operator_from_bundle(bundle: CacheBundle):
    """Rebuild the operator (and sample spec, if any) stored in a cache."""
    meta = bundle.meta
    kind = bundle.kind
    if kind == "conv":
        op = SrpMatrix(matrix=bundle.arrays["matrix"],
                       num_pairs=meta["num_pairs"], num_bins=meta["num_bins"])
        return op, None
    if kind == "lr":
        op = LowRankSrp(tall=bundle.arrays["tall"], fat=bundle.arrays["fat"],
                        singular_values=bundle.arrays["singular_values"])
        return op, None
    spec = SampleSpec(counts=bundle.arrays["counts"], n_aux=meta["n_aux"],
                      half_len=meta["half_len"])
    if kind == "si":
        return InterpMatrix(matrix=bundle.arrays["matrix"], spec=spec), spec
    if kind == "slri":
        op = LowRankInterp(tall=bundle.arrays["tall"], fat=bundle.arrays["fat"],
                           singular_values=bundle.arrays["singular_values"])
        return op, spec
    if kind == "sspi":
        op = SparseInterp(values=bundle.arrays["values"],
                          col_indices=bundle.arrays["col_indices"],
                          row_splits=bundle.arrays["row_splits"],
                          num_cols=meta["num_cols"])
        return op, spec
    raise ConfigError(f"cache holds unknown operator kind {kind!r}")


def _resolve_path(spec: SampleSpec, frame, requested: str) -> str:
    if requested != "auto":
        return requested
    _, chosen = metrics.sampling_cost(spec.num_pairs, frame.num_bins,
                                      spec.total_samples, "auto")
    return chosen


def evaluate_map(kind, op, spec, frame, gcc: FdGcc, path: str) -> np.ndarray:
    if kind == "conv":
        return srp_map_exact(op, gcc)
    if kind == "lr":
        return lowrank.lr_map(op, gcc)
    xi = sampling.td_gcc_samples(gcc, spec, _resolve_path(spec, frame, path))
    if kind == "si":
        return interpolation.si_map(op, xi)
    if kind == "slri":
        return interpolation.slri_map(op, xi)
    return interpolation.sspi_map(op, xi)


def _print_cost(report: metrics.CostReport) -> None:
    path = f" path={report.sampling_path}" if report.sampling_path else ""
    print(f"method={report.method} multiplications={_fmt(float(report.multiplications))} "
          f"relative={report.relative:.6g}{path}")


def cmd_precompute(cfg: RunConfig, cache_path: str) -> None:
    if cfg.method is None:
        raise ConfigError("precompute needs a [method] section or --method")
    kind, _, _, arrays, meta, report = build_operator(cfg, cfg.method)
    digest = params_hash(cfg, cfg.method, rank=meta.get("rank"),
                         keep=meta.get("keep"))
    save_cache(cache_path, kind, arrays, meta, digest)
    _print_cost(report)
    print(f"cache written to {cache_path}")


def _parse_truth(text: str, cfg: RunConfig) -> np.ndarray:
    vals = np.array([float(tok) for tok in text.replace(",", " ").split()])
    if vals.shape != (3,):
        raise ConfigError("--truth needs three numbers")
    if cfg.scenario.mode == "ff" and abs(np.linalg.norm(vals) - 1.0) > 1e-6:
        # a position was given; convert to the incident direction
        return true_location(cfg.scenario, vals)
    return vals


def cmd_map(cfg: RunConfig, cache_path: str, audio_path: str, out_path: str,
            truth_text: str | None = None) -> None:
    bundle = load_cache(cache_path)
    method = MethodSpec(name=bundle.kind,
                        rank=str(bundle.meta.get("rank")) if "rank" in bundle.meta else None,
                        sparsity=str(bundle.meta.get("keep")) if "keep" in bundle.meta else None,
                        path=bundle.meta.get("path", "auto"))
    digest = params_hash(cfg, method, rank=bundle.meta.get("rank"),
                         keep=bundle.meta.get("keep"))
    if digest != bundle.params_hash:
        raise ConfigError(
            "cache/config mismatch: the cache was built for a different "
            "scene, pipeline, or method; refusing to run")
    op, spec = operator_from_bundle(bundle)

    samples, rate = load_audio(audio_path, sample_rate=cfg.frame.sample_rate,
                               channels=cfg.scenario.array.num_mics)
    if abs(rate - cfg.frame.sample_rate) > 1e-6:
        raise ConfigError(f"audio rate {rate} does not match configured "
                          f"{cfg.frame.sample_rate}")
    if samples.shape[0] != cfg.scenario.array.num_mics:
        raise ConfigError(f"audio has {samples.shape[0]} channels, array has "
                          f"{cfg.scenario.array.num_mics}")
    truth = _parse_truth(truth_text, cfg) if truth_text else None
    grid = cfg.scenario.grid
    pairs = enumerate_pairs(cfg.scenario.array)

    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_type", "frame", "index", "qx", "qy", "qz",
                         "value", "loc_error", "accuracy"])
        for f in range(num_frames(cfg.frame, samples.shape[1])):
            spectra = stft_frame(samples, cfg.frame, f)
            gcc = fd_gcc(spectra, pairs, cfg.weighting)
            z = evaluate_map(bundle.kind, op, spec, cfg.frame, gcc, method.path)
            for i in range(grid.num_points):
                q = grid.points[i]
                writer.writerow(["map", f, i, _fmt(q[0]), _fmt(q[1]), _fmt(q[2]),
                                 _fmt(float(z[i])), "", ""])
            if truth is not None:
                result = metrics.score_location(z, grid, truth)
                err, acc = _fmt(result.error), _fmt(result.accuracy)
                i_max, q_max = result.index, result.location
            else:
                from .srp import locate
                i_max, q_max = locate(z, grid)
                err = acc = ""
            writer.writerow(["summary", f, i_max, _fmt(q_max[0]), _fmt(q_max[1]),
                             _fmt(q_max[2]), _fmt(float(z[i_max])), err, acc])
    print(f"map CSV written to {out_path}")


def cmd_simulate(cfg: RunConfig, out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scen = cfg.scenario
    sources = place_sources(scen)
    truth_rows = []
    for i, pos in enumerate(sources):
        signal = render_for_frames(scen, cfg.frame, pos, seed_offset=i)
        path = out / f"scene_{i:03d}.wav"
        wavfile.write(path, int(scen.sample_rate),
                      signal.T.astype(np.float32))
        row = [i] + [_fmt(v) for v in pos]
        if scen.mode == "ff":
            row += [_fmt(v) for v in true_location(scen, pos)]
        truth_rows.append(row)
    header = ["placement", "x", "y", "z"]
    if scen.mode == "ff":
        header += ["qx", "qy", "qz"]
    with open(out / "truth.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(truth_rows)
    print(f"{len(sources)} scenes written to {out}")


def _percentile(values, q: float) -> float:
    # linear-interpolation percentile that tolerates -inf entries
    values = np.sort(np.asarray(values, dtype=float))
    pos = (values.size - 1) * q / 100.0
    lo, hi = int(np.floor(pos)), int(np.ceil(pos))
    a, b = float(values[lo]), float(values[hi])
    if lo == hi or a == b or np.isneginf(a):
        return a
    return a + (b - a) * (pos - lo)


def _placement_data(cfg: RunConfig, pairs, index, position):
    signal = render_for_frames(cfg.scenario, cfg.frame, position, seed_offset=index)
    gccs = [fd_gcc(stft_frame(signal, cfg.frame, f), pairs, cfg.weighting)
            for f in range(cfg.scenario.frames_per_placement)]
    return gccs, true_location(cfg.scenario, position)


SWEEP_HEADER = ["method", "param_name", "param_value", "c_rel", "eps_h_db",
                "eps_z_db_p10", "eps_z_db_p50", "eps_z_db_p90", "rho_s_mean"]


def run_sweep(cfg: RunConfig, workers: int = 1) -> list:
    """Error/accuracy sweep rows over the configured ranks and sparsities."""
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] section")
    pairs, tdoa = build_scene(cfg)
    frame = cfg.frame
    grid = cfg.scenario.grid
    j_count, p_count, bins = grid.num_points, pairs.num_pairs, frame.num_bins
    path = cfg.method.path if cfg.method else "auto"
    common = dict(num_candidates=j_count, num_pairs=p_count, num_bins=bins)

    srp = build_srp_matrix(tdoa, frame)
    spec = sampling.sample_spec(tdoa, frame, cfg.n_aux)
    interp = interpolation.build_interp_matrix(tdoa, spec, frame)
    sampling_dense = sampling.dense_sampling_matrix(spec)
    resolved_path = _resolve_path(spec, frame, path)

    sources = place_sources(cfg.scenario)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_placement = list(pool.map(
            lambda item: _placement_data(cfg, pairs, item[0], item[1]),
            enumerate(sources)))
    gccs = [g for gcc_list, _ in per_placement for g in gcc_list]
    truths = [t for gcc_list, t in per_placement for _ in gcc_list]
    z_refs = [srp_map_exact(srp, g) for g in gccs]
    xis = [sampling.td_gcc_samples(g, spec, resolved_path) for g in gccs]

    def score(maps):
        accs = [metrics.score_location(z, grid, t).accuracy
                for z, t in zip(maps, truths)]
        return float(np.mean(accs))

    def zerrors(maps):
        errs = [metrics.map_error(z, ref) for z, ref in zip(maps, z_refs)]
        return [_percentile(errs, q) for q in (10, 50, 90)]

    rows = []

    def add_row(method, param_name, param_value, report, eps_h, maps):
        p10, p50, p90 = zerrors(maps)
        rows.append([method, param_name, str(param_value),
                     _fmt(report.relative), _fmt(eps_h),
                     _fmt(p10), _fmt(p50), _fmt(p90), _fmt(score(maps))])

    add_row("conv", "", "", metrics.cost("conv", **common), -math.inf, z_refs)

    methods = cfg.sweep.methods
    samp = dict(total_samples=spec.total_samples, path=path, **common)
    if "si" in methods:
        maps = [interpolation.si_map(interp, xi) for xi in xis]
        eps_h = metrics.matrix_error(interp.matrix @ sampling_dense, srp.matrix)
        add_row("si", "", "", metrics.cost("si", **samp), eps_h, maps)
    if "lr" in methods and cfg.sweep.ranks:
        u, s, vt = np.linalg.svd(srp.matrix, full_matrices=False)
        full = s.shape[0]
        for token in cfg.sweep.ranks:
            rank = resolve_rank(token, full)
            op = lowrank.low_rank_srp_from_svd(u, s, vt, rank)
            maps = [lowrank.lr_map(op, g) for g in gccs]
            add_row("lr", "rank", rank, metrics.cost("lr", rank=rank, **common),
                    metrics.error_db_from_singular_values(s, rank), maps)
    if "slri" in methods and cfg.sweep.ranks:
        u, s, vt = np.linalg.svd(interp.matrix, full_matrices=False)
        full = s.shape[0]
        for token in cfg.sweep.ranks:
            rank = resolve_rank(token, full)
            op = interpolation.low_rank_interp_from_svd(u, s, vt, rank)
            maps = [interpolation.slri_map(op, xi) for xi in xis]
            eps_h = metrics.matrix_error(op.to_dense() @ sampling_dense, srp.matrix)
            add_row("slri", "rank", rank,
                    metrics.cost("slri", rank=rank, **samp), eps_h, maps)
    if "sspi" in methods and cfg.sweep.sparsities:
        for token in cfg.sweep.sparsities:
            keep = resolve_sparsity(token, j_count, p_count, interp.matrix.size)
            op = interpolation.truncate_sparse(interp, keep)
            maps = [interpolation.sspi_map(op, xi) for xi in xis]
            eps_h = metrics.matrix_error(op.to_dense() @ sampling_dense, srp.matrix)
            add_row("sspi", "keep", keep,
                    metrics.cost("sspi", keep=keep, **samp), eps_h, maps)
    return rows


def cmd_sweep(cfg: RunConfig, out_path: str, workers: int = 1) -> None:
    rows = run_sweep(cfg, workers=workers)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        writer.writerows(rows)
    print(f"sweep CSV with {len(rows)} rows written to {out_path}")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg = replace(cfg, scenario=replace(cfg.scenario, seed=args.seed))
    method = cfg.method
    if getattr(args, "method", None) or method is not None:
        name = getattr(args, "method", None) or method.name
        method = MethodSpec(
            name=name,
            rank=getattr(args, "rank", None) or (method.rank if method else None),
            sparsity=getattr(args, "sparsity", None) or (method.sparsity if method else None),
            path=getattr(args, "path", None) or (method.path if method else "auto"))
        cfg = replace(cfg, method=method)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="srpmap", description="acoustic map benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--seed", type=int, default=None, help="override scenario seed")

    p_sim = sub.add_parser("simulate", help="render placements to WAV files")
    add_common(p_sim)
    p_sim.add_argument("--out", required=True, help="output directory")

    p_pre = sub.add_parser("precompute", help="build and cache an operator")
    add_common(p_pre)
    p_pre.add_argument("--cache", required=True, help="cache file to write")
    p_pre.add_argument("--method", default=None,
                       choices=["conv", "lr", "si", "slri", "sspi"])
    p_pre.add_argument("--rank", default=None)
    p_pre.add_argument("--sparsity", default=None)
    p_pre.add_argument("--path", default=None, choices=["auto", "matrix", "ifft"])

    p_map = sub.add_parser("map", help="compute maps for an audio file")
    add_common(p_map)
    p_map.add_argument("--cache", required=True, help="operator cache to use")
    p_map.add_argument("--audio", required=True, help="WAV or raw .f32 input")
    p_map.add_argument("--out", required=True, help="output CSV")
    p_map.add_argument("--truth", default=None,
                       help="true source as 'x,y,z' (position or unit direction)")

    p_sweep = sub.add_parser("sweep", help="run the metrics sweep")
    add_common(p_sweep)
    p_sweep.add_argument("--out", required=True, help="output CSV")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--method", default=None,
                         choices=["conv", "lr", "si", "slri", "sspi"])
    p_sweep.add_argument("--rank", default=None)
    p_sweep.add_argument("--sparsity", default=None)
    p_sweep.add_argument("--path", default=None, choices=["auto", "matrix", "ifft"])

    args = parser.parse_args(argv)
    cfg = _apply_overrides(load_config(args.config), args)
    try:
        if args.command == "simulate":
            cmd_simulate(cfg, args.out)
        elif args.command == "precompute":
            cmd_precompute(cfg, args.cache)
        elif args.command == "map":
            cmd_map(cfg, args.cache, args.audio, args.out, args.truth)
        elif args.command == "sweep":
            cmd_sweep(cfg, args.out, workers=args.workers)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
