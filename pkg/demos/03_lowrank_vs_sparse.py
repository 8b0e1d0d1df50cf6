"""
Trading accuracy against multiplications
========================================

Three scalable approximations of the map transform are compared at matched
multiplication budgets: a low-rank truncation of the dense transform, a
low-rank truncation of the interpolation operator, and a sparse truncation
keeping only the largest sinc weights.  The sparse variant holds up at
budgets where the low-rank ones have already collapsed.
"""

import numpy as np

from srpmap import (FrameSpec, MicrophoneArray, ScenarioConfig,
                    build_interp_matrix, build_nf_grid, build_srp_matrix,
                    cost, enumerate_pairs, fd_gcc, lr_map, map_error,
                    place_sources, render_for_frames, sample_spec, si_map,
                    slri_map, sspi_map, srp_map_exact, stft_frame,
                    td_gcc_samples, tdoa_table, truncate_low_rank,
                    truncate_sparse, truncate_srp_matrix)

array = MicrophoneArray(np.array([
    [0.45, 0.45, 1.0], [4.45, 0.45, 3.0],
    [0.45, 5.45, 3.0], [4.45, 5.45, 1.0]]))
pairs = enumerate_pairs(array)
grid = build_nf_grid((2.15, 2.65, 1.45), (0.6, 0.6, 0.1), 0.1)
frame = FrameSpec(frame_len=512, sample_rate=4000)
tdoa = tdoa_table(array, pairs, grid)

srp = build_srp_matrix(tdoa, frame)
spec = sample_spec(tdoa, frame, n_aux=2)
interp = build_interp_matrix(tdoa, spec, frame)

scenario = ScenarioConfig(mode="nf", room=np.array([4.9, 5.9, 3.5]),
                          array=array, grid=grid, sample_rate=4000,
                          snr_db=10.0, seed=21)
source = place_sources(scenario)[0]
gcc = fd_gcc(stft_frame(render_for_frames(scenario, frame, source),
                        frame, 0), pairs)
z_exact = srp_map_exact(srp, gcc)
xi = td_gcc_samples(gcc, spec)

j_count = grid.num_points
p_count = pairs.num_pairs
bins = frame.num_bins
base = dict(num_candidates=j_count, num_pairs=p_count, num_bins=bins)
samp = dict(total_samples=spec.total_samples, path="ifft", **base)

print(f"conventional map: C = {cost('conv', **base).multiplications} "
      f"multiplications per frame")
print(f"full interpolation: C_rel = {cost('si', **samp).relative:.3f}")
print()
print(f"{'method':>8} {'param':>10} {'C_rel':>8} {'eps_z (dB)':>11}")

for rank in (4, 16, 64):
    z = lr_map(truncate_srp_matrix(srp, rank), gcc)
    rel = cost("lr", rank=rank, **base).relative
    print(f"{'lr':>8} {'rank ' + str(rank):>10} {rel:8.3f} "
          f"{map_error(z, z_exact):11.2f}")

for rank in (4, 16, 64):
    z = slri_map(truncate_low_rank(interp, rank), xi)
    rel = cost("slri", rank=rank, **samp).relative
    print(f"{'slri':>8} {'rank ' + str(rank):>10} {rel:8.3f} "
          f"{map_error(z, z_exact):11.2f}")

for factor in (1, 2, 4):
    keep = factor * j_count * p_count
    z = sspi_map(truncate_sparse(interp, keep), xi)
    rel = cost("sspi", keep=keep, **samp).relative
    print(f"{'sspi':>8} {f'{factor}*J*P':>10} {rel:8.3f} "
          f"{map_error(z, z_exact):11.2f}")

z_si = si_map(interp, xi)
print(f"\nreference: si map itself is {map_error(z_si, z_exact):.2f} dB "
      f"from the conventional map")
