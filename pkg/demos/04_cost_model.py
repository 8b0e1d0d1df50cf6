"""
Multiplication-count model
==========================

Per-frame multiplication counts of each backend, at the full scale of the
two benchmark scenarios (no operators are built here; counting is closed
form).  Shows the crossover rule that decides between the matrix and iFFT
sampling paths, and where each approximation can land on the cost axis.
"""

from srpmap import cost
from srpmap.metrics import sampling_cost

SCENARIOS = {
    # J, P, K-1, mean lags per pair
    "near-field volume": dict(num_candidates=73084, num_pairs=6,
                              num_bins=255, mean_samples=125.0),
    "far-field half-sphere": dict(num_candidates=8101, num_pairs=15,
                                  num_bins=511, mean_samples=46.6),
}

for name, params in SCENARIOS.items():
    conv = cost("conv", num_candidates=params["num_candidates"],
                num_pairs=params["num_pairs"], num_bins=params["num_bins"])
    print(f"{name}: J={params['num_candidates']}, P={params['num_pairs']}, "
          f"K-1={params['num_bins']}")
    print(f"  conventional: {conv.multiplications:.4g} multiplications")

    total = params["mean_samples"] * params["num_pairs"]
    for path in ("matrix", "ifft"):
        c_samp, _ = sampling_cost(params["num_pairs"], params["num_bins"],
                                  total, path)
        print(f"  sampling via {path:>6}: {c_samp:.4g}")
    _, chosen = sampling_cost(params["num_pairs"], params["num_bins"],
                              total, "auto")
    print(f"  auto path picks: {chosen}")

    si = cost("si", path="ifft", **params)
    print(f"  sampling+interpolation: C_rel = {si.relative:.4f}")

    for rank in (8, 32, 128):
        lr = cost("lr", rank=rank, num_candidates=params["num_candidates"],
                  num_pairs=params["num_pairs"], num_bins=params["num_bins"])
        print(f"  low-rank transform, rank {rank:>3}: C_rel = {lr.relative:.4f}")

    jp = params["num_candidates"] * params["num_pairs"]
    for factor in (1, 2, 4):
        sp = cost("sspi", keep=factor * jp, path="ifft", **params)
        print(f"  sparse interpolation, {factor}*J*P kept: "
              f"C_rel = {sp.relative:.4f}")
    print()
