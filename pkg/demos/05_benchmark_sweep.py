"""
End-to-end benchmark sweep
==========================

Runs the same error/accuracy sweep the `srpmap sweep` subcommand performs,
directly through the library: seeded random placements, per-frame maps for
every backend and budget, and aggregate metrics per sweep point.
"""

from srpmap.cli import SWEEP_HEADER, run_sweep
from srpmap.config import load_config

CONFIG = """\
[scenario]
mode = ff
room = 6.5 9.0 4.5
source = pink
reflection_order = 1
absorption = 0.5
snr_db = 15
num_placements = 4
frames_per_placement = 4
seed = 1234
placement = random
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

[sweep]
methods = si lr slri sspi
ranks = 8 32 full
sparsities = 1jp 2jp 4jp all
"""


def main():
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".ini", delete=False) as fh:
        fh.write(CONFIG)
        path = fh.name
    rows = run_sweep(load_config(path), workers=2)
    widths = [6, 6, 6, 9, 9, 9, 9, 9, 9]
    print("  ".join(h[:w].rjust(w) for h, w in zip(SWEEP_HEADER, widths)))
    for row in rows:
        cells = [str(c)[:w].rjust(w) for c, w in zip(row, widths)]
        print("  ".join(cells))


if __name__ == "__main__":
    main()
