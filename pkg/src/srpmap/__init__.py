"""Steered-response-power acoustic maps with low-complexity backends.

Five interchangeable map backends over a shared scene/frontend pipeline:
the conventional dense transform, its low-rank truncation, critically
sampled TD GCCs with full sinc interpolation, and the low-rank and sparse
truncations of the interpolation operator.  A cost model counts the
multiplications of each backend, and a scenario simulator provides seeded
synthetic scenes for benchmarking.
"""

from .cache import CacheBundle, load_cache, save_cache
from .config import MethodSpec, RunConfig, SweepSpec, load_config
from .errors import (CacheFormatError, CapacityError, ConfigError,
                     DimensionError, InvalidGeometryError, InvalidGridError,
                     SrpMapError)
from .frontend import FdGcc, FrameSpec, fd_gcc, load_audio, num_frames, stft_frame
from .interpolation import (InterpMatrix, LowRankInterp, SparseInterp,
                            build_interp_matrix, si_map, slri_map, sspi_map,
                            truncate_low_rank, truncate_sparse)
from .lowrank import LowRankSrp, lr_map, truncate_srp_matrix
from .metrics import (CostReport, LocResult, cost, error_db_from_singular_values,
                      loc_accuracy, loc_error, map_error, matrix_error,
                      score_location)
from .sampling import (SampleSpec, TdGccSamples, dense_sampling_matrix,
                       sample_spec, td_gcc_samples, two_sided_gcc,
                       two_sided_map, two_sided_sampling_matrix,
                       two_sided_srp_matrix)
from .scene import (CandidateGrid, MicrophoneArray, PairTable, TdoaTable,
                    build_ff_grid, build_grid, build_nf_grid, enumerate_pairs,
                    tdoa_table)
from .simulate import (ScenarioConfig, fractional_delay_kernel, image_sources,
                       incident_direction, pink_noise, place_sources,
                       render_for_frames, synthesize, true_location)
from .srp import SrpMatrix, build_srp_matrix, locate, srp_map_exact

__version__ = "0.1.0"
