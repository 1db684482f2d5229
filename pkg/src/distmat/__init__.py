"""Sublinear low-rank approximation of distance matrices."""
from .metrics import (CapExceeded, DistanceOracle, MetricKind, PointSet, QueryLedger,
                      distance, make_oracle, materialize, triangle_violations)
from .norm_sampling import (RowWeights, estimate_row_weights, estimate_row_weights_symmetric,
                            sample_rows)
from .sketch import SketchConfig, build_right_factor, small_svd
from .regress import Factors, compose, fit_left_factor
from .pipeline import ApproxReport, evaluate, low_rank_approx, svd_factors, uniform_baseline
from .hardgen import (HardInstance, HardKind, decode_majorities, gen_bipartite_k1, gen_kblock,
                      gen_symmetric_k1, gen_symmetric_kblock, typicality)

__version__ = "0.1.0"
