"""
Why weighting matters
=====================

Rows far from everything else dominate the Frobenius norm.  Uniform row
sampling usually misses them; weighted sampling does not.
"""

import numpy as np
from distmat import PointSet, SketchConfig, evaluate, low_rank_approx, make_oracle, uniform_baseline
from distmat.bench import outlier_points

P = outlier_points(200, 4, seed=0)
oracle = make_oracle(P, PointSet(P.points[1:]), "l2")
cfg = SketchConfig(k=1, eps=0.5)

weighted = [evaluate(oracle, low_rank_approx(oracle, cfg, s)).excess for s in range(15)]
uniform = [evaluate(oracle, uniform_baseline(oracle, cfg, s)).excess for s in range(15)]
print("median excess, weighted:", np.median(weighted))
print("median excess, uniform: ", np.median(uniform))
