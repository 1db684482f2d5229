"""
Hard instances built from majority strings
==========================================

Each row of the generated matrix holds a random string of 1s and 2s.  An
accurate rank-1 approximation has to reproduce the row means, so it gives
away which symbol is the majority in each row.
"""

import numpy as np
from distmat import DistanceOracle, SketchConfig, low_rank_approx
from distmat.hardgen import (decode_majorities, gamma_for_delta, gen_bipartite_k1, gen_kblock,
                             metric_completion, typicality)
from distmat.metrics import triangle_violations

inst = gen_bipartite_k1(4096, eps=1 / 16, seed=0)
print(inst.matrix.shape, "far row value", inst.params["M"])

small = gen_bipartite_k1(20, eps=1 / 16, seed=0)
print("triangle violations in the completion:", triangle_violations(metric_completion(small)))

r = inst.r
gamma = gamma_for_delta(r, 0.1)
rep = typicality(inst, gamma)
print("gamma", gamma, "typical", rep.fraction, "including ties", rep.fraction_all)

oracle = DistanceOracle.from_matrix(inst.matrix)
for rows in (None, 1):
    cfg = SketchConfig(1, 1 / 16, rows=rows)
    rates = [decode_majorities(inst, low_rank_approx(oracle, cfg, s))[1] for s in range(10)]
    print("row samples", cfg.s, "decode success", np.mean(rates))

kb = gen_kblock(16, 3, eps=1 / 4, seed=0)
print("k-block values", np.unique(kb.matrix))
