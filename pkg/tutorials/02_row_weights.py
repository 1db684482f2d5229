"""
Row weights from one anchor row and column
==========================================

Reading a single row and a single column gives per-row weights that never
underestimate a row's squared norm by more than a factor 4m.
"""

import numpy as np
from distmat import make_oracle, materialize
from distmat.bench import synth_clusters
from distmat.norm_sampling import estimate_row_weights, estimate_row_weights_symmetric

P = synth_clusters(300, 8, 5, seed=1)
Q = synth_clusters(120, 8, 5, seed=2)
oracle = make_oracle(P, Q, "l2")
w = estimate_row_weights(oracle, seed=0)
print("anchors", w.anchor_row, w.anchor_col, "reads", w.reads_used)

A = materialize(oracle)
row_sq = (A**2).sum(axis=1)
print("worst ratio ||A_i||^2 / (4m raw_i):", (row_sq / (4 * oracle.m * w.raw)).max())

# total mass is (3/m)||A||^2 on average over the anchor draw
masses = [estimate_row_weights(oracle, seed=s).raw.sum() for s in range(500)]
print("mean mass / (3/m)||A||^2:", np.mean(masses) / (3 / oracle.m * row_sq.sum()))

# symmetric inputs need only the anchor row
sym = make_oracle(P, P, "l2")
ws = estimate_row_weights_symmetric(sym, seed=0)
print("symmetric reads", ws.reads_used)
