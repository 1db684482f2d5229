"""
Distance matrices as metered oracles
====================================

A distance matrix is never formed up front.  The oracle computes entries
on demand and charges every read to a ledger stage.
"""

import numpy as np
from distmat import PointSet, make_oracle, materialize

X = PointSet([[0.0], [1.0], [3.0]])
oracle = make_oracle(X, X, "l1")
print(oracle.symmetric, oracle.shape)

# single entries and whole rows are charged separately
print(oracle.entry(0, 2), oracle.row(1, stage="sketch"))
print(oracle.ledger.snapshot())

# materializing reads all n*m entries (charged to "eval")
A = materialize(oracle)
print(A)
print(oracle.ledger.snapshot())

# four metrics are available; Canberra wants nonnegative coordinates
rng = np.random.default_rng(0)
P = PointSet(rng.uniform(0, 5, size=(5, 3)))
for metric in ("l1", "l2", "linf", "canberra"):
    print(metric, materialize(make_oracle(P, P, metric))[0].round(3))
