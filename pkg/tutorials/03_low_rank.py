"""
Rank-k factors from a sublinear number of reads
===============================================
"""

from distmat import SketchConfig, evaluate, low_rank_approx, make_oracle
from distmat.bench import synth_clusters
from distmat.pipeline import budget_bound

P = synth_clusters(512, 32, 20, seed=0)
oracle = make_oracle(P, P, "canberra")
cfg = SketchConfig(k=10, eps=0.5)
print("rows sampled", cfg.s, "columns sampled", cfg.t)

f = low_rank_approx(oracle, cfg, seed=3)
print(f.V.shape, f.U.shape)
print("reads by stage", f.ledger)
print("reads", f.reads_algo, "of", 512 * 512, "budget", budget_bound(512, 512, cfg))

# exact evaluation needs the dense matrix, charged to the eval stage
report = evaluate(oracle, f)
print("err", report.err_sq, "opt", report.opt_sq, "excess", report.excess)

# same seed, same bits
g = low_rank_approx(oracle, cfg, seed=3)
print((f.V == g.V).all() and (f.U == g.U).all())
