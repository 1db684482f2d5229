"""
A small benchmark sweep
=======================

The same sweep is available as ``distmat bench --spec spec.json``.
"""

from distmat.bench import BenchSpec, plot_data, run_bench

spec = BenchSpec.from_dict({
    "dataset": {"kind": "synthetic_clusters", "n_points": 300, "n_features": 16, "n_clusters": 8},
    "metrics": ["l1", "l2"],
    "ks": [2, 4, 8],
    "seeds": [0, 1, 2],
    "methods": ["thiswork", "uniform", "svd"],
})
rows = run_bench(spec, threads=4)
for metric, curve in plot_data(rows).items():
    print(metric)
    for point in curve:
        print(f"  {point['method']:9s} k={point['k']}  rel err {point['rel_err_median']:.4f}")
