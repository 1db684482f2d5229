"""
Desk-scale benchmark sweeps: clustered synthetic points, CSV point sets or
hard instances, under each metric, target rank and seed, for the sampled
pipeline ("thiswork"), its uniform-sampling ablation and exact SVD.
"""
from __future__ import annotations

import csv
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import hardgen
from .io import load_points_csv
from .metrics import DEFAULT_CAP, DistanceOracle, PointSet, make_oracle, materialize
from .pipeline import budget_bound, low_rank_approx, uniform_baseline
from .regress import compose
from .sketch import SketchConfig

CSV_FIELDS = ["method", "metric", "k", "seed", "err_sq", "opt_sq", "fro_sq", "excess",
              "reads_total", "reads_algo", "t_weights", "t_sketch", "t_regress", "t_total"]
METHODS = ("thiswork", "uniform", "svd")


def synth_clusters(n_points: int, n_features: int, n_clusters: int, seed=None,
                   cluster_std: float = 1.0, box: float = 10.0) -> PointSet:
    """Isotropic Gaussian blobs shifted into the nonnegative orthant.

    Centers are uniform in [0, box]^d and points are assigned to clusters
    round-robin, so cluster sizes differ by at most one.
    """
    if not 1 <= n_clusters <= n_points:
        raise ValueError("need 1 <= n_clusters <= n_points")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, box, size=(n_clusters, n_features))
    labels = np.arange(n_points) % n_clusters
    X = centers[labels] + cluster_std * rng.standard_normal((n_points, n_features))
    return PointSet(X - X.min(axis=0))


def outlier_points(n_points: int, n_features: int, seed=None, n_outliers: int = 1,
                   distance: float = 100.0, spread: float = 0.1) -> PointSet:
    """Near-duplicate points around the origin plus a few far outliers."""
    rng = np.random.default_rng(seed)
    X = spread * np.abs(rng.standard_normal((n_points, n_features)))
    X[:n_outliers] += distance
    return PointSet(X)


@dataclass
class BenchSpec:
    dataset: dict
    metrics: list = field(default_factory=lambda: ["l2"])
    ks: list = field(default_factory=lambda: [10])
    eps: float = 0.5
    seeds: list = field(default_factory=lambda: [0])
    methods: list = field(default_factory=lambda: ["thiswork", "svd"])
    row_oversample: float = 4.0
    col_oversample: float = 4.0
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not (self.metrics and self.ks and self.seeds and self.methods):
            raise ValueError("metrics, ks, seeds and methods must be nonempty")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchSpec":
        known = cls.__dataclass_fields__.keys()
        extra = set(d) - set(known)
        if extra:
            raise ValueError(f"unknown bench spec fields {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "BenchSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _build_oracle(dataset: dict, metric: str) -> DistanceOracle:
    kind = dataset.get("kind", "synthetic_clusters")
    if kind == "synthetic_clusters":
        pts = synth_clusters(dataset["n_points"], dataset["n_features"], dataset["n_clusters"],
                             dataset.get("seed", 0), dataset.get("cluster_std", 1.0))
        return make_oracle(pts, pts, metric)
    if kind == "outliers":
        pts = outlier_points(dataset["n_points"], dataset["n_features"], dataset.get("seed", 0),
                             dataset.get("n_outliers", 1), dataset.get("distance", 100.0))
        return make_oracle(pts, pts, metric)
    if kind == "csv_points":
        left = load_points_csv(dataset["path"])
        right = load_points_csv(dataset["path_right"]) if "path_right" in dataset else left
        return make_oracle(left, right, metric)
    if kind == "hard":
        params = {key: v for key, v in dataset.items() if key not in ("kind", "hard_kind")}
        inst = hardgen.generate(dataset["hard_kind"], **params)
        return DistanceOracle.from_matrix(inst.matrix)
    raise ValueError(f"unknown dataset kind {kind!r}")


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def run_cell(spec: BenchSpec, A: np.ndarray, opt: dict, fro_sq: float, oracle_factory,
             method: str, metric: str, k: int, seed: int) -> dict:
    row = {"method": method, "metric": metric, "k": k, "seed": seed}
    try:
        opt_sq = opt[k]
        if method == "svd":
            # exact SVD attains the optimum by definition; reads the whole matrix
            n, m = A.shape
            row.update(err_sq=opt_sq, opt_sq=opt_sq, fro_sq=fro_sq, excess=0.0,
                       reads_total=n * m, reads_algo=n * m,
                       t_weights=0.0, t_sketch=0.0, t_regress=0.0, t_total=0.0)
            return row
        oracle = oracle_factory()
        cfg = SketchConfig(k, spec.eps, spec.row_oversample, spec.col_oversample)
        run = low_rank_approx if method == "thiswork" else uniform_baseline
        f = run(oracle, cfg, seed)
        resid = A - compose(f.V, f.U, spec.cap)
        err_sq = float(np.einsum("ij,ij->", resid, resid))
        row.update(err_sq=err_sq, opt_sq=opt_sq, fro_sq=fro_sq,
                   excess=(err_sq - opt_sq) / fro_sq if fro_sq > 0 else 0.0,
                   reads_total=oracle.ledger.total(), reads_algo=f.reads_algo,
                   t_weights=f.times["weights"], t_sketch=f.times["sketch"],
                   t_regress=f.times["regress"], t_total=f.times["total"])
        row["budget"] = budget_bound(*A.shape, cfg)
    except Exception as exc:  # recorded per cell; the sweep continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_bench(spec: BenchSpec, threads: int | None = None) -> list[dict]:
    """One result row per (metric, k, seed, method) cell, in a fixed order.

    Each cell draws from its own stream seeded by its recorded seed, so rows
    do not depend on scheduling and any row can be rerun on its own.
    """
    rows = []
    for metric in spec.metrics:
        factory = lambda metric=metric: _build_oracle(spec.dataset, metric)
        try:
            A = materialize(factory(), spec.cap)
            sigma = np.linalg.svd(A, compute_uv=False)
            opt = {k: float(np.sum(sigma[k:] ** 2)) for k in spec.ks}
            fro_sq = float(np.sum(sigma**2))
        except Exception as exc:
            for k, seed, method in product(spec.ks, spec.seeds, spec.methods):
                rows.append({"method": method, "metric": metric, "k": k, "seed": seed,
                             "error": f"{type(exc).__name__}: {exc}"})
            continue
        cells = list(product(spec.ks, spec.seeds, spec.methods))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows.extend(pool.map(lambda c: run_cell(spec, A, opt, fro_sq, factory, c[2], metric, c[0], c[1]),
                                 cells))
    return rows


def write_csv(rows: list[dict], path, timings: bool = True) -> None:
    with_error = any("error" in r for r in rows)
    fields = CSV_FIELDS + (["error"] if with_error else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for r in rows:
            out = {}
            for key in fields:
                v = r.get(key)
                if key.startswith("t_") and v is not None and not timings:
                    v = 0.0
                out[key] = _fmt(v) if isinstance(v, float) else ("" if v is None else v)
            writer.writerow(out)


def plot_data(rows: list[dict]) -> dict[str, list[dict]]:
    """Median error per (method, k) for each metric: the k-vs-error curves."""
    curves = {}
    for metric in sorted({r["metric"] for r in rows}):
        table = []
        cells = sorted({(r["method"], r["k"]) for r in rows if r["metric"] == metric and "error" not in r})
        for method, k in cells:
            sel = [r for r in rows if r["metric"] == metric and r["method"] == method
                   and r["k"] == k and "error" not in r]
            table.append({"method": method, "k": k,
                          "err_sq_median": statistics.median(r["err_sq"] for r in sel),
                          "opt_sq": sel[0]["opt_sq"],
                          "rel_err_median": statistics.median(r["err_sq"] / r["fro_sq"] for r in sel)
                          if sel[0]["fro_sq"] else 0.0})
        curves[metric] = table
    return curves


def write_plot_data(rows: list[dict], out_dir) -> list[Path]:
    paths = []
    for metric, table in plot_data(rows).items():
        path = Path(out_dir) / f"plot_{metric}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["method", "k", "err_sq_median", "opt_sq", "rel_err_median"],
                                    lineterminator="\n")
            writer.writeheader()
            for rec in table:
                writer.writerow({key: _fmt(v) if isinstance(v, float) else v for key, v in rec.items()})
        paths.append(path)
    return paths
