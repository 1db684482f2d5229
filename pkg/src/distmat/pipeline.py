"""End-to-end rank-k approximation and exact desk-scale evaluation."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .metrics import DEFAULT_CAP, DistanceOracle, materialize
from .norm_sampling import (estimate_row_weights, estimate_row_weights_symmetric,
                            uniform_weights)
from .regress import Factors, compose, fit_left_factor
from .sketch import SketchConfig, build_right_factor


@dataclass
class ApproxReport:
    factors: Factors
    ledger: dict
    times: dict
    err_sq: float | None = None
    opt_sq: float | None = None
    fro_sq: float | None = None
    excess: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "err_sq": self.err_sq,
            "opt_sq": self.opt_sq,
            "fro_sq": self.fro_sq,
            "excess": self.excess,
            "ledger": self.ledger,
            "times": self.times,
            "config": self.factors.config,
            "seed": self.factors.seed,
            **self.extra,
        }


def _seed_value(seed):
    return int(seed) if isinstance(seed, (int, np.integer)) else None


def _run(oracle, cfg, seed, weigh) -> Factors:
    cfg.check(oracle.shape)
    rng = np.random.default_rng(seed)
    before = oracle.ledger.snapshot()
    t0 = time.perf_counter()
    weights = weigh(rng)
    t1 = time.perf_counter()
    U = build_right_factor(oracle, weights, cfg, rng)
    t2 = time.perf_counter()
    V = fit_left_factor(oracle, U, cfg, rng)
    t3 = time.perf_counter()
    ledger = oracle.ledger.delta(oracle.ledger.snapshot(), before)
    times = {"weights": t1 - t0, "sketch": t2 - t1, "regress": t3 - t2, "total": t3 - t0}
    return Factors(V, U, cfg.to_dict(), _seed_value(seed), ledger, times)


def low_rank_approx(oracle: DistanceOracle, cfg: SketchConfig, seed=None) -> Factors:
    """Rank-k factors of a distance matrix from O((n + m) k / eps) reads.

    Row weights from one anchor row/column (one anchor row when the oracle
    is symmetric), weighted row sketch for U, sampled regression for V.
    Randomness is consumed from one stream in a fixed order, so a given
    seed always reproduces the same factors.
    """
    if oracle.symmetric:
        weigh = lambda rng: estimate_row_weights_symmetric(oracle, rng)
    else:
        weigh = lambda rng: estimate_row_weights(oracle, rng)
    return _run(oracle, cfg, seed, weigh)


def uniform_baseline(oracle: DistanceOracle, cfg: SketchConfig, seed=None) -> Factors:
    """Same pipeline with uniform row sampling (no weight reads)."""
    return _run(oracle, cfg, seed, lambda rng: uniform_weights(oracle.n))


def svd_factors(A, k: int) -> Factors:
    """Optimal rank-k factors of a dense matrix via full SVD."""
    left, sigma, right_t = np.linalg.svd(np.asarray(A, dtype=np.float64), full_matrices=False)
    return Factors(left[:, :k] * sigma[:k], right_t[:k], {"k": k, "method": "svd"})


def tail_energy(A, k: int) -> tuple[float, float]:
    """(||A - A_k||_F^2, ||A||_F^2) from the singular values of A."""
    sigma = np.linalg.svd(np.asarray(A, dtype=np.float64), compute_uv=False)
    return float(np.sum(sigma[k:] ** 2)), float(np.sum(sigma**2))


def budget_bound(n: int, m: int, cfg: SketchConfig, slack: float = 1.05) -> float:
    return (n + m) * (1 + (cfg.row_oversample + cfg.col_oversample) * cfg.k / cfg.eps) * slack


def evaluate(oracle: DistanceOracle, factors: Factors, cap: int = DEFAULT_CAP) -> ApproxReport:
    """Exact error against the optimal rank-k error; the n*m reads go to eval_reads."""
    A = materialize(oracle, cap)
    resid = A - compose(factors.V, factors.U, cap)
    err_sq = float(np.einsum("ij,ij->", resid, resid))
    opt_sq, _ = tail_energy(A, factors.k)
    fro_sq = float(np.einsum("ij,ij->", A, A))
    excess = (err_sq - opt_sq) / fro_sq if fro_sq > 0 else 0.0
    return ApproxReport(factors, dict(factors.ledger), dict(factors.times),
                        err_sq, opt_sq, fro_sq, excess)
