"""
Right factor from length-squared row samples (Frieze-Kannan-Vempala).

s rows are drawn from the estimated row weights and rescaled into W (s x m).
Columns of W are then length-squared sampled into W' (s x t); the top-k
left singular vectors h_i of W' are pushed back through W, and the rows
h_i^T W / ||h_i^T W|| (re-orthonormalized) form U (k x m).  Only the s
sampled rows are read from the oracle.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .metrics import DistanceOracle
from .norm_sampling import RowWeights, sample_rows


@dataclass(frozen=True)
class SketchConfig:
    k: int
    eps: float
    row_oversample: float = 4.0
    col_oversample: float = 4.0
    # explicit sample sizes override the ceil(c * k / eps) defaults
    rows: int | None = None
    cols: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.row_oversample < 1 or self.col_oversample < 1:
            raise ValueError("oversampling constants must be >= 1")
        if self.rows is not None and self.rows < 1:
            raise ValueError("rows must be >= 1")
        if self.cols is not None and self.cols < self.k:
            raise ValueError("cols must be >= k")

    @property
    def s(self) -> int:
        if self.rows is not None:
            return self.rows
        return math.ceil(self.row_oversample * self.k / self.eps)

    @property
    def t(self) -> int:
        if self.cols is not None:
            return self.cols
        return math.ceil(self.col_oversample * self.k / self.eps)

    def check(self, shape) -> None:
        n, m = shape
        if self.k > min(n, m):
            raise ValueError(f"k={self.k} exceeds min(n, m)={min(n, m)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(s=self.s, t=self.t)
        return d


def small_svd(M):
    """Thin SVD of a small dense matrix: (sigma descending, left, right^T)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("small_svd expects a 2-D matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("non-finite entry")
    left, sigma, right_t = np.linalg.svd(M, full_matrices=False)
    return sigma, left, right_t


def orthonormal_rows(Y: np.ndarray, k: int, m: int, tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt on the rows of Y, completed with standard basis rows."""
    basis = []
    scale = max((float(np.linalg.norm(y)) for y in Y), default=0.0)
    candidates = [y for y in Y] if scale > 0 else []
    for y in candidates:
        v = np.array(y, dtype=np.float64)
        for _ in range(2):
            for b in basis:
                v -= (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > tol * scale:
            basis.append(v / norm)
        if len(basis) == k:
            break
    j = 0
    while len(basis) < k:
        v = np.zeros(m)
        v[j] = 1.0
        for _ in range(2):
            for b in basis:
                v -= (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > 0.5:
            basis.append(v / norm)
        j += 1
    return np.array(basis)


def build_right_factor(oracle: DistanceOracle, weights: RowWeights, cfg: SketchConfig, seed=None) -> np.ndarray:
    """Row-orthonormal U (k x m) from s weighted row samples; charges s*m reads."""
    cfg.check(oracle.shape)
    rng = np.random.default_rng(seed)
    k, m = cfg.k, oracle.m
    s, t = cfg.s, cfg.t

    idx = sample_rows(weights, s, rng)
    R = oracle.rows(idx, stage="sketch")
    W = R / np.sqrt(s * weights.normalized[idx])[:, None]

    col_mass = np.einsum("ij,ij->j", W, W)
    total = col_mass.sum()
    if not total > 0:
        return orthonormal_rows(np.empty((0, m)), k, m)
    q = col_mass / total
    cols = rng.choice(m, size=t, replace=True, p=q)
    W_cols = W[:, cols] / np.sqrt(t * q[cols])

    _, H, _ = small_svd(W_cols)
    Y = H[:, :k].T @ W
    return orthonormal_rows(Y, k, m)
