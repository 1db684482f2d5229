"""
One-sided row-weight estimation from a single row and column of a distance
matrix.

For anchors i*, j* drawn uniformly, the weight of row i is

    raw[i] = A[i, j*]^2 + A[i*, j*]^2 + mean_j A[i*, j]^2

Two applications of d(x, y)^2 <= 2 (d(x, z)^2 + d(z, y)^2) give
||A_i||^2 <= 4 m raw[i] for every row and every anchor choice, while the
total mass sum_i raw[i] is (3/m) ||A||_F^2 in expectation.  So the
normalized weights never under-sample a heavy row by more than a constant
factor, which is what length-squared sampling needs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import DistanceOracle


@dataclass
class RowWeights:
    anchor_row: int
    anchor_col: int | None
    raw: np.ndarray
    normalized: np.ndarray
    reads_used: int

    def to_dict(self) -> dict:
        return {
            "anchor_row": self.anchor_row,
            "anchor_col": self.anchor_col,
            "raw": self.raw.tolist(),
            "normalized": self.normalized.tolist(),
            "reads_used": self.reads_used,
        }


def _normalize(raw: np.ndarray) -> np.ndarray:
    total = raw.sum()
    if not total > 0:
        # only possible when every entry read was zero
        return np.full(raw.shape, 1.0 / raw.size)
    return raw / total


def estimate_row_weights(oracle: DistanceOracle, seed=None, *, anchors=None) -> RowWeights:
    """Row weights from row i* and column j* (n + m reads).

    `anchors=(i, j)` pins the anchor pair for deterministic tests; otherwise
    i* then j* are drawn uniformly from `seed`.
    """
    n, m = oracle.shape
    if anchors is None:
        rng = np.random.default_rng(seed)
        i_star = int(rng.integers(n))
        j_star = int(rng.integers(m))
    else:
        i_star, j_star = (int(a) for a in anchors)
        if not (0 <= i_star < n and 0 <= j_star < m):
            raise IndexError(f"anchors ({i_star}, {j_star}) outside {oracle.shape}")
    before = oracle.ledger.weights_reads
    anchor_row = oracle.row(i_star, stage="weights")
    anchor_col = oracle.col(j_star, stage="weights")
    raw = anchor_col**2 + anchor_row[j_star] ** 2 + np.mean(anchor_row**2)
    return RowWeights(i_star, j_star, raw, _normalize(raw),
                      oracle.ledger.weights_reads - before)


def estimate_row_weights_symmetric(oracle: DistanceOracle, seed=None, *, anchor=None) -> RowWeights:
    """Symmetric variant: raw[i] = d(x_i, x_i*)^2 + mean_j d(x_i*, x_j)^2, n reads.

    Here ||A_i||^2 <= 2 n raw[i] and the expected mass is (2/n) ||A||_F^2.
    """
    if not oracle.symmetric:
        raise ValueError("symmetric weights need a symmetric oracle")
    n = oracle.n
    if anchor is None:
        i_star = int(np.random.default_rng(seed).integers(n))
    else:
        i_star = int(anchor)
        if not 0 <= i_star < n:
            raise IndexError(f"anchor {i_star} outside [0, {n})")
    before = oracle.ledger.weights_reads
    anchor_row = oracle.row(i_star, stage="weights")
    raw = anchor_row**2 + np.mean(anchor_row**2)
    return RowWeights(i_star, None, raw, _normalize(raw),
                      oracle.ledger.weights_reads - before)


def uniform_weights(n: int) -> RowWeights:
    raw = np.ones(n)
    return RowWeights(-1, None, raw, raw / n, 0)


def sample_rows(weights: RowWeights, s: int, seed=None) -> np.ndarray:
    """`s` i.i.d. row indices drawn from `weights.normalized`."""
    if s < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    return rng.choice(weights.normalized.size, size=s, replace=True, p=weights.normalized)
