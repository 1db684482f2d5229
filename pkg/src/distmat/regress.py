"""Left factor by leverage-score column sampling, and the Factors container."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .io import read_dmat, write_dmat
from .metrics import DEFAULT_CAP, CapExceeded, DistanceOracle
from .sketch import SketchConfig


@dataclass
class Factors:
    """Rank-k factorization A ~ V @ U with V (n x k) and row-orthonormal U (k x m)."""

    V: np.ndarray
    U: np.ndarray
    config: dict = field(default_factory=dict)
    seed: int | None = None
    ledger: dict = field(default_factory=dict)
    times: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.V.ndim != 2 or self.U.ndim != 2 or self.V.shape[1] != self.U.shape[0]:
            raise ValueError(f"incompatible factor shapes {self.V.shape} and {self.U.shape}")

    @property
    def k(self) -> int:
        return self.U.shape[0]

    @property
    def reads_algo(self) -> int:
        return sum(v for key, v in self.ledger.items() if key != "eval_reads")

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_dmat(out / "V.dmat", self.V)
        write_dmat(out / "U.dmat", self.U)
        sidecar = {"config": self.config, "seed": self.seed, "ledger": self.ledger, "times": self.times}
        (out / "factors.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, out_dir) -> "Factors":
        out = Path(out_dir)
        meta = json.loads((out / "factors.json").read_text())
        return cls(read_dmat(out / "V.dmat"), read_dmat(out / "U.dmat"), **meta)


def fit_left_factor(oracle: DistanceOracle, U: np.ndarray, cfg: SketchConfig, seed=None) -> np.ndarray:
    """V minimizing ||A_S D - V U_S D||_F over t leverage-sampled columns S.

    For row-orthonormal U the leverage score of column j is ||U[:, j]||^2,
    so the sampling density is exact and costs no reads.  One column set is
    shared by all n row solves; n*t entries are charged.
    """
    rng = np.random.default_rng(seed)
    k, m = U.shape
    if m != oracle.m:
        raise ValueError(f"U has {m} columns, matrix has {oracle.m}")
    t = cfg.t
    lev = np.einsum("ij,ij->j", U, U)
    q = lev / lev.sum()
    cols = rng.choice(m, size=t, replace=True, p=q)
    scale = 1.0 / np.sqrt(t * q[cols])

    A_S = oracle.cols(cols, stage="regression") * scale
    U_S = U[:, cols] * scale
    # minimum-norm solution when U_S is rank deficient
    V_t, *_ = np.linalg.lstsq(U_S.T, A_S.T, rcond=None)
    return V_t.T


def compose(V, U, cap: int = DEFAULT_CAP) -> np.ndarray:
    V = np.asarray(V, dtype=np.float64)
    U = np.asarray(U, dtype=np.float64)
    if V.shape[1] != U.shape[0]:
        raise ValueError(f"incompatible factor shapes {V.shape} and {U.shape}")
    if V.shape[0] * U.shape[1] > cap:
        raise CapExceeded(f"{V.shape[0]}x{U.shape[1]} exceeds cap {cap}")
    return V @ U
