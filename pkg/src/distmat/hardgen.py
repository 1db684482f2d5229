"""
Hard distance matrices built from stacked random majority instances.

Each instance is a uniformly random string of r = round(beta/eps) symbols
over a two-letter alphabet.  Instances are written into rows of a matrix in
a random order (the permutation `perm`, with ``matrix[perm[i]]`` holding
instance i) and padded so the whole thing is a valid distance matrix:

* ``bipartite-k1``: (n+1) x r, symbols {1, 2}, plus a far row of M = sqrt(C n).
* ``symmetric-k1``: 2n x 2n, copies of the {1, 2} block off the diagonal
  blocks, 2.25 inside the diagonal blocks, zero diagonal, then affinely
  squeezed into [1, 2] off the diagonal.
* ``k-block``: N x kr with N = (1+C)n padded to a power of two; block b is
  2 + h_b + S_b where h_b is a +-1/2 Walsh-Hadamard column and S_b holds the
  +-1/2 instances in its top n rows and zeros below.
* ``symmetric-k-block``: 2n x 2n embedding of the top n rows of a k-block
  matrix, squeezed from [1, 3] to [1, 2], with ones inside the diagonal blocks.

A rank-k approximation that is accurate enough has to reproduce most row
means, and thresholding those means recovers the majority bits.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.linalg import hadamard

from .io import read_dmat, write_dmat
from .regress import Factors, compose

TIE_TOL = 1e-9


class HardKind(enum.Enum):
    BIPARTITE_K1 = "bipartite-k1"
    SYMMETRIC_K1 = "symmetric-k1"
    BIPARTITE_KBLOCK = "k-block"
    SYMMETRIC_KBLOCK = "symmetric-k-block"


@dataclass
class HardInstance:
    """A generated matrix with its ground truth.

    `majorities`, `ties`, `upper_counts` and `perm` all have shape
    (blocks, n): one row per block (a single block for the k=1 kinds).
    A majority bit of 1 means the upper symbol (2, or +1/2) wins.
    """

    matrix: np.ndarray
    kind: HardKind
    majorities: np.ndarray
    ties: np.ndarray
    upper_counts: np.ndarray
    perm: np.ndarray
    params: dict
    signs: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.params["n"]

    @property
    def r(self) -> int:
        return self.params["r"]

    @property
    def instance_count(self) -> int:
        return self.majorities.size

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_dmat(out / "matrix.dmat", self.matrix)
        sidecar = {
            "kind": self.kind.value,
            "params": self.params,
            "perm": self.perm.tolist(),
            "majorities": self.majorities.astype(int).tolist(),
            "ties": self.ties.astype(bool).tolist(),
            "upper_counts": self.upper_counts.astype(int).tolist(),
        }
        if self.signs is not None:
            sidecar["signs"] = self.signs.tolist()
        (out / "instance.json").write_text(json.dumps(sidecar, sort_keys=True) + "\n")

    @classmethod
    def load(cls, out_dir) -> "HardInstance":
        out = Path(out_dir)
        meta = json.loads((out / "instance.json").read_text())
        signs = meta.get("signs")
        return cls(
            matrix=read_dmat(out / "matrix.dmat"),
            kind=HardKind(meta["kind"]),
            majorities=np.array(meta["majorities"], dtype=np.int8),
            ties=np.array(meta["ties"], dtype=bool),
            upper_counts=np.array(meta["upper_counts"], dtype=np.int64),
            perm=np.array(meta["perm"], dtype=np.int64),
            params=meta["params"],
            signs=None if signs is None else np.array(signs, dtype=np.float64),
        )


def _rounds(beta: float, eps: float) -> int:
    if not eps > 0 or not beta > 0:
        raise ValueError("beta and eps must be positive")
    r = round(beta / eps)
    if r < 1:
        raise ValueError(f"r = round(beta/eps) = {r} < 1")
    return r


def _majority_block(rng, n: int, r: int):
    """Random 0/1 instances (upper symbol = 1) and their row permutation."""
    bits = rng.integers(0, 2, size=(n, r), dtype=np.int8)
    perm = rng.permutation(n)
    counts = bits.sum(axis=1, dtype=np.int64)
    return bits, perm, counts


def _truth(counts: np.ndarray, r: int):
    return (2 * counts > r).astype(np.int8), 2 * counts == r


def gen_bipartite_k1(n: int, eps: float, beta: float = 1.0, C: float = 1.0, seed=None) -> HardInstance:
    r = _rounds(beta, eps)
    if n < 1 or not C > 0:
        raise ValueError("need n >= 1 and C > 0")
    if C * n < 1:
        raise ValueError("far row needs M = sqrt(C n) >= 1 for the metric completion")
    rng = np.random.default_rng(seed)
    bits, perm, counts = _majority_block(rng, n, r)
    M = math.sqrt(C * n)
    A = np.empty((n + 1, r))
    A[perm] = 1.0 + bits
    A[n] = M
    maj, ties = _truth(counts, r)
    params = {"n": n, "r": r, "k": 1, "C": C, "beta": beta, "eps": eps, "M": M}
    return HardInstance(A, HardKind.BIPARTITE_K1, maj[None], ties[None], counts[None],
                        perm[None], params)


def _squeeze(lo: float, hi: float):
    """Affine map sending [lo, hi] onto [1, 2]."""
    scale = 1.0 / (hi - lo)
    return scale, 1.0 - lo * scale


def _symmetric_embedding(B: np.ndarray, inner: float, scale: float, offset: float) -> np.ndarray:
    n, w = B.shape
    A = np.full((2 * n, 2 * n), inner)
    A[n:, :n] = np.tile(B, (1, n // w))
    A[:n, n:] = A[n:, :n].T
    A = scale * A + offset
    np.fill_diagonal(A, 0.0)
    return A


def gen_symmetric_k1(n: int, eps: float, beta: float = 1.0, seed=None) -> HardInstance:
    r = _rounds(beta, eps)
    if n < 1 or n % r:
        raise ValueError(f"r={r} must divide n={n}")
    rng = np.random.default_rng(seed)
    bits, perm, counts = _majority_block(rng, n, r)
    B = np.empty((n, r))
    B[perm] = 1.0 + bits
    scale, offset = _squeeze(1.0, 2.25)
    A = _symmetric_embedding(B, 2.25, scale, offset)
    maj, ties = _truth(counts, r)
    params = {"n": n, "r": r, "k": 1, "beta": beta, "eps": eps,
              "scale": scale, "offset": offset, "copies": n // r}
    return HardInstance(A, HardKind.SYMMETRIC_K1, maj[None], ties[None], counts[None],
                        perm[None], params)


def _next_pow2(x: int) -> int:
    return 1 << max(0, (x - 1).bit_length())


def gen_kblock(n: int, k: int, eps: float, beta: float = 1.0, C: float = 1.0, seed=None) -> HardInstance:
    r = _rounds(beta, eps)
    if n < 1 or k < 1 or C < 0:
        raise ValueError("need n >= 1, k >= 1, C >= 0")
    N = round((1 + C) * n)
    N_eff = _next_pow2(N)
    if k > N_eff - 1:
        raise ValueError(f"only {N_eff - 1} non-constant Hadamard vectors of order {N_eff}")
    signs = hadamard(N_eff)[:, 1:k + 1].T.astype(np.float64) / 2.0
    rng = np.random.default_rng(seed)
    blocks, perms, all_counts = [], [], []
    for b in range(k):
        bits, perm, counts = _majority_block(rng, n, r)
        S = np.zeros((N_eff, r))
        S[perm] = bits - 0.5
        blocks.append(2.0 + signs[b][:, None] + S)
        perms.append(perm)
        all_counts.append(counts)
    counts = np.array(all_counts)
    maj, ties = _truth(counts, r)
    params = {"n": n, "r": r, "k": k, "C": C, "beta": beta, "eps": eps,
              "N": N, "N_eff": N_eff}
    return HardInstance(np.hstack(blocks), HardKind.BIPARTITE_KBLOCK, maj, ties, counts,
                        np.array(perms), params, signs)


def gen_symmetric_kblock(n: int, k: int, eps: float, beta: float = 1.0, C: float = 1.0,
                         seed=None) -> HardInstance:
    r = _rounds(beta, eps)
    if n % (k * r):
        raise ValueError(f"k*r={k * r} must divide n={n}")
    base = gen_kblock(n, k, eps, beta, C, seed)
    scale, offset = _squeeze(1.0, 3.0)
    A = _symmetric_embedding(base.matrix[:n], 1.0, scale, offset)
    params = dict(base.params, scale=scale, offset=offset, copies=n // (k * r))
    return HardInstance(A, HardKind.SYMMETRIC_KBLOCK, base.majorities, base.ties,
                        base.upper_counts, base.perm, params, base.signs)


def generate(kind, **kw) -> HardInstance:
    kind = HardKind(kind)
    if kind is HardKind.BIPARTITE_K1:
        return gen_bipartite_k1(kw["n"], kw["eps"], kw.get("beta", 1.0), kw.get("C", 1.0), kw.get("seed"))
    if kind is HardKind.SYMMETRIC_K1:
        return gen_symmetric_k1(kw["n"], kw["eps"], kw.get("beta", 1.0), kw.get("seed"))
    gen = gen_kblock if kind is HardKind.BIPARTITE_KBLOCK else gen_symmetric_kblock
    return gen(kw["n"], kw.get("k", 2), kw["eps"], kw.get("beta", 1.0), kw.get("C", 1.0), kw.get("seed"))


def instance_scores(instance: HardInstance, approx: np.ndarray) -> np.ndarray:
    """Per-instance centered means of `approx`, shape (blocks, n).

    The score is the mean of the entries that hold an instance, mapped back
    to symbol space and shifted by the midpoint of its alphabet: positive
    means the upper symbol, so the score of the exact matrix is
    (upper count - r/2) / r.
    """
    p = instance.params
    n, r = p["n"], p["r"]
    approx = np.asarray(approx, dtype=np.float64)
    if approx.shape != instance.matrix.shape:
        raise ValueError(f"approximation shape {approx.shape} != instance shape {instance.matrix.shape}")
    kind = instance.kind
    if kind is HardKind.BIPARTITE_K1:
        return (approx[instance.perm[0]].mean(axis=1) - 1.5)[None]
    if kind is HardKind.BIPARTITE_KBLOCK:
        out = np.empty(instance.perm.shape)
        for b, perm in enumerate(instance.perm):
            means = approx[perm, b * r:(b + 1) * r].mean(axis=1)
            out[b] = means - 2.0 - instance.signs[b][perm]
        return out

    # symmetric kinds: the instance rows live in the lower-left block and,
    # mirrored, in the upper-right block
    lower, upper = approx[n:, :n], approx[:n, n:].T
    both = 0.5 * (lower + upper)
    unsqueeze = lambda y: (y - p["offset"]) / p["scale"]
    if kind is HardKind.SYMMETRIC_K1:
        return (unsqueeze(both[instance.perm[0]].mean(axis=1)) - 1.5)[None]
    width = p["k"] * r
    col_block = (np.arange(n) % width) // r
    out = np.empty(instance.perm.shape)
    for b, perm in enumerate(instance.perm):
        means = unsqueeze(both[np.ix_(perm, col_block == b)].mean(axis=1))
        out[b] = means - 2.0 - instance.signs[b][perm]
    return out


def recover_majorities(instance: HardInstance):
    """Majority bits and tie markers read back from the stored matrix."""
    z = instance_scores(instance, instance.matrix)
    ties = np.abs(z) < TIE_TOL
    return ((z > 0) & ~ties).astype(np.int8), ties


def decode_majorities(instance: HardInstance, factors):
    """Threshold the approximation's per-instance means.

    Returns the flat predicted bits (one per embedded instance) and the
    success rate over instances without a tie.
    """
    if isinstance(factors, Factors):
        approx = compose(factors.V, factors.U)
    elif isinstance(factors, tuple):
        approx = compose(*factors)
    else:
        approx = np.asarray(factors, dtype=np.float64)
    bits = (instance_scores(instance, approx) > 0).astype(np.int8)
    decided = ~instance.ties
    if not decided.any():
        return bits.ravel(), float("nan")
    rate = float(np.mean(bits[decided] == instance.majorities[decided]))
    return bits.ravel(), rate


@dataclass
class TypicalityReport:
    gamma: float
    typical_count: int
    total: int
    ties: int

    @property
    def fraction(self) -> float:
        """Typical share among instances that have a strict majority."""
        decided = self.total - self.ties
        return self.typical_count / decided if decided else float("nan")

    @property
    def fraction_all(self) -> float:
        return self.typical_count / self.total


def typicality(instance: HardInstance, gamma: float) -> TypicalityReport:
    """Count instances whose majority symbol appears >= r/2 + gamma sqrt(r) times."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    r = instance.r
    counts = instance.upper_counts
    lead = np.maximum(counts, r - counts)
    typical = lead >= r / 2 + gamma * math.sqrt(r) - TIE_TOL
    return TypicalityReport(gamma, int(typical.sum()), int(counts.size), int(instance.ties.sum()))


def majority_lead_tail(r: int) -> dict:
    """Exact law of the majority count c of a uniform length-r string.

    Maps each c > r/2 to P(lead count >= c | no tie), as a Fraction.
    """
    total = Fraction(0)
    mass = {}
    for c in range(r, r // 2, -1):
        # both symbols can be the majority one
        total += Fraction(2 * math.comb(r, c), 2**r)
        mass[c] = total
    no_tie = 1 - (Fraction(math.comb(r, r // 2), 2**r) if r % 2 == 0 else 0)
    return {c: v / no_tie for c, v in mass.items()}


def gamma_for_delta(r: int, delta: float) -> float:
    """Largest gamma with P(lead >= r/2 + gamma sqrt(r) | no tie) >= 1 - delta.

    Computed from exact binomial tails; the threshold is the largest majority
    count whose conditional tail still carries 1 - delta of the mass.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    tails = majority_lead_tail(r)
    target = Fraction(1) - Fraction(delta).limit_denominator(10**9)
    best = max(c for c, p in tails.items() if p >= target)
    return (best - r / 2) / math.sqrt(r)


def metric_completion(instance: HardInstance) -> np.ndarray:
    """Symmetric matrix on rows + columns of a bipartite-k1 instance.

    Row points are 1 apart from each other, column points are 1 apart, the
    far row point is M from every other row point, and row-column distances
    are the instance entries.
    """
    if instance.kind is not HardKind.BIPARTITE_K1:
        raise ValueError("completion is defined for bipartite-k1 instances")
    A = instance.matrix
    rows, r = A.shape
    n = rows - 1
    D = np.ones((rows + r, rows + r))
    D[:rows, rows:] = A
    D[rows:, :rows] = A.T
    D[n, :n] = D[:n, n] = instance.params["M"]
    np.fill_diagonal(D, 0.0)
    return D
