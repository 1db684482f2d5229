"""
Point sets, metrics and the metered distance-matrix oracle.

Every entry an algorithm looks at goes through a :class:`DistanceOracle`,
which charges it to a :class:`QueryLedger`.  The ledger is the certificate
that an approximation was computed from a sublinear number of reads.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

DEFAULT_CAP = 10**8

STAGES = ("weights", "sketch", "regression", "eval")


class CapExceeded(RuntimeError):
    """Raised when a dense materialization would exceed the entry cap."""


class MetricKind(enum.Enum):
    MANHATTAN = "l1"
    EUCLIDEAN = "l2"
    CHEBYSHEV = "linf"
    CANBERRA = "canberra"

    @classmethod
    def parse(cls, name: "str | MetricKind") -> "MetricKind":
        if isinstance(name, cls):
            return name
        aliases = {
            "l1": cls.MANHATTAN, "manhattan": cls.MANHATTAN, "cityblock": cls.MANHATTAN,
            "l2": cls.EUCLIDEAN, "euclidean": cls.EUCLIDEAN,
            "linf": cls.CHEBYSHEV, "chebyshev": cls.CHEBYSHEV,
            "canberra": cls.CANBERRA, "lc": cls.CANBERRA,
        }
        try:
            return aliases[str(name).lower()]
        except KeyError:
            raise ValueError(f"unknown metric {name!r}") from None


# scipy's canberra already maps 0/0 coordinate terms to 0
_SCIPY_NAMES = {
    MetricKind.MANHATTAN: "cityblock",
    MetricKind.EUCLIDEAN: "euclidean",
    MetricKind.CHEBYSHEV: "chebyshev",
    MetricKind.CANBERRA: "canberra",
}


def pairwise(metric: MetricKind, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Distances between every row of `P` and every row of `Q`."""
    metric = MetricKind.parse(metric)
    return cdist(P, Q, metric=_SCIPY_NAMES[metric])


def distance(metric, p, q) -> float:
    p = np.asarray(p, dtype=np.float64).ravel()
    q = np.asarray(q, dtype=np.float64).ravel()
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise ValueError("non-finite coordinate")
    return float(pairwise(metric, p[None, :], q[None, :])[0, 0])


class PointSet:
    """A finite set of points in R^dim, stored as a (count, dim) float64 array."""

    def __init__(self, points):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("a point set needs at least one point with at least one coordinate")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite coordinate in point set")
        pts.setflags(write=False)
        self.points = pts

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.array_equal(self.points, other.points))

    __hash__ = None

    def __repr__(self) -> str:
        return f"PointSet(count={self.count}, dim={self.dim})"


@dataclass
class QueryLedger:
    """Exact count of matrix entries read, split by pipeline stage."""

    weights_reads: int = 0
    sketch_reads: int = 0
    regression_reads: int = 0
    eval_reads: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def charge(self, stage: str, count: int) -> None:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        if count < 0:
            raise ValueError("read counts are nonnegative")
        attr = f"{stage}_reads"
        with self._lock:
            setattr(self, attr, getattr(self, attr) + int(count))

    def total(self) -> int:
        return self.weights_reads + self.sketch_reads + self.regression_reads + self.eval_reads

    def algo_total(self) -> int:
        return self.total() - self.eval_reads

    def snapshot(self) -> dict:
        with self._lock:
            return {f"{s}_reads": getattr(self, f"{s}_reads") for s in STAGES}

    @staticmethod
    def delta(after: dict, before: dict) -> dict:
        return {key: after[key] - before[key] for key in after}


class DistanceOracle:
    """Lazily evaluated, metered view of an n x m distance matrix.

    Two backends share the same metering: point sets with a metric (entries
    computed on demand) and a dense matrix (used for hard instances).  Reads
    are charged per entry, so reading a row costs m and a column costs n.
    """

    def __init__(self, *, left=None, right=None, metric=None, matrix=None,
                 symmetric=False, ledger=None):
        self.ledger = ledger if ledger is not None else QueryLedger()
        if matrix is not None:
            A = np.array(matrix, dtype=np.float64)
            if A.ndim != 2 or A.size == 0:
                raise ValueError("matrix backend needs a nonempty 2-D array")
            if not np.all(np.isfinite(A)):
                raise ValueError("non-finite matrix entry")
            A.setflags(write=False)
            self._matrix = A
            self.left = self.right = None
            self.metric = None
            self.shape = A.shape
        else:
            if left.dim != right.dim:
                raise ValueError(f"dimension mismatch: {left.dim} vs {right.dim}")
            self._matrix = None
            self.left, self.right = left, right
            self.metric = MetricKind.parse(metric)
            self.shape = (left.count, right.count)
        self.symmetric = bool(symmetric)

    @classmethod
    def from_matrix(cls, matrix, symmetric=None) -> "DistanceOracle":
        """Dense backend; `symmetric=None` detects a square symmetric zero-diagonal matrix."""
        A = np.asarray(matrix, dtype=np.float64)
        if symmetric is None:
            symmetric = (A.ndim == 2 and A.shape[0] == A.shape[1]
                         and np.array_equal(A, A.T) and not np.any(np.diag(A)))
        elif symmetric and not (A.shape[0] == A.shape[1] and np.array_equal(A, A.T)):
            raise ValueError("matrix is not symmetric")
        return cls(matrix=A, symmetric=symmetric)

    @property
    def n(self) -> int:
        return self.shape[0]

    @property
    def m(self) -> int:
        return self.shape[1]

    def _block(self, rows, cols) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix[np.ix_(rows, cols)]
        return pairwise(self.metric, self.left.points[rows], self.right.points[cols])

    def entry(self, i: int, j: int, stage: str = "eval") -> float:
        if not (0 <= i < self.n and 0 <= j < self.m):
            raise IndexError(f"entry ({i}, {j}) outside {self.shape}")
        self.ledger.charge(stage, 1)
        return float(self._block([i], [j])[0, 0])

    def rows(self, idx, stage: str = "eval") -> np.ndarray:
        """Full rows `idx` (repeats allowed, each charged), shape (len(idx), m)."""
        idx = np.asarray(idx, dtype=np.intp).ravel()
        self.ledger.charge(stage, idx.size * self.m)
        return self._block(idx, np.arange(self.m))

    def cols(self, idx, stage: str = "eval") -> np.ndarray:
        """Full columns `idx`, shape (n, len(idx))."""
        idx = np.asarray(idx, dtype=np.intp).ravel()
        self.ledger.charge(stage, idx.size * self.n)
        return self._block(np.arange(self.n), idx)

    def row(self, i: int, stage: str = "eval") -> np.ndarray:
        return self.rows([i], stage)[0]

    def col(self, j: int, stage: str = "eval") -> np.ndarray:
        return self.cols([j], stage)[:, 0]

    def __repr__(self) -> str:
        kind = "symmetric" if self.symmetric else "bipartite"
        backend = "dense" if self._matrix is not None else self.metric.value
        return f"DistanceOracle({self.n}x{self.m}, {kind}, {backend})"


def make_oracle(left: PointSet, right: PointSet, metric) -> DistanceOracle:
    if left.dim != right.dim:
        raise ValueError(f"dimension mismatch: {left.dim} vs {right.dim}")
    symmetric = left is right or left == right
    return DistanceOracle(left=left, right=left if symmetric else right,
                          metric=metric, symmetric=symmetric)


def materialize(oracle: DistanceOracle, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Dense n x m copy of the oracle's matrix, charged to eval_reads."""
    n, m = oracle.shape
    if n * m > cap:
        raise CapExceeded(f"{n}x{m} = {n * m} entries exceeds cap {cap}")
    oracle.ledger.charge("eval", n * m)
    return oracle._block(np.arange(n), np.arange(m))


def triangle_violations(D: np.ndarray, rtol: float = 1e-12) -> int:
    """Number of ordered triples (x, y, z) with D[x,y] > D[x,z] + D[z,y].

    Brute force over every intermediate point; meant for matrices with at
    most a few hundred points.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("triangle check needs a square matrix")
    scale = max(float(np.abs(D).max(initial=0.0)), 1.0)
    bad = 0
    for z in range(D.shape[0]):
        through = D[:, z][:, None] + D[z, :][None, :]
        bad += int(np.count_nonzero(D > through + rtol * scale))
    return bad
