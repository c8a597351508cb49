"""Online destructive-crosstalk bookkeeping for a learning Hopfield network.

The monitor keeps an ``N x m`` matrix ``chi`` whose entry ``[n, mu]`` tracks
``-x_n^mu * kappa_n^mu``: positive values push neuron ``n`` of pattern ``mu``
towards the wrong sign.  A new pattern's column is computed exactly from the
current weights; the interference it adds to older patterns is estimated
from the chain statistics, unless ``weighting="exact"``.

Pattern and neuron indices are zero-based throughout.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import DimensionError, Network
from .patterns import (
    ChainStatistics,
    expectation,
    measure_bias,
    measure_correlation,
    rho,
    transition_params,
)

__all__ = [
    "WEIGHTING_MODES",
    "CapacityVerdict",
    "CrosstalkMonitor",
    "new_column",
    "exact_crosstalk_kappa",
    "kappa_matrix",
    "expected_crosstalk",
]

WEIGHTING_MODES = ("expectation", "raw", "exact")


@dataclass(frozen=True)
class CapacityVerdict:
    over_capacity: bool
    worst_entry: tuple[int, int, float] | None  # (neuron, pattern, value)


def _activation(W, x: np.ndarray) -> np.ndarray:
    if isinstance(W, Network):
        return W.activation(x)
    W = np.asarray(W, dtype=np.float64)
    if W.shape != (x.shape[0], x.shape[0]):
        raise DimensionError(f"weights {W.shape} incompatible with pattern length {x.shape[0]}")
    return W @ x.astype(np.float64)


def new_column(W, x) -> np.ndarray:
    """Destructive crosstalk of ``x`` against weights that do not contain it yet."""
    x = np.asarray(x)
    return -x * _activation(W, x)


def exact_crosstalk_kappa(patterns, m: int, n: int) -> float:
    """Crosstalk on pattern ``m`` at neuron ``n`` by explicit summation."""
    X = np.asarray(getattr(patterns, "patterns", patterns), dtype=np.int64)
    N, M = X.shape
    if not (0 <= m < M):
        raise IndexError(f"pattern index {m} out of range for {M} patterns")
    if not (0 <= n < N):
        raise IndexError(f"neuron index {n} out of range for {N} neurons")
    total = 0
    for mu in range(M):
        if mu == m:
            continue
        for j in range(N):
            if j == n:
                continue
            total += X[n, mu] * X[j, mu] * X[j, m]
    return total / N


def kappa_matrix(patterns) -> np.ndarray:
    """All ``kappa_n^m`` at once: the masked triple sum over ``mu != m, j != n``."""
    X = np.asarray(getattr(patterns, "patterns", patterns), dtype=np.float64)
    N, M = X.shape
    off_n = 1.0 - np.eye(N)
    off_m = 1.0 - np.eye(M)
    total = np.einsum("nu,ju,jm,nj,um->nm", X, X, X, off_n, off_m, optimize=True)
    return total / N


def expected_crosstalk(stats: ChainStatistics, patterns, m: int, n: int) -> float:
    """``E(kappa_n^m)`` given the realized values at neuron ``n``."""
    X = np.asarray(getattr(patterns, "patterns", patterns))
    N, M = X.shape
    if not (0 <= m < M) or not (0 <= n < N):
        raise IndexError(f"index (n={n}, m={m}) out of range for {N} x {M}")
    others = np.array([mu for mu in range(M) if mu != m], dtype=int)
    if others.size == 0:
        return 0.0
    e = expectation(stats, stats.b, np.abs(others - m))
    return float((N - 1) / N * np.sum(X[n, others] * e))


def _stats_for(b: float, c: float) -> ChainStatistics:
    # The chain is symmetric under b <-> 1 - b; clamp into the supported domain.
    b = min(max(b, 1.0 - b), 0.999)
    c = min(max(c, 0.0), 0.999)
    return transition_params(b, c)


class CrosstalkMonitor:
    """Append-only crosstalk matrix with a capacity flag.

    Call :meth:`store` with the weights *before* ``x`` is added to them.
    """

    def __init__(self, N: int, b: float = 0.5, c: float = 0.0,
                 weighting: str = "expectation", threshold: float = 1.0,
                 online_stats: bool = False, capacity: int = 64):
        if weighting not in WEIGHTING_MODES:
            raise ValueError(f"weighting must be one of {WEIGHTING_MODES}, got {weighting!r}")
        if threshold <= 0:
            raise ValueError("threshold must be positive")
        self.N = N
        self.weighting = weighting
        self.threshold = threshold
        self.online_stats = online_stats
        self.nominal = (b, c)
        self.stats = _stats_for(b, c)
        self.m = 0
        self._chi = np.zeros((N, capacity))
        self._keep_patterns = weighting == "exact" or online_stats
        if self._keep_patterns:
            self._X = np.zeros((N, capacity), dtype=np.int64)
        if weighting == "exact":
            # N * chi is integral for the plain Hebb rule; accumulate it exactly.
            self._scaled = np.zeros((N, capacity), dtype=np.int64)
        self.max_history: list[float] = []

    @property
    def chi(self) -> np.ndarray:
        return self._chi[:, : self.m]

    @property
    def patterns(self) -> np.ndarray:
        if not self._keep_patterns:
            raise AttributeError("patterns are retained only in exact or online mode")
        return self._X[:, : self.m]

    def _grow(self):
        cap = 2 * self._chi.shape[1]
        for name in ("_chi", "_X", "_scaled"):
            if hasattr(self, name):
                old = getattr(self, name)
                new = np.zeros((self.N, cap), dtype=old.dtype)
                new[:, : old.shape[1]] = old
                setattr(self, name, new)

    def _weights(self, m: int) -> np.ndarray:
        if m == 0:
            return np.zeros(0)
        sep = m - np.arange(m)  # time separation of each stored pattern
        if self.weighting == "expectation":
            return expectation(self.stats, self.stats.b, sep)
        return rho(self.stats, self.stats.b, sep)

    def _refresh_stats(self, X: np.ndarray):
        b = measure_bias(X)
        c = measure_correlation(X) if X.shape[1] >= 2 else self.nominal[1]
        self.stats = _stats_for(b, c)

    def store(self, W_before, x) -> CapacityVerdict:
        x = np.asarray(x)
        if x.shape != (self.N,):
            raise DimensionError(f"pattern shape {x.shape} != ({self.N},)")
        if isinstance(W_before, Network) and W_before.stored_count != self.m:
            raise ValueError(
                f"monitor has seen {self.m} patterns but network stores {W_before.stored_count}"
            )
        col = new_column(W_before, x)
        m = self.m
        if m == self._chi.shape[1]:
            self._grow()
        if self._keep_patterns:
            self._X[:, m] = x
        if self.weighting == "exact":
            if isinstance(W_before, Network) and W_before.zero_centered:
                raise ValueError("exact weighting assumes the plain Hebb rule")
            xi = x.astype(np.int64)
            if m:
                Xp = self._X[:, :m]
                s = Xp.T @ xi  # overlaps including neuron i; removed per entry below
                self._scaled[:, :m] -= (xi[:, None] * Xp) * s[None, :] - 1
            self._scaled[:, m] = np.rint(col * self.N).astype(np.int64)
            self._chi[:, : m + 1] = self._scaled[:, : m + 1] / self.N
        else:
            if self.online_stats:
                self._refresh_stats(self._X[:, : m + 1])
            if m:
                self._chi[:, :m] += np.outer(col, self._weights(m))
            self._chi[:, m] = col
        self.m = m + 1
        verdict = self.check_capacity()
        self.max_history.append(verdict.worst_entry[2])
        return verdict

    def check_capacity(self) -> CapacityVerdict:
        if self.m == 0:
            return CapacityVerdict(False, None)
        chi = self.chi
        flat = int(np.argmax(chi))
        n, mu = np.unravel_index(flat, chi.shape)
        value = float(chi[n, mu])
        return CapacityVerdict(value >= self.threshold, (int(n), int(mu), value))

    def to_csv(self, path) -> None:
        """``N`` rows by ``m`` columns, header ``p0 .. p{m-1}``."""
        path = Path(path)
        try:
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow([f"p{mu}" for mu in range(self.m)])
                for row in self.chi:
                    w.writerow([repr(float(v)) for v in row])
        except OSError as exc:
            raise OSError(f"cannot write crosstalk snapshot to {path}: {exc}") from exc
