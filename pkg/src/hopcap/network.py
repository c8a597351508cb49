"""Hopfield network with Hebbian storage and synchronous recall."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "DimensionError",
    "Network",
    "RecallOutcome",
    "StabilityTracker",
    "save_weights",
    "load_weights",
    "WEIGHTS_MAGIC",
    "WEIGHTS_VERSION",
]

WEIGHTS_MAGIC = b"HOPW"
WEIGHTS_VERSION = 1
_HEADER = struct.Struct("<4sIq")  # magic, format version, N


class DimensionError(ValueError):
    pass


def _check_pattern(x, N: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[0] != N:
        raise DimensionError(f"pattern length {x.shape[0]} != network size {N}")
    return x


def _sign_keep(a: np.ndarray, current: np.ndarray) -> np.ndarray:
    # sgn with ties resolved to the current bit
    out = np.sign(a).astype(np.int8)
    tie = out == 0
    if np.any(tie):
        out[tie] = np.asarray(current, dtype=np.int8)[tie]
    return out


@dataclass
class RecallOutcome:
    state: np.ndarray
    converged: bool
    iterations: int


class Network:
    """``N``-neuron Hopfield network.

    Weights carry the ``1/N`` scale from the moment a pattern is stored.  With
    the plain Hebb rule every activation is an integer multiple of ``1/N``;
    activations are snapped to that grid so ties (zero activation) are exact.

    ``zero_centered=True`` stores ``(x - m)(x - m)^T / N`` with ``m = 2b - 1``.
    """

    def __init__(self, N: int, zero_centered: bool = False, bias: float = 0.5):
        if N < 2:
            raise DimensionError(f"network needs N >= 2, got {N}")
        self.N = N
        self.weights = np.zeros((N, N), dtype=np.float64)
        self.stored_count = 0
        self.zero_centered = zero_centered
        self.mean = (2.0 * bias - 1.0) if zero_centered else 0.0

    @property
    def learning_rule(self) -> str:
        return "zero-centered" if self.zero_centered else "hebb"

    def copy(self) -> "Network":
        other = Network.__new__(Network)
        other.__dict__.update(self.__dict__)
        other.weights = self.weights.copy()
        return other

    def _centered(self, x: np.ndarray) -> np.ndarray:
        x = x.astype(np.float64)
        return x - self.mean if self.zero_centered else x

    def store(self, x) -> "Network":
        x = _check_pattern(x, self.N)
        u = self._centered(x)
        # Symmetric rank-1 update; diagonal stays exactly zero.
        self.weights += np.outer(u, u) / self.N
        np.fill_diagonal(self.weights, 0.0)
        self.stored_count += 1
        return self

    def store_many(self, X) -> "Network":
        for x in np.asarray(X).T:
            self.store(x)
        return self

    def _snap(self, a: np.ndarray) -> np.ndarray:
        if self.zero_centered:
            return a
        return np.rint(a * self.N) / self.N

    def activation(self, x) -> np.ndarray:
        """Local field ``W x`` for one pattern or an ``N x k`` batch."""
        x = _check_pattern(x, self.N)
        return self._snap(self.weights @ x.astype(np.float64))

    def recall_one_step(self, x) -> np.ndarray:
        x = _check_pattern(x, self.N)
        return _sign_keep(self.activation(x), x)

    def is_fixed_point(self, x) -> bool:
        x = _check_pattern(x, self.N)
        return bool(np.array_equal(self.recall_one_step(x), np.asarray(x, dtype=np.int8)))

    def fixed_point_mask(self, X) -> np.ndarray:
        """Per-column fixed-point test for an ``N x k`` batch."""
        X = _check_pattern(X, self.N)
        return np.all(self.recall_one_step(X) == X, axis=0)

    def recall_relax(self, x, max_sweeps: int = 100) -> RecallOutcome:
        if max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        state = np.asarray(_check_pattern(x, self.N), dtype=np.int8)
        for sweep in range(1, max_sweeps + 1):
            nxt = self.recall_one_step(state)
            if np.array_equal(nxt, state):
                return RecallOutcome(state, True, sweep)
            state = nxt
        return RecallOutcome(state, False, max_sweeps)

    def relax_mask(self, X, max_sweeps: int = 100) -> np.ndarray:
        """Columns that relax to themselves (batched ``recall_relax``)."""
        X = np.asarray(_check_pattern(X, self.N), dtype=np.int8)
        state = X.copy()
        done = np.zeros(X.shape[1], dtype=bool)
        for _ in range(max_sweeps):
            nxt = self.recall_one_step(state)
            done = np.all(nxt == state, axis=0)
            state = nxt
            if done.all():
                break
        return done & np.all(state == X, axis=0)

    def energy(self, x) -> float:
        x = _check_pattern(x, self.N).astype(np.float64)
        return float(-0.5 * x @ self.weights @ x)


class StabilityTracker:
    """Keeps the activation of every stored pattern current as patterns arrive.

    Maintaining ``A = W X`` incrementally costs ``O(N m)`` per store instead of
    ``O(N^2 m)`` for recomputing; ``tests`` cross-check it against
    :meth:`Network.fixed_point_mask`.
    """

    def __init__(self, N: int, capacity: int = 64, zero_centered: bool = False,
                 bias: float = 0.5):
        self.N = N
        self.m = 0
        self.zero_centered = zero_centered
        self.mean = (2.0 * bias - 1.0) if zero_centered else 0.0
        self._X = np.zeros((N, capacity), dtype=np.float64)
        self._A = np.zeros((N, capacity), dtype=np.float64)

    def _grow(self):
        cap = self._X.shape[1] * 2
        for name in ("_X", "_A"):
            old = getattr(self, name)
            new = np.zeros((self.N, cap), dtype=np.float64)
            new[:, : old.shape[1]] = old
            setattr(self, name, new)

    @property
    def patterns(self) -> np.ndarray:
        return self._X[:, : self.m]

    @property
    def activations(self) -> np.ndarray:
        A = self._A[:, : self.m]
        return A if self.zero_centered else np.rint(A * self.N) / self.N

    def add(self, x) -> None:
        x = _check_pattern(x, self.N).astype(np.float64)
        if self.m == self._X.shape[1]:
            self._grow()
        u = x - self.mean if self.zero_centered else x
        m = self.m
        if m:
            U = self._X[:, :m] - self.mean
            self._A[:, m] = (U @ (U.T @ x) - (U * U).sum(axis=1) * x) / self.N
        self._X[:, m] = x
        # W' x^mu = W x^mu + (u (u . x^mu) - u*u*x^mu) / N, diagonal excluded
        X = self._X[:, : m + 1]
        proj = u @ X
        self._A[:, : m + 1] += (np.outer(u, proj) - (u * u)[:, None] * X) / self.N
        self.m = m + 1

    def stable_mask(self) -> np.ndarray:
        X = self.patterns
        return np.all(_sign_keep(self.activations, X) == X, axis=0)

    def all_stable(self) -> bool:
        return bool(self.stable_mask().all())


def save_weights(network: Network, path) -> None:
    """Binary dump: little-endian header (b"HOPW", uint32 version, int64 N)
    followed by the N*N weights as row-major float64."""
    path = Path(path)
    try:
        with path.open("wb") as fh:
            fh.write(_HEADER.pack(WEIGHTS_MAGIC, WEIGHTS_VERSION, network.N))
            fh.write(np.ascontiguousarray(network.weights, dtype="<f8").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write weights to {path}: {exc}") from exc


def load_weights(path) -> Network:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated weight file")
    magic, version, N = _HEADER.unpack_from(data)
    if magic != WEIGHTS_MAGIC:
        raise ValueError(f"{path}: not a weight dump (magic {magic!r})")
    if version != WEIGHTS_VERSION:
        raise ValueError(f"{path}: unsupported weight format version {version}")
    body = data[_HEADER.size:]
    if len(body) != 8 * N * N:
        raise ValueError(f"{path}: expected {N * N} weights, found {len(body) // 8}")
    net = Network(int(N))
    net.weights = np.frombuffer(body, dtype="<f8").reshape(N, N).astype(np.float64)
    return net
