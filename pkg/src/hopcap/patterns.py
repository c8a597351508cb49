"""Biased and correlated binary patterns.

Each neuron's value across successive patterns follows its own two-state
Markov chain.  ``+1`` persists with probability ``b + c(1 - b)`` and ``-1``
with probability ``1 - b + cb``, so ``b`` is the stationary bias and ``c``
controls how strongly pattern ``mu`` resembles pattern ``mu - 1``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

__all__ = [
    "ParameterError",
    "DegenerateChainError",
    "GenConfig",
    "PatternSet",
    "ChainStatistics",
    "transition_params",
    "n_step_transition",
    "rho",
    "expectation",
    "iter_patterns",
    "generate",
    "measure_bias",
    "measure_correlation",
    "lag_products",
    "DEVIATION_BIAS",
    "DEVIATION_CORR",
]

# Heuristic edges of the regime where measured statistics drift from nominal.
DEVIATION_BIAS = 0.7
DEVIATION_CORR = 0.5


class ParameterError(ValueError):
    """Bias or correlation outside the supported domain."""


class DegenerateChainError(ValueError):
    """The chain never switches state (alpha + beta == 0)."""


def _check_bc(b: float, c: float) -> None:
    if not (0.5 <= b < 1.0):
        raise ParameterError(f"bias b must satisfy 0.5 <= b < 1, got {b!r}")
    if not (0.0 <= c < 1.0):
        raise ParameterError(f"correlation c must satisfy 0 <= c < 1, got {c!r}")


def in_deviation_regime(b: float, c: float) -> bool:
    return b > DEVIATION_BIAS or c > DEVIATION_CORR


@dataclass(frozen=True)
class GenConfig:
    N: int
    M: int
    b: float = 0.5
    c: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ParameterError(f"N must be >= 2, got {self.N}")
        if self.M < 1:
            raise ParameterError(f"M must be >= 1, got {self.M}")
        _check_bc(self.b, self.c)


@dataclass
class PatternSet:
    """``M`` patterns stored column-wise in an ``N x M`` int8 array of +/-1."""

    patterns: np.ndarray
    config: GenConfig | None = None

    def __post_init__(self):
        p = np.asarray(self.patterns)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2:
            raise ValueError("patterns must be an N x M array")
        if not np.all((p == 1) | (p == -1)):
            raise ValueError("pattern entries must be exactly +1 or -1")
        self.patterns = p.astype(np.int8, copy=False)
        if self.config is not None and p.shape != (self.config.N, self.config.M):
            raise ValueError(
                f"pattern shape {p.shape} does not match config "
                f"({self.config.N}, {self.config.M})"
            )

    @property
    def N(self) -> int:
        return self.patterns.shape[0]

    @property
    def M(self) -> int:
        return self.patterns.shape[1]

    def __len__(self) -> int:
        return self.M

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.patterns[:, mu]

    def __iter__(self) -> Iterator[np.ndarray]:
        for mu in range(self.M):
            yield self.patterns[:, mu]

    def to_text(self) -> str:
        """One pattern per line, entries space-separated."""
        lines = [" ".join("+1" if v > 0 else "-1" for v in col) for col in self]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PatternSet":
        rows = [[int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()]
        return cls(np.array(rows, dtype=np.int8).T)

    def save_text(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load_text(cls, path) -> "PatternSet":
        return cls.from_text(Path(path).read_text())


@dataclass(frozen=True)
class ChainStatistics:
    """Transition probabilities of the per-neuron chain and derived quantities."""

    alpha: float  # P(-1 | previous +1)
    beta: float  # P(+1 | previous -1)
    b: float = field(default=0.5)

    @property
    def c(self) -> float:
        return 1.0 - (self.alpha + self.beta)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.alpha, self.alpha], [self.beta, 1.0 - self.beta]])

    def P(self, n: int) -> np.ndarray:
        return n_step_transition(self, n)

    def rho(self, n):
        return rho(self, self.b, n)

    def e(self, n):
        return expectation(self, self.b, n)


def transition_params(b: float, c: float) -> ChainStatistics:
    _check_bc(b, c)
    return ChainStatistics(alpha=(1.0 - c) * (1.0 - b), beta=(1.0 - c) * b, b=b)


def n_step_transition(stats: ChainStatistics, n: int) -> np.ndarray:
    """Closed-form ``P**n`` using the eigenvalues 1 and ``1 - alpha - beta``."""
    if n < 1:
        raise ValueError(f"step count must be >= 1, got {n}")
    s = stats.alpha + stats.beta
    if s <= 0.0:
        raise DegenerateChainError("alpha + beta == 0: chain is frozen (c == 1)")
    lam = (1.0 - s) ** n
    a, bt = stats.alpha / s, stats.beta / s
    return np.array([[bt + a * lam, a - a * lam], [bt - bt * lam, a + bt * lam]])


def _p_diag(stats: ChainStatistics, n):
    # Vectorized P11, P22 over an array of step counts.
    n = np.asarray(n)
    if np.any(n < 1):
        raise ValueError("step counts must be >= 1")
    s = stats.alpha + stats.beta
    if s <= 0.0:
        raise DegenerateChainError("alpha + beta == 0: chain is frozen (c == 1)")
    lam = (1.0 - s) ** n
    a, bt = stats.alpha / s, stats.beta / s
    return bt + a * lam, a + bt * lam


def rho(stats: ChainStatistics, b: float, n):
    """Probability that a neuron agrees with itself ``n`` patterns earlier."""
    p11, p22 = _p_diag(stats, n)
    out = b * p11 + (1.0 - b) * p22
    return float(out) if np.ndim(out) == 0 else out


def expectation(stats: ChainStatistics, b: float, n):
    """``E(x_i^mu x_i^(mu-n)) = 2 rho(n) - 1``."""
    r = rho(stats, b, n)
    return 2.0 * r - 1.0


def _pattern_uniforms(seed: int, mu: int, N: int) -> np.ndarray:
    # One independent stream per (seed, pattern index): chunking and order
    # of generation never change the outcome.
    return np.random.default_rng(np.random.SeedSequence([seed, mu])).random(N)


def iter_patterns(N: int, b: float, c: float, seed: int, start: int = 0,
                  previous: np.ndarray | None = None) -> Iterator[np.ndarray]:
    """Yield patterns ``start, start+1, ...`` of the chain indefinitely.

    ``previous`` must be pattern ``start - 1`` when ``start > 0``.
    """
    _check_bc(b, c)
    p_stay_plus = b + c * (1.0 - b)
    p_plus_from_minus = (1.0 - c) * b
    mu = start
    prev = previous
    if mu > 0 and prev is None:
        raise ValueError("previous pattern required when start > 0")
    while True:
        u = _pattern_uniforms(seed, mu, N)
        if mu == 0:
            p_plus = np.full(N, b)
        else:
            p_plus = np.where(prev > 0, p_stay_plus, p_plus_from_minus)
        x = np.where(u < p_plus, 1, -1).astype(np.int8)
        yield x
        prev = x
        mu += 1


def generate(config: GenConfig) -> PatternSet:
    if in_deviation_regime(config.b, config.c):
        warnings.warn(
            f"b={config.b}, c={config.c} lies in the highly biased/correlated "
            "regime where measured statistics may deviate from nominal",
            RuntimeWarning,
            stacklevel=2,
        )
    gen = iter_patterns(config.N, config.b, config.c, config.seed)
    X = np.empty((config.N, config.M), dtype=np.int8)
    for mu in range(config.M):
        X[:, mu] = next(gen)
    return PatternSet(X, config)


def _as_array(patterns) -> np.ndarray:
    if isinstance(patterns, PatternSet):
        return patterns.patterns
    arr = np.asarray(patterns)
    return arr[:, None] if arr.ndim == 1 else arr


def measure_bias(patterns) -> float:
    X = _as_array(patterns)
    if X.size == 0:
        raise ValueError("empty pattern set")
    return float((1.0 + X.mean(dtype=np.float64)) / 2.0)


def lag_products(patterns, n: int = 1) -> np.ndarray:
    """All products ``x_i^mu x_i^(mu-n)``, shape ``N x (M - n)``."""
    X = _as_array(patterns).astype(np.int64)
    if X.shape[1] <= n:
        raise ValueError(f"need more than {n} patterns, got {X.shape[1]}")
    return X[:, n:] * X[:, :-n]


def measure_correlation(patterns) -> float:
    """Estimate ``c`` from the mean product of successive patterns.

    Inverts ``e(1) = 1 - 4 b (1 - b)(1 - c)`` at the measured bias, which at
    ``b = 0.5`` reduces to ``c = e(1)``.
    """
    X = _as_array(patterns)
    if X.shape[1] < 2:
        raise ValueError("correlation needs at least two patterns")
    e1 = float(lag_products(X, 1).mean(dtype=np.float64))
    b = measure_bias(X)
    spread = 4.0 * b * (1.0 - b)
    if spread == 0.0:
        # Every element identical: successive patterns are equal.
        return 1.0
    return float(np.clip(1.0 - (1.0 - e1) / spread, 0.0, 1.0))
