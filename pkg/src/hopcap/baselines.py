"""Static capacity formulas that depend only on N and worst-case statistics.

All logarithms are natural.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "StaticEstimate",
    "mceliece_capacity",
    "lowe_gamma_bias",
    "lowe_gamma_corr",
    "lowe_capacity",
    "MCELIECE_GAMMA",
]

# N / (4 ln N) written as N / (gamma ln N)
MCELIECE_GAMMA = 4.0


@dataclass(frozen=True)
class StaticEstimate:
    model: str  # "mceliece", "lowe-bias" or "lowe-corr"
    capacity: float
    gamma: float | None = None
    delta: float | None = None

    @property
    def patterns(self) -> int:
        return math.floor(self.capacity)


def _check_n(N):
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")


def mceliece_capacity(N: int, delta: float = 0.0) -> StaticEstimate:
    _check_n(N)
    if not (0.0 <= delta < 0.5):
        raise ValueError(f"delta must satisfy 0 <= delta < 0.5, got {delta}")
    cap = (1.0 - 2.0 * delta) ** 2 / 4.0 * N / math.log(N)
    return StaticEstimate("mceliece", cap, gamma=MCELIECE_GAMMA, delta=delta)


def lowe_gamma_bias(b: float) -> float:
    if not (0.0 < b < 1.0):
        raise ValueError(f"gamma diverges for b={b}; need 0 < b < 1")
    return 3.0 / (8.0 * b**2 * (1.0 - b) ** 2)


def lowe_gamma_corr(c: float) -> float:
    if not (0.0 <= c < 1.0):
        raise ValueError(f"need 0 <= c < 1, got {c}")
    return 48.0 * c * (1.0 - c) * (c**2 + (1.0 - c) ** 2)


def lowe_capacity(N: int, gamma: float, model: str = "lowe-bias") -> StaticEstimate:
    _check_n(N)
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}; clamp before calling")
    return StaticEstimate(model, N / (gamma * math.log(N)), gamma=gamma)
