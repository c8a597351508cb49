"""Seeded Monte-Carlo trials comparing dynamic and static capacity estimates."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import baselines
from .crosstalk import WEIGHTING_MODES, CrosstalkMonitor
from .network import Network, StabilityTracker
from .patterns import (
    PatternSet,
    in_deviation_regime,
    iter_patterns,
    measure_bias,
    measure_correlation,
)

log = logging.getLogger(__name__)

__all__ = [
    "CapExceededError",
    "TrialConfig",
    "TrialRecord",
    "ModelStats",
    "SuiteSummary",
    "true_capacity",
    "run_trial",
    "simulate_trial",
    "TrialRun",
    "run_suite",
    "verify_generator",
    "static_estimates",
    "RECALL_MODES",
    "B_CLAMP",
    "C_CLAMP",
]

RECALL_MODES = ("fixed-point", "relax")
B_CLAMP = (0.5, 0.95)
C_CLAMP = (0.0, 0.9)
STATIC_MODELS = ("mceliece", "lowe-bias", "lowe-corr")


class CapExceededError(RuntimeError):
    """Storage reached ``max_patterns`` before every quantity was determined."""


@dataclass(frozen=True)
class TrialConfig:
    N: int = 1000
    b_mean: float = 0.5
    b_std: float = 0.0
    c_mean: float = 0.0
    c_std: float = 0.0
    trials: int = 20
    seed: int = 0
    weighting: str = "expectation"
    compare_modes: bool = True
    recall: str = "fixed-point"
    max_patterns: int | None = None
    threshold: float = 1.0
    online_stats: bool = False
    zero_centered: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.weighting not in WEIGHTING_MODES:
            raise ValueError(f"weighting must be one of {WEIGHTING_MODES}")
        if self.recall not in RECALL_MODES:
            raise ValueError(f"recall must be one of {RECALL_MODES}")
        if self.N < 2:
            raise ValueError("N must be >= 2")

    @property
    def cap(self) -> int:
        return self.max_patterns if self.max_patterns is not None else self.N

    @property
    def key(self) -> tuple:
        return (self.N, self.b_mean, self.b_std, self.c_mean, self.c_std)

    @property
    def modes(self) -> tuple[str, ...]:
        if not self.compare_modes:
            return (self.weighting,)
        return (self.weighting,) + tuple(m for m in WEIGHTING_MODES if m != self.weighting)

    def model_name(self, mode: str) -> str:
        return "dynamic" if mode == self.weighting else f"dynamic-{mode}"

    def worst_case(self) -> tuple[float, float]:
        return self.b_mean + 3 * self.b_std, self.c_mean + 3 * self.c_std


@dataclass
class TrialRecord:
    index: int
    b: float
    c: float
    realized_b: float
    realized_c: float
    true_capacity: int
    estimates: dict[str, float]
    accuracy: dict[str, float]
    efficiency: dict[str, float]
    safe: dict[str, bool]
    static_recall: dict[str, float] = field(default_factory=dict)
    patterns_stored: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(**d)


def static_estimates(config: TrialConfig) -> dict[str, baselines.StaticEstimate]:
    """Worst-case static capacities at ``mean + 3 std``."""
    N = config.N
    b_w, c_w = config.worst_case()
    b_w = min(b_w, 0.999)
    c_w = min(c_w, 0.999)
    gamma_corr = max(baselines.lowe_gamma_corr(c_w), baselines.MCELIECE_GAMMA)
    return {
        "mceliece": baselines.mceliece_capacity(N, 0.0),
        "lowe-bias": baselines.lowe_capacity(N, baselines.lowe_gamma_bias(b_w), "lowe-bias"),
        "lowe-corr": baselines.lowe_capacity(N, gamma_corr, "lowe-corr"),
    }


def _recalled_mask(network: Network, tracker: StabilityTracker, recall: str) -> np.ndarray:
    if recall == "fixed-point":
        return tracker.stable_mask()
    return network.relax_mask(tracker.patterns)


def true_capacity(patterns, network: Network | None = None, recall: str = "fixed-point"):
    """Store patterns in order until one stored pattern stops being recalled.

    Returns ``(C0, network)`` where ``C0`` is the count stored at the last step
    at which every stored pattern was recalled.
    """
    X = np.asarray(getattr(patterns, "patterns", patterns))
    N, M = X.shape
    if network is None:
        network = Network(N)
    tracker = StabilityTracker(N, zero_centered=network.zero_centered,
                               bias=(network.mean + 1) / 2)
    for k in range(M):
        network.store(X[:, k])
        tracker.add(X[:, k])
        if not _recalled_mask(network, tracker, recall).all():
            return k, network
    raise CapExceededError(f"all {M} supplied patterns were recalled; supply more patterns")


def _trial_params(config: TrialConfig, index: int) -> tuple[float, float, int]:
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, index]))
    b = float(np.clip(rng.normal(config.b_mean, config.b_std), *B_CLAMP))
    c = float(np.clip(rng.normal(config.c_mean, config.c_std), *C_CLAMP))
    pattern_seed = int(rng.integers(0, 2**63 - 1))
    return b, c, pattern_seed


@dataclass
class TrialRun:
    record: TrialRecord
    trace: list[dict]
    monitors: dict[str, CrosstalkMonitor]
    network: Network


def simulate_trial(config: TrialConfig, index: int = 0, trace: bool = False) -> TrialRun:
    """Run one trial, keeping the monitors, final network and optional trace.

    Patterns are stored until the true capacity is crossed, every monitor has
    flagged, and the largest static estimate has been reached.
    """
    N = config.N
    b, c, pattern_seed = _trial_params(config, index)
    statics = static_estimates(config)
    targets = {name: min(est.patterns, config.cap) for name, est in statics.items()}
    horizon = max(targets.values())

    net = Network(N, zero_centered=config.zero_centered, bias=b)
    tracker = StabilityTracker(N, zero_centered=config.zero_centered, bias=b)
    monitors = {
        mode: CrosstalkMonitor(N, b, c, weighting=mode, threshold=config.threshold,
                               online_stats=config.online_stats)
        for mode in config.modes
    }
    flagged: dict[str, int] = {}
    recall_at: dict[int, float] = {}
    c0 = None
    rows = []
    stream = iter_patterns(N, b, c, pattern_seed)
    k = 0
    while True:
        if k >= config.cap:
            raise CapExceededError(
                f"reached max_patterns={config.cap} (C0={c0}, flagged={sorted(flagged)})"
            )
        x = next(stream)
        for mode, mon in monitors.items():
            verdict = mon.store(net, x)
            if verdict.over_capacity and mode not in flagged:
                flagged[mode] = k
        net.store(x)
        tracker.add(x)
        k += 1
        need_mask = c0 is None or k in recall_at or k in targets.values() or trace
        if need_mask:
            mask = _recalled_mask(net, tracker, config.recall)
            if c0 is None and not mask.all():
                c0 = k - 1
            if k in targets.values():
                recall_at[k] = float(mask.mean())
        if trace:
            row = {"stored": k, "recalled": float(mask.mean())}
            for mode, mon in monitors.items():
                row[f"max_chi_{mode}"] = mon.max_history[-1]
            rows.append(row)
        if c0 is not None and len(flagged) == len(monitors) and k >= horizon:
            break

    X = tracker.patterns
    realized_b = measure_bias(X)
    realized_c = measure_correlation(X) if X.shape[1] >= 2 else float("nan")
    estimates: dict[str, float] = {"true": float(c0)}
    accuracy: dict[str, float] = {"true": 1.0}
    efficiency: dict[str, float] = {"true": c0 / N**2}
    safe: dict[str, bool] = {}
    for mode in config.modes:
        name = config.model_name(mode)
        chat = flagged[mode]
        estimates[name] = float(chat)
        accuracy[name] = chat / c0
        efficiency[name] = chat / N**2
        safe[name] = chat <= c0
    static_recall = {}
    for name, est in statics.items():
        estimates[name] = est.capacity
        accuracy[name] = est.capacity / c0
        static_recall[name] = recall_at.get(targets[name], 1.0)
        total_failure = est.patterns > c0 and static_recall[name] == 0.0
        efficiency[name] = 0.0 if total_failure else est.capacity / N**2
    record = TrialRecord(
        index=index, b=b, c=c, realized_b=realized_b, realized_c=realized_c,
        true_capacity=int(c0), estimates=estimates, accuracy=accuracy,
        efficiency=efficiency, safe=safe, static_recall=static_recall,
        patterns_stored=k,
    )
    return TrialRun(record, rows, monitors, net)


def run_trial(config: TrialConfig, index: int = 0) -> TrialRecord:
    return simulate_trial(config, index).record


@dataclass
class ModelStats:
    model: str
    accuracy_mean: float
    accuracy_std: float
    efficiency_mean: float
    efficiency_std: float


def _mean_std(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=np.float64)
    # constant columns would otherwise report rounding noise from the mean
    std = float(v.std(ddof=1)) if v.size > 1 and np.ptp(v) > 0 else 0.0
    return float(v.mean()), std


@dataclass
class SuiteSummary:
    config: TrialConfig
    records: list[TrialRecord]

    def __post_init__(self):
        if not self.records:
            raise ValueError("a suite summary needs at least one trial")

    @property
    def models(self) -> list[str]:
        return list(self.records[0].estimates)

    def c0_stats(self) -> tuple[float, float]:
        return _mean_std([r.true_capacity for r in self.records])

    def max_efficiency(self) -> tuple[float, float]:
        return _mean_std([r.efficiency["true"] for r in self.records])

    def model_stats(self, model: str) -> ModelStats:
        am, asd = _mean_std([r.accuracy[model] for r in self.records])
        em, esd = _mean_std([r.efficiency[model] for r in self.records])
        return ModelStats(model, am, asd, em, esd)

    def safe_fraction(self, model: str = "dynamic") -> float:
        return float(np.mean([r.safe[model] for r in self.records]))

    def to_dict(self) -> dict:
        return {"config": asdict(self.config), "records": [asdict(r) for r in self.records]}

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteSummary":
        names = {f.name for f in fields(TrialConfig)}
        cfg = TrialConfig(**{k: v for k, v in d["config"].items() if k in names})
        return cls(cfg, [TrialRecord.from_dict(r) for r in d["records"]])


def run_suite(config: TrialConfig, jobs: int = 1) -> SuiteSummary:
    if in_deviation_regime(*config.worst_case()):
        log.warning("config %s reaches the deviation-prone generator regime", config.key)
    indices = range(config.trials)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_trial, [config] * config.trials, indices))
    else:
        records = [run_trial(config, i) for i in indices]
    return SuiteSummary(config, records)


def verify_generator(b_values=None, c_values=None, N: int = 500, M: int = 200,
                     seed: int = 0) -> list[dict]:
    """Measured statistics of generated patterns over a nominal (b, c) grid."""
    if b_values is None:
        b_values = [0.5, 0.6, 0.7, 0.8, 0.9]
    if c_values is None:
        c_values = [0.0, 0.2, 0.4, 0.6, 0.8, 0.9]
    rows = []
    for i, b in enumerate(b_values):
        for j, c in enumerate(c_values):
            gen = iter_patterns(N, b, c, seed + 1000 * i + j)
            X = np.stack([next(gen) for _ in range(M)], axis=1)
            ps = PatternSet(X)
            rows.append({
                "N": N, "M": M, "b": b, "c": c,
                "measured_b": measure_bias(ps),
                "measured_c": measure_correlation(ps),
                "deviation_regime": in_deviation_regime(b, c),
            })
    return rows

