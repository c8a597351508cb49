"""Hopfield associative memory with online crosstalk-based capacity monitoring."""
from .baselines import (
    StaticEstimate,
    lowe_capacity,
    lowe_gamma_bias,
    lowe_gamma_corr,
    mceliece_capacity,
)
from .crosstalk import (
    WEIGHTING_MODES,
    CapacityVerdict,
    CrosstalkMonitor,
    exact_crosstalk_kappa,
    expected_crosstalk,
    kappa_matrix,
    new_column,
)
from .harness import (
    CapExceededError,
    SuiteSummary,
    TrialConfig,
    TrialRecord,
    run_suite,
    run_trial,
    simulate_trial,
    true_capacity,
    verify_generator,
)
from .network import Network, RecallOutcome, StabilityTracker, load_weights, save_weights
from .patterns import (
    ChainStatistics,
    GenConfig,
    PatternSet,
    expectation,
    generate,
    measure_bias,
    measure_correlation,
    n_step_transition,
    rho,
    transition_params,
)

__version__ = "0.1.0"
