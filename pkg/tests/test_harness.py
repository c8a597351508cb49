import numpy as np
import pytest

from hopcap.harness import (
    CapExceededError,
    SuiteSummary,
    TrialConfig,
    run_suite,
    run_trial,
    simulate_trial,
    static_estimates,
    true_capacity,
    verify_generator,
)
from hopcap.network import Network
from hopcap.patterns import GenConfig, generate


def brute_c0(X):
    """First-failure capacity by rebuilding W and testing sgn(Wx) at every step."""
    N, M = X.shape
    for k in range(1, M + 1):
        S = X[:, :k].astype(np.float64)
        W = S @ S.T
        np.fill_diagonal(W, 0)
        F = W @ S
        if not np.all((np.sign(F) == S) | (F == 0)):
            return k - 1
    return None


@pytest.mark.parametrize("N,b,c,seed", [(10, 0.5, 0.0, 1), (120, 0.5, 0.0, 2),
                                        (200, 0.6, 0.2, 3), (150, 0.5, 0.3, 4)])
def test_true_capacity_matches_brute_force(N, b, c, seed):
    X = generate(GenConfig(N=N, M=N, b=b, c=c, seed=seed)).patterns
    c0, net = true_capacity(X)
    assert c0 == brute_c0(X)
    assert c0 >= 1
    assert net.stored_count == c0 + 1


def test_true_capacity_relax_semantics_agree():
    X = generate(GenConfig(N=150, M=100, seed=5)).patterns
    assert true_capacity(X, recall="relax")[0] == true_capacity(X)[0]


def test_duplicate_stream_hits_cap():
    x = generate(GenConfig(N=40, M=1, seed=6)).patterns[:, 0]
    X = np.tile(x[:, None], (1, 25))
    with pytest.raises(CapExceededError):
        true_capacity(X)


def test_trial_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(trials=0)
    with pytest.raises(ValueError):
        TrialConfig(weighting="nope")
    with pytest.raises(ValueError):
        TrialConfig(recall="nope")
    cfg = TrialConfig(weighting="raw")
    assert cfg.modes == ("raw", "expectation", "exact")
    assert cfg.model_name("raw") == "dynamic"
    assert cfg.model_name("exact") == "dynamic-exact"


def test_run_trial_deterministic_and_undispersed():
    cfg = TrialConfig(N=300, trials=1, seed=42)
    a, b = run_trial(cfg, 3), run_trial(cfg, 3)
    assert a == b
    assert a.b == 0.5 and a.c == 0.0
    n_el = 300 * a.patterns_stored
    assert abs(a.realized_b - 0.5) <= 4 * np.sqrt(0.25 / n_el)
    assert run_trial(cfg, 4) != a


def test_run_trial_record_consistency():
    cfg = TrialConfig(N=300, trials=1, seed=1)
    run = simulate_trial(cfg, 0)
    r = run.record
    c0 = r.true_capacity
    assert r.estimates["true"] == c0
    for name, est in r.estimates.items():
        assert r.accuracy[name] == pytest.approx(est / c0)
        assert r.efficiency[name] >= 0
    for name in ("dynamic", "dynamic-raw", "dynamic-exact"):
        assert r.safe[name] == (r.estimates[name] <= c0)
        assert r.efficiency[name] == pytest.approx(r.estimates[name] / 300**2)
    assert run.network.stored_count == r.patterns_stored
    # the stored stream reproduces C0 through the brute-force oracle
    X = run.monitors["exact"].patterns
    assert brute_c0(X) == c0


@pytest.mark.parametrize("b,c", [(0.5, 0.0), (0.6, 0.0), (0.5, 0.2)])
def test_exact_weighting_flags_exactly_at_first_failure(b, c):
    # N * chi is integral, so chi >= 1 is precisely x * a < 0
    cfg = TrialConfig(N=250, b_mean=b, c_mean=c, trials=4, seed=7)
    s = run_suite(cfg)
    for r in s.records:
        assert r.estimates["dynamic-exact"] == r.true_capacity
        assert r.safe["dynamic-exact"]


def test_per_trial_dispersion_is_clamped():
    cfg = TrialConfig(N=100, b_mean=0.5, b_std=0.2, c_mean=0.0, c_std=0.3, trials=6, seed=3,
                      compare_modes=False)
    s = run_suite(cfg)
    bs = {r.b for r in s.records}
    assert len(bs) > 1
    for r in s.records:
        assert 0.5 <= r.b <= 0.95 and 0.0 <= r.c <= 0.9


def test_static_worst_case_parameterization():
    cfg = TrialConfig(N=3000, b_mean=0.5, b_std=0.03, c_mean=0.05, c_std=0.03)
    st = static_estimates(cfg)
    assert st["mceliece"].capacity == pytest.approx(3000 / (4 * np.log(3000)))
    assert st["lowe-bias"].gamma == pytest.approx(3 / (8 * 0.59**2 * 0.41**2))
    assert st["lowe-corr"].gamma == pytest.approx(4.38756864)
    # gamma_corr below 4 is clamped to the i.i.d. value
    low = static_estimates(TrialConfig(N=3000, c_mean=0.01))
    assert low["lowe-corr"].gamma == 4.0


def test_static_total_failure_scores_zero_efficiency():
    # highly biased patterns: worst-case Lowe capacity far beyond C0
    cfg = TrialConfig(N=400, b_mean=0.75, b_std=0.0, trials=2, seed=11, compare_modes=False)
    s = run_suite(cfg)
    for r in s.records:
        assert r.estimates["mceliece"] > r.true_capacity
        frac = r.static_recall["mceliece"]
        assert 0.0 <= frac <= 1.0
        if frac == 0.0:
            assert r.efficiency["mceliece"] == 0.0
        else:
            assert r.efficiency["mceliece"] == pytest.approx(r.estimates["mceliece"] / 400**2)
    assert any(r.efficiency["mceliece"] == 0.0 for r in s.records)


def test_cap_exceeded_when_max_patterns_too_small():
    with pytest.raises(CapExceededError):
        run_trial(TrialConfig(N=200, trials=1, max_patterns=5))


def test_suite_single_trial_std_is_zero():
    s = run_suite(TrialConfig(N=200, trials=1, seed=2))
    st = s.model_stats("dynamic")
    assert st.accuracy_std == 0.0 and st.efficiency_std == 0.0
    assert s.c0_stats()[1] == 0.0


def test_suite_summary_rejects_empty():
    with pytest.raises(ValueError):
        SuiteSummary(TrialConfig(), [])


def test_suite_dict_round_trip():
    s = run_suite(TrialConfig(N=150, trials=2, seed=9))
    assert SuiteSummary.from_dict(s.to_dict()) == s


def test_online_and_zero_centered_variants_run():
    cfg = TrialConfig(N=200, b_mean=0.6, c_mean=0.2, trials=1, seed=4, online_stats=True,
                      compare_modes=False)
    r = run_trial(cfg, 0)
    assert r.true_capacity >= 1
    zc = TrialConfig(N=200, b_mean=0.6, trials=1, seed=4, zero_centered=True,
                     compare_modes=False)
    assert run_trial(zc, 0).true_capacity >= 1


def test_verify_generator_grid():
    rows = verify_generator([0.5, 0.6, 0.7, 0.9], [0.0, 0.3, 0.9], N=500, M=200, seed=1)
    first = rows[0]
    assert (first["b"], first["c"]) == (0.5, 0.0)
    assert abs(first["measured_b"] - 0.5) <= 0.02
    assert abs(first["measured_c"]) <= 0.05
    flagged = {(r["b"], r["c"]): r["deviation_regime"] for r in rows}
    assert flagged[(0.9, 0.9)] and not flagged[(0.5, 0.0)]
    for c in (0.0, 0.3, 0.9):
        measured = [r["measured_b"] for r in rows if r["c"] == c]
        assert measured == sorted(measured)


# Properties the crosstalk-weighting design is expected to have but that the
# default (expectation) weighting measurably violates; see README "Results".
# They stay strict so a behavior change turns them red.

@pytest.mark.xfail(strict=True, reason="expectation weighting overestimates C0 in the i.i.d. case")
def test_dynamic_accuracy_not_above_exact_mode():
    s = run_suite(TrialConfig(N=500, trials=10, seed=100))
    assert s.model_stats("dynamic").accuracy_mean <= s.model_stats("dynamic-exact").accuracy_mean


@pytest.mark.xfail(strict=True, reason="expectation weighting overestimates C0 in the i.i.d. case")
def test_dynamic_efficiency_within_one_std_of_maximum():
    s = run_suite(TrialConfig(N=500, b_mean=0.5, b_std=0.03, trials=10, seed=101))
    dyn = s.model_stats("dynamic")
    max_mean, max_std = s.max_efficiency()
    assert dyn.efficiency_mean <= max_mean + max_std


@pytest.mark.xfail(strict=True, reason="all-patterns first failure lands near 55, below 60")
def test_iid_c0_near_seventy_at_n1000():
    s = run_suite(TrialConfig(N=1000, trials=8, seed=102, compare_modes=False))
    assert 60 <= s.c0_stats()[0] <= 80


@pytest.mark.xfail(strict=True, reason="expectation weighting overestimates C0 in the i.i.d. case")
def test_iid_dynamic_accuracy_band_at_n500():
    s = run_suite(TrialConfig(N=500, trials=10, seed=103, compare_modes=False))
    assert 0.8 <= s.model_stats("dynamic").accuracy_mean <= 1.1
