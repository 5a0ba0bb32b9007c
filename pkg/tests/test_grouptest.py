import itertools
import math

import numpy as np
import pytest

from ialab.errors import (
    EnumerationGuardError,
    InfiniteBoundError,
    UnsupportedChannelError,
)
from ialab.grouptest import (
    GtChannel,
    adaptive_binary_splitting,
    asymptotic_T,
    bernoulli_design,
    bounds,
    channel_from_text,
    design_from_csv,
    discovery_simulation,
    identity_design,
    interference_graph,
    make_channel,
    ml_decode,
    mutual_info,
    mutual_info_count_oracle,
    run_design,
    verify_odm,
)
from ialab.schemes import recovery_failure_prob

ODM_CHANNELS = [
    make_channel("deterministic"),
    make_channel("addition", q=0.1),
    make_channel("dilution", u=0.5),
    make_channel("addition-dilution", q=0.1, u=0.3),
    make_channel("erasure", eps=0.2),
    make_channel("counting", n_max=12),
    make_channel("overflow", l=2),
    make_channel("field-cancellation", q=5),
]
NON_ODM_CHANNELS = [
    make_channel("dilution-threshold", theta=0.5),
    make_channel("symmetric"),
]


def test_channel_law_examples():
    det = make_channel("deterministic")
    assert det.transition(5, 0) == (1.0, 0.0)
    assert det.transition(5, 3) == (0.0, 1.0)
    dil = make_channel("dilution", u=0.5)
    assert dil.transition(9, 2)[0] == pytest.approx(0.25)
    sym = make_channel("symmetric")
    assert sym.transition(3, 3) == (0.0, 0.0, 1.0)
    assert sym.transition(3, 1) == (0.0, 1.0, 0.0)
    over = make_channel("overflow", l=2)
    assert over.transition(6, 5) == (0.0, 0.0, 1.0)  # saturates at the limit
    assert make_channel("overflow", l=1).transition(4, 3) == make_channel(
        "deterministic"
    ).transition(4, 3)
    count = make_channel("counting", n_max=4)
    assert count.transition(4, 3) == (0.0, 0.0, 0.0, 1.0, 0.0)


def test_channel_pmfs_normalised_on_grid():
    for channel in ODM_CHANNELS + NON_ODM_CHANNELS:
        for n in range(13):
            for k in range(n + 1):
                pmf = channel.transition(n, k)
                assert abs(sum(pmf) - 1.0) <= 1e-12
                assert all(p >= 0 for p in pmf)


def test_odm_classification():
    for channel in ODM_CHANNELS:
        assert channel.odm
        assert verify_odm(channel, range(13), 12)
    for channel in NON_ODM_CHANNELS:
        assert not channel.odm
        assert not verify_odm(channel, range(13), 12)


def test_channel_param_validation():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            make_channel("addition", q=bad)
    with pytest.raises(ValueError):
        make_channel("dilution", u=1.0)
    with pytest.raises(ValueError):
        make_channel("dilution-threshold", theta=1.5)
    with pytest.raises(ValueError):
        make_channel("nonsense")


def test_channel_spec_round_trip():
    ch = make_channel("addition-dilution", q=0.1, u=0.3)
    again = channel_from_text(ch.spec_text())
    assert again.name == ch.name
    assert again.transition(4, 2) == ch.transition(4, 2)


def test_run_design_identity():
    det = make_channel("deterministic")
    outcomes = run_design(identity_design(5), {1}, det, seed=0)
    assert outcomes == (0, 1, 0, 0, 0)


def test_run_design_empty_pools():
    det = make_channel("deterministic")
    design = bernoulli_design(4, 6, 0.5, seed=1)
    design.matrix[:, 2] = 0
    outcomes = run_design(design, set(), det, seed=0)
    assert outcomes[2] == 0


def test_run_design_addition_rate():
    add = make_channel("addition", q=0.1)
    design = identity_design(1)
    design = bernoulli_design(3, 10_000, 0.0, seed=2)  # all-empty pools
    outcomes = np.array(run_design(design, set(), add, seed=3))
    freq = outcomes.mean()
    sigma = math.sqrt(0.1 * 0.9 / 10_000)
    assert abs(freq - 0.1) <= 3 * sigma


def test_ml_decode_identity_and_separating():
    det = make_channel("deterministic")
    design = identity_design(6)
    outcomes = run_design(design, {2}, det, seed=0)
    result = ml_decode(design, outcomes, det, 1)
    assert result.defects == (2,) and not result.tied
    # any design separating all K-subsets recovers exactly
    rng = np.random.default_rng(8)
    mat = (rng.random((8, 14)) < 0.4).astype(np.uint8)
    from ialab.grouptest import TestDesign

    design = TestDesign(mat)
    patterns = {}
    separating = True
    for cand in itertools.combinations(range(8), 2):
        pat = tuple((mat[list(cand)].sum(axis=0) > 0).astype(int).tolist())
        if pat in patterns:
            separating = False
        patterns[pat] = cand
    if separating:
        for defects in [(0, 3), (2, 7), (4, 5)]:
            outcomes = run_design(design, set(defects), det, seed=1)
            assert ml_decode(design, outcomes, det, 2).defects == defects


def test_ml_decode_error_monotone_in_tests():
    det = make_channel("deterministic")
    errors = {}
    for T in (10, 15):
        bad = 0
        for s in range(200):
            rng = np.random.default_rng(np.random.SeedSequence([5, s]))
            defects = tuple(sorted(rng.choice(10, 2, replace=False).tolist()))
            design = bernoulli_design(10, T, 0.3, seed=300 + s)
            outcomes = run_design(design, defects, det, seed=600 + s)
            if ml_decode(design, outcomes, det, 2).defects != defects:
                bad += 1
        errors[T] = bad / 200
    assert errors[15] <= errors[10]


def test_ml_decode_guard():
    det = make_channel("deterministic")
    design = bernoulli_design(60, 5, 0.3, seed=0)
    with pytest.raises(EnumerationGuardError):
        ml_decode(design, run_design(design, {1, 2, 3, 4}, det, seed=0), det, 30)


def _joint_mutual_info_oracle(channel, K, i, p):
    """Fully independent oracle: tabulate the joint law of (x_A, x_B, y) and
    evaluate I = sum p log2 (p / (p_A p_BY))."""
    joint = {}
    for x_a in itertools.product((0, 1), repeat=i):
        for x_b in itertools.product((0, 1), repeat=K - i):
            k = sum(x_a) + sum(x_b)
            prob_x = p ** (k) * (1 - p) ** (K - k)
            pmf = channel.transition(max(K, k), k)
            for y, prob_y in zip(channel.alphabet, pmf):
                if prob_y > 0:
                    joint[(x_a, x_b, y)] = joint.get((x_a, x_b, y), 0.0) + prob_x * prob_y
    p_a, p_by = {}, {}
    for (x_a, x_b, y), pr in joint.items():
        p_a[x_a] = p_a.get(x_a, 0.0) + pr
        p_by[(x_b, y)] = p_by.get((x_b, y), 0.0) + pr
    return sum(
        pr * math.log2(pr / (p_a[x_a] * p_by[(x_b, y)]))
        for (x_a, x_b, y), pr in joint.items()
    )


@pytest.mark.parametrize("K", (1, 2, 3))
@pytest.mark.parametrize("p", (0.2, 0.5))
def test_mutual_info_matches_independent_oracle(K, p):
    for channel in ODM_CHANNELS:
        for i in range(1, K + 1):
            value = mutual_info(channel, K, i, p)
            assert value == pytest.approx(_joint_mutual_info_oracle(channel, K, i, p), abs=1e-9)
            assert value == pytest.approx(mutual_info_count_oracle(channel, K, i, p), abs=1e-9)


def test_mutual_info_limits_and_bounds():
    det = make_channel("deterministic")
    assert mutual_info(det, 1, 1, 0.5) == pytest.approx(1.0)
    assert mutual_info(det, 2, 1, 1e-9) < 1e-6  # constant inputs carry nothing
    for channel in ODM_CHANNELS:
        for K in (2, 3):
            for i in (1, K):
                v = mutual_info(channel, K, i, 0.3)
                assert v >= 0
                assert v <= i + 1e-12  # at most H(X_A) = i bits
    with pytest.raises(UnsupportedChannelError):
        mutual_info(make_channel("symmetric"), 2, 1, 0.5)


def test_mutual_info_increasing_in_i_for_deterministic():
    det = make_channel("deterministic")
    for K in range(2, 7):
        values = [mutual_info(det, K, i, 0.5) for i in range(1, K + 1)]
        assert all(a < b + 1e-12 for a, b in zip(values, values[1:]))


def test_bounds_deterministic_closed_form():
    report = bounds(make_channel("deterministic"), 8, 1)
    assert report.t_upper == pytest.approx(math.log2(7), abs=1e-9)
    assert report.t_lower == pytest.approx(3.0, abs=1e-9)
    assert report.p_star_upper == pytest.approx(0.5, abs=0.02)
    assert all(t.numerator >= 0 and t.mutual_info >= 0 for t in report.per_i_terms)


def test_bounds_monotone_in_n_and_k():
    det = make_channel("deterministic")
    uppers, lowers = {}, {}
    for K in (1, 2, 3, 4):
        for N in (16, 32, 64):
            rep = bounds(det, N, K)
            uppers[(N, K)] = rep.t_upper
            lowers[(N, K)] = rep.t_lower
    for K in (1, 2, 3, 4):
        assert uppers[(16, K)] < uppers[(32, K)] < uppers[(64, K)]
        assert lowers[(16, K)] < lowers[(32, K)] < lowers[(64, K)]
    for N in (16, 32, 64):
        for K in (1, 2, 3):
            if N >= 4 * (K + 1):
                assert uppers[(N, K)] < uppers[(N, K + 1)]
                assert lowers[(N, K)] < lowers[(N, K + 1)]


def test_bounds_infinite_signal():
    constant = GtChannel("constant", (0, 1), True, lambda n, k: (1.0, 0.0))
    with pytest.raises(InfiniteBoundError):
        bounds(constant, 8, 2)
    with pytest.raises(UnsupportedChannelError):
        bounds(make_channel("symmetric"), 8, 2)


def test_asymptotic_values():
    det = asymptotic_T("deterministic", 1000, 10)
    assert det.value == pytest.approx(
        math.e * 10 * math.log2(10 * 990) / math.log2(10), rel=1e-12
    )
    assert det.value == pytest.approx(108.61, abs=0.05)
    # addition q -> 1 blows up
    assert asymptotic_T("addition", 1000, 10, q=0.999999).value > 1e6
    # dilution u = 0 collapses onto the deterministic bracket
    dil0 = asymptotic_T("dilution", 1000, 10, u=0.0)
    assert dil0.interval[0] == dil0.interval[1] == pytest.approx(
        math.e * 10 * (1 + math.log2(990) / math.log2(10))
    )
    dil = asymptotic_T("dilution", 1000, 10, u=0.4)
    assert dil.interval[0] < dil.value < dil.interval[1]


def test_adaptive_splitting_examples():
    tests, rec = adaptive_binary_splitting(8, 1, {5})
    assert tests == 4 and rec == {5}  # 1 whole-pool test + 3 bisections
    assert adaptive_binary_splitting(8, 0, set()) == (1, frozenset())
    tests, rec = adaptive_binary_splitting(8, 8, set(range(8)))
    assert rec == frozenset(range(8))
    assert tests <= 8 + math.ceil(math.log2(8)) + 1
    with pytest.raises(UnsupportedChannelError):
        adaptive_binary_splitting(8, 1, {0}, channel=make_channel("dilution", u=0.1))


def test_adaptive_splitting_budget_all_positions():
    for N in (8, 16, 32):
        budget = math.ceil(math.log2(N)) + 1
        t_lower = bounds(make_channel("deterministic"), N, 1).t_lower
        assert t_lower == pytest.approx(math.log2(N), abs=1e-9)
        for defect in range(N):
            tests, rec = adaptive_binary_splitting(N, 1, {defect})
            assert rec == {defect}
            assert math.ceil(math.log2(N)) <= tests <= budget


def test_adaptive_splitting_random_sets():
    rng = np.random.default_rng(2)
    for _ in range(25):
        N = int(rng.integers(4, 40))
        K = int(rng.integers(0, N + 1))
        defects = frozenset(rng.choice(N, K, replace=False).tolist())
        tests, rec = adaptive_binary_splitting(N, K, defects)
        assert rec == defects
        assert tests <= K * (math.ceil(math.log2(N)) + 1) + 1


def test_interference_graph_examples():
    diag = np.diag([1, 2, 3])
    stats = interference_graph(diag)
    assert stats.graph.edges == frozenset()
    assert stats.independence_number == 3 and stats.exact
    full = np.ones((4, 4), dtype=int)
    assert interference_graph(full).independence_number == 1
    h = np.array([[1, 0, 2], [0, 1, 1], [2, 2, 1]])
    stats = interference_graph(h)
    assert stats.graph.edges == frozenset({(0, 2), (1, 2)})
    assert stats.independence_number == 2


def test_interference_graph_matches_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        h = rng.integers(0, 3, (n, n))
        stats = interference_graph(h)
        best = 0
        for size in range(n, 0, -1):
            for cand in itertools.combinations(range(n), size):
                if all(
                    (a, b) not in stats.graph.edges
                    for a, b in itertools.combinations(cand, 2)
                ):
                    best = size
                    break
            if best:
                break
        assert stats.independence_number == best


def test_interference_graph_greedy_beyond_guard():
    rng = np.random.default_rng(1)
    h = (rng.random((34, 34)) < 0.05).astype(int)
    stats = interference_graph(h)
    assert not stats.exact
    assert stats.independence_number >= 1


def test_discovery_no_interference():
    h = np.diag([3] * 5)  # direct links only; no crosslinks
    result = discovery_simulation(h, 101, 6, 0.4, seed=1)
    assert result.error_rate == 0.0
    assert result.graph.edges == frozenset()


def test_discovery_cancellation_frequency_small_q():
    # two interferers with coefficients summing to cancel for some message
    # pairs: the positive-slot frequency on full-participation slots matches
    # the enumerated cancellation probability 1/(q-1)
    q = 3
    h = np.array([[0, 1, 1], [0, 0, 0], [0, 0, 0]])
    misses = 0
    total = 0
    for seed in range(300):
        rng = np.random.default_rng(np.random.SeedSequence([seed]))
        m = rng.integers(1, q, 3)
        value = (h[0, 1] * m[1] + h[0, 2] * m[2]) % q
        total += 1
        if value == 0:
            misses += 1
    target = recovery_failure_prob(q, 2)
    sigma = math.sqrt(target * (1 - target) / total)
    assert abs(misses / total - target) <= 3 * sigma


def test_discovery_accuracy_large_q():
    # per-receiver interferer count 2, q = 101, T = 12 >= ceil(T_upper) + 4
    t_upper = bounds(make_channel("deterministic"), 8, 2).t_upper
    assert 12 >= math.ceil(t_upper) + 4
    errors = []
    for rep in range(200):
        rng = np.random.default_rng(np.random.SeedSequence([9, rep]))
        h = np.zeros((8, 8), dtype=np.int64)
        for j in range(8):
            others = rng.choice(7, 2, replace=False)
            others = np.where(others >= j, others + 1, others)
            h[j, others] = rng.integers(1, 101, 2)
        errors.append(discovery_simulation(h, 101, 12, 0.3, seed=1000 + rep).error_rate)
    assert float(np.mean(errors)) <= 0.1


def test_design_csv_round_trip(tmp_path):
    design = bernoulli_design(6, 9, 0.4, seed=3)
    det = make_channel("deterministic")
    outcomes = run_design(design, {0, 4}, det, seed=5)
    path = tmp_path / "design.csv"
    design.to_csv(path, outcomes=outcomes)
    loaded, loaded_outcomes = design_from_csv(path)
    assert np.array_equal(loaded.matrix, design.matrix)
    assert loaded_outcomes == outcomes
