import math

import numpy as np
import pytest

from ialab.errors import DivergenceError, SingularityError
from ialab.geometry import (
    AttenuationModel,
    OutageQuery,
    Placement,
    linear_growth_experiment,
    link_rate,
    outage_bounds,
    outage_monte_carlo,
    placement_from_csv,
    regular_interference,
    sample_placement,
    unit_ball_volume,
)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_attenuation_kinds_and_decay_bound():
    rhos = np.linspace(0.05, 4.0, 50)
    for model in (
        AttenuationModel("pure", 2.0, 3.0),
        AttenuationModel("capped", 2.0, 3.0),
        AttenuationModel("shifted", 2.0, 3.0, rho0=0.1),
    ):
        gains = model.gain(rhos)
        assert np.all(gains <= 2.0 * rhos**-3.0 + 1e-12)
    with pytest.raises(SingularityError):
        AttenuationModel("pure", 1.0, 2.0).gain(0.0)
    assert AttenuationModel("capped", 1.0, 2.0).gain(0.0) == 1.0


def test_regular_interference_one_dimensional():
    value, bound = regular_interference(2.0, 1, 1.0, tol=1e-6)
    assert value == pytest.approx(math.pi**2 / 3 - 1, abs=1e-6)
    assert bound == 4.0
    assert value <= bound


@pytest.mark.parametrize(
    "alpha,d,tol", [(2.0, 1, 1e-6), (3.0, 1, 1e-6), (3.0, 2, 0.05), (4.0, 2, 0.05), (4.0, 3, 0.3)]
)
def test_regular_interference_below_closed_form_bound(alpha, d, tol):
    value, bound = regular_interference(alpha, d, 1.5, tol=tol)
    assert 0 < value <= bound


def test_regular_interference_divergence():
    with pytest.raises(DivergenceError):
        regular_interference(2.0, 2, 1.0)
    with pytest.raises(DivergenceError):
        regular_interference(1.0, 1, 1.0)


def test_standard_dense_support_and_determinism():
    p = sample_placement("standard-dense", 100, 2, seed=1)
    assert p.transmitters.shape == (100, 2) and p.receivers.shape == (100, 2)
    assert np.all((p.transmitters >= 0) & (p.transmitters <= 1))
    assert np.all((p.receivers >= 0) & (p.receivers <= 1))
    q = sample_placement("standard-dense", 100, 2, seed=1)
    assert np.array_equal(p.transmitters, q.transmitters)


def test_poisson_count_statistics():
    # volume n = 100 window: counts should average 100 (+1 for the origin
    # node) within 3 sigma over many seeds
    counts = [
        len(sample_placement("poisson-nearest-neighbour", 100, 2, seed=s).transmitters)
        for s in range(200)
    ]
    assert abs(np.mean(counts) - 101) <= 3 * 10 / math.sqrt(200)
    p = sample_placement("poisson-nearest-neighbour", 50, 2, seed=3)
    norms = np.linalg.norm(p.transmitters, axis=1)
    assert norms[0] == 0.0
    assert np.all(np.diff(norms) >= 0)


def test_regular_grid_unit_spacing():
    p = sample_placement("regular", 11, 1, seed=0, extent=5)
    xs = sorted(p.transmitters[:, 0].tolist())
    assert xs == list(range(-5, 6))
    # every node transmits to a nearest neighbour one step away
    for i, j in enumerate(p.pairing):
        assert abs(p.transmitters[i, 0] - p.transmitters[j, 0]) == 1.0


def test_link_rate_single_pair():
    placement = Placement(
        2,
        np.array([[0.0, 0.0]]),
        np.array([[1.0, 0.0]]),
        np.arange(1),
        "iid",
    )
    sinr, rate = link_rate(placement, AttenuationModel("pure", 1.0, 4.0), 0)
    assert sinr == pytest.approx(1.0)
    assert rate == pytest.approx(1.0)


def test_link_rate_symmetric_two_pairs_noise_free():
    # two pairs, all relevant distances 1, h = inf: sinr = 1, rate = 1
    placement = Placement(
        2,
        np.array([[0.0, 0.0], [0.0, 1.0]]),
        np.array([[1.0, 0.0], [1.0, 1.0]]),
        np.arange(2),
        "iid",
    )
    atten = AttenuationModel("pure", math.inf, 2.0)
    for link in (0, 1):
        sinr, rate = link_rate(placement, atten, link)
        d_cross = math.sqrt(2.0)
        assert sinr == pytest.approx(1.0 / d_cross**-2.0 * 1.0**-2.0)
        assert rate == pytest.approx(math.log2(1 + sinr))


def test_link_rate_interferer_decreases_sinr():
    rng = np.random.default_rng(0)
    tx = rng.uniform(0, 1, (5, 2))
    rx = rng.uniform(0, 1, (5, 2))
    atten = AttenuationModel("pure", 1.0, 3.0)
    small = Placement(2, tx[:4], rx[:4], np.arange(4), "iid")
    big = Placement(2, tx, rx, np.arange(5), "iid")
    assert link_rate(big, atten, 0)[0] < link_rate(small, atten, 0)[0]


def test_link_rate_scale_covariance():
    rng = np.random.default_rng(1)
    tx = rng.uniform(0, 1, (6, 2))
    rx = rng.uniform(0, 1, (6, 2))
    alpha, c = 3.0, 2.5
    noisefree = AttenuationModel("pure", math.inf, alpha)
    base = Placement(2, tx, rx, np.arange(6), "iid")
    scaled = Placement(2, c * tx, c * rx, np.arange(6), "iid")
    # noise-free sinr is scale invariant
    assert link_rate(scaled, noisefree, 2)[0] == pytest.approx(
        link_rate(base, noisefree, 2)[0]
    )
    # with noise, every received power scales by c**-alpha
    finite = AttenuationModel("pure", 1.0, alpha)
    s_base = link_rate(base, finite, 2)[0]
    s_scaled = link_rate(scaled, finite, 2)[0]
    assert s_scaled < s_base


def test_outage_bounds_values():
    lower, upper = outage_bounds(OutageQuery(2.0, 2, 4.0))
    assert lower == pytest.approx(1 - 3 ** -0.5, abs=1e-9)
    assert upper == pytest.approx(3 * (1 - math.exp(-1 / 3)), abs=1e-9)
    # r -> 0: upper -> 0 and lower clamps to 0
    lo_small, up_small = outage_bounds(OutageQuery(1e-9, 2, 4.0))
    assert lo_small == 0.0
    assert up_small < 1e-6
    with pytest.raises(DivergenceError):
        OutageQuery(1.0, 2, 2.0)


def test_outage_bounds_clamped_and_ordered_on_grid():
    for d in (1, 2, 3):
        for ratio in (1.5, 2.0, 4.0):
            for r in (0.1, 0.5, 1.0, 3.0, 10.0):
                for h in (math.inf, 1.0, 100.0):
                    lo, up = outage_bounds(OutageQuery(r, d, ratio * d, h=h))
                    assert 0.0 <= lo <= 1.0
                    assert 0.0 <= up <= 1.0
                    # a valid sandwich needs lower <= upper after clamping
                    assert lo <= up + 1e-12


def test_outage_upper_bound_depends_on_ratio_only():
    for r in (0.5, 1.0, 2.0):
        u1 = outage_bounds(OutageQuery(r, 1, 2.0))[1]
        u2 = outage_bounds(OutageQuery(r, 2, 4.0))[1]
        assert abs(u1 - u2) < 1e-12


def test_outage_finite_h_dominates_and_converges():
    for r, h in ((0.5, 10.0), (1.0, 100.0), (2.0, 1e4)):
        hi_power = outage_bounds(OutageQuery(r, 2, 4.0))[1]
        finite = outage_bounds(OutageQuery(r, 2, 4.0, h=h))[1]
        assert finite >= hi_power - 1e-12
    # at small rates the high-power bound approaches ds/(alpha-d), and the
    # finite-h bound converges to it as h grows
    q_inf = OutageQuery(0.2, 2, 4.0)
    q_fin = OutageQuery(0.2, 2, 4.0, h=1e6)
    assert abs(outage_bounds(q_fin)[1] - outage_bounds(q_inf)[1]) < 1e-3


def test_outage_monte_carlo_extremes():
    assert outage_monte_carlo(OutageQuery(50.0, 2, 3.0), 200, seed=2) == 1.0
    assert outage_monte_carlo(OutageQuery(1e-6, 2, 3.0), 200, seed=2) == 0.0


def test_outage_monte_carlo_within_bounds():
    query = OutageQuery(1.0, 2, 3.0)
    lower, upper = outage_bounds(query)
    mc = outage_monte_carlo(query, 1500, seed=7)
    assert lower <= mc <= upper


def test_linear_growth_low_rate_all_succeed():
    frac, sum_rate = linear_growth_experiment(100, 2, 4.0, 1e-9, 0.1, seed=3)
    assert frac == 1.0
    assert sum_rate == pytest.approx(100 * 1e-9)


def test_linear_growth_concentration_trend():
    # the linear-growth theorem concerns the probability of missing the
    # (1 - 2 eps) n r target, which is driven by concentration of the
    # failure fraction; the per-link failure mean itself is n-flat, so the
    # trend check here is concentration (shrinking spread) plus target
    # attainment at a slack comfortably above the outage level
    rate, eps = 1.0, 0.225
    fails = {}
    for n in (250, 1000):
        f = []
        for s in range(10):
            frac, sum_rate = linear_growth_experiment(n, 2, 4.0, rate, eps, seed=100 + s)
            f.append(1 - frac)
            assert sum_rate >= (1 - 2 * eps) * n * rate
        fails[n] = np.array(f)
    assert fails[1000].std() < fails[250].std()


def test_poisson_chernoff_bound():
    # P(X >= e*lambda) <= exp(-lambda) for X ~ Po(lambda)
    rng = np.random.default_rng(11)
    for lam in (2.0, 5.0):
        draws = rng.poisson(lam, 200_000)
        freq = float((draws >= math.e * lam).mean())
        assert freq <= math.exp(-lam) + 3 * math.sqrt(math.exp(-lam) / 200_000)


def test_placement_csv_round_trip(tmp_path):
    p = sample_placement("standard-dense", 20, 3, seed=9)
    path = tmp_path / "placement.csv"
    p.to_csv(path)
    q = placement_from_csv(path)
    assert q.model == "standard-dense" and q.d == 3
    assert np.allclose(p.transmitters, q.transmitters)
    assert np.allclose(p.receivers, q.receivers)
    assert np.array_equal(p.pairing, q.pairing)
