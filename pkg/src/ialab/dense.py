"""Dense random interference networks: rate matrices, bottleneck links, and
sum-capacity sandwich experiments, plus reference capacity formulas.

The per-link statistic is S_ji = 0.5 * log2(1 + 2 * power(j <- i)) (row j,
column i = receiver j from transmitter i); the diagonal entries are the
per-user rates achievable by channel-state alignment, whose sample mean is
the lower half of the sandwich.  The upper half comes from crosslinks that
satisfy the three bottleneck conditions, which cap the rate sum of the two
users involved at 2E + eps.

Random phase fast fading affects none of the quantities computed here (all
statistics depend on squared moduli only), so it is not simulated.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import StatisticsError
from .geometry import AttenuationModel, Placement, sample_placement


@dataclass(frozen=True)
class RateMatrix:
    """S[j, i] = 0.5*log2(1 + 2*gain) for receiver j, transmitter i; e_hat is
    the sample mean of the diagonal (direct links)."""

    S: np.ndarray
    e_hat: float

    @property
    def n(self) -> int:
        return self.S.shape[0]


def rate_matrix(placement: Placement, atten: AttenuationModel) -> RateMatrix:
    if len(placement.transmitters) != len(placement.receivers):
        raise ValueError("rate matrix needs equal transmitter/receiver counts")
    if not np.array_equal(placement.pairing, np.arange(len(placement.transmitters))):
        raise ValueError("rate matrix expects index pairing (iid / standard-dense)")
    diff = placement.receivers[:, None, :] - placement.transmitters[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    S = 0.5 * np.log2(1.0 + 2.0 * atten.gain(dist))
    return RateMatrix(S, float(S.diagonal().mean()))


def achievable_per_user_lower(rm: RateMatrix) -> float:
    """Mean diagonal rate: every user can simultaneously run the alignment
    scheme at its direct rate, so this lower-bounds the per-user capacity."""
    return float(rm.S.diagonal().mean())


@dataclass(frozen=True)
class BottleneckConfig:
    """eps > 0 widens the rate cap 2E + eps; eta in (0,1) is the tail
    exponent used when conditioning on max S_ii <= n**(eta/2); e_mean is the
    population mean E of the direct rates (use estimate_direct_rate_mean, not
    the in-sample diagonal mean, so thresholds stay non-adaptive)."""

    eps: float
    eta: float
    e_mean: float

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")


def estimate_direct_rate_mean(
    atten: AttenuationModel, d: int = 2, draws: int = 100_000, seed: int = 0
) -> float:
    """Population estimate of E = mean of 0.5*log2(1 + 2*gain(|R - T|)) from
    independent uniform draws on [0,1]^d."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xE]))
    t = rng.uniform(0.0, 1.0, size=(draws, d))
    r = rng.uniform(0.0, 1.0, size=(draws, d))
    dist = np.sqrt(((r - t) ** 2).sum(axis=1))
    return float((0.5 * np.log2(1.0 + 2.0 * atten.gain(dist))).mean())


@dataclass(frozen=True)
class BottleneckScan:
    indicators: np.ndarray  # [i, j] = crosslink i -> j is a bottleneck
    beta_hat: float
    count: int


def bottleneck_scan(rm: RateMatrix, cfg: BottleneckConfig) -> BottleneckScan:
    """Indicator of the three bottleneck conditions for each ordered
    crosslink i -> j, i != j:

      B1  S_ii <= E + eps/2
      B2  S_ji <= E + eps/2
      B3  S_jj <= S_ij   (receiver i hears transmitter j at least as well as
                          receiver j does, so it can decode j's message too)
    """
    S = rm.S
    n = rm.n
    thr = cfg.e_mean + cfg.eps / 2.0
    diag = S.diagonal()
    b = (diag[:, None] <= thr) & (S.T <= thr) & (diag[None, :] <= S)
    np.fill_diagonal(b, False)
    count = int(b.sum())
    return BottleneckScan(b, count / (n * (n - 1)) if n > 1 else 0.0, count)


def bottleneck_pair_bound(rm: RateMatrix, cfg: BottleneckConfig) -> float:
    """Finite-n upper estimate of the per-user sum capacity: greedily match
    disjoint user pairs joined by a bottleneck crosslink (each pair's rate
    sum is capped at 2E + eps) and charge every unmatched user the single
    user cap 2 max_i S_ii."""
    scan = bottleneck_scan(rm, cfg)
    n = rm.n
    used = np.zeros(n, dtype=bool)
    pairs = 0
    b = scan.indicators
    for i in range(n):
        if used[i]:
            continue
        for j in range(i + 1, n):
            if not used[j] and (b[i, j] or b[j, i]):
                used[i] = used[j] = True
                pairs += 1
                break
    unmatched = n - 2 * pairs
    cap = 2.0 * cfg.e_mean + cfg.eps
    single = 2.0 * float(rm.S.diagonal().max())
    return (pairs * cap + unmatched * single) / n


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise StatisticsError("need at least two points for a slope")
    if any(y <= 0 for y in ys) or any(x <= 0 for x in xs):
        raise StatisticsError("log-log regression needs positive values")
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    lx -= lx.mean()
    return float((lx * ly).sum() / (lx * lx).sum())


@dataclass(frozen=True)
class VarianceScalingResult:
    slope: float
    n_list: tuple
    variances: tuple
    used_trials: tuple


def variance_scaling_experiment(
    model: str,
    n_list: Sequence[int],
    trials: int,
    cfg: BottleneckConfig,
    seed: int,
    atten: Optional[AttenuationModel] = None,
    d: int = 2,
) -> VarianceScalingResult:
    """Log-log slope of Var(bottleneck count) against n.

    Samples with max_i S_ii > n**(eta/2) are discarded (the conditioning used
    by the variance lemma); a StatisticsError is raised when fewer than two
    usable samples remain or a variance degenerates to zero.
    """
    if len(n_list) < 3 or list(n_list) != sorted(set(n_list)):
        raise ValueError("n_list must be increasing with at least 3 points")
    atten = atten or AttenuationModel("capped", h=1.0, alpha=4.0)
    variances = []
    used = []
    for n in n_list:
        cap = n ** (cfg.eta / 2.0)
        counts = []
        for trial in range(trials):
            placement = sample_placement(model, n, d, _mixed_seed(seed, n, trial))
            rm = rate_matrix(placement, atten)
            if rm.S.diagonal().max() > cap:
                continue
            counts.append(bottleneck_scan(rm, cfg).count)
        if len(counts) < 2:
            raise StatisticsError(f"only {len(counts)} usable trials at n={n}")
        var = float(np.var(counts, ddof=1))
        if var <= 0:
            raise StatisticsError(f"degenerate (zero) count variance at n={n}")
        variances.append(var)
        used.append(len(counts))
    slope = loglog_slope(list(n_list), variances)
    return VarianceScalingResult(slope, tuple(n_list), tuple(variances), tuple(used))


def _mixed_seed(seed: int, *parts: int) -> int:
    mixed = seed & 0xFFFFFFFF
    for p in parts:
        mixed = (mixed * 1_000_003 + p + 1) % (1 << 63)
    return mixed


def tail_experiment(
    model: str,
    n: int,
    eta: float,
    trials: int,
    seed: int,
    atten: Optional[AttenuationModel] = None,
    d: int = 2,
) -> float:
    """Empirical frequency of {max_i S_ii > n**(eta/2)}."""
    atten = atten or AttenuationModel("capped", h=1.0, alpha=4.0)
    cap = n ** (eta / 2.0)
    hits = 0
    for trial in range(trials):
        placement = sample_placement(model, n, d, _mixed_seed(seed, n, trial))
        rm = rate_matrix(placement, atten)
        if rm.S.diagonal().max() > cap:
            hits += 1
    return hits / trials


@dataclass(frozen=True)
class MatchingInstance:
    K: int
    delta: float
    adjacency: np.ndarray

    def __post_init__(self):
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")


def has_perfect_matching(adjacency: np.ndarray) -> bool:
    """Exact bipartite perfect-matching test by augmenting paths."""
    k = adjacency.shape[0]
    match_right = [-1] * k
    neighbours = [np.flatnonzero(adjacency[v]).tolist() for v in range(k)]

    def augment(v, visited):
        for w in neighbours[v]:
            if not visited[w]:
                visited[w] = True
                if match_right[w] < 0 or augment(match_right[w], visited):
                    match_right[w] = v
                    return True
        return False

    for v in range(k):
        if not augment(v, [False] * k):
            return False
    return True


def walkup_bound(K: int, delta: float) -> float:
    """Blocking-pair union bound on P(no perfect matching), clamped at 1:
    2 sqrt(K) K**(2 sqrt(K)) exp(-delta (K+1)/2) + 2**(2K) exp(-delta K^1.5/2)."""
    rt = math.sqrt(K)
    term1 = 2.0 * rt * math.exp(2.0 * rt * math.log(K) - delta * (K + 1) / 2.0)
    term2 = math.exp(2.0 * K * math.log(2.0) - delta * K**1.5 / 2.0)
    return min(1.0, term1 + term2)


def jafar_matching(K: int, delta: float, trials: int, seed: int) -> tuple:
    """(empirical no-perfect-matching frequency, walkup bound) over random
    K x K bipartite graphs with edge probability delta."""
    if K < 2:
        raise ValueError("K must be >= 2")
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    failures = 0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        adj = rng.random((K, K)) < delta
        if not has_perfect_matching(adj):
            failures += 1
    return failures / trials, walkup_bound(K, delta)


def entropy_bits(pmf: Sequence[float]) -> float:
    p = np.asarray(pmf, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("pmf must be nonnegative and sum to 1")
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def reference_capacity(kind: str, **params) -> float:
    """Closed-form reference capacities.

    finite-field      log2(q) - H(Z)            (params: pmf, length q)
    gaussian          log2(1 + snr)             (params: snr)
    ergodic-gaussian  mean log2(1 + g)          (params: gains, the |H|^2 samples)
    mac-sum           log2(1 + sum snr_i)       (params: snrs)
    ngjv-rate         (log2(q) - H(Z)) / 2      (params: pmf)
    """
    if kind == "finite-field":
        pmf = params["pmf"]
        return math.log2(len(pmf)) - entropy_bits(pmf)
    if kind == "gaussian":
        snr = params["snr"]
        if snr < 0:
            raise ValueError("snr must be nonnegative")
        return math.log2(1.0 + snr)
    if kind == "ergodic-gaussian":
        gains = np.asarray(params["gains"], dtype=float)
        if gains.size == 0 or np.any(gains < 0):
            raise ValueError("need nonnegative |H|^2 samples")
        return float(np.log2(1.0 + gains).mean())
    if kind == "mac-sum":
        snrs = np.asarray(params["snrs"], dtype=float)
        if np.any(snrs < 0):
            raise ValueError("snrs must be nonnegative")
        return math.log2(1.0 + float(snrs.sum()))
    if kind == "ngjv-rate":
        pmf = params["pmf"]
        return (math.log2(len(pmf)) - entropy_bits(pmf)) / 2.0
    raise ValueError(f"unknown capacity kind {kind!r}")
