"""Ergodic interference alignment schemes and their delay analysis.

Covers the staged alignment schemes (with and without the beamforming
refinement that exempts one receiver per stage), the complement-matching
baseline scheme, Monte Carlo delay simulation driven by exact recovery
tests, exhaustive search for the best stage vector, delay-exponent bounds,
time-shared child schemes, asymptotic predictors for the two growth
regimes, and the delay-rate Pareto frontier.

Delay conventions: a stage's waiting time is the number of fresh channel
states drawn until the stage completes (so a stage that is satisfiable by
any state has delay 1), and the delay exponent T is the growth rate of the
expected total delay, D ~ k * q**T as q grows.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .ffcore import PrimeField

DEFAULT_STAGE_SLOT_CAP = 10_000_000


@dataclass(frozen=True)
class SchemeSpec:
    """A staged alignment scheme: stage sizes `a` (summing to the user count
    n), optionally with per-stage beamforming."""

    n: int
    a: tuple
    beamforming: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= len(self.a) <= self.n:
            raise ValueError("stage count must satisfy 1 <= K <= n")
        if any(x < 1 for x in self.a):
            raise ValueError("stage sizes must be positive")
        if sum(self.a) != self.n:
            raise ValueError(f"stage sizes must sum to n={self.n}, got {sum(self.a)}")

    @property
    def K(self) -> int:
        return len(self.a)

    def partial_sums(self) -> tuple:
        out, total = [], 0
        for x in self.a:
            total += x
            out.append(total)
        return tuple(out)

    @property
    def dof(self) -> Fraction:
        return Fraction(1, self.K + 1)


def delay_exponent(scheme: SchemeSpec) -> int:
    """max over stages k of a_k(n-k-1), or (a_k-1)(n-k-1) with beamforming;
    each stage term is clamped at zero (stages k >= n-1 cost nothing)."""
    n = scheme.n
    best = 0
    for k, ak in enumerate(scheme.a, start=1):
        size = ak - 1 if scheme.beamforming else ak
        best = max(best, size * (n - k - 1))
    return best


def ngjv_expected_delay(n: int, q: int) -> float:
    """Exact expected complement-matching delay (q-1)**(n*n); saturates to
    +inf when it exceeds float range."""
    if n < 1 or q < 2:
        raise ValueError("need n >= 1 and q >= 2")
    exact = (q - 1) ** (n * n)
    try:
        return float(exact)
    except OverflowError:
        return math.inf


def recovery_failure_prob(q: int, L: int) -> float:
    """Mass at zero of the L-fold convolution of independent uniform draws on
    F_q \\ {0}: 1/q + (-1)**L / (q (q-1)**(L-1)).

    The alternating sign term is required for consistency at L=1 (a single
    nonzero multiple of a nonzero uniform is never zero); the source lemma's
    displayed line drops it, its derivation does not.
    """
    if L < 1 or q < 2:
        raise ValueError("need L >= 1 and q >= 2")
    exact = Fraction(1, q) + Fraction((-1) ** L, q * (q - 1) ** (L - 1))
    return float(exact)


@dataclass(frozen=True)
class DelayReport:
    """Sampled waiting times of a scheme simulation.

    stage_delays has shape (K, completed_trials); truncated trials (a stage
    exceeded the slot cap) are excluded from all statistics and counted in
    `truncated_trials`.
    """

    scheme: SchemeSpec
    q: int
    trials: int
    stage_delays: np.ndarray
    truncated_trials: int

    @property
    def mean_per_stage(self) -> tuple:
        if self.stage_delays.shape[1] == 0:
            return (math.nan,) * self.scheme.K
        return tuple(float(m) for m in self.stage_delays.mean(axis=1))

    @property
    def total_delay(self) -> int:
        return int(self.stage_delays.sum())

    @property
    def mean_total_delay(self) -> float:
        if self.stage_delays.shape[1] == 0:
            return math.nan
        return float(self.stage_delays.sum(axis=0).mean())

    @property
    def dof(self) -> Fraction:
        return self.scheme.dof

    @property
    def completed_trials(self) -> int:
        return self.trials - self.truncated_trials


def simulate_scheme(
    scheme: SchemeSpec,
    q: int,
    trials: int,
    seed: int,
    max_slots_per_stage: int = DEFAULT_STAGE_SLOT_CAP,
) -> DelayReport:
    """Monte Carlo delay measurement.

    Each trial draws channel states sequentially from its own substream;
    stage k ends at the first state letting all its receivers pass the exact
    recovery test simultaneously (with beamforming the stage's first receiver
    is exempt).  Trials are independent, so results do not depend on
    execution order.
    """
    field = PrimeField(q)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n, K = scheme.n, scheme.K
    starts = (0,) + scheme.partial_sums()[:-1]
    delays = []
    truncated = 0
    for trial in range(trials):
        state = _kernels.substream_state(seed, trial)
        mat, state = _kernels.sample_matrix(field.q, n, state)
        hist_rows = [[_strip_diag(mat, j)] for j in range(n)]
        hist_diag = [[int(mat[j, j])] for j in range(n)]
        stage_delay = []
        for k in range(1, K + 1):
            members = list(range(starts[k - 1], starts[k - 1] + scheme.a[k - 1]))
            targets = members[1:] if scheme.beamforming else members
            vrows = np.array([hist_rows[j] for j in targets], dtype=np.int64).reshape(
                len(targets), k, n - 1
            )
            diags = np.array([hist_diag[j] for j in targets], dtype=np.int64).reshape(
                len(targets), k
            )
            wait, win, state = _kernels.stage_wait(
                field.q, n, np.array(targets, dtype=np.int64), vrows, diags,
                max_slots_per_stage, state,
            )
            if wait < 0:
                truncated += 1
                break
            stage_delay.append(wait)
            for j in range(n):
                hist_rows[j].append(_strip_diag(win, j))
                hist_diag[j].append(int(win[j, j]))
        else:
            delays.append(stage_delay)
    arr = (
        np.array(delays, dtype=np.int64).T
        if delays
        else np.zeros((K, 0), dtype=np.int64)
    )
    return DelayReport(scheme, q, trials, arr, truncated)


def _strip_diag(mat, j):
    row = [int(x) for x in mat[j]]
    return row[:j] + row[j + 1 :]


@dataclass(frozen=True)
class NgjvDelayReport:
    n: int
    q: int
    trials: int
    waits: np.ndarray
    truncated_trials: int

    @property
    def mean_delay(self) -> float:
        return float(self.waits.mean()) if self.waits.size else math.nan

    @property
    def completed_trials(self) -> int:
        return self.trials - self.truncated_trials


def simulate_ngjv_delay(
    n: int, q: int, trials: int, seed: int, max_slots: int = DEFAULT_STAGE_SLOT_CAP
) -> NgjvDelayReport:
    """Complement-matching delay: per trial, draw a state H whose complement
    I - H is itself a valid all-nonzero state (resampling otherwise; for
    q = 2 no complement exists and the scheme is degenerate), then count
    slots until exactly I - H appears.  The wait is geometric with success
    probability (q-1)**(-n*n)."""
    field = PrimeField(q)
    if field.q < 3:
        raise ValueError("complement matching needs q >= 3 (I - H is never valid for q = 2)")
    waits = []
    truncated = 0
    for trial in range(trials):
        state = _kernels.substream_state(seed, trial)
        wait, state = _kernels.ngjv_trial(field.q, n, max_slots, state)
        if wait < 0:
            truncated += 1
        else:
            waits.append(wait)
    arr = np.array(waits, dtype=np.int64) if waits else np.zeros(0, dtype=np.int64)
    return NgjvDelayReport(n, q, trials, arr, truncated)


def _nondecreasing_compositions(total: int, parts: int, minimum: int = 1):
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total // parts + 1):
        for rest in _nondecreasing_compositions(total - first, parts - 1, first):
            yield (first,) + rest


def _all_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _all_compositions(total - first, parts - 1):
            yield (first,) + rest


def best_scheme(n: int, K: int, full_space: bool = False) -> tuple:
    """Best beamforming stage vector for n users in K stages: exhaustive
    search minimising the delay exponent over nondecreasing vectors (the
    optimum is attained there; pass full_space=True to audit against the
    unrestricted search), ties broken lexicographically-smallest.

    K = n-1 and K = n are degenerate: every stage is a singleton or near
    singleton and plain time sharing already has delay exponent 0.
    Returns (a, exponent).
    """
    if not 1 <= K <= n:
        raise ValueError(f"K must be in [1, {n}], got {K}")
    if K > n - 2:
        a = (1,) * (K - 1) + (n - K + 1,)
        return a, delay_exponent(SchemeSpec(n, a, beamforming=True))
    gen = _all_compositions(n, K) if full_space else _nondecreasing_compositions(n, K)
    best_a: Optional[tuple] = None
    best_t = None
    for a in gen:
        t = delay_exponent(SchemeSpec(n, a, beamforming=True))
        if best_t is None or t < best_t or (t == best_t and a < best_a):
            best_a, best_t = a, t
    return best_a, best_t


def exponent_bounds(n: int, K: int) -> tuple:
    """(lower, upper) bounds on the best achievable beamforming delay
    exponent: (n/K)(n-2) - (2n-K-2) <= T(n,K) <= (n/K)(n-2)."""
    if K > n - 2:
        raise ValueError("bounds require K <= n - 2")
    upper = (n / K) * (n - 2)
    lower = upper - (2 * n - K - 2)
    return lower, upper


def child_scheme(parent: SchemeSpec, n: int) -> tuple:
    """Time-share an m-user parent among n >= m users: degrees of freedom
    scale by m/n, the delay exponent is unchanged.  Returns (dof, exponent)."""
    if parent.n > n:
        raise ValueError("child networks must have at least as many users as the parent")
    dof = Fraction(parent.n, n) * parent.dof
    return dof, delay_exponent(parent)


@dataclass(frozen=True)
class RegimeQuery:
    """Many-user scaling regime: I holds the per-user rate fraction alpha
    constant; II fixes the sum rate, dof = beta/n."""

    regime: str
    n: int
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        if self.regime not in ("I", "II"):
            raise ValueError("regime must be 'I' or 'II'")
        if self.regime == "I":
            if self.alpha is None or self.beta is not None:
                raise ValueError("regime I takes alpha only")
            if not 0 < self.alpha <= 0.5:
                raise ValueError("alpha must lie in (0, 1/2]")
        else:
            if self.beta is None or self.alpha is not None:
                raise ValueError("regime II takes beta only")
            if self.beta < 1:
                raise ValueError("beta must be >= 1")


@dataclass(frozen=True)
class AsymptoticPrediction:
    value: float
    interval: Optional[tuple] = None


def asymptotic_prediction(query: RegimeQuery, family: str) -> AsymptoticPrediction:
    """Leading-order delay-exponent prediction for the best parent schemes
    ('parent-japb') or for children of single-stage parents
    ('child-of-japb-m') in the requested regime.

    Regime II parents only admit an interval [(beta + 1/beta - 2) n, beta n];
    the midpoint is returned with the interval attached.
    """
    if family not in ("parent-japb", "child-of-japb-m"):
        raise ValueError(f"unknown family {family!r}")
    n = query.n
    if query.regime == "I":
        alpha = query.alpha
        if family == "parent-japb":
            return AsymptoticPrediction(n * n / (math.floor(1 / alpha) - 1))
        return AsymptoticPrediction(4 * alpha * alpha * n * n - 6 * alpha * n)
    beta = query.beta
    if family == "parent-japb":
        lo = (beta + 1 / beta - 2) * n
        hi = beta * n
        return AsymptoticPrediction((lo + hi) / 2, (lo, hi))
    m = math.floor(2 * beta)
    return AsymptoticPrediction(float((m - 1) * (m - 2)))


@dataclass(frozen=True)
class ParetoPoint:
    dof: Fraction
    exponent: int
    descriptor: str


def pareto_frontier(n: int) -> list:
    """Non-dominated (dof up, exponent down) schemes for an n-user network:
    complement matching, time sharing, the best parent scheme at every stage
    count, and all children of the best parents of smaller networks."""
    if n < 3:
        raise ValueError("frontier needs n >= 3")
    candidates = [
        ParetoPoint(Fraction(1, 2), n * n, "NGJV"),
        ParetoPoint(Fraction(1, n), 0, "TDMA"),
    ]
    for K in range(1, n - 1):
        a, t = best_scheme(n, K)
        candidates.append(ParetoPoint(Fraction(1, K + 1), t, f"JAP-B{list(a)}"))
    for m in range(3, n):
        for K in range(1, m - 1):
            a, t = best_scheme(m, K)
            parent = SchemeSpec(m, a, beamforming=True)
            dof, exp = child_scheme(parent, n)
            candidates.append(ParetoPoint(dof, exp, f"child(m={m}, JAP-B{list(a)})"))
    frontier = []
    for p in candidates:
        dominated = any(
            (o.dof > p.dof and o.exponent <= p.exponent)
            or (o.dof >= p.dof and o.exponent < p.exponent)
            for o in candidates
        )
        if not dominated and not any(
            f.dof == p.dof and f.exponent == p.exponent for f in frontier
        ):
            frontier.append(p)
    frontier.sort(key=lambda p: (-p.dof, p.exponent))
    return frontier
