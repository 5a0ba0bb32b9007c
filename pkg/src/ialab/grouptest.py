"""Group testing: channels, designs, maximum-likelihood decoding,
information-theoretic test-count bounds, adaptive splitting, and the
interference-graph discovery reduction.

A group-testing channel is a transition law p(y | n, k) from (pool size n,
defectives in pool k) to an outcome y.  Channels whose law depends on k only
("only defects matter") admit the test-count reference values T_upper and
T_lower computed by `bounds`; the two non-ODM channels here (dilution
threshold, symmetric) do not.

Bound indexing: both numerators are expressed in i = |K \\ L|, the number of
misidentified defectives.  The upper numerator is log2(C(N-K, i) C(K, i)),
which is the achievability proof's count (the theorem display's |L| indexing
is inconsistent with its own proof and with the K = 1 sanity value
log2(N-1)); the lower numerator is log2(C(N-K+i, i)).
"""

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    EnumerationGuardError,
    InfiniteBoundError,
    UnsupportedChannelError,
)
from .schemes import recovery_failure_prob

ML_ENUMERATION_CAP = 1_000_000
MUTUAL_INFO_MAX_K = 20


@dataclass(frozen=True)
class GtChannel:
    """Output alphabet plus transition law; odm marks laws that depend only
    on the number of defectives in the pool."""

    name: str
    alphabet: tuple
    odm: bool
    law: Callable[[int, int], tuple]
    params: tuple = ()

    def transition(self, n: int, k: int) -> tuple:
        """pmf over the alphabet for a pool of n items, k of them defective."""
        if k < 0 or n < 0 or k > n:
            raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
        pmf = self.law(n, k)
        if abs(sum(pmf) - 1.0) > 1e-12:
            raise ValueError(f"transition pmf for (n={n}, k={k}) does not sum to 1")
        return pmf

    def spec_text(self) -> str:
        lines = [f"kind = {self.name}"]
        for key, value in self.params:
            lines.append(f"{key} = {value:.12g}" if isinstance(value, float) else f"{key} = {value}")
        return "\n".join(lines) + "\n"


def channel_from_text(text: str) -> GtChannel:
    kind = None
    params = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "kind":
            kind = value
        else:
            params[key] = int(value) if value.isdigit() else float(value)
    if kind is None:
        raise ValueError("channel spec has no kind")
    return make_channel(kind, **params)


def make_channel(kind: str, **params) -> GtChannel:
    """Construct one of the named channels.

    deterministic              y = 1[k >= 1]
    addition(q)                false positives with probability q on empty-of-
                               defects pools
    dilution(u)                each defective evades the test with prob. u
    addition-dilution(q, u)    both effects
    erasure(eps)               deterministic outcome erased with prob. eps
    dilution-threshold(theta)  y = 1[k/n >= theta]           (not ODM)
    counting(n_max)            y = k, alphabet 0..n_max
    overflow(l)                y = min(k, l): the count saturates at the
                               limit l (so l = 1 reduces to deterministic)
    symmetric                  0 / mixed / 1 for k = 0 / 0 < k < n / k = n
                               (not ODM)
    """
    if kind == "deterministic":
        return GtChannel(kind, (0, 1), True, lambda n, k: (1.0, 0.0) if k == 0 else (0.0, 1.0))
    if kind == "addition":
        q = float(params["q"])
        if not 0 < q < 1:
            raise ValueError("addition probability must lie in (0, 1)")
        return GtChannel(
            kind, (0, 1), True,
            lambda n, k: (1.0 - q, q) if k == 0 else (0.0, 1.0),
            (("q", q),),
        )
    if kind == "dilution":
        u = float(params["u"])
        if not 0 <= u < 1:
            raise ValueError("dilution probability must lie in [0, 1)")
        return GtChannel(
            kind, (0, 1), True,
            lambda n, k: (u**k, 1.0 - u**k),
            (("u", u),),
        )
    if kind == "addition-dilution":
        q, u = float(params["q"]), float(params["u"])
        if not 0 < q < 1 or not 0 <= u < 1:
            raise ValueError("need q in (0,1) and u in [0,1)")
        return GtChannel(
            kind, (0, 1), True,
            lambda n, k: (1.0 - q, q) if k == 0 else (u**k, 1.0 - u**k),
            (("q", q), ("u", u)),
        )
    if kind == "erasure":
        eps = float(params["eps"])
        if not 0 < eps < 1:
            raise ValueError("erasure probability must lie in (0, 1)")
        return GtChannel(
            kind, (0, "?", 1), True,
            lambda n, k: (1.0 - eps, eps, 0.0) if k == 0 else (0.0, eps, 1.0 - eps),
            (("eps", eps),),
        )
    if kind == "dilution-threshold":
        theta = float(params["theta"])
        if not 0 < theta < 1:
            raise ValueError("threshold must lie in (0, 1)")

        def law(n, k):
            ratio = 0.0 if n == 0 else k / n
            return (0.0, 1.0) if ratio >= theta else (1.0, 0.0)

        return GtChannel(kind, (0, 1), False, law, (("theta", theta),))
    if kind == "counting":
        n_max = int(params["n_max"])
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        alphabet = tuple(range(n_max + 1))

        def law(n, k):
            if k > n_max:
                raise ValueError(f"counting channel declared for pools up to {n_max}")
            return tuple(1.0 if y == k else 0.0 for y in alphabet)

        return GtChannel(kind, alphabet, True, law, (("n_max", n_max),))
    if kind == "overflow":
        limit = int(params["l"])
        if limit < 1:
            raise ValueError("overflow limit must be >= 1")
        alphabet = tuple(range(limit + 1))
        return GtChannel(
            kind, alphabet, True,
            lambda n, k: tuple(1.0 if y == min(k, limit) else 0.0 for y in alphabet),
            (("l", limit),),
        )
    if kind == "symmetric":

        def law(n, k):
            if k == 0:
                return (1.0, 0.0, 0.0)
            if k == n:
                return (0.0, 0.0, 1.0)
            return (0.0, 1.0, 0.0)

        return GtChannel(kind, (0, "?", 1), False, law)
    if kind == "field-cancellation":
        # induced by zero-noise superposition over F_q: a pool of k active
        # interferers is silent exactly when their coefficient-message
        # products cancel, which for fresh uniform nonzero terms happens
        # with the convolution zero mass (memorylessness across slots is an
        # approximation: the true messages are fixed for a whole run)
        q = int(params["q"])
        if q < 3:
            raise ValueError("field-cancellation needs q >= 3")

        def law(n, k):
            p0 = 1.0 if k == 0 else recovery_failure_prob(q, k)
            return (p0, 1.0 - p0)

        return GtChannel(kind, (0, 1), True, law, (("q", q),))
    raise ValueError(f"unknown channel kind {kind!r}")


def verify_odm(channel: GtChannel, n_range: Sequence[int], k_max: int) -> bool:
    """True when transition(n, k) is identical for all declared n >= k."""
    for k in range(k_max + 1):
        laws = [channel.transition(n, k) for n in n_range if n >= k]
        if any(law != laws[0] for law in laws[1:]):
            return False
    return True


@dataclass(frozen=True)
class TestDesign:
    """N x T inclusion matrix; p records the Bernoulli generation density
    when the design is random."""

    matrix: np.ndarray
    p: Optional[float] = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.uint8)
        if m.ndim != 2 or not np.isin(m, (0, 1)).all():
            raise ValueError("design matrix must be a 2-d 0/1 array")
        object.__setattr__(self, "matrix", m)

    @property
    def num_items(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_tests(self) -> int:
        return self.matrix.shape[1]

    def to_csv(self, path, outcomes: Optional[Sequence] = None):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            header = ["item"] + [f"t{t + 1}" for t in range(self.num_tests)]
            fh.write(",".join(header) + "\n")
            for i in range(self.num_items):
                fh.write(",".join([str(i)] + [str(int(x)) for x in self.matrix[i]]) + "\n")
            if outcomes is not None:
                fh.write(",".join(["outcome"] + [str(y) for y in outcomes]) + "\n")


def design_from_csv(path) -> tuple:
    """(TestDesign, outcomes-or-None) from the CSV layout of TestDesign.to_csv."""
    rows, outcomes = [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts[0] == "item":
                continue
            if parts[0] == "outcome":
                outcomes = tuple(int(x) if x.lstrip("-").isdigit() else x for x in parts[1:])
            else:
                rows.append([int(x) for x in parts[1:]])
    return TestDesign(np.array(rows, dtype=np.uint8)), outcomes


def bernoulli_design(N: int, T: int, p: float, seed: int) -> TestDesign:
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    return TestDesign((rng.random((N, T)) < p).astype(np.uint8), p=p)


def identity_design(N: int) -> TestDesign:
    return TestDesign(np.eye(N, dtype=np.uint8))


def run_design(design: TestDesign, defects, channel: GtChannel, seed: int) -> tuple:
    """Outcome sequence: for each test, draw y from transition(n_t, k_t)."""
    defects = frozenset(defects)
    if any(not 0 <= i < design.num_items for i in defects):
        raise ValueError("defect indices out of range")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    defect_mask = np.zeros(design.num_items, dtype=bool)
    defect_mask[list(defects)] = True
    outcomes = []
    for t in range(design.num_tests):
        pool = design.matrix[:, t].astype(bool)
        n_t = int(pool.sum())
        k_t = int((pool & defect_mask).sum())
        pmf = channel.transition(n_t, k_t)
        outcomes.append(channel.alphabet[rng.choice(len(pmf), p=pmf)])
    return tuple(outcomes)


@dataclass(frozen=True)
class DecodeResult:
    defects: tuple
    tied: bool
    log_likelihood: float


def ml_decode(design: TestDesign, outcomes: Sequence, channel: GtChannel, K: int) -> DecodeResult:
    """Maximum-likelihood estimate of the K-set of defectives.

    Enumerates every K-subset (guarded at C(N, K) <= 1e6); ties are broken
    by lexicographic order and flagged.
    """
    N, T = design.num_items, design.num_tests
    if len(outcomes) != T:
        raise ValueError("outcome count must equal the number of tests")
    if math.comb(N, K) > ML_ENUMERATION_CAP:
        raise EnumerationGuardError(f"C({N},{K}) exceeds the enumeration cap")
    y_idx = np.array([channel.alphabet.index(y) for y in outcomes])
    n_t = design.matrix.sum(axis=0).astype(int)
    # per-test log p(y_t | n_t, k) for k = 0..K
    with np.errstate(divide="ignore"):
        logp = np.full((K + 1, T), -np.inf)
        for k in range(K + 1):
            for t in range(T):
                if k <= n_t[t]:
                    pmf = channel.transition(int(n_t[t]), k)
                    logp[k, t] = np.log(pmf[y_idx[t]]) if pmf[y_idx[t]] > 0 else -np.inf
    best, best_ll, tied = None, -np.inf, False
    if K == 0:
        k_t = np.zeros(T, dtype=int)
        ll = float(logp[k_t, np.arange(T)].sum())
        return DecodeResult((), False, ll)
    for cand in itertools.combinations(range(N), K):
        k_t = design.matrix[list(cand)].sum(axis=0).astype(int)
        ll = float(logp[k_t, np.arange(T)].sum())
        if best is None or ll > best_ll + 1e-12:
            best, best_ll, tied = cand, ll, False
        elif ll > best_ll - 1e-12:
            tied = True
    if math.isinf(best_ll) and best_ll < 0 and math.comb(N, K) > 1:
        tied = True  # nothing is consistent; the lexicographic pick is arbitrary
    return DecodeResult(tuple(best), tied, best_ll)


def _binom_pmf(count: int, p: float) -> np.ndarray:
    return np.array(
        [math.comb(count, k) * p**k * (1 - p) ** (count - k) for k in range(count + 1)]
    )


def _plogp(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def mutual_info(
    channel: GtChannel, K: int, i: int, p: float, n_ctx: Optional[int] = None
) -> float:
    """I(X_A : X_B, Y) in bits, where the K defectives' inclusion bits are
    iid Bernoulli(p), A is a set of i of them and B the other K - i, and Y
    follows the channel law on the pool they form.

    Exact summation over all 2**K inclusion patterns (guard K <= 20) of
    H(X_A) - H(X_A | X_B, Y); requires an only-defects-matter channel (n_ctx
    is accepted for interface completeness but the law may not use it).
    """
    if not channel.odm:
        raise UnsupportedChannelError(f"channel {channel.name!r} is not only-defects-matter")
    if not 1 <= i <= K:
        raise ValueError("need 1 <= i <= K")
    if K > MUTUAL_INFO_MAX_K:
        raise ValueError(f"K exceeds the exact-enumeration guard {MUTUAL_INFO_MAX_K}")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    n_for_law = n_ctx if n_ctx is not None else K
    laws = [np.array(channel.transition(max(n_for_law, k), k)) for k in range(K + 1)]
    h_a = i * _plogp(np.array([p, 1 - p]))
    # H(X_A | X_B, Y) = sum over (x_B, y) of P(x_B, y) H(X_A | x_B, y)
    h_a_given = 0.0
    for x_b in itertools.product((0, 1), repeat=K - i):
        k_b = sum(x_b)
        p_b = p**k_b * (1 - p) ** (K - i - k_b)
        # joint over (x_A patterns, y) given x_B
        pat_probs = []
        pat_laws = []
        for x_a in itertools.product((0, 1), repeat=i):
            k_a = sum(x_a)
            pat_probs.append(p**k_a * (1 - p) ** (i - k_a))
            pat_laws.append(laws[k_a + k_b])
        pat_probs = np.array(pat_probs)
        pat_laws = np.array(pat_laws)  # (2^i, |Y|)
        joint = pat_probs[:, None] * pat_laws
        p_y = joint.sum(axis=0)
        for yi in range(len(channel.alphabet)):
            if p_y[yi] > 0:
                h_a_given += p_b * p_y[yi] * _plogp(joint[:, yi] / p_y[yi])
    return h_a - h_a_given


def mutual_info_count_oracle(channel: GtChannel, K: int, i: int, p: float) -> float:
    """Count-sufficiency cross-check of mutual_info: by symmetry of the iid
    Bernoulli design, I(X_A : X_B, Y) = H(k_A) + H(k_B, Y) - H(k_A, k_B, Y)
    plus the conditional multiplicity term for the binomial counts.

    Computed as I = H(X_A) - H(X_A | k_B, Y) with H(X_A | k_A) expanded via
    log-multiplicities; independent code path from mutual_info.
    """
    if not channel.odm:
        raise UnsupportedChannelError("count reduction needs only-defects-matter")
    laws = [np.array(channel.transition(max(K, k), k)) for k in range(K + 1)]
    pa = _binom_pmf(i, p)
    pb = _binom_pmf(K - i, p)
    # joint over (k_a, k_b, y)
    joint = pa[:, None, None] * pb[None, :, None] * np.array(
        [[laws[ka + kb] for kb in range(K - i + 1)] for ka in range(i + 1)]
    )
    # I(X_A : X_B, Y) = H(X_A) - H(X_A | X_B, Y); conditioning on (k_b, y) is
    # equivalent to conditioning on (x_B, y), and within a count class the
    # C(i, k_a) patterns are equally likely:
    # H(X_A | k_b, y) = H(k_A | k_b, y) + E log2 C(i, k_A)
    h_a = i * _plogp(np.array([p, 1 - p]))
    h_cond = 0.0
    p_by = joint.sum(axis=0)  # (k_b, y)
    for kb in range(K - i + 1):
        for yi in range(len(channel.alphabet)):
            if p_by[kb, yi] > 0:
                cond = joint[:, kb, yi] / p_by[kb, yi]
                mult = sum(
                    cond[ka] * math.log2(math.comb(i, ka)) for ka in range(i + 1)
                )
                h_cond += p_by[kb, yi] * (_plogp(cond) + mult)
    return h_a - h_cond


@dataclass(frozen=True)
class PerITerm:
    i: int
    numerator: float
    mutual_info: float


@dataclass(frozen=True)
class BoundReport:
    """Test-count reference values: T_upper = min_p max_i num_i / I_i(p) with
    the achievability numerator, T_lower likewise with the converse
    numerator; per_i_terms are evaluated at p_star_upper."""

    t_upper: float
    t_lower: float
    p_star_upper: float
    p_star_lower: float
    per_i_terms: tuple


def _golden_refine(f, lo, hi, iters=80):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def default_p_grid(K: int) -> tuple:
    grid = {round(0.01 * j, 2) for j in range(1, 100)}
    if K > 1:
        grid.add(1.0 / K)
    grid.add(1.0 / (K + 1))
    return tuple(sorted(grid))


def bounds(channel: GtChannel, N: int, K: int, p_grid: Optional[Sequence[float]] = None) -> BoundReport:
    """Compute the BoundReport for an only-defects-matter channel.

    Error classes with C(N-K, i) = 0 cannot occur and are skipped in the
    upper bound.  When every design density gives zero information for some
    class, the bound is infinite and InfiniteBoundError is raised.
    """
    if not channel.odm:
        raise UnsupportedChannelError("bounds require an only-defects-matter channel")
    if not 1 <= K < N:
        raise ValueError("need 1 <= K < N")
    grid = tuple(p_grid) if p_grid is not None else default_p_grid(K)
    if not grid or any(not 0 < p < 1 for p in grid):
        raise ValueError("p grid must be non-empty within (0, 1)")
    num_u = {
        i: math.log2(math.comb(N - K, i) * math.comb(K, i))
        for i in range(1, K + 1)
        if math.comb(N - K, i) > 0
    }
    num_l = {i: math.log2(math.comb(N - K + i, i)) for i in range(1, K + 1)}

    def objective(nums):
        def f(p):
            worst = 0.0
            for i, num in nums.items():
                info = mutual_info(channel, K, i, p)
                if info <= 1e-12:  # zero information up to rounding
                    return math.inf
                worst = max(worst, num / info)
            return worst

        return f

    report = {}
    for label, nums in (("upper", num_u), ("lower", num_l)):
        f = objective(nums)
        values = [f(p) for p in grid]
        j = int(np.argmin(values))
        if math.isinf(values[j]):
            raise InfiniteBoundError(f"no design density gives positive information ({label})")
        lo = grid[j - 1] if j > 0 else grid[0] / 2.0
        hi = grid[j + 1] if j + 1 < len(grid) else (1.0 + grid[-1]) / 2.0
        p_star, t_val = _golden_refine(f, lo, hi)
        if values[j] < t_val:
            p_star, t_val = grid[j], values[j]
        report[label] = (t_val, p_star)
    t_upper, p_star_upper = report["upper"]
    t_lower, p_star_lower = report["lower"]
    per_i = tuple(
        PerITerm(i, num, mutual_info(channel, K, i, p_star_upper))
        for i, num in sorted(num_u.items())
    )
    return BoundReport(t_upper, t_lower, p_star_upper, p_star_lower, per_i)


@dataclass(frozen=True)
class AsymptoticTestCount:
    value: float
    interval: Optional[tuple] = None


def asymptotic_T(kind: str, N: int, K: int, **params) -> AsymptoticTestCount:
    """Closed-form asymptotic T_upper values.

    deterministic  e K log(K(N-K)) / log K
    addition(q)    e K log(K(N-K)) / log(1/q)
    dilution(u)    e K (1 + log(N-K)/log K) * exp(u + f(u)) with f(u) only
                   bounded, 0 <= f(u) <= u^2/(1-u); returned as the interval
                   [f = 0, f = u^2/(1-u)] with its midpoint as value
    """
    if K < 2 or N <= K:
        raise ValueError("need K >= 2 and N > K")
    if kind == "deterministic":
        return AsymptoticTestCount(math.e * K * math.log2(K * (N - K)) / math.log2(K))
    if kind == "addition":
        q = float(params["q"])
        if not 0 < q < 1:
            return AsymptoticTestCount(math.inf)
        return AsymptoticTestCount(math.e * K * math.log2(K * (N - K)) / math.log2(1.0 / q))
    if kind == "dilution":
        u = float(params["u"])
        if not 0 <= u < 1:
            raise ValueError("u must lie in [0, 1)")
        bracket = math.e * K * (1.0 + math.log2(N - K) / math.log2(K))
        lo = bracket * math.exp(u)
        hi = bracket * math.exp(u + u * u / (1.0 - u))
        return AsymptoticTestCount((lo + hi) / 2.0, (lo, hi))
    raise ValueError(f"unknown asymptotic kind {kind!r}")


def adaptive_binary_splitting(
    N: int, K: int, defects, seed: Optional[int] = None, channel: Optional[GtChannel] = None
) -> tuple:
    """Adaptive design for the noiseless channel: test the active pool, then
    halve down to a single defective (negative halves are cleared outright),
    remove it and repeat; once the remaining defect count equals the active
    pool size the rest are defective by elimination.

    Count convention: the leading whole-pool test of every round is counted,
    so K = 1 costs 1 + ceil(log2 N) tests.  `seed` is accepted for interface
    uniformity but unused (the design is deterministic).  Returns
    (tests_used, recovered-frozenset); recovery is exact.
    """
    if channel is not None and channel.name != "deterministic":
        raise UnsupportedChannelError("adaptive splitting assumes the deterministic channel")
    defects = frozenset(defects)
    if len(defects) != K:
        raise ValueError("defect set size must equal K")
    if any(not 0 <= i < N for i in defects):
        raise ValueError("defect indices out of range")
    if K == 0:
        return 1, frozenset()  # the single whole-pool test comes back negative
    active = list(range(N))
    found = set()
    tests = 0
    while len(found) < K:
        tests += 1
        if not any(i in defects for i in active):
            break
        pool = active
        while len(pool) > 1:
            left = pool[: len(pool) // 2]
            tests += 1
            if any(i in defects for i in left):
                pool = left
            else:
                cleared = set(left)
                active = [i for i in active if i not in cleared]
                pool = pool[len(left):]
        found.add(pool[0])
        active.remove(pool[0])
        if K - len(found) == len(active):
            found.update(active)
            active = []
    return tests, frozenset(found)


@dataclass(frozen=True)
class InterferenceGraph:
    num_users: int
    edges: frozenset

    def __post_init__(self):
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        if any(a == b for a, b in edges):
            raise ValueError("interference graphs have no self-loops")
        object.__setattr__(self, "edges", edges)


@dataclass(frozen=True)
class IndependenceStats:
    graph: InterferenceGraph
    independence_number: int
    exact: bool


MAX_EXACT_INDEPENDENCE = 30


def _max_independent_set(adj_masks, n) -> int:
    best = 0

    def recurse(candidates: int, size: int):
        nonlocal best
        if size + bin(candidates).count("1") <= best:
            return
        if candidates == 0:
            best = max(best, size)
            return
        # branch on the candidate of highest degree within the candidate set
        v, vdeg = -1, -1
        rest = candidates
        while rest:
            u = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            deg = bin(adj_masks[u] & candidates).count("1")
            if deg > vdeg:
                v, vdeg = u, deg
        if vdeg == 0:
            best = max(best, size + bin(candidates).count("1"))
            return
        recurse((candidates & ~adj_masks[v]) & ~(1 << v), size + 1)  # take v
        recurse(candidates & ~(1 << v), size)  # skip v

    recurse((1 << n) - 1, 0)
    return best


def _greedy_independent_set(adj_masks, n) -> int:
    candidates = (1 << n) - 1
    size = 0
    while candidates:
        v_best, deg_best = -1, None
        rest = candidates
        while rest:
            u = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            deg = bin(adj_masks[u] & candidates).count("1")
            if deg_best is None or deg < deg_best:
                v_best, deg_best = u, deg
        size += 1
        candidates &= ~adj_masks[v_best]
        candidates &= ~(1 << v_best)
    return size


def interference_graph(H) -> IndependenceStats:
    """Edges {i, j} wherever h_ji or h_ij is nonzero (zeros are permitted in
    H, unlike in a fading channel state), plus the independence number: the
    best head count for simultaneous interference-free operation.

    Exact branch-and-bound up to 30 users; beyond that a greedy lower bound
    is returned with exact=False.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be square")
    n = H.shape[0]
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if H[j, i] != 0 or H[i, j] != 0:
                edges.add((i, j))
    graph = InterferenceGraph(n, frozenset(edges))
    adj = [0] * n
    for a, b in graph.edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    if n <= MAX_EXACT_INDEPENDENCE:
        return IndependenceStats(graph, _max_independent_set(adj, n), True)
    return IndependenceStats(graph, _greedy_independent_set(adj, n), False)


@dataclass(frozen=True)
class DiscoveryResult:
    graph: InterferenceGraph
    error_rate: float
    per_receiver: tuple


DISCOVERY_DETERMINISTIC_Q = 64


def discovery_simulation(H, q: int, T: int, p: float, seed: int) -> DiscoveryResult:
    """Interferer discovery over a zero-noise superposition network.

    Every transmitter draws one nonzero message; in each of T slots it
    participates with probability p, and receiver j marks the slot positive
    when its superposed observation sum_i h_ji x_it m_i is nonzero.  Each
    receiver then ML-decodes its interferer set (of known size) against the
    deterministic channel for q >= 64 (cancellation probability < 2 percent)
    or the exact field-cancellation channel for smaller q.  Returns the
    union interference graph, the fraction of misclassified unordered pairs,
    and the per-receiver estimates.
    """
    H = np.asarray(H, dtype=np.int64) % q
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be square")
    if q < 3:
        raise ValueError("discovery needs q >= 3")
    if not 0 < p < 1:
        raise ValueError("participation probability must lie in (0, 1)")
    n = H.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    messages = rng.integers(1, q, size=n)
    participation = (rng.random((n, T)) < p).astype(np.int64)
    received = (H @ (participation * messages[:, None])) % q
    outcomes = (received != 0).astype(int)  # (receiver, slot)
    design = TestDesign(participation.astype(np.uint8), p=p)
    decode_channel = (
        make_channel("deterministic")
        if q >= DISCOVERY_DETERMINISTIC_Q
        else make_channel("field-cancellation", q=q)
    )
    estimates = []
    for j in range(n):
        k_true = int((H[j] != 0).sum())
        result = ml_decode(design, tuple(outcomes[j]), decode_channel, k_true)
        estimates.append(frozenset(result.defects))
    edges = set()
    for i in range(n):
        for j in range(n):
            if i != j and (i in estimates[j] or j in estimates[i]):
                edges.add(tuple(sorted((i, j))))
    graph = InterferenceGraph(n, frozenset(edges))
    true_edges = interference_graph(H).graph.edges
    wrong = len(graph.edges ^ true_edges)
    total = n * (n - 1) // 2
    return DiscoveryResult(graph, wrong / total if total else 0.0, tuple(estimates))
