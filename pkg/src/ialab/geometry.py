"""Node placement, attenuation, SINR, and outage for spatial networks.

Attenuation convention: every formula here works on received POWER with
exponent alpha (gain h * rho**-alpha).  Sources that put the power law on
signal amplitudes use rho**-(alpha/2); squaring recovers this module's
convention, so an amplitude-domain exponent maps to alpha/2 here.

The high-power regime h = +inf is handled throughout by computing gains
with h = 1 and dropping the additive noise term from the SINR.
"""

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, SingularityError

PLACEMENT_MODELS = ("regular", "poisson-nearest-neighbour", "iid", "standard-dense")


def unit_ball_volume(d: int) -> float:
    """Volume pi**(d/2) / Gamma(1 + d/2) of the Euclidean unit ball."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (d / 2) / math.gamma(1 + d / 2)


@dataclass(frozen=True)
class AttenuationModel:
    """Distance-to-received-power map.

    kind 'pure':    h * rho**-alpha   (singular at rho = 0)
    kind 'capped':  h * min(1, rho**-alpha)
    kind 'shifted': h * (rho + rho0)**-alpha

    All three satisfy a(rho) <= h * rho**-alpha, so h doubles as the
    power-law decay constant.  h = +inf marks the noise-free regime.
    """

    kind: str
    h: float
    alpha: float
    rho0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pure", "capped", "shifted"):
            raise ValueError(f"unknown attenuation kind {self.kind!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.h < 0:
            raise ValueError("h must be nonnegative")
        if self.kind == "shifted" and self.rho0 <= 0:
            raise ValueError("shifted attenuation needs rho0 > 0")

    @property
    def noise_free(self) -> bool:
        return math.isinf(self.h)

    def gain(self, rho):
        """Received power at distance rho (vectorised; h=inf uses h=1)."""
        rho = np.asarray(rho, dtype=float)
        h = 1.0 if self.noise_free else self.h
        if self.kind == "pure":
            if np.any(rho == 0):
                raise SingularityError("pure power law is singular at distance 0")
            out = h * rho ** -self.alpha
        elif self.kind == "capped":
            out = h * np.minimum(1.0, np.where(rho > 0, rho, 1.0) ** -self.alpha)
        else:
            out = h * (rho + self.rho0) ** -self.alpha
        return out if out.shape else float(out)


@dataclass(frozen=True)
class Placement:
    """Transmitter/receiver coordinates with a transmitter -> receiver pairing.

    For the node models (regular, poisson-nearest-neighbour) the same points
    act as transmitters and receivers and the pairing maps each node to the
    node it transmits to; for iid / standard-dense the lists are disjoint
    draws paired by index.
    """

    d: int
    transmitters: np.ndarray
    receivers: np.ndarray
    pairing: np.ndarray
    model: str

    def __post_init__(self):
        if self.transmitters.size == 0 or self.receivers.size == 0:
            raise ValueError("coordinate lists must be non-empty")
        if self.model in ("iid", "standard-dense"):
            if len(self.transmitters) != len(self.receivers):
                raise ValueError("iid models need equal transmitter/receiver counts")
            if sorted(self.pairing.tolist()) != list(range(len(self.receivers))):
                raise ValueError("pairing must be a bijection onto receiver indices")

    @property
    def shares_nodes(self) -> bool:
        return self.model in ("regular", "poisson-nearest-neighbour")

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# model = {self.model}\n")
            fh.write(f"# d = {self.d}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["role", "index"] + [f"x_{i + 1}" for i in range(self.d)])
            for i, t in enumerate(self.transmitters):
                writer.writerow(["T", i] + [f"{x:.12g}" for x in t])
            for i, r in enumerate(self.receivers):
                writer.writerow(["R", i] + [f"{x:.12g}" for x in r])


def placement_from_csv(path) -> Placement:
    model, d = None, None
    tx, rx = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                key = key.strip()
                if key == "model":
                    model = value.strip()
                elif key == "d":
                    d = int(value)
                continue
            parts = line.split(",")
            if parts[0] == "role":
                continue
            coords = [float(x) for x in parts[2:]]
            (tx if parts[0] == "T" else rx).append(coords)
    if model is None or d is None:
        raise ValueError("placement csv is missing model/dimension metadata")
    t = np.array(tx)
    r = np.array(rx)
    pairing = _pair(model, t, r)
    return Placement(d, t, r, pairing, model)


def _nearest_neighbour_pairing(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    return dist.argmin(axis=1)  # argmin takes the lowest index on ties


def _pair(model, tx, rx):
    if model in ("iid", "standard-dense"):
        return np.arange(len(tx))
    if model == "regular":
        return _regular_pairing(tx)
    return _nearest_neighbour_pairing(tx)


def _regular_pairing(points: np.ndarray) -> np.ndarray:
    # transmit to the +e_1 neighbour, or -e_1 at the boundary
    index = {tuple(p): i for i, p in enumerate(points.astype(int))}
    pairing = np.empty(len(points), dtype=int)
    for i, p in enumerate(points.astype(int)):
        up = tuple(p + np.eye(1, points.shape[1], 0, dtype=int)[0])
        down = tuple(p - np.eye(1, points.shape[1], 0, dtype=int)[0])
        pairing[i] = index.get(up, index.get(down, i))
    return pairing


def sample_placement(
    model: str, n: int, d: int, seed: int, extent: Optional[float] = None
) -> Placement:
    """Draw a placement.

    regular:                   grid Z^d restricted to [-extent, extent]^d
                               (extent defaults to ceil(n**(1/d)/2)), each node
                               transmitting to a nearest neighbour
    poisson-nearest-neighbour: unit-density points in a centred box of volume
                               n, plus a node at the origin (the conditioned
                               typical node), sorted by distance from it
    iid / standard-dense:      n transmitters and n receivers independently
                               uniform on [0,1]^d, paired by index
    """
    if model not in PLACEMENT_MODELS:
        raise ValueError(f"unknown placement model {model!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    if model == "regular":
        if extent is None:
            extent = math.ceil(n ** (1 / d) / 2)
        axes = [np.arange(-int(extent), int(extent) + 1)] * d
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        pts = grid.astype(float)
        return Placement(d, pts, pts, _regular_pairing(pts), model)
    if model == "poisson-nearest-neighbour":
        side = n ** (1 / d)
        count = rng.poisson(n)
        pts = rng.uniform(-side / 2, side / 2, size=(count, d))
        pts = np.vstack([np.zeros((1, d)), pts])
        order = np.argsort(np.linalg.norm(pts, axis=1), kind="stable")
        pts = pts[order]
        return Placement(d, pts, pts, _nearest_neighbour_pairing(pts), model)
    tx = rng.uniform(0.0, 1.0, size=(n, d))
    rx = rng.uniform(0.0, 1.0, size=(n, d))
    return Placement(d, tx, rx, np.arange(n), model)


def link_rate(placement: Placement, atten: AttenuationModel, link: int) -> tuple:
    """(sinr, rate) of link `link` treating all other transmitters as noise.

    rate = log2(1 + sinr); with h = inf the additive-noise 1 is dropped (and
    an interference-free link has infinite sinr).
    """
    if not 0 <= link < len(placement.transmitters):
        raise ValueError("link index out of range")
    rx = placement.receivers[placement.pairing[link]]
    dists = np.linalg.norm(placement.transmitters - rx[None, :], axis=1)
    gains = atten.gain(dists)
    exclude = {link}
    if placement.shares_nodes:
        exclude.add(int(placement.pairing[link]))
    mask = np.ones(len(gains), dtype=bool)
    mask[list(exclude)] = False
    interference = float(gains[mask].sum())
    signal = float(gains[link])
    if atten.noise_free:
        sinr = math.inf if interference == 0 else signal / interference
    else:
        sinr = signal / (1.0 + interference)
    rate = math.inf if math.isinf(sinr) else math.log2(1.0 + sinr)
    return sinr, rate


def regular_interference(alpha: float, d: int, h: float, tol: float = 1e-6):
    """Interference at a grid receiver at the origin from every node except
    its own transmitter at (1, 0, ..., 0), for gain h * rho**-alpha.

    Computed by direct lattice summation over ||t|| <= R plus the integral
    tail bound h d v(d)/(alpha-d) R**-(alpha-d), with R picked so the tail
    bound (hence the error) is below tol.  Also returns the closed-form
    bound h (alpha/(alpha-d)) 2**(d-1) (d+1)!.

    Raises DivergenceError when alpha <= d (the sum is infinite; the
    threshold is sharp).
    """
    if alpha <= d:
        raise DivergenceError(f"lattice interference diverges for alpha={alpha} <= d={d}")
    if math.isinf(h):
        h = 1.0
    vd = unit_ball_volume(d)
    radius = (h * d * vd / ((alpha - d) * tol)) ** (1.0 / (alpha - d))
    radius = max(radius, 2.0)
    r_int = int(math.ceil(radius))
    if (2 * r_int + 1) ** d > 1e9:
        raise ValueError(
            f"tolerance {tol} needs ~{(2 * r_int + 1) ** d:.1e} lattice points; loosen tol"
        )
    if d == 1:
        t = np.arange(1, r_int + 1, dtype=float)
        # half-line twice, minus the transmitter at t = 1
        partial = h * (2.0 * (t**-alpha)[t <= radius].sum() - 1.0)
    else:
        # sum slice by slice along the first axis to bound memory
        axes = [np.arange(-r_int, r_int + 1)] * (d - 1)
        rest = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
        rest_sq = (rest.astype(float) ** 2).sum(axis=1)
        partial = 0.0
        for x0 in range(-r_int, r_int + 1):
            norms_sq = x0 * x0 + rest_sq
            keep = (norms_sq > 0) & (norms_sq <= radius * radius)
            if x0 == 1:
                keep &= np.any(rest != 0, axis=1)  # skip the transmitter
            partial += (norms_sq[keep] ** (-alpha / 2)).sum()
        partial *= h
    tail = h * d * vd / (alpha - d) * radius ** -(alpha - d)
    bound = h * (alpha / (alpha - d)) * 2 ** (d - 1) * math.factorial(d + 1)
    return float(partial + tail), float(bound)


@dataclass(frozen=True)
class OutageQuery:
    """Target rate r (bits/use) on the typical nearest-neighbour link of a
    unit-density Poisson network; h = inf selects the high-power regime."""

    r: float
    d: int
    alpha: float
    h: float = math.inf

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("rate must be positive")
        if self.alpha <= self.d:
            raise DivergenceError("outage bounds require alpha > d")
        if self.h <= 0:
            raise ValueError("h must be positive")


def outage_bounds(query: OutageQuery) -> tuple:
    """(lower, upper) bounds on the outage probability, clamped to [0, 1].

    lower: 1 - (2**r - 1)**(-d/alpha)
    upper: high power  (ds/(a-d)) (1 - exp(-(a-d)/(ds)))
           finite h    (ds/(a-d)) (1 + 2 (s/h) v(d)**(-a/d) Gamma(2 + a/d))
                       + exp(-v(d) (2 s/h)**(-d/a))
    with s = 2**r - 1.  The high-power upper bound depends on (alpha, d)
    only through their ratio.
    """
    d, alpha, s = query.d, query.alpha, 2.0**query.r - 1.0
    lower = 1.0 - s ** (-d / alpha)
    base = d * s / (alpha - d)
    if math.isinf(query.h):
        upper = base * (1.0 - math.exp(-(alpha - d) / (d * s)))
    else:
        vd = unit_ball_volume(d)
        upper = base * (
            1.0 + 2.0 * (s / query.h) * vd ** (-alpha / d) * math.gamma(2.0 + alpha / d)
        ) + math.exp(-vd * (2.0 * s / query.h) ** (-d / alpha))
    return max(0.0, min(1.0, lower)), max(0.0, min(1.0, upper))


def _poisson_window_radius(d: int, alpha: float) -> float:
    # radius at which the std of the truncated tail (after adding its exact
    # mean back) drops below 1e-3, floored at 20
    vd = unit_ball_volume(d)
    std_target = 1e-3
    r = (math.sqrt(d * vd / (2 * alpha - d)) / std_target) ** (1.0 / (alpha - d / 2))
    return max(20.0, r)


def _sample_ball(rng, d: int, radius: float) -> np.ndarray:
    count = rng.poisson(unit_ball_volume(d) * radius**d)
    radii = radius * rng.uniform(0.0, 1.0, count) ** (1.0 / d)
    direction = rng.normal(size=(count, d))
    norm = np.linalg.norm(direction, axis=1, keepdims=True)
    norm[norm == 0] = 1.0
    return direction / norm * radii[:, None]


def outage_monte_carlo(query: OutageQuery, trials: int, seed: int) -> float:
    """Empirical outage frequency of the typical link: the origin receives
    from its nearest neighbour in a fresh unit-density Poisson configuration
    each trial.

    The window is a ball whose radius keeps the truncation error under 1e-3
    of the interference: the mean of the out-of-window interference (the
    integral tail) is added back exactly, so only its fluctuation is lost.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d, alpha = query.d, query.alpha
    radius = _poisson_window_radius(d, alpha)
    vd = unit_ball_volume(d)
    tail_mean = d * vd / (alpha - d) * radius ** -(alpha - d)
    h = 1.0 if math.isinf(query.h) else query.h
    threshold = 2.0**query.r - 1.0
    outages = 0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        pts = _sample_ball(rng, d, radius)
        while len(pts) == 0:
            pts = _sample_ball(rng, d, radius)
        norms = np.linalg.norm(pts, axis=1)
        nearest = norms.argmin()
        signal = h * norms[nearest] ** -alpha
        interference = h * ((norms ** -alpha).sum() - norms[nearest] ** -alpha + tail_mean)
        if math.isinf(query.h):
            sinr = signal / interference
        else:
            sinr = signal / (1.0 + interference)
        if sinr <= threshold:
            outages += 1
    return outages / trials


def linear_growth_experiment(
    n: int, d: int, alpha: float, rate: float, eps: float, seed: int
) -> tuple:
    """Fraction of non-outage nearest-neighbour links among n interior nodes
    of a unit-density Poisson network, in the noise-free regime, plus the
    implied sum-rate lower bound fraction * n * rate.

    `eps` is the slack of the linear-growth target (1 - 2 eps) n rate that
    callers compare the sum-rate against; it does not affect the sampling.
    """
    if alpha <= d:
        raise DivergenceError("linear growth requires alpha > d")
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    side = (2.0 * n) ** (1.0 / d)
    pts = rng.uniform(-side / 2, side / 2, size=(rng.poisson(2.0 * n), d))
    while len(pts) < n + 1:
        pts = rng.uniform(-side / 2, side / 2, size=(rng.poisson(2.0 * n), d))
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    nearest = dist.argmin(axis=1)
    interior = np.argsort(np.linalg.norm(pts, axis=1), kind="stable")[:n]
    threshold = 2.0**rate - 1.0
    successes = 0
    powers = np.where(np.isinf(dist), 0.0, dist**-alpha)
    total_power = powers.sum(axis=1)
    for j in interior:
        signal = dist[j, nearest[j]] ** -alpha
        interference = total_power[j] - signal
        if interference == 0 or signal / interference > threshold:
            successes += 1
    fraction = successes / n
    return fraction, fraction * n * rate
