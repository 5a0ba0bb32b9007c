"""Named, seeded, reproducible experiments with CSV/JSON emission.

Config files are flat ``key = value`` text under one section header per
experiment::

    [outage-sweep]
    d = 2
    alpha = 3.0
    r_grid = 0.5, 1, 2
    trials = 10000
    seed = 7

Reserved keys ``seed``, ``trials``, ``output``, ``format`` configure the run
itself; everything else must appear in the experiment's parameter schema
(unknown keys are rejected, and all validation errors are reported at once).
A seed is mandatory for stochastic experiments.

Emitted files embed the config echo, seed, and tool version as metadata and
are byte-identical across runs of the same (config, seed, version): floats
are written with 12 significant digits, JSON keys are sorted, line endings
are LF.  Wall time is tracked on the in-memory result only, never written.
"""

import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import __version__, dense, geometry, grouptest, schemes
from .errors import ConfigError

RESERVED_KEYS = ("seed", "trials", "output", "format")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # int | float | str | bool | int_list | float_list
    required: bool = False
    default: object = None


@dataclass(frozen=True)
class ExperimentDef:
    name: str
    description: str
    params: tuple
    runner: Callable
    stochastic: bool = True
    needs_trials: bool = False
    exclusive: tuple = ()  # groups of keys of which exactly one must be set

    def schema(self) -> dict:
        return {p.name: p for p in self.params}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict
    seed: Optional[int]
    trials: Optional[int]
    output: Optional[str] = None
    format: str = "csv"


@dataclass
class ResultTable:
    columns: tuple  # ((name, kind), ...)
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        kinds = {"int": int, "float": (int, float), "str": str}
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width does not match the column schema")
            for value, (name, kind) in zip(row, self.columns):
                if not isinstance(value, kinds[kind]) or isinstance(value, bool):
                    raise ValueError(f"column {name!r} expects {kind}, got {value!r}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(table: ResultTable, stream):
    for key in sorted(table.metadata):
        if key == "wall_time_s":
            continue
        stream.write(f"# {key} = {_fmt(table.metadata[key])}\n")
    stream.write(",".join(name for name, _ in table.columns) + "\n")
    for row in table.rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _json_ready(value):
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return _fmt(value)
        return float(_fmt(value))
    return value


def write_json(table: ResultTable, stream):
    doc = {
        "metadata": {
            k: _json_ready(v) for k, v in table.metadata.items() if k != "wall_time_s"
        },
        "columns": [[name, kind] for name, kind in table.columns],
        "rows": [[_json_ready(v) for v in row] for row in table.rows],
    }
    json.dump(doc, stream, sort_keys=True, indent=1)
    stream.write("\n")


def emit(table: ResultTable, path: str, fmt: str):
    writer = write_csv if fmt == "csv" else write_json
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer(table, fh)


def render(table: ResultTable, fmt: str) -> str:
    buf = io.StringIO()
    (write_csv if fmt == "csv" else write_json)(table, buf)
    return buf.getvalue()


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# runners: (params, seed, trials, threads) -> (columns, rows, extra_metadata)


def _run_scheme_table(params, seed, trials, threads):
    rows = []
    for n in range(params["n_min"], params["n_max"] + 1):
        for K in range(1, n):
            a, t = schemes.best_scheme(n, K)
            label = "TDMA" if K > n - 2 else "|".join(str(x) for x in a)
            rows.append((n, K, t, label, f"1/{K + 1}"))
    columns = (("n", "int"), ("K", "int"), ("exponent", "int"), ("a", "str"), ("dof", "str"))
    return columns, rows, {}


def _run_scheme_delay_mc(params, seed, trials, threads):
    spec = schemes.SchemeSpec(params["n"], tuple(params["a"]), params["beamforming"])
    report = schemes.simulate_scheme(
        spec, params["q"], trials, seed, max_slots_per_stage=params["max_slots"]
    )
    rows = [
        (k + 1, spec.a[k], float(m), report.completed_trials)
        for k, m in enumerate(report.mean_per_stage)
    ]
    columns = (("stage", "int"), ("a_k", "int"), ("mean_delay", "float"), ("trials", "int"))
    meta = {
        "mean_total_delay": report.mean_total_delay,
        "truncated_trials": report.truncated_trials,
        "delay_exponent": schemes.delay_exponent(spec),
    }
    return columns, rows, meta


def _run_ngjv_delay(params, seed, trials, threads):
    n, q = params["n"], params["q"]
    report = schemes.simulate_ngjv_delay(n, q, trials, seed, max_slots=params["max_slots"])
    rows = [
        (
            n,
            q,
            report.completed_trials,
            report.truncated_trials,
            report.mean_delay,
            schemes.ngjv_expected_delay(n, q),
        )
    ]
    columns = (
        ("n", "int"),
        ("q", "int"),
        ("trials", "int"),
        ("truncated", "int"),
        ("mean_delay", "float"),
        ("expected_delay", "float"),
    )
    return columns, rows, {}


def _run_pareto(params, seed, trials, threads):
    rows = [
        (p.descriptor, p.dof.numerator, p.dof.denominator, float(p.dof), p.exponent)
        for p in schemes.pareto_frontier(params["n"])
    ]
    columns = (
        ("scheme", "str"),
        ("dof_num", "int"),
        ("dof_den", "int"),
        ("dof", "float"),
        ("exponent", "int"),
    )
    return columns, rows, {}


def _run_outage_sweep(params, seed, trials, threads):
    d, alpha, h = params["d"], params["alpha"], params["h"]

    def one(item):
        idx, r = item
        query = geometry.OutageQuery(r, d, alpha, h)
        lower, upper = geometry.outage_bounds(query)
        mc = geometry.outage_monte_carlo(query, trials, seed + 7919 * idx)
        return (r, lower, mc, upper)

    rows = _pmap(one, list(enumerate(params["r_grid"])), threads)
    columns = (("r", "float"), ("lower", "float"), ("mc", "float"), ("upper", "float"))
    return columns, rows, {}


def _run_regular_interference(params, seed, trials, threads):
    value, bound = geometry.regular_interference(
        params["alpha"], params["d"], params["h"], params["tol"]
    )
    columns = (
        ("d", "int"),
        ("alpha", "float"),
        ("h", "float"),
        ("tol", "float"),
        ("value", "float"),
        ("closed_form_bound", "float"),
    )
    return columns, [(params["d"], params["alpha"], params["h"], params["tol"], value, bound)], {}


def _run_linear_growth(params, seed, trials, threads):
    rows = []
    for n in params["n_list"]:
        for rep in range(trials):
            frac, sum_rate = geometry.linear_growth_experiment(
                n, params["d"], params["alpha"], params["rate"], params["eps"],
                seed + 104729 * rep + n,
            )
            rows.append((n, rep, frac, sum_rate))
    columns = (("n", "int"), ("rep", "int"), ("success_fraction", "float"), ("sum_rate", "float"))
    return columns, rows, {}


def _dense_setup(params, seed):
    atten = geometry.AttenuationModel("capped", h=params["h"], alpha=params["alpha"])
    e_mean = dense.estimate_direct_rate_mean(atten, d=2, draws=params["e_draws"], seed=seed)
    cfg = dense.BottleneckConfig(
        eps=params["eps_frac"] * e_mean, eta=params["eta"], e_mean=e_mean
    )
    return atten, cfg


def _run_dense_sandwich(params, seed, trials, threads):
    atten, cfg = _dense_setup(params, seed)

    def one(item):
        n, rep = item
        placement = geometry.sample_placement("standard-dense", n, 2, seed + 15485863 * rep + n)
        rm = dense.rate_matrix(placement, atten)
        scan = dense.bottleneck_scan(rm, cfg)
        return (
            n,
            rep,
            dense.achievable_per_user_lower(rm),
            dense.bottleneck_pair_bound(rm, cfg),
            scan.beta_hat,
            scan.count,
        )

    items = [(n, rep) for n in params["n_list"] for rep in range(trials)]
    rows = _pmap(one, items, threads)
    columns = (
        ("n", "int"),
        ("seed", "int"),
        ("lower", "float"),
        ("upper", "float"),
        ("beta_hat", "float"),
        ("count", "int"),
    )
    return columns, rows, {"e_mean": cfg.e_mean, "eps": cfg.eps}


def _run_variance_scaling(params, seed, trials, threads):
    atten, cfg = _dense_setup(params, seed)
    result = dense.variance_scaling_experiment(
        "standard-dense", params["n_list"], trials, cfg, seed, atten=atten
    )
    rows = [
        (n, v, u) for n, v, u in zip(result.n_list, result.variances, result.used_trials)
    ]
    columns = (("n", "int"), ("var_count", "float"), ("used_trials", "int"))
    return columns, rows, {"slope": result.slope, "e_mean": cfg.e_mean}


def _run_matching_bound(params, seed, trials, threads):
    ks, deltas = params["k_list"], params["delta_list"]
    if len(ks) != len(deltas):
        raise ValueError("k_list and delta_list must have equal length")
    rows = []
    for idx, (k, delta) in enumerate(zip(ks, deltas)):
        fail, bound = dense.jafar_matching(k, delta, trials, seed + 433 * idx)
        rows.append((k, delta, fail, bound))
    columns = (
        ("K", "int"),
        ("delta", "float"),
        ("empirical_fail", "float"),
        ("walkup_bound", "float"),
    )
    return columns, rows, {}


_CHANNEL_PARAM_KEYS = ("q", "u", "eps", "theta", "n_max", "l")


def _channel_from_params(params):
    kwargs = {k: params[k] for k in _CHANNEL_PARAM_KEYS if params.get(k) is not None}
    return grouptest.make_channel(params["channel"], **kwargs)


def _run_gt_bounds(params, seed, trials, threads):
    channel = _channel_from_params(params)
    report = grouptest.bounds(channel, params["N"], params["K"])
    rows = [(t.i, t.numerator, t.mutual_info) for t in report.per_i_terms]
    columns = (("i", "int"), ("numerator", "float"), ("mutual_info", "float"))
    meta = {
        "t_upper": report.t_upper,
        "t_lower": report.t_lower,
        "p_star_upper": report.p_star_upper,
        "p_star_lower": report.p_star_lower,
        "channel": channel.name,
    }
    return columns, rows, meta


def _run_gt_error_curve(params, seed, trials, threads):
    channel = _channel_from_params(params)
    N, K = params["N"], params["K"]
    p = params["p"]
    if p is None:
        p = grouptest.bounds(channel, N, K).p_star_upper

    def one(item):
        idx, T = item
        errors = 0
        for rep in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence([seed, idx, rep]))
            defects = tuple(sorted(rng.choice(N, K, replace=False).tolist()))
            design = grouptest.bernoulli_design(N, T, p, seed + 7 + 31 * idx + 977 * rep)
            outcomes = grouptest.run_design(design, defects, channel, seed + 13 + 53 * idx + 991 * rep)
            decoded = grouptest.ml_decode(design, outcomes, channel, K)
            if decoded.defects != defects:
                errors += 1
        return (T, trials, errors, errors / trials)

    rows = _pmap(one, list(enumerate(params["t_list"])), threads)
    columns = (("T", "int"), ("trials", "int"), ("errors", "int"), ("error_rate", "float"))
    return columns, rows, {"p": p, "channel": channel.name}


def _run_gt_adaptive(params, seed, trials, threads):
    K = params["K"]
    rows = []
    for n in params["n_list"]:
        for rep in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence([seed, n, rep]))
            defects = frozenset(rng.choice(n, K, replace=False).tolist())
            tests, recovered = grouptest.adaptive_binary_splitting(n, K, defects)
            rows.append((n, rep, tests, int(recovered == defects), math.ceil(math.log2(n)) + 1))
    columns = (
        ("N", "int"),
        ("rep", "int"),
        ("tests_used", "int"),
        ("recovered_ok", "int"),
        ("budget", "int"),
    )
    return columns, rows, {}


def _run_discovery(params, seed, trials, threads):
    n, q, T, p, deg = params["N"], params["q"], params["T"], params["p"], params["interferers"]
    if not 1 <= deg <= n - 1:
        raise ValueError("interferers must lie in [1, N-1]")
    rows = []
    for rep in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, rep]))
        H = np.zeros((n, n), dtype=np.int64)
        for j in range(n):
            others = rng.choice(n - 1, deg, replace=False)
            others = np.where(others >= j, others + 1, others)
            H[j, others] = rng.integers(1, q, deg)
        result = grouptest.discovery_simulation(H, q, T, p, seed + 6151 * rep)
        rows.append((rep, result.error_rate))
    columns = (("rep", "int"), ("error_rate", "float"))
    mean_err = float(np.mean([r[1] for r in rows])) if rows else 0.0
    return columns, rows, {"mean_error_rate": mean_err}


def _run_asymptotic(params, seed, trials, threads):
    query = schemes.RegimeQuery(
        params["regime"], params["n"], alpha=params["alpha"], beta=params["beta"]
    )
    pred = schemes.asymptotic_prediction(query, params["family"])
    lo, hi = pred.interval if pred.interval else (pred.value, pred.value)
    columns = (("n", "int"), ("value", "float"), ("low", "float"), ("high", "float"))
    return columns, [(params["n"], pred.value, lo, hi)], {}


EXPERIMENTS = {
    e.name: e
    for e in (
        ExperimentDef(
            "scheme-table",
            "best beamforming stage vectors and delay exponents over an (n, K) grid",
            (
                ParamSpec("n_min", "int", default=3),
                ParamSpec("n_max", "int", default=8),
            ),
            _run_scheme_table,
            stochastic=False,
        ),
        ExperimentDef(
            "scheme-delay-mc",
            "Monte Carlo per-stage delay of a staged alignment scheme",
            (
                ParamSpec("n", "int", required=True),
                ParamSpec("a", "int_list", required=True),
                ParamSpec("beamforming", "bool", default=False),
                ParamSpec("q", "int", required=True),
                ParamSpec("max_slots", "int", default=schemes.DEFAULT_STAGE_SLOT_CAP),
            ),
            _run_scheme_delay_mc,
            needs_trials=True,
        ),
        ExperimentDef(
            "ngjv-delay",
            "complement-matching delay: Monte Carlo mean vs the closed form",
            (
                ParamSpec("n", "int", required=True),
                ParamSpec("q", "int", required=True),
                ParamSpec("max_slots", "int", default=schemes.DEFAULT_STAGE_SLOT_CAP),
            ),
            _run_ngjv_delay,
            needs_trials=True,
        ),
        ExperimentDef(
            "pareto",
            "delay-rate frontier over scheme families",
            (ParamSpec("n", "int", required=True),),
            _run_pareto,
            stochastic=False,
        ),
        ExperimentDef(
            "outage-sweep",
            "outage bounds and Monte Carlo estimate over a rate grid",
            (
                ParamSpec("d", "int", required=True),
                ParamSpec("alpha", "float", required=True),
                ParamSpec("r_grid", "float_list", required=True),
                ParamSpec("h", "float", default=math.inf),
            ),
            _run_outage_sweep,
            needs_trials=True,
        ),
        ExperimentDef(
            "regular-interference",
            "lattice interference sum and its closed-form bound",
            (
                ParamSpec("d", "int", required=True),
                ParamSpec("alpha", "float", required=True),
                ParamSpec("h", "float", default=1.0),
                ParamSpec("tol", "float", default=1e-6),
            ),
            _run_regular_interference,
            stochastic=False,
        ),
        ExperimentDef(
            "linear-growth",
            "fraction of non-outage nearest-neighbour links as n grows",
            (
                ParamSpec("n_list", "int_list", required=True),
                ParamSpec("d", "int", required=True),
                ParamSpec("alpha", "float", required=True),
                ParamSpec("rate", "float", required=True),
                ParamSpec("eps", "float", default=0.1),
            ),
            _run_linear_growth,
            needs_trials=True,
        ),
        ExperimentDef(
            "dense-sandwich",
            "per-user capacity sandwich on the standard dense network",
            (
                ParamSpec("n_list", "int_list", required=True),
                ParamSpec("alpha", "float", default=4.0),
                ParamSpec("h", "float", default=1.0),
                ParamSpec("eps_frac", "float", default=0.2),
                ParamSpec("eta", "float", default=0.5),
                ParamSpec("e_draws", "int", default=100_000),
            ),
            _run_dense_sandwich,
            needs_trials=True,
        ),
        ExperimentDef(
            "variance-scaling",
            "log-log slope of Var(bottleneck count) against n",
            (
                ParamSpec("n_list", "int_list", required=True),
                ParamSpec("alpha", "float", default=4.0),
                ParamSpec("h", "float", default=1.0),
                ParamSpec("eps_frac", "float", default=0.2),
                ParamSpec("eta", "float", default=0.5),
                ParamSpec("e_draws", "int", default=100_000),
            ),
            _run_variance_scaling,
            needs_trials=True,
        ),
        ExperimentDef(
            "matching-bound",
            "random bipartite perfect-matching failures vs the blocking-pair bound",
            (
                ParamSpec("k_list", "int_list", required=True),
                ParamSpec("delta_list", "float_list", required=True),
            ),
            _run_matching_bound,
            needs_trials=True,
        ),
        ExperimentDef(
            "gt-bounds",
            "group-testing test-count reference values T_upper / T_lower",
            (
                ParamSpec("channel", "str", required=True),
                ParamSpec("N", "int", required=True),
                ParamSpec("K", "int", required=True),
                ParamSpec("q", "float"),
                ParamSpec("u", "float"),
                ParamSpec("eps", "float"),
                ParamSpec("theta", "float"),
                ParamSpec("n_max", "int"),
                ParamSpec("l", "int"),
            ),
            _run_gt_bounds,
            stochastic=False,
        ),
        ExperimentDef(
            "gt-error-curve",
            "ML decoding error rate against the number of tests",
            (
                ParamSpec("channel", "str", default="deterministic"),
                ParamSpec("N", "int", required=True),
                ParamSpec("K", "int", required=True),
                ParamSpec("t_list", "int_list", required=True),
                ParamSpec("p", "float"),
                ParamSpec("q", "float"),
                ParamSpec("u", "float"),
                ParamSpec("eps", "float"),
                ParamSpec("theta", "float"),
                ParamSpec("n_max", "int"),
                ParamSpec("l", "int"),
            ),
            _run_gt_error_curve,
            needs_trials=True,
        ),
        ExperimentDef(
            "gt-adaptive",
            "adaptive binary splitting test counts",
            (
                ParamSpec("n_list", "int_list", required=True),
                ParamSpec("K", "int", default=1),
            ),
            _run_gt_adaptive,
            needs_trials=True,
        ),
        ExperimentDef(
            "discovery",
            "interference-graph discovery over the superposition network",
            (
                ParamSpec("N", "int", required=True),
                ParamSpec("q", "int", required=True),
                ParamSpec("T", "int", required=True),
                ParamSpec("p", "float", required=True),
                ParamSpec("interferers", "int", required=True),
            ),
            _run_discovery,
            needs_trials=True,
        ),
        ExperimentDef(
            "asymptotic",
            "many-user delay-exponent prediction for a scaling regime",
            (
                ParamSpec("regime", "str", required=True),
                ParamSpec("n", "int", required=True),
                ParamSpec("alpha", "float"),
                ParamSpec("beta", "float"),
                ParamSpec("family", "str", default="parent-japb"),
            ),
            _run_asymptotic,
            stochastic=False,
            exclusive=(("alpha", "beta"),),
        ),
    )
}


def _parse_value(kind: str, raw: str):
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "str":
        return raw
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "int_list":
        return [int(x) for x in raw.split(",") if x.strip()]
    if kind == "float_list":
        return [float(x) for x in raw.split(",") if x.strip()]
    raise ValueError(f"unknown kind {kind!r}")


def parse_config_text(text: str) -> dict:
    """Section name -> {key: raw value}; raises ConfigError on syntax issues."""
    sections = {}
    current = None
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        if current is None:
            errors.append(f"line {lineno}: key outside any [experiment] section")
            continue
        key, _, value = stripped.partition("=")
        sections[current][key.strip()] = value.strip()
    if errors:
        raise ConfigError(errors)
    return sections


def build_config(experiment: str, raw: dict) -> ExperimentConfig:
    """Typed ExperimentConfig from raw key/value strings; collects every
    validation error before raising."""
    errors = []
    if experiment not in EXPERIMENTS:
        raise ConfigError([f"unknown experiment {experiment!r}"])
    definition = EXPERIMENTS[experiment]
    schema = definition.schema()
    params = {p.name: p.default for p in definition.params}
    seed = trials = output = None
    fmt = "csv"
    for key, raw_value in raw.items():
        if key == "seed":
            try:
                seed = int(raw_value)
            except ValueError:
                errors.append(f"seed: not an integer: {raw_value!r}")
        elif key == "trials":
            try:
                trials = int(raw_value)
                if trials < 1:
                    errors.append("trials: must be >= 1")
            except ValueError:
                errors.append(f"trials: not an integer: {raw_value!r}")
        elif key == "output":
            output = raw_value
        elif key == "format":
            if raw_value not in FORMATS:
                errors.append(f"format: must be one of {FORMATS}, got {raw_value!r}")
            else:
                fmt = raw_value
        elif key in schema:
            try:
                params[key] = _parse_value(schema[key].kind, raw_value)
            except ValueError as exc:
                errors.append(f"{key}: {exc}")
        else:
            errors.append(f"unknown key {key!r} for experiment {experiment!r}")
    for p in definition.params:
        if p.required and params.get(p.name) is None:
            errors.append(f"missing required parameter {p.name!r}")
    for group in definition.exclusive:
        present = [k for k in group if params.get(k) is not None]
        if len(present) != 1:
            errors.append(
                f"exactly one of {group} must be set"
                + (f" (got {present})" if present else "")
            )
    if definition.stochastic and seed is None:
        errors.append("missing mandatory seed for a stochastic experiment")
    if definition.needs_trials and trials is None:
        errors.append("missing mandatory trials for a Monte Carlo experiment")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(experiment, params, seed, trials, output, fmt)


def validate_config(path: str, experiment: Optional[str] = None) -> ExperimentConfig:
    """Parse and validate a config file.  With `experiment` given, that
    section is selected; otherwise the file must hold exactly one section.
    Raises ConfigError carrying the full error list."""
    with open(path, encoding="utf-8") as fh:
        sections = parse_config_text(fh.read())
    if not sections:
        raise ConfigError(["config file has no [experiment] section"])
    if experiment is None:
        if len(sections) != 1:
            raise ConfigError(
                [f"config holds sections {sorted(sections)}; name one on the command line"]
            )
        experiment = next(iter(sections))
    if experiment not in sections:
        raise ConfigError([f"config has no [{experiment}] section"])
    return build_config(experiment, sections[experiment])


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ResultTable:
    definition = EXPERIMENTS[config.experiment]
    start = time.perf_counter()
    columns, rows, extra = definition.runner(
        config.params, config.seed, config.trials, threads
    )
    meta = {
        "experiment": config.experiment,
        "version": __version__,
    }
    if config.seed is not None:
        meta["seed"] = config.seed
    if config.trials is not None:
        meta["trials"] = config.trials
    for key, value in sorted(config.params.items()):
        if value is None:
            continue
        if isinstance(value, list):
            meta[f"config.{key}"] = ",".join(_fmt(v) for v in value)
        else:
            meta[f"config.{key}"] = value
    meta.update(extra)
    meta["wall_time_s"] = time.perf_counter() - start
    return ResultTable(tuple(columns), list(rows), meta)
