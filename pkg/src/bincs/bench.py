"""Seeded Monte Carlo harness for recovery experiments.

A fully specified :class:`ExperimentConfig` plus a master seed determines
every byte of the output: per-trial generators are derived from
(master_seed, k, trial) through SeedSequence, results are reduced in
trial order, and thread count only changes wall time, never bytes.
Random matrix sources are redrawn per trial from the trial's own seed;
PEG and file-backed matrices are built once.

Reports go out as CSV (one row per sweep point) and a JSON envelope that
echoes the full config, which is sufficient to replay the run.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import __version__ as _version
from . import recovery
from .construction import gaussian_matrix, peg_construct_girth_target, random_regular
from .errors import BincsError
from .matrix_core import read_matrix
from .recovery import BpParams, DenseOperator, as_operator

SOURCE_PEG = "peg"
SOURCE_RANDOM_BINARY = "random_binary"
SOURCE_GAUSSIAN = "gaussian"
SOURCE_FILE = "file"

AXIS_SPARSITY = "sparsity"
AXIS_NOISE = "noise"

CSV_HEADER = "k,sigma,trials,successes,success_rate,stderr,mean_recovery_rate"

_RANDOM_SOURCES = (SOURCE_RANDOM_BINARY, SOURCE_GAUSSIAN)


@dataclass(frozen=True)
class MatrixSource:
    """Where the sensing matrix comes from: peg | random_binary | gaussian | file."""

    kind: str
    M: int = 0
    N: int = 0
    d: int = 0
    path: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, seeded description of one recovery experiment."""

    matrix_source: MatrixSource
    algorithm: str  # omp | iht | sp | bp
    sparsity: tuple[int, ...] = (40,)
    trials: int = 500
    master_seed: int = 0
    noise_sigma: float = 0.0
    success_threshold: float = 1e-4
    signal_normalization: bool = False
    threads: int = 1
    algo_params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PointStats:
    """Aggregated outcome of the trials at one (k, sigma) point."""

    k: int
    sigma: float
    trials: int
    successes: int
    success_rate: float
    stderr: float
    mean_recovery_rate: float
    mean_recovery_stderr: float


@dataclass(frozen=True)
class RecoveryStats:
    rows: tuple[PointStats, ...]


@dataclass(frozen=True)
class KmaxResult:
    """Largest k sustaining the target success rate, with the per-k evidence."""

    k_max: int
    target_rate: float
    stats: RecoveryStats


def _build_fixed_operator(source: MatrixSource):
    if source.kind == SOURCE_PEG:
        A, _report, _attempts = peg_construct_girth_target(source.M, source.N, source.d)
        return as_operator(A)
    if source.kind == SOURCE_FILE:
        return as_operator(read_matrix(source.path))
    if source.kind in _RANDOM_SOURCES:
        return None  # redrawn per trial
    raise ValueError(f"unknown matrix source kind {source.kind!r}")


def _shape_of(source: MatrixSource, fixed_op) -> tuple[int, int]:
    if fixed_op is not None:
        return fixed_op.shape
    return (source.M, source.N)


def _make_solver(config: ExperimentConfig) -> Callable:
    algo = config.algorithm
    params = config.algo_params
    if algo == "omp":
        return lambda op, y, k: recovery.omp(op, y, k)
    if algo == "iht":
        max_iters = int(params.get("max_iters", 1000))
        step_mode = params.get("step_mode", "normalized")
        return lambda op, y, k: recovery.iht(op, y, k, max_iters=max_iters, step_mode=step_mode)
    if algo == "sp":
        max_iters = int(params.get("max_iters", 100))
        return lambda op, y, k: recovery.sp(op, y, k, max_iters=max_iters)
    if algo == "bp":
        bp_params = BpParams(
            penalty=float(params.get("penalty", 1.0)),
            over_relaxation=float(params.get("over_relaxation", 1.0)),
            tol=float(params.get("tol", 1e-6)),
            max_iters=int(params.get("max_iters", 2000)),
        )
        return lambda op, y, k: recovery.bp(op, y, bp_params)
    raise ValueError(f"unknown algorithm {config.algorithm!r}")


def _run_trial(config: ExperimentConfig, fixed_op, solver, k: int, sigma: float, t: int):
    """One seeded trial; returns (success, recovery_rate)."""
    ss = np.random.SeedSequence((config.master_seed, k, t))
    sig_ss, mat_ss, noise_ss = ss.spawn(3)
    source = config.matrix_source
    if fixed_op is not None:
        op = fixed_op
    elif source.kind == SOURCE_RANDOM_BINARY:
        op = as_operator(random_regular(source.M, source.N, source.d, mat_ss))
    else:
        op = DenseOperator(gaussian_matrix(source.M, source.N, mat_ss))
    M, N = op.shape
    rng_sig = np.random.Generator(np.random.PCG64(sig_ss))
    support = np.sort(rng_sig.choice(N, size=k, replace=False))
    x = np.zeros(N)
    x[support] = rng_sig.standard_normal(k)
    if config.signal_normalization:
        x /= np.linalg.norm(x)
    if sigma > 0.0:
        rng_noise = np.random.Generator(np.random.PCG64(noise_ss))
        x_measured = x + sigma * rng_noise.standard_normal(N)
    else:
        x_measured = x
    y = op.matvec(x_measured)
    try:
        out = solver(op, y, k)
    except BincsError:
        return False, 0.0
    rel_err = float(np.linalg.norm(out.x_hat - x) / np.linalg.norm(x))
    return rel_err <= config.success_threshold, max(0.0, 1.0 - rel_err)


def _evaluate_point(config: ExperimentConfig, fixed_op, solver, k: int, sigma: float) -> PointStats:
    M, _N = _shape_of(config.matrix_source, fixed_op)
    if not 1 <= k <= M:
        raise ValueError(f"sparsity k={k} not in [1, M={M}]")
    trials = config.trials
    worker = lambda t: _run_trial(config, fixed_op, solver, k, sigma, t)
    threads = config.threads
    if threads == 0:
        import os

        threads = os.cpu_count() or 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, range(trials)))
    else:
        results = [worker(t) for t in range(trials)]
    successes = sum(1 for ok, _ in results if ok)
    rates = [rate for _, rate in results]
    p = successes / trials
    mean_rate = sum(rates) / trials
    if trials > 1:
        var = sum((r - mean_rate) ** 2 for r in rates) / (trials - 1)
        mean_stderr = (var / trials) ** 0.5
    else:
        mean_stderr = 0.0
    return PointStats(
        k=k,
        sigma=sigma,
        trials=trials,
        successes=successes,
        success_rate=p,
        stderr=(p * (1.0 - p) / trials) ** 0.5,
        mean_recovery_rate=mean_rate,
        mean_recovery_stderr=mean_stderr,
    )


def _prepare(config: ExperimentConfig):
    if config.trials < 1:
        raise ValueError(f"need trials >= 1, got {config.trials}")
    if any(k < 1 for k in config.sparsity):
        raise ValueError(f"sparsity levels must be >= 1, got {config.sparsity}")
    fixed_op = _build_fixed_operator(config.matrix_source)
    if fixed_op is not None:
        # Warm the per-operator caches before any thread pool touches them.
        if config.algorithm == "iht":
            fixed_op.spectral_norm_sq()
        if config.algorithm == "bp":
            fixed_op.pseudo_inverse()
    return fixed_op, _make_solver(config)


def run_trials(config: ExperimentConfig) -> RecoveryStats:
    """Evaluate every sparsity level in the config at its noise level."""
    fixed_op, solver = _prepare(config)
    rows = tuple(
        _evaluate_point(config, fixed_op, solver, k, config.noise_sigma)
        for k in config.sparsity
    )
    return RecoveryStats(rows=rows)


def find_kmax(config: ExperimentConfig, target_rate: float) -> KmaxResult:
    """Largest k in the configured contiguous range holding the target rate.

    Scans upward and stops at the first k that misses the target; the
    result is the last passing k (0 if even the first fails).
    """
    if not 0.0 < target_rate < 1.0:
        raise ValueError(f"target_rate must be in (0, 1), got {target_rate}")
    ks = config.sparsity
    if any(ks[i + 1] - ks[i] != 1 for i in range(len(ks) - 1)):
        raise ValueError(f"find_kmax needs a contiguous k range, got {ks}")
    fixed_op, solver = _prepare(config)
    rows = []
    k_max = 0
    for k in ks:
        row = _evaluate_point(config, fixed_op, solver, k, config.noise_sigma)
        rows.append(row)
        if row.success_rate >= target_rate:
            k_max = k
        else:
            break
    return KmaxResult(k_max=k_max, target_rate=target_rate, stats=RecoveryStats(rows=tuple(rows)))


def sweep(config: ExperimentConfig, axis: str, values: Sequence) -> RecoveryStats:
    """One stats row per axis value.

    AXIS_SPARSITY sweeps k at the configured noise level; AXIS_NOISE
    sweeps sigma at a fixed k (the configured single level, default 40)
    and forces signal normalization so noise levels are comparable.
    """
    if not values:
        raise ValueError("sweep needs a nonempty axis list")
    if axis == AXIS_SPARSITY:
        cfg = replace(config, sparsity=tuple(int(v) for v in values))
        return run_trials(cfg)
    if axis == AXIS_NOISE:
        k = config.sparsity[0] if config.sparsity else 40
        cfg = replace(config, sparsity=(k,), signal_normalization=True)
        fixed_op, solver = _prepare(cfg)
        rows = tuple(_evaluate_point(cfg, fixed_op, solver, k, float(s)) for s in values)
        return RecoveryStats(rows=rows)
    raise ValueError(f"unknown sweep axis {axis!r}")


def config_to_dict(config: ExperimentConfig) -> dict:
    """Config echo for the JSON envelope.

    ``threads`` is execution policy, not experiment identity -- results
    are thread-count invariant -- so it is omitted, keeping reports
    byte-identical across thread settings.
    """
    out = asdict(config)
    out["sparsity"] = list(config.sparsity)
    del out["threads"]
    return out


def render_csv(stats: RecoveryStats) -> str:
    lines = [CSV_HEADER]
    for r in stats.rows:
        lines.append(
            f"{r.k},{r.sigma!r},{r.trials},{r.successes},"
            f"{r.success_rate!r},{r.stderr!r},{r.mean_recovery_rate!r}"
        )
    return "\n".join(lines) + "\n"


def render_json(config: ExperimentConfig, stats: RecoveryStats) -> str:
    envelope = {
        "version": _version,
        "config": config_to_dict(config),
        "rows": [asdict(r) for r in stats.rows],
    }
    return json.dumps(envelope, indent=2, sort_keys=True) + "\n"


def write_reports(config: ExperimentConfig, stats: RecoveryStats, csv_path, json_path) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(stats))
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_json(config, stats))
