"""Command-line frontend.

Subcommands: construct, analyze, recover, bench, dmax.  Exit codes: 0 on
success, 1 on usage errors (unknown flags, missing files, bad values), 2
on runtime failures.  Every run prints the resolved master seed to
stderr, and partially written output files are removed on failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__, bench, rip_theory, spectral
from .bipartite_graph import INFINITE, compute_girth
from .construction import (
    PegConfig,
    dmax_theoretical_bound,
    find_dmax,
    gaussian_matrix,
    peg_construct_girth_target,
    random_regular,
)
from .errors import BincsError, InfeasibleParameters, ParameterOutOfBranch, SideConditionViolated
from .matrix_core import correlation_spectrum, read_matrix, write_matrix
from .recovery import BpParams, SparseSignal, as_operator, bp, iht, omp, sp


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as exceptions (exit 1)."""

    def error(self, message):
        raise UsageError(message)


def _girth_value(g: float):
    return None if g == INFINITE else int(g)


def _fraction_fields(x: Fraction) -> dict:
    return {"exact": f"{x.numerator}/{x.denominator}", "value": float(x)}


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated integer list, got {text!r}") from None


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated float list, got {text!r}") from None


def build_parser() -> _Parser:
    p = _Parser(prog="bincs", description=__doc__)
    p.add_argument("--version", action="version", version=f"bincs {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a sensing matrix and write it with a JSON summary")
    c.add_argument("kind", choices=["peg", "random", "gaussian"])
    c.add_argument("-M", type=int, required=True)
    c.add_argument("-N", type=int, required=True)
    c.add_argument("-d", type=int, default=0, help="column degree (binary kinds)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--restarts", type=int, default=20, help="PEG girth-target restart budget")
    c.add_argument("--min-girth", type=int, default=6, help="PEG girth target (0 disables)")
    c.add_argument("-k", "--ric-k", default="2,10,50", help="sparsity levels for summary RIC values")
    c.add_argument("-o", "--output", required=True)

    a = sub.add_parser("analyze", help="girth, correlation, RIC and empirical-RIC report for a matrix file")
    a.add_argument("matrix")
    a.add_argument("-k", "--ric-k", default="2,10,50")
    a.add_argument("-s", "--overlap", type=int, default=0,
                   help="assume this maximum overlap for the girth-4 RIC (default: measured)")
    a.add_argument("--samples", type=int, default=0, help="empirical-RIC samples per k (0 = skip)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("-o", "--output", default="", help="write the JSON report here instead of stdout")

    r = sub.add_parser("recover", help="run one solver on a seeded signal")
    r.add_argument("matrix")
    r.add_argument("--algo", choices=["omp", "iht", "sp", "bp"], required=True)
    r.add_argument("-k", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--sigma", type=float, default=0.0)
    r.add_argument("--threshold", type=float, default=1e-4)
    r.add_argument("--normalize", action="store_true", help="rescale the signal to unit norm")

    b = sub.add_parser("bench", help="run a Monte Carlo experiment, writing CSV + JSON reports")
    b.add_argument("--config", default="", help="JSON config file; flags override its values")
    b.add_argument("--source", choices=["peg", "random_binary", "gaussian", "file"], default=None)
    b.add_argument("-M", type=int, default=None)
    b.add_argument("-N", type=int, default=None)
    b.add_argument("-d", type=int, default=None)
    b.add_argument("--matrix-file", default=None)
    b.add_argument("--algo", choices=["omp", "iht", "sp", "bp"], default=None)
    b.add_argument("-k", default=None, help="comma-separated sparsity levels")
    b.add_argument("--sigmas", default=None, help="comma-separated noise levels (noise sweep)")
    b.add_argument("--trials", type=int, default=None)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--sigma", type=float, default=None)
    b.add_argument("--threshold", type=float, default=None)
    b.add_argument("--threads", type=int, default=None, help="0 = auto; must not change results")
    b.add_argument("-o", "--output", required=True, help="report path prefix (.csv/.json appended)")

    d = sub.add_parser("dmax", help="practical vs theoretical maximum degree at (M, N)")
    d.add_argument("-M", type=int, required=True)
    d.add_argument("-N", type=int, required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--restarts", type=int, default=20)
    d.add_argument("-o", "--output", default="", help="also write the achieved matrix here")
    return p


def _summary(A, ric_ks, assumed_overlap: int = 0) -> dict:
    report = compute_girth(A.to_graph())
    spec = correlation_spectrum(A)
    out = {
        "M": A.M,
        "N": A.N,
        "d": A.d,
        "girth": _girth_value(report.global_girth),
        "coherence": _fraction_fields(spec.coherence_mu),
        "overlap_counts": list(spec.overlap_counts),
    }
    try:
        out["rho"] = _fraction_fields(rip_theory.correlated_pair_probability(A.M, A.N, A.d))
    except (InfeasibleParameters, BincsError):
        out["rho"] = None
    if spec.coherence_mu > 0:
        kb = rip_theory.coherence_k_bound(spec.coherence_mu)
        out["coherence_k_bound"] = None if kb == rip_theory.UNBOUNDED else kb
    else:
        out["coherence_k_bound"] = None
    ric = {}
    s_max = assumed_overlap if assumed_overlap > 0 else spec.max_overlap
    for k in ric_ks:
        entry = {}
        if report.global_girth > 4:
            entry["girth_gt4"] = _fraction_fields(rip_theory.ric_girth_gt4(k, A.d).delta_k)
        if s_max >= 2:
            try:
                entry["girth4"] = _fraction_fields(rip_theory.ric_girth4(k, A.d, s_max, A.M).delta_k)
            except ParameterOutOfBranch:
                entry["girth4"] = None
        if out["rho"] is not None:
            try:
                entry["asymptotic"] = rip_theory.ric_asymptotic(k, A.d, out["rho"]["value"]).delta_k
            except SideConditionViolated:
                entry["asymptotic"] = None
        ric[str(k)] = entry
    out["ric"] = ric
    return out


def _cmd_construct(args, created) -> int:
    ric_ks = _parse_int_list(args.ric_k, "-k")
    if args.kind == "gaussian":
        G = gaussian_matrix(args.M, args.N, args.seed)
        norms = np.linalg.norm(G, axis=0)
        summary = {
            "kind": "gaussian",
            "M": args.M,
            "N": args.N,
            "seed": args.seed,
            "column_norm_mean": float(norms.mean()),
            "note": "dense matrices are not serialized; the seed reproduces the matrix",
        }
        path = args.output + ".json"
        created.append(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(path)
        return 0
    if args.d < 1:
        raise UsageError("binary construction requires -d")
    if args.kind == "random":
        A = random_regular(args.M, args.N, args.d, args.seed)
        attempts = 1
    else:
        cfg = PegConfig(seed=args.seed, max_retries=args.restarts)
        if args.min_girth > 0:
            A, _report, attempts = peg_construct_girth_target(
                args.M, args.N, args.d, args.min_girth, cfg
            )
        else:
            from .construction import peg_construct

            A = peg_construct(args.M, args.N, args.d, cfg)
            attempts = 1
    created.append(args.output)
    write_matrix(A, args.output)
    summary = _summary(A, ric_ks)
    summary["kind"] = args.kind
    summary["seed"] = args.seed
    summary["attempts"] = attempts
    path = args.output + ".json"
    created.append(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_analyze(args, created) -> int:
    ric_ks = _parse_int_list(args.ric_k, "-k")
    A = read_matrix(args.matrix)
    out = _summary(A, ric_ks, assumed_overlap=args.overlap)
    if args.samples > 0:
        empirical = {}
        for k in ric_ks:
            rep = spectral.empirical_ric(A, k, args.samples, args.seed)
            empirical[str(k)] = {
                "delta_hat": rep.delta_hat,
                "bound_violations": rep.bound_violations,
                "bound_lambda_min": rep.bound_lambda_min,
                "bound_lambda_max": rep.bound_lambda_max,
                "num_samples": rep.num_samples,
            }
        out["empirical_ric"] = empirical
        out["empirical_seed"] = args.seed
    text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    if args.output:
        created.append(args.output)
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_recover(args, created) -> int:
    A = read_matrix(args.matrix)
    op = as_operator(A)
    ss = np.random.SeedSequence((args.seed, args.k, 0))
    sig_ss, _mat_ss, noise_ss = ss.spawn(3)
    rng = np.random.Generator(np.random.PCG64(sig_ss))
    support = np.sort(rng.choice(A.N, size=args.k, replace=False))
    values = rng.standard_normal(args.k)
    if args.normalize:
        values /= np.linalg.norm(values)
    signal = SparseSignal(N=A.N, support=tuple(int(i) for i in support), values=tuple(values))
    x = signal.to_dense()
    x_measured = x
    if args.sigma > 0:
        noise_rng = np.random.Generator(np.random.PCG64(noise_ss))
        x_measured = x + args.sigma * noise_rng.standard_normal(A.N)
    y = op.matvec(x_measured)
    if args.algo == "omp":
        out = omp(op, y, args.k)
    elif args.algo == "iht":
        out = iht(op, y, args.k)
    elif args.algo == "sp":
        out = sp(op, y, args.k)
    else:
        out = bp(op, y, BpParams())
    rel_err = float(np.linalg.norm(out.x_hat - x) / np.linalg.norm(x))
    print(
        json.dumps(
            {
                "algorithm": args.algo,
                "k": args.k,
                "sigma": args.sigma,
                "relative_error": rel_err,
                "recovery_rate": max(0.0, 1.0 - rel_err),
                "success": rel_err <= args.threshold,
                "iterations": out.iterations,
                "residual_norm": out.final_residual_norm,
                "converged": out.converged,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _load_bench_config(args) -> tuple[bench.ExperimentConfig, list[float] | None]:
    raw: dict = {}
    if args.config:
        if not os.path.exists(args.config):
            raise UsageError(f"config file not found: {args.config}")
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"bad JSON in {args.config}: {exc}") from None
    src = dict(raw.get("matrix_source", {}))
    if args.source is not None:
        src["kind"] = args.source
    for flag, key in ((args.M, "M"), (args.N, "N"), (args.d, "d")):
        if flag is not None:
            src[key] = flag
    if args.matrix_file is not None:
        src["path"] = args.matrix_file
    if "kind" not in src:
        raise UsageError("bench needs a matrix source (--source or config file)")
    source = bench.MatrixSource(
        kind=src["kind"],
        M=int(src.get("M", 0)),
        N=int(src.get("N", 0)),
        d=int(src.get("d", 0)),
        path=src.get("path", ""),
    )
    algorithm = args.algo if args.algo is not None else raw.get("algorithm")
    if not algorithm:
        raise UsageError("bench needs an algorithm (--algo or config file)")
    if args.k is not None:
        sparsity = tuple(_parse_int_list(args.k, "-k"))
    else:
        sparsity = tuple(int(v) for v in raw.get("sparsity", [40]))
    sigmas = None
    if args.sigmas is not None:
        sigmas = _parse_float_list(args.sigmas, "--sigmas")
    elif raw.get("sigmas"):
        sigmas = [float(v) for v in raw["sigmas"]]

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return raw.get(key, default)

    config = bench.ExperimentConfig(
        matrix_source=source,
        algorithm=algorithm,
        sparsity=sparsity,
        trials=int(pick(args.trials, "trials", 500)),
        master_seed=int(pick(args.seed, "master_seed", 0)),
        noise_sigma=float(pick(args.sigma, "noise_sigma", 0.0)),
        success_threshold=float(pick(args.threshold, "success_threshold", 1e-4)),
        signal_normalization=bool(raw.get("signal_normalization", False)),
        threads=int(pick(args.threads, "threads", 1)),
        algo_params=dict(raw.get("algo_params", {})),
    )
    return config, sigmas


def _cmd_bench(args, created) -> int:
    config, sigmas = _load_bench_config(args)
    _announce_seed(config.master_seed)
    if sigmas is not None:
        stats = bench.sweep(config, bench.AXIS_NOISE, sigmas)
    else:
        stats = bench.run_trials(config)
    csv_path = args.output + ".csv"
    json_path = args.output + ".json"
    created.extend([csv_path, json_path])
    bench.write_reports(config, stats, csv_path, json_path)
    print(csv_path)
    print(json_path)
    return 0


def _cmd_dmax(args, created) -> int:
    cfg = PegConfig(seed=args.seed, max_retries=args.restarts)
    result = find_dmax(args.M, args.N, cfg)
    if args.output:
        created.append(args.output)
        write_matrix(result.matrix, args.output)
    print(
        json.dumps(
            {
                "M": args.M,
                "N": args.N,
                "practical_dmax": result.d_max,
                "theoretical_bound": dmax_theoretical_bound(args.M, args.N),
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


_COMMANDS = {
    "construct": _cmd_construct,
    "analyze": _cmd_analyze,
    "recover": _cmd_recover,
    "bench": _cmd_bench,
    "dmax": _cmd_dmax,
}


def _announce_seed(seed) -> None:
    print(f"# master seed: {seed}", file=sys.stderr)


def execute(argv) -> int:
    """Run one CLI invocation; returns the process exit code."""
    created: list[str] = []
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.command != "bench":
            # bench resolves its seed from config + flags and announces it itself
            _announce_seed(getattr(args, "seed", 0))
        return _COMMANDS[args.command](args, created)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _remove(created)
        return 1
    except SystemExit as exc:  # argparse --help / --version
        code = exc.code if isinstance(exc.code, int) else 0
        return code
    except (BincsError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        _remove(created)
        return 2


def _remove(paths) -> None:
    for p in paths:
        try:
            os.remove(p)
        except OSError:
            pass


def main() -> None:
    sys.exit(execute(sys.argv[1:]))


if __name__ == "__main__":
    main()
