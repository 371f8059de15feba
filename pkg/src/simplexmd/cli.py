"""Seeded, reproducible experiment runner.

Every application is a subcommand; each run writes a JSON summary (and
optionally a CSV trace) whose bytes depend only on the arguments and the
seed, with the evaluated theoretical bound printed next to the realized
quantity. Repeats fan seeds out as ``seed + i``.

Exit codes: 0 success, 2 invalid arguments or missing files, 3 contract
violation during a run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .analysis import BOUND_IDS, BoundSpec, evaluate_bound, highprob_check
from .bandits import run_bandit
from .core import ContractError, SimplexPoint, gumbel_argmax, softmax_prox
from .environments import BernoulliArms, BestResponseAdversary, FixedLosses
from .experts import run_experts_linear, run_experts_nonconvex
from .games import pagerank_via_game, solve_matrix_game
from .sparse import load_matrix_market
from .analysis import chi_square_gof

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simplexmd",
                                     description="Online mirror-descent experiments on the simplex")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--repeats", type=int, default=1, help="number of seeds (seed+i)")
        p.add_argument("--summary", help="path for the JSON summary (default: stdout)")
        p.add_argument("--trace", help="path for the CSV trace (suffix -<seed> when repeating)")

    p = sub.add_parser("bandit", help="importance-weighted bandit run")
    p.add_argument("--arms", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--means", help="comma-separated Bernoulli means (default: spread over [0.3, 0.7])")
    p.add_argument("--arms-config", help="JSON file with {means, seed}")
    common(p)

    p = sub.add_parser("experts", help="expert weighting on linear losses")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--variant", choices=["linear", "nonconvex"], default="linear")
    p.add_argument("--losses", help="CSV with one loss vector per row (default: best-response adversary)")
    p.add_argument("--grad-bound", type=float, default=1.0)
    common(p)

    p = sub.add_parser("game", help="randomized sparse matrix-game solver")
    p.add_argument("--matrix", required=True, help="Matrix Market file")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--iterations", type=int, help="override the default iteration budget")
    p.add_argument("--gap-checkpoints", type=int, default=0)
    common(p)

    p = sub.add_parser("pagerank", help="stationary vector of a row-stochastic matrix")
    p.add_argument("--matrix", required=True, help="Matrix Market file (row-stochastic)")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--iterations", type=int)
    common(p)

    p = sub.add_parser("sampler-test", help="Gumbel-max vs softmax goodness of fit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--draws", type=int, default=100_000)
    common(p)

    p = sub.add_parser("bounds", help="tabulate bound values over parameter grids")
    p.add_argument("--bound", required=True, choices=sorted(BOUND_IDS))
    p.add_argument("--grad-bound", type=float, default=1.0)
    p.add_argument("--n", default="", help="comma-separated dimensions")
    p.add_argument("--steps", default="", help="comma-separated horizons")
    p.add_argument("--omega", default="", help="comma-separated omegas (deviation bounds only)")
    p.add_argument("--out", required=True, help="CSV output path")

    return parser


def _emit_summary(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _trace_path(base: str, seed: int, repeats: int) -> str:
    if repeats == 1:
        return base
    if base.endswith(".csv"):
        return f"{base[:-4]}-{seed}.csv"
    return f"{base}-{seed}"


def _cmd_bandit(args) -> dict:
    if args.arms < 2:
        raise ValueError("--arms must be >= 2")
    if args.steps < 1:
        raise ValueError("--steps must be >= 1")
    if args.means:
        means = np.array([float(v) for v in args.means.split(",")])
    elif args.arms_config:
        means = np.asarray(BernoulliArms.from_json(args.arms_config).means)
    else:
        means = np.linspace(0.3, 0.7, args.arms)
    if means.size != args.arms:
        raise ValueError(f"got {means.size} means for {args.arms} arms")

    runs = []
    for r in range(args.repeats):
        seed = args.seed + r
        env = BernoulliArms(means, np.random.default_rng(seed + 1_000_003))
        report, trace = run_bandit(args.arms, args.steps, env, seed)
        if args.trace:
            trace.to_csv(_trace_path(args.trace, seed, args.repeats))
        runs.append(report.as_dict())
    regrets = [r["pseudo_regret_per_step"] for r in runs]
    return {
        "command": "bandit",
        "params": {"arms": args.arms, "steps": args.steps, "means": means.tolist(),
                   "seed": args.seed, "repeats": args.repeats},
        "bound": {"id": "da_mean", "value": runs[0]["bound_value"]},
        "runs": runs,
        "mean_pseudo_regret_per_step": float(np.mean(regrets)),
    }


def _cmd_experts(args) -> dict:
    if args.n < 2:
        raise ValueError("--n must be >= 2 (a single expert is degenerate)")
    if args.steps < 1:
        raise ValueError("--steps must be >= 1")

    runs = []
    for r in range(args.repeats):
        seed = args.seed + r
        if args.losses:
            env = FixedLosses.from_csv(args.losses, bound=args.grad_bound)
            if env.dim != args.n or env.steps < args.steps:
                raise ValueError("loss CSV shape does not cover the requested run")
        else:
            env = BestResponseAdversary(args.n)
        if args.variant == "linear":
            report, trace = run_experts_linear(env, args.n, args.steps,
                                               grad_bound=args.grad_bound, seed=seed)
        else:
            strategies = np.eye(args.n)
            report, trace = run_experts_nonconvex(
                strategies, lambda omega, z: z @ omega,
                lambda k, p: env.losses(k, p),
                args.steps, args.grad_bound, seed)
        if args.trace:
            trace.to_csv(_trace_path(args.trace, seed, args.repeats))
        runs.append(report.as_dict())
    regrets = [r["pseudo_regret_per_step"] for r in runs]
    return {
        "command": "experts",
        "params": {"n": args.n, "steps": args.steps, "variant": args.variant,
                   "grad_bound": args.grad_bound, "losses": args.losses,
                   "seed": args.seed, "repeats": args.repeats},
        "bound": {"id": runs[0]["bound_id"], "value": runs[0]["bound_value"]},
        "runs": runs,
        "mean_pseudo_regret_per_step": float(np.mean(regrets)),
    }


def _cmd_game(args) -> dict:
    A = load_matrix_market(args.matrix)
    runs = []
    for r in range(args.repeats):
        seed = args.seed + r
        solution, trace = solve_matrix_game(A, args.epsilon, args.sigma, seed,
                                            iterations=args.iterations,
                                            gap_checkpoints=args.gap_checkpoints)
        if args.trace:
            trace.to_csv(_trace_path(args.trace, seed, args.repeats))
        runs.append(solution.as_dict())
    gaps = [run["gap"] for run in runs]
    spec = BoundSpec("rp_nonadaptive_det", A.entry_bound, max(A.shape),
                     runs[0]["iterations"], omega=math.log(1.0 / args.sigma))
    return {
        "command": "game",
        "params": {"matrix": args.matrix, "epsilon": args.epsilon, "sigma": args.sigma,
                   "seed": args.seed, "repeats": args.repeats,
                   "iterations": runs[0]["iterations"],
                   "shape": list(A.shape), "nnz": A.nnz, "sparsity": A.sparsity},
        "bound": {"id": "rp_nonadaptive_det_per_player", "value": evaluate_bound(spec)},
        "runs": runs,
        "gap_at_most_epsilon_fraction": float(np.mean([g <= args.epsilon for g in gaps])),
    }


def _cmd_pagerank(args) -> dict:
    P = load_matrix_market(args.matrix)
    runs = []
    for r in range(args.repeats):
        seed = args.seed + r
        point, solution, trace = pagerank_via_game(P, args.epsilon, args.sigma, seed,
                                                   iterations=args.iterations)
        if args.trace:
            trace.to_csv(_trace_path(args.trace, seed, args.repeats))
        entry = solution.as_dict()
        entry["stationarity_residual"] = solution.max_row_payoff
        runs.append(entry)
    residuals = [run["stationarity_residual"] for run in runs]
    return {
        "command": "pagerank",
        "params": {"matrix": args.matrix, "epsilon": args.epsilon, "sigma": args.sigma,
                   "seed": args.seed, "repeats": args.repeats,
                   "iterations": runs[0]["iterations"]},
        "bound": {"id": "stationarity_residual_target", "value": args.epsilon},
        "runs": runs,
        "residual_at_most_epsilon_fraction": float(np.mean([v <= args.epsilon for v in residuals])),
    }


def _cmd_sampler_test(args) -> dict:
    if args.n < 2:
        raise ValueError("--n must be >= 2")
    if args.draws < 1000:
        raise ValueError("--draws must be >= 1000")
    results = []
    for r in range(args.repeats):
        seed = args.seed + r
        rng = np.random.default_rng(seed)
        y = rng.uniform(-2.0 * args.beta, 2.0 * args.beta, size=args.n)
        target = softmax_prox(y, args.beta)
        draws = gumbel_argmax(y, args.beta, rng, size=args.draws)
        counts = np.bincount(draws, minlength=args.n)
        p_value = chi_square_gof(counts, target)
        results.append({"seed": seed, "p_value": p_value, "pass_at_0.001": bool(p_value >= 1e-3),
                        "counts": counts.tolist(), "expected": target.weights.tolist()})
    return {
        "command": "sampler-test",
        "params": {"n": args.n, "beta": args.beta, "draws": args.draws,
                   "seed": args.seed, "repeats": args.repeats},
        "bound": {"id": "chi_square_significance", "value": 1e-3},
        "runs": results,
    }


def _parse_grid(text: str, cast) -> list:
    return [cast(v) for v in text.split(",") if v.strip()]


def _cmd_bounds(args) -> dict:
    dims = _parse_grid(args.n, int)
    horizons = _parse_grid(args.steps, int)
    omegas = _parse_grid(args.omega, float) or [None]
    rows = []
    for n in dims:
        for N in horizons:
            for omega in omegas:
                spec = BoundSpec(args.bound, args.grad_bound, n, N, omega=omega)
                rows.append([args.bound, args.grad_bound, n, N,
                             "" if omega is None else omega, evaluate_bound(spec)])
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bound_id", "grad_bound", "dim", "steps", "omega", "value"])
        writer.writerows(rows)
    return {"command": "bounds", "params": {"bound": args.bound, "out": args.out},
            "rows_written": len(rows)}


_HANDLERS = {
    "bandit": _cmd_bandit,
    "experts": _cmd_experts,
    "game": _cmd_game,
    "pagerank": _cmd_pagerank,
    "sampler-test": _cmd_sampler_test,
    "bounds": _cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = _HANDLERS[args.command](args)
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 3
    except (ValueError, FileNotFoundError) as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2
    _emit_summary(payload, getattr(args, "summary", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
