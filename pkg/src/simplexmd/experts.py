"""Expert-weighting runners: linear, convex, and non-convex losses.

Linear losses run the deterministic smoothed-play stepper with the loss
vector as its own gradient. Convex losses play the mixed strategy and piggy-
back on the linear surrogate. Non-convex losses switch to sampled plays:
one expert is drawn per step from the exponential-weights distribution and
the full loss vector still updates the state.
"""

from __future__ import annotations

import numpy as np

from .analysis import BoundSpec, RegretReport, RunTrace, evaluate_bound, store_distributions
from .core import (
    ContractError,
    DualState,
    draw_index,
    dual_averaging_step,
    exp_weights_distribution,
)
from .environments import linear_loss_gradient

__all__ = [
    "run_experts_linear",
    "run_experts_convex",
    "run_experts_nonconvex",
    "ConvexExpertsResult",
]


def _expert_strategies_at(strategies, k: int) -> np.ndarray:
    if callable(strategies):
        z = np.asarray(strategies(k), dtype=float)
    else:
        strategies = np.asarray(strategies, dtype=float)
        z = strategies[k - 1] if strategies.ndim == 3 else strategies
    if z.ndim != 2:
        raise ValueError("expert strategies must form an (n_experts, dim) matrix")
    return z


def _omega_at(omega_fn, k: int, dist: np.ndarray):
    if callable(omega_fn):
        return omega_fn(k, dist)
    return np.asarray(omega_fn, dtype=float)[k - 1]


def run_experts_linear(env, dim: int, steps: int, grad_bound: float | None = None,
                       seed: int | None = None,
                       keep_distributions: bool | None = None) -> tuple[RegretReport, RunTrace]:
    """Deterministic full-information run on linear losses.

    Per-step loss is ``<l_k, x_k>``; regret is measured against the best
    fixed coordinate of the summed losses.
    """
    if dim < 2:
        raise ValueError("need at least two experts")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    bound = float(grad_bound if grad_bound is not None else env.bound)

    state = DualState.fresh(dim, bound)
    x = exp_weights_distribution(state)
    keep = store_distributions(dim, steps, keep_distributions)

    losses = np.empty(steps)
    grad_norms = np.empty(steps)
    checksums = np.empty(steps)
    dists = np.empty((steps, dim)) if keep else None
    col_sums = np.zeros(dim)

    for k in range(1, steps + 1):
        if keep:
            dists[k - 1] = x.weights
        l = env.losses(k, x.weights)
        losses[k - 1] = float(l @ x.weights)
        col_sums += l
        grad = linear_loss_gradient(l, bound)
        grad_norms[k - 1] = grad.inf_norm
        state, x = dual_averaging_step(state, grad)
        checksums[k - 1] = float(state.y.sum())

    trace = RunTrace("experts-linear", dim, steps, bound, seed, losses,
                     np.full(steps, -1, dtype=int), grad_norms, checksums, dists)
    spec = BoundSpec("da_mean", bound, dim, steps)
    report = RegretReport("experts-linear", dim, steps, bound, seed,
                          float(losses.sum()), float(col_sums.min()),
                          "da_mean", evaluate_bound(spec), float(grad_norms.max()))
    return report, trace


class ConvexExpertsResult:
    """Outputs of a convex-loss run: realized and surrogate views side by side."""

    def __init__(self, report, surrogate_report, trace, realized_losses,
                 surrogate_losses, expert_totals, plays):
        self.report = report
        self.surrogate_report = surrogate_report
        self.trace = trace
        self.realized_losses = realized_losses
        self.surrogate_losses = surrogate_losses
        self.expert_totals = expert_totals
        self.plays = plays


def run_experts_convex(strategies, loss_fn, omega_fn, steps: int, grad_bound: float,
                       seed: int | None = None,
                       keep_distributions: bool | None = None) -> ConvexExpertsResult:
    """Full-information run on convex losses via the linear surrogate.

    ``loss_fn(omega, Z)`` must return the loss of each row of ``Z``; the
    runner plays the convex combination of the experts' strategies, so the
    realized loss is bounded by the surrogate ``<l_k, x_k>`` whenever the
    loss is convex in the strategy.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    z0 = _expert_strategies_at(strategies, 1)
    dim = z0.shape[0]
    if dim < 2:
        raise ValueError("need at least two experts")
    bound = float(grad_bound)

    state = DualState.fresh(dim, bound)
    x = exp_weights_distribution(state)
    keep = store_distributions(dim, steps, keep_distributions)

    surrogate = np.empty(steps)
    realized = np.empty(steps)
    grad_norms = np.empty(steps)
    checksums = np.empty(steps)
    dists = np.empty((steps, dim)) if keep else None
    plays = np.empty((steps, z0.shape[1]))
    col_sums = np.zeros(dim)

    for k in range(1, steps + 1):
        if keep:
            dists[k - 1] = x.weights
        z = _expert_strategies_at(strategies, k)
        omega = _omega_at(omega_fn, k, x.weights)
        l = np.asarray(loss_fn(omega, z), dtype=float)
        if l.shape != (dim,):
            raise ValueError("loss_fn must return one loss per expert")
        play = x.weights @ z
        plays[k - 1] = play
        realized[k - 1] = float(np.asarray(loss_fn(omega, play[None, :]), dtype=float)[0])
        surrogate[k - 1] = float(l @ x.weights)
        col_sums += l
        grad = linear_loss_gradient(l, bound)
        grad_norms[k - 1] = grad.inf_norm
        state, x = dual_averaging_step(state, grad)
        checksums[k - 1] = float(state.y.sum())

    trace = RunTrace("experts-convex", dim, steps, bound, seed, surrogate,
                     np.full(steps, -1, dtype=int), grad_norms, checksums, dists)
    spec = BoundSpec("da_mean", bound, dim, steps)
    bound_value = evaluate_bound(spec)
    surrogate_report = RegretReport("experts-convex-surrogate", dim, steps, bound, seed,
                                    float(surrogate.sum()), float(col_sums.min()),
                                    "da_mean", bound_value, float(grad_norms.max()))
    report = RegretReport("experts-convex", dim, steps, bound, seed,
                          float(realized.sum()), float(col_sums.min()),
                          "da_mean", bound_value, float(grad_norms.max()))
    return ConvexExpertsResult(report, surrogate_report, trace, realized,
                               surrogate, col_sums.copy(), plays)


def run_experts_nonconvex(strategies, loss_fn, omega_fn, steps: int, grad_bound: float,
                          seed: int, horizon_known: bool = False,
                          keep_distributions: bool | None = None) -> tuple[RegretReport, RunTrace]:
    """Sampled-play run for losses with no convexity guarantee.

    One expert index is drawn per step from the exponential-weights
    distribution; the full loss vector (every expert evaluated) updates the
    state. The per-step loss accounted is the conditional expectation
    ``<l_k, p_k>``; the environment's move may depend on ``p_k`` but the
    draw happens only after the losses are fixed.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    z0 = _expert_strategies_at(strategies, 1)
    dim = z0.shape[0]
    if dim < 2:
        raise ValueError("need at least two experts")
    bound = float(grad_bound)

    rng = np.random.default_rng(seed)
    state = DualState.fresh(dim, bound, horizon=steps if horizon_known else None)
    keep = store_distributions(dim, steps, keep_distributions)

    losses = np.empty(steps)
    actions = np.empty(steps, dtype=int)
    grad_norms = np.empty(steps)
    checksums = np.empty(steps)
    dists = np.empty((steps, dim)) if keep else None
    col_sums = np.zeros(dim)

    for k in range(1, steps + 1):
        p = exp_weights_distribution(state)
        if keep:
            dists[k - 1] = p.weights
        z = _expert_strategies_at(strategies, k)
        omega = _omega_at(omega_fn, k, p.weights)
        l = np.asarray(loss_fn(omega, z), dtype=float)
        if l.shape != (dim,):
            raise ValueError("loss_fn must return one loss per expert")
        # Losses are fixed; only now is the expert drawn.
        j = draw_index(p.weights, rng)
        actions[k - 1] = j
        losses[k - 1] = float(l @ p.weights)
        col_sums += l
        grad = linear_loss_gradient(l, bound)
        grad_norms[k - 1] = grad.inf_norm
        state.update(grad)
        checksums[k - 1] = float(state.y.sum())

    trace = RunTrace("experts-nonconvex", dim, steps, bound, seed, losses,
                     actions, grad_norms, checksums, dists)
    spec = BoundSpec("rp_mean", bound, dim, steps)
    report = RegretReport("experts-nonconvex", dim, steps, bound, seed,
                          float(losses.sum()), float(col_sums.min()),
                          "rp_mean", evaluate_bound(spec), float(grad_norms.max()))
    return report, trace
