"""Regret accounting, bound evaluators, statistical helpers, run traces.

The bound evaluators turn the guarantees of the two steppers into numbers
that experiments print next to realized quantities. Names:

- ``da_mean`` / ``da_highprob``: smoothed-play stepper, in expectation and
  with deviation budget Omega (``sqrt(8 Omega)`` term).
- ``rp_mean`` / ``rp_highprob`` / ``rp_highprob_det``: sampled-vertex
  stepper; the general high-probability constant is ``sqrt(18 Omega)``,
  refined to ``sqrt(2 Omega)`` when losses are deterministic functions.
- ``rp_nonadaptive_det``: sampled-vertex stepper with known horizon,
  ``sqrt(2) M (sqrt(log n) + 2 sqrt(Omega)) / sqrt(N)``.
- ``product_mean``: product-of-scaled-simplices replacement
  ``2 M sqrt(max_j d_j * sum_j d_j log n_j / N)``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .core import ContractError, ProductSimplexSpec, SimplexPoint

__all__ = [
    "BOUND_IDS",
    "BoundSpec",
    "evaluate_bound",
    "RunTrace",
    "RegretReport",
    "pseudo_regret",
    "highprob_check",
    "chi_square_gof",
]

# Per-step distributions are kept in the trace only while n * N stays below this.
DISTRIBUTION_CELL_BUDGET = 200_000


def _bound_da_mean(M, n, N, omega, blocks):
    return 2.0 * M * math.sqrt(math.log(n) / N)


def _bound_da_highprob(M, n, N, omega, blocks):
    return (2.0 * M / math.sqrt(N)) * (math.sqrt(math.log(n)) + math.sqrt(8.0 * omega))


def _bound_rp_mean(M, n, N, omega, blocks):
    return 2.0 * M * math.sqrt(math.log(n) / N)


def _bound_rp_highprob(M, n, N, omega, blocks):
    return (2.0 * M / math.sqrt(N)) * (math.sqrt(math.log(n)) + math.sqrt(18.0 * omega))


def _bound_rp_highprob_det(M, n, N, omega, blocks):
    return (2.0 * M / math.sqrt(N)) * (math.sqrt(math.log(n)) + math.sqrt(2.0 * omega))


def _bound_rp_nonadaptive_det(M, n, N, omega, blocks):
    return (math.sqrt(2.0) * M / math.sqrt(N)) * (math.sqrt(math.log(n)) + 2.0 * math.sqrt(omega))


def _bound_product_mean(M, n, N, omega, blocks):
    d_max = max(d for _, d in blocks.blocks)
    entropy_budget = sum(d * math.log(m) for m, d in blocks.blocks)
    return 2.0 * M * math.sqrt(d_max * entropy_budget / N)


BOUND_IDS = {
    "da_mean": _bound_da_mean,
    "da_highprob": _bound_da_highprob,
    "rp_mean": _bound_rp_mean,
    "rp_highprob": _bound_rp_highprob,
    "rp_highprob_det": _bound_rp_highprob_det,
    "rp_nonadaptive_det": _bound_rp_nonadaptive_det,
    "product_mean": _bound_product_mean,
}

_NEEDS_OMEGA = {"da_highprob", "rp_highprob", "rp_highprob_det", "rp_nonadaptive_det"}


@dataclass
class BoundSpec:
    """Parameters of one per-step regret bound evaluation."""

    bound_id: str
    grad_bound: float
    dim: int
    steps: int
    omega: float | None = None
    blocks: ProductSimplexSpec | None = None


def evaluate_bound(spec: BoundSpec) -> float:
    """Per-step bound value for the named guarantee; see the module docstring."""
    if spec.bound_id not in BOUND_IDS:
        raise ValueError(f"unknown bound id {spec.bound_id!r}; known: {sorted(BOUND_IDS)}")
    if spec.grad_bound <= 0:
        raise ValueError("grad_bound must be positive")
    if spec.steps < 1:
        raise ValueError("steps must be >= 1")
    if spec.bound_id == "product_mean":
        if spec.blocks is None:
            raise ValueError("product_mean needs a block spec")
    elif spec.dim < 2:
        raise ValueError("dimension must be >= 2")
    omega = spec.omega
    if spec.bound_id in _NEEDS_OMEGA:
        if omega is None or omega < 0:
            raise ValueError(f"{spec.bound_id} needs omega >= 0")
    else:
        omega = 0.0
    value = BOUND_IDS[spec.bound_id](spec.grad_bound, spec.dim, spec.steps, omega, spec.blocks)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"bound evaluated to {value}; check parameters")
    return value


@dataclass
class RunTrace:
    """Per-step record of one run.

    ``losses`` holds the per-step loss actually accounted (realized or
    conditionally expected, depending on the runner), ``actions`` the
    sampled index (-1 when the play was a full distribution),
    ``dual_checksums`` the running sum of the dual vector. Distributions
    are kept only for small runs; game runs add per-step read deltas and
    checkpointed duality gaps.
    """

    algorithm: str
    dim: int
    steps: int
    grad_bound: float
    seed: int | None
    losses: np.ndarray
    actions: np.ndarray
    grad_norms: np.ndarray
    dual_checksums: np.ndarray
    distributions: np.ndarray | None = None
    reads_solver: np.ndarray | None = None
    reads_verify: np.ndarray | None = None
    gap_checkpoints: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return len(self.losses) == self.steps

    def to_csv(self, path) -> None:
        """One row per step: k, loss, action, gap_if_game, reads_solver, reads_verify."""
        if not self.complete:
            raise ContractError("refusing to export an incomplete trace")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "loss", "action", "gap_if_game", "reads_solver", "reads_verify"])
            for i in range(self.steps):
                k = i + 1
                gap = self.gap_checkpoints.get(k, "")
                rs = int(self.reads_solver[i]) if self.reads_solver is not None else 0
                rv = int(self.reads_verify[i]) if self.reads_verify is not None else 0
                writer.writerow([k, repr(float(self.losses[i])), int(self.actions[i]), gap, rs, rv])


def store_distributions(dim: int, steps: int, requested: bool | None) -> bool:
    """Trace memory policy: keep per-step distributions only for small runs."""
    if requested is not None:
        return requested
    return dim * steps <= DISTRIBUTION_CELL_BUDGET


@dataclass
class RegretReport:
    """Cumulative loss vs the best fixed coordinate, next to the matching bound."""

    algorithm: str
    dim: int
    steps: int
    grad_bound: float
    seed: int | None
    total_loss: float
    comparator_loss: float
    bound_id: str
    bound_value: float
    max_grad_norm: float = 0.0

    @property
    def pseudo_regret_per_step(self) -> float:
        return (self.total_loss - self.comparator_loss) / self.steps

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "dim": self.dim,
            "steps": self.steps,
            "grad_bound": self.grad_bound,
            "seed": self.seed,
            "total_loss": self.total_loss,
            "comparator_loss": self.comparator_loss,
            "pseudo_regret_per_step": self.pseudo_regret_per_step,
            "bound_id": self.bound_id,
            "bound_value": self.bound_value,
            "max_grad_norm": self.max_grad_norm,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def pseudo_regret(trace: RunTrace, comparator) -> float:
    """Mean per-step loss of the run minus the best fixed coordinate's mean.

    ``comparator`` holds per-coordinate cumulative (expected or realized)
    losses over the whole run.
    """
    if not trace.complete:
        raise ContractError(f"trace has {len(trace.losses)} of {trace.steps} steps")
    comparator = np.asarray(comparator, dtype=float)
    if comparator.ndim != 1 or comparator.size != trace.dim:
        raise ValueError("comparator must hold one cumulative loss per coordinate")
    return float(np.mean(trace.losses) - comparator.min() / trace.steps)


def highprob_check(values, bound: float, sigma: float) -> tuple[bool, float]:
    """Check a deviation guarantee across seeds with binomial Monte-Carlo slack.

    Passes when the fraction of values above ``bound`` is at most
    ``sigma + 2 sqrt(sigma (1 - sigma) / #seeds)``.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 10:
        raise ValueError("need at least 10 seeds for a deviation check")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    fraction = float(np.mean(values > bound))
    slack = 2.0 * math.sqrt(sigma * (1.0 - sigma) / values.size)
    return fraction <= sigma + slack, fraction


def chi_square_gof(counts, expected: SimplexPoint) -> float:
    """Chi-square goodness-of-fit p-value of observed counts vs a distribution.

    Cells with expected count below 5 are pooled (the pool joins the
    smallest regular cell if it stays too thin). Zero-probability cells
    must be empty; an observation there makes the p-value 0.
    """
    counts = np.asarray(counts, dtype=float)
    probs = expected.weights if isinstance(expected, SimplexPoint) else np.asarray(expected, float)
    if counts.ndim != 1 or counts.size != probs.size:
        raise ValueError("counts and expected probabilities must have equal length")
    if abs(probs.sum() - 1.0) > 1e-9 or np.any(probs < 0):
        raise ValueError("expected distribution is not a probability vector")
    if np.count_nonzero(probs) < 2:
        raise ValueError("expected distribution is degenerate (fewer than 2 support points)")
    total = counts.sum()
    if total < 1000:
        raise ValueError("need a total count of at least 1000")

    support = probs > 0.0
    if np.any(counts[~support] > 0):
        return 0.0
    counts, probs = counts[support], probs[support]
    expected_counts = total * probs

    big = expected_counts >= 5.0
    obs = list(counts[big])
    exp = list(expected_counts[big])
    pooled_obs, pooled_exp = counts[~big].sum(), expected_counts[~big].sum()
    if pooled_exp > 0:
        if pooled_exp >= 5.0 or not exp:
            obs.append(pooled_obs)
            exp.append(pooled_exp)
        else:
            smallest = int(np.argmin(exp))
            obs[smallest] += pooled_obs
            exp[smallest] += pooled_exp
    if len(exp) < 2:
        return 1.0
    obs_arr, exp_arr = np.asarray(obs), np.asarray(exp)
    statistic = float(np.sum((obs_arr - exp_arr) ** 2 / exp_arr))
    return float(chi2.sf(statistic, df=len(exp) - 1))
