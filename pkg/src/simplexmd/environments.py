"""Loss-sequence generators and feedback oracles for the online steppers.

Every environment exposes ``losses(k, p) -> ndarray``: the full loss vector
of step k, chosen while seeing at most the learner's current distribution
``p`` (and, internally, its own history). The learner's action for step k is
always drawn *after* the loss vector is fixed, so adversaries can react to
intentions but never to realizations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import ContractError, SimplexPoint, SubgradientSample

__all__ = [
    "BanditFeedback",
    "linear_loss_gradient",
    "importance_weighted_estimate",
    "bandit_effective_bound",
    "FixedLosses",
    "BernoulliArms",
    "BestResponseAdversary",
]


@dataclass
class BanditFeedback:
    """What a bandit learner sees after one pull: the arm, its loss, the step."""

    arm: int
    loss: float
    step: int

    def __post_init__(self):
        if not 0.0 <= self.loss <= 1.0:
            raise ValueError(f"bandit losses live in [0, 1], got {self.loss}")


def linear_loss_gradient(losses, bound: float) -> SubgradientSample:
    """Wrap a full-information linear loss vector as its own gradient.

    Raises ``ContractError`` when the vector breaks the declared bound (the
    sample type enforces it).
    """
    return SubgradientSample(np.asarray(losses, dtype=float), bound)


def importance_weighted_estimate(p, feedback: BanditFeedback) -> SubgradientSample:
    """Unbiased single-arm gradient estimate ``loss / p_arm`` on the pulled coordinate.

    Unbiased for the full loss vector when the arm was drawn from ``p``:
    summing ``p_i * estimate(arm=i)`` over arms recovers the vector exactly.
    No probability clipping is applied; the estimate declares its own
    sup-norm bound.
    """
    weights = p.weights if isinstance(p, SimplexPoint) else np.asarray(p, dtype=float)
    prob = float(weights[feedback.arm])
    if prob <= 0.0:
        raise ContractError(f"pulled arm {feedback.arm} has probability {prob}")
    entries = np.zeros(weights.size)
    entries[feedback.arm] = feedback.loss / prob
    return SubgradientSample(entries, abs(feedback.loss) / prob)


def bandit_effective_bound(n_arms: int) -> float:
    """Effective gradient-bound constant ``sqrt(2 n)`` for bandit feedback."""
    if n_arms < 2:
        raise ValueError("bandit problems need at least 2 arms")
    return float(np.sqrt(2.0 * n_arms))


class FixedLosses:
    """Replays a fixed list of loss vectors, one row per step."""

    def __init__(self, matrix, bound: float | None = None):
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise ValueError("expected a 2-d array of per-step loss vectors")
        worst = float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0
        self.bound = float(bound) if bound is not None else max(worst, 1e-300)
        if worst > self.bound * (1.0 + 1e-12):
            raise ContractError(f"listed losses reach {worst}, above declared bound {self.bound}")

    @classmethod
    def from_csv(cls, path, bound: float | None = None) -> "FixedLosses":
        return cls(np.loadtxt(path, delimiter=",", ndmin=2), bound=bound)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def steps(self) -> int:
        return self.matrix.shape[0]

    def losses(self, k: int, p=None) -> np.ndarray:
        if not 1 <= k <= self.matrix.shape[0]:
            raise ValueError(f"step {k} outside the listed range 1..{self.matrix.shape[0]}")
        return self.matrix[k - 1]


class BernoulliArms:
    """I.i.d. Bernoulli losses with fixed per-arm means (stochastic regime)."""

    def __init__(self, means, rng: np.random.Generator | int):
        self.means = np.asarray(means, dtype=float)
        if self.means.ndim != 1 or self.means.size < 1:
            raise ValueError("means must be a 1-d vector")
        if np.any(self.means < 0.0) or np.any(self.means > 1.0):
            raise ValueError("Bernoulli means must lie in [0, 1]")
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.bound = 1.0

    @classmethod
    def from_json(cls, path) -> "BernoulliArms":
        with open(path) as fh:
            spec = json.load(fh)
        return cls(spec["means"], np.random.default_rng(spec.get("seed", 0)))

    @property
    def dim(self) -> int:
        return self.means.size

    def losses(self, k: int, p=None) -> np.ndarray:
        return (self.rng.random(self.means.size) < self.means).astype(float)


class BestResponseAdversary:
    """Puts loss 1 on the learner's current favourite coordinate, 0 elsewhere.

    Ties break to the lowest index. Sees the distribution the learner is
    about to play from, never the realized draw.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim
        self.bound = 1.0

    def losses(self, k: int, p) -> np.ndarray:
        weights = p.weights if isinstance(p, SimplexPoint) else np.asarray(p, dtype=float)
        out = np.zeros(self.dim)
        out[int(np.argmax(weights))] = 1.0
        return out
