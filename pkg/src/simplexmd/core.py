"""Entropic prox machinery on the probability simplex.

The dual vector accumulates negated subgradients; the primal point is
recovered by a temperature-scaled softmax (the prox map of the negative
entropy). Two play styles share one state: play the full smoothed
distribution, or sample a single vertex from it. Vertex sampling is
realized either by inverse-CDF draws or by the Gumbel-max trick; both
induce exactly the softmax law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ContractError",
    "SimplexPoint",
    "SubgradientSample",
    "DualState",
    "ProductSimplexSpec",
    "softmax_prox",
    "smoothed_max",
    "kl_to_uniform",
    "adaptive_beta",
    "nonadaptive_gamma",
    "dual_averaging_step",
    "exp_weights_distribution",
    "sample_vertex",
    "draw_index",
    "gumbel_noise",
    "gumbel_argmax",
    "product_simplex_prox",
    "spawn_rngs",
]

# Smallest positive normal double; keeps -log(-log(u)) finite.
_TINY = np.finfo(float).tiny


class ContractError(RuntimeError):
    """A runtime contract was violated (bound exceeded, state misused)."""


def _as_vector(y, name: str = "y") -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0.0:
        raise ValueError(f"beta must be a positive finite real, got {beta}")
    return beta


def spawn_rngs(seed: int, k: int = 2) -> list[np.random.Generator]:
    """Derive ``k`` independent generators from one seed (algorithm, environment, ...)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


@dataclass
class SimplexPoint:
    """Nonnegative weights summing to ``mass`` (default 1): a scaled probability vector."""

    weights: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        self.weights = _as_vector(self.weights, "weights")
        self.mass = float(self.mass)
        if np.any(self.weights < 0.0):
            raise ValueError("simplex weights must be nonnegative")
        total = float(self.weights.sum())
        if abs(total - self.mass) > 1e-9 * max(1.0, abs(self.mass)):
            raise ValueError(f"weights sum to {total}, expected mass {self.mass}")

    @property
    def dim(self) -> int:
        return self.weights.size

    def __len__(self) -> int:
        return self.weights.size


def _trusted_point(weights: np.ndarray, mass: float = 1.0) -> SimplexPoint:
    # Constructor for weights that are valid by construction (softmax output);
    # skips the validation passes on the hot path.
    pt = object.__new__(SimplexPoint)
    pt.weights = weights
    pt.mass = mass
    return pt


@dataclass
class SubgradientSample:
    """A subgradient vector together with a certified sup-norm bound.

    Importance-weighted bandit estimates may exceed the environment's loss
    bound; they still have to respect their own declared one.
    """

    entries: np.ndarray
    inf_norm_bound: float
    inf_norm: float = 0.0

    def __post_init__(self):
        self.entries = _as_vector(self.entries, "entries")
        self.inf_norm_bound = float(self.inf_norm_bound)
        self.inf_norm = float(np.max(np.abs(self.entries)))
        if self.inf_norm > self.inf_norm_bound * (1.0 + 1e-12) + 1e-300:
            raise ContractError(
                f"subgradient sup-norm {self.inf_norm} exceeds declared bound {self.inf_norm_bound}"
            )

    @property
    def dim(self) -> int:
        return self.entries.size


@dataclass
class DualState:
    """Accumulated dual vector of one online run.

    ``y`` holds the negated sum of the subgradients seen so far, ``t`` how
    many updates were applied. With ``horizon=None`` the state uses the
    anytime temperature schedule; a fixed horizon selects the known-N
    constant-step variant.
    """

    y: np.ndarray
    grad_bound: float
    t: int = 0
    horizon: int | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.ndim != 1 or self.y.size < 2:
            raise ValueError("dual state needs dimension >= 2")
        self.grad_bound = float(self.grad_bound)
        if self.grad_bound <= 0:
            raise ValueError("grad_bound must be positive")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be a positive integer")

    @classmethod
    def fresh(cls, dim: int, grad_bound: float, horizon: int | None = None) -> "DualState":
        return cls(y=np.zeros(int(dim)), grad_bound=grad_bound, horizon=horizon)

    @property
    def dim(self) -> int:
        return self.y.size

    def update(self, grad: SubgradientSample) -> "DualState":
        """Accumulate one negated subgradient in place."""
        if grad.dim != self.dim:
            raise ValueError(f"gradient dimension {grad.dim} != state dimension {self.dim}")
        if self.horizon is not None and self.t >= self.horizon:
            raise ContractError(f"state already ran its full horizon of {self.horizon} steps")
        self.y -= grad.entries
        self.t += 1
        return self


def softmax_prox(y, beta: float) -> SimplexPoint:
    """Entropy-regularized projection of a dual vector onto the unit simplex.

    Returns x with x_i proportional to exp(y_i / beta), computed with a
    max shift so any finite input is safe from overflow.
    """
    y = _as_vector(y)
    beta = _check_beta(beta)
    z = y / beta
    z -= z.max()
    w = np.exp(z)
    w /= w.sum()
    return _trusted_point(w)


def smoothed_max(y, beta: float) -> float:
    """Soft maximum ``beta * log(mean(exp(y / beta)))``.

    Sandwiched between ``max(y) - beta * log(n)`` and ``max(y)``.
    """
    y = _as_vector(y)
    beta = _check_beta(beta)
    m = float(y.max())
    return m + beta * (math.log(float(np.exp((y - m) / beta).sum())) - math.log(y.size))


def kl_to_uniform(x: SimplexPoint) -> float:
    """KL divergence of a unit-mass point from the uniform distribution.

    Equals ``log n + sum x_i log x_i`` with ``0 log 0 = 0``; lies in [0, log n].
    """
    if abs(x.mass - 1.0) > 1e-9:
        raise ValueError("kl_to_uniform is defined for unit-mass points")
    w = x.weights
    pos = w > 0.0
    return float(math.log(w.size) + np.sum(w[pos] * np.log(w[pos])))


def adaptive_beta(t: int, grad_bound: float, dim: int) -> float:
    """Anytime temperature schedule ``M * sqrt(t) / sqrt(log n)``."""
    if t < 1:
        raise ValueError("step index must be >= 1")
    if dim < 2:
        raise ValueError("dimension must be >= 2 (log n would vanish)")
    if grad_bound <= 0:
        raise ValueError("grad_bound must be positive")
    return grad_bound * math.sqrt(t) / math.sqrt(math.log(dim))


def nonadaptive_gamma(horizon: int, grad_bound: float, dim: int) -> float:
    """Constant step size ``sqrt(2 log n / N) / M`` for a known horizon."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if dim < 2:
        raise ValueError("dimension must be >= 2 (log n would vanish)")
    if grad_bound <= 0:
        raise ValueError("grad_bound must be positive")
    return math.sqrt(2.0 * math.log(dim) / horizon) / grad_bound


def exp_weights_distribution(state: DualState) -> SimplexPoint:
    """Exponential-weights distribution of the current dual state.

    Anytime mode evaluates the temperature at the upcoming step; the fresh
    state maps to the uniform point in both modes.
    """
    if state.horizon is None:
        return softmax_prox(state.y, adaptive_beta(state.t + 1, state.grad_bound, state.dim))
    gamma = nonadaptive_gamma(state.horizon, state.grad_bound, state.dim)
    return softmax_prox(gamma * state.y, 1.0)


def dual_averaging_step(state: DualState, grad: SubgradientSample) -> tuple[DualState, SimplexPoint]:
    """Accumulate one subgradient and return the next smoothed play.

    Mutates ``state`` in place and returns it together with the point the
    algorithm plays on the following step.
    """
    state.update(grad)
    return state, exp_weights_distribution(state)


def draw_index(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF categorical draw; deterministic given the generator state."""
    cdf = np.cumsum(weights)
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), weights.size - 1))


def sample_vertex(state: DualState, rng: np.random.Generator) -> tuple[int, SimplexPoint]:
    """Sample a vertex index from the exponential-weights distribution.

    Returns the 0-based index together with the distribution it was drawn
    from.
    """
    p = exp_weights_distribution(state)
    return draw_index(p.weights, rng), p


def gumbel_noise(rng: np.random.Generator, size, scale: float = 1.0) -> np.ndarray:
    """Standard Gumbel noise via the inverse CDF ``-scale * log(-log(u))``.

    Uniform draws are clamped away from 0 so the result is always finite.
    """
    u = np.maximum(rng.random(size), _TINY)
    return -scale * np.log(-np.log(u))


def gumbel_argmax(y, beta: float, rng: np.random.Generator, size: int | None = None):
    """Gumbel-max draw: ``argmax_i (y_i + zeta_i)`` with Gumbel noise of scale beta.

    The induced index law equals ``softmax_prox(y, beta)`` exactly. Ties
    resolve to the lowest index. With ``size`` given, returns an array of
    independent draws.
    """
    y = _as_vector(y)
    beta = _check_beta(beta)
    if size is None:
        return int(np.argmax(y + gumbel_noise(rng, y.size, beta)))
    return np.argmax(y[None, :] + gumbel_noise(rng, (int(size), y.size), beta), axis=1)


@dataclass
class ProductSimplexSpec:
    """Shape of a product of scaled simplices: one (size, mass) pair per block."""

    blocks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        self.blocks = tuple((int(n), float(d)) for n, d in self.blocks)
        if not self.blocks:
            raise ValueError("need at least one block")
        for n, d in self.blocks:
            if n < 1:
                raise ValueError("block sizes must be >= 1")
            if d <= 0:
                raise ValueError("block masses must be positive")

    @property
    def total_size(self) -> int:
        return sum(n for n, _ in self.blocks)


def product_simplex_prox(y, beta: float, spec: ProductSimplexSpec) -> list[SimplexPoint]:
    """Block entropy prox over a product of scaled simplices.

    Block j maximizes its share of ``<y, z> - beta * V(z)`` where the block
    potential is ``d_j log n_j + sum_i z_i log(z_i / d_j)``; the maximizer is
    ``d_j * softmax(y_block / beta)``. With a single unit-mass block this
    reduces exactly to ``softmax_prox``.
    """
    y = _as_vector(y)
    beta = _check_beta(beta)
    if y.size != spec.total_size:
        raise ValueError(f"y has length {y.size}, spec wants {spec.total_size}")
    out = []
    start = 0
    for n, d in spec.blocks:
        z = y[start : start + n] / beta
        z = z - z.max()
        w = np.exp(z)
        out.append(_trusted_point(d * w / w.sum(), mass=d))
        start += n
    return out
