"""Online mirror descent on the probability simplex, two ways.

A dual-averaging stepper with the entropic prox (exponential weights) that
either plays the full smoothed distribution or samples a vertex from it,
plus the classic constructions on top: adversarial bandits via importance
weighting, expert weighting for linear/convex/non-convex losses, a
sublinear randomized solver for sparse antagonistic matrix games, and
PageRank as such a game.
"""

from .analysis import (
    BOUND_IDS,
    BoundSpec,
    RegretReport,
    RunTrace,
    chi_square_gof,
    evaluate_bound,
    highprob_check,
    pseudo_regret,
)
from .bandits import run_bandit
from .core import (
    ContractError,
    DualState,
    ProductSimplexSpec,
    SimplexPoint,
    SubgradientSample,
    adaptive_beta,
    draw_index,
    dual_averaging_step,
    exp_weights_distribution,
    gumbel_argmax,
    gumbel_noise,
    kl_to_uniform,
    nonadaptive_gamma,
    product_simplex_prox,
    sample_vertex,
    smoothed_max,
    softmax_prox,
    spawn_rngs,
)
from .environments import (
    BanditFeedback,
    BernoulliArms,
    BestResponseAdversary,
    FixedLosses,
    bandit_effective_bound,
    importance_weighted_estimate,
    linear_loss_gradient,
)
from .experts import (
    ConvexExpertsResult,
    run_experts_convex,
    run_experts_linear,
    run_experts_nonconvex,
)
from .games import (
    GameSolution,
    duality_gap,
    iterations_for,
    pagerank_via_game,
    solve_matrix_game,
)
from .sparse import ReadCounter, SparseGameMatrix, load_matrix_market

__version__ = "0.1.0"
