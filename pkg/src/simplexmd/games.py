"""Randomized solver for antagonistic matrix games, and PageRank on top of it.

Both players run the known-horizon sampled-play stepper simultaneously: the
row player maximizes (sign-flipped dual accumulation), the column player
minimizes. Per step each player draws one pure strategy — via the
Gumbel-max trick, whose index law is exactly the exponential-weights
distribution — and the solver reads only the sampled row and column of the
matrix. Averaged empirical plays approximate the saddle point; the duality
gap is recomputed exactly afterwards with full passes booked on a separate
counter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .analysis import RunTrace
from .core import ContractError, SimplexPoint, gumbel_noise, nonadaptive_gamma
from .sparse import ReadCounter, SparseGameMatrix

__all__ = [
    "GameSolution",
    "iterations_for",
    "duality_gap",
    "solve_matrix_game",
    "pagerank_via_game",
]

_NOISE_CHUNK = 4096


@dataclass
class GameSolution:
    """Averaged strategies of one solve, with exact post-hoc certificates."""

    column_strategy: SimplexPoint
    row_strategy: SimplexPoint
    gap: float
    max_row_payoff: float
    min_col_payoff: float
    value_estimate: float
    mean_realized_payoff: float
    iterations: int
    elements_read: int
    verify_reads: int
    seed: int | None

    def as_dict(self) -> dict:
        return {
            "column_strategy": self.column_strategy.weights.tolist(),
            "row_strategy": self.row_strategy.weights.tolist(),
            "gap": self.gap,
            "max_row_payoff": self.max_row_payoff,
            "min_col_payoff": self.min_col_payoff,
            "value_estimate": self.value_estimate,
            "mean_realized_payoff": self.mean_realized_payoff,
            "iterations": self.iterations,
            "elements_read": self.elements_read,
            "verify_reads": self.verify_reads,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def iterations_for(epsilon: float, sigma: float, dim: int, entry_bound: float = 1.0) -> int:
    """Default iteration budget ``ceil(8 (log n + 2 log(1/sigma)) / eps^2)``.

    ``epsilon`` is measured in units of the entry bound (matrices are
    treated as rescaled to unit bound).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    if dim < 2:
        raise ValueError("dimension must be >= 2")
    eps_rel = epsilon / entry_bound
    return int(math.ceil(8.0 * (math.log(dim) + 2.0 * math.log(1.0 / sigma)) / eps_rel**2))


def _gap_parts(A: SparseGameMatrix, x: np.ndarray, w: np.ndarray,
               counter: ReadCounter | None = None) -> tuple[np.ndarray, np.ndarray]:
    """A @ x and w @ A from one logical sweep over the stored entries."""
    if x.size != A.n_cols or w.size != A.n_rows:
        raise ValueError("strategy dimensions do not match the matrix")
    if counter is not None:
        counter.verify += A.nnz
    return A.matvec(x), A.rmatvec(w)


def duality_gap(A: SparseGameMatrix, column_strategy, row_strategy,
                counter: ReadCounter | None = None) -> float:
    """Exact saddle-point residual ``max_i (A x)_i - min_j (w A)_j``; >= 0.

    Zero exactly at a Nash equilibrium. Accounted on the verify counter,
    one nonzero-count per evaluation.
    """
    x = column_strategy.weights if isinstance(column_strategy, SimplexPoint) else np.asarray(column_strategy, float)
    w = row_strategy.weights if isinstance(row_strategy, SimplexPoint) else np.asarray(row_strategy, float)
    ax, wa = _gap_parts(A, x, w, counter)
    return float(ax.max() - wa.min())


def solve_matrix_game(A: SparseGameMatrix, epsilon: float, sigma: float, seed: int,
                      iterations: int | None = None,
                      gap_checkpoints: int = 0) -> tuple[GameSolution, RunTrace]:
    """Run both randomized players for N steps and certify the averaged plays.

    Per step the solver reads at most (nonzeros of the sampled row) +
    (nonzeros of the sampled column) matrix entries; the exact count lands
    in ``elements_read``. The final gap (and any requested checkpoint gaps)
    use full passes booked separately under ``verify_reads``.
    """
    n_rows, n_cols = A.shape
    if n_rows < 2 or n_cols < 2:
        raise ValueError("game needs at least 2 pure strategies per player")
    N = int(iterations) if iterations is not None else iterations_for(
        epsilon, sigma, max(n_rows, n_cols), A.entry_bound)
    if N < 1:
        raise ValueError("iteration count must be >= 1")

    rng = np.random.default_rng(seed)
    g_row = nonadaptive_gamma(N, A.entry_bound, n_rows)
    g_col = nonadaptive_gamma(N, A.entry_bound, n_cols)
    y_row = np.zeros(n_rows)
    y_col = np.zeros(n_cols)
    counts_row = np.zeros(n_rows)
    counts_col = np.zeros(n_cols)
    counter = ReadCounter()

    payoffs = np.empty(N)
    actions = np.empty(N, dtype=int)
    grad_norms = np.empty(N)
    checksums = np.empty(N)
    reads_solver = np.zeros(N, dtype=int)
    reads_verify = np.zeros(N, dtype=int)
    checkpoints = {}
    checkpoint_at = set()
    if gap_checkpoints > 0:
        marks = np.unique(np.linspace(1, N, num=min(gap_checkpoints, N), dtype=int))
        checkpoint_at = set(int(m) for m in marks)

    k = 0
    while k < N:
        m = min(_NOISE_CHUNK, N - k)
        noise_row = gumbel_noise(rng, (m, n_rows))
        noise_col = gumbel_noise(rng, (m, n_cols))
        for s in range(m):
            k += 1
            # Simultaneous draws from the pre-update states (Gumbel-max =
            # exponential weights), so neither player sees the other's move.
            i = int(np.argmax(g_row * y_row + noise_row[s]))
            j = int(np.argmax(g_col * y_col + noise_col[s]))
            row_cols, row_vals = A.row(i)
            col_rows, col_vals = A.col(j)
            step_reads = row_cols.size + col_rows.size
            counter.solver += step_reads
            reads_solver[k - 1] = step_reads

            pos = np.searchsorted(row_cols, j)
            payoffs[k - 1] = row_vals[pos] if pos < row_cols.size and row_cols[pos] == j else 0.0
            actions[k - 1] = j
            grad_norms[k - 1] = float(np.max(np.abs(row_vals))) if row_vals.size else 0.0

            y_col[row_cols] -= row_vals
            y_row[col_rows] += col_vals
            counts_row[i] += 1
            counts_col[j] += 1
            checksums[k - 1] = float(y_col.sum())

            if k in checkpoint_at:
                before = counter.verify
                ax, wa = _gap_parts(A, counts_col / k, counts_row / k, counter)
                checkpoints[k] = float(ax.max() - wa.min())
                reads_verify[k - 1] = counter.verify - before

    x_bar = SimplexPoint(counts_col / N)
    w_bar = SimplexPoint(counts_row / N)
    ax, wa = _gap_parts(A, x_bar.weights, w_bar.weights, counter)
    reads_verify[N - 1] += A.nnz
    max_row = float(ax.max())
    min_col = float(wa.min())
    value_estimate = float(w_bar.weights @ ax)
    if min_col > value_estimate + 1e-9:
        raise ContractError("best fixed column beats the averaged value; update signs are wrong")

    solution = GameSolution(x_bar, w_bar, max_row - min_col, max_row, min_col,
                            value_estimate, float(payoffs.mean()), N,
                            counter.solver, counter.verify, seed)
    trace = RunTrace("matrix-game", n_cols, N, A.entry_bound, seed, payoffs, actions,
                     grad_norms, checksums, None, reads_solver, reads_verify, checkpoints)
    return solution, trace


def pagerank_via_game(P: SparseGameMatrix, epsilon: float, sigma: float, seed: int,
                      iterations: int | None = None) -> tuple[SimplexPoint, GameSolution, RunTrace]:
    """Stationary distribution of a row-stochastic matrix via the induced game.

    Builds the antagonistic game with payoff matrix ``P^T - I`` (entries in
    [-1, 1], value 0) and returns the column player's averaged play, which
    satisfies ``max_i ((P^T - I) x)_i <= gap``.
    """
    if P.n_rows != P.n_cols:
        raise ValueError("stochastic matrix must be square")
    sums = P.row_sums()
    if np.max(np.abs(sums - 1.0)) > 1e-9 or (P.nnz and P.scipy_csr.data.min() < -1e-15):
        raise ValueError("matrix is not row-stochastic within 1e-9")
    n = P.n_rows
    game = SparseGameMatrix(P.scipy_csr.T - sp.identity(n, format="csr"), entry_bound=1.0)
    solution, trace = solve_matrix_game(game, epsilon, sigma, seed, iterations=iterations)
    return solution.column_strategy, solution, trace
