"""Reference ranking methods: win-fraction counting, Bradley-Terry ML, USVT.

These all assume, one way or another, stronger structure than the
maximum-score estimator does, which is exactly why they serve as baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import (
    ComparisonCounts,
    ProbabilityMatrix,
    Ranking,
    skew_statistic,
    strongly_connected_components,
    _win_graph,
)
from .errors import ConvergenceError, DataError, NotConnectedError

BORDA_SCORINGS = ("fraction", "wins")


@dataclass(frozen=True)
class BtOptions:
    tol: float = 1e-8
    max_iters: int = 10000

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class UsvtOptions:
    eta: float = 0.01

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ValueError("eta must be positive")


def borda_rank(counts: ComparisonCounts, scoring: str = "fraction") -> Ranking:
    """Rank by aggregate win records.

    The default scores each player as the sum of per-opponent win fractions
    y_ij/n_ij, which is less sensitive to an uneven game schedule than raw
    win totals; ``scoring="wins"`` gives the raw-total variant. Players with
    no games score zero and sort among themselves by index.
    """
    if scoring not in BORDA_SCORINGS:
        raise ValueError(f"unknown scoring {scoring!r}; expected one of {BORDA_SCORINGS}")
    pair = counts.pair_counts
    win = counts.win_counts
    if scoring == "fraction":
        frac = np.where(pair > 0, win / np.where(pair > 0, pair, 1), 0.0)
        scores = frac.sum(axis=1)
    else:
        scores = win.sum(axis=1).astype(float)
    return Ranking.from_scores(scores)


def bt_log_likelihood(beta, counts: ComparisonCounts) -> float:
    """Bradley-Terry log-likelihood sum of y_ij * log sigmoid(beta_i - beta_j)."""
    b = np.asarray(beta, dtype=float)
    diff = b[:, None] - b[None, :]
    # log sigmoid computed stably as -log1p(exp(-|d|)) + min(d, 0)
    log_sig = np.minimum(diff, 0.0) - np.log1p(np.exp(-np.abs(diff)))
    return float((counts.win_counts * log_sig).sum())


def bt_fit(counts: ComparisonCounts, opts: BtOptions | None = None) -> tuple[np.ndarray, Ranking]:
    """Maximum-likelihood Bradley-Terry scores, constrained to sum to zero.

    Uses the minorization-maximization fixed point on the strength scale,
    stopping once the log-likelihood gradient norm drops to ``opts.tol``.
    The MLE exists iff the win digraph is strongly connected; anything else
    raises before iterating.
    """
    opts = opts or BtOptions()
    n = counts.n
    components = strongly_connected_components(_win_graph(counts))
    if len(components) != 1:
        raise NotConnectedError(
            "comparison graph is not strongly connected; "
            "apply filter_players(counts, 'bt-connected') first"
        )
    wins = counts.win_counts.sum(axis=1).astype(float)
    games = counts.pair_counts.astype(float)
    strength = np.ones(n)
    for _ in range(opts.max_iters):
        pairwise = strength[:, None] + strength[None, :]
        grad = wins - (games * (strength[:, None] / pairwise)).sum(axis=1)
        if float(np.linalg.norm(grad)) <= opts.tol:
            beta = np.log(strength)
            beta -= beta.mean()
            return beta, Ranking.from_scores(beta)
        strength = wins / (games / pairwise).sum(axis=1)
        strength /= math.exp(float(np.mean(np.log(strength))))
    beta = np.log(strength)
    beta -= beta.mean()
    raise ConvergenceError(
        f"gradient norm still above {opts.tol} after {opts.max_iters} iterations",
        beta=beta,
    )


def usvt_probabilities(
    x: np.ndarray, p_hat: float, opts: UsvtOptions | None = None
) -> ProbabilityMatrix:
    """Denoise a standardized skew-symmetric outcome matrix into probabilities.

    Keeps singular values above (2 + eta) * sqrt(n * p_hat), rescales the
    truncated reconstruction by 1/p_hat, clips to [-1, 1], and maps to the
    probability scale. The estimate is symmetrized so that complementary
    entries sum to one exactly (numeric truncation does not preserve skew
    symmetry on its own).
    """
    opts = opts or UsvtOptions()
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("x must be square")
    if not 0 < p_hat <= 1:
        raise ValueError("p_hat must be in (0, 1]")
    n = x.shape[0]
    u, s, vt = np.linalg.svd(x)
    keep = s > (2.0 + opts.eta) * math.sqrt(n * p_hat)
    denoised = (u[:, keep] * s[keep]) @ vt[keep] / p_hat
    np.clip(denoised, -1.0, 1.0, out=denoised)
    est = (denoised + 1.0) / 2.0
    probs = np.full((n, n), 0.5)
    iu, ju = np.triu_indices(n, 1)
    upper = (est[iu, ju] + 1.0 - est[ju, iu]) / 2.0
    probs[iu, ju] = upper
    probs[ju, iu] = 1.0 - upper
    return ProbabilityMatrix(probs)


def usvt_rank(
    counts: ComparisonCounts, opts: UsvtOptions | None = None
) -> tuple[ProbabilityMatrix, Ranking]:
    """Estimate the probability matrix by USVT and rank players by its row sums."""
    opts = opts or UsvtOptions()
    n = counts.n
    if n < 2:
        raise ValueError("need at least 2 players")
    iu, ju = np.triu_indices(n, 1)
    p_hat = float((counts.pair_counts[iu, ju] > 0).mean())
    if p_hat == 0.0:
        raise DataError("no pair has been observed; the estimate is degenerate")
    estimate = usvt_probabilities(skew_statistic(counts), p_hat, opts)
    return estimate, Ranking.from_scores(estimate.probs.sum(axis=1))
