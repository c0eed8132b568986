"""Maximum-score rank estimation.

The objective for a ranking pi is

    L(pi) = sum over pairs i < j of (2*y_ij - n_ij) * I(pi_i > pi_j),

the net number of observed game outcomes consistent with pi. It is maximised
in two stages: a smooth logistic surrogate fitted by gradient ascent gives an
initial ranking, then a local search repeatedly re-permutes every window of K
consecutive rank positions while any strict improvement exists.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import ComparisonCounts, Ranking
from .errors import NumericError

MAX_TUPLE_LEN = 8  # K! enumeration guard

TIE_BREAKS = ("index",)


@dataclass(frozen=True)
class MasterOptions:
    """Tuning knobs for the two-stage search.

    ``surrogate_step`` of None selects 0.5/sqrt(mean opponents per player),
    used as the starting step of a halving line search. Only rank(beta) is
    consumed downstream, so the surrogate's absolute scale is immaterial; the
    small ridge keeps its maximiser finite.
    """

    k: int = 3
    surrogate_step: float | None = None
    surrogate_iters: int = 500
    surrogate_ridge: float = 1e-4
    tie_break: str = "index"

    def __post_init__(self) -> None:
        if not 2 <= self.k <= MAX_TUPLE_LEN:
            raise ValueError(f"k must be in [2, {MAX_TUPLE_LEN}]")
        if self.surrogate_step is not None and not self.surrogate_step > 0:
            raise ValueError("surrogate_step must be positive")
        if self.surrogate_iters <= 0:
            raise ValueError("surrogate_iters must be positive")
        if self.surrogate_ridge < 0:
            raise ValueError("surrogate_ridge must be non-negative")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie_break {self.tie_break!r}")


@dataclass(frozen=True, eq=False)
class MasterResult:
    """Final ranking with objective diagnostics; objective >= init_objective."""

    ranking: Ranking
    objective: int
    init_ranking: Ranking
    init_objective: int
    sweeps: int

    def __post_init__(self) -> None:
        if self.objective < self.init_objective:
            raise ValueError("search must not decrease the objective")
        if self.sweeps < 0:
            raise ValueError("sweeps must be non-negative")

    def to_dict(self) -> dict:
        return {
            "ranking": self.ranking.ranks.tolist(),
            "objective": self.objective,
            "init_objective": self.init_objective,
            "sweeps": self.sweeps,
        }


def _net_wins(counts: ComparisonCounts) -> np.ndarray:
    # z[i, j] = y_ij - y_ji = 2*y_ij - n_ij; antisymmetric.
    return counts.win_counts - counts.win_counts.T


def score(pi: Ranking, counts: ComparisonCounts) -> int:
    """Exact integer objective L(pi); unplayed pairs contribute zero."""
    if pi.n != counts.n:
        raise ValueError("ranking and counts disagree on the number of players")
    z = _net_wins(counts)
    iu, ju = np.triu_indices(counts.n, 1)
    return int(z[iu, ju] @ (pi.ranks[iu] > pi.ranks[ju]))


def surrogate_init(
    counts: ComparisonCounts,
    opts: MasterOptions | None = None,
    trace: list | None = None,
) -> tuple[np.ndarray, Ranking]:
    """Fit the logistic surrogate and return (scores, implied ranking).

    Maximises sum over i < j of z_ij * sigmoid(beta_i - beta_j) minus a ridge
    penalty, by gradient ascent from beta = 0 with a per-iteration halving
    line search, re-centering beta to mean zero after every step. The
    penalised objective is non-decreasing across iterations by construction.
    If ``trace`` is a list, the objective value after each accepted step is
    appended to it.
    """
    opts = opts or MasterOptions()
    n = counts.n
    z = _net_wins(counts).astype(float)
    iu, ju = np.triu_indices(n, 1)
    z_upper = z[iu, ju]
    ridge = opts.surrogate_ridge

    def objective(b: np.ndarray) -> float:
        return float(z_upper @ expit(b[iu] - b[ju]) - ridge * (b @ b))

    if opts.surrogate_step is not None:
        base_step = opts.surrogate_step
    else:
        mean_degree = float((counts.pair_counts > 0).sum(axis=1).mean())
        base_step = 0.5 / math.sqrt(max(mean_degree, 1.0))

    beta = np.zeros(n)
    obj = objective(beta)
    for _ in range(opts.surrogate_iters):
        diff = beta[:, None] - beta[None, :]
        sig = expit(diff)
        grad = (z * (sig * (1.0 - sig))).sum(axis=1) - 2.0 * ridge * beta
        if not np.all(np.isfinite(grad)):
            raise NumericError("non-finite gradient in surrogate ascent")
        if float(grad @ grad) == 0.0:
            break
        step = base_step
        accepted = None
        for _ in range(40):
            candidate = beta + step * grad
            candidate = candidate - candidate.mean()
            cand_obj = objective(candidate)
            if not math.isfinite(cand_obj):
                raise NumericError("non-finite objective in surrogate ascent")
            if cand_obj >= obj:
                accepted = (candidate, cand_obj)
                break
            step *= 0.5
        if accepted is None:
            break  # no ascent direction at float precision
        beta, obj = accepted
        if trace is not None:
            trace.append(obj)
    return beta, Ranking.from_scores(beta)


def ktuple_search(counts: ComparisonCounts, init: Ranking, k: int) -> MasterResult:
    """Local search over windows of k consecutive rank positions.

    Starting at the lowest window, all k! assignments of the window's players
    to its positions are scored; the best strictly improving one is applied
    (ties among equally good improvements go to the lexicographically first
    permutation) and the scan restarts, otherwise the window moves up one
    position. Permuting players within a contiguous window leaves their order
    relative to everyone outside unchanged, so only the O(k^2) internal pairs
    are re-scored. Terminates because the objective is integer, strictly
    increasing on each accepted move, and bounded.
    """
    n = counts.n
    if init.n != n:
        raise ValueError("ranking and counts disagree on the number of players")
    if not 2 <= k <= min(n, MAX_TUPLE_LEN):
        raise ValueError(f"k must be in [2, min(n, {MAX_TUPLE_LEN})]")
    z = _net_wins(counts)
    # contribution[w, l] is the objective term earned when w is ranked above l
    contribution = np.triu(z, 1)
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.intp)
    low_slot, high_slot = np.triu_indices(k, 1)
    occupant_high = perms[:, high_slot]
    occupant_low = perms[:, low_slot]

    order = init.order().copy()  # players from worst to best
    init_objective = score(init, counts)
    objective = init_objective
    sweeps = 0
    t = k
    while t <= n:
        segment = order[t - k : t]
        sub = contribution[np.ix_(segment, segment)]
        totals = sub[occupant_high, occupant_low].sum(axis=1)
        best = int(totals.argmax())  # perms are lexicographic; identity is first
        if totals[best] > totals[0]:
            order[t - k : t] = segment[perms[best]]
            objective += int(totals[best] - totals[0])
            sweeps += 1
            t = k
        else:
            t += 1
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1)
    return MasterResult(Ranking(ranks), objective, init, init_objective, sweeps)


def master_rank(counts: ComparisonCounts, opts: MasterOptions | None = None) -> MasterResult:
    """Surrogate initialisation followed by k-tuple search.

    The window length is clamped to the number of players so tiny instances
    (n < k) still work; n = 1 returns the only possible ranking.
    """
    opts = opts or MasterOptions()
    if counts.n == 1:
        only = Ranking.identity(1)
        return MasterResult(only, 0, only, 0, 0)
    _, init = surrogate_init(counts, opts)
    return ktuple_search(counts, init, min(opts.k, counts.n))


def certify(candidate: Ranking, truth: Ranking, counts: ComparisonCounts) -> tuple[bool, int]:
    """Check L(candidate) >= L(truth); returns (ok, margin).

    A simulation-only diagnostic: when the margin is non-negative the
    candidate inherits the estimator's guarantees without being a global
    maximiser.
    """
    margin = score(candidate, counts) - score(truth, counts)
    return margin >= 0, margin
