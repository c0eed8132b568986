"""Pairwise-comparison data model: counts, rankings, probabilities, ingestion.

All types are immutable after construction (backing arrays are marked
read-only), so every operation here is a pure function that is safe to call
concurrently.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

FILTER_POLICIES = ("no-wins", "bt-connected")


@dataclass(frozen=True)
class MatchRecord:
    """One game: ``winner`` beat ``loser``. Ties have no representation."""

    winner: str
    loser: str


@dataclass(frozen=True, eq=False)
class Ranking:
    """A strict ranking of n players.

    ``ranks[i]`` is the rank of player ``i``, a permutation of 1..n with
    higher values meaning better players.
    """

    ranks: np.ndarray

    def __post_init__(self) -> None:
        r = np.array(self.ranks, dtype=np.int64)
        if r.ndim != 1 or r.size == 0:
            raise ValueError("ranks must be a non-empty 1-d sequence")
        if not np.array_equal(np.sort(r), np.arange(1, r.size + 1)):
            raise ValueError("ranks must be a permutation of 1..n")
        r.setflags(write=False)
        object.__setattr__(self, "ranks", r)

    @property
    def n(self) -> int:
        return int(self.ranks.size)

    @classmethod
    def identity(cls, n: int) -> "Ranking":
        return cls(np.arange(1, n + 1))

    @classmethod
    def from_scores(cls, scores) -> "Ranking":
        """Rank by increasing score; ties give the lower player index the lower rank."""
        s = np.asarray(scores, dtype=float)
        order = np.argsort(s, kind="stable")
        ranks = np.empty(s.size, dtype=np.int64)
        ranks[order] = np.arange(1, s.size + 1)
        return cls(ranks)

    def order(self) -> np.ndarray:
        """Player indices from worst to best."""
        return np.argsort(self.ranks, kind="stable")

    def best_first(self) -> np.ndarray:
        """Player indices from best to worst."""
        return self.order()[::-1]

    def reverse(self) -> "Ranking":
        return Ranking(self.n + 1 - self.ranks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ranking):
            return NotImplemented
        return np.array_equal(self.ranks, other.ranks)

    def __hash__(self) -> int:
        return hash(self.ranks.tobytes())


@dataclass(frozen=True, eq=False)
class ComparisonCounts:
    """Symmetric game counts ``pair_counts`` and directed win counts ``win_counts``.

    ``pair_counts[i, j]`` is the number of games between ``i`` and ``j`` and
    ``win_counts[i, j]`` how many of them ``i`` won, so
    ``win_counts + win_counts.T == pair_counts`` off the (zero) diagonal.
    """

    pair_counts: np.ndarray
    win_counts: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        pair = np.array(self.pair_counts, dtype=np.int64)
        win = np.array(self.win_counts, dtype=np.int64)
        if pair.ndim != 2 or pair.shape[0] != pair.shape[1] or pair.shape[0] == 0:
            raise ValueError("pair_counts must be a non-empty square matrix")
        if win.shape != pair.shape:
            raise ValueError("win_counts shape differs from pair_counts")
        if (pair < 0).any() or (win < 0).any():
            raise ValueError("counts must be non-negative")
        if np.diagonal(pair).any() or np.diagonal(win).any():
            raise ValueError("diagonal entries must be zero")
        if not np.array_equal(pair, pair.T):
            raise ValueError("pair_counts must be symmetric")
        if not np.array_equal(win + win.T, pair):
            raise ValueError("win_counts[i,j] + win_counts[j,i] must equal pair_counts[i,j]")
        labels = self.labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != pair.shape[0]:
                raise ValueError("labels length must equal the number of players")
        pair.setflags(write=False)
        win.setflags(write=False)
        object.__setattr__(self, "pair_counts", pair)
        object.__setattr__(self, "win_counts", win)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.pair_counts.shape[0])

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComparisonCounts):
            return NotImplemented
        return (
            np.array_equal(self.pair_counts, other.pair_counts)
            and np.array_equal(self.win_counts, other.win_counts)
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.pair_counts.tobytes(), self.win_counts.tobytes(), self.labels))


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Pairwise winning probabilities with ``probs[i, j] + probs[j, i] == 1``.

    The diagonal is fixed at 0.5 by convention.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] == 0:
            raise ValueError("probs must be a non-empty square matrix")
        if (p < 0).any() or (p > 1).any():
            raise ValueError("probabilities must lie in [0, 1]")
        if np.abs(p + p.T - 1.0).max() > 1e-12:
            raise ValueError("probs[i,j] + probs[j,i] must equal 1")
        if np.abs(np.diagonal(p) - 0.5).max() > 1e-12:
            raise ValueError("diagonal must be 0.5")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n(self) -> int:
        return int(self.probs.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbabilityMatrix):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())


def load_matches(records: Sequence[MatchRecord]) -> ComparisonCounts:
    """Aggregate match records into comparison counts.

    Distinct identifiers become indices 0..n-1 in order of first appearance,
    retained as ``labels``. Records are validated here (not at construction)
    so a malformed record can be reported with its position in the sequence.
    """
    if not records:
        raise DataError("no match records given")
    index: dict[str, int] = {}
    games: list[tuple[int, int]] = []
    for row, rec in enumerate(records, start=1):
        winner, loser = rec.winner, rec.loser
        if not winner or not loser:
            raise DataError(f"record {row}: empty player identifier")
        if winner == loser:
            raise DataError(f"record {row}: winner equals loser ({winner!r})")
        for name in (winner, loser):
            if name not in index:
                index[name] = len(index)
        games.append((index[winner], index[loser]))
    n = len(index)
    win = np.zeros((n, n), dtype=np.int64)
    for w, l in games:
        win[w, l] += 1
    return ComparisonCounts(win + win.T, win, labels=tuple(index))


def strongly_connected_components(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components of a digraph, each sorted ascending.

    Iterative Tarjan, so deep graphs do not hit the recursion limit.
    """
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work[-1]
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            neighbours = adjacency[v]
            for i in range(pos, len(neighbours)):
                w = neighbours[i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return components


def _win_graph(counts: ComparisonCounts) -> list[list[int]]:
    return [np.flatnonzero(counts.win_counts[i] > 0).tolist() for i in range(counts.n)]


def filter_players(
    counts: ComparisonCounts, policy: str = "no-wins"
) -> tuple[ComparisonCounts, tuple[int, ...]]:
    """Drop players according to ``policy`` and return (reduced counts, index map).

    ``"no-wins"`` removes, in a single pass, every player without a single
    win. ``"bt-connected"`` keeps only the largest strongly connected
    component of the win digraph (edge i -> j iff ``win_counts[i, j] > 0``),
    which is the precondition for a well-posed Bradley-Terry likelihood.
    The index map sends new indices to original ones.
    """
    if policy not in FILTER_POLICIES:
        raise ValueError(f"unknown filter policy {policy!r}; expected one of {FILTER_POLICIES}")
    if policy == "no-wins":
        keep = np.flatnonzero(counts.win_counts.sum(axis=1) > 0)
    else:
        components = strongly_connected_components(_win_graph(counts))
        # Largest component; among equal sizes take the one holding the
        # smallest original index, for determinism.
        best = max(components, key=lambda c: (len(c), -c[0]))
        if len(best) < 2:
            raise DataError("no strongly connected component with at least 2 players")
        keep = np.array(best, dtype=np.int64)
    if keep.size == 0:
        raise DataError(f"filter {policy!r} removed every player")
    sub = np.ix_(keep, keep)
    labels = None
    if counts.labels is not None:
        labels = tuple(counts.labels[i] for i in keep)
    reduced = ComparisonCounts(counts.pair_counts[sub], counts.win_counts[sub], labels=labels)
    return reduced, tuple(int(i) for i in keep)


@dataclass(frozen=True)
class WstReport:
    """Outcome of a transitivity check.

    ``violations`` holds ordered triples (i, j, k) with p_ij >= 0.5 and
    p_jk >= 0.5 but p_ik < 0.5 - tol. ``ties`` holds pairs i < j whose
    probability is within tol of 0.5, for which the implied ranking is not
    unique.
    """

    violations: tuple[tuple[int, int, int], ...]
    ties: tuple[tuple[int, int], ...]
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations and not self.ties


def check_wst(P: ProbabilityMatrix, tol: float = 0.0) -> WstReport:
    """Brute-force weak-stochastic-transitivity check over all ordered triples.

    ``tol = 0`` suits exactly constructed matrices; use around 1e-9 for
    matrices reconstructed from floats.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    p = P.probs
    n = P.n
    at_least_even = p >= 0.5
    below = p < (0.5 - tol)
    violations: list[tuple[int, int, int]] = []
    for j in range(n):
        premise = np.outer(at_least_even[:, j], at_least_even[j, :])
        hit = premise & below
        hit[j, :] = False
        hit[:, j] = False
        np.fill_diagonal(hit, False)
        for i, k in zip(*np.nonzero(hit)):
            violations.append((int(i), int(j), int(k)))
    iu, ju = np.triu_indices(n, 1)
    near = np.abs(p[iu, ju] - 0.5) <= tol
    ties = tuple((int(a), int(b)) for a, b in zip(iu[near], ju[near]))
    return WstReport(tuple(sorted(violations)), ties, tol)


def skew_statistic(counts: ComparisonCounts) -> np.ndarray:
    """Standardized skew-symmetric outcome matrix.

    ``x[i, j] = 2*win[i, j]/pair[i, j] - 1`` for played pairs and 0 for
    unplayed ones; built from the upper triangle so that ``x + x.T`` is
    exactly zero.
    """
    pair = counts.pair_counts
    win = counts.win_counts
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(pair > 0, 2.0 * win / np.where(pair > 0, pair, 1) - 1.0, 0.0)
    upper = np.triu(raw, 1)
    return upper - upper.T


def read_match_csv(path) -> list[MatchRecord]:
    """Read a ``winner,loser`` match file (UTF-8, one game per row)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty match file") from None
        if [h.strip() for h in header] != ["winner", "loser"]:
            raise DataError(f"{path}: expected header 'winner,loser', got {header!r}")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            records.append(MatchRecord(row[0], row[1]))
    return records


def write_match_csv(path, records: Iterable[MatchRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["winner", "loser"])
        for rec in records:
            writer.writerow([rec.winner, rec.loser])


def counts_to_json(counts: ComparisonCounts) -> str:
    """Serialize counts to the JSON interchange form (labels + both matrices)."""
    labels = list(counts.labels) if counts.labels is not None else [str(i) for i in range(counts.n)]
    return json.dumps(
        {
            "labels": labels,
            "pair_counts": counts.pair_counts.tolist(),
            "win_counts": counts.win_counts.tolist(),
        }
    )


def counts_from_json(text: str) -> ComparisonCounts:
    obj = json.loads(text)
    for key in ("labels", "pair_counts", "win_counts"):
        if key not in obj:
            raise DataError(f"counts JSON missing field {key!r}")
    try:
        return ComparisonCounts(
            obj["pair_counts"], obj["win_counts"], labels=tuple(obj["labels"])
        )
    except ValueError as exc:
        raise DataError(f"invalid counts JSON: {exc}") from exc
