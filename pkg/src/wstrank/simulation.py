"""Seeded generators for the three comparison scenarios and the study harness.

Every replicate draws from its own RNG stream derived as
``SeedSequence(entropy=(seed, replicate_index))``, so results are identical
whatever the execution order or degree of parallelism.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit

from .baselines import BtOptions, UsvtOptions, borda_rank, bt_fit, usvt_rank
from .data import ComparisonCounts, MatchRecord, ProbabilityMatrix, Ranking
from .errors import ConvergenceError, NotConnectedError
from .maxscore import MasterOptions, certify, master_rank
from .metrics import error_rate, kendall_tau

SCENARIOS = ("uniform", "two_group", "bt_latent")
METHODS = ("counting", "bt", "usvt", "master")

STUDY_CSV_COLUMNS = (
    "scenario",
    "n",
    "method",
    "mean_error_pairs",
    "se_pairs",
    "mean_error_paper",
    "se_paper",
    "cert_rate",
    "secs",
)


@dataclass(frozen=True)
class SimConfig:
    """One simulation setting.

    True ranks are 1..n by player index (player n is best). Pair i < j plays
    Binomial(t_max, xi_ij) games with xi_ij ~ Uniform(xi_low, xi_high), and
    the better player wins each game independently with the scenario's
    probability. ``bt_sd`` is the latent-score standard deviation for the
    ``bt_latent`` scenario (default sqrt(2), i.e. variance 2).

    Reliable recovery needs the sampling rates to stay comparable across
    pairs and not vanish too fast: keep xi_low within a constant factor of
    xi_high and at least on the order of log(n)/n.
    """

    scenario: str
    n: int
    t_max: int = 5
    xi_low: float = 0.3
    xi_high: float = 0.5
    replicates: int = 100
    seed: int = 0
    bt_sd: float = math.sqrt(2.0)

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.scenario == "two_group" and self.n % 2:
            raise ValueError("two_group requires an even number of players")
        if self.t_max < 0:
            raise ValueError("t_max must be non-negative")
        if not 0 <= self.xi_low <= self.xi_high <= 1:
            raise ValueError("need 0 <= xi_low <= xi_high <= 1")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not self.bt_sd > 0:
            raise ValueError("bt_sd must be positive")


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    """Independent, order-insensitive RNG stream for one replicate."""
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, replicate)))


def gen_probabilities(
    config: SimConfig, rng: np.random.Generator
) -> tuple[ProbabilityMatrix, Ranking]:
    """Draw a true probability matrix and its (identity) true ranking.

    uniform: the better of each pair wins with Uniform(0.5, 1) probability.
    two_group: players split into a worse half and a better half; the better
    player's probability is Uniform(0.75, 0.85) within a group and
    Uniform(0.65, 0.75) across groups, so cross-group pairs are noisier.
    bt_latent: sorted latent normal scores with a logistic link.
    All three admit the identity ranking and satisfy weak transitivity.
    """
    n = config.n
    iu, ju = np.triu_indices(n, 1)
    if config.scenario == "uniform":
        better = rng.uniform(0.5, 1.0, iu.size)
    elif config.scenario == "two_group":
        half = n // 2
        same_group = (iu < half) == (ju < half)
        low = np.where(same_group, 0.75, 0.65)
        better = low + 0.1 * rng.uniform(0.0, 1.0, iu.size)
    else:
        latent = np.sort(rng.normal(0.0, config.bt_sd, n))
        better = expit(latent[ju] - latent[iu])
    # rule out exact coin flips so the implied ranking is unique
    better = np.maximum(better, np.nextafter(0.5, 1.0))
    probs = np.full((n, n), 0.5)
    probs[ju, iu] = better  # higher index is the better player
    probs[iu, ju] = 1.0 - better
    return ProbabilityMatrix(probs), Ranking.identity(n)


def gen_counts(
    P_star: ProbabilityMatrix, config: SimConfig, rng: np.random.Generator
) -> ComparisonCounts:
    """Sample game and win counts for every pair under the sparse design."""
    n = P_star.n
    if n != config.n:
        raise ValueError("probability matrix size differs from config.n")
    iu, ju = np.triu_indices(n, 1)
    xi = rng.uniform(config.xi_low, config.xi_high, iu.size)
    games = rng.binomial(config.t_max, xi)
    wins_upper = rng.binomial(games, P_star.probs[iu, ju])
    pair = np.zeros((n, n), dtype=np.int64)
    win = np.zeros((n, n), dtype=np.int64)
    pair[iu, ju] = games
    pair[ju, iu] = games
    win[iu, ju] = wins_upper
    win[ju, iu] = games - wins_upper
    return ComparisonCounts(pair, win)


@dataclass(frozen=True)
class MethodStats:
    """Aggregates for one method across replicates.

    Standard errors are sample standard deviation / sqrt(replicates used).
    ``cert_rate`` is the fraction of replicates where the returned ranking
    scored at least as well as the truth (master only, None otherwise).
    Failed replicates (e.g. a disconnected graph for BT) are counted in
    ``failures`` and excluded from the means.
    """

    method: str
    replicates_used: int
    failures: int
    mean_error_pairs: float
    se_pairs: float
    mean_error_paper: float
    se_paper: float
    cert_rate: float | None
    secs: float


@dataclass(frozen=True, eq=False)
class StudyResult:
    config: SimConfig
    stats: tuple[MethodStats, ...]

    def by_method(self) -> dict[str, MethodStats]:
        return {s.method: s for s in self.stats}

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(STUDY_CSV_COLUMNS)
        for s in self.stats:
            writer.writerow(
                [
                    self.config.scenario,
                    self.config.n,
                    s.method,
                    f"{s.mean_error_pairs:.6f}",
                    f"{s.se_pairs:.6f}",
                    f"{s.mean_error_paper:.6f}",
                    f"{s.se_paper:.6f}",
                    "" if s.cert_rate is None else f"{s.cert_rate:.4f}",
                    f"{s.secs:.3f}",
                ]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"config": asdict(self.config), "methods": [asdict(s) for s in self.stats]},
            indent=2,
            sort_keys=True,
        )


def _apply_method(
    method: str,
    counts: ComparisonCounts,
    truth: Ranking,
    master_opts: MasterOptions,
    bt_opts: BtOptions,
    usvt_opts: UsvtOptions,
) -> tuple[int, float, bool | None]:
    start = time.perf_counter()
    cert = None
    if method == "counting":
        ranking = borda_rank(counts)
    elif method == "bt":
        _, ranking = bt_fit(counts, bt_opts)
    elif method == "usvt":
        _, ranking = usvt_rank(counts, usvt_opts)
    else:
        result = master_rank(counts, master_opts)
        ranking = result.ranking
    elapsed = time.perf_counter() - start
    if method == "master":
        cert = certify(ranking, truth, counts)[0]
    return kendall_tau(ranking, truth), elapsed, cert


def run_study(
    config: SimConfig,
    methods: tuple[str, ...] = METHODS,
    master_opts: MasterOptions | None = None,
    bt_opts: BtOptions | None = None,
    usvt_opts: UsvtOptions | None = None,
    threads: int = 1,
) -> StudyResult:
    """Replicated comparison of ranking methods on freshly simulated data.

    Each replicate generates its own truth and counts from a derived seed,
    runs every requested method, and records the Kendall error under both
    normalizations plus the score certificate for master. Deterministic for
    a given config regardless of ``threads``.
    """
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected a subset of {METHODS}")
    if config.replicates < 2:
        raise ValueError("replicates must be at least 2 to estimate standard errors")
    master_opts = master_opts or MasterOptions()
    bt_opts = bt_opts or BtOptions()
    usvt_opts = usvt_opts or UsvtOptions()
    ordered = tuple(m for m in METHODS if m in methods)

    def run_one(replicate: int) -> dict[str, tuple[int, float, bool | None] | None]:
        rng = replicate_rng(config.seed, replicate)
        P_star, truth = gen_probabilities(config, rng)
        counts = gen_counts(P_star, config, rng)
        out: dict[str, tuple[int, float, bool | None] | None] = {}
        for method in ordered:
            try:
                out[method] = _apply_method(
                    method, counts, truth, master_opts, bt_opts, usvt_opts
                )
            except (NotConnectedError, ConvergenceError):
                out[method] = None
        return out

    indices = range(config.replicates)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_replicate = list(pool.map(run_one, indices))
    else:
        per_replicate = [run_one(r) for r in indices]

    stats = []
    for method in ordered:
        rows = [rep[method] for rep in per_replicate]
        kept = [r for r in rows if r is not None]
        failures = len(rows) - len(kept)
        taus = np.array([r[0] for r in kept], dtype=float)
        secs = float(np.mean([r[1] for r in kept])) if kept else float("nan")
        if kept:
            pairs = np.array([error_rate(int(t), config.n, "pairs") for t in taus])
            paper = np.array([error_rate(int(t), config.n, "paper") for t in taus])
            mean_pairs = float(pairs.mean())
            mean_paper = float(paper.mean())
            if len(kept) > 1:
                se_pairs = float(pairs.std(ddof=1) / math.sqrt(len(kept)))
                se_paper = float(paper.std(ddof=1) / math.sqrt(len(kept)))
            else:
                se_pairs = se_paper = float("nan")
        else:
            mean_pairs = mean_paper = se_pairs = se_paper = float("nan")
        cert_rate = None
        if method == "master":
            certs = [r[2] for r in kept]
            cert_rate = float(np.mean([1.0 if c else 0.0 for c in certs])) if certs else float("nan")
        stats.append(
            MethodStats(
                method=method,
                replicates_used=len(kept),
                failures=failures,
                mean_error_pairs=mean_pairs,
                se_pairs=se_pairs,
                mean_error_paper=mean_paper,
                se_paper=se_paper,
                cert_rate=cert_rate,
                secs=secs,
            )
        )
    return StudyResult(config, tuple(stats))


def synthetic_matches(
    n_players: int,
    pair_density: float,
    t_max: int = 5,
    score_sd: float = 1.5,
    seed: int = 0,
) -> list[MatchRecord]:
    """Synthetic tournament records at a target pair-coverage density.

    Each unordered pair meets with probability ``pair_density`` and then
    plays 1..t_max games; winners follow a latent-score logistic model. Handy
    for exercising the ingestion pipeline at realistic scale without
    shipping any real dataset.
    """
    if not 0 < pair_density <= 1:
        raise ValueError("pair_density must be in (0, 1]")
    if n_players < 2:
        raise ValueError("need at least 2 players")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 875)))
    labels = [f"P{i:04d}" for i in range(n_players)]
    latent = rng.normal(0.0, score_sd, n_players)
    iu, ju = np.triu_indices(n_players, 1)
    met = rng.random(iu.size) < pair_density
    iu, ju = iu[met], ju[met]
    games = rng.integers(1, t_max + 1, iu.size)
    wins_i = rng.binomial(games, expit(latent[iu] - latent[ju]))
    records: list[MatchRecord] = []
    for a, b, g, w in zip(iu, ju, games, wins_i):
        records.extend([MatchRecord(labels[a], labels[b])] * int(w))
        records.extend([MatchRecord(labels[b], labels[a])] * int(g - w))
    return records
