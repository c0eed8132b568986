"""Rank aggregation from sparse pairwise comparisons under weak stochastic transitivity.

The package exposes a data model for pairwise game counts, a maximum-score
rank estimator with a logistic-surrogate initialisation and K-tuple local
search, three baseline rankers (counting, Bradley-Terry, USVT), ranking
metrics including a difficulty-weighted Kendall distance, and a seeded
simulation-study harness. A CLI binds everything into batch workflows; see
``python -m wstrank --help``.
"""

from .baselines import (
    BtOptions,
    UsvtOptions,
    borda_rank,
    bt_fit,
    bt_log_likelihood,
    usvt_probabilities,
    usvt_rank,
)
from .data import (
    ComparisonCounts,
    MatchRecord,
    ProbabilityMatrix,
    Ranking,
    WstReport,
    check_wst,
    counts_from_json,
    counts_to_json,
    filter_players,
    load_matches,
    read_match_csv,
    skew_statistic,
    strongly_connected_components,
    write_match_csv,
)
from .errors import (
    AlignmentError,
    ConvergenceError,
    DataError,
    NotConnectedError,
    NumericError,
)
from .maxscore import (
    MasterOptions,
    MasterResult,
    certify,
    ktuple_search,
    master_rank,
    score,
    surrogate_init,
)
from .metrics import (
    QSequence,
    error_rate,
    kendall_tau,
    modified_tau,
    q_bar,
    q_sequence,
    spearman_rho,
)
from .simulation import (
    METHODS,
    SCENARIOS,
    MethodStats,
    SimConfig,
    StudyResult,
    gen_counts,
    gen_probabilities,
    replicate_rng,
    run_study,
    synthetic_matches,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "BtOptions",
    "ComparisonCounts",
    "ConvergenceError",
    "DataError",
    "MasterOptions",
    "MasterResult",
    "MatchRecord",
    "METHODS",
    "MethodStats",
    "NotConnectedError",
    "NumericError",
    "ProbabilityMatrix",
    "QSequence",
    "Ranking",
    "SCENARIOS",
    "SimConfig",
    "StudyResult",
    "UsvtOptions",
    "WstReport",
    "borda_rank",
    "bt_fit",
    "bt_log_likelihood",
    "certify",
    "check_wst",
    "counts_from_json",
    "counts_to_json",
    "error_rate",
    "filter_players",
    "gen_counts",
    "gen_probabilities",
    "kendall_tau",
    "ktuple_search",
    "load_matches",
    "master_rank",
    "modified_tau",
    "q_bar",
    "q_sequence",
    "read_match_csv",
    "replicate_rng",
    "run_study",
    "score",
    "skew_statistic",
    "spearman_rho",
    "strongly_connected_components",
    "surrogate_init",
    "synthetic_matches",
    "usvt_probabilities",
    "usvt_rank",
    "write_match_csv",
]
