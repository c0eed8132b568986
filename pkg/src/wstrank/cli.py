"""Command-line entry point: `simulate`, `rank`, and `compare` subcommands.

Exit codes are a stable scripting contract: 0 success, 2 usage errors,
3 data/model precondition failures, 4 numeric failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import borda_rank, bt_fit, usvt_rank
from .data import (
    ComparisonCounts,
    Ranking,
    filter_players,
    load_matches,
    read_match_csv,
)
from .errors import AlignmentError, DataError, NumericError
from .maxscore import MasterOptions, MasterResult, master_rank
from .metrics import kendall_tau, spearman_rho
from .simulation import METHODS, SCENARIOS, SimConfig, run_study

FORMATS = ("table", "csv", "json")


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wstrank",
        description="Rank players from pairwise comparison data and run simulation studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=FORMATS, default="table")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    sim = sub.add_parser("simulate", help="run a replicated simulation study")
    sim.add_argument("--scenario", choices=SCENARIOS, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--t", type=int, default=5, help="max games per pair")
    sim.add_argument("--xi-low", type=float, default=0.3)
    sim.add_argument("--xi-high", type=float, default=0.5)
    sim.add_argument("--reps", type=int, default=100)
    sim.add_argument("--methods", default=",".join(METHODS))
    sim.add_argument("--k", type=int, default=3, help="search window length")
    add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    rank = sub.add_parser("rank", help="rank players from a winner,loser match CSV")
    rank.add_argument("--input", required=True, help="match CSV path")
    rank.add_argument("--method", choices=METHODS, required=True)
    rank.add_argument("--k", type=int, default=3)
    rank.add_argument("--filter", choices=("none", "no-wins", "bt-connected"), default="none")
    add_common(rank)
    rank.set_defaults(func=cmd_rank)

    comp = sub.add_parser("compare", help="compare two rankings")
    comp.add_argument("--input", help="match CSV to rank with --methods")
    comp.add_argument("--methods", help="two methods, e.g. master,bt")
    comp.add_argument("--rankings", help="two ranking JSON artifacts, e.g. a.json,b.json")
    comp.add_argument("--filter", choices=("none", "no-wins", "bt-connected"), default="none")
    comp.add_argument(
        "--h2h",
        action="append",
        default=[],
        metavar="A,B",
        help="print the head-to-head record of a player pair (repeatable)",
    )
    comp.add_argument("--k", type=int, default=3)
    add_common(comp)
    comp.set_defaults(func=cmd_compare)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = SimConfig(
            scenario=args.scenario,
            n=args.n,
            t_max=args.t,
            xi_low=args.xi_low,
            xi_high=args.xi_high,
            replicates=args.reps,
            seed=args.seed,
        )
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        master_opts = MasterOptions(k=args.k)
        if args.reps < 2:
            raise ValueError("--reps must be at least 2")
        for m in methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    result = run_study(config, methods=methods, master_opts=master_opts, threads=args.threads)
    if args.format == "csv":
        _emit(result.to_csv(), args.out)
    elif args.format == "json":
        _emit(result.to_json() + "\n", args.out)
    else:
        rows = [
            [
                s.method,
                f"{s.mean_error_pairs:.4f}",
                f"{s.se_pairs:.4f}",
                f"{s.mean_error_paper:.4f}",
                f"{s.se_paper:.4f}",
                "-" if s.cert_rate is None else f"{s.cert_rate:.2f}",
                str(s.failures),
                f"{s.secs:.3f}",
            ]
            for s in result.stats
        ]
        headers = ["method", "err_pairs", "se", "err_paper", "se", "cert", "failed", "secs"]
        text = f"scenario={config.scenario} n={config.n} reps={config.replicates} seed={config.seed}\n"
        _emit(text + _table(headers, rows), args.out)
    return 0


def _rank_with_method(
    counts: ComparisonCounts, method: str, k: int
) -> tuple[Ranking, np.ndarray, MasterResult | None]:
    if method == "counting":
        pair = counts.pair_counts
        frac = np.where(pair > 0, counts.win_counts / np.where(pair > 0, pair, 1), 0.0)
        scores = frac.sum(axis=1)
        return borda_rank(counts), scores, None
    if method == "bt":
        beta, ranking = bt_fit(counts)
        return ranking, beta, None
    if method == "usvt":
        estimate, ranking = usvt_rank(counts)
        return ranking, estimate.probs.sum(axis=1), None
    result = master_rank(counts, MasterOptions(k=k))
    return result.ranking, result.ranking.ranks.astype(float), result


def _ranking_artifact(
    counts: ComparisonCounts, method: str, ranking: Ranking, scores: np.ndarray,
    master: MasterResult | None,
) -> dict:
    players = [
        {
            "position": pos,
            "label": counts.label(int(i)),
            "score": float(scores[int(i)]),
        }
        for pos, i in enumerate(ranking.best_first(), start=1)
    ]
    artifact: dict = {"method": method, "n": counts.n, "players": players}
    if master is not None:
        artifact["objective"] = master.objective
        artifact["init_objective"] = master.init_objective
        artifact["sweeps"] = master.sweeps
    return artifact


def _format_rank_artifact(artifact: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(artifact, indent=2) + "\n"
    rows = [
        [str(p["position"]), p["label"], f"{p['score']:.6g}"] for p in artifact["players"]
    ]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["position", "label", "score"])
        for row in rows:
            writer.writerow(row)
        for key in ("objective", "init_objective", "sweeps"):
            if key in artifact:
                buf.write(f"# {key}={artifact[key]}\n")
        return buf.getvalue()
    text = _table(["position", "label", "score"], rows)
    extras = [f"{k}={artifact[k]}" for k in ("objective", "init_objective", "sweeps") if k in artifact]
    if extras:
        text += " ".join(extras) + "\n"
    return text


def cmd_rank(args: argparse.Namespace) -> int:
    if not 2 <= args.k <= 8:
        raise _UsageError("--k must be in [2, 8]")
    counts = load_matches(read_match_csv(args.input))
    if args.filter != "none":
        counts, _ = filter_players(counts, args.filter)
    ranking, scores, master = _rank_with_method(counts, args.method, args.k)
    artifact = _ranking_artifact(counts, args.method, ranking, scores, master)
    _emit(_format_rank_artifact(artifact, args.format), args.out)
    return 0


def _artifact_ranks(artifact: dict) -> dict[str, int]:
    players = artifact["players"]
    n = len(players)
    return {p["label"]: n - p["position"] + 1 for p in players}


def _aligned_rankings(ranks_a: dict[str, int], ranks_b: dict[str, int]) -> tuple[Ranking, Ranking, list[str]]:
    labels_a, labels_b = set(ranks_a), set(ranks_b)
    if labels_a != labels_b:
        raise AlignmentError(labels_a - labels_b, labels_b - labels_a)
    labels = sorted(labels_a)
    ra = Ranking(np.array([ranks_a[l] for l in labels]))
    rb = Ranking(np.array([ranks_b[l] for l in labels]))
    return ra, rb, labels


def cmd_compare(args: argparse.Namespace) -> int:
    if not 2 <= args.k <= 8:
        raise _UsageError("--k must be in [2, 8]")
    h2h_requests = []
    for request in args.h2h:
        parts = [p.strip() for p in request.split(",")]
        if len(parts) != 2 or not all(parts):
            raise _UsageError(f"--h2h expects 'A,B', got {request!r}")
        h2h_requests.append((parts[0], parts[1]))

    raw_counts = None
    if args.rankings:
        paths = [p.strip() for p in args.rankings.split(",")]
        if len(paths) != 2:
            raise _UsageError("--rankings expects two comma-separated paths")
        artifacts = []
        for p in paths:
            try:
                artifacts.append(json.loads(Path(p).read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError) as exc:
                raise DataError(f"cannot read ranking artifact {p}: {exc}") from exc
        names = [a.get("method", p) for a, p in zip(artifacts, paths)]
        ranks_a, ranks_b = (_artifact_ranks(a) for a in artifacts)
        if args.input:
            raw_counts = load_matches(read_match_csv(args.input))
    elif args.input and args.methods:
        methods = [m.strip() for m in args.methods.split(",")]
        if len(methods) != 2 or any(m not in METHODS for m in methods):
            raise _UsageError("--methods expects two of " + ",".join(METHODS))
        raw_counts = load_matches(read_match_csv(args.input))
        counts = raw_counts
        if args.filter != "none":
            counts, _ = filter_players(counts, args.filter)
        names = methods
        sides = []
        for m in methods:
            ranking, scores, master = _rank_with_method(counts, m, args.k)
            sides.append(_artifact_ranks(_ranking_artifact(counts, m, ranking, scores, master)))
        ranks_a, ranks_b = sides
    else:
        raise _UsageError("need either --rankings a,b or --input FILE --methods m1,m2")

    ra, rb, _ = _aligned_rankings(ranks_a, ranks_b)
    n = ra.n
    tau = kendall_tau(ra, rb)
    tau_corr = 1.0 - 4.0 * tau / (n * (n - 1))
    rho = spearman_rho(ra, rb)

    h2h_rows = []
    for a, b in h2h_requests:
        if raw_counts is None:
            raise _UsageError("--h2h needs --input with the match file")
        if raw_counts.labels is None or a not in raw_counts.labels or b not in raw_counts.labels:
            missing = [x for x in (a, b) if raw_counts.labels is None or x not in raw_counts.labels]
            raise DataError(f"unknown player(s) for --h2h: {missing}")
        ia, ib = raw_counts.labels.index(a), raw_counts.labels.index(b)
        h2h_rows.append(
            {
                "a": a,
                "b": b,
                "a_wins": int(raw_counts.win_counts[ia, ib]),
                "b_wins": int(raw_counts.win_counts[ib, ia]),
            }
        )

    payload = {
        "first": names[0],
        "second": names[1],
        "n": n,
        "kendall_tau": tau,
        "kendall_corr": tau_corr,
        "spearman_rho": rho,
        "h2h": h2h_rows,
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["first", "second", "n", "kendall_tau", "kendall_corr", "spearman_rho"])
        writer.writerow([names[0], names[1], n, tau, f"{tau_corr:.6f}", f"{rho:.6f}"])
        for row in h2h_rows:
            writer.writerow(["h2h", row["a"], row["b"], row["a_wins"], row["b_wins"], ""])
        _emit(buf.getvalue(), args.out)
    else:
        lines = [
            f"comparing {names[0]} vs {names[1]} over {n} players",
            f"kendall tau distance: {tau}",
            f"kendall correlation:  {tau_corr:.4f}",
            f"spearman rho:         {rho:.4f}",
        ]
        for row in h2h_rows:
            lines.append(f"h2h {row['a']} vs {row['b']}: {row['a_wins']}:{row['b_wins']}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
