from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wstrank import (
    ComparisonCounts,
    DataError,
    MatchRecord,
    ProbabilityMatrix,
    Ranking,
    SimConfig,
    check_wst,
    counts_from_json,
    counts_to_json,
    filter_players,
    gen_counts,
    gen_probabilities,
    load_matches,
    read_match_csv,
    skew_statistic,
    write_match_csv,
)
from wstrank.simulation import replicate_rng

from oracles import brute_wst_violations, is_strongly_connected


def records(*pairs):
    return [MatchRecord(w, l) for w, l in pairs]


class TestLoadMatches:
    def test_single_pair_counts(self):
        counts = load_matches(records(("A", "B"), ("B", "A"), ("A", "B")))
        assert counts.n == 2
        assert counts.labels == ("A", "B")
        assert counts.pair_counts[0, 1] == 3
        assert counts.win_counts[0, 1] == 2
        assert counts.win_counts[1, 0] == 1

    def test_empty_input(self):
        with pytest.raises(DataError, match="no match records"):
            load_matches([])

    def test_self_match_names_the_row(self):
        bad = records(("A", "B"), ("C", "C"))
        with pytest.raises(DataError, match="record 2"):
            load_matches(bad)

    def test_empty_identifier_rejected(self):
        with pytest.raises(DataError, match="record 1"):
            load_matches(records(("", "B")))

    def test_first_appearance_indexing(self):
        counts = load_matches(records(("Z", "A"), ("A", "M")))
        assert counts.labels == ("Z", "A", "M")

    def test_multiset_round_trip(self):
        rng = np.random.default_rng(17)
        players = [f"p{i}" for i in range(20)]
        recs = []
        for _ in range(1000):
            w, l = rng.choice(20, size=2, replace=False)
            recs.append(MatchRecord(players[w], players[l]))
        counts = load_matches(recs)
        regenerated: Counter = Counter()
        for i in range(counts.n):
            for j in range(counts.n):
                if counts.win_counts[i, j]:
                    regenerated[(counts.labels[i], counts.labels[j])] += int(counts.win_counts[i, j])
        assert regenerated == Counter((r.winner, r.loser) for r in recs)

    @given(
        st.lists(
            st.tuples(st.sampled_from("ABCDEFGH"), st.sampled_from("ABCDEFGH")).filter(
                lambda t: t[0] != t[1]
            ),
            min_size=1,
            max_size=60,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_invariants_hold(self, pairs):
        counts = load_matches(records(*pairs))
        pair, win = counts.pair_counts, counts.win_counts
        assert np.array_equal(pair, pair.T)
        assert np.array_equal(win + win.T, pair)
        assert not np.diagonal(pair).any()
        assert (win >= 0).all()
        assert pair.sum() == 2 * len(pairs)


class TestCountsType:
    def test_rejects_asymmetric_pairs(self):
        with pytest.raises(ValueError, match="symmetric"):
            ComparisonCounts([[0, 2], [1, 0]], [[0, 1], [1, 0]])

    def test_rejects_inconsistent_wins(self):
        with pytest.raises(ValueError, match="must equal"):
            ComparisonCounts([[0, 3], [3, 0]], [[0, 1], [1, 0]])

    def test_rejects_negative_and_diagonal(self):
        with pytest.raises(ValueError, match="non-negative"):
            ComparisonCounts([[0, -1], [-1, 0]], [[0, 0], [-1, 0]])
        with pytest.raises(ValueError, match="diagonal"):
            ComparisonCounts([[1, 0], [0, 0]], [[1, 0], [0, 0]])

    def test_arrays_are_read_only(self):
        counts = load_matches(records(("A", "B")))
        with pytest.raises(ValueError):
            counts.win_counts[0, 1] = 5


class TestRanking:
    def test_must_be_permutation(self):
        with pytest.raises(ValueError, match="permutation"):
            Ranking([1, 1, 3])

    def test_from_scores_tie_break_prefers_lower_index(self):
        r = Ranking.from_scores([0.0, 0.0, 1.0])
        assert r.ranks.tolist() == [1, 2, 3]

    def test_reverse(self):
        r = Ranking([2, 3, 1])
        assert r.reverse().ranks.tolist() == [2, 1, 3]

    def test_best_first(self):
        r = Ranking([2, 3, 1])
        assert r.best_first().tolist() == [1, 0, 2]


class TestFilterPlayers:
    def test_no_wins_removes_winless_player(self):
        # player 2 never wins
        win = np.array([[0, 2, 1], [1, 0, 2], [0, 0, 0]])
        counts = ComparisonCounts(win + win.T, win)
        reduced, mapping = filter_players(counts, "no-wins")
        assert reduced.n == 2
        assert mapping == (0, 1)

    def test_cycle_is_fixed_point_for_both_policies(self):
        win = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        counts = ComparisonCounts(win + win.T, win)
        for policy in ("no-wins", "bt-connected"):
            reduced, mapping = filter_players(counts, policy)
            assert reduced == counts
            assert mapping == (0, 1, 2)

    def test_no_wins_is_a_single_pass(self):
        # A beats B, B beats C: one pass drops only C even though B then
        # has no wins left in the reduced data.
        counts = load_matches(records(("A", "B"), ("B", "C")))
        reduced, mapping = filter_players(counts, "no-wins")
        assert mapping == (0, 1)
        assert reduced.labels == ("A", "B")

    def test_bt_connected_output_is_strongly_connected(self):
        cfg = SimConfig(scenario="uniform", n=50, t_max=1, xi_low=0.02, xi_high=0.10, seed=4)
        rng = replicate_rng(4, 0)
        P, _ = gen_probabilities(cfg, rng)
        counts = gen_counts(P, cfg, rng)
        reduced, mapping = filter_players(counts, "bt-connected")
        assert 2 <= reduced.n < 50
        assert is_strongly_connected(reduced.win_counts)
        # idempotent: a strongly connected graph is its own largest component
        again, mapping2 = filter_players(reduced, "bt-connected")
        assert again == reduced
        assert mapping2 == tuple(range(reduced.n))

    def test_all_removed_is_an_error(self):
        zero = np.zeros((3, 3), dtype=int)
        counts = ComparisonCounts(zero, zero)
        with pytest.raises(DataError):
            filter_players(counts, "no-wins")

    def test_acyclic_graph_has_no_usable_component(self):
        counts = load_matches(records(("A", "B"), ("B", "C")))
        with pytest.raises(DataError):
            filter_players(counts, "bt-connected")

    def test_unknown_policy(self):
        counts = load_matches(records(("A", "B")))
        with pytest.raises(ValueError, match="policy"):
            filter_players(counts, "strict")


def probability_matrix(n, entries):
    probs = np.full((n, n), 0.5)
    for (i, j), p in entries.items():
        probs[i, j] = p
        probs[j, i] = 1.0 - p
    return ProbabilityMatrix(probs)


class TestCheckWst:
    def test_wst_holds_without_sst(self):
        # strong pairwise favourites but a weak transitive edge is fine
        P = probability_matrix(3, {(1, 0): 0.9, (2, 1): 0.9, (2, 0): 0.6})
        report = check_wst(P)
        assert report.ok
        assert report.violations == ()

    def test_direct_violation_reported(self):
        P = probability_matrix(3, {(1, 0): 0.9, (2, 1): 0.9, (2, 0): 0.4})
        report = check_wst(P)
        assert (2, 1, 0) in report.violations

    def test_exact_half_pair_is_flagged(self):
        P = probability_matrix(3, {(1, 0): 0.9, (2, 1): 0.9, (2, 0): 0.5})
        report = check_wst(P)
        assert (0, 2) in report.ties
        assert not report.ok

    @pytest.mark.parametrize("scenario", ["uniform", "two_group", "bt_latent"])
    def test_generated_matrices_are_clean(self, scenario):
        for seed in range(5):
            cfg = SimConfig(scenario=scenario, n=24, seed=seed)
            P, _ = gen_probabilities(cfg, replicate_rng(seed, 0))
            assert check_wst(P).ok

    def test_planted_violation_detected_exactly(self):
        cfg = SimConfig(scenario="uniform", n=12, seed=9)
        P, _ = gen_probabilities(cfg, replicate_rng(9, 0))
        tampered = P.probs.copy()
        tampered[8, 2] = 0.3  # better player 8 now loses to 2 in expectation
        tampered[2, 8] = 0.7
        flipped = ProbabilityMatrix(tampered)
        report = check_wst(flipped)
        expected = brute_wst_violations(flipped.probs)
        assert list(report.violations) == expected
        assert len(expected) > 0


class TestSkewStatistic:
    def test_example_values(self):
        counts = ComparisonCounts([[0, 5], [5, 0]], [[0, 3], [2, 0]])
        x = skew_statistic(counts)
        assert x[0, 1] == pytest.approx(0.2)
        assert x[1, 0] == pytest.approx(-0.2)

    def test_unplayed_pair_is_zero(self):
        zero = np.zeros((2, 2), dtype=int)
        x = skew_statistic(ComparisonCounts(zero, zero))
        assert (x == 0).all()

    def test_exactly_skew_symmetric_and_bounded(self):
        cfg = SimConfig(scenario="uniform", n=30, seed=2)
        rng = replicate_rng(2, 0)
        P, _ = gen_probabilities(cfg, rng)
        counts = gen_counts(P, cfg, rng)
        x = skew_statistic(counts)
        assert (x + x.T == 0).all()
        assert np.abs(x).max() <= 1.0


class TestSerialization:
    def test_counts_json_round_trip(self):
        counts = load_matches(records(("A", "B"), ("B", "A"), ("C", "A")))
        again = counts_from_json(counts_to_json(counts))
        assert again == counts

    def test_counts_json_missing_field(self):
        with pytest.raises(DataError, match="missing field"):
            counts_from_json('{"labels": ["a"], "pair_counts": [[0]]}')

    def test_match_csv_round_trip(self, tmp_path):
        recs = records(("Doe, Jane", "Poe, Edgar"), ("Poe, Edgar", "Doe, Jane"))
        path = tmp_path / "m.csv"
        write_match_csv(path, recs)
        assert read_match_csv(path) == recs

    def test_match_csv_bad_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\nx,y\n")
        with pytest.raises(DataError, match="header"):
            read_match_csv(path)
