import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isr_bench.errors import InconsistentEdit
from isr_bench.iu import (
    EditCounts,
    EditOp,
    IuState,
    TranscriptTracker,
    WordIU,
    apply_edits,
    commit_remaining,
    diff_hypotheses,
    normalize_tokens,
)


def make_live(tokens):
    return [WordIU(i, t) for i, t in enumerate(tokens)], itertools.count(len(tokens))


class TestNormalize:
    def test_case_and_punctuation(self):
        assert normalize_tokens("The fire Brigade.") == ["the", "fire", "brigade"]

    def test_empty(self):
        assert normalize_tokens("") == []

    def test_internal_apostrophe_kept(self):
        assert normalize_tokens("don't  stop") == ["don't", "stop"]

    def test_edge_apostrophes_stripped(self):
        assert normalize_tokens("'tis 'quoted'") == ["tis", "quoted"]

    def test_punctuation_only_tokens_dropped(self):
        assert normalize_tokens("um... -- !!") == ["um"]


class TestDiff:
    def test_replacement(self):
        live, ids = make_live(["should"])
        events, new_live = diff_hypotheses(live, ["showed"], 1.0, ids)
        assert [(e.op, e.iu.text) for e in events] == [
            (EditOp.REVOKE, "should"),
            (EditOp.ADD, "showed"),
        ]
        assert [iu.text for iu in new_live] == ["showed"]
        assert live[0].state is IuState.REVOKED

    def test_pure_extension(self):
        live, ids = make_live(["a", "b"])
        events, new_live = diff_hypotheses(live, ["a", "b", "c"], 0.0, ids)
        assert [(e.op, e.iu.text) for e in events] == [(EditOp.ADD, "c")]
        assert [iu.text for iu in new_live] == ["a", "b", "c"]

    def test_divergence_mid_sequence(self):
        live, ids = make_live(["a", "b", "c"])
        events, new_live = diff_hypotheses(live, ["a", "x"], 0.0, ids)
        assert [(e.op, e.iu.text) for e in events] == [
            (EditOp.REVOKE, "c"),
            (EditOp.REVOKE, "b"),
            (EditOp.ADD, "x"),
        ]
        assert [iu.text for iu in new_live] == ["a", "x"]

    def test_no_change_no_events(self):
        live, ids = make_live(["a", "b"])
        events, new_live = diff_hypotheses(live, ["a", "b"], 0.0, ids)
        assert events == []
        assert new_live == live


class TestApplyEdits:
    def test_add(self):
        live, ids = make_live(["a"])
        events, _ = diff_hypotheses(live, ["a", "b"], 0.0, ids)
        assert apply_edits(["a"], events) == ["a", "b"]

    def test_replacement_pair(self):
        live, ids = make_live(["should"])
        events, _ = diff_hypotheses(live, ["showed"], 0.0, ids)
        assert apply_edits(["should"], events) == ["showed"]

    def test_inconsistent_revoke(self):
        bad = WordIU(9, "zzz")
        from isr_bench.iu import EditEvent

        with pytest.raises(InconsistentEdit):
            apply_edits(["a", "b"], [EditEvent(EditOp.REVOKE, bad, 0.0)])


class TestCommit:
    def test_commit_remaining_in_order(self):
        live, _ = make_live(["a", "b"])
        events = commit_remaining(live, 2.0)
        assert [(e.op, e.iu.text) for e in events] == [
            (EditOp.COMMIT, "a"),
            (EditOp.COMMIT, "b"),
        ]
        assert all(iu.state is IuState.COMMITTED for iu in live)

    def test_empty(self):
        assert commit_remaining([], 0.0) == []

    def test_revoked_word_stays_revoked(self):
        tracker = TranscriptTracker()
        tracker.update(["should"], 0.0)
        tracker.update(["showed"], 1.0)
        tracker.commit_all(2.0)
        assert tracker.committed_tokens == ["showed"]
        counts = tracker.counts
        assert (counts.adds, counts.revokes, counts.commits) == (2, 1, 1)

    def test_terminal_states_enforced(self):
        iu = WordIU(0, "a")
        iu.commit()
        with pytest.raises(InconsistentEdit):
            iu.revoke()
        with pytest.raises(InconsistentEdit):
            iu.commit()


class TestProperties:
    def test_round_trip_seeded(self):
        rng = random.Random(1234)
        alphabet = ["a", "b", "c", "d", "e"]
        for _ in range(1000):
            prev = [rng.choice(alphabet) for _ in range(rng.randint(0, 20))]
            new = [rng.choice(alphabet) for _ in range(rng.randint(0, 20))]
            live, ids = make_live(prev)
            events, _ = diff_hypotheses(live, new, 0.0, ids)
            assert apply_edits(prev, events) == new
            # revokes all precede adds, with strictly decreasing ids
            ops = [e.op for e in events]
            if EditOp.ADD in ops and EditOp.REVOKE in ops:
                assert ops.index(EditOp.ADD) > max(
                    i for i, op in enumerate(ops) if op is EditOp.REVOKE
                )
            revoked_ids = [e.iu.id for e in events if e.op is EditOp.REVOKE]
            assert revoked_ids == sorted(revoked_ids, reverse=True)
            assert len(set(revoked_ids)) == len(revoked_ids)

    @settings(max_examples=200, deadline=None)
    @given(
        prev=st.lists(st.sampled_from("abcde"), max_size=20),
        new=st.lists(st.sampled_from("abcde"), max_size=20),
    )
    def test_round_trip_hypothesis(self, prev, new):
        live, ids = make_live(prev)
        events, new_live = diff_hypotheses(live, new, 0.0, ids)
        assert apply_edits(prev, events) == new
        assert [iu.text for iu in new_live] == new
        # minimality under the prefix rule
        assert (events == []) == (prev == new)

    def test_tracker_timestamps_non_decreasing(self):
        tracker = TranscriptTracker()
        rng = random.Random(7)
        t = 0.0
        for _ in range(50):
            t += rng.random()
            tracker.update([rng.choice("ab") for _ in range(rng.randint(0, 6))], t)
        tracker.commit_all(t + 1)
        times = [e.wall_time for e in tracker.events]
        assert times == sorted(times)


class TestEditCounts:
    def test_addition(self):
        total = EditCounts(1, 2, 3) + EditCounts(4, 5, 6)
        assert (total.adds, total.revokes, total.commits) == (5, 7, 9)
        assert total.edits == 12

    def test_commits_never_exceed_adds(self):
        tracker = TranscriptTracker()
        rng = random.Random(99)
        for step in range(30):
            tracker.update([rng.choice("abc") for _ in range(rng.randint(0, 5))], float(step))
        tracker.commit_all(99.0)
        counts = tracker.counts
        assert counts.commits <= counts.adds
