"""Assessment session lifecycle: queueing, recording, grading, finalizing."""

from fractions import Fraction

import pytest

from preassess.errors import (
    AlreadyRecordedDifferently,
    AnswerCountMismatch,
    IndexOutOfRange,
    LeafNotQueued,
    NoQuizDefined,
    NotAParent,
    SessionComplete,
    SessionNotComplete,
    UnknownNode,
)
from preassess.graph import build_graph
from preassess.probability import Outcome, Progress, Relearn
from preassess.session import (
    Mode,
    SessionStatus,
    finalize,
    grade_quiz,
    performance_by_parent,
    record_outcome,
    session_from_snapshot,
    start_session,
)


@pytest.fixture(scope="module")
def forked_graph():
    """Two independent prerequisites feeding one goal concept."""
    return build_graph(
        {
            "parents": [
                {"id": "alpha", "leaves": [{"id": "a1"}, {"id": "a2"}, {"id": "a3"}, {"id": "a4"}]},
                {"id": "beta", "leaves": [{"id": "b1"}, {"id": "b2"}, {"id": "b3"}]},
                {"id": "goal", "leaves": [{"id": "g1"}]},
            ],
            "prerequisites": [
                {"from": "alpha", "to": "goal"},
                {"from": "beta", "to": "goal"},
            ],
            "progression": [{"from": "alpha", "to": "beta"}, {"from": "beta", "to": "goal"}],
        }
    )


def run(session, *outcomes):
    for leaf, outcome in outcomes:
        session = record_outcome(session, leaf, outcome)
    return session


# -- creation -------------------------------------------------------------------

def test_prerequisite_queue_covers_the_closure(graph):
    s = start_session(graph, "delete", Mode.PREREQUISITE)
    assert s.queue == (
        ("select", "selectOrderBy"),
        ("select", "selectDistinct"),
        ("select", "selectWhere"),
        ("select", "selectAll"),
        ("insert", "insertInto"),
        ("insert", "insertSelect"),
    )
    assert s.status is SessionStatus.ACTIVE
    assert s.parents_in_queue() == ["select", "insert"]


def test_direct_queue_is_the_concept_itself(graph):
    s = start_session(graph, "delete", "direct")
    assert s.queue == (
        ("delete", "truncateTable"),
        ("delete", "deleteSelect"),
        ("delete", "deleteWhere"),
    )
    assert s.mode is Mode.DIRECT


def test_session_without_prerequisites_is_born_complete(graph):
    s = start_session(graph, "select", Mode.PREREQUISITE)
    assert s.queue == ()
    assert s.status is SessionStatus.COMPLETE
    assert finalize(graph, s) == Progress("select")


def test_start_session_rejects_bad_targets(graph):
    with pytest.raises(NotAParent):
        start_session(graph, "deleteWhere", Mode.DIRECT)
    with pytest.raises(UnknownNode):
        start_session(graph, "ghost", Mode.DIRECT)
    with pytest.raises(ValueError):
        start_session(graph, "delete", "osmosis")


def test_explicit_id_and_timestamp(graph):
    s = start_session(
        graph, "delete", Mode.DIRECT, session_id="s-1", at="2026-01-01T00:00:00.000+00:00"
    )
    assert s.id == "s-1"
    assert s.created_at == s.updated_at == "2026-01-01T00:00:00.000+00:00"


# -- recording -------------------------------------------------------------------

def test_record_outcome_progresses_to_complete(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    s = record_outcome(s, "truncateTable", Outcome.PASS)
    assert s.pending == (("delete", "deleteSelect"), ("delete", "deleteWhere"))
    s = run(s, ("deleteSelect", Outcome.PASS), ("deleteWhere", Outcome.FAIL))
    assert s.status is SessionStatus.COMPLETE
    assert s.outcomes["deleteWhere"] is Outcome.FAIL


def test_identical_replay_returns_the_same_snapshot(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    s = record_outcome(s, "truncateTable", Outcome.PASS)
    assert record_outcome(s, "truncateTable", Outcome.PASS) is s


def test_conflicting_record_is_rejected(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    s = record_outcome(s, "truncateTable", Outcome.PASS)
    with pytest.raises(AlreadyRecordedDifferently):
        record_outcome(s, "truncateTable", Outcome.FAIL)


def test_unqueued_leaf_is_rejected(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    with pytest.raises(LeafNotQueued):
        record_outcome(s, "selectAll", Outcome.PASS)
    with pytest.raises(LeafNotQueued):
        record_outcome(s, "ghost", Outcome.PASS)


def test_complete_session_rejects_new_outcomes(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    s = run(
        s,
        ("truncateTable", Outcome.PASS),
        ("deleteSelect", Outcome.PASS),
        ("deleteWhere", Outcome.PASS),
    )
    with pytest.raises(SessionComplete):
        record_outcome(s, "truncateTable", Outcome.FAIL)
    # an identical replay still answers quietly after completion
    assert record_outcome(s, "deleteWhere", Outcome.PASS) is s


def test_sessions_are_immutable_snapshots(graph):
    first = start_session(graph, "delete", Mode.DIRECT)
    second = record_outcome(first, "truncateTable", Outcome.PASS)
    assert first.outcomes == {}
    assert second is not first


# -- finalize --------------------------------------------------------------------

def test_finalize_requires_completion(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    with pytest.raises(SessionNotComplete):
        finalize(graph, s)
    with pytest.raises(SessionNotComplete):
        performance_by_parent(s)


def test_clean_direct_run_progresses_to_next_higher(graph):
    s = start_session(graph, "delete", Mode.DIRECT)
    s = run(
        s,
        ("truncateTable", Outcome.PASS),
        ("deleteSelect", Outcome.PASS),
        ("deleteWhere", Outcome.PASS),
    )
    assert finalize(graph, s) == Progress("update", curriculum_complete=False)


def test_clean_direct_run_at_the_end_completes_the_curriculum(graph):
    s = start_session(graph, "join", Mode.DIRECT)
    s = run(
        s,
        ("innerJoin", Outcome.PASS),
        ("fullOuterJoin", Outcome.PASS),
        ("selectJoin", Outcome.PASS),
    )
    assert finalize(graph, s) == Progress(None, curriculum_complete=True)


def test_clean_prerequisite_run_unlocks_the_desired_concept(graph):
    s = start_session(graph, "insert", Mode.PREREQUISITE)
    s = run(
        s,
        ("selectOrderBy", Outcome.PASS),
        ("selectDistinct", Outcome.PASS),
        ("selectWhere", Outcome.PASS),
        ("selectAll", Outcome.PASS),
    )
    assert finalize(graph, s) == Progress("insert", curriculum_complete=False)


def test_single_failure_yields_relearn(graph):
    s = start_session(graph, "insert", Mode.PREREQUISITE)
    s = run(
        s,
        ("selectOrderBy", Outcome.FAIL),
        ("selectDistinct", Outcome.PASS),
        ("selectWhere", Outcome.PASS),
        ("selectAll", Outcome.PASS),
    )
    rec = finalize(graph, s)
    assert rec == Relearn(
        ("selectOrderBy",), Fraction(1, 4), (("select", Fraction(1, 4)),)
    )


def test_relearn_pools_across_parents(forked_graph):
    s = start_session(forked_graph, "goal", Mode.PREREQUISITE)
    assert s.parents_in_queue() == ["alpha", "beta"]
    s = run(
        s,
        ("a1", Outcome.FAIL),
        ("a2", Outcome.PASS),
        ("a3", Outcome.PASS),
        ("a4", Outcome.PASS),
        ("b1", Outcome.FAIL),
        ("b2", Outcome.FAIL),
        ("b3", Outcome.PASS),
    )
    rec = finalize(forked_graph, s)
    assert isinstance(rec, Relearn)
    assert rec.leaves == ("a1", "b1", "b2")
    assert rec.weight == Fraction(3, 7)
    assert rec.per_parent == (
        ("alpha", Fraction(1, 4)),
        ("beta", Fraction(2, 3)),
    )


def test_relearn_keeps_zero_weight_parents(forked_graph):
    s = start_session(forked_graph, "goal", Mode.PREREQUISITE)
    s = run(
        s,
        ("a1", Outcome.PASS),
        ("a2", Outcome.PASS),
        ("a3", Outcome.PASS),
        ("a4", Outcome.PASS),
        ("b1", Outcome.FAIL),
        ("b2", Outcome.PASS),
        ("b3", Outcome.PASS),
    )
    rec = finalize(forked_graph, s)
    assert rec.per_parent == (
        ("alpha", Fraction(0)),
        ("beta", Fraction(1, 3)),
    )


def test_performance_by_parent_orders_by_queue(forked_graph):
    s = start_session(forked_graph, "goal", Mode.PREREQUISITE)
    outcomes = dict.fromkeys(["a1", "a2", "a3", "a4", "b1", "b2"], Outcome.PASS)
    outcomes["b3"] = Outcome.FAIL
    # record in scrambled order; grouping must follow the queue, not arrival
    for leaf in ["b3", "a4", "b1", "a1", "b2", "a2", "a3"]:
        s = record_outcome(s, leaf, outcomes[leaf])
    grouped = performance_by_parent(s)
    assert [parent for parent, _ in grouped] == ["alpha", "beta"]
    assert grouped[0][1].to_string() == "PPPP"
    assert grouped[1][1].to_string() == "PPF"


# -- quiz grading ------------------------------------------------------------------

def test_grade_quiz_pass_and_fail(graph):
    passing = grade_quiz(graph, "selectDistinct", [1])
    assert passing.outcome is Outcome.PASS
    assert passing.correct == (True,)
    failing = grade_quiz(graph, "selectDistinct", [0])
    assert failing.outcome is Outcome.FAIL
    assert failing.correct == (False,)


def test_grade_quiz_validation(graph):
    with pytest.raises(UnknownNode):
        grade_quiz(graph, "ghost", [0])
    with pytest.raises(UnknownNode):
        grade_quiz(graph, "select", [0])
    with pytest.raises(AnswerCountMismatch):
        grade_quiz(graph, "selectAll", [0, 1])
    with pytest.raises(IndexOutOfRange):
        grade_quiz(graph, "selectAll", [9])
    with pytest.raises(IndexOutOfRange):
        grade_quiz(graph, "selectAll", [-1])
    with pytest.raises(IndexOutOfRange):
        grade_quiz(graph, "selectAll", [True])


def test_grade_quiz_without_quiz():
    g = build_graph({"parents": [{"id": "p", "leaves": [{"id": "bare"}]}]})
    with pytest.raises(NoQuizDefined):
        grade_quiz(g, "bare", [0])


def test_quiz_needs_every_item_correct():
    g = build_graph(
        {
            "parents": [
                {
                    "id": "p",
                    "leaves": [
                        {
                            "id": "two",
                            "quiz": [
                                {"prompt": "first", "choices": ["x", "y"], "correct_index": 0},
                                {"prompt": "second", "choices": ["x", "y"], "correct_index": 1},
                            ],
                        }
                    ],
                }
            ]
        }
    )
    assert grade_quiz(g, "two", [0, 1]).outcome is Outcome.PASS
    partial = grade_quiz(g, "two", [0, 0])
    assert partial.outcome is Outcome.FAIL
    assert partial.correct == (True, False)


# -- snapshots ---------------------------------------------------------------------

def test_snapshot_round_trip(graph):
    original = start_session(graph, "delete", Mode.PREREQUISITE, session_id="snap")
    rebuilt = session_from_snapshot(
        "snap", original.desired, original.mode.value, original.queue, original.created_at
    )
    assert rebuilt == original
