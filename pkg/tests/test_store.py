"""Persistence: CSV parsing, tree files, and the append-only event log."""

import json
import logging
import tempfile
import threading
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from preassess.dtree import TrainConfig, build_tree
from preassess.errors import (
    CorruptLog,
    CsvParseError,
    DuplicateRow,
    FixtureMissing,
    SequenceGap,
    StorageFailure,
    UnknownLabel,
)
from preassess.infotheory import EpisodeDataset
from preassess.probability import AggregateCounts, CountRow, Outcome
from preassess.session import Mode, SessionStatus, record_outcome, start_session
from preassess.store import (
    EventLog,
    SessionEvent,
    bundled_fixture,
    load_tree,
    parse_counts_csv,
    parse_episodes_csv,
    save_tree,
    serialize_counts_csv,
    serialize_episodes_csv,
)

COUNTS = """parent,leaf,pass,fail
select,selectOrderBy,10,2
select,selectWhere,12,0
delete,deleteWhere,7,5
"""

AT = "2026-01-01T00:00:00.000+00:00"


# -- counts CSV -----------------------------------------------------------------

def test_parse_counts_reads_rows_in_order():
    agg = parse_counts_csv(COUNTS)
    assert [(r.parent, r.leaf, r.pass_count, r.fail_count) for r in agg.rows] == [
        ("select", "selectOrderBy", 10, 2),
        ("select", "selectWhere", 12, 0),
        ("delete", "deleteWhere", 7, 5),
    ]
    assert agg.parents() == ["select", "delete"]


def test_counts_round_trip():
    agg = parse_counts_csv(COUNTS)
    assert serialize_counts_csv(agg) == COUNTS
    assert parse_counts_csv(serialize_counts_csv(agg)) == agg


def test_bundled_cohort_round_trips(cohort):
    assert parse_counts_csv(serialize_counts_csv(cohort)) == cohort


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "empty"),
        ("parent,leaf,pass,fail\n", "no data rows"),
        ("parent,leaf,pass\nselect,x,1\n", "header"),
        ("leaf,parent,pass,fail\nx,select,1,2\n", "header"),
        ("parent,leaf,pass,fail\nselect,x,1\n", "line 2"),
        ("parent,leaf,pass,fail\nselect,x,1,2,3\n", "line 2"),
        ("parent,leaf,pass,fail\nselect,x,one,2\n", "line 2"),
        ("parent,leaf,pass,fail\nselect,x,-1,2\n", "line 2"),
        ("parent,leaf,pass,fail\n,x,1,2\n", "line 2"),
    ],
)
def test_counts_errors_name_the_line(text, fragment):
    with pytest.raises(CsvParseError) as exc:
        parse_counts_csv(text)
    assert fragment in str(exc.value)


def test_duplicate_counts_row_is_its_own_error():
    text = "parent,leaf,pass,fail\nselect,x,1,2\nselect,x,1,9\n"
    with pytest.raises(DuplicateRow) as exc:
        parse_counts_csv(text)
    assert "line 3" in str(exc.value)


# -- episodes CSV ----------------------------------------------------------------

EPISODES = """Select,Insert,Outcome
SelectAll,InsertInto,Pass
SelectWhere,InsertInto,Fail
"""


def test_parse_episodes_builds_a_dataset():
    ds = parse_episodes_csv(EPISODES)
    assert ds.attributes == ("Select", "Insert")
    assert ds.records[0].features == {"Select": "SelectAll", "Insert": "InsertInto"}
    assert ds.records[1].label is Outcome.FAIL


def test_episodes_round_trip():
    ds = parse_episodes_csv(EPISODES)
    assert serialize_episodes_csv(ds) == EPISODES
    assert parse_episodes_csv(serialize_episodes_csv(ds)) == ds


def test_bundled_episodes_round_trip(episodes):
    assert parse_episodes_csv(serialize_episodes_csv(episodes)) == episodes


def test_episodes_reject_unknown_outcome_label():
    text = "Select,Outcome\nSelectAll,Maybe\n"
    with pytest.raises(UnknownLabel) as exc:
        parse_episodes_csv(text)
    assert "Maybe" in str(exc.value)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "Select,Outcome\n",
        "Outcome\nPass\n",
        "Select,Select,Outcome\nA,B,Pass\n",
        "Select,Insert\nA,B\n",
        "Select,Outcome\nA,Pass\nB\n",
        "Select,Outcome\n,Pass\n",
    ],
)
def test_episode_parse_errors(text):
    with pytest.raises(CsvParseError):
        parse_episodes_csv(text)


# -- tree files -------------------------------------------------------------------

def test_tree_save_load_round_trip(tmp_path, episodes):
    tree = build_tree(episodes, TrainConfig())
    path = tmp_path / "model.json"
    save_tree(path, tree)
    assert load_tree(path) == tree
    # the file is ordinary JSON, inspectable without this package
    assert json.loads(path.read_text())["attribute"] == "Update"


def test_bundled_fixture_missing():
    with pytest.raises(FixtureMissing):
        bundled_fixture("no_such_file.csv")


# -- event records ---------------------------------------------------------------

def test_session_event_line_is_compact_json():
    event = SessionEvent("s1", 1, "created", {"desired": "delete"}, AT)
    line = event.to_line()
    assert "\n" not in line and ": " not in line
    assert json.loads(line) == {
        "session_id": "s1",
        "seq": 1,
        "kind": "created",
        "payload": {"desired": "delete"},
        "at": AT,
    }


@pytest.mark.parametrize(
    "seq, kind",
    [(0, "created"), (-2, "outcome_recorded"), (1, "renamed"), (1, "")],
)
def test_session_event_validation(seq, kind):
    with pytest.raises(ValueError):
        SessionEvent("s1", seq, kind, {}, AT)


# -- event log: writing -----------------------------------------------------------

@pytest.fixture
def log_path(tmp_path):
    return tmp_path / "events.jsonl"


def test_append_and_read_events(log_path):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {"a": 1}, AT))
        log.append_event(SessionEvent("s1", 2, "outcome_recorded", {"b": 2}, AT))
    events = EventLog(log_path).read_events()
    assert [e.seq for e in events] == [1, 2]
    assert events[1].payload == {"b": 2}


def test_sequences_are_tracked_per_session(log_path):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))
        log.append_event(SessionEvent("s2", 1, "created", {}, AT))
        log.append_event(SessionEvent("s1", 2, "outcome_recorded", {}, AT))
    events = EventLog(log_path).read_events()
    assert [(e.session_id, e.seq) for e in events] == [("s1", 1), ("s2", 1), ("s1", 2)]


def test_identical_append_is_idempotent(log_path):
    event = SessionEvent("s1", 1, "created", {"a": 1}, AT)
    with EventLog(log_path, writer=True) as log:
        log.append_event(event)
        log.append_event(event)
    assert log_path.read_text().count("\n") == 1


def test_conflicting_append_same_seq_is_rejected(log_path):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {"a": 1}, AT))
        with pytest.raises(SequenceGap):
            log.append_event(SessionEvent("s1", 1, "created", {"a": 2}, AT))


def test_gapped_append_is_rejected(log_path):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))
        with pytest.raises(SequenceGap):
            log.append_event(SessionEvent("s1", 3, "outcome_recorded", {}, AT))


def test_append_requires_writer_mode(log_path):
    log = EventLog(log_path)
    with pytest.raises(StorageFailure):
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))


def test_second_writer_is_locked_out(log_path):
    with EventLog(log_path, writer=True):
        with pytest.raises(StorageFailure):
            EventLog(log_path, writer=True)
    # released on exit; a new writer may take over
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))


def test_writer_resumes_existing_sequences(log_path):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))
    with EventLog(log_path, writer=True) as log:
        with pytest.raises(SequenceGap):
            log.append_event(SessionEvent("s1", 1, "created", {"other": 1}, AT))
        log.append_event(SessionEvent("s1", 2, "outcome_recorded", {}, AT))
    assert len(EventLog(log_path).read_events()) == 2


def test_reading_does_not_need_the_lock(log_path):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))
        assert len(EventLog(log_path).read_events()) == 1


def test_writer_lock_excludes_concurrent_threads(log_path):
    failures = []

    def contend():
        try:
            EventLog(log_path, writer=True)
        except StorageFailure:
            failures.append(True)

    with EventLog(log_path, writer=True):
        threads = [threading.Thread(target=contend) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    assert len(failures) == 4


# -- event log: reading damaged files ----------------------------------------------

def test_partial_trailing_line_is_dropped(log_path, caplog):
    with EventLog(log_path, writer=True) as log:
        log.append_event(SessionEvent("s1", 1, "created", {}, AT))
    with log_path.open("a") as fh:
        fh.write('{"session_id":"s1","seq":2,"kind":"outcome_rec')
    with caplog.at_level(logging.WARNING):
        events = EventLog(log_path).read_events()
    assert [e.seq for e in events] == [1]
    assert any("partial" in r.getMessage() for r in caplog.records)


def test_midfile_garbage_is_corrupt(log_path):
    lines = [
        SessionEvent("s1", 1, "created", {}, AT).to_line(),
        "not json at all",
        SessionEvent("s1", 2, "outcome_recorded", {}, AT).to_line(),
    ]
    log_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptLog):
        EventLog(log_path).read_events()


def test_midfile_blank_line_is_corrupt(log_path):
    lines = [SessionEvent("s1", 1, "created", {}, AT).to_line(), "", "x"]
    log_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptLog):
        EventLog(log_path).read_events()


def test_unexpected_event_fields_are_corrupt(log_path):
    obj = json.loads(SessionEvent("s1", 1, "created", {}, AT).to_line())
    obj["extra"] = True
    log_path.write_text(json.dumps(obj) + "\n")
    with pytest.raises(CorruptLog):
        EventLog(log_path).read_events()


def test_duplicate_identical_line_is_skipped_on_read(log_path):
    line = SessionEvent("s1", 1, "created", {}, AT).to_line()
    log_path.write_text(line + "\n" + line + "\n")
    assert [e.seq for e in EventLog(log_path).read_events()] == [1]


def test_conflicting_duplicate_seq_is_corrupt(log_path):
    lines = [
        SessionEvent("s1", 1, "created", {"a": 1}, AT).to_line(),
        SessionEvent("s1", 1, "created", {"a": 2}, AT).to_line(),
    ]
    log_path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptLog):
        EventLog(log_path).read_events()


def test_missing_file_reads_empty(log_path):
    assert EventLog(log_path).read_events() == []


# -- session replay -----------------------------------------------------------------

def make_log(graph, log_path):
    """Drive one direct delete session through a fresh log."""
    with EventLog(log_path, writer=True) as log:
        session = start_session(graph, "delete", Mode.DIRECT, session_id="replayed")
        log.append_created(session)
        for leaf, outcome in [
            ("truncateTable", Outcome.PASS),
            ("deleteSelect", Outcome.FAIL),
        ]:
            session = record_outcome(session, leaf, outcome)
            log.append_outcome(session, leaf, outcome, AT)
    return session


def event_line(session_id, seq, kind, payload):
    return SessionEvent(session_id, seq, kind, payload, AT).to_line()


def test_load_sessions_replays_outcomes(graph, log_path):
    live = make_log(graph, log_path)
    restored = EventLog(log_path).load_sessions()
    assert set(restored) == {"replayed"}
    assert restored["replayed"].outcomes == live.outcomes
    assert restored["replayed"].status is SessionStatus.ACTIVE


def test_replay_matches_direct_transitions(graph, log_path):
    with EventLog(log_path, writer=True) as log:
        session = start_session(graph, "insert", Mode.PREREQUISITE, session_id="full")
        log.append_created(session)
        for leaf in ["selectOrderBy", "selectDistinct", "selectWhere", "selectAll"]:
            session = record_outcome(session, leaf, Outcome.PASS)
            log.append_outcome(session, leaf, Outcome.PASS, AT)
        log.append_finalized(session, {"kind": "progress", "target": "insert"}, AT)
    restored = EventLog(log_path).load_sessions()
    assert restored["full"].outcomes == session.outcomes
    assert restored["full"].queue == session.queue
    assert restored["full"].status is SessionStatus.COMPLETE


def test_finalized_event_is_a_replay_no_op(graph, log_path):
    with EventLog(log_path, writer=True) as log:
        session = start_session(graph, "select", Mode.PREREQUISITE, session_id="born-done")
        log.append_created(session)
        log.append_finalized(session, {"kind": "progress", "target": "select"}, AT)
    restored = EventLog(log_path).load_sessions()
    assert restored["born-done"].status is SessionStatus.COMPLETE


@pytest.mark.parametrize(
    "mutate",
    [
        pytest.param(
            lambda lines: lines + [
                event_line(
                    "replayed",
                    4,
                    "created",
                    {
                        "desired": "update",
                        "mode": "direct",
                        "queue": [["update", "updateSelect"]],
                        "created_at": AT,
                    },
                )
            ],
            id="created-twice",
        ),
        pytest.param(
            lambda lines: lines + [
                event_line("ghost", 1, "outcome_recorded", {"leaf": "deleteWhere", "outcome": "Pass"})
            ],
            id="outcome-before-creation",
        ),
        pytest.param(
            lambda lines: [lines[0], lines[1].replace('"seq":2', '"seq":5')],
            id="sequence-gap",
        ),
        pytest.param(
            lambda lines: lines[:1] + [
                event_line("replayed", 2, "outcome_recorded", {"outcome": "Pass"})
            ],
            id="outcome-missing-leaf",
        ),
        pytest.param(
            lambda lines: lines[:1] + [
                event_line("replayed", 2, "outcome_recorded", {"leaf": "deleteSelect", "outcome": "Meh"})
            ],
            id="outcome-bad-label",
        ),
        pytest.param(
            lambda lines: lines + [
                event_line("replayed", 4, "outcome_recorded", {"leaf": "deleteSelect", "outcome": "Pass"})
            ],
            id="conflicting-replayed-outcome",
        ),
    ],
)
def test_load_sessions_rejects_inconsistent_histories(graph, log_path, mutate):
    make_log(graph, log_path)
    lines = log_path.read_text().splitlines()
    log_path.write_text("\n".join(mutate(lines)) + "\n")
    with pytest.raises(CorruptLog):
        EventLog(log_path).load_sessions()


# -- properties ---------------------------------------------------------------------

ident = st.text(alphabet="abcdefgXYZ_0123456789", min_size=1, max_size=8)


@st.composite
def count_tables(draw):
    pairs = draw(st.lists(st.tuples(ident, ident), min_size=1, max_size=6, unique=True))
    rows = tuple(
        CountRow(parent, leaf, draw(st.integers(0, 50)), draw(st.integers(0, 50)))
        for parent, leaf in pairs
    )
    return AggregateCounts(rows)


@st.composite
def episode_datasets(draw):
    attrs = draw(st.lists(ident, min_size=1, max_size=3, unique=True))
    n = draw(st.integers(1, 6))
    records = [
        (
            {a: draw(ident) for a in attrs},
            draw(st.sampled_from([Outcome.PASS, Outcome.FAIL])),
        )
        for _ in range(n)
    ]
    return EpisodeDataset.from_records(attrs, records)


@given(count_tables())
def test_counts_csv_round_trip_property(agg):
    assert parse_counts_csv(serialize_counts_csv(agg)) == agg


@given(episode_datasets())
def test_episodes_csv_round_trip_property(ds):
    assert parse_episodes_csv(serialize_episodes_csv(ds)) == ds


@st.composite
def session_histories(draw, graph):
    desired = draw(st.sampled_from(["insert", "delete", "update", "join"]))
    mode = draw(st.sampled_from([Mode.PREREQUISITE, Mode.DIRECT]))
    session = start_session(graph, desired, mode, session_id="h")
    leaves = [leaf for _, leaf in session.queue]
    order = draw(st.permutations(leaves))
    answered = draw(st.integers(0, len(order)))
    outcomes = [
        (leaf, draw(st.sampled_from([Outcome.PASS, Outcome.FAIL])))
        for leaf in order[:answered]
    ]
    return session, outcomes


@given(st.data())
def test_replay_reproduces_any_history(graph, data):
    session, outcomes = data.draw(session_histories(graph))
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "events.jsonl"
        with EventLog(path, writer=True) as log:
            log.append_created(session)
            for leaf, outcome in outcomes:
                session = record_outcome(session, leaf, outcome)
                log.append_outcome(session, leaf, outcome, AT)
        restored = EventLog(path).load_sessions()
    assert restored["h"].outcomes == session.outcomes
    assert restored["h"].queue == session.queue
    assert restored["h"].status is session.status
    assert restored["h"].mode is session.mode
