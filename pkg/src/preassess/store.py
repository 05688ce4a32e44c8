"""Persistence: CSV codecs for counts and episodes, JSONL session event log.

The event log is newline-delimited JSON, one event per line, append-only.
Each session's events carry a gapless sequence starting at 1; replaying the
log through the session module's transition functions reconstructs every
session deterministically. A writer holds an advisory lock for its lifetime,
so there is at most one writer per log file; readers take snapshots freely.
"""

from __future__ import annotations

import csv
import fcntl
import io
import json
import logging
import os
from dataclasses import dataclass

from . import session as sessionmod
from .dtree import DecisionTree, tree_from_dict, tree_to_dict
from .errors import (
    CorruptLog,
    CsvParseError,
    DuplicateRow,
    PreassessError,
    SequenceGap,
    StorageFailure,
    UnknownLabel,
)
from .infotheory import EpisodeDataset
from .probability import AggregateCounts, CountRow, Outcome

__all__ = [
    "SessionEvent",
    "EventLog",
    "parse_counts_csv",
    "serialize_counts_csv",
    "parse_episodes_csv",
    "serialize_episodes_csv",
    "save_tree",
    "load_tree",
    "bundled_fixture",
]

logger = logging.getLogger(__name__)

COUNTS_HEADER = ["parent", "leaf", "pass", "fail"]
OUTCOME_COLUMN = "Outcome"
EVENT_KINDS = ("created", "outcome_recorded", "finalized")


def bundled_fixture(name: str) -> str:
    """Text of a packaged fixture file."""
    from importlib.resources import files

    from .errors import FixtureMissing

    resource = files("preassess").joinpath("fixtures", name)
    try:
        return resource.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise FixtureMissing(f"bundled fixture {name!r} is missing: {exc}") from None


# -- CSV codecs ---------------------------------------------------------------

def parse_counts_csv(text: str) -> AggregateCounts:
    """Parse ``parent,leaf,pass,fail`` rows into aggregate counts."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty document", line=1) from None
    if header != COUNTS_HEADER:
        raise CsvParseError(
            f"expected header {','.join(COUNTS_HEADER)!r}, got {','.join(header)!r}", line=1
        )
    rows: list[CountRow] = []
    seen: set[tuple[str, str]] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise CsvParseError(f"expected 4 fields, got {len(row)}", line=lineno)
        parent, leaf = row[0].strip(), row[1].strip()
        if not parent or not leaf:
            raise CsvParseError("parent and leaf must be non-empty", line=lineno)
        try:
            passes, fails = int(row[2]), int(row[3])
        except ValueError:
            raise CsvParseError(f"counts must be integers, got {row[2]!r}/{row[3]!r}", line=lineno) from None
        if passes < 0 or fails < 0:
            raise CsvParseError("counts must be non-negative", line=lineno)
        if (parent, leaf) in seen:
            raise DuplicateRow(f"line {lineno}: duplicate row for ({parent}, {leaf})")
        seen.add((parent, leaf))
        rows.append(CountRow(parent, leaf, passes, fails))
    if not rows:
        raise CsvParseError("no data rows", line=2)
    return AggregateCounts(tuple(rows))


def serialize_counts_csv(counts: AggregateCounts) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COUNTS_HEADER)
    for row in counts.rows:
        writer.writerow([row.parent, row.leaf, row.pass_count, row.fail_count])
    return out.getvalue()


def parse_episodes_csv(text: str) -> EpisodeDataset:
    """Parse episode records; the trailing column must be named Outcome."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty document", line=1) from None
    header = [h.strip() for h in header]
    if len(header) < 2 or header[-1] != OUTCOME_COLUMN:
        raise CsvParseError(
            f"need at least one attribute column and a trailing {OUTCOME_COLUMN!r} column",
            line=1,
        )
    attributes = header[:-1]
    if len(set(attributes)) != len(attributes):
        raise CsvParseError("attribute names must be distinct", line=1)
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CsvParseError(
                f"expected {len(header)} fields, got {len(row)}", line=lineno
            )
        values = [v.strip() for v in row]
        if any(not v for v in values[:-1]):
            raise CsvParseError("feature values must be non-empty", line=lineno)
        try:
            label = Outcome(values[-1])
        except ValueError:
            raise UnknownLabel(
                f"line {lineno}: outcome must be Pass or Fail, got {values[-1]!r}"
            ) from None
        records.append((dict(zip(attributes, values[:-1])), label))
    if not records:
        raise CsvParseError("no data rows", line=2)
    return EpisodeDataset.from_records(attributes, records)


def serialize_episodes_csv(d: EpisodeDataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(d.attributes) + [OUTCOME_COLUMN])
    for episode in d.records:
        writer.writerow(
            [episode.features[a] for a in d.attributes] + [episode.label.value]
        )
    return out.getvalue()


# -- trained trees ------------------------------------------------------------

def save_tree(path, tree: DecisionTree) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(tree_to_dict(tree), handle, indent=2)
        handle.write("\n")


def load_tree(path) -> DecisionTree:
    with open(path, encoding="utf-8") as handle:
        return tree_from_dict(json.load(handle))


# -- session event log ---------------------------------------------------------

@dataclass(frozen=True)
class SessionEvent:
    session_id: str
    seq: int
    kind: str
    payload: dict
    at: str

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.seq < 1:
            raise ValueError("sequence numbers start at 1")

    def to_line(self) -> str:
        return json.dumps(
            {
                "session_id": self.session_id,
                "seq": self.seq,
                "kind": self.kind,
                "payload": self.payload,
                "at": self.at,
            },
            separators=(",", ":"),
        )


def _event_from_obj(obj: dict, lineno: int) -> SessionEvent:
    try:
        event = SessionEvent(
            session_id=obj["session_id"],
            seq=obj["seq"],
            kind=obj["kind"],
            payload=obj["payload"],
            at=obj["at"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptLog(f"line {lineno}: malformed event: {exc}") from None
    if set(obj) != {"session_id", "seq", "kind", "payload", "at"}:
        raise CorruptLog(f"line {lineno}: unexpected event fields")
    return event


class EventLog:
    """Append-only JSONL log. Open with writer=True to take the write lock."""

    def __init__(self, path, *, writer: bool = False):
        self.path = os.fspath(path)
        self._writer = writer
        self._handle = None
        self._last_seq: dict[str, int] = {}
        self._lines: dict[tuple[str, int], str] = {}
        if writer:
            try:
                self._handle = open(self.path, "a+", encoding="utf-8")
                fcntl.flock(self._handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
            except OSError as exc:
                if self._handle is not None:
                    self._handle.close()
                    self._handle = None
                raise StorageFailure(f"cannot lock {self.path}: {exc}") from None
            for event in self.read_events():
                self._last_seq[event.session_id] = event.seq
                self._lines[(event.session_id, event.seq)] = event.to_line()

    def close(self) -> None:
        if self._handle is not None:
            fcntl.flock(self._handle.fileno(), fcntl.LOCK_UN)
            self._handle.close()
            self._handle = None

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def append_event(self, event: SessionEvent) -> None:
        """Durably append one event; identical replays are acked, not written."""
        if self._handle is None:
            raise StorageFailure("log is not open for writing")
        line = event.to_line()
        last = self._last_seq.get(event.session_id, 0)
        if event.seq <= last:
            if self._lines.get((event.session_id, event.seq)) == line:
                return  # idempotent replay
            raise SequenceGap(
                f"event {event.seq} of session {event.session_id} already "
                f"recorded with a different body"
            )
        if event.seq != last + 1:
            raise SequenceGap(
                f"session {event.session_id}: expected seq {last + 1}, got {event.seq}"
            )
        try:
            self._handle.write(line + "\n")
            self._handle.flush()
            os.fsync(self._handle.fileno())
        except OSError as exc:
            raise StorageFailure(f"append failed: {exc}") from None
        self._last_seq[event.session_id] = event.seq
        self._lines[(event.session_id, event.seq)] = line

    def read_events(self) -> list[SessionEvent]:
        """Snapshot of the log. A partial trailing line is dropped with a
        warning (interrupted final append); anything corrupt before the end
        raises CorruptLog."""
        try:
            with open(self.path, encoding="utf-8") as handle:
                raw = handle.read()
        except FileNotFoundError:
            return []
        except OSError as exc:
            raise StorageFailure(f"cannot read {self.path}: {exc}") from None
        if not raw:
            return []
        lines = raw.split("\n")
        trailing_open = lines[-1] != ""
        if not trailing_open:
            lines = lines[:-1]
        events: list[SessionEvent] = []
        seen: dict[tuple[str, int], str] = {}
        for lineno, line in enumerate(lines, start=1):
            if not line:
                raise CorruptLog(f"line {lineno}: blank line inside the log")
            is_last = lineno == len(lines)
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                if is_last and trailing_open:
                    logger.warning(
                        "%s: dropping partial trailing line %d", self.path, lineno
                    )
                    break
                raise CorruptLog(f"line {lineno}: not valid JSON") from None
            event = _event_from_obj(obj, lineno)
            key = (event.session_id, event.seq)
            if key in seen:
                if seen[key] == line:
                    continue  # duplicate from a crash between append and ack
                raise CorruptLog(
                    f"line {lineno}: conflicting duplicate for session "
                    f"{event.session_id} seq {event.seq}"
                )
            seen[key] = line
            events.append(event)
        return events

    def load_sessions(self) -> dict[str, "sessionmod.AssessmentSession"]:
        """Replay the log through the session transition functions."""
        sessions: dict[str, sessionmod.AssessmentSession] = {}
        expected: dict[str, int] = {}
        for event in self.read_events():
            want = expected.get(event.session_id, 0) + 1
            if event.seq != want:
                raise CorruptLog(
                    f"session {event.session_id}: expected seq {want}, found {event.seq}"
                )
            expected[event.session_id] = event.seq
            if event.kind == "created":
                if event.session_id in sessions:
                    raise CorruptLog(f"session {event.session_id} created twice")
                payload = event.payload
                try:
                    sessions[event.session_id] = sessionmod.session_from_snapshot(
                        session_id=event.session_id,
                        desired=payload["desired"],
                        mode=payload["mode"],
                        queue=payload["queue"],
                        created_at=payload["created_at"],
                    )
                except (KeyError, ValueError) as exc:
                    raise CorruptLog(
                        f"session {event.session_id}: bad creation payload: {exc}"
                    ) from None
            elif event.kind == "outcome_recorded":
                state = sessions.get(event.session_id)
                if state is None:
                    raise CorruptLog(
                        f"outcome for unknown session {event.session_id}"
                    )
                try:
                    sessions[event.session_id] = sessionmod.record_outcome(
                        state,
                        event.payload["leaf"],
                        Outcome(event.payload["outcome"]),
                        at=event.at,
                    )
                except (KeyError, ValueError) as exc:
                    raise CorruptLog(
                        f"session {event.session_id}: bad outcome payload: {exc}"
                    ) from None
                except PreassessError as exc:
                    # a correct writer could never have appended this event
                    raise CorruptLog(
                        f"session {event.session_id}: impossible replay: {exc}"
                    ) from None
            elif event.kind == "finalized":
                if event.session_id not in sessions:
                    raise CorruptLog(
                        f"finalized event for unknown session {event.session_id}"
                    )
                # recommendation snapshots add nothing to replayed state
        return sessions

    # -- event builders ---------------------------------------------------

    def append_created(self, state: "sessionmod.AssessmentSession") -> None:
        self.append_event(
            SessionEvent(
                session_id=state.id,
                seq=1,
                kind="created",
                payload={
                    "desired": state.desired,
                    "mode": state.mode.value,
                    "queue": [[p, l] for p, l in state.queue],
                    "created_at": state.created_at,
                },
                at=state.created_at,
            )
        )

    def append_outcome(
        self, state: "sessionmod.AssessmentSession", leaf: str, outcome: Outcome, at: str
    ) -> None:
        self.append_event(
            SessionEvent(
                session_id=state.id,
                seq=self._last_seq.get(state.id, 0) + 1,
                kind="outcome_recorded",
                payload={"leaf": leaf, "outcome": outcome.value},
                at=at,
            )
        )

    def append_finalized(self, state: "sessionmod.AssessmentSession", payload: dict, at: str) -> None:
        self.append_event(
            SessionEvent(
                session_id=state.id,
                seq=self._last_seq.get(state.id, 0) + 1,
                kind="finalized",
                payload=payload,
                at=at,
            )
        )
