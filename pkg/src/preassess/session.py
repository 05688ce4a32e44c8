"""Assessment sessions: a queue of leaf skills, answered one at a time.

A session is created for a desired concept in one of two modes. Prerequisite
mode queues the leaves of every concept in the desired concept's prerequisite
closure; direct mode queues the desired concept's own leaves. Outcomes are
recorded append-only, and once every queued leaf has an outcome the session
is complete and can be turned into a recommendation.

Sessions are immutable values; transitions return new snapshots so that an
event log can be replayed deterministically through the same functions.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Optional, Sequence

from . import graph as graphmod
from .errors import (
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
from .probability import (
    Outcome,
    PerformanceVector,
    Progress,
    Recommendation,
    Relearn,
    fail_weight,
)

__all__ = [
    "Mode",
    "SessionStatus",
    "AssessmentSession",
    "QuizGrade",
    "start_session",
    "record_outcome",
    "grade_quiz",
    "finalize",
    "session_from_snapshot",
    "utc_now",
]


class Mode(str, Enum):
    PREREQUISITE = "prerequisite"
    DIRECT = "direct"


class SessionStatus(str, Enum):
    ACTIVE = "active"
    COMPLETE = "complete"


def utc_now() -> str:
    """UTC timestamp at millisecond precision."""
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass(frozen=True)
class AssessmentSession:
    id: str
    desired: str
    mode: Mode
    queue: tuple[tuple[str, str], ...]  # (parent, leaf), fixed at creation
    outcomes: Mapping[str, Outcome]
    created_at: str
    updated_at: str

    @property
    def status(self) -> SessionStatus:
        if len(self.outcomes) == len(self.queue):
            return SessionStatus.COMPLETE
        return SessionStatus.ACTIVE

    @property
    def pending(self) -> tuple[tuple[str, str], ...]:
        return tuple((p, l) for p, l in self.queue if l not in self.outcomes)

    def parents_in_queue(self) -> list[str]:
        seen: list[str] = []
        for parent, _ in self.queue:
            if parent not in seen:
                seen.append(parent)
        return seen


def start_session(
    g: graphmod.KnowledgeGraph,
    desired: str,
    mode: Mode,
    *,
    session_id: Optional[str] = None,
    at: Optional[str] = None,
) -> AssessmentSession:
    """Create a session; an empty prerequisite queue is complete at birth."""
    if desired in g.containment:
        raise NotAParent(f"{desired!r} is a leaf skill, not a parent concept")
    if not g.is_parent(desired):
        raise UnknownNode(f"unknown concept {desired!r}")
    mode = Mode(mode)
    if mode is Mode.PREREQUISITE:
        parents = graphmod.prerequisites_of(g, desired)
    else:
        parents = [desired]
    queue = tuple(
        (parent, leaf) for parent in parents for leaf in graphmod.leaves_under(g, parent)
    )
    stamp = at if at is not None else utc_now()
    return AssessmentSession(
        id=session_id if session_id is not None else uuid.uuid4().hex,
        desired=desired,
        mode=mode,
        queue=queue,
        outcomes={},
        created_at=stamp,
        updated_at=stamp,
    )


def session_from_snapshot(
    session_id: str,
    desired: str,
    mode: str,
    queue: Sequence[Sequence[str]],
    created_at: str,
) -> AssessmentSession:
    """Rebuild a newborn session from a creation event's payload."""
    return AssessmentSession(
        id=session_id,
        desired=desired,
        mode=Mode(mode),
        queue=tuple((parent, leaf) for parent, leaf in queue),
        outcomes={},
        created_at=created_at,
        updated_at=created_at,
    )


def record_outcome(
    session: AssessmentSession,
    leaf: str,
    outcome: Outcome,
    *,
    at: Optional[str] = None,
) -> AssessmentSession:
    """Record one leaf's outcome; identical replays are accepted unchanged."""
    outcome = Outcome(outcome)
    queued = {l for _, l in session.queue}
    if leaf not in queued:
        raise LeafNotQueued(f"{leaf!r} is not queued in session {session.id}")
    existing = session.outcomes.get(leaf)
    if existing is outcome:
        return session
    if session.status is SessionStatus.COMPLETE:
        raise SessionComplete(f"session {session.id} is complete")
    if existing is not None:
        raise AlreadyRecordedDifferently(
            f"{leaf!r} already recorded as {existing.value} in session {session.id}"
        )
    outcomes = dict(session.outcomes)
    outcomes[leaf] = outcome
    return replace(
        session,
        outcomes=outcomes,
        updated_at=at if at is not None else utc_now(),
    )


@dataclass(frozen=True)
class QuizGrade:
    leaf: str
    outcome: Outcome
    correct: tuple[bool, ...]


def grade_quiz(g: graphmod.KnowledgeGraph, leaf: str, answers: Sequence[int]) -> QuizGrade:
    """Grade submitted answer indices; a pass requires every item correct."""
    if leaf not in g.containment:
        raise UnknownNode(f"unknown leaf {leaf!r}")
    items = g.quizzes.get(leaf)
    if not items:
        raise NoQuizDefined(f"no quiz recorded for {leaf!r}")
    if len(answers) != len(items):
        raise AnswerCountMismatch(
            f"{leaf!r} has {len(items)} item(s), got {len(answers)} answer(s)"
        )
    for item, answer in zip(items, answers):
        if not isinstance(answer, int) or isinstance(answer, bool) or not (
            0 <= answer < len(item.choices)
        ):
            raise IndexOutOfRange(f"answer {answer!r} outside the choices of {leaf!r}")
    correct = tuple(item.correct_index == answer for item, answer in zip(items, answers))
    outcome = Outcome.PASS if all(correct) else Outcome.FAIL
    return QuizGrade(leaf, outcome, correct)


def performance_by_parent(session: AssessmentSession) -> list[tuple[str, PerformanceVector]]:
    """Queue-ordered per-parent performance vectors of a complete session."""
    if session.status is not SessionStatus.COMPLETE:
        raise SessionNotComplete(f"session {session.id} still has pending leaves")
    grouped: list[tuple[str, PerformanceVector]] = []
    for parent in session.parents_in_queue():
        entries = tuple(
            (leaf, session.outcomes[leaf]) for p, leaf in session.queue if p == parent
        )
        grouped.append((parent, PerformanceVector(entries)))
    return grouped


def finalize(g: graphmod.KnowledgeGraph, session: AssessmentSession) -> Recommendation:
    """Recommendation for a complete session.

    All queued outcomes are pooled into a single performance vector. A clean
    run progresses: to the desired concept itself in prerequisite mode (the
    prerequisites are settled, the desired material can start), and to the
    next-higher concept in direct mode (the desired material is already
    mastered). Any fail yields a relearn list with the pooled fail weight and
    each assessed parent's own fail weight.
    """
    if session.status is not SessionStatus.COMPLETE:
        raise SessionNotComplete(f"session {session.id} still has pending leaves")
    if not session.queue:
        # Nothing to assess: the desired concept has no prerequisites.
        return Progress(session.desired)
    pooled = PerformanceVector(
        tuple((leaf, session.outcomes[leaf]) for _, leaf in session.queue)
    )
    weight = fail_weight(pooled)
    if weight == 0:
        if session.mode is Mode.PREREQUISITE:
            return Progress(session.desired)
        target = graphmod.next_higher(g, session.desired)
        return Progress(target, curriculum_complete=target is None)
    per_parent = tuple(
        (parent, fail_weight(vector)) for parent, vector in performance_by_parent(session)
    )
    return Relearn(pooled.failed_leaves, weight, per_parent)
