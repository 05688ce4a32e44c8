"""Exact-rational core: complement weights, fail posteriors, weight tables.

All probabilities here are ``fractions.Fraction`` values so that equalities
like fail_weight("FPPP") == 1/4 hold exactly; floats appear only at display
and serialization boundaries.

The central quantity is the *fail weight* of a performance vector: the
difference between certainty and the observed pass ratio, i.e. the share of
assessed leaf skills that were failed. A vector with no fails carries weight
0 (progress), a vector with no passes carries weight 1 (full relearn).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import graph as graphmod
from .errors import (
    AllZeroWeights,
    EmptyPerformance,
    LeafNotUnderParent,
    UnknownLeaf,
    ZeroDenominator,
)

__all__ = [
    "Probability",
    "Outcome",
    "PerformanceVector",
    "GroupPerformance",
    "PosteriorTable",
    "CountRow",
    "AggregateCounts",
    "WeightTableRow",
    "Progress",
    "Relearn",
    "Recommendation",
    "as_probability",
    "complement",
    "pass_weight",
    "fail_weight",
    "recommend",
    "bayes_fail_posterior",
    "uniform_scheme_joints",
    "aggregate_scheme_posterior",
    "weight_table",
    "weight_table_row",
]

# Probabilities are plain Fractions validated to [0, 1] at construction sites.
Probability = Fraction


def as_probability(value: Union[int, Fraction, str]) -> Fraction:
    """Coerce to an exact probability, rejecting values outside [0, 1]."""
    p = Fraction(value)
    if not 0 <= p <= 1:
        raise ValueError(f"probability out of range: {p}")
    return p


class Outcome(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"

    @property
    def letter(self) -> str:
        return "P" if self is Outcome.PASS else "F"

    @classmethod
    def from_letter(cls, letter: str) -> "Outcome":
        if letter == "P":
            return cls.PASS
        if letter == "F":
            return cls.FAIL
        raise ValueError(f"performance strings use only 'P' and 'F', got {letter!r}")


@dataclass(frozen=True)
class PerformanceVector:
    """Per-leaf assessment outcomes, in assessment order."""

    entries: tuple[tuple[str, Outcome], ...]

    def __post_init__(self):
        if not self.entries:
            raise EmptyPerformance("a performance vector needs at least one outcome")
        leaves = [leaf for leaf, _ in self.entries]
        if len(set(leaves)) != len(leaves):
            raise ValueError("performance vector leaves must be distinct")

    @classmethod
    def from_string(cls, text: str, leaves: Optional[Sequence[str]] = None) -> "PerformanceVector":
        """Build from a P/F string, index-aligned with ``leaves``.

        Without an explicit leaf list, positional names item1..itemN are used.
        """
        if not text:
            raise EmptyPerformance("empty performance string")
        outcomes = [Outcome.from_letter(c) for c in text]
        if leaves is None:
            leaves = [f"item{i + 1}" for i in range(len(outcomes))]
        if len(leaves) != len(outcomes):
            raise ValueError(
                f"performance string length {len(outcomes)} does not match "
                f"{len(leaves)} leaves"
            )
        return cls(tuple(zip(leaves, outcomes)))

    def to_string(self) -> str:
        return "".join(outcome.letter for _, outcome in self.entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def passes(self) -> int:
        return sum(1 for _, o in self.entries if o is Outcome.PASS)

    @property
    def fails(self) -> int:
        return self.n - self.passes

    @property
    def failed_leaves(self) -> tuple[str, ...]:
        return tuple(leaf for leaf, o in self.entries if o is Outcome.FAIL)


def complement(p: Union[Fraction, int]) -> Fraction:
    """The probability of the opposite event, 1 - p."""
    return 1 - as_probability(p)


def pass_weight(perf: PerformanceVector) -> Fraction:
    """Share of assessed leaves that were passed."""
    return Fraction(perf.passes, perf.n)


def fail_weight(perf: PerformanceVector) -> Fraction:
    """Share of assessed leaves that were failed: 1 - pass_weight."""
    return Fraction(perf.n - perf.passes, perf.n)


@dataclass(frozen=True)
class Progress:
    """Advance to ``target``; None with the flag set means nothing is left."""

    target: Optional[str]
    curriculum_complete: bool = False


@dataclass(frozen=True)
class Relearn:
    """Revisit ``leaves``; weights quantify how much relearning is due."""

    leaves: tuple[str, ...]
    weight: Fraction
    per_parent: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("a relearn recommendation requires weight > 0")


Recommendation = Union[Progress, Relearn]


def recommend(g: "graphmod.KnowledgeGraph", parent: str, perf: PerformanceVector) -> Recommendation:
    """Turn one parent's assessment into a progress or relearn decision."""
    under = set(graphmod.leaves_under(g, parent))
    for leaf, _ in perf.entries:
        if leaf not in under:
            raise LeafNotUnderParent(f"{leaf!r} is not a leaf of {parent!r}")
    weight = fail_weight(perf)
    if weight == 0:
        target = graphmod.next_higher(g, parent)
        return Progress(target, curriculum_complete=target is None)
    return Relearn(perf.failed_leaves, weight, ((parent, weight),))


@dataclass(frozen=True)
class GroupPerformance:
    """Performance vectors for several parents assessed together."""

    groups: tuple[tuple[str, PerformanceVector], ...]

    def __post_init__(self):
        if not self.groups:
            raise EmptyPerformance("no groups")
        parents = [p for p, _ in self.groups]
        if len(set(parents)) != len(parents):
            raise ValueError("group parents must be distinct")


@dataclass(frozen=True)
class PosteriorTable:
    """Normalized fail posteriors; entries keep the caller's target order."""

    entries: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        for target, weight in self.entries:
            if not 0 <= weight <= 1:
                raise ValueError(f"posterior for {target!r} out of [0, 1]: {weight}")

    def __getitem__(self, target: str) -> Fraction:
        for name, weight in self.entries:
            if name == target:
                return weight
        raise KeyError(target)


def bayes_fail_posterior(joints: Iterable[tuple[str, Fraction]]) -> PosteriorTable:
    """Normalize joint fail weights into a posterior over targets.

    Each posterior is its joint weight divided by the sum of all joint
    weights; the answer to "given a fail, which target does it point at".
    """
    items = [(target, Fraction(weight)) for target, weight in joints]
    if not items:
        raise EmptyPerformance("no joint weights")
    for target, weight in items:
        if weight < 0:
            raise ValueError(f"negative joint weight for {target!r}")
    total = sum(weight for _, weight in items)
    if total == 0:
        raise AllZeroWeights("all joint weights are zero")
    return PosteriorTable(tuple((target, weight / total) for target, weight in items))


def uniform_scheme_joints(gp: GroupPerformance) -> list[tuple[str, Fraction]]:
    """Joint fail weights under a uniform prior over the assessed groups.

    Each group's joint weight is (1 / number of groups) times its fail count
    over the total outcome count pooled across all groups.
    """
    k = len(gp.groups)
    total = sum(perf.n for _, perf in gp.groups)
    return [(parent, Fraction(1, k) * Fraction(perf.fails, total)) for parent, perf in gp.groups]


@dataclass(frozen=True)
class CountRow:
    parent: str
    leaf: str
    pass_count: int
    fail_count: int

    def __post_init__(self):
        if self.pass_count < 0 or self.fail_count < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.pass_count + self.fail_count


@dataclass(frozen=True)
class AggregateCounts:
    """Per-leaf pass/fail tallies grouped by parent; totals are derived."""

    rows: tuple[CountRow, ...]

    def __post_init__(self):
        if not self.rows:
            raise EmptyPerformance("no count rows")
        keys = [(r.parent, r.leaf) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (parent, leaf) row")

    def parents(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.parent not in seen:
                seen.append(row.parent)
        return seen

    def group_rows(self, parent: str) -> list[CountRow]:
        return [r for r in self.rows if r.parent == parent]

    def group_total(self, parent: str) -> int:
        return sum(r.total for r in self.group_rows(parent))

    def group_fails(self, parent: str) -> int:
        return sum(r.fail_count for r in self.group_rows(parent))

    @property
    def grand_total(self) -> int:
        return sum(r.total for r in self.rows)

    @property
    def total_fails(self) -> int:
        return sum(r.fail_count for r in self.rows)

    @property
    def total_passes(self) -> int:
        return sum(r.pass_count for r in self.rows)

    def find_leaf(self, leaf: str) -> CountRow:
        matches = [r for r in self.rows if r.leaf == leaf]
        if not matches:
            raise UnknownLeaf(f"no count row for leaf {leaf!r}")
        if len(matches) > 1:
            raise ValueError(f"leaf {leaf!r} appears under several parents")
        return matches[0]


def aggregate_scheme_posterior(
    counts: AggregateCounts, target_leaf: str, scheme: str = "paper"
) -> Fraction:
    """Posterior that a fail points at ``target_leaf``, from cohort counts.

    Priors are group shares of the grand total. The default scheme keeps the
    published arithmetic verbatim: the target's likelihood is its fail share
    *within its own group*, while the normalizing sum uses each group's fail
    share of *all* fails. The "consistent" scheme uses the all-fails
    denominator on both sides.
    """
    if scheme not in ("paper", "consistent"):
        raise ValueError(f"unknown scheme {scheme!r}")
    row = counts.find_leaf(target_leaf)
    total_fails = counts.total_fails
    if total_fails == 0:
        raise ZeroDenominator("no fails anywhere in the counts")
    grand = counts.grand_total
    denominator = sum(
        (
            Fraction(counts.group_total(p), grand)
            * Fraction(counts.group_fails(p), total_fails)
            for p in counts.parents()
        ),
        Fraction(0),
    )
    if row.fail_count == 0:
        return Fraction(0)
    if scheme == "paper":
        likelihood = Fraction(row.fail_count, counts.group_fails(row.parent))
    else:
        likelihood = Fraction(row.fail_count, total_fails)
    numerator = Fraction(counts.group_total(row.parent), grand) * likelihood
    return numerator / denominator


@dataclass(frozen=True)
class WeightTableRow:
    """All (pass, fail) weight pairs for an assessment of ``n`` leaves."""

    n: int
    pairs: tuple[tuple[Fraction, Fraction], ...]


def weight_table_row(n: int) -> WeightTableRow:
    """The (pass, fail) weight pairs for an assessment of ``n`` leaves."""
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= 10000:
        raise ValueError("n must be an integer in 1..10000")
    pairs = tuple((Fraction(n - fails, n), Fraction(fails, n)) for fails in range(n + 1))
    return WeightTableRow(n, pairs)


def weight_table(n_max: int) -> list[WeightTableRow]:
    """Rows n = 1..n_max; row n lists (pass, fail) weights for 0..n fails."""
    if not isinstance(n_max, int) or isinstance(n_max, bool) or not 1 <= n_max <= 10000:
        raise ValueError("n_max must be an integer in 1..10000")
    return [weight_table_row(n) for n in range(1, n_max + 1)]
