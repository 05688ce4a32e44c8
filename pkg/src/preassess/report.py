"""Checks the engine against the published reference values it was built from.

Each check recomputes one published figure from the bundled fixtures and
compares. Most reproduce exactly or to display rounding; a handful of
published impurity and gain cells do not follow from their own dataset under
any reading, so those are pinned to independently recomputed values and
reported as documented divergences rather than silently passing or failing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import dtree, graph as graphmod, infotheory, session as sessionmod
from .fmt import decimal4
from .probability import (
    GroupPerformance,
    PerformanceVector,
    Progress,
    aggregate_scheme_posterior,
    bayes_fail_posterior,
    complement,
    fail_weight,
    uniform_scheme_joints,
    weight_table,
)
from .store import bundled_fixture, parse_counts_csv, parse_episodes_csv

__all__ = ["Check", "run_report", "render_report"]

GRAPH_FIXTURE = "sql_ontology.json"
COHORT_FIXTURE = "cohort_counts.csv"
SINGLE_FIXTURE = "single_student_counts.csv"
EPISODES_FIXTURE = "episode_records.csv"

# Published weight-table rows, trimmed 2-decimal display.
PUBLISHED_WEIGHT_ROWS = {
    1: ["1", "0", "0", "1"],
    2: ["1", "0", "0.5", "0.5", "0", "1"],
    3: ["1", "0", "0.67", "0.33", "0.33", "0.67", "0", "1"],
    4: ["1", "0", "0.75", "0.25", "0.5", "0.5", "0.25", "0.75", "0", "1"],
    5: ["1", "0", "0.8", "0.2", "0.6", "0.4", "0.4", "0.6", "0.2", "0.8", "0", "1"],
    6: [
        "1", "0", "0.83", "0.17", "0.67", "0.33", "0.5", "0.5",
        "0.33", "0.67", "0.17", "0.83", "0", "1",
    ],
    7: [
        "1", "0", "0.86", "0.14", "0.71", "0.29", "0.57", "0.43",
        "0.43", "0.57", "0.29", "0.71", "0.14", "0.86", "0", "1",
    ],
}

# Published per-feature impurities that recompute cleanly from the episodes.
REPRODUCIBLE_IMPURITIES = {
    ("Select", "SelectOrderBy"): 0.0,
    ("Select", "SelectDistinct"): 0.3061,
    ("Select", "SelectWhere"): 0.0,
    ("Select", "SelectAll"): 0.0,
    ("Update", "UpdateSelect"): 0.3606,
    ("Update", "UpdateWhere"): 0.0,
    ("Join", "SelectJoin"): 0.0,
    ("Join", "FullOuterJoin"): 0.3606,
    ("Join", "InnerJoin"): 0.4444,
}

# Published cells that do not follow from the episode records; expectations
# here are pinned to direct recomputation (the published delete pair is the
# transpose of recomputation, the insert pair matches no reading at all).
DIVERGENT_IMPURITIES = {
    ("Delete", "DeleteSelect"): (0.306, 0.6122),
    ("Delete", "DeleteWhere"): (0.612, 0.3061),
    ("Insert", "InsertSelect"): (0.54, 0.3606),
    ("Insert", "InsertInto"): (0.306, 0.5394),
}
DIVERGENT_INFO_GAINS = {
    "Select": (1.219, 0.6122),
    "Insert": (0.738, 0.0183),
    "Delete": (1.225, 0.0),
    "Join": (0.834, 0.1133),
}

EXPECTED_TREE = {
    "attribute": "Update",
    "default_branch": "UpdateWhere",
    "branches": {
        "UpdateSelect": {"label": "Fail", "counts": {"pass": 1, "fail": 3}},
        "UpdateWhere": {"label": "Pass", "counts": {"pass": 5, "fail": 0}},
    },
}

ZERO_IMPURITY_FEATURES = {
    "SelectOrderBy", "SelectWhere", "SelectAll", "UpdateWhere", "SelectJoin",
}


@dataclass(frozen=True)
class Check:
    name: str
    published: str
    computed: str
    passed: bool
    divergence: bool = False
    note: str = ""

    @property
    def verdict(self) -> str:
        if not self.passed:
            return "FAIL"
        return "DIVERGES (documented)" if self.divergence else "MATCH"


def _match(name: str, published: str, computed, expected, note: str = "") -> Check:
    return Check(name, published, str(computed), computed == expected, note=note)


def _close(
    name: str,
    published: str,
    computed: float,
    expected: float,
    tol: float = 0.0005,
    divergence: bool = False,
    note: str = "",
) -> Check:
    return Check(
        name,
        published,
        decimal4(computed),
        abs(computed - expected) <= tol,
        divergence=divergence,
        note=note,
    )


def run_report() -> list[Check]:
    g = graphmod.load_graph(bundled_fixture(GRAPH_FIXTURE))
    cohort = parse_counts_csv(bundled_fixture(COHORT_FIXTURE))
    single = parse_counts_csv(bundled_fixture(SINGLE_FIXTURE))
    episodes = parse_episodes_csv(bundled_fixture(EPISODES_FIXTURE))
    report = infotheory.gain_report(episodes)
    checks: list[Check] = []

    # Complement and fail weights.
    checks.append(
        _match("complement of 3/4", "0.25", complement(Fraction(3, 4)), Fraction(1, 4))
    )
    checks.append(
        _match(
            "fail weight of FPPP",
            "0.25",
            fail_weight(PerformanceVector.from_string("FPPP")),
            Fraction(1, 4),
        )
    )
    checks.append(
        _match(
            "fail weight of PFF",
            "0.67",
            fail_weight(PerformanceVector.from_string("PFF")),
            Fraction(2, 3),
        )
    )
    checks.append(
        _match(
            "fail weight of a clean run (PPPP)",
            "0",
            fail_weight(PerformanceVector.from_string("PPPP")),
            Fraction(0),
        )
    )
    checks.append(
        _match(
            "fail weight of a failed run (FFF)",
            "1",
            fail_weight(PerformanceVector.from_string("FFF")),
            Fraction(1),
        )
    )

    # Uniform-scheme posterior: one select fail against two delete fails.
    gp = GroupPerformance(
        (
            ("select", PerformanceVector.from_string("FPPP")),
            ("delete", PerformanceVector.from_string("FFP")),
        )
    )
    posterior = bayes_fail_posterior(uniform_scheme_joints(gp))
    checks.append(
        _match("uniform posterior, the select fail", "0.33", posterior["select"], Fraction(1, 3))
    )

    # Aggregate posterior over the cohort counts.
    checks.append(
        _match(
            "cohort counts totals (pass/fail/all)",
            "88/24/112",
            f"{cohort.total_passes}/{cohort.total_fails}/{cohort.grand_total}",
            "88/24/112",
        )
    )
    checks.append(
        _match(
            "single-student counts totals (pass/fail/all)",
            "4/3/7",
            f"{single.total_passes}/{single.total_fails}/{single.grand_total}",
            "4/3/7",
        )
    )
    aggregate = aggregate_scheme_posterior(cohort, "deleteSelect")
    checks.append(
        _close(
            "aggregate posterior of deleteSelect (published arithmetic)",
            "0.78",
            float(aggregate),
            0.7951,
            note="the published 0.78 rounds its intermediate terms to 2 decimals",
        )
    )

    # Weight-table rows 1..7 at display rounding.
    def trim2(value: Fraction) -> str:
        text = f"{float(value):.2f}".rstrip("0").rstrip(".")
        return text if text else "0"

    rows = weight_table(7)
    computed_rows = {
        row.n: [text for pair in row.pairs for text in (trim2(pair[0]), trim2(pair[1]))]
        for row in rows
    }
    ok = computed_rows == PUBLISHED_WEIGHT_ROWS
    checks.append(
        Check(
            "weight-table rows n=1..7 (2-decimal display)",
            "16 published cells per longest row",
            "all rows reproduce" if ok else f"mismatch: {computed_rows}",
            ok,
        )
    )

    # Entropy and gains over the episode records.
    checks.append(
        _close(
            "episode outcome entropy (6 pass, 3 fail)",
            "0.918",
            report.dataset_entropy,
            0.9183,
        )
    )
    checks.append(
        _close(
            "Update info gain", "0.558", report.per_attribute["Update"].info_gain, 0.5577
        )
    )
    for (attribute, feature), expected in sorted(REPRODUCIBLE_IMPURITIES.items()):
        checks.append(
            _close(
                f"{feature} impurity",
                decimal4(expected),
                report.per_attribute[attribute].per_feature[feature],
                expected,
            )
        )

    zero_features = {
        feature
        for gain in report.per_attribute.values()
        for feature, value in gain.per_feature.items()
        if value == 0
    }
    checks.append(
        _match(
            "zero-impurity feature set",
            "SelectOrderBy, SelectWhere, SelectAll, UpdateWhere, SelectJoin",
            ", ".join(sorted(zero_features)),
            ", ".join(sorted(ZERO_IMPURITY_FEATURES)),
        )
    )

    # Cells the published table gets wrong; pinned to recomputation.
    for (attribute, feature), (published, expected) in sorted(DIVERGENT_IMPURITIES.items()):
        checks.append(
            _close(
                f"{feature} impurity",
                str(published),
                report.per_attribute[attribute].per_feature[feature],
                expected,
                divergence=True,
                note="published cell diverges from its own records; pinned to recomputation",
            )
        )
    for attribute, (published, expected) in sorted(DIVERGENT_INFO_GAINS.items()):
        checks.append(
            _close(
                f"{attribute} info gain",
                str(published),
                report.per_attribute[attribute].info_gain,
                expected,
                divergence=True,
                note="published cell diverges from its own records; pinned to recomputation",
            )
        )

    # Tree induction, structure and resubstitution accuracy.
    tree = dtree.build_tree(episodes, dtree.TrainConfig("gain_ratio", min_leaf=2))
    structure = dtree.tree_to_dict(tree)
    checks.append(
        Check(
            "gain-ratio tree structure (root and both leaves)",
            "Update root; UpdateSelect -> Fail 3F/1P; UpdateWhere -> Pass 5P",
            "same structure" if structure == EXPECTED_TREE else str(structure),
            structure == EXPECTED_TREE,
        )
    )
    matrix = dtree.evaluate(tree, episodes)
    checks.append(
        _match(
            "tree evaluation over all nine episodes",
            "8 correct, 1 misclassified",
            f"{matrix.correct} correct, {matrix.incorrect} misclassified",
            "8 correct, 1 misclassified",
        )
    )

    # Graph relations used by the worked assessment.
    checks.append(
        _match(
            "prerequisite closure of delete",
            "select, insert",
            ", ".join(graphmod.prerequisites_of(g, "delete")),
            "select, insert",
        )
    )
    checks.append(
        _match(
            "next-higher concept after delete", "update", graphmod.next_higher(g, "delete"), "update"
        )
    )

    # A clean direct-mode delete run progresses to update.
    state = sessionmod.start_session(g, "delete", sessionmod.Mode.DIRECT, session_id="report")
    for _, leaf in state.queue:
        state = sessionmod.record_outcome(state, leaf, "Pass")
    rec = sessionmod.finalize(g, state)
    checks.append(
        _match(
            "clean direct delete run",
            "progress to update",
            f"progress to {rec.target}" if isinstance(rec, Progress) else "relearn",
            "progress to update",
        )
    )

    return checks


def render_report(checks: list[Check]) -> str:
    name_width = max(len(c.name) for c in checks)
    published_width = max(len(c.published) for c in checks)
    lines = []
    for check in checks:
        mark = "ok" if check.passed else "FAIL"
        line = (
            f"[{mark:>4}] {check.name:<{name_width}}  "
            f"published {check.published:<{published_width}}  "
            f"computed {check.computed}  {check.verdict}"
        )
        if check.note:
            line += f"  ({check.note})"
        lines.append(line)
    total = len(checks)
    passed = sum(1 for c in checks if c.passed)
    divergences = sum(1 for c in checks if c.divergence)
    lines.append(
        f"{passed}/{total} checks passed, {divergences} documented divergences"
    )
    return "\n".join(lines)
