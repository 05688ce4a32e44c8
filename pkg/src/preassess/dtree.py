"""Categorical decision-tree induction over episode datasets.

Splits are chosen greedily by info gain or gain ratio. An attribute is an
admissible split only if it yields at least ``min_admissible_branches``
non-empty child subsets of at least ``min_leaf`` records; this is the only
pruning rule. Tie-breaks are deterministic: criterion ties fall back to the
dataset's attribute order, default branches prefer the largest child subset
and then the lexicographically smallest feature, and leaf label ties go to
Fail (the cautious call for an assessment).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .errors import DegenerateSplit, EmptyDataset, MissingAttribute
from .infotheory import Episode, EpisodeDataset, LabelCounts, gain_ratio, info_gain
from .probability import Outcome

__all__ = [
    "Leaf",
    "Internal",
    "DecisionTree",
    "TrainConfig",
    "SplitSpec",
    "ConfusionMatrix",
    "TreeClassifier",
    "build_tree",
    "classify",
    "evaluate",
    "split_dataset",
    "tree_to_dict",
    "tree_from_dict",
    "render_tree",
]


@dataclass(frozen=True)
class Leaf:
    label: Outcome
    counts: LabelCounts


@dataclass(frozen=True)
class Internal:
    attribute: str
    branches: Mapping[str, "TreeNode"]
    default_branch: str


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode


@dataclass(frozen=True)
class TrainConfig:
    criterion: str = "gain_ratio"
    min_leaf: int = 2
    min_admissible_branches: int = 2

    def __post_init__(self):
        if self.criterion not in ("info_gain", "gain_ratio"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.min_leaf < 1 or self.min_admissible_branches < 2:
            raise ValueError("min_leaf >= 1 and min_admissible_branches >= 2 required")


def _leaf(counts: LabelCounts) -> Leaf:
    if counts.pass_count > counts.fail_count:
        label = Outcome.PASS
    else:
        label = Outcome.FAIL
    return Leaf(label, counts)


def _counts(records: Sequence[Episode]) -> LabelCounts:
    passes = sum(1 for e in records if e.label is Outcome.PASS)
    return LabelCounts(passes, len(records) - passes)


def _partition(records: Sequence[Episode], attribute: str) -> dict[str, list[Episode]]:
    parts: dict[str, list[Episode]] = {}
    for episode in records:
        parts.setdefault(episode.features[attribute], []).append(episode)
    return parts


def _subdataset(d: EpisodeDataset, records: Sequence[Episode]) -> EpisodeDataset:
    # Domains stay the full dataset's; absent features contribute nothing.
    return EpisodeDataset(d.attributes, d.feature_domains, tuple(records))


def _grow(
    d: EpisodeDataset,
    records: Sequence[Episode],
    available: Sequence[str],
    cfg: TrainConfig,
) -> TreeNode:
    counts = _counts(records)
    if counts.pass_count == 0 or counts.fail_count == 0 or not available:
        return _leaf(counts)

    subset = _subdataset(d, records)
    criterion = info_gain if cfg.criterion == "info_gain" else gain_ratio
    best: Optional[tuple[str, dict[str, list[Episode]], float]] = None
    for attribute in available:  # dataset order; strict > keeps it on ties
        parts = _partition(records, attribute)
        qualifying = sum(1 for rs in parts.values() if len(rs) >= cfg.min_leaf)
        if qualifying < cfg.min_admissible_branches:
            continue
        score = criterion(subset, attribute)
        if best is None or score > best[2]:
            best = (attribute, parts, score)
    if best is None:
        return _leaf(counts)

    attribute, parts, _ = best
    remaining = [a for a in available if a != attribute]
    branches = {
        feature: _grow(d, parts[feature], remaining, cfg)
        for feature in sorted(parts)
    }
    default = max(sorted(parts), key=lambda f: len(parts[f]))
    return Internal(attribute, branches, default)


def build_tree(d: EpisodeDataset, cfg: TrainConfig = TrainConfig()) -> DecisionTree:
    """Induce a tree over the full dataset."""
    if not d.records:
        raise EmptyDataset("cannot induce a tree from zero records")
    return DecisionTree(_grow(d, d.records, list(d.attributes), cfg))


def classify(t: DecisionTree, features: Mapping[str, str]) -> Outcome:
    """Descend to a leaf; unseen feature values follow the default branch."""
    node = t.root
    while isinstance(node, Internal):
        if node.attribute not in features:
            raise MissingAttribute(f"record lacks attribute {node.attribute!r}")
        child = node.branches.get(features[node.attribute])
        if child is None:
            child = node.branches[node.default_branch]
        node = child
    return node.label


@dataclass(frozen=True)
class ConfusionMatrix:
    pass_as_pass: int = 0
    pass_as_fail: int = 0
    fail_as_pass: int = 0
    fail_as_fail: int = 0

    @property
    def total(self) -> int:
        return self.pass_as_pass + self.pass_as_fail + self.fail_as_pass + self.fail_as_fail

    @property
    def correct(self) -> int:
        return self.pass_as_pass + self.fail_as_fail

    @property
    def incorrect(self) -> int:
        return self.total - self.correct

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            return 0.0
        return self.correct / self.total

    def to_dict(self) -> dict:
        return {
            "pass_as_pass": self.pass_as_pass,
            "pass_as_fail": self.pass_as_fail,
            "fail_as_pass": self.fail_as_pass,
            "fail_as_fail": self.fail_as_fail,
            "correct": self.correct,
            "incorrect": self.incorrect,
            "accuracy": self.accuracy,
        }


def evaluate(t: DecisionTree, d: Union[EpisodeDataset, Sequence[Episode]]) -> ConfusionMatrix:
    """Confusion matrix of the tree over a dataset or plain record sequence."""
    records = d.records if isinstance(d, EpisodeDataset) else d
    cells = {"pp": 0, "pf": 0, "fp": 0, "ff": 0}
    for episode in records:
        predicted = classify(t, episode.features)
        if episode.label is Outcome.PASS:
            cells["pp" if predicted is Outcome.PASS else "pf"] += 1
        else:
            cells["fp" if predicted is Outcome.PASS else "ff"] += 1
    return ConfusionMatrix(cells["pp"], cells["pf"], cells["fp"], cells["ff"])


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie strictly between 0 and 1")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def split_dataset(d: EpisodeDataset, spec: SplitSpec) -> tuple[EpisodeDataset, EpisodeDataset]:
    """Seeded shuffle split: indices are shuffled with random.Random(seed)
    and the first ceil(train_fraction * n) records form the train set."""
    n = len(d.records)
    indices = list(range(n))
    random.Random(spec.seed).shuffle(indices)
    cut = math.ceil(spec.train_fraction * n)
    train_idx, test_idx = indices[:cut], indices[cut:]
    if not train_idx or not test_idx:
        raise DegenerateSplit(f"cannot split {n} record(s) at fraction {spec.train_fraction}")
    def pick(idx: Sequence[int]) -> EpisodeDataset:
        return EpisodeDataset.from_records(
            d.attributes, [(d.records[i].features, d.records[i].label) for i in idx]
        )

    return pick(train_idx), pick(test_idx)


def tree_to_dict(t: DecisionTree) -> dict:
    def walk(node: TreeNode) -> dict:
        if isinstance(node, Leaf):
            return {
                "label": node.label.value,
                "counts": {"pass": node.counts.pass_count, "fail": node.counts.fail_count},
            }
        return {
            "attribute": node.attribute,
            "default_branch": node.default_branch,
            "branches": {feature: walk(child) for feature, child in node.branches.items()},
        }

    return walk(t.root)


def tree_from_dict(doc: dict) -> DecisionTree:
    def walk(node: dict) -> TreeNode:
        if "label" in node:
            counts = node.get("counts", {})
            return Leaf(
                Outcome(node["label"]),
                LabelCounts(counts.get("pass", 0), counts.get("fail", 0)),
            )
        return Internal(
            node["attribute"],
            {feature: walk(child) for feature, child in node["branches"].items()},
            node["default_branch"],
        )

    return DecisionTree(walk(doc))


def render_tree(t: DecisionTree) -> str:
    """Indented plain-text rendering of the tree."""
    lines: list[str] = []

    def walk(node: TreeNode, prefix: str) -> None:
        if isinstance(node, Leaf):
            lines.append(
                f"{prefix}-> {node.label.value} "
                f"({node.counts.pass_count} Pass / {node.counts.fail_count} Fail)"
            )
            return
        for feature, child in node.branches.items():
            lines.append(f"{prefix}{node.attribute} = {feature}:")
            walk(child, prefix + "  ")

    walk(t.root, "")
    return "\n".join(lines)


class TreeClassifier:
    """Estimator-style front to build_tree/classify.

    Duck-types the common estimator protocol (fit/predict/score and
    get_params/set_params) so it drops into pipelines and clone-based tools.
    X is a sequence of feature mappings, or a 2-D sequence of feature values
    combined with the ``attributes`` parameter; y holds "Pass"/"Fail" labels.
    """

    def __init__(
        self,
        criterion: str = "gain_ratio",
        min_leaf: int = 2,
        min_admissible_branches: int = 2,
        attributes: Optional[Sequence[str]] = None,
    ):
        self.criterion = criterion
        self.min_leaf = min_leaf
        self.min_admissible_branches = min_admissible_branches
        self.attributes = attributes

    def get_params(self, deep: bool = True) -> dict:
        return {
            "criterion": self.criterion,
            "min_leaf": self.min_leaf,
            "min_admissible_branches": self.min_admissible_branches,
            "attributes": self.attributes,
        }

    def set_params(self, **params) -> "TreeClassifier":
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def _rows(self, X) -> list[dict]:
        rows = list(X)
        if rows and isinstance(rows[0], Mapping):
            return [dict(row) for row in rows]
        if self.attributes is not None:
            names = list(self.attributes)
        else:
            width = len(rows[0]) if rows else 0
            names = [f"attribute_{i}" for i in range(width)]
        out = []
        for row in rows:
            values = list(row)
            if len(values) != len(names):
                raise ValueError("row width does not match the attribute names")
            out.append({name: str(v) for name, v in zip(names, values)})
        return out

    def fit(self, X, y) -> "TreeClassifier":
        rows = self._rows(X)
        labels = [Outcome(str(label)) for label in y]
        if len(rows) != len(labels):
            raise ValueError("X and y lengths differ")
        if not rows:
            raise EmptyDataset("cannot fit on zero records")
        names = list(rows[0].keys())
        dataset = EpisodeDataset.from_records(names, list(zip(rows, labels)))
        cfg = TrainConfig(self.criterion, self.min_leaf, self.min_admissible_branches)
        self.tree_ = build_tree(dataset, cfg)
        self.attribute_names_ = tuple(names)
        return self

    def predict(self, X) -> list[str]:
        if not hasattr(self, "tree_"):
            raise ValueError("classifier is not fitted")
        return [classify(self.tree_, row).value for row in self._rows(X)]

    def score(self, X, y) -> float:
        predictions = self.predict(X)
        truth = [Outcome(str(label)).value for label in y]
        if not truth:
            return 0.0
        return sum(p == t for p, t in zip(predictions, truth)) / len(truth)
