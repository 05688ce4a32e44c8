"""Entropy and information-gain analytics over assessment episode records.

An episode record is one student's run over a set of skill attributes, each
taking one categorical feature value, plus a Pass/Fail outcome label. Values
are bits (log base 2); the 0 * log2(0) term is taken as 0 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyCounts, EmptyDataset, UnknownAttribute, UnknownFeature
from .probability import Outcome

__all__ = [
    "LabelCounts",
    "Episode",
    "EpisodeDataset",
    "AttributeGain",
    "GainReport",
    "entropy",
    "weighted_feature_entropy",
    "info_gain",
    "split_info",
    "gain_ratio",
    "gain_report",
]


@dataclass(frozen=True)
class LabelCounts:
    pass_count: int
    fail_count: int

    def __post_init__(self):
        if self.pass_count < 0 or self.fail_count < 0:
            raise ValueError("label counts must be non-negative")

    @property
    def total(self) -> int:
        return self.pass_count + self.fail_count


@dataclass(frozen=True)
class Episode:
    features: Mapping[str, str]
    label: Outcome


@dataclass(frozen=True)
class EpisodeDataset:
    attributes: tuple[str, ...]
    feature_domains: Mapping[str, tuple[str, ...]]
    records: tuple[Episode, ...]

    def __post_init__(self):
        if not self.records:
            raise EmptyDataset("a dataset needs at least one record")
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError("attribute names must be distinct")
        for episode in self.records:
            if set(episode.features) != set(self.attributes):
                raise ValueError("every record must supply exactly the dataset attributes")
            for attribute in self.attributes:
                if episode.features[attribute] not in self.feature_domains[attribute]:
                    raise ValueError(
                        f"feature {episode.features[attribute]!r} outside the "
                        f"domain of {attribute!r}"
                    )

    @classmethod
    def from_records(
        cls,
        attributes: Sequence[str],
        records: Iterable[tuple[Mapping[str, str], Outcome]],
    ) -> "EpisodeDataset":
        """Build a dataset, deriving each attribute's domain from the data.

        Domains are sorted so that reports and tree branches come out in a
        deterministic order.
        """
        episodes = tuple(Episode(dict(features), label) for features, label in records)
        if not episodes:
            raise EmptyDataset("a dataset needs at least one record")
        domains = {
            attribute: tuple(
                sorted({e.features[attribute] for e in episodes if attribute in e.features})
            )
            for attribute in attributes
        }
        return cls(tuple(attributes), domains, episodes)

    def label_counts(self) -> LabelCounts:
        passes = sum(1 for e in self.records if e.label is Outcome.PASS)
        return LabelCounts(passes, len(self.records) - passes)

    def matching(self, attribute: str, feature: str) -> list[Episode]:
        self._check_attribute(attribute)
        if feature not in self.feature_domains[attribute]:
            raise UnknownFeature(f"{feature!r} is not a feature of {attribute!r}")
        return [e for e in self.records if e.features[attribute] == feature]

    def _check_attribute(self, attribute: str) -> None:
        if attribute not in self.attributes:
            raise UnknownAttribute(f"unknown attribute {attribute!r}")


def entropy(counts: LabelCounts) -> float:
    """Shannon entropy of a Pass/Fail split, in bits."""
    if counts.total == 0:
        raise EmptyCounts("entropy of zero outcomes is undefined")
    value = 0.0
    for part in (counts.pass_count, counts.fail_count):
        if part:
            p = part / counts.total
            value -= p * math.log2(p)
    return value


def _label_counts(records: Sequence[Episode]) -> LabelCounts:
    passes = sum(1 for e in records if e.label is Outcome.PASS)
    return LabelCounts(passes, len(records) - passes)


def weighted_feature_entropy(d: EpisodeDataset, attribute: str, feature: str) -> float:
    """Entropy of the records matching one feature, scaled by their share."""
    matching = d.matching(attribute, feature)
    if not matching:
        return 0.0
    return len(matching) / len(d.records) * entropy(_label_counts(matching))


def info_gain(d: EpisodeDataset, attribute: str) -> float:
    """Dataset entropy minus the weighted entropies of the split."""
    d._check_attribute(attribute)
    total = entropy(d.label_counts())
    spent = sum(weighted_feature_entropy(d, attribute, f) for f in d.feature_domains[attribute])
    return total - spent


def split_info(d: EpisodeDataset, attribute: str) -> float:
    """Entropy of the split's subset sizes (non-empty features only)."""
    d._check_attribute(attribute)
    n = len(d.records)
    value = 0.0
    for feature in d.feature_domains[attribute]:
        size = sum(1 for e in d.records if e.features[attribute] == feature)
        if size:
            value -= size / n * math.log2(size / n)
    return value


def gain_ratio(d: EpisodeDataset, attribute: str) -> float:
    """info_gain normalized by split_info; 0 when the split does not divide."""
    si = split_info(d, attribute)
    if si == 0:
        return 0.0
    return info_gain(d, attribute) / si


@dataclass(frozen=True)
class AttributeGain:
    info_gain: float
    split_info: float
    gain_ratio: float
    per_feature: Mapping[str, float]


@dataclass(frozen=True)
class GainReport:
    dataset_entropy: float
    per_attribute: Mapping[str, AttributeGain]

    def to_dict(self, display: bool = False) -> dict:
        """Plain-dict form; display mode rounds bits to 4 decimals."""

        def fmt(x: float):
            return round(x, 4) if display else x

        return {
            "dataset_entropy": fmt(self.dataset_entropy),
            "attributes": {
                attribute: {
                    "info_gain": fmt(gain.info_gain),
                    "split_info": fmt(gain.split_info),
                    "gain_ratio": fmt(gain.gain_ratio),
                    "features": {f: fmt(v) for f, v in gain.per_feature.items()},
                }
                for attribute, gain in self.per_attribute.items()
            },
        }


def gain_report(d: EpisodeDataset) -> GainReport:
    """Per-attribute gains and per-feature weighted entropies for a dataset."""
    per_attribute = {}
    for attribute in d.attributes:
        per_feature = {
            feature: weighted_feature_entropy(d, attribute, feature)
            for feature in d.feature_domains[attribute]
        }
        per_attribute[attribute] = AttributeGain(
            info_gain=info_gain(d, attribute),
            split_info=split_info(d, attribute),
            gain_ratio=gain_ratio(d, attribute),
            per_feature=per_feature,
        )
    return GainReport(entropy(d.label_counts()), per_attribute)
