"""Semantic labeling of numeric columns by distribution similarity.

Profiles of the graph's numeric attributes are ranked against a column's
values with the two-sample Kolmogorov-Smirnov statistic; column types are
then inferred from the ranked relations. The labeler is pluggable so a
learned similarity model can replace the KS ranker without touching
callers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .distributions import Distribution, normalize
from .kg import KnowledgeGraph

MIN_COLUMN_VALUES = 10
PROFILE_CAP = 10_000
DEFAULT_SEED = 13


@dataclass(frozen=True)
class NumericProfile:
    """Sorted sample of one relation's numeric attribute values."""

    relation: str
    sample: np.ndarray

    @property
    def size(self) -> int:
        return int(self.sample.shape[0])


@dataclass
class RelationRanking:
    """Ranked relations for one numeric column with raw and normalized scores."""

    column: int
    relations: list[str] = field(default_factory=list)
    scores: dict[str, float] = field(default_factory=dict)
    distribution: Distribution = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.relations)


def build_numeric_profiles(
    kg: KnowledgeGraph,
    cap: int = PROFILE_CAP,
    seed: int = DEFAULT_SEED,
) -> dict[str, NumericProfile]:
    """One profile per relation with at least one numeric literal.

    Values are deduplicated per (entity, relation, value); samples larger
    than `cap` are reservoir-sampled with the given seed so rebuilds are
    reproducible.
    """
    per_relation: dict[str, set[tuple[str, float]]] = {}
    for entity in sorted(kg.entities):
        for attribute in kg.literal_attributes(entity):
            if attribute.kind == "numerical" and attribute.number is not None:
                per_relation.setdefault(attribute.relation, set()).add(
                    (entity, attribute.number)
                )
    rng = random.Random(seed)
    profiles: dict[str, NumericProfile] = {}
    for relation in sorted(per_relation):
        values = [value for _, value in sorted(per_relation[relation])]
        if len(values) > cap:
            values = _reservoir(values, cap, rng)
        sample = np.sort(np.asarray(values, dtype=np.float64))
        profiles[relation] = NumericProfile(relation, sample)
    return profiles


def _reservoir(values: Sequence[float], cap: int, rng: random.Random) -> list[float]:
    reservoir = list(values[:cap])
    for index in range(cap, len(values)):
        slot = rng.randint(0, index)
        if slot < cap:
            reservoir[slot] = values[index]
    return reservoir


def ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample KS statistic; both arrays must be sorted."""
    everything = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, everything, side="right") / a.shape[0]
    cdf_b = np.searchsorted(b, everything, side="right") / b.shape[0]
    return float(np.max(np.abs(cdf_a - cdf_b)))


class NumericLabeler:
    """Interface: rank candidate relations for a column of numbers."""

    def rank_relations(self, values: Sequence[float], limit: int) -> list[str]:
        raise NotImplementedError


class KsNumericLabeler(NumericLabeler):
    """Rank profiles by ascending KS statistic against the column sample.

    Ties break on the smaller profile-size difference, then relation id.
    """

    def __init__(self, profiles: dict[str, NumericProfile]):
        self.profiles = profiles

    def rank_relations(self, values: Sequence[float], limit: int) -> list[str]:
        sample = np.sort(np.asarray(list(values), dtype=np.float64))
        n = sample.shape[0]
        keyed = []
        for relation in sorted(self.profiles):
            profile = self.profiles[relation]
            stat = ks_statistic(sample, profile.sample)
            keyed.append((stat, abs(profile.size - n), relation))
        keyed.sort()
        return [relation for _, _, relation in keyed[:limit]]


def label_numeric_column(
    values: Sequence[float],
    profiles: dict[str, NumericProfile],
    limit: int,
    column: int = -1,
    labeler: NumericLabeler | None = None,
) -> RelationRanking:
    """Rank relations for a numeric column; score is limit minus rank.

    Columns with fewer than MIN_COLUMN_VALUES values produce an empty
    ranking (the column contributes no numeric signal).
    """
    finite = [v for v in values if np.isfinite(v)]
    if len(finite) < MIN_COLUMN_VALUES or not profiles:
        return RelationRanking(column=column)
    if labeler is None:
        labeler = KsNumericLabeler(profiles)
    ranked = labeler.rank_relations(finite, limit)
    scores = {relation: float(limit - rank) for rank, relation in enumerate(ranked)}
    return RelationRanking(
        column=column,
        relations=ranked,
        scores=scores,
        distribution=normalize(scores),
    )


def infer_types_from_relations(
    rankings: RelationRanking | Iterable[RelationRanking],
    kg: KnowledgeGraph,
) -> Distribution:
    """Type distribution inferred from ranked numeric relations.

    Each type's raw score is the max raw score over contributing relations;
    normalization is joint over all rankings passed in, so handing in all
    of a table's numeric columns yields the table-wide distribution.
    """
    if isinstance(rankings, RelationRanking):
        rankings = [rankings]
    raw: dict[str, float] = {}
    for ranking in rankings:
        for relation, score in ranking.scores.items():
            for type_id in kg.types_for_relation(relation):
                if score > raw.get(type_id, 0.0):
                    raw[type_id] = score
    return normalize(raw)
