"""Relation estimation between column pairs.

Entity-entity pairs count linked candidate pairs per row; entity-literal
pairs match the tail cell against the head candidates' attribute values
(normalized Levenshtein for text, relative difference for numbers) and
aggregate the ratios that clear the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernels
from .distributions import Distribution, combine, normalize
from .ingest import parse_number
from .kg import KnowledgeGraph


@dataclass
class ColumnPairRelations:
    """Relation distribution for one ordered (head, tail) column pair."""

    head: int
    tail: int
    kind: str  # "entity-entity" | "entity-literal"
    distribution: Distribution = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.distribution)


def literal_relevance(value: str | float, cell: str, datatype: str) -> float:
    """Relevance of a stored attribute value to a cell string, in [0, 1].

    The numerical path uses the relative difference
    1 - |c - v| / max(|c|, |v|) (both values zero scores 1), clamped at 0
    for opposite-sign pairs. If either side does not parse as a number the
    comparison falls back to normalized Levenshtein similarity.
    """
    if datatype == "numerical":
        stored = value if isinstance(value, (int, float)) else parse_number(str(value))
        cell_number = parse_number(cell)
        if stored is not None and cell_number is not None:
            stored = float(stored)
            denominator = max(abs(cell_number), abs(stored))
            if denominator == 0.0:
                return 1.0 if cell_number == stored else 0.0
            return max(0.0, 1.0 - abs(cell_number - stored) / denominator)
    return kernels.similarity(str(value).casefold(), cell.casefold())


def relation_entity_entity(
    head_candidates: list[Distribution],
    tail_candidates: list[Distribution],
    kg: KnowledgeGraph,
    head: int = -1,
    tail: int = -1,
) -> ColumnPairRelations:
    """Count rows whose candidate pairs are linked by each relation.

    A relation scores at most 1 per row no matter how many candidate pairs
    share it; row scores are summed and normalized.
    """
    counts: dict[str, float] = {}
    for head_dist, tail_dist in zip(head_candidates, tail_candidates):
        if not head_dist or not tail_dist:
            continue
        row_relations: set[str] = set()
        tail_set = tail_dist.keys()
        for head_entity in head_dist:
            for relation, object_entity in kg.outgoing(head_entity):
                if object_entity in tail_set:
                    row_relations.add(relation)
        for relation in row_relations:
            counts[relation] = counts.get(relation, 0.0) + 1.0
    return ColumnPairRelations(head, tail, "entity-entity", normalize(counts))


def relation_entity_literal(
    head_candidates: list[Distribution],
    tail_values: list[str],
    kg: KnowledgeGraph,
    beta: float,
    aggregation: str = "max",
    head: int = -1,
    tail: int = -1,
) -> ColumnPairRelations:
    """Match tail cells against head candidates' attributes.

    Only attribute comparisons scoring strictly above `beta` count. With
    "max" aggregation each (row, relation) contributes its best kept score
    once; "sum" adds every kept score.
    """
    totals: dict[str, float] = {}
    for head_dist, cell in zip(head_candidates, tail_values):
        if not head_dist or not cell:
            continue
        row_scores: dict[str, float] = {}
        for entity in head_dist:
            for attribute in kg.literal_attributes(entity):
                if attribute.kind == "numerical" and attribute.number is not None:
                    score = literal_relevance(attribute.number, cell, "numerical")
                else:
                    score = literal_relevance(attribute.lexical, cell, "textual")
                if score > beta:
                    if aggregation == "sum":
                        row_scores[attribute.relation] = (
                            row_scores.get(attribute.relation, 0.0) + score
                        )
                    else:
                        if score > row_scores.get(attribute.relation, 0.0):
                            row_scores[attribute.relation] = score
        for relation, score in row_scores.items():
            totals[relation] = totals.get(relation, 0.0) + score
    return ColumnPairRelations(head, tail, "entity-literal", normalize(totals))


def combine_numeric_relations(
    pr_el: Distribution,
    pr_num: Distribution,
    w5: float,
    w6: float,
    mode: str = "sum",
) -> Distribution:
    """Fuse value-matching and numeric-labeling relation distributions.

    Either side may be empty, in which case the other passes through
    unchanged (up to renormalization).
    """
    return combine([(pr_el, w5), (pr_num, w6)], mode=mode)
