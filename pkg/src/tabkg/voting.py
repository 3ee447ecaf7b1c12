"""Final annotation selection: CEA argmax, CTA/CPA majority re-voting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .distributions import Distribution
from .kg import KnowledgeGraph
from .relations import ColumnPairRelations, literal_relevance


@dataclass
class AnnotationSet:
    """Final annotations for one table, addressed by zero-based coordinates."""

    table_id: str
    cea: dict[tuple[int, int], str] = field(default_factory=dict)  # (row, col) -> entity
    cta: dict[int, list[str]] = field(default_factory=dict)  # col -> classes, specific first
    cpa: dict[tuple[int, int], str] = field(default_factory=dict)  # (head, tail) -> relation


def finalize_cea(final: Distribution, lookup: Distribution) -> str | None:
    """Argmax entity; ties break on the lookup probability, then entity id."""
    if not final:
        return None
    return min(final, key=lambda e: (-final[e], -lookup.get(e, 0.0), e))


def _exact_then_ancestors(type_id: str, kg: KnowledgeGraph) -> list[str]:
    ancestors = sorted(kg.ancestors(type_id), key=lambda c: (-kg.class_depth(c), c))
    return [type_id] + ancestors


def _most_specific(candidates: list[str], kg: KnowledgeGraph) -> str:
    return min(candidates, key=lambda c: (-kg.class_depth(c), c))


def revote_cta(
    winners: list[str | None],
    kg: KnowledgeGraph,
    fallback: Distribution | None = None,
    weights: list[float] | None = None,
) -> list[str]:
    """Majority vote over the winning entities' asserted types.

    Votes tally direct types only (counting ancestors would always crown a
    root class in mixed columns); the exact type is the deepest class among
    the vote leaders, followed by its ancestors toward the root. Without
    any votes the column falls back to the step-3 type distribution. With
    `weights` each winner's vote counts that much instead of 1.
    """
    votes: Counter = Counter()
    for index, winner in enumerate(winners):
        if winner is None:
            continue
        weight = 1.0 if weights is None else weights[index]
        if weight <= 0.0:
            continue
        for type_id in kg.direct_types_of(winner):
            votes[type_id] += weight
    if votes:
        top = max(votes.values())
        leaders = [type_id for type_id, count in votes.items() if count == top]
        return _exact_then_ancestors(_most_specific(leaders, kg), kg)
    if fallback:
        top_p = max(fallback.values())
        leaders = [t for t, p in fallback.items() if p == top_p]
        return _exact_then_ancestors(_most_specific(leaders, kg), kg)
    return []


def revote_cpa(
    row_pairs: list[tuple[str | None, str | None]],
    step4: ColumnPairRelations,
    kg: KnowledgeGraph,
    beta: float = 0.5,
    weights: list[float] | None = None,
) -> str | None:
    """Majority vote over relations between per-row winners.

    Entity-entity pairs vote the relations linking the two winners;
    entity-literal pairs vote the winner's attribute relations whose
    relevance to the tail cell clears `beta`. Vote ties and vote-less
    pairs fall back to the step-4 distribution argmax. With `weights`
    each row's vote counts that much instead of 1.
    """
    votes: Counter = Counter()
    for index, (head_winner, tail) in enumerate(row_pairs):
        if head_winner is None:
            continue
        weight = 1.0 if weights is None else weights[index]
        if weight <= 0.0:
            continue
        if step4.kind == "entity-entity":
            if tail is None:
                continue
            for relation in kg.relations_between(head_winner, tail):
                votes[relation] += weight
        else:
            cell = tail or ""
            if not cell:
                continue
            kept: set[str] = set()
            for attribute in kg.literal_attributes(head_winner):
                if attribute.kind == "numerical" and attribute.number is not None:
                    score = literal_relevance(attribute.number, cell, "numerical")
                else:
                    score = literal_relevance(attribute.lexical, cell, "textual")
                if score > beta:
                    kept.add(attribute.relation)
            for relation in kept:
                votes[relation] += weight
    if votes:
        top = max(votes.values())
        leaders = sorted(r for r, count in votes.items() if count == top)
        if len(leaders) == 1:
            return leaders[0]
    if step4.distribution:
        top_p = max(step4.distribution.values())
        return min(r for r, p in step4.distribution.items() if p == top_p)
    if votes:
        # tie among voters and no step-4 distribution: deterministic first
        top = max(votes.values())
        return min(r for r, count in votes.items() if count == top)
    return None
