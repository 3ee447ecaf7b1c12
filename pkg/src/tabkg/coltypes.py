"""Column classification and type-signal aggregation.

Columns are split into entity and literal columns by majority vote over
the per-cell tags; entity columns then collect four type signals (numeric
labeling, lookup types, tagger votes, header match) which are thresholded
and fused into one type distribution per column.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import kernels
from .distributions import Distribution, combine, normalize, threshold
from .ingest import MAPPABLE_TAGS, CellContext, Table
from .kg import KnowledgeGraph

HEADER_SIMILARITY_FLOOR = 0.5


@dataclass(frozen=True)
class ColumnClass:
    column: int
    kind: str  # "entity" | "literal"
    literal_subkind: str | None = None


@dataclass
class TypeSignalBundle:
    """The four per-column type signals with their weights and threshold."""

    s1: Distribution  # from numeric-column labeling
    s2: Distribution  # from lookup candidate types
    s3: Distribution  # from tagger class votes
    s4: Distribution  # from header match
    weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    beta: float = 0.5


def _cell_vote(context: CellContext) -> str | None:
    """One vote per cell: "entity", "text", or a literal data-type tag."""
    if not context.value:
        return None
    if context.entity_type in MAPPABLE_TAGS:
        return "entity"
    if context.datatype == "text":
        return "text"
    return context.datatype


def classify_columns(table: Table) -> list[ColumnClass]:
    """Majority vote over data-row tags; ties favor the entity kind.

    Entity-denoting votes ("entity" and "text") pool together, so a column
    is literal only when one literal tag strictly outvotes them.
    """
    classes: list[ColumnClass] = []
    for col in range(table.n_cols):
        votes = Counter()
        for row in table.data_rows():
            vote = _cell_vote(table.contexts[row][col])
            if vote is not None:
                votes[vote] += 1
        entityish = votes.get("entity", 0) + votes.get("text", 0)
        literal_votes = {
            tag: count for tag, count in votes.items() if tag not in ("entity", "text")
        }
        best_literal = max(literal_votes.values(), default=0)
        if best_literal > entityish:
            tag = min(t for t, c in literal_votes.items() if c == best_literal)
            subkind = "numerical" if tag == "number" else tag
            classes.append(ColumnClass(col, "literal", subkind))
        else:
            classes.append(ColumnClass(col, "entity"))
    return classes


def signal_lookup_types(
    cell_distributions: list[Distribution],
    kg: KnowledgeGraph,
) -> Distribution:
    """Types aggregated from every cell's entity-candidate distribution."""
    raw: dict[str, float] = {}
    for dist in cell_distributions:
        for entity, probability in dist.items():
            for type_id in kg.types_of(entity):
                raw[type_id] = raw.get(type_id, 0.0) + probability
    return normalize(raw)


def signal_ner_types(contexts: list[CellContext]) -> Distribution:
    """Vote share of the tagger's mapped classes across a column's cells."""
    votes: dict[str, float] = {}
    for context in contexts:
        for class_id in context.mapped_classes:
            votes[class_id] = votes.get(class_id, 0.0) + 1.0
    return normalize(votes)


def signal_header_types(header: str, kg: KnowledgeGraph) -> Distribution:
    """Classes whose labels resemble the header value (similarity >= 0.5)."""
    header = header.strip().casefold()
    if not header:
        return {}
    raw: dict[str, float] = {}
    for class_id in kg.classes:
        best = 0.0
        for label in kg.class_labels(class_id):
            sim = kernels.similarity(header, label.casefold())
            if sim > best:
                best = sim
        if best >= HEADER_SIMILARITY_FLOOR:
            raw[class_id] = best
    return normalize(raw)


def aggregate_type_signals(bundle: TypeSignalBundle, mode: str = "sum") -> Distribution:
    """Threshold each signal at beta, drop emptied signals, fuse the rest."""
    surviving = [
        (threshold(signal, bundle.beta), weight)
        for signal, weight in zip(
            (bundle.s1, bundle.s2, bundle.s3, bundle.s4), bundle.weights
        )
    ]
    return combine(surviving, mode=mode)
