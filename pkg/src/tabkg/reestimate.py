"""Entity candidate re-estimation.

Each cell's lookup candidates are re-scored by fusing the lookup
distribution with column-type consistency, label string similarity
(including abbreviation heuristics) and row-context agreement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import kernels
from .distributions import Distribution, combine, normalize
from .kg import KnowledgeGraph
from .relations import literal_relevance

_STOPWORDS = {"of", "the", "a", "an", "and"}
_HONORIFICS = {"mr", "mrs", "ms", "dr", "prof", "sir"}

_MONTHS = {
    name: index + 1
    for index, name in enumerate(
        "january february march april may june july august september october november december".split()
    )
}
_DATE_PATTERNS = (
    re.compile(r"^(?P<y>\d{4})-(?P<m>\d{1,2})-(?P<d>\d{1,2})$"),
    re.compile(r"^(?P<d>\d{1,2}) (?P<month>[A-Za-z]+),? (?P<y>\d{4})$"),
    re.compile(r"^(?P<month>[A-Za-z]+) (?P<d>\d{1,2}),? (?P<y>\d{4})$"),
)


@dataclass
class NeighborCell:
    """A same-row cell in another column, as seen from a candidate entity."""

    kind: str  # "entity" | "literal"
    value: str
    candidates: Distribution = field(default_factory=dict)


@dataclass
class EntitySignalBundle:
    """The four per-cell entity signals with their weights."""

    s7: Distribution  # lookup
    s8: Distribution  # column-type consistency
    s9: Distribution  # string similarity
    s10: Distribution  # row context
    weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)


def _fold(text: str) -> str:
    return "".join(ch for ch in text.upper() if ch.isalnum())


def _initials_match(cell: str, label: str) -> bool:
    words = [w for w in re.split(r"[\s\-]+", label) if w and w.lower() not in _STOPWORDS]
    if len(words) < 2:
        return False
    initials = "".join(w[0].upper() for w in words)
    return initials == _fold(cell)


def _strip_honorific(text: str) -> str:
    tokens = text.split()
    if tokens and tokens[0].rstrip(".").lower() in _HONORIFICS:
        return " ".join(tokens[1:])
    return text


def _title_match(cell: str, label: str) -> bool:
    stripped_cell = _strip_honorific(cell)
    stripped_label = _strip_honorific(label)
    if stripped_cell == cell and stripped_label == label:
        return False
    return stripped_cell.casefold() == stripped_label.casefold()


def _canonical_date(text: str) -> str | None:
    text = text.strip()
    for pattern in _DATE_PATTERNS:
        match = pattern.match(text)
        if not match:
            continue
        groups = match.groupdict()
        if "month" in groups and groups.get("month"):
            month = _MONTHS.get(groups["month"].lower())
            if month is None:
                return None
        else:
            month = int(groups["m"])
        try:
            day = int(groups["d"])
            year = int(groups["y"])
        except (KeyError, ValueError):
            return None
        if not (1 <= month <= 12 and 1 <= day <= 31):
            return None
        return f"{year:04d}-{month:02d}-{day:02d}"
    return None


def _date_match(cell: str, label: str) -> bool:
    cell_date = _canonical_date(cell)
    label_date = _canonical_date(label)
    return cell_date is not None and cell_date == label_date


def abbreviation_match(cell: str, label: str) -> bool:
    """Abbreviation heuristics: word initials, honorific titles, dates."""
    return (
        _initials_match(cell, label)
        or _title_match(cell, label)
        or _date_match(cell, label)
    )


def signal_type_consistency(
    candidates: Distribution,
    column_types: Distribution,
    kg: KnowledgeGraph,
) -> Distribution:
    """Each candidate scores the best column-type probability among its types."""
    raw: dict[str, float] = {}
    for entity in candidates:
        best = 0.0
        for type_id in kg.types_of(entity):
            probability = column_types.get(type_id, 0.0)
            if probability > best:
                best = probability
        if best > 0.0:
            raw[entity] = best
    return normalize(raw)


def signal_string_similarity(
    candidates: Distribution,
    cell: str,
    kg: KnowledgeGraph,
) -> Distribution:
    """Label similarity per candidate, boosted when an abbreviation rule fires."""
    if not cell:
        return {}
    folded_cell = cell.casefold()
    raw: dict[str, float] = {}
    for entity in candidates:
        labels = kg.labels_of(entity)
        lev = 0.0
        abbr = False
        for label in labels:
            sim = kernels.similarity(folded_cell, label.casefold())
            if sim > lev:
                lev = sim
            if not abbr and abbreviation_match(cell, label):
                abbr = True
        raw[entity] = (lev + 1.0) / 2.0 if abbr else lev
    return normalize(raw)


def signal_row_context(
    candidate: str,
    neighbors: list[NeighborCell],
    kg: KnowledgeGraph,
) -> float:
    """Mean agreement of a candidate with the row's other cells.

    Literal neighbors score the best attribute relevance; entity neighbors
    score 1 when the candidate links to any of their candidates.
    """
    if not neighbors:
        return 0.0
    total = 0.0
    for neighbor in neighbors:
        score = 0.0
        if neighbor.kind == "entity":
            if neighbor.candidates:
                for _, object_entity in kg.outgoing(candidate):
                    if object_entity in neighbor.candidates:
                        score = 1.0
                        break
        elif neighbor.value:
            for attribute in kg.literal_attributes(candidate):
                if attribute.kind == "numerical" and attribute.number is not None:
                    relevance = literal_relevance(attribute.number, neighbor.value, "numerical")
                else:
                    relevance = literal_relevance(attribute.lexical, neighbor.value, "textual")
                if relevance > score:
                    score = relevance
        total += score
    return total / len(neighbors)


def row_context_distribution(
    candidates: Distribution,
    neighbors: list[NeighborCell],
    kg: KnowledgeGraph,
) -> Distribution:
    """signal_row_context over every candidate, normalized."""
    if not neighbors:
        return {}
    raw = {
        entity: signal_row_context(entity, neighbors, kg) for entity in candidates
    }
    return normalize(raw)


def reestimate(bundle: EntitySignalBundle, mode: str = "sum") -> Distribution:
    """Fuse the surviving entity signals; no thresholding at this step.

    The candidate set is fixed by lookup: a cell without lookup candidates
    stays unannotated, and other signals cannot introduce new entities.
    """
    if not bundle.s7:
        return {}
    allowed = bundle.s7.keys()
    signals = [
        ({k: v for k, v in signal.items() if k in allowed}, weight)
        for signal, weight in zip(
            (bundle.s7, bundle.s8, bundle.s9, bundle.s10), bundle.weights
        )
    ]
    return combine(signals, mode=mode)
