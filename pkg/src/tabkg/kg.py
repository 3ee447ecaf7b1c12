"""In-memory knowledge graph: N-Triples loading, indexes, graph queries.

The graph is immutable after load and safe for concurrent reads. Special
predicates: rdf:type populates entity types, rdfs:subClassOf the class
hierarchy (must be a DAG) and rdfs:label the label index; every other
predicate becomes a relation, with IRI objects stored as entity-entity
triples and literal objects as entity-literal triples.
"""

from __future__ import annotations

import bisect
import json
import pickle
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from . import kernels
from .errors import GraphLoadError, NTriplesParseError, TabkgError
from .ingest import parse_number

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASS = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

FUZZY_FLOOR = 0.6

INDEX_FORMAT = 1
MANIFEST_NAME = "manifest.json"

_XSD = "http://www.w3.org/2001/XMLSchema#"
_NUMERIC_XSD = {
    _XSD + name
    for name in (
        "integer", "decimal", "double", "float", "long", "int", "short", "byte",
        "nonNegativeInteger", "positiveInteger", "nonPositiveInteger",
        "negativeInteger", "unsignedLong", "unsignedInt", "unsignedShort",
        "unsignedByte",
    )
}


@dataclass(frozen=True)
class RdfLiteral:
    """Lexical form plus datatype/language, as written in the source file."""

    lexical: str
    datatype: str | None = None
    language: str | None = None


@dataclass(frozen=True)
class LiteralAttribute:
    """One literal-valued attribute of an entity."""

    relation: str
    lexical: str
    kind: str  # "numerical" | "textual"
    number: float | None = None


# ---------------------------------------------------------------------------
# N-Triples syntax


_IRI = re.compile(r"<([^<>\"{}|^`\\\x00-\x20]*)>")
_BNODE = re.compile(r"_:[A-Za-z0-9][A-Za-z0-9._-]*")
_LITERAL = re.compile(r'"((?:[^"\\]|\\.)*)"(?:@([a-zA-Z][a-zA-Z0-9-]*)|\^\^<([^<>"\s]+)>)?')

_UNESCAPE = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}


def _unescape(text: str) -> str:
    if "\\" not in text:
        return text
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        code = text[i + 1] if i + 1 < len(text) else ""
        if code in _UNESCAPE:
            out.append(_UNESCAPE[code])
            i += 2
        elif code == "u":
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif code == "U":
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"bad escape sequence '\\{code}'")
    return "".join(out)


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def parse_ntriples_line(line: str, line_no: int) -> tuple[str, str, str | RdfLiteral] | None:
    """One (subject, predicate, object) triple, or None for blank/comment."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    pos = 0

    def fail(message: str) -> NTriplesParseError:
        return NTriplesParseError(line_no, f"{message} in {line.rstrip()!r}")

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(line) and line[pos] in " \t":
            pos += 1

    def read_resource() -> str:
        nonlocal pos
        match = _IRI.match(line, pos)
        if match:
            pos = match.end()
            return match.group(1)
        match = _BNODE.match(line, pos)
        if match:
            pos = match.end()
            return match.group(0)
        raise fail("expected IRI or blank node")

    skip_ws()
    try:
        subject = read_resource()
    except NTriplesParseError:
        raise
    skip_ws()
    match = _IRI.match(line, pos)
    if not match:
        raise fail("expected predicate IRI")
    predicate = match.group(1)
    pos = match.end()
    skip_ws()
    obj: str | RdfLiteral
    literal_match = _LITERAL.match(line, pos)
    if literal_match:
        try:
            lexical = _unescape(literal_match.group(1))
        except ValueError as exc:
            raise fail(str(exc)) from exc
        obj = RdfLiteral(lexical, literal_match.group(3), literal_match.group(2))
        pos = literal_match.end()
    else:
        obj = read_resource()
    skip_ws()
    if pos >= len(line) or line[pos] != ".":
        raise fail("expected terminating '.'")
    trailing = line[pos + 1 :].strip()
    if trailing and not trailing.startswith("#"):
        raise fail("unexpected content after '.'")
    return subject, predicate, obj


def _literal_attribute(relation: str, literal: RdfLiteral) -> LiteralAttribute:
    if literal.datatype is not None:
        if literal.datatype in _NUMERIC_XSD:
            number = parse_number(literal.lexical)
            if number is not None:
                return LiteralAttribute(relation, literal.lexical, "numerical", number)
        return LiteralAttribute(relation, literal.lexical, "textual")
    number = parse_number(literal.lexical)
    if number is not None:
        return LiteralAttribute(relation, literal.lexical, "numerical", number)
    return LiteralAttribute(relation, literal.lexical, "textual")


# ---------------------------------------------------------------------------
# Graph


class KnowledgeGraph:
    """Triple stores plus the derived indexes the pipeline queries."""

    def __init__(self) -> None:
        # raw triple lists (duplicates preserved for faithful re-serialization)
        self.type_triples: list[tuple[str, str]] = []
        self.subclass_triples: list[tuple[str, str]] = []
        self.label_triples: list[tuple[str, RdfLiteral]] = []
        self.ee_triples: list[tuple[str, str, str]] = []
        self.el_triples: list[tuple[str, str, RdfLiteral]] = []
        # id sets
        self.entities: set[str] = set()
        self.classes: set[str] = set()
        self.relations: set[str] = set()
        # indexes
        self._direct_types: dict[str, set[str]] = {}
        self._parents: dict[str, set[str]] = {}
        self._ancestors: dict[str, frozenset[str]] = {}
        self._depth: dict[str, int] = {}
        self._labels: dict[str, list[tuple[str, str | None]]] = {}
        self._pair_relations: dict[tuple[str, str], frozenset[str]] = {}
        self._outgoing: dict[str, list[tuple[str, str]]] = {}
        self._attributes: dict[str, list[LiteralAttribute]] = {}
        self._relation_types: dict[str, frozenset[str]] = {}
        # label search tiers
        self._exact: dict[str, list[tuple[str, str | None]]] = {}
        self._prefix: list[tuple[str, str, str | None]] = []
        self._fuzzy_labels: list[str] = []
        self._fuzzy_entities: list[list[tuple[str, str | None]]] = []

    # -- loading ------------------------------------------------------------

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "KnowledgeGraph":
        graph = cls()
        for line_no, line in enumerate(lines, start=1):
            parsed = parse_ntriples_line(line, line_no)
            if parsed is None:
                continue
            subject, predicate, obj = parsed
            if predicate == RDF_TYPE and isinstance(obj, str):
                graph.type_triples.append((subject, obj))
            elif predicate == RDFS_SUBCLASS and isinstance(obj, str):
                graph.subclass_triples.append((subject, obj))
            elif predicate == RDFS_LABEL and isinstance(obj, RdfLiteral):
                graph.label_triples.append((subject, obj))
            elif isinstance(obj, RdfLiteral):
                graph.el_triples.append((subject, predicate, obj))
            else:
                graph.ee_triples.append((subject, predicate, obj))
        graph._build_indexes()
        return graph

    def _build_indexes(self) -> None:
        self.classes = {cls for _, cls in self.type_triples}
        for child, parent in self.subclass_triples:
            self.classes.add(child)
            self.classes.add(parent)
            self._parents.setdefault(child, set()).add(parent)
        self._check_acyclic()
        for cls in self.classes:
            self._ancestors_of(cls)
            self.class_depth(cls)

        subjects = {s for s, _ in self.type_triples}
        subjects |= {s for s, _, _ in self.ee_triples} | {o for _, _, o in self.ee_triples}
        subjects |= {s for s, _, _ in self.el_triples}
        subjects |= {s for s, _ in self.label_triples}
        self.entities = subjects - self.classes

        for entity, cls in self.type_triples:
            self._direct_types.setdefault(entity, set()).add(cls)
        for subject, literal in self.label_triples:
            self._labels.setdefault(subject, []).append((literal.lexical, literal.language))

        pair_sets: dict[tuple[str, str], set[str]] = {}
        out_sets: dict[str, set[tuple[str, str]]] = {}
        for s, p, o in self.ee_triples:
            self.relations.add(p)
            pair_sets.setdefault((s, o), set()).add(p)
            out_sets.setdefault(s, set()).add((p, o))
        self._pair_relations = {pair: frozenset(rels) for pair, rels in pair_sets.items()}
        self._outgoing = {s: sorted(links) for s, links in out_sets.items()}

        attr_sets: dict[str, set[LiteralAttribute]] = {}
        for s, p, literal in self.el_triples:
            self.relations.add(p)
            attr_sets.setdefault(s, set()).add(_literal_attribute(p, literal))
        self._attributes = {
            s: sorted(attrs, key=lambda a: (a.relation, a.lexical))
            for s, attrs in attr_sets.items()
        }

        relation_types: dict[str, set[str]] = {}
        for s, p, _ in self.ee_triples:
            relation_types.setdefault(p, set()).update(self.types_of(s))
        for s, p, _ in self.el_triples:
            relation_types.setdefault(p, set()).update(self.types_of(s))
        self._relation_types = {r: frozenset(ts) for r, ts in relation_types.items()}

        self._build_label_search()

    def _check_acyclic(self) -> None:
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {cls: WHITE for cls in self._parents}
        for start in self._parents:
            if color[start] != WHITE:
                continue
            stack: list[tuple[str, Iterator[str]]] = [(start, iter(self._parents.get(start, ())))]
            color[start] = GRAY
            while stack:
                node, children = stack[-1]
                advanced = False
                for parent in children:
                    state = color.get(parent, WHITE)
                    if state == GRAY:
                        raise GraphLoadError(f"subclass cycle through {parent!r}")
                    if state == WHITE:
                        color[parent] = GRAY
                        stack.append((parent, iter(self._parents.get(parent, ()))))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()

    def _ancestors_of(self, cls: str) -> frozenset[str]:
        cached = self._ancestors.get(cls)
        if cached is not None:
            return cached
        collected: set[str] = set()
        for parent in self._parents.get(cls, ()):
            collected.add(parent)
            collected |= self._ancestors_of(parent)
        result = frozenset(collected)
        self._ancestors[cls] = result
        return result

    def class_depth(self, cls: str) -> int:
        """Longest subclass chain above `cls` (roots have depth 0)."""
        cached = self._depth.get(cls)
        if cached is not None:
            return cached
        parents = self._parents.get(cls, ())
        depth = 1 + max((self.class_depth(p) for p in parents), default=-1)
        self._depth[cls] = depth
        return depth

    def _build_label_search(self) -> None:
        fuzzy_map: dict[str, list[tuple[str, str | None]]] = {}
        for entity in self.entities:
            for text, language in self._labels.get(entity, ()):
                folded = text.casefold()
                self._exact.setdefault(folded, []).append((entity, language))
                fuzzy_map.setdefault(folded, []).append((entity, language))
        self._fuzzy_labels = sorted(fuzzy_map)
        self._fuzzy_entities = [
            sorted(fuzzy_map[label], key=lambda item: (item[0], item[1] or ""))
            for label in self._fuzzy_labels
        ]
        # language None is stored as "" so tuples stay order-comparable
        self._prefix = sorted(
            (label, entity, language or "")
            for label, holders in fuzzy_map.items()
            for entity, language in holders
        )

    # -- queries ------------------------------------------------------------

    def ancestors(self, cls: str) -> frozenset[str]:
        """All strict superclasses of `cls`."""
        return self._ancestors.get(cls, frozenset())

    def types_of(self, entity: str) -> frozenset[str]:
        """Direct rdf:type classes closed under subclass edges."""
        direct = self._direct_types.get(entity)
        if not direct:
            return frozenset()
        closed = set(direct)
        for cls in direct:
            closed |= self._ancestors_of(cls)
        return frozenset(closed)

    def direct_types_of(self, entity: str) -> frozenset[str]:
        """rdf:type classes as asserted, without the subclass closure."""
        return frozenset(self._direct_types.get(entity, ()))

    def relations_between(self, head: str, tail: str) -> frozenset[str]:
        """Relations r with a triple head -r-> tail."""
        return self._pair_relations.get((head, tail), frozenset())

    def outgoing(self, entity: str) -> list[tuple[str, str]]:
        """All (relation, object-entity) links leaving `entity`."""
        return self._outgoing.get(entity, [])

    def literal_attributes(self, entity: str) -> list[LiteralAttribute]:
        """All literal-valued attributes of `entity`."""
        return self._attributes.get(entity, [])

    def types_for_relation(self, relation: str) -> frozenset[str]:
        """Classes (ancestor-closed) whose instances appear as subjects of `relation`."""
        return self._relation_types.get(relation, frozenset())

    def labels_of(self, subject: str) -> list[str]:
        return [text for text, _ in self._labels.get(subject, ())]

    def class_labels(self, cls: str) -> list[str]:
        """Labels of a class; falls back to the IRI local name."""
        labels = [text for text, _ in self._labels.get(cls, ())]
        if labels:
            return labels
        local = re.split(r"[/#]", cls)[-1]
        return [local] if local else []

    def search_label(self, query: str, limit: int, language: str | None = None) -> list[str]:
        """Rank entities for a query: exact, then prefix, then fuzzy matches.

        Fuzzy matches require normalized Levenshtein similarity >= 0.6.
        Ordering is deterministic: tier, then similarity (descending), then
        entity id. With a language hint only labels tagged with that
        language (or untagged) count; if that yields nothing the search is
        retried over all labels.
        """
        query = query.strip().casefold()
        if not query or limit < 1:
            return []
        result = self._search_folded(query, limit, language)
        if not result and language is not None:
            result = self._search_folded(query, limit, None)
        return result

    def _language_ok(self, label_language: str | None, language: str | None) -> bool:
        return language is None or label_language is None or label_language == language

    def _search_folded(self, query: str, limit: int, language: str | None) -> list[str]:
        ranked: list[str] = []
        seen: set[str] = set()

        exact = sorted(
            entity
            for entity, label_language in self._exact.get(query, ())
            if self._language_ok(label_language, language)
        )
        for entity in exact:
            if entity not in seen:
                seen.add(entity)
                ranked.append(entity)
                if len(ranked) >= limit:
                    return ranked

        prefix_hits: list[tuple[float, str]] = []
        start = bisect.bisect_left(self._prefix, (query, "", ""))
        for label, entity, label_language in self._prefix[start:]:
            if not label.startswith(query):
                break
            if label == query or entity in seen:
                continue
            if not self._language_ok(label_language or None, language):
                continue
            prefix_hits.append((kernels.similarity(query, label), entity))
        for sim, entity in sorted(prefix_hits, key=lambda hit: (-hit[0], hit[1])):
            if entity not in seen:
                seen.add(entity)
                ranked.append(entity)
                if len(ranked) >= limit:
                    return ranked

        fuzzy_hits: list[tuple[float, str]] = []
        for index, sim in kernels.scan_labels(query, self._fuzzy_labels, FUZZY_FLOOR):
            label = self._fuzzy_labels[index]
            if label == query or label.startswith(query):
                continue  # already covered by earlier tiers
            for entity, label_language in self._fuzzy_entities[index]:
                if self._language_ok(label_language, language):
                    fuzzy_hits.append((sim, entity))
        best: dict[str, float] = {}
        for sim, entity in fuzzy_hits:
            if sim > best.get(entity, -1.0):
                best[entity] = sim
        for entity in sorted(best, key=lambda e: (-best[e], e)):
            if entity not in seen:
                seen.add(entity)
                ranked.append(entity)
                if len(ranked) >= limit:
                    break
        return ranked

    # -- serialization --------------------------------------------------------

    def to_ntriples(self) -> Iterator[str]:
        """Re-serialize the stored triples (same multiset as the input)."""
        def fmt_resource(value: str) -> str:
            return value if value.startswith("_:") else f"<{value}>"

        def fmt_literal(literal: RdfLiteral) -> str:
            body = f'"{_escape(literal.lexical)}"'
            if literal.language:
                return f"{body}@{literal.language}"
            if literal.datatype:
                return f"{body}^^<{literal.datatype}>"
            return body

        for s, cls in self.type_triples:
            yield f"{fmt_resource(s)} <{RDF_TYPE}> {fmt_resource(cls)} ."
        for child, parent in self.subclass_triples:
            yield f"{fmt_resource(child)} <{RDFS_SUBCLASS}> {fmt_resource(parent)} ."
        for s, literal in self.label_triples:
            yield f"{fmt_resource(s)} <{RDFS_LABEL}> {fmt_literal(literal)} ."
        for s, p, o in self.ee_triples:
            yield f"{fmt_resource(s)} <{p}> {fmt_resource(o)} ."
        for s, p, literal in self.el_triples:
            yield f"{fmt_resource(s)} <{p}> {fmt_literal(literal)} ."

    def stats(self) -> dict[str, int]:
        return {
            "entities": len(self.entities),
            "classes": len(self.classes),
            "relations": len(self.relations),
            "type_triples": len(self.type_triples),
            "subclass_triples": len(self.subclass_triples),
            "label_triples": len(self.label_triples),
            "ee_triples": len(self.ee_triples),
            "el_triples": len(self.el_triples),
        }


def load_graph(path: str | Path) -> KnowledgeGraph:
    """Load and index an N-Triples file."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            return KnowledgeGraph.from_lines(handle)
    except OSError as exc:
        raise TabkgError(f"cannot read triples file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Index directory


def save_index(
    directory: str | Path,
    graph: KnowledgeGraph,
    profiles: dict | None = None,
    extra_manifest: dict | None = None,
) -> None:
    """Persist a graph (and optional numeric profiles) with a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {"format": INDEX_FORMAT, "stats": graph.stats()}
    if extra_manifest:
        manifest.update(extra_manifest)
    with open(directory / "graph.pickle", "wb") as handle:
        pickle.dump(graph, handle, protocol=pickle.HIGHEST_PROTOCOL)
    if profiles is not None:
        with open(directory / "profiles.pickle", "wb") as handle:
            pickle.dump(profiles, handle, protocol=pickle.HIGHEST_PROTOCOL)
    with open(directory / MANIFEST_NAME, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_index(directory: str | Path) -> tuple[KnowledgeGraph, dict | None, dict]:
    """Load a graph index directory; returns (graph, profiles, manifest)."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise TabkgError(f"{directory}: not a graph index (missing {MANIFEST_NAME})")
    with open(manifest_path, encoding="utf-8") as handle:
        manifest = json.load(handle)
    if manifest.get("format") != INDEX_FORMAT:
        raise TabkgError(
            f"{directory}: unsupported index format {manifest.get('format')!r}"
        )
    with open(directory / "graph.pickle", "rb") as handle:
        graph = pickle.load(handle)
    profiles = None
    profiles_path = directory / "profiles.pickle"
    if profiles_path.exists():
        with open(profiles_path, "rb") as handle:
            profiles = pickle.load(handle)
    return graph, profiles, manifest
