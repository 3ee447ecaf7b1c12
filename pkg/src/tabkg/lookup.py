"""Entity lookup: service fan-out, rank scoring, max-fusion.

Each service adapter returns a relevance-ranked entity list for a query.
Remote adapters are failure-isolated (any error yields an empty ranking)
and cache responses on disk so runs are reproducible and CI-friendly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .distributions import Distribution, normalize
from .ingest import CellContext
from .kg import KnowledgeGraph

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 10.0


@dataclass(frozen=True)
class ServiceRanking:
    """Ordered relevance list from one service for one query."""

    service_id: str
    query: str
    entities: tuple[str, ...] = ()


class ServiceAdapter(Protocol):
    service_id: str

    def lookup(self, query: str, language: str, limit: int) -> list[str]: ...


def _dedup(entities: Iterable[str], limit: int) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for entity in entities:
        if entity and entity not in seen:
            seen.add(entity)
            out.append(entity)
            if len(out) >= limit:
                break
    return tuple(out)


class LocalAdapter:
    """Label search against the in-process knowledge graph."""

    service_id = "local"

    def __init__(self, graph: KnowledgeGraph):
        self.graph = graph
        self._memo: dict[tuple[str, str, int], list[str]] = {}

    def lookup(self, query: str, language: str, limit: int) -> list[str]:
        key = (query, language, limit)
        hit = self._memo.get(key)
        if hit is None:
            hit = self.graph.search_label(query, limit, language or None)
            self._memo[key] = hit
        return list(hit)


class ResponseCache:
    """One JSON file per (service, query, language, limit) request key.

    Writes go through a temp file and an atomic rename, so concurrent
    readers never observe partial files.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, service: str, query: str, language: str, limit: int) -> Path:
        key = json.dumps([service, query, language, limit], ensure_ascii=False)
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.json"

    def get(self, service: str, query: str, language: str, limit: int) -> list[str] | None:
        path = self._path(service, query, language, limit)
        try:
            with open(path, encoding="utf-8") as handle:
                body = json.load(handle)
            return list(body["entities"])
        except (OSError, ValueError, KeyError):
            return None

    def put(self, service: str, query: str, language: str, limit: int, entities: Sequence[str]) -> None:
        path = self._path(service, query, language, limit)
        body = {
            "service": service,
            "query": query,
            "language": language,
            "limit": limit,
            "entities": list(entities),
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(body, handle, ensure_ascii=False)
            os.replace(tmp, path)
        except OSError:
            try:
                os.unlink(tmp)
            except OSError:
                pass


class RemoteAdapter:
    """Base for HTTP-backed services: caching, timeouts, failure isolation."""

    def __init__(
        self,
        service_id: str,
        endpoint: str,
        timeout: float = DEFAULT_TIMEOUT,
        cache: ResponseCache | None = None,
    ):
        self.service_id = service_id
        self.endpoint = endpoint
        self.timeout = timeout
        self.cache = cache

    def lookup(self, query: str, language: str, limit: int) -> list[str]:
        if self.cache is not None:
            cached = self.cache.get(self.service_id, query, language, limit)
            if cached is not None:
                return cached
        try:
            entities = list(self._fetch(query, language, limit))[:limit]
        except Exception as exc:  # failure isolation: empty ranking, never an error
            logger.warning("service %s failed for %r: %s", self.service_id, query, exc)
            return []
        if self.cache is not None:
            self.cache.put(self.service_id, query, language, limit, entities)
        return entities

    def _fetch(self, query: str, language: str, limit: int) -> list[str]:
        raise NotImplementedError


def _extract_ids(payload) -> list[str]:
    """Entity ids from a JSON payload: a list of strings or of objects
    carrying one of the conventional id keys."""
    if isinstance(payload, dict):
        for key in ("results", "docs", "entities"):
            if key in payload:
                payload = payload[key]
                break
    ids: list[str] = []
    if isinstance(payload, list):
        for item in payload:
            if isinstance(item, str):
                ids.append(item)
            elif isinstance(item, dict):
                for key in ("id", "uri", "iri", "resource", "entity"):
                    value = item.get(key)
                    if isinstance(value, str):
                        ids.append(value)
                        break
                    if isinstance(value, list) and value and isinstance(value[0], str):
                        ids.append(value[0])
                        break
    return ids


class HttpLookupAdapter(RemoteAdapter):
    """Generic lookup HTTP API returning a JSON list of ranked entity ids."""

    def _fetch(self, query: str, language: str, limit: int) -> list[str]:
        import requests

        response = requests.get(
            self.endpoint,
            params={"query": query, "language": language, "limit": limit},
            headers={"Accept": "application/json"},
            timeout=self.timeout,
        )
        response.raise_for_status()
        return _extract_ids(response.json())


class SparqlAdapter(RemoteAdapter):
    """Label search via a SPARQL endpoint's standard JSON results."""

    _QUERY = (
        "SELECT DISTINCT ?e WHERE {{ ?e <http://www.w3.org/2000/01/rdf-schema#label> ?l . "
        'FILTER(LCASE(STR(?l)) = "{text}"{lang_filter}) }} LIMIT {limit}'
    )

    def _fetch(self, query: str, language: str, limit: int) -> list[str]:
        import requests

        lang_filter = f' && LANGMATCHES(LANG(?l), "{language}")' if language else ""
        escaped = query.replace("\\", "\\\\").replace('"', '\\"').lower()
        sparql = self._QUERY.format(text=escaped, lang_filter=lang_filter, limit=limit)
        response = requests.get(
            self.endpoint,
            params={"query": sparql, "format": "application/sparql-results+json"},
            timeout=self.timeout,
        )
        response.raise_for_status()
        body = response.json()
        ids = []
        for binding in body.get("results", {}).get("bindings", []):
            value = binding.get("e", {}).get("value")
            if value:
                ids.append(value)
        return ids


class WikiApiAdapter(RemoteAdapter):
    """Encyclopedia-style opensearch API; titles are resolved through
    redirects to canonical pages and templated into entity IRIs."""

    def __init__(
        self,
        service_id: str,
        endpoint: str,
        timeout: float = DEFAULT_TIMEOUT,
        cache: ResponseCache | None = None,
        iri_template: str = "{title}",
    ):
        super().__init__(service_id, endpoint, timeout, cache)
        self.iri_template = iri_template

    def _fetch(self, query: str, language: str, limit: int) -> list[str]:
        import requests

        response = requests.get(
            self.endpoint,
            params={"action": "opensearch", "search": query, "limit": limit, "format": "json"},
            timeout=self.timeout,
        )
        response.raise_for_status()
        body = response.json()
        titles = body[1] if isinstance(body, list) and len(body) > 1 else []
        titles = [t for t in titles if isinstance(t, str)]
        if titles:
            titles = self._resolve_redirects(titles)
        return [self.iri_template.format(title=t.replace(" ", "_")) for t in titles]

    def _resolve_redirects(self, titles: list[str]) -> list[str]:
        import requests

        try:
            response = requests.get(
                self.endpoint,
                params={
                    "action": "query",
                    "titles": "|".join(titles),
                    "redirects": 1,
                    "format": "json",
                },
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
        except Exception:
            return titles
        mapping = {
            r.get("from"): r.get("to")
            for r in body.get("query", {}).get("redirects", [])
            if isinstance(r, dict)
        }
        resolved = []
        for title in titles:
            target = mapping.get(title, title)
            if target not in resolved:
                resolved.append(target)
        return resolved


# ---------------------------------------------------------------------------
# Fan-out and fusion


def effective_language(
    cell_language: tuple[str, float],
    table_language: tuple[str, float] | None,
) -> str:
    """Cell-level prediction wins when its confidence reaches the table's."""
    if table_language is None:
        return cell_language[0]
    return cell_language[0] if cell_language[1] >= table_language[1] else table_language[0]


def query_services(
    cell: CellContext,
    services: Sequence[ServiceAdapter],
    limit: int,
    table_language: tuple[str, float] | None = None,
    query: str | None = None,
) -> list[ServiceRanking]:
    """One ranking per service for a cell's query; failures yield empty rankings."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if not services:
        raise ValueError("at least one lookup service is required")
    text = cell.value if query is None else query
    language = effective_language(cell.language, table_language)

    def run(adapter: ServiceAdapter) -> ServiceRanking:
        if not text.strip():
            return ServiceRanking(adapter.service_id, text)
        try:
            entities = adapter.lookup(text, language, limit)
        except Exception as exc:  # adapters should isolate; belt and braces
            logger.warning("service %s raised for %r: %s", adapter.service_id, text, exc)
            entities = []
        return ServiceRanking(adapter.service_id, text, _dedup(entities, limit))

    if len(services) == 1:
        return [run(services[0])]
    with ThreadPoolExecutor(max_workers=len(services)) as pool:
        return list(pool.map(run, services))


def rank_score(ranking: ServiceRanking, limit: int) -> dict[str, float]:
    """Raw per-entity scores: limit minus zero-based rank (top scores `limit`)."""
    return {
        entity: float(limit - rank)
        for rank, entity in enumerate(ranking.entities[:limit])
    }


def fuse_and_normalize(rankings: Iterable[ServiceRanking], limit: int) -> Distribution:
    """Max-fuse per-service rank scores and normalize into probabilities."""
    fused: dict[str, float] = {}
    for ranking in rankings:
        for entity, score in rank_score(ranking, limit).items():
            if score > fused.get(entity, 0.0):
                fused[entity] = score
    return normalize(fused)
