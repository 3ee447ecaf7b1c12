"""End-to-end annotation pipeline.

Per table: ingest and tag cells, classify columns, look up entity
candidates, estimate column types and column-pair relations, re-estimate
entity candidates from the fused signals, then select final annotations
by majority voting. Tables are independent and may be processed by a
worker pool.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .coltypes import (
    TypeSignalBundle,
    aggregate_type_signals,
    classify_columns,
    signal_header_types,
    signal_lookup_types,
    signal_ner_types,
)
from .config import RunConfig, ServiceSpec
from .distributions import Distribution
from .errors import TabkgError
from .ingest import (
    EntityTyper,
    Table,
    ingest_table,
    load_class_mapping,
    load_gazetteer,
    parse_number,
)
from .kg import KnowledgeGraph
from .langid import NgramLanguageDetector
from .lookup import (
    HttpLookupAdapter,
    LocalAdapter,
    ResponseCache,
    ServiceAdapter,
    SparqlAdapter,
    WikiApiAdapter,
    fuse_and_normalize,
    query_services,
)
from .numeric import (
    NumericProfile,
    RelationRanking,
    infer_types_from_relations,
    label_numeric_column,
)
from .reestimate import (
    EntitySignalBundle,
    NeighborCell,
    reestimate,
    row_context_distribution,
    signal_string_similarity,
    signal_type_consistency,
)
from .relations import (
    ColumnPairRelations,
    combine_numeric_relations,
    relation_entity_entity,
    relation_entity_literal,
)
from .targets import TargetSet
from .voting import AnnotationSet, finalize_cea, revote_cpa, revote_cta

logger = logging.getLogger(__name__)


def build_services(config: RunConfig, kg: KnowledgeGraph) -> list[ServiceAdapter]:
    """Local label search plus every enabled remote adapter from the config."""
    services: list[ServiceAdapter] = [LocalAdapter(kg)]
    cache = ResponseCache(config.cache_dir) if config.cache_dir else None
    for index, spec in enumerate(config.services):
        if not spec.enabled or spec.type == "local":
            continue
        service_id = f"{spec.type}-{index}"
        if spec.type == "sparql":
            services.append(SparqlAdapter(service_id, spec.endpoint, spec.timeout, cache))
        elif spec.type == "lookup-api":
            services.append(HttpLookupAdapter(service_id, spec.endpoint, spec.timeout, cache))
        elif spec.type == "wiki-api":
            services.append(
                WikiApiAdapter(
                    service_id, spec.endpoint, spec.timeout, cache,
                    iri_template=spec.iri_template,
                )
            )
    return services


class Annotator:
    """Annotates tables against one knowledge graph with one configuration."""

    def __init__(
        self,
        kg: KnowledgeGraph,
        config: RunConfig | None = None,
        profiles: dict[str, NumericProfile] | None = None,
        services: list[ServiceAdapter] | None = None,
        typer: EntityTyper | None = None,
        detector: NgramLanguageDetector | None = None,
    ):
        self.kg = kg
        self.config = config or RunConfig()
        self.profiles = profiles or {}
        self.services = services if services is not None else build_services(self.config, kg)
        if typer is None and (self.config.ner_mapping or self.config.gazetteer):
            mapping = (
                load_class_mapping(self.config.ner_mapping)
                if self.config.ner_mapping
                else None
            )
            gazetteer = (
                load_gazetteer(self.config.gazetteer) if self.config.gazetteer else None
            )
            typer = EntityTyper(mapping, gazetteer)
        self.typer = typer
        self.detector = detector

    def ingest(self, path: str | Path) -> Table:
        return ingest_table(path, typer=self.typer, detector=self.detector)

    # -- per-table steps ----------------------------------------------------

    def _lookup_cells(
        self, table: Table, entity_cols: list[int]
    ) -> dict[tuple[int, int], Distribution]:
        cfg = self.config
        candidates: dict[tuple[int, int], Distribution] = {}
        for col in entity_cols:
            for row in table.data_rows():
                value = table.cells[row][col]
                if not value:
                    continue
                context = table.contexts[row][col]
                rankings = query_services(context, self.services, cfg.alpha, table.language)
                dist = fuse_and_normalize(rankings, cfg.alpha)
                if not dist:
                    fallback = self._fallback_query(table, row, col)
                    if fallback:
                        rankings = query_services(
                            context, self.services, cfg.alpha, table.language, query=fallback
                        )
                        dist = fuse_and_normalize(rankings, cfg.alpha)
                if dist:
                    candidates[(row, col)] = dist
        return candidates

    def _fallback_query(self, table: Table, row: int, col: int) -> str | None:
        """Cell value extended with the row's other textual cells."""
        extras = [
            table.cells[row][other]
            for other in range(table.n_cols)
            if other != col
            and table.cells[row][other]
            and table.contexts[row][other].datatype == "text"
        ]
        if not extras:
            return None
        return " ".join([table.cells[row][col], *extras])

    def _numeric_rankings(
        self, table: Table, numeric_cols: list[int]
    ) -> dict[int, RelationRanking]:
        rankings: dict[int, RelationRanking] = {}
        if not self.profiles:
            return rankings
        for col in numeric_cols:
            values = []
            for row in table.data_rows():
                number = parse_number(table.cells[row][col])
                if number is not None:
                    values.append(number)
            ranking = label_numeric_column(values, self.profiles, self.config.alpha, column=col)
            if ranking:
                rankings[col] = ranking
        return rankings

    def annotate_table(self, table: Table) -> tuple[AnnotationSet, dict]:
        cfg = self.config
        kg = self.kg
        started = time.perf_counter()

        column_classes = classify_columns(table)
        entity_cols = [c.column for c in column_classes if c.kind == "entity"]
        numeric_cols = [
            c.column
            for c in column_classes
            if c.kind == "literal" and c.literal_subkind == "numerical"
        ]

        rankings = self._numeric_rankings(table, numeric_cols)
        types_from_numeric = infer_types_from_relations(list(rankings.values()), kg)

        candidates = self._lookup_cells(table, entity_cols)

        column_types: dict[int, Distribution] = {}
        lookup_types: dict[int, Distribution] = {}
        for col in entity_cols:
            cell_dists = [
                candidates[(row, col)]
                for row in table.data_rows()
                if (row, col) in candidates
            ]
            s2 = signal_lookup_types(cell_dists, kg)
            s3 = signal_ner_types(
                [table.contexts[row][col] for row in table.data_rows()]
            )
            s4 = signal_header_types(table.header[col] if table.n_rows else "", kg)
            bundle = TypeSignalBundle(
                types_from_numeric, s2, s3, s4, cfg.type_weights(), cfg.beta
            )
            lookup_types[col] = s2
            column_types[col] = aggregate_type_signals(bundle, cfg.aggregation)

        pairs: dict[tuple[int, int], ColumnPairRelations] = {}
        for head in entity_cols:
            head_dists = [candidates.get((row, head), {}) for row in table.data_rows()]
            for tail_class in column_classes:
                tail = tail_class.column
                if tail == head:
                    continue
                if tail_class.kind == "entity":
                    tail_dists = [candidates.get((row, tail), {}) for row in table.data_rows()]
                    pair = relation_entity_entity(head_dists, tail_dists, kg, head, tail)
                else:
                    tail_values = [table.cells[row][tail] for row in table.data_rows()]
                    pair = relation_entity_literal(
                        head_dists, tail_values, kg, cfg.beta, cfg.pair_aggregation,
                        head, tail,
                    )
                    ranking = rankings.get(tail)
                    if tail_class.literal_subkind == "numerical" and ranking:
                        pair.distribution = combine_numeric_relations(
                            pair.distribution, ranking.distribution,
                            cfg.w5, cfg.w6, cfg.aggregation,
                        )
                pairs[(head, tail)] = pair

        final: dict[tuple[int, int], Distribution] = {}
        for col in entity_cols:
            type_source = (
                lookup_types[col] if cfg.s8_source == "lookup" else column_types[col]
            )
            for row in table.data_rows():
                s7 = candidates.get((row, col))
                if not s7:
                    continue
                s8 = signal_type_consistency(s7, type_source, kg)
                s9 = signal_string_similarity(s7, table.cells[row][col], kg)
                neighbors = self._neighbors(table, column_classes, candidates, row, col)
                s10 = row_context_distribution(s7, neighbors, kg)
                bundle = EntitySignalBundle(s7, s8, s9, s10, cfg.entity_weights())
                final[(row, col)] = reestimate(bundle, cfg.aggregation)

        annotation = AnnotationSet(table.table_id)
        for (row, col), dist in final.items():
            winner = finalize_cea(dist, candidates[(row, col)])
            if winner is not None:
                annotation.cea[(row, col)] = winner

        weighted = cfg.vote_weighting == "probability"
        for col in entity_cols:
            winners: list[str | None] = []
            weights: list[float] = []
            for row in table.data_rows():
                winner = annotation.cea.get((row, col))
                winners.append(winner)
                weights.append(
                    final.get((row, col), {}).get(winner, 0.0) if winner else 0.0
                )
            cta = revote_cta(
                winners, kg, column_types.get(col),
                weights=weights if weighted else None,
            )
            if cta:
                annotation.cta[col] = cta

        for (head, tail), pair in pairs.items():
            row_pairs: list[tuple[str | None, str | None]] = []
            weights = []
            for row in table.data_rows():
                head_winner = annotation.cea.get((row, head))
                if pair.kind == "entity-entity":
                    tail_value: str | None = annotation.cea.get((row, tail))
                else:
                    tail_value = table.cells[row][tail]
                row_pairs.append((head_winner, tail_value))
                weights.append(
                    final.get((row, head), {}).get(head_winner, 0.0) if head_winner else 0.0
                )
            relation = revote_cpa(
                row_pairs, pair, kg, cfg.beta,
                weights=weights if weighted else None,
            )
            if relation is not None:
                annotation.cpa[(head, tail)] = relation

        stats = {
            "seconds": time.perf_counter() - started,
            "steps": {
                "entity_columns": len(entity_cols),
                "numeric_columns_labeled": len(rankings),
                "cells_with_candidates": len(candidates),
                "candidates_total": sum(len(d) for d in candidates.values()),
                "column_pairs": len(pairs),
                "column_pairs_nonempty": sum(1 for p in pairs.values() if p),
                "cells_reestimated": len(final),
                "cea": len(annotation.cea),
                "cta": len(annotation.cta),
                "cpa": len(annotation.cpa),
            },
        }
        return annotation, stats

    def _neighbors(
        self,
        table: Table,
        column_classes,
        candidates: dict[tuple[int, int], Distribution],
        row: int,
        col: int,
    ) -> list[NeighborCell]:
        neighbors = []
        for other_class in column_classes:
            other = other_class.column
            if other == col:
                continue
            if other_class.kind == "entity":
                neighbors.append(
                    NeighborCell("entity", table.cells[row][other],
                                 candidates.get((row, other), {}))
                )
            else:
                neighbors.append(NeighborCell("literal", table.cells[row][other]))
        return neighbors


def run_pipeline(
    tables_dir: str | Path,
    targets: TargetSet | None,
    kg: KnowledgeGraph,
    config: RunConfig | None = None,
    profiles: dict[str, NumericProfile] | None = None,
    services: list[ServiceAdapter] | None = None,
    typer: EntityTyper | None = None,
    detector: NgramLanguageDetector | None = None,
) -> tuple[dict[str, AnnotationSet], dict]:
    """Annotate every targeted table under `tables_dir`.

    Without targets every *.csv in the directory is annotated. A table
    referenced by targets but missing or unreadable is recorded as an
    error and the run continues.
    """
    tables_dir = Path(tables_dir)
    config = config or RunConfig()
    annotator = Annotator(kg, config, profiles, services, typer, detector)

    if targets is None:
        table_paths = {path.stem: path for path in sorted(tables_dir.glob("*.csv"))}
    else:
        table_paths = {
            table_id: tables_dir / f"{table_id}.csv"
            for table_id in sorted(targets.table_ids())
        }

    annotations: dict[str, AnnotationSet] = {}
    report: dict = {"config": config.to_dict(), "tables": {}, "errors": {}}

    def process(item: tuple[str, Path]):
        table_id, path = item
        table = annotator.ingest(path)
        return table_id, annotator.annotate_table(table)

    items = list(table_paths.items())
    results: list[tuple[str, tuple[AnnotationSet, dict] | Exception]] = []
    if config.workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {pool.submit(process, item): item[0] for item in items}
            for future, table_id in futures.items():
                try:
                    results.append((table_id, future.result()[1]))
                except Exception as exc:
                    results.append((table_id, exc))
    else:
        for item in items:
            try:
                results.append((item[0], process(item)[1]))
            except Exception as exc:
                results.append((item[0], exc))

    for table_id, outcome in results:
        if isinstance(outcome, Exception):
            if not isinstance(outcome, (TabkgError, OSError)):
                raise outcome
            logger.error("table %s failed: %s", table_id, outcome)
            report["errors"][table_id] = str(outcome)
            continue
        annotation, stats = outcome
        annotations[table_id] = annotation
        report["tables"][table_id] = stats
    return annotations, report
