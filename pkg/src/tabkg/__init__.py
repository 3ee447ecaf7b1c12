"""tabkg: match tabular data to a knowledge graph.

Produces cell-entity (CEA), column-type (CTA) and column-pair relation
(CPA) annotations through a probabilistic multi-signal pipeline, entirely
offline against a local N-Triples knowledge graph, with optional remote
lookup services.
"""

__version__ = "0.1.0"

from .config import RunConfig, ServiceSpec
from .distributions import Distribution, combine, normalize, threshold
from .errors import (
    ConfigError,
    EmptyTableError,
    EvaluationError,
    GraphLoadError,
    NTriplesParseError,
    TabkgError,
)
from .evaluate import EvalReport, evaluate, f1_score
from .ingest import CellContext, EntityTyper, Table, decode_text, ingest_table
from .kg import (
    KnowledgeGraph,
    LiteralAttribute,
    load_graph,
    load_index,
    save_index,
)
from .langid import predict_language
from .lookup import (
    LocalAdapter,
    ServiceRanking,
    fuse_and_normalize,
    query_services,
    rank_score,
)
from .numeric import (
    NumericProfile,
    RelationRanking,
    build_numeric_profiles,
    infer_types_from_relations,
    ks_statistic,
    label_numeric_column,
)
from .pipeline import Annotator, run_pipeline
from .targets import TargetSet, read_annotations, read_targets, write_annotations
from .voting import AnnotationSet, finalize_cea, revote_cpa, revote_cta

__all__ = [
    "AnnotationSet",
    "Annotator",
    "CellContext",
    "ConfigError",
    "Distribution",
    "EmptyTableError",
    "EntityTyper",
    "EvalReport",
    "EvaluationError",
    "GraphLoadError",
    "KnowledgeGraph",
    "LiteralAttribute",
    "LocalAdapter",
    "NTriplesParseError",
    "NumericProfile",
    "RelationRanking",
    "RunConfig",
    "ServiceRanking",
    "ServiceSpec",
    "Table",
    "TabkgError",
    "TargetSet",
    "build_numeric_profiles",
    "combine",
    "decode_text",
    "evaluate",
    "f1_score",
    "finalize_cea",
    "fuse_and_normalize",
    "infer_types_from_relations",
    "ingest_table",
    "ks_statistic",
    "label_numeric_column",
    "load_graph",
    "load_index",
    "normalize",
    "predict_language",
    "query_services",
    "rank_score",
    "read_annotations",
    "read_targets",
    "revote_cpa",
    "revote_cta",
    "run_pipeline",
    "save_index",
    "threshold",
    "write_annotations",
]
