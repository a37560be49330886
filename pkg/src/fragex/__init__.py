"""fragex: explore information fragments scattered across git history."""

__version__ = "0.1.0"

from .clustering import (
    Cluster,
    Dendrogram,
    SimilarityWeights,
    build_dendrogram,
    cluster_by_release,
    cut,
    granularity_to_k,
    node_features,
    similarity,
)
from .fragments import (
    Fragment,
    FragmentHistory,
    InspectionMatrix,
    PinBoard,
    PinStore,
    contains,
    history,
    inspect,
    list_pins,
    pin,
    unpin,
)
from .ingest import (
    CommitRecord,
    FileChange,
    RepoSnapshot,
    derive_directories,
    dump_snapshot,
    extract_live,
    load_dump,
    load_source,
    parse_dump,
    tokenize_keywords,
)
from .scope import Scope, ScopeFilter, rescope, resolve_scope
from .stem import StemNode, StemSequence, annotate_releases, build_stem
from .table import (
    Dimension,
    DimensionValueTable,
    FrequencyEntry,
    build_table,
    commit_details,
    full_frequency,
    table_payload,
    table_to_csv,
    top_k,
)
