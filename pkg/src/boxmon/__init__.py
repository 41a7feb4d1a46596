"""Box-abstraction runtime monitors for classifier feature spaces.

Tight per-class boxes are built over clustered reference activations, verdicts
are looked up by box membership, and grid-cell coverage bounds quantify how
much of the global feature box the local boxes retain.
"""

from .clustering import (
    ClusteringConfig,
    KCache,
    Partition,
    TauKMeans,
    TauSearchResult,
    TuneConfig,
    kmeans_by_tau,
    kmeans_fixed_k,
    mean_coverage_at_tau,
    search_tau_max,
    search_tau_min,
)
from .coverage import (
    CoverageEstimate,
    CoveredSpace,
    ResolutionGrid,
    boxes_coverage,
    clustering_coverage,
    covered_cell_count,
    covered_cell_ranges,
    covered_space,
    exact_coverage_oracle,
    subbox_coverage,
)
from .errors import (
    BoxmonError,
    DimensionMismatch,
    EmptyPointSet,
    FeatureFileError,
    InputError,
    InternalError,
    InvalidPartition,
    KTooLarge,
    MalformedMonitorFile,
    NotASubBox,
    TooManyCells,
    UnknownClass,
)
from .evaluation import (
    Metrics,
    OutcomeCounts,
    SweepRow,
    classify_outcome,
    evaluate,
    metrics,
    sweep,
)
from .geometry import Box, box_of, contains, intersect, is_subbox
from .io import (
    FeatureSet,
    read_feature_file,
    write_feature_file,
)
from .monitor import (
    BoxMonitor,
    ClassMonitor,
    FeatureRecord,
    Verdict,
    build_class_monitor,
    deserialize_monitor,
    monitor_verdict,
    run_monitor,
    serialize_monitor,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "BoxMonitor",
    "BoxmonError",
    "ClassMonitor",
    "ClusteringConfig",
    "CoverageEstimate",
    "CoveredSpace",
    "DimensionMismatch",
    "EmptyPointSet",
    "FeatureFileError",
    "FeatureRecord",
    "FeatureSet",
    "InputError",
    "InternalError",
    "InvalidPartition",
    "KCache",
    "KTooLarge",
    "MalformedMonitorFile",
    "Metrics",
    "NotASubBox",
    "OutcomeCounts",
    "Partition",
    "ResolutionGrid",
    "SweepRow",
    "TauKMeans",
    "TauSearchResult",
    "TooManyCells",
    "TuneConfig",
    "UnknownClass",
    "Verdict",
    "box_of",
    "boxes_coverage",
    "build_class_monitor",
    "classify_outcome",
    "clustering_coverage",
    "contains",
    "covered_cell_count",
    "covered_cell_ranges",
    "covered_space",
    "deserialize_monitor",
    "evaluate",
    "exact_coverage_oracle",
    "intersect",
    "is_subbox",
    "kmeans_by_tau",
    "kmeans_fixed_k",
    "mean_coverage_at_tau",
    "metrics",
    "monitor_verdict",
    "read_feature_file",
    "run_monitor",
    "search_tau_max",
    "search_tau_min",
    "serialize_monitor",
    "subbox_coverage",
    "sweep",
    "write_feature_file",
    "__version__",
]
