"""graphfuse: anomaly detection for time series of graphs.

Computes nine structural features per time step, standardizes them
against a sliding window of recent history, fuses them with equal or
adaptive weights, and tests each step against an empirical critical
value. Ships a planted-chatter simulator and a Monte Carlo power
harness.
"""

from .graph import (
    Graph,
    GraphSeries,
    bfs_distances,
    connected_components,
    degrees,
    from_edge_list,
    induced_edge_count,
    kth_neighborhood,
    to_edge_list,
)
from .invariants import (
    FEATURE_NAMES,
    N_FEATURES,
    ConvergenceError,
    FeatureVector,
    all_features,
    clustering_coeff,
    mad_eig,
    max_degree,
    neg_apl,
    scan,
    series_features,
    size,
    triangles,
    vertex_scan,
)
from .temporal import (
    InsufficientHistoryError,
    NormalizedFeatures,
    WindowParams,
    normalize,
    running_stats,
    vertex_standardize,
)
from .fusion import (
    DetectionResult,
    NullReference,
    WeightScheme,
    adaptive_weights,
    critical_value,
    equal_weights,
    fuse,
    power,
    test_at,
)
from .simulate import (
    KappaParams,
    LatentVectors,
    SeededRng,
    make_latent,
    sample_kappa,
    sample_rdpg_from_vectors,
    sample_rdpg_series,
    sample_series,
)
from .harness import (
    ExperimentSpec,
    PowerBundle,
    PowerResult,
    Table2Row,
    best_subset,
    detect_series,
    normalized_series_features,
    run_power,
    scheme_comparison_table,
    simulate_normalized_slices,
)
from .io import (
    ParsedSeries,
    emit_results,
    load_results,
    parse_edge_list,
    write_edge_list,
)

__version__ = "0.1.0"
