"""Constraint-based causal discovery over vector-valued variables."""

from .aggregation import (
    AdagResult,
    ConsistencyReport,
    TunableAggregationMap,
    ac_score,
    adag,
    apply_map,
    c_ind_score,
    compute_report,
    effective_c_dep_score,
    fit_pca,
    make_weight_stacks,
    meta_c_dep_score,
)
from .citests import (
    CiConfig,
    TestRecord,
    ci_dispatch,
    fisher_z_parcorr,
    gcm_test,
    max_corr_test,
    residualize,
)
from .data import Dataset, load_csv, save_csv
from .discovery import (
    DiscoveryResult,
    EdgeCounts,
    aggregate_edges,
    lag_expand,
    pc_stable,
    s2v,
    s2v2,
    vectorized_pc,
)
from .graphs import (
    MixedGraph,
    Partition,
    acyclify,
    apply_meek_rules,
    coarsen,
    cpdag_of,
    dag_from_edges,
    inducing_path_exists,
    m_separated,
    possible_dsep_set,
)
from .harness import (
    ExperimentConfig,
    Metrics,
    emit_csv,
    emit_summary_csv,
    evaluate_graph,
    run_experiment,
    summarize,
)
from .oracle import GaussianCovCi, GraphOracleCi
from .synth import (
    SavarSpec,
    VectorScmSpec,
    gen_confounder_xyz,
    gen_counterexample,
    gen_savar,
    gen_vector_scm,
    population_covariance,
    random_macro_dag,
)

__all__ = [
    "AdagResult",
    "ConsistencyReport",
    "TunableAggregationMap",
    "ac_score",
    "adag",
    "apply_map",
    "c_ind_score",
    "compute_report",
    "effective_c_dep_score",
    "fit_pca",
    "make_weight_stacks",
    "meta_c_dep_score",
    "CiConfig",
    "TestRecord",
    "ci_dispatch",
    "fisher_z_parcorr",
    "gcm_test",
    "max_corr_test",
    "residualize",
    "Dataset",
    "load_csv",
    "save_csv",
    "DiscoveryResult",
    "EdgeCounts",
    "aggregate_edges",
    "lag_expand",
    "pc_stable",
    "s2v",
    "s2v2",
    "vectorized_pc",
    "MixedGraph",
    "Partition",
    "acyclify",
    "apply_meek_rules",
    "coarsen",
    "cpdag_of",
    "dag_from_edges",
    "inducing_path_exists",
    "m_separated",
    "possible_dsep_set",
    "ExperimentConfig",
    "Metrics",
    "emit_csv",
    "emit_summary_csv",
    "evaluate_graph",
    "run_experiment",
    "summarize",
    "GaussianCovCi",
    "GraphOracleCi",
    "SavarSpec",
    "VectorScmSpec",
    "gen_confounder_xyz",
    "gen_counterexample",
    "gen_savar",
    "gen_vector_scm",
    "population_covariance",
    "random_macro_dag",
]

__version__ = "0.1.0"
