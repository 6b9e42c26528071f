"""netclust: diagnostics and inference for network cluster-robust methods.

Given a graph, diagnose whether low-conductance clusters exist (Laplacian
spectrum), construct them (spectral clustering), score them (conductance),
and run cluster-robust randomization tests alongside network-HAC and IID
t-tests; plus seeded random-graph generators and a Monte Carlo harness.
"""

from .diagnostics import (
    ClusterDiagnostics,
    choose_num_clusters,
    cluster_pipeline,
    quality_report,
)
from .errors import (
    CapacityError,
    DomainError,
    InputError,
    NetclustError,
    NumericError,
)
from .generators import GeneratedGraph, gen_configuration, gen_er, gen_rcm, gen_rgg, gen_sbm
from .graph import (
    ComponentLabeling,
    Graph,
    Partition,
    average_degree,
    conductance,
    connected_components,
    degree,
    edge_boundary,
    max_conductance,
    neighborhood,
    neighborhood_moment,
    path_distance,
    read_edge_list,
    volume,
    write_edge_list,
)
from .inference import (
    ClusterEstimates,
    MomentSample,
    TestResult,
    cluster_means,
    hac_ttest,
    hac_variance,
    iid_ttest,
    randomization_test,
    wald_statistic,
)
from .simulate import MCResult, SimulationConfig, run_monte_carlo
from .spectral import (
    Embedding,
    SpectrumReport,
    brute_force_cheeger,
    kmeans,
    normalized_laplacian,
    spectral_cluster,
    spectral_embedding,
    spectrum,
)

__version__ = "0.1.0"
