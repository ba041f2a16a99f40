"""Spectral statistics of random regular graphs against Tracy-Widom laws."""

from .ensembles import (
    EnsembleSpec,
    RegularGraph,
    bipartition,
    build_bipartite,
    build_cyclic_model,
    build_matching_model,
    build_perm_model,
    is_connected,
    is_simple,
    read_graph,
    sample_ensemble,
    sample_n_cycle,
    sample_perfect_matching,
    sample_permutation,
    write_graph,
)
from .exceptions import (
    DegenerateSampleError,
    FitDomainError,
    GridCoverageError,
    IntegrationError,
    SamplingExhaustedError,
    SizeLimitError,
)
from .harness import (
    ExperimentConfig,
    RunStore,
    emit_plot_data,
    goe_validate,
    run_cell,
    run_experiment,
    task_seed,
)
from .spectra import (
    CheegerReport,
    SpectralSummary,
    SpectralTransformer,
    cheeger_bruteforce,
    dense_spectrum,
    extremal_nontrivial,
    nontrivial_from_spectrum,
    ramanujan_bound,
    ramanujan_check,
)
from .stats import (
    PowerLawRegressor,
    Standardizer,
    chi_square_gof,
    correlation,
    fit_exponents,
    independence_product_check,
    percent_ramanujan,
    standardize,
    threshold_sigma_distance,
    z_mass_left,
    z_statistic,
)
from .tracy_widom import (
    TracyWidom,
    reference_distribution,
    solve_painleve_ii,
    tw_cdf,
    tw_moments,
    tw_pdf,
    tw_quantile,
    tw_table,
)

__version__ = "0.1.0"
