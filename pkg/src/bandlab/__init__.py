"""bandlab: numerical laboratory for non-Hermitian random band matrices."""

from .ensemble import (
    DISTRIBUTION_ALIASES,
    DISTRIBUTIONS,
    GAUSSIAN_COMPLEX,
    GAUSSIAN_REAL,
    RADEMACHER,
    UNIFORM_REAL,
    EntryDistribution,
    MatrixSample,
    gaussian_companion,
    sample,
    shifted,
)
from .experiments import ExperimentConfig, ExperimentReport, emit_csv, emit_plot, run
from .profile import (
    GAUSS,
    INDICATOR,
    NormConditionReport,
    ProfileFunction,
    VarianceProfile,
    build_block_band,
    build_circulant,
    from_entries,
    inverse_norm_block_fast,
    inverse_norm_circulant_fast,
    inverse_norm_dense,
    load_explicit_csv,
    scan_norm_condition,
    validate,
)
from .selfconsistent import (
    SelfConsistentSolution,
    mc_curve,
    mc_limit,
    solve_hermitized,
    solve_mc,
    solve_mc_hermitized,
)
from .spectra import (
    HermitizedMatrix,
    SpectralSummary,
    circular_law_distance,
    count_small_singulars,
    eigenvalues,
    empirical_stieltjes,
    hermitize,
    kolmogorov_distance,
    least_singular,
    log_det_avg,
    singular_values,
)

__version__ = "0.1.0"
