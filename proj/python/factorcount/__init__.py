"""Factor-count estimation via bias-corrected information criteria.

Thin Python facade over the C++ core (`factorcount._core`).
"""

from factorcount._core import (
    InputError,
    NumericalError,
    choose_m0,
    find_support,
    generate_panel,
    ingest_csv,
    mu_x,
    pc_original,
    pc_star,
    pca_objective,
    penalty,
    population_eigenvalues,
    run_count_study,
    run_noise_study,
    sample_spectrum,
    sigma2_mle,
    sigma2_star,
    spike_forward,
    spike_inverse,
    stieltjes_companion,
)

__all__ = [
    "InputError",
    "NumericalError",
    "choose_m0",
    "find_support",
    "generate_panel",
    "ingest_csv",
    "mu_x",
    "pc_original",
    "pc_star",
    "pca_objective",
    "penalty",
    "population_eigenvalues",
    "run_count_study",
    "run_noise_study",
    "sample_spectrum",
    "sigma2_mle",
    "sigma2_star",
    "spike_forward",
    "spike_inverse",
    "stieltjes_companion",
]

__version__ = "0.1.0"
