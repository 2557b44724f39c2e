"""Numerical laboratory for L^p norms of exponential sums over random frequency sets."""

from .expsum import (
    Autocorrelation,
    CoefficientDomain,
    CoefficientSeq,
    FrequencySet,
    GridSpec,
    GridTooSmallError,
    autocorrelation,
    dirichlet_norm,
    evaluate_on_grid,
    lp_norm,
    lp_norm_even_exact,
)
from .extremal import (
    ExtremalResult,
    SearchParams,
    ascend,
    exhaustive_phase_search,
    linearization_coeffs,
    majorant_ratio,
)
from .setgen import (
    RandomSetModel,
    Seed,
    SetFileError,
    gen_ap,
    gen_ap2d,
    gen_bernoulli,
    gen_doubling,
    gen_perturbed_ap,
    gen_power_selector,
    gen_squares,
    read_set_file,
    write_set_file,
)
from .scaling import (
    ExperimentConfig,
    ScalingReport,
    baseline_bounds,
    fit_power_law,
    predicted_exponent,
    run_experiment,
    squares_kink,
    star_ratio,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
