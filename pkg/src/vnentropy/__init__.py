"""Randomized estimators for the von Neumann entropy of density matrices.

Three estimation routes are provided next to an exact eigendecomposition
oracle: a truncated-series estimator, a Chebyshev-polynomial estimator
(both built on Gaussian trace estimation and a power-method bound for the
top probability), and a random-projection route for low-rank matrices.
"""

from .chebyshev import (
    ChebCoefficients,
    cheb_coefficients,
    cheb_quadratic_form,
    cheb_scalar_eval,
    chebyshev_entropy,
    default_m_cheb,
)
from .densmat import (
    SparseSymMatrix,
    SpectralModel,
    generate_haar_like_density,
    generate_linear_plus_uniform,
    generate_low_rank_density,
    generate_tridiagonal_poisson,
    matvec,
    poisson_spectrum,
    read_matrix_market,
    write_matrix_market,
)
from .hutchinson import QuadraticFormOracle, default_s, estimate_trace
from .linalg import (
    dense_eigh,
    entropy_from_probs,
    exact_entropy,
    householder_qr,
    thin_singular_values,
)
from .power import PowerEstimate, default_power_params, estimate_u, power_method
from .report import (
    AssumptionCheck,
    EstimateReport,
    EstimatorConfig,
    check_assumptions,
    relative_error,
)
from .rng import RngStream, gaussian_vector, rademacher_vector, uniform_index
from .sketch import (
    ProjectionSpec,
    SketchSpectrum,
    apply_countsketch,
    apply_gaussian,
    apply_srht,
    default_s_sketch,
    fwht_inplace,
    sketch_entropy,
)
from .taylor import (
    default_m_taylor,
    taylor_entropy,
    taylor_quadratic_form,
    taylor_series_terms,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
