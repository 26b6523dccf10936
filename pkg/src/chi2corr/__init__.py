"""1/n-accurate distribution of T = X^T X for statistics with an idempotent limiting covariance."""

from .corrections import (
    CorrectionConstants,
    CumulantModel,
    compute_a,
    compute_b,
    compute_c,
    compute_constants,
    compute_d,
    null_space_leakage,
)
from .distribution import (
    CorrectedDistribution,
    basis_coefficients,
    chi2_cdf,
    chi2_pdf_factor,
    corrected_cdf,
    corrected_pdf,
    corrected_quantile,
    evaluate_basis,
)
from .errors import (
    DimensionError,
    EigenvalueNotNearProjector,
    IdempotencyError,
    ModelError,
    NonIntegerTraceError,
    NonMonotoneWarning,
    NotOrthonormalError,
    NumericalError,
    SchemaError,
    SymmetryError,
)
from .models import MultinomialSpec, load_model, multinomial_model, save_model
from .montecarlo import EmpiricalComparison, compare, empirical_cdf, sample_pearson
from .spectral import SpectralSplit, classify_eigenvalue, split_idempotent

__version__ = "0.1.0"
