"""Spline dimensional decomposition for uncertainty quantification."""

__version__ = "0.1.0"

from .bench import example1, exact_variance_example1, get_benchmark, relative_variance_error
from .bspline import eval_all, eval_bspline
from .decomposition import (
    SddExpansion,
    SurrogateSample,
    enumerate_terms,
    eval_multivariate,
    evaluate,
    fit_quadrature,
    fit_regression,
    sample_surrogate,
)
from .errors import ConditioningError, DomainError
from .knots import KnotSequence, open_uniform
from .measures import MeasureSpec, ProductMeasure, measure_quadrature
from .orthobasis import OrthonormalBasis1D, auxiliary_vector, eval_orthonormal, moment_matrix, whiten
from .reference import build_reference, equivalence_check, legendre_expansion
