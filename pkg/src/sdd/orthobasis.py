"""Measure-consistent orthonormal B-splines.

The first B-spline is replaced by the constant 1 to form the auxiliary vector
``P(x)``. With ``G = E[P P^T] = Q Q^T`` (Cholesky), the orthonormal vector is
``psi(x) = Q^{-1} P(x)``, so that ``E[psi psi^T] = I`` and ``E[psi] = e_1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .bspline import eval_all
from .errors import ConditioningError
from .knots import KnotSequence
from .measures import MeasureSpec, measure_quadrature

PIVOT_THRESHOLD = 1e-12


def auxiliary_vector(knots: KnotSequence, x):
    """``(1, B_1(x), ..., B_{n-1}(x))``; shape ``(len(x), n)`` or ``(n,)``."""
    values = eval_all(knots, x)
    values[..., 0] = 1.0
    return values


def default_points(knots: KnotSequence, measure: MeasureSpec):
    """Gauss points per element used to assemble the moment matrix.

    ``p + 3`` points integrate a product of two degree-``p`` splines against
    a uniform density exactly; non-polynomial or high-order densities get
    more points so the result is accurate to near machine precision.
    """
    p = knots.degree
    if measure.family == "uniform":
        return p + 3
    if measure.is_polynomial_density():
        extra = int(measure.params["alpha"] + measure.params["beta"]) // 2
        return p + 3 + extra
    return p + 3 + 12


def moment_matrix(knots: KnotSequence, measure: MeasureSpec, points_per_element=None):
    """``G = E[P P^T]`` by element-wise Gauss-Legendre split at every knot."""
    if tuple(knots.support) != tuple(measure.support):
        raise ValueError(f"knot span {knots.support} differs from measure support {measure.support}")
    if points_per_element is None:
        points_per_element = default_points(knots, measure)
    rule = measure_quadrature(measure, knots.interior, points_per_element)
    P = auxiliary_vector(knots, rule.nodes)
    G = (P * rule.weights[:, None]).T @ P
    upper = np.triu(G)
    return upper + np.triu(G, 1).T


def cholesky(G, threshold=PIVOT_THRESHOLD):
    """Lower Cholesky factor with a relative pivot guard.

    Raises :class:`ConditioningError` naming the first pivot (squared
    diagonal of the factor) below ``threshold`` times the largest diagonal
    entry of ``G``.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    scale = float(np.max(np.diag(G)))
    L = np.zeros_like(G)
    for j in range(n):
        pivot = G[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > threshold * scale:
            raise ConditioningError(j, pivot / scale, threshold)
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (G[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass(frozen=True, eq=False)
class OrthonormalBasis1D:
    """Whitened spline basis for one coordinate.

    ``factor`` is the lower Cholesky factor ``Q`` of the moment matrix; the
    basis is evaluated by forward substitution ``Q psi = P``.
    """

    knots: KnotSequence
    measure: MeasureSpec
    factor: np.ndarray

    def __post_init__(self):
        factor = np.array(self.factor, dtype=float)
        factor.setflags(write=False)
        object.__setattr__(self, "factor", factor)
        n = self.knots.basis_count()
        if factor.shape != (n, n):
            raise ValueError(f"factor must be {n}x{n}, got {factor.shape}")

    @property
    def n(self):
        return self.factor.shape[0]

    @property
    def degree(self):
        return self.knots.degree

    def __call__(self, x):
        return eval_orthonormal(self, x)

    def to_dict(self):
        return {
            "measure": self.measure.to_dict(),
            "p": self.knots.degree,
            "knots": list(self.knots.knots),
            "cholesky_factor": self.factor.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        knots = KnotSequence(tuple(d["knots"]), d["p"])
        n = knots.basis_count()
        factor = np.asarray(d["cholesky_factor"], dtype=float).reshape(n, n)
        return cls(knots, MeasureSpec.from_dict(d["measure"]), factor)


def whiten(knots: KnotSequence, measure: MeasureSpec, points_per_element=None):
    """Orthonormalize the spline space of ``knots`` against ``measure``."""
    G = moment_matrix(knots, measure, points_per_element)
    return OrthonormalBasis1D(knots, measure, cholesky(G))


def eval_orthonormal(basis: OrthonormalBasis1D, x):
    """``psi(x)``; shape ``(len(x), n)`` for arrays, ``(n,)`` for scalars."""
    scalar = np.ndim(x) == 0
    P = np.atleast_2d(auxiliary_vector(basis.knots, x))
    psi = solve_triangular(basis.factor, P.T, lower=True).T
    return psi[0] if scalar else psi
