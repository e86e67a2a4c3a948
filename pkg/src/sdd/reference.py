"""Polynomial baselines: PCE and PDD.

Two routes are provided. :func:`build_reference` realizes PCE/PDD inside the
spline pipeline by using knot sequences without interior knots, whose spline
space is the polynomials of degree ``p``. :func:`legendre_expansion`
assembles a tensor Legendre expansion for uniform inputs directly from the
three-term recurrence, independent of any spline code, and serves as the
oracle that :func:`equivalence_check` compares against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .decomposition import SddExpansion
from .knots import bernstein
from .orthobasis import whiten

KINDS = ("pce", "pdd")


def build_reference(kind, measures, p, S=None):
    """Per-coordinate bases and truncation for a PCE or PDD.

    Returns ``(bases, S)``. PCE always uses ``S = N``.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    measures = list(getattr(measures, "components", measures))
    N = len(measures)
    degrees = [p] * N if np.ndim(p) == 0 else list(p)
    if len(degrees) != N or any(d < 1 for d in degrees):
        raise ValueError("need a degree p >= 1 for every coordinate")
    if kind == "pce":
        S = N
    elif S is None:
        raise ValueError("pdd needs a truncation S")
    bases = [whiten(bernstein(m.a, m.b, d), m) for m, d in zip(measures, degrees)]
    return bases, S


def legendre_values(t, degree):
    """Orthonormal Legendre polynomials on [-1, 1] under the uniform law, shape ``(len(t), degree+1)``."""
    t = np.asarray(t, dtype=float)
    P = np.empty((t.size, degree + 1))
    P[:, 0] = 1.0
    if degree >= 1:
        P[:, 1] = t
    for j in range(1, degree):
        P[:, j + 1] = ((2 * j + 1) * t * P[:, j] - j * P[:, j - 1]) / (j + 1)
    return P * np.sqrt(2 * np.arange(degree + 1) + 1.0)


@dataclass(frozen=True, eq=False)
class LegendreExpansion:
    """Tensor Legendre expansion keyed by full multi-index ``j`` (0 = constant)."""

    N: int
    S: int
    degree: int
    coefficients: dict

    @property
    def y0(self):
        return self.coefficients[(0,) * self.N]

    def mean(self):
        return self.y0

    def variance_by_subset(self):
        out = {}
        for j, c in self.coefficients.items():
            u = tuple(k for k, v in enumerate(j) if v)
            if u:
                out[u] = out.get(u, 0.0) + c * c
        return out

    def variance(self):
        return float(sum(self.variance_by_subset().values()))


def legendre_expansion(func, supports, degree, S=None, breakpoints=None, points_per_element=40):
    """Project ``func`` onto tensor Legendre polynomials of uniform inputs.

    Multi-indices with more than ``S`` non-zero entries are dropped (PDD);
    ``S = None`` keeps the full tensor set (PCE). Integration is composite
    Gauss-Legendre split at ``breakpoints``.
    """
    N = len(supports)
    S = N if S is None else S
    gx, gw = np.polynomial.legendre.leggauss(points_per_element)
    nodes, weights, vals = [], [], []
    for k, (a, b) in enumerate(supports):
        cuts = sorted(t for t in (breakpoints[k] if breakpoints else ()) if a < t < b)
        edges = np.array([a, *cuts, b], dtype=float)
        half = 0.5 * np.diff(edges)
        x = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * gx).ravel()
        w = (half[:, None] * gw).ravel() / (b - a)
        nodes.append(x)
        weights.append(w)
        vals.append(legendre_values((2 * x - a - b) / (b - a), degree))
    grids = np.meshgrid(*nodes, indexing="ij")
    Y = np.asarray(func(np.column_stack([g.ravel() for g in grids])), dtype=float)
    Y = Y.reshape([len(x) for x in nodes])
    T = Y
    for k in range(N - 1, -1, -1):
        T = np.moveaxis(np.tensordot(T, weights[k][:, None] * vals[k], axes=([k], [0])), -1, k)
    coeffs = {}
    for j in itertools.product(range(degree + 1), repeat=N):
        if sum(1 for v in j if v) <= S:
            coeffs[j] = float(T[j])
    return LegendreExpansion(N, S, degree, coeffs)


def _degree_of(e):
    if isinstance(e, LegendreExpansion):
        return {e.degree}
    if any(b.knots.elements != 1 for b in e.bases):
        raise ValueError("spline expansion must use knot sequences without interior knots")
    return {b.degree for b in e.bases}


def equivalence_check(first, second):
    """Compare per-subset and total variances of two polynomial-space expansions.

    Either argument may be an :class:`SddExpansion` built on knots without
    interior knots or a :class:`LegendreExpansion`. Element-wise coefficients
    differ by an orthogonal change of basis, so only subspace variances are
    compared. Returns a report dict.
    """
    for e in (first, second):
        if not isinstance(e, (SddExpansion, LegendreExpansion)):
            raise TypeError(f"cannot compare {type(e).__name__}")
    if first.N != second.N or first.S != second.S:
        raise ValueError("expansions differ in N or S")
    if _degree_of(first) != _degree_of(second) or len(_degree_of(first)) != 1:
        raise ValueError("expansions differ in polynomial degree")
    va, vb = first.variance_by_subset(), second.variance_by_subset()
    rows = {}
    worst = 0.0
    for u in sorted(set(va) | set(vb), key=lambda s: (len(s), s)):
        a, b = va.get(u, 0.0), vb.get(u, 0.0)
        scale = max(abs(a), abs(b))
        rel = abs(a - b) / scale if scale > 0 else 0.0
        rows[u] = (a, b, rel)
        worst = max(worst, rel)
    ta, tb = first.variance(), second.variance()
    scale = max(abs(ta), abs(tb))
    return {
        "subsets": rows,
        "total": (ta, tb, abs(ta - tb) / scale if scale > 0 else 0.0),
        "max_abs_discrepancy": max((abs(a - b) for a, b, _ in rows.values()), default=0.0),
        "max_relative_discrepancy": worst,
    }
