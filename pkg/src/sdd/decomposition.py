"""Truncated spline dimensional decomposition.

An S-variate expansion of ``y(X)`` is

    y0 + sum over subsets u (1 <= |u| <= S) and reduced indices i_u of
         C[u, i_u] * prod_{k in u} psi_k[i_k](x_k)

where every component of ``i_u`` skips the constant element (index 0). All
indices are zero-based. Terms are ordered by ``|u|``, then ``u``, then
``i_u``, all lexicographically.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .measures import ProductMeasure, measure_quadrature
from .orthobasis import OrthonormalBasis1D

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAX_QUADRATURE_DIM = 6
MAX_GRID_POINTS = 20_000_000
CONDITION_WARNING = 1e10
CHUNK_ROWS = 1 << 15
SAMPLE_STREAM_SIZE = 1 << 16


# -- index sets ---------------------------------------------------------------


def subsets(N, S):
    """All coordinate subsets with ``1 <= |u| <= S``, ordered by size then lexicographically."""
    if not 1 <= S <= N:
        raise ValueError(f"truncation S={S} must satisfy 1 <= S <= N={N}")
    for size in range(1, S + 1):
        yield from itertools.combinations(range(N), size)


def reduced_indices(u, n):
    """Reduced multi-indices of subset ``u``: each ``i_k`` runs over ``1..n_k-1``."""
    return itertools.product(*(range(1, n[k]) for k in u))


def enumerate_terms(N, S, n):
    """Ordered ``(u, i_u)`` pairs of an S-variate expansion, constant excluded."""
    n = tuple(int(v) for v in n)
    if len(n) != N:
        raise ValueError(f"expected {N} basis counts, got {len(n)}")
    if any(v < 2 for v in n):
        raise ValueError("every coordinate needs at least two basis functions")
    return [(u, i) for u in subsets(N, S) for i in reduced_indices(u, n)]


def term_count(N, S, n):
    """Number of expansion coefficients including the constant."""
    total = 1
    for u in subsets(N, S):
        total += math.prod(n[k] - 1 for k in u)
    return total


# -- multivariate basis -------------------------------------------------------


def _psi_matrices(bases, x, coords=None):
    coords = range(len(bases)) if coords is None else coords
    return {k: bases[k](x[:, k]) for k in coords}


def eval_multivariate(bases: Sequence[OrthonormalBasis1D], u, i, x):
    """``prod_{k in u} psi_k[i_k](x_k)`` at one point or an ``(L, N)`` array."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    out = np.ones(x.shape[0])
    for k, ik in zip(u, i):
        out = out * bases[k](x[:, k])[:, ik]
    return out[0] if scalar else out


def _subset_columns(psi, u):
    """Columns ``prod psi_k[:, i_k]`` over all reduced ``i_u`` in term order."""
    cols = psi[u[0]][:, 1:]
    for k in u[1:]:
        nxt = psi[k][:, 1:]
        cols = (cols[:, :, None] * nxt[:, None, :]).reshape(cols.shape[0], -1)
    return cols


def design_matrix(bases, S, x):
    """Matrix with columns ``[1, Psi_t(x)...]`` in term order; shape ``(L, 1 + T)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    psi = _psi_matrices(bases, x)
    blocks = [np.ones((x.shape[0], 1))]
    blocks += [_subset_columns(psi, u) for u in subsets(len(bases), S)]
    return np.hstack(blocks)


# -- the expansion ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SddExpansion:
    """A fitted truncated expansion.

    ``coefficients`` follows :func:`enumerate_terms` order for the basis
    counts of ``bases``; ``metadata`` records how the fit was obtained.
    """

    bases: tuple[OrthonormalBasis1D, ...]
    S: int
    y0: float
    coefficients: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        object.__setattr__(self, "y0", float(self.y0))
        coeffs = np.array(self.coefficients, dtype=float).ravel()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        expected = term_count(self.N, self.S, self.n) - 1
        if coeffs.size != expected:
            raise ValueError(f"expected {expected} coefficients, got {coeffs.size}")

    @property
    def N(self):
        return len(self.bases)

    @property
    def n(self):
        return tuple(b.n for b in self.bases)

    @property
    def measures(self):
        return ProductMeasure(tuple(b.measure for b in self.bases))

    @cached_property
    def terms(self):
        return enumerate_terms(self.N, self.S, self.n)

    @cached_property
    def _blocks(self):
        """``[(u, slice, shape)]`` locating each subset's coefficient tensor."""
        out, start = [], 0
        for u in subsets(self.N, self.S):
            shape = tuple(self.n[k] - 1 for k in u)
            size = math.prod(shape)
            out.append((u, slice(start, start + size), shape))
            start += size
        return out

    def coefficient(self, u, i):
        u, i = tuple(u), tuple(i)
        for uu, sl, shape in self._blocks:
            if uu == u:
                return float(self.coefficients[sl][np.ravel_multi_index(tuple(v - 1 for v in i), shape)])
        raise KeyError(u)

    def __len__(self):
        return self.coefficients.size + 1

    def __call__(self, x):
        return evaluate(self, x)

    # -- statistics ---------------------------------------------------------

    def mean(self):
        return self.y0

    def variance_by_subset(self):
        """Variance contributed by each subset, ``{u: sum of C^2}``."""
        return {u: float(np.sum(self.coefficients[sl] ** 2)) for u, sl, _ in self._blocks}

    def variance(self):
        return float(np.sum(self.coefficients**2))

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "N": self.N,
            "S": self.S,
            "coordinates": [b.to_dict() for b in self.bases],
            "y0": self.y0,
            "terms": [
                {"u": list(u), "i_u": list(i), "c": float(c)}
                for (u, i), c in zip(self.terms, self.coefficients)
            ],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported expansion format version {d.get('version')!r}")
        bases = tuple(OrthonormalBasis1D.from_dict(c) for c in d["coordinates"])
        if len(bases) != d["N"]:
            raise ValueError("coordinate count does not match N")
        expected = enumerate_terms(d["N"], d["S"], tuple(b.n for b in bases))
        got = [(tuple(t["u"]), tuple(t["i_u"])) for t in d["terms"]]
        if got != expected:
            raise ValueError("terms are not the complete ordered index set")
        return cls(bases, d["S"], d["y0"], [t["c"] for t in d["terms"]], d.get("metadata", {}))

    def dumps(self):
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


def evaluate(e: SddExpansion, x, threads=None):
    """Surrogate values at one point (length-N vector) or rows of an ``(L, N)`` array."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != e.N:
        raise ValueError(f"expected {e.N} input columns, got {x.shape[1]}")
    e.measures.check_box(x)
    chunks = [x[s:s + CHUNK_ROWS] for s in range(0, x.shape[0], CHUNK_ROWS)]
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda c: _evaluate_rows(e, c), chunks))
    else:
        parts = [_evaluate_rows(e, c) for c in chunks]
    out = np.concatenate(parts) if parts else np.zeros(0)
    return float(out[0]) if scalar else out


def _evaluate_rows(e, x):
    rows = x.shape[0]
    psi = _psi_matrices(e.bases, x)
    out = np.full(rows, e.y0)
    for u, sl, shape in e._blocks:
        C = e.coefficients[sl].reshape(shape)
        # contract the last coordinate, then fold the rest row by row
        res = psi[u[-1]][:, 1:] @ C.reshape(-1, shape[-1]).T
        for pos in range(len(u) - 2, -1, -1):
            res = res.reshape(rows, -1, shape[pos])
            res = np.einsum("rad,rd->ra", res, psi[u[pos]][:, 1:])
        out += res.reshape(rows)
    return out


# -- coefficient estimation: quadrature ---------------------------------------


def _coordinate_rules(bases, breakpoints, points_per_element):
    rules = []
    for k, b in enumerate(bases):
        extra = breakpoints[k] if breakpoints is not None else ()
        a_, b_ = b.measure.support
        cuts = sorted({float(t) for t in list(b.knots.interior) + list(extra) if a_ < t < b_})
        rules.append(measure_quadrature(b.measure, cuts, points_per_element))
    return rules


def _project(Y, weights, factors, u):
    """Contract grid values with weights (coordinates outside u) or weighted basis (inside)."""
    T = Y
    # contract from the last axis so earlier axis positions stay valid
    for k in range(Y.ndim - 1, -1, -1):
        if k in u:
            T = np.moveaxis(np.tensordot(T, factors[k], axes=([k], [0])), -1, k)
        else:
            T = np.tensordot(T, weights[k], axes=([k], [0]))
    return T


def _quadrature_coefficients(func, bases, S, breakpoints, points_per_element, threads):
    N = len(bases)
    rules = _coordinate_rules(bases, breakpoints, points_per_element)
    sizes = [len(r) for r in rules]
    total = math.prod(sizes)
    if total > MAX_GRID_POINTS:
        raise ValueError(
            f"tensor quadrature grid has {total} points (limit {MAX_GRID_POINTS}); "
            "lower points_per_element or use regression"
        )
    grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    X = np.column_stack([g.ravel() for g in grids])
    Y = np.asarray(func(X), dtype=float).reshape(sizes)
    weights = [r.weights for r in rules]
    factors = [r.weights[:, None] * bases[k](r.nodes)[:, 1:] for k, r in enumerate(rules)]
    y0 = float(_project(Y, weights, factors, ()))
    subs = list(subsets(N, S))
    work = lambda u: _project(Y, weights, factors, u).ravel()
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, subs))
    else:
        parts = [work(u) for u in subs]
    return y0, np.concatenate(parts)


def fit_quadrature(
    func: Callable[[np.ndarray], np.ndarray],
    bases: Sequence[OrthonormalBasis1D],
    S: int,
    breakpoints=None,
    points_per_element: int = 12,
    tol: float | None = None,
    max_doublings: int = 6,
    threads: int | None = None,
):
    """Expansion coefficients by full tensor-product composite quadrature.

    ``func`` maps an ``(M, N)`` array of inputs to ``M`` outputs. Each
    coordinate's rule is split at its knots and at ``breakpoints[k]``, the
    declared non-smooth loci of ``func``. With ``tol`` set, the number of
    points per element is doubled until no coefficient changes by more
    than ``tol``.
    """
    bases = tuple(bases)
    N = len(bases)
    if N > MAX_QUADRATURE_DIM:
        raise ValueError(
            f"quadrature fitting supports at most {MAX_QUADRATURE_DIM} inputs; use regression"
        )
    if breakpoints is not None and len(breakpoints) != N:
        raise ValueError(f"expected breakpoints for {N} coordinates")
    enumerate_terms(N, S, tuple(b.n for b in bases))
    ppe = int(points_per_element)
    y0, coeffs = _quadrature_coefficients(func, bases, S, breakpoints, ppe, threads)
    meta = {"method": "quadrature", "points_per_element": ppe}
    if tol is not None:
        converged = False
        for _ in range(max_doublings):
            ppe *= 2
            y0_new, c_new = _quadrature_coefficients(func, bases, S, breakpoints, ppe, threads)
            change = max(abs(y0_new - y0), float(np.max(np.abs(c_new - coeffs), initial=0.0)))
            y0, coeffs = y0_new, c_new
            if change < tol:
                converged = True
                break
        meta.update(points_per_element=ppe, converged=converged, last_change=change)
        if not converged:
            log.warning("quadrature did not converge to %.1e (last change %.3e)", tol, change)
    return SddExpansion(bases, S, y0, coeffs, meta)


# -- coefficient estimation: regression ---------------------------------------


@dataclass(frozen=True)
class SurrogateSample:
    """Paired inputs ``x`` (shape ``(L, N)``) and outputs ``y`` (shape ``(L,)``)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape[0] != y.shape[0]:
            raise ValueError(f"{x.shape[0]} input rows but {y.shape[0]} outputs")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.size


def fit_regression(
    samples: SurrogateSample,
    bases: Sequence[OrthonormalBasis1D],
    S: int,
    ridge: float | None = None,
    min_ratio: float = 2.0,
):
    """Least-squares expansion coefficients from input/output samples.

    Solved by a QR factorization of the design matrix. ``ridge`` adds
    ``ridge * I`` to the normal equations (via an augmented system).
    At least ``min_ratio`` samples per coefficient are required.
    """
    bases = tuple(bases)
    N = len(bases)
    if samples.x.shape[1] != N:
        raise ValueError(f"samples have {samples.x.shape[1]} inputs, expected {N}")
    ProductMeasure(tuple(b.measure for b in bases)).check_box(samples.x)
    ncoef = term_count(N, S, tuple(b.n for b in bases))
    if len(samples) < ncoef:
        raise ValueError(f"{len(samples)} samples cannot determine {ncoef} coefficients")
    if len(samples) < min_ratio * ncoef:
        raise ValueError(
            f"{len(samples)} samples is below {min_ratio} x {ncoef} coefficients; "
            "add samples or lower min_ratio"
        )
    A = design_matrix(bases, S, samples.x)
    rhs = samples.y
    if ridge:
        if ridge < 0:
            raise ValueError("ridge must be non-negative")
        A = np.vstack([A, math.sqrt(ridge) * np.eye(ncoef)])
        rhs = np.concatenate([rhs, np.zeros(ncoef)])
    Q, R = scipy.linalg.qr(A, mode="economic")
    sol = scipy.linalg.solve_triangular(R, Q.T @ rhs)
    cond = float(np.linalg.cond(R))
    meta = {"method": "regression", "samples": len(samples), "condition": cond}
    if ridge:
        meta["ridge"] = float(ridge)
    if not cond <= CONDITION_WARNING:
        meta["warnings"] = [f"design matrix condition estimate {cond:.3e} exceeds {CONDITION_WARNING:.0e}"]
        log.warning(meta["warnings"][0])
    return SddExpansion(bases, S, sol[0], sol[1:], meta)


# -- sampling -----------------------------------------------------------------


def _stream(seed, index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def draw_inputs(measures: ProductMeasure, count, seed, threads=None):
    """``count`` input vectors by inverse CDF from seeded counter-based streams.

    Stream ``j`` produces rows ``j*SAMPLE_STREAM_SIZE`` onward, so the result
    does not depend on ``threads``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    starts = list(range(0, count, SAMPLE_STREAM_SIZE))

    def block(j):
        rows = min(SAMPLE_STREAM_SIZE, count - starts[j])
        return measures.sample(_stream(seed, j).random((rows, measures.dim)))

    if threads and threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, range(len(starts))))
    else:
        parts = [block(j) for j in range(len(starts))]
    return np.vstack(parts)


def sample_surrogate(e: SddExpansion, count, seed, measures=None, threads=None):
    """Sorted surrogate outputs at ``count`` seeded random inputs."""
    measures = e.measures if measures is None else measures
    x = draw_inputs(measures, count, seed, threads)
    return np.sort(evaluate(e, x, threads))


def empirical_cdf(sorted_values):
    """Empirical CDF ``(value, rank / count)`` of already sorted samples."""
    v = np.asarray(sorted_values, dtype=float)
    return v, np.arange(1, v.size + 1) / v.size
