"""B-spline evaluation by the Cox-de Boor recursion.

Indices are zero-based: ``B_0 .. B_{n-1}``. Elements are half-open
``[t_j, t_{j+1})`` except the last non-empty one, which is closed at ``b`` so
every basis is defined on the whole closed interval.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .knots import KnotSequence


def _check_points(knots: KnotSequence, x):
    x = np.asarray(x, dtype=float)
    a, b = knots.support
    if np.any(x < a) or np.any(x > b) or np.any(np.isnan(x)):
        raise DomainError(f"points outside [{a}, {b}]")
    return x


def eval_bspline(knots: KnotSequence, i: int, x: float) -> float:
    """Value of the single B-spline ``B_i`` at scalar ``x`` (0/0 taken as 0)."""
    n = knots.basis_count()
    if not 0 <= i < n:
        raise ValueError(f"basis index {i} out of range 0..{n - 1}")
    x = float(_check_points(knots, x))
    t = knots.knots
    b = t[-1]

    def rec(j, p):
        if p == 0:
            if t[j] <= x < t[j + 1]:
                return 1.0
            return 1.0 if x == b and t[j] < t[j + 1] == b else 0.0
        left = right = 0.0
        den = t[j + p] - t[j]
        if den > 0:
            left = (x - t[j]) / den * rec(j, p - 1)
        den = t[j + p + 1] - t[j + 1]
        if den > 0:
            right = (t[j + p + 1] - x) / den * rec(j + 1, p - 1)
        return left + right

    return rec(i, knots.degree)


def find_span(knots: KnotSequence, x):
    """Index ``s`` into the flat knot vector with ``t_s <= x < t_{s+1}``."""
    t = knots.as_array()
    p = knots.degree
    n = knots.basis_count()
    s = np.searchsorted(t, x, side="right") - 1
    return np.clip(s, p, n - 1)


def eval_nonzero(knots: KnotSequence, x):
    """The ``p + 1`` possibly non-zero B-splines at each point.

    Returns ``(span, values)`` where ``values[:, r]`` is ``B_{span - p + r}``.
    """
    x = np.atleast_1d(_check_points(knots, x))
    t = knots.as_array()
    p = knots.degree
    span = find_span(knots, x)
    vals = np.zeros((x.size, p + 1))
    vals[:, 0] = 1.0
    left = np.zeros((x.size, p + 1))
    right = np.zeros((x.size, p + 1))
    for j in range(1, p + 1):
        left[:, j] = x - t[span + 1 - j]
        right[:, j] = t[span + j] - x
        saved = np.zeros(x.size)
        for r in range(j):
            # denominator >= t[span+1] - t[span] > 0 inside a non-empty element
            temp = vals[:, r] / (right[:, r + 1] + left[:, j - r])
            vals[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        vals[:, j] = saved
    return span, vals


def eval_all(knots: KnotSequence, x):
    """Dense matrix of all B-splines, shape ``(len(x), n)``; 1-D for scalar x."""
    scalar = np.ndim(x) == 0
    span, vals = eval_nonzero(knots, x)
    p = knots.degree
    out = np.zeros((vals.shape[0], knots.basis_count()))
    cols = span[:, None] - p + np.arange(p + 1)[None, :]
    np.put_along_axis(out, cols, vals, axis=1)
    return out[0] if scalar else out
