"""(p+1)-open knot sequences.

A knot sequence of degree ``p`` on ``[a, b]`` repeats each endpoint exactly
``p + 1`` times; interior knots may repeat up to ``p + 1`` times, which lowers
the smoothness across that knot to ``C^(p - m)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class KnotSequence:
    """Non-decreasing knot vector of length ``n + p + 1`` with degree ``p``.

    Knot values are compared exactly: repeated knots must be bitwise equal.
    """

    knots: tuple[float, ...]
    degree: int

    def __post_init__(self):
        knots = tuple(float(t) for t in self.knots)
        p = int(self.degree)
        if p != self.degree or p < 0:
            raise ValueError("degree must be a non-negative integer")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "degree", p)
        if len(knots) < 2 * (p + 1):
            raise ValueError(f"need at least {2 * (p + 1)} knots for degree {p}")
        arr = np.asarray(knots)
        if not np.all(np.isfinite(arr)) or np.any(np.diff(arr) < 0):
            raise ValueError("knots must be finite and non-decreasing")
        distinct, mult = self._distinct_view(knots)
        if len(distinct) < 2:
            raise ValueError("knot sequence must span a non-degenerate interval")
        if mult[0] != p + 1 or mult[-1] != p + 1:
            raise ValueError(
                f"endpoints must each appear exactly p+1={p + 1} times "
                f"(got {mult[0]} and {mult[-1]})"
            )
        if any(m > p + 1 for m in mult[1:-1]):
            raise ValueError(f"interior knot multiplicity exceeds p+1={p + 1}")

    @staticmethod
    def _distinct_view(knots):
        distinct, mult = [], []
        for t in knots:
            if distinct and t == distinct[-1]:
                mult[-1] += 1
            else:
                distinct.append(t)
                mult.append(1)
        return tuple(distinct), tuple(mult)

    @classmethod
    def from_distinct(cls, distinct, multiplicities, degree):
        """Inverse of :attr:`distinct` / :attr:`multiplicities`."""
        if len(distinct) != len(multiplicities):
            raise ValueError("distinct knots and multiplicities differ in length")
        flat = []
        for t, m in zip(distinct, multiplicities):
            flat.extend([float(t)] * int(m))
        return cls(tuple(flat), degree)

    @cached_property
    def distinct(self):
        return self._distinct_view(self.knots)[0]

    @cached_property
    def multiplicities(self):
        return self._distinct_view(self.knots)[1]

    @property
    def support(self):
        return self.knots[0], self.knots[-1]

    @property
    def elements(self):
        """Number of non-empty sub-intervals, ``r - 1``."""
        return len(self.distinct) - 1

    @property
    def interior(self):
        return self.distinct[1:-1]

    def basis_count(self):
        """Dimension of the spline space: interior multiplicities plus ``p + 1``."""
        return sum(self.multiplicities[1:-1]) + self.degree + 1

    def mesh_size(self):
        return float(np.max(np.diff(self.distinct)))

    def as_array(self):
        return np.asarray(self.knots)

    def to_dict(self):
        return {"p": self.degree, "knots": list(self.knots)}


def open_uniform(a, b, p, elements, multiplicities=None):
    """Uniformly spaced (p+1)-open knot sequence.

    Parameters
    ----------
    a, b : float
        Interval endpoints, ``b > a``.
    p : int
        Spline degree.
    elements : int
        Number of equal sub-intervals.
    multiplicities : dict, optional
        Maps a distinct interior knot position ``j`` (``1 <= j < elements``,
        the knot at ``a + j*(b-a)/elements``) to its multiplicity. Unlisted
        interior knots are simple.

    Examples
    --------
    >>> open_uniform(-1, 1, 2, 4).knots
    (-1.0, -1.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.0, 1.0)
    """
    if not b > a:
        raise ValueError("b must exceed a")
    if int(elements) != elements or elements < 1:
        raise ValueError("elements must be a positive integer")
    if int(p) != p or p < 0:
        raise ValueError("p must be a non-negative integer")
    elements, p = int(elements), int(p)
    multiplicities = dict(multiplicities or {})
    for j, m in multiplicities.items():
        if not 1 <= j < elements:
            raise ValueError(f"interior knot index {j} out of range 1..{elements - 1}")
        if not 1 <= m <= p + 1:
            raise ValueError(f"multiplicity {m} at knot {j} outside [1, {p + 1}]")
    distinct = np.linspace(float(a), float(b), elements + 1)
    mult = [p + 1] + [multiplicities.get(j, 1) for j in range(1, elements)] + [p + 1]
    return KnotSequence.from_distinct(distinct.tolist(), mult, p)


def central_index(elements):
    """Position of the central distinct knot for an even element count."""
    if elements % 2:
        raise ValueError("a central knot exists only for an even number of elements")
    return elements // 2


def bernstein(a, b, p):
    """Knots without interior knots; the spline space is polynomials of degree p."""
    return open_uniform(a, b, p, 1)


def from_config(spec, a, b):
    """Build from ``{"p", "elements", "repeat_center"}`` or ``{"p", "knots"}``."""
    allowed = {"p", "elements", "repeat_center", "knots"}
    unknown = set(spec) - allowed
    if unknown:
        raise ValueError(f"unknown knot keys: {sorted(unknown)}")
    p = spec["p"]
    if "knots" in spec:
        if "elements" in spec or "repeat_center" in spec:
            raise ValueError("give either explicit knots or elements, not both")
        seq = KnotSequence(tuple(spec["knots"]), p)
        if seq.support != (float(a), float(b)):
            raise ValueError(f"knots span {seq.support}, measure support is {(a, b)}")
        return seq
    elements = spec.get("elements", 1)
    mult = None
    if spec.get("repeat_center", False):
        if p < 1:
            raise ValueError("repeat_center requires p >= 1")
        mult = {central_index(elements): 2}
    return open_uniform(a, b, p, elements, mult)
