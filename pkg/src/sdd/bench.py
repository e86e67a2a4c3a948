"""Benchmark output functions with analytic statistics.

``example1`` is the two-input non-smooth test function

    y = g(x1) + g(x2) + g(x1) g(x2) / 5,   g(t) = 1 (t <= 0), exp(-10 t) (t > 0)

on independent uniform inputs over [-1, 1]. Its kink lines x_k = 0 are
declared as breakpoints so quadrature elements split there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .measures import MeasureSpec, ProductMeasure


@dataclass(frozen=True, eq=False)
class BenchmarkFunction:
    name: str
    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple[tuple[float, ...], ...]
    measures: ProductMeasure
    mean: float | None = None
    variance: float | None = None
    note: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for bp, m in zip(self.breakpoints, self.measures.components):
            if any(not m.a < t < m.b for t in bp):
                raise ValueError(f"breakpoints of {self.name} must lie inside the support")

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        self.measures.check_box(x)
        return self.func(x)


def kink(t, rate=10.0):
    """``1`` for ``t <= 0``, ``exp(-rate t)`` for ``t > 0``."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= 0.0, 1.0, np.exp(-rate * np.maximum(t, 0.0)))


def _check_square(*xs):
    for x in xs:
        x = np.asarray(x)
        if np.any(x < -1.0) or np.any(x > 1.0):
            raise DomainError("example1 is defined on [-1, 1]^2")


def example1(x1, x2, rate=10.0, weight=0.2):
    """Example-1 output at scalar or array inputs."""
    _check_square(x1, x2)
    g1, g2 = kink(x1, rate), kink(x2, rate)
    out = g1 + g2 + weight * g1 * g2
    return float(out) if np.ndim(out) == 0 else out


def kink_moments(rate=10.0):
    """``(E[g], E[g^2])`` for a uniform input on [-1, 1]."""
    if rate == 0:
        return 1.0, 1.0
    m1 = 0.5 + (1.0 - math.exp(-rate)) / (2.0 * rate)
    m2 = 0.5 + (1.0 - math.exp(-2.0 * rate)) / (4.0 * rate)
    return m1, m2


def example1_moments(rate=10.0, weight=0.2):
    """Exact mean and variance of ``g1 + g2 + weight g1 g2`` by independence."""
    m1, m2 = kink_moments(rate)
    mean = 2.0 * m1 + weight * m1 * m1
    second = 2.0 * m2 + 2.0 * m1 * m1 + 4.0 * weight * m1 * m2 + weight * weight * m2 * m2
    return mean, max(second - mean * mean, 0.0)


def exact_variance_example1(rate=10.0, weight=0.2):
    return example1_moments(rate, weight)[1]


def relative_variance_error(approx_var, exact_var):
    if not exact_var > 0:
        raise ValueError("exact variance must be positive")
    return abs(exact_var - approx_var) / exact_var


def make_example1(rate=10.0, weight=0.2):
    mean, var = example1_moments(rate, weight)
    name = "example1" if (rate, weight) == (10.0, 0.2) else "example1_param"
    return BenchmarkFunction(
        name=name,
        dim=2,
        func=lambda x: example1(x[:, 0], x[:, 1], rate, weight),
        breakpoints=((0.0,), (0.0,)),
        measures=ProductMeasure((MeasureSpec.uniform(), MeasureSpec.uniform())),
        mean=mean,
        variance=var,
        note="mean and variance from E[g], E[g^2] and independence",
        params={"rate": rate, "weight": weight},
    )


SYNTHETIC_SHIFTS = (0.3, -0.2, 0.5, -0.6)
SYNTHETIC_INTERACTION = 0.5


def synthetic5d(x):
    """``sum_k |x_k - s_k| (k < 4) + exp(x_5) + 0.5 x_1 x_2`` on [-1, 1]^5."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.exp(x[:, 4]) + SYNTHETIC_INTERACTION * x[:, 0] * x[:, 1]
    for k, s in enumerate(SYNTHETIC_SHIFTS):
        out = out + np.abs(x[:, k] - s)
    return out


def _synthetic_moments():
    mean = math.sinh(1.0)
    var = math.sinh(2.0) / 2.0 - math.sinh(1.0) ** 2
    for s in SYNTHETIC_SHIFTS:
        m1 = (1.0 + s * s) / 2.0
        mean += m1
        var += 1.0 / 3.0 + s * s - m1 * m1
    var += SYNTHETIC_INTERACTION**2 / 9.0
    return mean, var


def make_synthetic5d():
    mean, var = _synthetic_moments()
    return BenchmarkFunction(
        name="synthetic5d",
        dim=5,
        func=synthetic5d,
        breakpoints=tuple((s,) for s in SYNTHETIC_SHIFTS) + ((),),
        measures=ProductMeasure(tuple(MeasureSpec.uniform() for _ in range(5))),
        mean=mean,
        variance=var,
        note="uncorrelated additive terms; interaction term has zero mean",
    )


def get_benchmark(name, **params):
    """Look up a benchmark by name: example1, example1_param, synthetic5d."""
    if name == "example1":
        if params:
            raise ValueError("example1 takes no parameters; use example1_param")
        return make_example1()
    if name == "example1_param":
        unknown = set(params) - {"rate", "weight"}
        if unknown:
            raise ValueError(f"unknown example1_param parameters: {sorted(unknown)}")
        return make_example1(float(params.get("rate", 10.0)), float(params.get("weight", 0.2)))
    if name == "synthetic5d":
        if params:
            raise ValueError("synthetic5d takes no parameters")
        return make_synthetic5d()
    raise ValueError(f"unknown benchmark {name!r}")


BENCHMARKS = ("example1", "example1_param", "synthetic5d")
