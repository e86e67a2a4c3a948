"""Example-1 studies: the method comparison table and mesh refinement."""

from __future__ import annotations

from dataclasses import dataclass

from .bench import make_example1, relative_variance_error
from .decomposition import fit_quadrature
from .knots import central_index, open_uniform
from .orthobasis import whiten
from .reference import build_reference

# Coefficient changes below this are treated as converged quadrature.
QUADRATURE_TOL = 1e-12


@dataclass(frozen=True)
class TableRow:
    method: str
    p: int
    knots: str
    basis_count: int
    mean: float
    variance: float
    relative_error: float


def _fit(bench, bases, S, threads=None):
    return fit_quadrature(
        bench.func, bases, S, bench.breakpoints, points_per_element=12,
        tol=QUADRATURE_TOL, threads=threads,
    )


def sdd_example1(p, elements, repeat_center=False, S=2, threads=None):
    bench = make_example1()
    mult = {central_index(elements): 2} if repeat_center else None
    bases = [whiten(open_uniform(m.a, m.b, p, elements, mult), m) for m in bench.measures.components]
    return _fit(bench, bases, S, threads)


def pce_example1(p, threads=None):
    bench = make_example1()
    bases, S = build_reference("pce", bench.measures, p)
    return _fit(bench, bases, S, threads)


def table_example1(threads=None):
    """PCE (p = 2, 20) and bivariate SDD (p = 1, 2; 20 elements) variance errors."""
    bench = make_example1()
    cases = [
        ("pce", 2, "none", lambda: pce_example1(2, threads)),
        ("pce", 20, "none", lambda: pce_example1(20, threads)),
        ("sdd", 1, "simple", lambda: sdd_example1(1, 20, threads=threads)),
        ("sdd", 2, "simple", lambda: sdd_example1(2, 20, threads=threads)),
        ("sdd", 2, "repeated_center", lambda: sdd_example1(2, 20, True, threads=threads)),
    ]
    rows = []
    for method, p, knots, fit in cases:
        e = fit()
        rows.append(TableRow(
            method, p, knots, len(e), e.mean(), e.variance(),
            relative_variance_error(e.variance(), bench.variance),
        ))
    return rows


def convergence_example1(p=1, elements=(2, 4, 8, 16), repeat_center=False):
    """``[(elements, relative variance error)]`` under uniform refinement."""
    bench = make_example1()
    return [
        (el, relative_variance_error(sdd_example1(p, el, repeat_center).variance(), bench.variance))
        for el in elements
    ]
