"""Fast self-checks of the core invariants, used by ``sdd verify``."""

from __future__ import annotations

import numpy as np

from .bench import make_example1
from .bspline import eval_all
from .decomposition import enumerate_terms, fit_quadrature, term_count
from .knots import bernstein, open_uniform
from .measures import measure_quadrature, presets
from .orthobasis import whiten
from .reference import equivalence_check, legendre_expansion


def _orthonormality():
    knots = open_uniform(-1, 1, 2, 4)
    worst_gram = worst_mean = 0.0
    for m in presets().values():
        basis = whiten(knots, m)
        rule = measure_quadrature(m, knots.interior, 40)
        psi = basis(rule.nodes)
        gram = (psi * rule.weights[:, None]).T @ psi
        worst_gram = max(worst_gram, np.abs(gram - np.eye(basis.n)).max())
        worst_mean = max(worst_mean, np.abs(rule.weights @ psi[:, 1:]).max())
    ok = worst_gram <= 1e-8 and worst_mean <= 1e-10
    return ok, f"max|E[psi psi^T]-I|={worst_gram:.2e}, max|E[psi_i]|={worst_mean:.2e}"


def _partition_of_unity():
    knots = open_uniform(-1, 1, 3, 7, {3: 2, 5: 4})
    x = np.unique(np.concatenate([np.linspace(-1, 1, 1001), knots.distinct]))
    err = np.abs(eval_all(knots, x).sum(axis=1) - 1).max()
    return err <= 1e-12, f"max|sum B_i - 1|={err:.2e}"


def _counts():
    a = term_count(15, 1, [5] * 15)
    b = term_count(15, 2, [5] * 15)
    c = len(enumerate_terms(3, 3, (3, 4, 2))) + 1
    ok = (a, b, c) == (61, 1741, 24)
    return ok, f"L(15,S=1)={a}, L(15,S=2)={b}, L(3,S=3)={c}"


def _pce_equivalence():
    bench = make_example1()
    bases = [whiten(bernstein(-1, 1, 3), m) for m in bench.measures.components]
    sdd = fit_quadrature(bench.func, bases, 2, bench.breakpoints, 40)
    leg = legendre_expansion(bench.func, [(-1, 1), (-1, 1)], 3, breakpoints=bench.breakpoints)
    rep = equivalence_check(sdd, leg)
    return rep["max_abs_discrepancy"] <= 1e-8, f"max subspace variance gap={rep['max_abs_discrepancy']:.2e}"


CHECKS = {
    "orthonormality": _orthonormality,
    "partition_of_unity": _partition_of_unity,
    "term_counts": _counts,
    "pce_equivalence": _pce_equivalence,
}


def run_checks():
    results = []
    for name, check in CHECKS.items():
        ok, detail = check()
        results.append((name, bool(ok), detail))
    return results
