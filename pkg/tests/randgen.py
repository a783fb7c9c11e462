"""Seeded random values for sweeps with exact case counts."""

import itertools

from charpdiff.coeffring import Chart, LocalizedFunction, Polynomial
from charpdiff.diffop import DiffOperator, VectorField
from charpdiff.frobcenter import SymbolPolynomial


def _exps(n, max_deg):
    return [e for e in itertools.product(range(max_deg + 1), repeat=n) if sum(e) <= max_deg]


def poly(rng, ring, max_deg=3, max_terms=4):
    exps = _exps(ring.n, max_deg)
    k = rng.randint(1, max_terms)
    return Polynomial(ring, {rng.choice(exps): rng.randrange(ring.modulus) for _ in range(k)})


def function(rng, chart, max_deg=3, max_m=1, max_terms=4):
    m = 0 if chart.is_affine else rng.randint(0, max_m)
    return LocalizedFunction(chart, poly(rng, chart.ring, max_deg, max_terms), m)


def operator(rng, chart, max_order=2, max_deg=2, max_m=1, max_terms=3):
    bs = _exps(chart.n, max_order)
    k = rng.randint(1, max_terms)
    terms = {}
    for _ in range(k):
        terms[rng.choice(bs)] = function(rng, chart, max_deg, max_m, 3)
    return DiffOperator(chart, terms)


def vector_field(rng, chart, max_deg=3, max_m=1):
    return VectorField(chart, [function(rng, chart, max_deg, max_m, 3) for _ in range(chart.n)])


def symbol(rng, chart, max_ydeg=2, max_deg=3, max_m=1, max_terms=3):
    bs = _exps(chart.n, max_ydeg)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[rng.choice(bs)] = function(rng, chart, max_deg, max_m, 3)
    return SymbolPolynomial(chart, terms)


def symbol_monomials(chart, max_ydeg, max_xdeg, max_m):
    """Distinct monomials x^a finv^m y^b (duplicates after minimization dropped)."""
    seen = []
    for b in _exps(chart.n, max_ydeg):
        for a in _exps(chart.n, max_xdeg):
            for m in range((0 if chart.is_affine else max_m) + 1):
                g = LocalizedFunction(chart, Polynomial.monomial(chart.ring, a), m)
                s = SymbolPolynomial(chart, {b: g})
                if not any(s == t for t in seen):
                    seen.append(s)
    return seen


def chart(p, n, f=None, e=1):
    return Chart(p, n, f, e)


# charts used throughout the sweeps, keyed by a short label
def standard_charts(p, e=1):
    return {
        "A1": Chart(p, 1, None, e),
        "A2": Chart(p, 2, None, e),
        "A3": Chart(p, 3, None, e),
        "x1 on A1": Chart(p, 1, {(1,): 1}, e),
        "x1 on A2": Chart(p, 2, {(1, 0): 1}, e),
        "x1*x2+1": Chart(p, 2, {(1, 1): 1, (0, 0): 1}, e),
    }
