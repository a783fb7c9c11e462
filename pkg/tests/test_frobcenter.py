import random

import pytest

from charpdiff.coeffring import Chart, LocalizedFunction
from charpdiff.diffop import DiffOperator, VectorField, bernstein_degree, is_central, op_scalar_embed
from charpdiff.errors import NotCentral, NotInImage, RequiresPrimeField
from charpdiff.frobcenter import (
    CentralElement,
    SymbolPolynomial,
    frob_center,
    iso_i,
    iso_i_inverse,
    restricted_power,
)

import randgen

A3 = Chart.affine(3, 1)
X1 = Chart(3, 1, {(1,): 1})


def vf(op):
    return VectorField.from_operator(op)


class TestRestrictedPower:
    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_partial_vanishes(self, p):
        c = Chart.affine(p, 2)
        assert restricted_power(VectorField.partial(c, 2)) == VectorField(
            c, [LocalizedFunction.zero(c)] * 2)

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_euler_field_is_fixed(self, p):
        c = Chart.affine(p, 1)
        theta = vf(DiffOperator.x(c, 1) * DiffOperator.d(c, 1))
        assert restricted_power(theta) == theta

    def test_x_squared_d(self):
        x, d = DiffOperator.x(A3, 1), DiffOperator.d(A3, 1)
        assert restricted_power(vf(x * x * d)) == VectorField(A3, [LocalizedFunction.zero(A3)])

    def test_requires_prime_field(self):
        c = Chart.affine(3, 1, 2)
        with pytest.raises(RequiresPrimeField):
            restricted_power(VectorField.partial(c, 1))


class TestFrobCenter:
    def test_examples(self):
        for p in (3, 5):
            c = Chart.affine(p, 1)
            x, d = DiffOperator.x(c, 1), DiffOperator.d(c, 1)
            assert frob_center(vf(d)).op == DiffOperator.d(c, 1, p)
            assert frob_center(vf(x * d)).op == x**p * DiffOperator.d(c, 1, p)
            assert frob_center(vf(d * 2)).op == DiffOperator.d(c, 1, p) * 2

    def test_result_is_central(self):
        rng = random.Random(5)
        for _ in range(10):
            theta = randgen.vector_field(rng, X1, 2, 1)
            assert is_central(frob_center(theta).op)


class TestIso:
    def test_generators(self):
        x, y = SymbolPolynomial.x(A3, 1), SymbolPolynomial.y(A3, 1)
        assert iso_i(x).op == DiffOperator.x(A3, 1) ** 3
        assert iso_i(y).op == DiffOperator.d(A3, 1, 3)
        assert iso_i(x * y) == frob_center(vf(DiffOperator.x(A3, 1) * DiffOperator.d(A3, 1)))

    def test_finv(self):
        assert iso_i(SymbolPolynomial.finv(X1)).op == DiffOperator.finv(X1) ** 3

    def test_inverse_examples(self):
        assert iso_i_inverse(DiffOperator.x(A3, 1) ** 3) == SymbolPolynomial.x(A3, 1)
        assert iso_i_inverse(DiffOperator.d(A3, 1, 3)) == SymbolPolynomial.y(A3, 1)
        with pytest.raises(NotInImage):
            iso_i_inverse(DiffOperator.x(A3, 1) * DiffOperator.d(A3, 1))

    def test_central_element_rejects(self):
        with pytest.raises(NotCentral):
            CentralElement(DiffOperator.x(A3, 1))

    def test_non_squarefree_denominator(self):
        c = Chart(3, 1, {(2,): 1})  # f = x1^2
        s = SymbolPolynomial.finv(c) * SymbolPolynomial.x(c, 1)
        assert iso_i_inverse(iso_i(s)) == s

    def test_symbol_algebra(self):
        y = SymbolPolynomial.y(A3, 1)
        x = SymbolPolynomial.x(A3, 1)
        assert (x * y) ** 2 == x * x * y * y
        assert (y * y).partial_y(1) == y * 2
        assert (x * y).partial_x(1) == y
        assert (x - x).is_zero()


CHARTS = {
    3: [Chart.affine(3, 1), Chart(3, 1, {(1,): 1})],
    5: [Chart.affine(5, 1), Chart(5, 1, {(1,): 1})],
}


@pytest.mark.parametrize("p", [3, 5])
def test_iso_is_ring_map(p):
    rng = random.Random(100 + p)
    for chart in CHARTS[p]:
        for _ in range(50):
            a = randgen.symbol(rng, chart, 2, 3, 1)
            b = randgen.symbol(rng, chart, 2, 3, 1)
            assert iso_i(a * b) == iso_i(a) * iso_i(b)
            assert iso_i(a + b) == iso_i(a) + iso_i(b)


@pytest.mark.parametrize("p", [3, 5])
def test_bmr_consistency(p):
    rng = random.Random(200 + p)
    for chart in (Chart.affine(p, 2), Chart(p, 1, {(1,): 1})):
        for _ in range(15):
            g = randgen.function(rng, chart, 3, 1)
            t1 = randgen.vector_field(rng, chart, 3, 1)
            t2 = randgen.vector_field(rng, chart, 3, 1)
            lhs = frob_center(g * t1).op
            assert lhs == op_scalar_embed(g**p) * frob_center(t1).op
            assert frob_center(t1 + t2) == frob_center(t1) + frob_center(t2)


def test_round_trip_monomials():
    for chart in (Chart.affine(3, 2), Chart(5, 1, {(1,): 1}), Chart(3, 2, {(1, 1): 1, (0, 0): 1})):
        for s in randgen.symbol_monomials(chart, 2, 3, 2):
            assert iso_i_inverse(iso_i(s)) == s


@pytest.mark.parametrize("p", [3, 5])
def test_degree_scaling(p):
    c = Chart.affine(p, 2)
    for s in randgen.symbol_monomials(c, 4, 4, 0):
        if s.total_degree() <= 4:
            assert bernstein_degree(iso_i(s).op) == p * s.total_degree()


@pytest.mark.parametrize("f", [{(1,): 1}, {(1,): 1, (0,): 1}, {(2,): 1, (0,): 1}])
def test_denominator_scaling(f):
    c = Chart(3, 1, f)
    for s in randgen.symbol_monomials(c, 2, 2, 2):
        ((b, g),) = s.terms.items()
        ((pb, h),) = iso_i(s).op.terms.items()
        assert pb == tuple(3 * k for k in b)
        assert h.denom_power == 3 * g.denom_power
        assert h.num.total_degree() == 3 * g.num.total_degree()


def test_frobenius_matches_power():
    rng = random.Random(9)
    ring = Chart.affine(5, 2).ring
    for _ in range(20):
        g = randgen.poly(rng, ring)
        assert g.frobenius() == g**5
        assert g.frobenius().pth_root() == g
