"""Differential operators on a chart, kept in normal form.

An operator is ``sum_b g_b * d^b`` with function coefficients on the left.
Products are normalized with the generalized Leibniz rule

    d^b o h = sum_{t <= b} C(b, t) * d^t(h) * d^(b - t)

where the multi-index binomials come from Pascal's recurrence mod ``p**e``.
"""

from __future__ import annotations

import functools
import itertools
from collections import defaultdict

from .coeffring import (
    Chart,
    LocalizedFunction,
    deglex_key,
    loc_sum,
    same_chart,
)
from .errors import BernsteinUndefined, ChartMismatch, RequiresPrimeField


@functools.lru_cache(maxsize=None)
def pascal_row(k: int, modulus: int) -> tuple:
    """``(C(k,0), ..., C(k,k))`` reduced mod ``modulus``; no division involved."""
    if k == 0:
        return (1 % modulus,)
    prev = pascal_row(k - 1, modulus)
    return tuple(
        ((prev[j - 1] if j > 0 else 0) + (prev[j] if j < k else 0)) % modulus
        for j in range(k + 1)
    )


def multi_binomial(b, t, modulus: int) -> int:
    c = 1
    for bi, ti in zip(b, t):
        c = c * pascal_row(bi, modulus)[ti] % modulus
        if not c:
            break
    return c


def _below(b):
    return itertools.product(*(range(x + 1) for x in b))


class _Derivatives:
    """Memoized mixed partials ``d^t(h)`` of one function."""

    def __init__(self, h: LocalizedFunction):
        self.h = h
        self.cache = {(0,) * h.chart.n: h}

    def __getitem__(self, t):
        got = self.cache.get(t)
        if got is not None:
            return got
        h = self.h
        if h.denom_power == 0:
            got = LocalizedFunction._trusted(h.chart, h.num.derivative(t), 0)
        else:
            i = next(k for k, v in enumerate(t) if v)
            prev = self[t[:i] + (t[i] - 1,) + t[i + 1 :]]
            got = prev.partial(i + 1)
        self.cache[t] = got
        return got


class DiffOperator:
    """Element of D(X) as a map from d-multidegrees to coefficient functions."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms=None):
        clean = {}
        for b, g in (terms or {}).items():
            b = tuple(b)
            if len(b) != chart.n or min(b) < 0:
                raise ValueError(f"bad d-multidegree {b}")
            if g.chart is not chart and g.chart != chart:
                raise ChartMismatch("coefficient chart differs from operator chart")
            if not g.is_zero():
                clean[b] = g
        self.chart = chart
        self.terms = clean

    @classmethod
    def _make(cls, chart, terms):
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.terms = terms
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, chart):
        return cls._make(chart, {})

    @classmethod
    def scalar(cls, g: LocalizedFunction):
        """Multiplication by the function ``g``."""
        if g.is_zero():
            return cls.zero(g.chart)
        return cls._make(g.chart, {(0,) * g.chart.n: g})

    @classmethod
    def constant(cls, chart, c):
        return cls.scalar(LocalizedFunction.constant(chart, c))

    @classmethod
    def one(cls, chart):
        return cls.constant(chart, 1)

    @classmethod
    def x(cls, chart, i):
        return cls.scalar(LocalizedFunction.x(chart, i))

    @classmethod
    def finv(cls, chart):
        return cls.scalar(LocalizedFunction.finv(chart))

    @classmethod
    def d(cls, chart, i, k=1):
        """``d_i ** k``."""
        if not 1 <= i <= chart.n:
            raise IndexError(f"d index {i} out of range 1..{chart.n}")
        b = tuple(k if j == i - 1 else 0 for j in range(chart.n))
        return cls._make(chart, {b: LocalizedFunction.one(chart)})

    # -- inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def order(self) -> int:
        """Largest total d-degree; -1 for zero."""
        return max((sum(b) for b in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: deglex_key(t[0]), reverse=True)

    def coefficient(self, b) -> LocalizedFunction:
        return self.terms.get(tuple(b)) or LocalizedFunction.zero(self.chart)

    def __eq__(self, other):
        if isinstance(other, int):
            other = DiffOperator.constant(self.chart, other)
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if self.chart != other.chart or self.terms.keys() != other.terms.keys():
            return False
        return all(g == other.terms[b] for b, g in self.terms.items())

    __hash__ = None

    def __repr__(self):
        from .cli.render import render_operator

        return f"DiffOperator({render_operator(self)!r})"

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, DiffOperator):
            same_chart(self.chart, other.chart)
            return other
        if isinstance(other, int):
            return DiffOperator.constant(self.chart, other)
        if isinstance(other, LocalizedFunction):
            same_chart(self.chart, other.chart)
            return DiffOperator.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for b, g in other.terms.items():
            if b in out:
                s = out[b] + g
                if s.is_zero():
                    del out[b]
                else:
                    out[b] = s
            else:
                out[b] = g
        return DiffOperator._make(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOperator._make(self.chart, {b: -g for b, g in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return op_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return op_mul(other, self)

    def scale(self, c: int):
        out = {}
        for b, g in self.terms.items():
            h = g * c
            if not h.is_zero():
                out[b] = h
        return DiffOperator._make(self.chart, out)

    def __pow__(self, k: int):
        return op_power(self, k)

    def commutator(self, other):
        return op_commutator(self, other)

    def apply(self, h: LocalizedFunction) -> LocalizedFunction:
        return op_apply(self, h)

    # -- change of coefficient ring -----------------------------------------
    def lift(self) -> "DiffOperator":
        """Coefficient-wise canonical lift from Z/p to Z/p^2."""
        chart = self.chart.lift()
        return DiffOperator._make(chart, {b: g.lift_canonical() for b, g in self.terms.items()})

    def reduce_mod_p(self) -> "DiffOperator":
        chart = self.chart.reduce()
        out = {}
        for b, g in self.terms.items():
            h = g.reduce_mod_p()
            if not h.is_zero():
                out[b] = h
        return DiffOperator._make(chart, out)

    def divide_by_p(self) -> "DiffOperator":
        """Exact division by p of an operator over Z/p^2, landing over Z/p."""
        chart = self.chart.reduce()
        out = {}
        for b, g in self.terms.items():
            h = g.divide_by_p()
            if not h.is_zero():
                out[b] = h
        return DiffOperator._make(chart, out)


def op_add(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    return P + Q


def op_scalar_embed(g: LocalizedFunction) -> DiffOperator:
    return DiffOperator.scalar(g)


def op_mul(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """Normal form of the composition ``P o Q``."""
    same_chart(P.chart, Q.chart)
    chart = P.chart
    modulus = chart.modulus
    acc = defaultdict(list)
    for b, h in Q.terms.items():
        derivs = _Derivatives(h)
        for a, g in P.terms.items():
            for t in _below(a):
                c = multi_binomial(a, t, modulus)
                if not c:
                    continue
                dh = derivs[t]
                if dh.is_zero():
                    continue
                num = (g.num * dh.num).scale(c)
                key = tuple(ai - ti + bi for ai, ti, bi in zip(a, t, b))
                acc[key].append((num, g.denom_power + dh.denom_power))
    out = {}
    for key, parts in acc.items():
        s = loc_sum(chart, parts)
        if not s.is_zero():
            out[key] = s
    return DiffOperator._make(chart, out)


def op_commutator(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    return op_mul(P, Q) - op_mul(Q, P)


def op_power(P: DiffOperator, k: int) -> DiffOperator:
    """``P ** k`` by plain iteration (``P**(j+1) = P * P**j``)."""
    if k < 0:
        raise ValueError("negative exponent")
    result = DiffOperator.one(P.chart)
    for _ in range(k):
        result = op_mul(P, result)
    return result


def op_apply(P: DiffOperator, h: LocalizedFunction) -> LocalizedFunction:
    """The tautological action of ``P`` on a function."""
    same_chart(P.chart, h.chart)
    derivs = _Derivatives(h)
    parts = []
    for b, g in P.terms.items():
        dh = derivs[b]
        if not dh.is_zero():
            parts.append((g.num * dh.num, g.denom_power + dh.denom_power))
    return loc_sum(P.chart, parts)


def bernstein_degree(P: DiffOperator) -> int:
    """Total degree in x and d jointly; defined on affine charts only."""
    if not P.chart.is_affine:
        raise BernsteinUndefined("Bernstein degree needs the affine chart f = 1")
    if P.is_zero():
        raise BernsteinUndefined("the zero operator has no Bernstein degree")
    return max(sum(b) + g.num.total_degree() for b, g in P.terms.items())


def is_central(P: DiffOperator) -> bool:
    """Whether ``P`` commutes with every ``x_i`` and ``d_i``.

    Commuting with the ``x_i`` gives commuting with ``f`` and so with ``1/f``;
    these together with the ``d_i`` generate D(X).
    """
    chart = P.chart
    if chart.e != 1:
        raise RequiresPrimeField("centrality is tested over Z/p only")
    for i in range(1, chart.n + 1):
        if not op_commutator(P, DiffOperator.x(chart, i)).is_zero():
            return False
        if not op_commutator(P, DiffOperator.d(chart, i)).is_zero():
            return False
    return True


class VectorField:
    """A derivation ``sum_i g_i d_i`` of O(X)."""

    __slots__ = ("chart", "coeffs")

    def __init__(self, chart: Chart, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != chart.n:
            raise ValueError(f"need exactly {chart.n} coefficients, got {len(coeffs)}")
        for g in coeffs:
            same_chart(chart, g.chart)
        self.chart = chart
        self.coeffs = coeffs

    @classmethod
    def partial(cls, chart, i):
        return cls(
            chart,
            [LocalizedFunction.one(chart) if j == i else LocalizedFunction.zero(chart)
             for j in range(1, chart.n + 1)],
        )

    @classmethod
    def from_operator(cls, P: DiffOperator) -> "VectorField":
        """Read a vector field off a first-order operator with no constant part."""
        n = P.chart.n
        coeffs = [LocalizedFunction.zero(P.chart)] * n
        for b, g in P.terms.items():
            if sum(b) != 1:
                raise ValueError("operator is not a vector field (needs pure first order)")
            coeffs[b.index(1)] = g
        return cls(P.chart, coeffs)

    def __call__(self, h: LocalizedFunction) -> LocalizedFunction:
        same_chart(self.chart, h.chart)
        parts = []
        for i, g in enumerate(self.coeffs, start=1):
            if g.is_zero():
                continue
            dh = h.partial(i)
            parts.append((g.num * dh.num, g.denom_power + dh.denom_power))
        return loc_sum(self.chart, parts)

    def embed(self) -> DiffOperator:
        n = self.chart.n
        terms = {}
        for i, g in enumerate(self.coeffs):
            if not g.is_zero():
                terms[tuple(1 if j == i else 0 for j in range(n))] = g
        return DiffOperator._make(self.chart, terms)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        same_chart(self.chart, other.chart)
        return VectorField(self.chart, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return VectorField(self.chart, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, g):
        if isinstance(g, int):
            g = LocalizedFunction.constant(self.chart, g)
        if not isinstance(g, LocalizedFunction):
            return NotImplemented
        return VectorField(self.chart, [g * a for a in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.chart == other.chart and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __repr__(self):
        from .cli.render import render_operator

        return f"VectorField({render_operator(self.embed())!r})"


def vf_embed(theta: VectorField) -> DiffOperator:
    return theta.embed()
