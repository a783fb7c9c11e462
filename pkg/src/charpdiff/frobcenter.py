"""The center of D(X) over F_p and its identification with O(T*X).

``iso_i`` sends a function ``g`` to ``g**p`` and the fiber coordinate ``y_i``
to ``d_i**p``; on a vector field ``theta`` the corresponding central element
is ``theta**p - theta^[p]`` where ``theta^[p]`` is the p-fold composite of
``theta`` viewed again as a derivation.
"""

from __future__ import annotations

from .coeffring import Chart, LocalizedFunction, deglex_key, loc_sum, same_chart
from .diffop import DiffOperator, VectorField, is_central, op_power
from .errors import NotCentral, NotInImage, NotPthPower, RequiresPrimeField


def _require_prime_field(chart):
    if chart.e != 1:
        raise RequiresPrimeField("only defined over Z/p (e = 1)")


class CentralElement:
    """An operator checked to lie in the center of D(X) over F_p."""

    __slots__ = ("op",)

    def __init__(self, op: DiffOperator):
        _require_prime_field(op.chart)
        if not is_central(op):
            raise NotCentral("operator does not commute with all generators")
        self.op = op

    @property
    def chart(self):
        return self.op.chart

    def __add__(self, other):
        return CentralElement(self.op + _unwrap(other))

    def __sub__(self, other):
        return CentralElement(self.op - _unwrap(other))

    def __neg__(self):
        return CentralElement(-self.op)

    def __mul__(self, other):
        return CentralElement(self.op * _unwrap(other))

    def __eq__(self, other):
        if isinstance(other, CentralElement):
            return self.op == other.op
        if isinstance(other, (DiffOperator, int)):
            return self.op == other
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        from .cli.render import render_operator

        return f"CentralElement({render_operator(self.op)!r})"


def _unwrap(x):
    return x.op if isinstance(x, CentralElement) else x


class SymbolPolynomial:
    """Function on T*X: a map from y-multidegrees to coefficient functions."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms=None):
        clean = {}
        for b, g in (terms or {}).items():
            b = tuple(b)
            if len(b) != chart.n or min(b) < 0:
                raise ValueError(f"bad y-multidegree {b}")
            same_chart(chart, g.chart)
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

    @classmethod
    def zero(cls, chart):
        return cls._make(chart, {})

    @classmethod
    def function(cls, g: LocalizedFunction):
        if g.is_zero():
            return cls.zero(g.chart)
        return cls._make(g.chart, {(0,) * g.chart.n: g})

    @classmethod
    def constant(cls, chart, c):
        return cls.function(LocalizedFunction.constant(chart, c))

    @classmethod
    def x(cls, chart, i):
        return cls.function(LocalizedFunction.x(chart, i))

    @classmethod
    def finv(cls, chart):
        return cls.function(LocalizedFunction.finv(chart))

    @classmethod
    def y(cls, chart, i, k=1):
        if not 1 <= i <= chart.n:
            raise IndexError(f"y index {i} out of range 1..{chart.n}")
        b = tuple(k if j == i - 1 else 0 for j in range(chart.n))
        return cls._make(chart, {b: LocalizedFunction.one(chart)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def y_degree(self) -> int:
        return max((sum(b) for b in self.terms), default=-1)

    def total_degree(self) -> int:
        """Degree in x and y jointly (numerator degree on localized charts)."""
        return max((sum(b) + g.num.total_degree() for b, g in self.terms.items()), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: deglex_key(t[0]), reverse=True)

    def as_function(self) -> LocalizedFunction:
        """The coefficient of ``y^0`` if nothing else is present."""
        if any(sum(b) for b in self.terms):
            raise ValueError("symbol depends on the fiber coordinates")
        return self.terms.get((0,) * self.chart.n) or LocalizedFunction.zero(self.chart)

    def _coerce(self, other):
        if isinstance(other, SymbolPolynomial):
            same_chart(self.chart, other.chart)
            return other
        if isinstance(other, int):
            return SymbolPolynomial.constant(self.chart, other)
        if isinstance(other, LocalizedFunction):
            same_chart(self.chart, other.chart)
            return SymbolPolynomial.function(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for b, g in other.terms.items():
            s = out[b] + g if b in out else g
            if s.is_zero():
                out.pop(b, None)
            else:
                out[b] = s
        return SymbolPolynomial._make(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolPolynomial._make(self.chart, {b: -g for b, g in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return SymbolPolynomial(self.chart, {b: g * other for b, g in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        acc = {}
        for a, g in self.terms.items():
            for b, h in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                acc.setdefault(key, []).append((g.num * h.num, g.denom_power + h.denom_power))
        out = {}
        for key, parts in acc.items():
            s = loc_sum(self.chart, parts)
            if not s.is_zero():
                out[key] = s
        return SymbolPolynomial._make(self.chart, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = SymbolPolynomial.constant(self.chart, 1)
        for _ in range(k):
            result = result * self
        return result

    def partial_x(self, i: int) -> "SymbolPolynomial":
        out = {}
        for b, g in self.terms.items():
            h = g.partial(i)
            if not h.is_zero():
                out[b] = h
        return SymbolPolynomial._make(self.chart, out)

    def partial_y(self, i: int) -> "SymbolPolynomial":
        k = i - 1
        out = {}
        for b, g in self.terms.items():
            if b[k] == 0:
                continue
            h = g * b[k]
            if not h.is_zero():
                out[b[:k] + (b[k] - 1,) + b[k + 1 :]] = h
        return SymbolPolynomial._make(self.chart, out)

    def __eq__(self, other):
        if isinstance(other, (int, LocalizedFunction)):
            other = self._coerce(other)
        if not isinstance(other, SymbolPolynomial):
            return NotImplemented
        if self.chart != other.chart or self.terms.keys() != other.terms.keys():
            return False
        return all(g == other.terms[b] for b, g in self.terms.items())

    __hash__ = None

    def __repr__(self):
        from .cli.render import render_symbol

        return f"SymbolPolynomial({render_symbol(self)!r})"


def restricted_power(theta: VectorField) -> VectorField:
    """The derivation ``theta^[p]``, read off from its values on coordinates."""
    chart = theta.chart
    _require_prime_field(chart)
    coeffs = []
    for j in range(1, chart.n + 1):
        h = LocalizedFunction.x(chart, j)
        for _ in range(chart.p):
            h = theta(h)
        coeffs.append(h)
    return VectorField(chart, coeffs)


def frob_center(theta: VectorField) -> CentralElement:
    """``theta**p - theta^[p]``; raises :class:`NotCentral` on arithmetic bugs."""
    _require_prime_field(theta.chart)
    op = op_power(theta.embed(), theta.chart.p) - restricted_power(theta).embed()
    return CentralElement(op)


def iso_i(s: SymbolPolynomial) -> CentralElement:
    """``(g / f^m) y^b  ->  g^p / f^(pm) d^(pb)``, extended additively."""
    chart = s.chart
    _require_prime_field(chart)
    p = chart.p
    terms = {}
    for b, g in s.terms.items():
        terms[tuple(p * x for x in b)] = g.frobenius()
    return CentralElement(DiffOperator._make(chart, terms))


def iso_i_inverse(z) -> SymbolPolynomial:
    """Inverse of :func:`iso_i`; raises :class:`NotInImage`.

    Accepts a :class:`CentralElement` or a bare operator (which is checked for
    centrality first).
    """
    if isinstance(z, CentralElement):
        op = z.op
    else:
        op = z
        _require_prime_field(op.chart)
        if not is_central(op):
            raise NotInImage("operator is not central")
    chart = op.chart
    _require_prime_field(chart)
    p = chart.p
    terms = {}
    for b, g in op.terms.items():
        if any(x % p for x in b):
            raise NotInImage(f"d-multidegree {b} not divisible by p={p}")
        m = g.denom_power
        pad = -m % p
        num = g.num * chart.f_power(pad) if pad else g.num
        try:
            root = num.pth_root()
        except NotPthPower as exc:
            raise NotInImage(f"coefficient of d^{b} is not a p-th power") from exc
        terms[tuple(x // p for x in b)] = LocalizedFunction(chart, root, (m + pad) // p)
    return SymbolPolynomial(chart, terms)
