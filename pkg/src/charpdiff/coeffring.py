"""Exact coefficient arithmetic.

Coefficients are plain Python ints kept as least nonnegative residues modulo
``p**e`` with ``e`` in ``{1, 2}``.  On top of them sit sparse multivariate
polynomials and localized functions ``g / f**m`` on a chart
``X = Spec (Z/p^e)[x_1..x_n]_f``.

All values are immutable once built; nothing here mutates an argument.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    ChartMismatch,
    NotDivisible,
    NotDivisibleByP,
    NotPthPower,
    RequiresPrimeField,
)

Exp = tuple  # exponent vector, tuple[int, ...]

# Below this many coefficient products the plain dict loop beats packing.
KERNEL_MIN_WORK = 256


def deglex_key(exp):
    """Sort key for degree-lex order (use ``reverse=True`` for descending)."""
    return (sum(exp), exp)


@functools.lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Ring(NamedTuple):
    """Coefficient ring ``Z/p^e`` together with the number of variables."""

    p: int
    e: int
    n: int

    @property
    def modulus(self) -> int:
        return self.p**self.e


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _unit(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


class Polynomial:
    """Sparse polynomial over ``Z/p^e`` in ``n`` variables.

    ``terms`` maps exponent tuples to nonzero residues.  Treat it as read-only.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms=None):
        mod = ring.modulus
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != ring.n or min(exp) < 0:
                    raise ValueError(f"bad exponent vector {exp} for n={ring.n}")
                c %= mod
                if c:
                    clean[exp] = (clean.get(exp, 0) + c) % mod
                    if not clean[exp]:
                        del clean[exp]
        self.ring = ring
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, ring, terms):
        # trusted: residues already reduced, no zero entries
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ring):
        return cls._make(ring, {})

    @classmethod
    def constant(cls, ring, c):
        c %= ring.modulus
        return cls._make(ring, {(0,) * ring.n: c} if c else {})

    @classmethod
    def one(cls, ring):
        return cls.constant(ring, 1)

    @classmethod
    def variable(cls, ring, i):
        """The coordinate ``x_i`` (1-based)."""
        if not 1 <= i <= ring.n:
            raise IndexError(f"variable index {i} out of range 1..{ring.n}")
        return cls._make(ring, {_unit(ring.n, i - 1): 1 % ring.modulus})

    @classmethod
    def monomial(cls, ring, exp, c=1):
        return cls(ring, {tuple(exp): c})

    # -- inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0,) * self.ring.n) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.ring.n in self.terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        """Largest total degree of a term; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self):
        """Degree-lex leading ``(exponent, coefficient)``."""
        exp = max(self.terms, key=deglex_key)
        return exp, self.terms[exp]

    def sorted_terms(self):
        """Terms in descending degree-lex order."""
        return sorted(self.terms.items(), key=lambda t: deglex_key(t[0]), reverse=True)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == Polynomial.constant(self.ring, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .cli.render import render_polynomial

        return f"Polynomial({render_polynomial(self)!r}, p={self.ring.p}, e={self.ring.e})"

    # -- ring operations ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ChartMismatch(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return Polynomial.constant(self.ring, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        mod = self.ring.modulus
        out = dict(self.terms)
        for exp, c in other.terms.items():
            v = (out.get(exp, 0) + c) % mod
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return Polynomial._make(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.modulus
        return Polynomial._make(self.ring, {e: mod - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int):
        mod = self.ring.modulus
        c %= mod
        if c == 1:
            return self
        out = {}
        for exp, v in self.terms.items():
            w = v * c % mod
            if w:
                out[exp] = w
        return Polynomial._make(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Polynomial._make(self.ring, _mul_terms(self.ring, self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = Polynomial.one(self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus ----------------------------------------------------------
    def partial(self, i: int):
        """Formal partial derivative with respect to ``x_i`` (1-based)."""
        if not 1 <= i <= self.ring.n:
            raise IndexError(f"variable index {i} out of range 1..{self.ring.n}")
        k = i - 1
        mod = self.ring.modulus
        out = {}
        for exp, c in self.terms.items():
            a = exp[k]
            if a == 0:
                continue
            v = c * a % mod
            if v:
                out[exp[:k] + (a - 1,) + exp[k + 1 :]] = v
        return Polynomial._make(self.ring, out)

    def derivative(self, t):
        """Mixed partial ``d^t`` for a multi-index ``t``, via falling factorials."""
        mod = self.ring.modulus
        out = {}
        for exp, c in self.terms.items():
            v = c
            for a, s in zip(exp, t):
                if s > a:
                    v = 0
                    break
                for j in range(s):
                    v = v * (a - j) % mod
                if not v:
                    break
            if v:
                out[tuple(a - s for a, s in zip(exp, t))] = v
        return Polynomial._make(self.ring, out)

    # -- division ----------------------------------------------------------
    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Return ``q`` with ``q * divisor == self``; raise :class:`NotDivisible`.

        The divisor's leading coefficient must be a unit.  With a single divisor
        the leading-term reduction is a complete divisibility test.
        """
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        mod = self.ring.modulus
        lead_e, lead_c = divisor.leading()
        try:
            inv = pow(lead_c, -1, mod)
        except ValueError:
            raise ValueError("divisor leading coefficient is not a unit") from None
        rest = dict(self.terms)
        quot = {}
        dterms = list(divisor.terms.items())
        while rest:
            exp = max(rest, key=deglex_key)
            shift = tuple(a - b for a, b in zip(exp, lead_e))
            if min(shift) < 0:
                raise NotDivisible("leading term not divisible by divisor's leading term")
            c = rest[exp] * inv % mod
            quot[shift] = c
            for de, dc in dterms:
                key = _add_exp(de, shift)
                v = (rest.get(key, 0) - c * dc) % mod
                if v:
                    rest[key] = v
                else:
                    rest.pop(key, None)
        return Polynomial._make(self.ring, quot)

    # -- characteristic p --------------------------------------------------
    def frobenius(self):
        """``self ** p`` over F_p, computed by scaling exponents."""
        if self.ring.e != 1:
            raise RequiresPrimeField("Frobenius shortcut needs e = 1")
        p = self.ring.p
        return Polynomial._make(
            self.ring, {tuple(a * p for a in exp): c for exp, c in self.terms.items()}
        )

    def pth_root(self):
        """Inverse of :meth:`frobenius`; raises :class:`NotPthPower`."""
        if self.ring.e != 1:
            raise RequiresPrimeField("p-th roots need e = 1")
        p = self.ring.p
        out = {}
        for exp, c in self.terms.items():
            if any(a % p for a in exp):
                raise NotPthPower(f"exponent {exp} not divisible by p={p}")
            out[tuple(a // p for a in exp)] = c
        return Polynomial._make(self.ring, out)

    def reduce_mod_p(self):
        if self.ring.e != 2:
            raise ValueError("reduce_mod_p expects e = 2")
        p = self.ring.p
        ring = Ring(p, 1, self.ring.n)
        return Polynomial._make(ring, {e: c % p for e, c in self.terms.items() if c % p})

    def lift_canonical(self):
        if self.ring.e != 1:
            raise ValueError("lift_canonical expects e = 1")
        return Polynomial._make(Ring(self.ring.p, 2, self.ring.n), dict(self.terms))

    def divide_by_p(self):
        if self.ring.e != 2:
            raise ValueError("divide_by_p expects e = 2")
        p = self.ring.p
        out = {}
        for exp, c in self.terms.items():
            if c % p:
                raise NotDivisibleByP(f"coefficient {c} of {exp} is a unit mod {p}")
            out[exp] = c // p
        return Polynomial._make(Ring(p, 1, self.ring.n), out)


def _mul_terms(ring, a, b):
    if not a or not b:
        return {}
    mod = ring.modulus
    if len(a) * len(b) >= KERNEL_MIN_WORK and _kernels.kernel_applicable(len(a), len(b), mod):
        res = _mul_kernel(ring, a, b)
        if res is not None:
            return res
    out = {}
    if ring.n == 1:
        for (ea,), ca in a.items():
            for (eb,), cb in b.items():
                key = (ea + eb,)
                out[key] = (out.get(key, 0) + ca * cb) % mod
    else:
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = _add_exp(ea, eb)
                out[key] = (out.get(key, 0) + ca * cb) % mod
    return {k: v for k, v in out.items() if v}


def _to_arrays(terms, n):
    exps = np.array(list(terms.keys()), dtype=np.int64).reshape(-1, n)
    coeffs = np.fromiter(terms.values(), dtype=np.int64, count=len(terms))
    return exps, coeffs


def _mul_kernel(ring, a, b):
    ea, ca = _to_arrays(a, ring.n)
    eb, cb = _to_arrays(b, ring.n)
    res = _kernels.mul_sparse(ea, ca, eb, cb, ring.modulus)
    if res is None:
        return None
    exps, coeffs = res
    return dict(zip(map(tuple, exps.tolist()), coeffs.tolist()))


# ---------------------------------------------------------------------------
# Charts


@dataclass(frozen=True)
class Chart:
    """``X = Spec (Z/p^e)[x_1..x_n]_f``; ``f = 1`` is affine space."""

    p: int
    n: int
    f: Polynomial = None
    e: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.e not in (1, 2):
            raise ValueError("coefficient exponent e must be 1 or 2")
        if self.n < 1:
            raise ValueError("need at least one coordinate")
        ring = Ring(self.p, self.e, self.n)
        f = self.f
        if f is None:
            f = Polynomial.one(ring)
        elif isinstance(f, dict):
            f = Polynomial(ring, f)
        if f.ring != ring:
            raise ChartMismatch(f"denominator lives in {f.ring}, chart is {ring}")
        if all(c % self.p == 0 for c in f.terms.values()):
            raise ValueError("f must be nonzero modulo p")
        if self.e == 2 and any(c >= self.p for c in f.terms.values()):
            raise ValueError("for e = 2, f must be a canonical lift (coefficients < p)")
        if f.is_constant() and not f.is_one():
            raise ValueError("a constant denominator must be 1")
        object.__setattr__(self, "f", f)

    @classmethod
    def affine(cls, p, n, e=1):
        return cls(p, n, None, e)

    @property
    def ring(self) -> Ring:
        return self.f.ring

    @property
    def modulus(self) -> int:
        return self.p**self.e

    @property
    def is_affine(self) -> bool:
        return self.f.is_one()

    def x(self, i):
        return Polynomial.variable(self.ring, i)

    def lift(self) -> "Chart":
        """The same chart over ``Z/p^2`` with the canonical lift of ``f``."""
        return _lift_chart(self)

    def reduce(self) -> "Chart":
        return _reduce_chart(self)

    def f_power(self, k: int) -> Polynomial:
        return _f_power(self, k)


@functools.lru_cache(maxsize=None)
def _lift_chart(chart):
    if chart.e != 1:
        raise ValueError("chart is already over Z/p^2")
    return Chart(chart.p, chart.n, chart.f.lift_canonical(), 2)


@functools.lru_cache(maxsize=None)
def _reduce_chart(chart):
    if chart.e != 2:
        raise ValueError("chart is already over Z/p")
    return Chart(chart.p, chart.n, chart.f.reduce_mod_p(), 1)


@functools.lru_cache(maxsize=4096)
def _f_power(chart, k):
    if k == 0:
        return Polynomial.one(chart.ring)
    if k == 1:
        return chart.f
    return _f_power(chart, k - 1) * chart.f


def same_chart(a: Chart, b: Chart):
    if a is not b and a != b:
        raise ChartMismatch("operands live on different charts")


# ---------------------------------------------------------------------------
# Localized functions


class LocalizedFunction:
    """The function ``num / f**denom_power`` on a chart.

    Over ``Z/p`` the representation is kept minimal (``f`` does not divide
    ``num`` when ``denom_power > 0``), which makes it unique.  Over ``Z/p^2``
    it is left as computed and equality is tested by cross-multiplication.
    """

    __slots__ = ("chart", "num", "denom_power")

    def __init__(self, chart: Chart, num: Polynomial, denom_power: int = 0):
        if num.ring != chart.ring:
            raise ChartMismatch("numerator ring does not match chart")
        if denom_power < 0:
            raise ValueError("negative denominator power")
        if num.is_zero() or chart.is_affine:
            denom_power = 0
        elif chart.e == 1 and denom_power > 0:
            num, denom_power = _minimize(chart, num, denom_power)
        self.chart = chart
        self.num = num
        self.denom_power = denom_power

    @classmethod
    def zero(cls, chart):
        return cls(chart, Polynomial.zero(chart.ring))

    @classmethod
    def constant(cls, chart, c):
        return cls(chart, Polynomial.constant(chart.ring, c))

    @classmethod
    def one(cls, chart):
        return cls.constant(chart, 1)

    @classmethod
    def x(cls, chart, i):
        return cls(chart, chart.x(i))

    @classmethod
    def finv(cls, chart):
        """``1/f`` (equal to 1 on an affine chart)."""
        return cls(chart, Polynomial.one(chart.ring), 1)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.denom_power == 0

    def __bool__(self):
        return not self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, LocalizedFunction):
            same_chart(self.chart, other.chart)
            return other
        if isinstance(other, Polynomial):
            return LocalizedFunction(self.chart, other)
        if isinstance(other, int):
            return LocalizedFunction.constant(self.chart, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return loc_sum(self.chart, [(self.num, self.denom_power), (other.num, other.denom_power)])

    __radd__ = __add__

    def __neg__(self):
        return LocalizedFunction._trusted(self.chart, -self.num, self.denom_power)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LocalizedFunction._trusted(self.chart, self.num.scale(other), self.denom_power)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return LocalizedFunction(
            self.chart, self.num * other.num, self.denom_power + other.denom_power
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        return LocalizedFunction(self.chart, self.num**k, self.denom_power * k)

    def __eq__(self, other):
        if isinstance(other, (int, Polynomial)):
            other = self._coerce(other)
        if not isinstance(other, LocalizedFunction):
            return NotImplemented
        if self.chart is not other.chart and self.chart != other.chart:
            return False
        if self.chart.e == 1:
            return self.denom_power == other.denom_power and self.num == other.num
        return loc_eq(self, other)

    def __hash__(self):
        if self.chart.e == 1:
            return hash((self.num, self.denom_power))
        return hash(self.chart)

    def __repr__(self):
        from .cli.render import render_function

        return f"LocalizedFunction({render_function(self)!r})"

    @classmethod
    def _trusted(cls, chart, num, m):
        # caller guarantees minimality is preserved (e.g. negation, unit scaling)
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.num = num
        obj.denom_power = m if num.terms else 0
        return obj

    def partial(self, i: int) -> "LocalizedFunction":
        """Quotient rule: d(g/f^m) = (dg*f - m*g*df) / f^(m+1)."""
        g, m = self.num, self.denom_power
        if m == 0:
            return LocalizedFunction._trusted(self.chart, g.partial(i), 0)
        f = self.chart.f
        top = g.partial(i) * f - (g * f.partial(i)).scale(m)
        return LocalizedFunction(self.chart, top, m + 1)

    def lift_canonical(self):
        return LocalizedFunction(self.chart.lift(), self.num.lift_canonical(), self.denom_power)

    def reduce_mod_p(self):
        return LocalizedFunction(self.chart.reduce(), self.num.reduce_mod_p(), self.denom_power)

    def divide_by_p(self):
        """``(p*h)/f^m -> h/f^m`` over ``Z/p``; well defined since f is regular."""
        return LocalizedFunction(self.chart.reduce(), self.num.divide_by_p(), self.denom_power)

    def frobenius(self):
        """``self ** p`` over F_p (exponent scaling on numerator and power)."""
        return LocalizedFunction(self.chart, self.num.frobenius(), self.denom_power * self.chart.p)


def _minimize(chart, num, m):
    f = chart.f
    while m > 0:
        try:
            num = num.exact_div(f)
        except NotDivisible:
            break
        m -= 1
    return num, m


def loc_sum(chart: Chart, parts: Iterable) -> LocalizedFunction:
    """Sum of ``(numerator, denom_power)`` pairs over a common denominator."""
    parts = [(g, m) for g, m in parts if g.terms]
    if not parts:
        return LocalizedFunction.zero(chart)
    if len(parts) == 1:
        g, m = parts[0]
        return LocalizedFunction(chart, g, m)
    top = max(m for _, m in parts)
    acc = {}
    mod = chart.modulus
    for g, m in parts:
        if m != top:
            g = g * chart.f_power(top - m)
        for exp, c in g.terms.items():
            acc[exp] = (acc.get(exp, 0) + c) % mod
    total = Polynomial._make(chart.ring, {k: v for k, v in acc.items() if v})
    return LocalizedFunction(chart, total, top)


# ---------------------------------------------------------------------------
# Functional aliases


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_partial(a: Polynomial, i: int) -> Polynomial:
    return a.partial(i)


def poly_exact_div(a: Polynomial, chart: Chart) -> Polynomial:
    """Divide by the chart denominator ``f`` exactly."""
    if a.ring != chart.ring:
        raise ChartMismatch("polynomial ring does not match chart")
    return a.exact_div(chart.f)


def poly_pth_root(a: Polynomial) -> Polynomial:
    return a.pth_root()


def reduce_mod_p(a: Polynomial) -> Polynomial:
    return a.reduce_mod_p()


def lift_canonical(a: Polynomial) -> Polynomial:
    return a.lift_canonical()


def divide_by_p(a: Polynomial) -> Polynomial:
    return a.divide_by_p()


def loc_add(a: LocalizedFunction, b: LocalizedFunction) -> LocalizedFunction:
    return a + b


def loc_mul(a: LocalizedFunction, b: LocalizedFunction) -> LocalizedFunction:
    return a * b


def loc_eq(a: LocalizedFunction, b: LocalizedFunction) -> bool:
    """Equality by cross-multiplication; valid because f is a non-zero-divisor."""
    same_chart(a.chart, b.chart)
    chart = a.chart
    lhs = a.num * chart.f_power(b.denom_power)
    rhs = b.num * chart.f_power(a.denom_power)
    return lhs == rhs


def loc_partial(a: LocalizedFunction, i: int) -> LocalizedFunction:
    return a.partial(i)
