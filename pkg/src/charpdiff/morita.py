"""Algebra maps D(Y) -> M_N(D(X)) given by generator images.

A map is validated against the presentation of D(Y) (commuting coordinates,
commuting derivations, ``[d_i, x_j] = delta_ij``, and the relations of
``1/f``), then used to push central elements of D(Y) over to D(X).  For an
isomorphism onto a matrix ring the image of a central element is a central
scalar matrix, which through ``iso_i`` gives a map of cotangent bundles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeffring import Chart, LocalizedFunction, Polynomial, same_chart
from .diffop import DiffOperator
from .errors import ChartMismatch, InvalidMap, NotCentral, NotScalarCentral
from .frobcenter import CentralElement, SymbolPolynomial, iso_i, iso_i_inverse
from .poisson import canonical_bracket


class MatrixOperator:
    """Square matrix with entries in D(X)."""

    __slots__ = ("chart", "size", "entries")

    def __init__(self, chart: Chart, entries):
        rows = tuple(tuple(row) for row in entries)
        size = len(rows)
        if size < 1 or any(len(r) != size for r in rows):
            raise ValueError("matrix must be square and nonempty")
        for row in rows:
            for entry in row:
                same_chart(chart, entry.chart)
        self.chart = chart
        self.size = size
        self.entries = rows

    @classmethod
    def scalar(cls, op: DiffOperator, size: int = 1):
        zero = DiffOperator.zero(op.chart)
        return cls(op.chart, [[op if i == j else zero for j in range(size)] for i in range(size)])

    @classmethod
    def identity(cls, chart, size=1):
        return cls.scalar(DiffOperator.one(chart), size)

    @classmethod
    def zero(cls, chart, size=1):
        return cls.scalar(DiffOperator.zero(chart), size)

    @classmethod
    def unit(cls, chart, size, i, j):
        """Matrix unit ``E_ij`` (1-based)."""
        zero = DiffOperator.zero(chart)
        one = DiffOperator.one(chart)
        return cls(chart, [[one if (r, c) == (i - 1, j - 1) else zero for c in range(size)]
                           for r in range(size)])

    def _check(self, other):
        if not isinstance(other, MatrixOperator):
            raise TypeError("expected a MatrixOperator")
        same_chart(self.chart, other.chart)
        if self.size != other.size:
            raise ChartMismatch(f"size mismatch {self.size} vs {other.size}")

    def __add__(self, other):
        self._check(other)
        return MatrixOperator(self.chart, [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)
        ])

    def __neg__(self):
        return MatrixOperator(self.chart, [[-a for a in row] for row in self.entries])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MatrixOperator(self.chart, [[a.scale(other) for a in row] for row in self.entries])
        self._check(other)
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = DiffOperator.zero(self.chart)
                for k in range(n):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixOperator(self.chart, out)

    def __pow__(self, k: int):
        result = MatrixOperator.identity(self.chart, self.size)
        for _ in range(k):
            result = self * result
        return result

    def commutator(self, other):
        return self * other - other * self

    def is_zero(self) -> bool:
        return all(a.is_zero() for row in self.entries for a in row)

    def scalar_value(self):
        """The ``c`` with ``self == c * I``, or ``None``."""
        c = self.entries[0][0]
        for i, row in enumerate(self.entries):
            for j, a in enumerate(row):
                if i == j:
                    if a != c:
                        return None
                elif not a.is_zero():
                    return None
        return c

    def __eq__(self, other):
        if not isinstance(other, MatrixOperator):
            return NotImplemented
        return (self.chart == other.chart and self.size == other.size
                and all(a == b for ra, rb in zip(self.entries, other.entries)
                        for a, b in zip(ra, rb)))

    __hash__ = None

    def __repr__(self):
        from .cli.render import render_matrix

        return f"MatrixOperator({render_matrix(self)!r})"


def matrix_add(A, B):
    return A + B


def matrix_mul(A, B):
    return A * B


def matrix_commutator(A, B):
    return A.commutator(B)


@dataclass(frozen=True)
class GeneratorImagesMap:
    """Images of ``x_i``, ``d_i`` (and ``1/f`` if localized) of D(Y) in M_N(D(X))."""

    source: Chart
    target: Chart
    size: int
    x_images: tuple
    d_images: tuple
    finv_image: MatrixOperator = None

    def __post_init__(self):
        if self.source.e != 1 or self.target.e != 1:
            raise ValueError("maps are defined over Z/p")
        if self.source.p != self.target.p:
            raise ValueError("source and target must share p")
        if len(self.x_images) != self.source.n or len(self.d_images) != self.source.n:
            raise ValueError("need one image per source coordinate and derivation")
        if not self.source.is_affine and self.finv_image is None:
            raise ValueError("localized source needs an image for finv")
        for M in (*self.x_images, *self.d_images,
                  *([self.finv_image] if self.finv_image is not None else [])):
            same_chart(self.target, M.chart)
            if M.size != self.size:
                raise ValueError("image matrix has the wrong size")


def eval_polynomial(g: Polynomial, images, chart: Chart, size: int) -> MatrixOperator:
    """Substitute commuting matrices for the variables of ``g``."""
    total = MatrixOperator.zero(chart, size)
    powers = [[MatrixOperator.identity(chart, size)] for _ in images]
    for exp, c in g.sorted_terms():
        term = MatrixOperator.identity(chart, size)
        for k, a in enumerate(exp):
            while len(powers[k]) <= a:
                powers[k].append(images[k] * powers[k][-1])
            if a:
                term = term * powers[k][a]
        total = total + term * c
    return total


@dataclass
class RelationCheck:
    name: str
    residual: MatrixOperator

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


@dataclass
class ValidationReport:
    relations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(r.ok for r in self.relations)

    def failures(self):
        return [r for r in self.relations if not r.ok]


def validate_map(phi: GeneratorImagesMap) -> ValidationReport:
    """Check every defining relation of D(Y) on the images; residuals are reported."""
    X, D, finv = phi.x_images, phi.d_images, phi.finv_image
    chart, N = phi.target, phi.size
    ident = MatrixOperator.identity(chart, N)
    zero = MatrixOperator.zero(chart, N)
    n = phi.source.n
    report = ValidationReport()
    add = report.relations.append
    for i in range(n):
        for j in range(i + 1, n):
            add(RelationCheck(f"[x{i+1},x{j+1}]", X[i].commutator(X[j])))
            add(RelationCheck(f"[d{i+1},d{j+1}]", D[i].commutator(D[j])))
    for i in range(n):
        for j in range(n):
            expected = ident if i == j else zero
            add(RelationCheck(f"[d{i+1},x{j+1}]", D[i].commutator(X[j]) - expected))
    if not phi.source.is_affine:
        fY = phi.source.f
        f_img = eval_polynomial(fY, X, chart, N)
        add(RelationCheck("f*finv", f_img * finv - ident))
        add(RelationCheck("finv*f", finv * f_img - ident))
        for i in range(n):
            add(RelationCheck(f"[x{i+1},finv]", X[i].commutator(finv)))
        finv_sq = finv * finv
        for i in range(n):
            df = eval_polynomial(fY.partial(i + 1), X, chart, N)
            add(RelationCheck(f"[d{i+1},finv]", D[i].commutator(finv) + df * finv_sq))
    return report


def apply_map(phi: GeneratorImagesMap, P: DiffOperator) -> MatrixOperator:
    """Evaluate the map on a normal-form operator over the source chart."""
    same_chart(phi.source, P.chart)
    chart, N = phi.target, phi.size
    total = MatrixOperator.zero(chart, N)
    d_pows = [[MatrixOperator.identity(chart, N)] for _ in phi.d_images]
    finv_pows = [MatrixOperator.identity(chart, N)]
    for b, g in P.sorted_terms():
        term = eval_polynomial(g.num, phi.x_images, chart, N)
        while len(finv_pows) <= g.denom_power:
            finv_pows.append(phi.finv_image * finv_pows[-1])
        if g.denom_power:
            term = term * finv_pows[g.denom_power]
        for k, e in enumerate(b):
            while len(d_pows[k]) <= e:
                d_pows[k].append(phi.d_images[k] * d_pows[k][-1])
            if e:
                term = term * d_pows[k][e]
        total = total + term
    return total


def transport_center(phi: GeneratorImagesMap, z) -> CentralElement:
    """Image of a central element of D(Y); must be a central scalar matrix."""
    op = z.op if isinstance(z, CentralElement) else z
    M = apply_map(phi, op)
    c = M.scalar_value()
    if c is None:
        raise NotScalarCentral("image is not a scalar matrix")
    try:
        return CentralElement(c)
    except NotCentral as exc:
        raise NotScalarCentral("scalar image is not central") from exc


def compose_maps(outer: GeneratorImagesMap, inner: GeneratorImagesMap) -> GeneratorImagesMap:
    """``outer o inner`` for ``inner: D(Z) -> M_a(D(Y))``, ``outer: D(Y) -> M_b(D(X))``."""
    same_chart(inner.target, outer.source)
    a, b = inner.size, outer.size
    chart = outer.target

    def lift(M):
        blocks = [[apply_map(outer, e) for e in row] for row in M.entries]
        rows = []
        for bi in range(a):
            for r in range(b):
                rows.append([blocks[bi][bj].entries[r][c] for bj in range(a) for c in range(b)])
        return MatrixOperator(chart, rows)

    return GeneratorImagesMap(
        source=inner.source,
        target=chart,
        size=a * b,
        x_images=tuple(lift(M) for M in inner.x_images),
        d_images=tuple(lift(M) for M in inner.d_images),
        finv_image=None if inner.finv_image is None else lift(inner.finv_image),
    )


@dataclass
class InducedMap:
    """Images of the generators of O(T*Y) in O(T*X)."""

    source: Chart
    target: Chart
    images: dict

    def generator_names(self):
        return list(self.images)

    def __call__(self, s: SymbolPolynomial) -> SymbolPolynomial:
        """Substitute generator images into a symbol on the source chart."""
        same_chart(self.source, s.chart)
        n = self.source.n
        total = SymbolPolynomial.zero(self.target)
        xs = [self.images[f"x{i}"] for i in range(1, n + 1)]
        ys = [self.images[f"y{i}"] for i in range(1, n + 1)]
        for b, g in s.terms.items():
            term = SymbolPolynomial.constant(self.target, 0)
            for exp, c in g.num.terms.items():
                mono = SymbolPolynomial.constant(self.target, c)
                for k, e in enumerate(exp):
                    if e:
                        mono = mono * xs[k] ** e
                term = term + mono
            if g.denom_power:
                term = term * self.images["finv"] ** g.denom_power
            for k, e in enumerate(b):
                if e:
                    term = term * ys[k] ** e
            total = total + term
        return total

    def bracket_checks(self):
        """``(name, expected, actual)`` for every generator pair."""
        n = self.source.n
        checks = []
        one = SymbolPolynomial.constant(self.target, 1)
        zero = SymbolPolynomial.zero(self.target)
        img = self.images
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                checks.append((f"{{y{i},x{j}}}", one if i == j else zero,
                               canonical_bracket(img[f"y{i}"], img[f"x{j}"])))
                if i < j:
                    checks.append((f"{{x{i},x{j}}}", zero,
                                   canonical_bracket(img[f"x{i}"], img[f"x{j}"])))
                    checks.append((f"{{y{i},y{j}}}", zero,
                                   canonical_bracket(img[f"y{i}"], img[f"y{j}"])))
        if "finv" in img:
            fY = self.source.f
            finv = SymbolPolynomial.finv(self.source)
            for i in range(1, n + 1):
                src = canonical_bracket(SymbolPolynomial.y(self.source, i), finv)
                checks.append((f"{{y{i},finv}}", self(src),
                               canonical_bracket(img[f"y{i}"], img["finv"])))
                checks.append((f"{{x{i},finv}}", zero,
                               canonical_bracket(img[f"x{i}"], img["finv"])))
            checks.append(("f*finv", one, self(SymbolPolynomial.function(
                LocalizedFunction(self.source, fY))) * img["finv"]))
        return checks

    def preserves_bracket(self) -> bool:
        return all(expected == actual for _, expected, actual in self.bracket_checks())


def induced_symplectic_map(phi: GeneratorImagesMap) -> InducedMap:
    """Generator table of ``iso_i^-1 o transport o iso_i``."""
    Y = phi.source
    gens = {}
    for i in range(1, Y.n + 1):
        gens[f"x{i}"] = SymbolPolynomial.x(Y, i)
    for i in range(1, Y.n + 1):
        gens[f"y{i}"] = SymbolPolynomial.y(Y, i)
    if not Y.is_affine:
        gens["finv"] = SymbolPolynomial.finv(Y)
    images = {
        name: iso_i_inverse(transport_center(phi, iso_i(s))) for name, s in gens.items()
    }
    return InducedMap(Y, phi.target, images)


def identity_map(chart: Chart) -> GeneratorImagesMap:
    n = chart.n
    return GeneratorImagesMap(
        source=chart,
        target=chart,
        size=1,
        x_images=tuple(MatrixOperator.scalar(DiffOperator.x(chart, i)) for i in range(1, n + 1)),
        d_images=tuple(MatrixOperator.scalar(DiffOperator.d(chart, i)) for i in range(1, n + 1)),
        finv_image=None if chart.is_affine else MatrixOperator.scalar(DiffOperator.finv(chart)),
    )


def automorphism(chart: Chart, x_images, d_images, finv_image=None) -> GeneratorImagesMap:
    """Convenience constructor for ``N = 1`` maps from operator images."""
    return GeneratorImagesMap(
        source=chart,
        target=chart,
        size=1,
        x_images=tuple(MatrixOperator.scalar(P) for P in x_images),
        d_images=tuple(MatrixOperator.scalar(P) for P in d_images),
        finv_image=None if finv_image is None else MatrixOperator.scalar(finv_image),
    )


def require_valid(phi: GeneratorImagesMap) -> ValidationReport:
    report = validate_map(phi)
    if not report.valid:
        names = ", ".join(r.name for r in report.failures())
        raise InvalidMap(f"relations violated: {names}")
    return report
