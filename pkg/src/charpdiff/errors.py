"""Exception hierarchy.

Everything raised for a mathematical reason derives from :class:`CharpError`;
the CLI maps those to exit code 1.
"""


class CharpError(Exception):
    """Base class for domain errors."""


class ChartMismatch(CharpError, ValueError):
    """Operands live on different charts (or different coefficient rings)."""


class NotDivisible(CharpError, ArithmeticError):
    """Exact division by the chart denominator failed."""


class NotPthPower(CharpError, ArithmeticError):
    """A polynomial has no p-th root in F_p[x]."""


class NotDivisibleByP(CharpError, ArithmeticError):
    """Some coefficient is a unit mod p, so division by p is impossible."""


class RequiresPrimeField(CharpError, ValueError):
    """The operation is only defined over Z/p (e = 1)."""


class BernsteinUndefined(CharpError, ValueError):
    """Bernstein degree requested off the affine chart or for zero."""


class NotCentral(CharpError, ValueError):
    """An operator expected to be central does not commute with a generator."""


class NotInImage(CharpError, ValueError):
    """An operator is not of the shape produced by the center isomorphism."""


class DivisibilityFailure(CharpError, ArithmeticError):
    """A commutator of lifts was not divisible by p."""


class NotScalarCentral(CharpError, ValueError):
    """A transported central element is not a central scalar matrix."""


class InvalidMap(CharpError, ValueError):
    """Generator images violate the defining relations."""
