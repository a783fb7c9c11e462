"""Canonical text and JSON rendering.

A term is written ``c*x^a*finv^m*d^b`` (factors omitted when trivial) and
terms are ordered by descending degree-lex d- (or y-) multidegree, then by
descending degree-lex x-monomial.  Coefficients are least nonnegative
residues and terms are joined with `` + ``.  Rendered text parses back to
the same value.
"""

from __future__ import annotations

from ..coeffring import LocalizedFunction, Polynomial


def _power(name, k):
    return name if k == 1 else f"{name}^{k}"


def _term(c, xexp, m, dexp, dname):
    factors = [_power(f"x{i}", a) for i, a in enumerate(xexp, start=1) if a]
    if m:
        factors.append(_power("finv", m))
    if dexp is not None:
        factors.extend(_power(f"{dname}{i}", b) for i, b in enumerate(dexp, start=1) if b)
    if c != 1 or not factors:
        factors.insert(0, str(c))
    return "*".join(factors)


def _function_terms(g: LocalizedFunction, dexp=None, dname="d"):
    return [_term(c, xexp, g.denom_power, dexp, dname) for xexp, c in g.num.sorted_terms()]


def _join(parts):
    return " + ".join(parts) if parts else "0"


def render_polynomial(a: Polynomial) -> str:
    return _join([_term(c, xexp, 0, None, "") for xexp, c in a.sorted_terms()])


def render_function(g: LocalizedFunction) -> str:
    return _join(_function_terms(g))


def render_operator(P) -> str:
    parts = []
    for b, g in P.sorted_terms():
        parts.extend(_function_terms(g, b, "d"))
    return _join(parts)


def render_symbol(s) -> str:
    parts = []
    for b, g in s.sorted_terms():
        parts.extend(_function_terms(g, b, "y"))
    return _join(parts)


def render_value(value) -> str:
    from ..diffop import DiffOperator, VectorField
    from ..frobcenter import CentralElement, SymbolPolynomial

    if isinstance(value, CentralElement):
        return render_operator(value.op)
    if isinstance(value, DiffOperator):
        return render_operator(value)
    if isinstance(value, VectorField):
        return render_operator(value.embed())
    if isinstance(value, SymbolPolynomial):
        return render_symbol(value)
    if isinstance(value, LocalizedFunction):
        return render_function(value)
    if isinstance(value, Polynomial):
        return render_polynomial(value)
    raise TypeError(f"cannot render {type(value).__name__}")


def render_matrix(M) -> str:
    if M.size == 1:
        return render_operator(M.entries[0][0])
    rows = ", ".join("[" + ", ".join(render_operator(e) for e in row) + "]" for row in M.entries)
    return f"[{rows}]"


def _json_terms(sorted_items, fiber_key):
    out = []
    for b, g in sorted_items:
        for xexp, c in g.num.sorted_terms():
            out.append(
                {fiber_key: list(b), "x": list(xexp), "finv": g.denom_power, "coeff": c}
            )
    return out


def value_to_json(value) -> dict:
    from ..diffop import DiffOperator, VectorField
    from ..frobcenter import CentralElement, SymbolPolynomial

    if isinstance(value, CentralElement):
        value = value.op
    if isinstance(value, VectorField):
        value = value.embed()
    if isinstance(value, DiffOperator):
        return {
            "kind": "operator",
            "text": render_operator(value),
            "terms": _json_terms(value.sorted_terms(), "d"),
        }
    if isinstance(value, SymbolPolynomial):
        return {
            "kind": "symbol",
            "text": render_symbol(value),
            "terms": _json_terms(value.sorted_terms(), "y"),
        }
    if isinstance(value, LocalizedFunction):
        return {
            "kind": "function",
            "text": render_function(value),
            "terms": [
                {"x": list(xexp), "finv": value.denom_power, "coeff": c}
                for xexp, c in value.num.sorted_terms()
            ],
        }
    raise TypeError(f"cannot serialize {type(value).__name__}")
