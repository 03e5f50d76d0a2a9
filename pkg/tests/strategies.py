"""Hypothesis strategies for small random polynomials."""
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from quadricnets.poly import Polynomial, VarTable, monomial_basis

SMALL = VarTable(("m0", "m1"), ("x0", "x1", "x2"))


def coefficients(field):
    if field:
        return st.integers(0, field - 1)
    return st.one_of(st.integers(-9, 9), st.fractions(min_value=-5, max_value=5, max_denominator=7))


def exponents(n, max_deg=3):
    return st.lists(st.integers(0, max_deg), min_size=n, max_size=n).map(tuple)


@st.composite
def polynomials(draw, vars=SMALL, field=0, max_terms=5, max_deg=3):
    terms = draw(st.dictionaries(exponents(vars.nvars, max_deg), coefficients(field), max_size=max_terms))
    return Polynomial(vars, terms, field)


@st.composite
def bihomogeneous(draw, a, b, vars=SMALL, field=0, max_terms=4):
    monos = monomial_basis(a, b, vars)
    chosen = draw(st.lists(st.sampled_from(monos), min_size=1, max_size=max_terms, unique=True))
    coeffs = draw(st.lists(st.integers(-6, 6).filter(bool), min_size=len(chosen), max_size=len(chosen)))
    return Polynomial(vars, dict(zip(chosen, coeffs)), field)


def to_sympy(p: Polynomial):
    syms = sympy.symbols(p.vars.names)
    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return expr, syms
