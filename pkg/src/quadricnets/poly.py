"""Sparse multivariate polynomials over Q and F_p with a bigraded variable table.

A polynomial is a dict mapping exponent tuples to nonzero coefficients.
Coefficients over Q are Python ints where possible and ``Fraction``
otherwise; over F_p they are ints in ``range(p)``.  The field is encoded by
an integer tag: ``QQ == 0`` for the rationals, a prime ``p`` for F_p.

Variables come in two blocks (mu and x) so that every monomial has a
bidegree (mu-degree, x-degree).  Monomials are compared with degrevlex over
the concatenated list ``mu + x``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Union

QQ = 0

Coeff = Union[int, Fraction]
Monomial = tuple  # tuple[int, ...]


class PolynomialError(ValueError):
    pass


class ParseError(PolynomialError):
    """Syntax error in polynomial text; ``pos`` is the 0-based offset."""

    def __init__(self, msg: str, pos: int, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"{msg} at position {pos}")


class UnknownVariable(PolynomialError):
    def __init__(self, name: str, pos: int | None = None):
        self.name = name
        self.pos = pos
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"unknown variable {name!r}{where}")


@dataclass(frozen=True)
class VarTable:
    """Ordered mu-block and x-block variable names."""

    mu: tuple[str, ...] = ()
    x: tuple[str, ...] = ()
    index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "x", tuple(self.x))
        names = self.mu + self.x
        if len(set(names)) != len(names):
            raise PolynomialError(f"duplicate variable names in {names}")
        object.__setattr__(self, "index", {v: i for i, v in enumerate(names)})

    @property
    def names(self) -> tuple[str, ...]:
        return self.mu + self.x

    @property
    def nvars(self) -> int:
        return len(self.mu) + len(self.x)

    @property
    def m(self) -> int:
        return len(self.mu)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def position(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def bidegree(self, e: Monomial) -> tuple[int, int]:
        m = len(self.mu)
        return sum(e[:m]), sum(e[m:])


def degrevlex_key(e: Monomial) -> tuple:
    """Sort key: larger key means larger monomial in degrevlex."""
    return (sum(e), tuple(-a for a in reversed(e)))


def normalize_coeff(c: Coeff, p: int) -> Coeff:
    if p:
        if isinstance(c, Fraction):
            num, den = c.numerator % p, c.denominator % p
            if den == 0:
                raise ZeroDivisionError(f"denominator {c.denominator} vanishes mod {p}")
            return num * pow(den, -1, p) % p
        return c % p
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Polynomial:
    """Immutable sparse polynomial; see module docstring for the encoding."""

    __slots__ = ("vars", "field", "terms", "_hash")

    def __init__(self, vars: VarTable, terms: Mapping | None = None, field: int = QQ):
        self.vars = vars
        self.field = field
        clean = {}
        if terms:
            n = vars.nvars
            for e, c in terms.items():
                if len(e) != n:
                    raise PolynomialError(f"exponent {e} has length {len(e)}, expected {n}")
                c = normalize_coeff(c, field)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, vars: VarTable, terms: dict, field: int) -> "Polynomial":
        # terms already canonical: no zero coefficients, reduced mod p
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.field = field
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, vars: VarTable, field: int = QQ) -> "Polynomial":
        return cls._raw(vars, {}, field)

    @classmethod
    def constant(cls, vars: VarTable, c: Coeff, field: int = QQ) -> "Polynomial":
        return cls(vars, {(0,) * vars.nvars: c}, field)

    @classmethod
    def var(cls, vars: VarTable, name: str, field: int = QQ) -> "Polynomial":
        e = [0] * vars.nvars
        e[vars.position(name)] = 1
        return cls._raw(vars, {tuple(e): 1}, field)

    @classmethod
    def monomial(cls, vars: VarTable, e: Monomial, c: Coeff = 1, field: int = QQ) -> "Polynomial":
        return cls(vars, {tuple(e): c}, field)

    # basic protocol -----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.field == other.field and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars.names, self.field, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return format_polynomial(self)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise PolynomialError("mismatched variable tables")
            if other.field != self.field:
                raise PolynomialError(f"mismatched fields {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.vars, other, self.field)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        p = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if p:
                s %= p
            if s:
                out[e] = normalize_coeff(s, 0) if not p else s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.vars, out, p)

    __radd__ = __add__

    def __neg__(self):
        p = self.field
        if p:
            return Polynomial._raw(self.vars, {e: (p - c) for e, c in self.terms.items()}, p)
        return Polynomial._raw(self.vars, {e: -c for e, c in self.terms.items()}, p)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        p = self.field
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        if p:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: normalize_coeff(c, 0) for e, c in out.items() if c}
        return Polynomial._raw(self.vars, out, p)

    __rmul__ = __mul__

    def scale(self, c: Coeff) -> "Polynomial":
        c = normalize_coeff(c, self.field)
        if not c:
            return Polynomial.zero(self.vars, self.field)
        p = self.field
        if p:
            return Polynomial._raw(self.vars, {e: v * c % p for e, v in self.terms.items()}, p)
        return Polynomial._raw(self.vars, {e: normalize_coeff(v * c, 0) for e, v in self.terms.items()}, p)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.vars, 1, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, e: Monomial, c: Coeff = 1) -> "Polynomial":
        p = self.field
        terms = {}
        for f, v in self.terms.items():
            v = v * c
            if p:
                v %= p
            if v:
                terms[tuple(a + b for a, b in zip(e, f))] = v
        return Polynomial._raw(self.vars, terms, p)

    # structure ----------------------------------------------------------
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def bidegree(self):
        """(a, b) if bihomogeneous, ``"mixed"`` otherwise, ``"any"`` for zero."""
        if not self.terms:
            return "any"
        degs = {self.vars.bidegree(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else "mixed"

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def variables(self) -> set[str]:
        names = self.vars.names
        return {names[i] for e in self.terms for i, a in enumerate(e) if a}

    def coefficient(self, mono) -> Coeff:
        """Coefficient of a monomial given as an exponent tuple or a name->power map."""
        if isinstance(mono, Mapping):
            e = [0] * self.vars.nvars
            for name, k in mono.items():
                e[self.vars.position(name)] = k
            mono = tuple(e)
        return self.terms.get(tuple(mono), 0)

    def leading(self) -> tuple[Monomial, Coeff]:
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        e = max(self.terms, key=degrevlex_key)
        return e, self.terms[e]

    def sorted_terms(self) -> list[tuple[Monomial, Coeff]]:
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def constant_term(self) -> Coeff:
        return self.terms.get((0,) * self.vars.nvars, 0)

    def to_field(self, p: int) -> "Polynomial":
        """Reduce a rational polynomial mod p (or return it unchanged if p == field)."""
        if p == self.field:
            return self
        if self.field:
            raise PolynomialError("can only change field from Q")
        return Polynomial(self.vars, self.terms, p)

    def content_divisible_by(self, p: int) -> bool:
        if self.field:
            raise PolynomialError("content is defined over Q")
        return all(Fraction(c).numerator % p == 0 for c in self.terms.values())

    def monic(self) -> "Polynomial":
        _, c = self.leading()
        if self.field:
            return self.scale(pow(c, -1, self.field))
        return self.scale(Fraction(1) / c)

    def derivative(self, name: str) -> "Polynomial":
        return partial_derivative(self, name)

    def subs(self, assignment: Mapping) -> "Polynomial":
        return substitute(self, assignment)

    def evaluate(self, point: Mapping) -> Coeff:
        names = self.vars.names
        total = 0
        for e, c in self.terms.items():
            v = c
            for i, a in enumerate(e):
                if a:
                    v = v * Fraction(point[names[i]]) ** a if not self.field else v * pow(point[names[i]], a, self.field)
            total += v
        return normalize_coeff(total, self.field)


# ---------------------------------------------------------------------------
# derived operations

def partial_derivative(p: Polynomial, name: str) -> Polynomial:
    i = p.vars.position(name)
    out = {}
    for e, c in p.terms.items():
        k = e[i]
        if k:
            f = e[:i] + (k - 1,) + e[i + 1:]
            out[f] = c * k
    return Polynomial(p.vars, out, p.field)


def substitute(p: Polynomial, assignment: Mapping, target: VarTable | None = None) -> Polynomial:
    """Replace variables of ``p`` by polynomials and expand.

    ``assignment`` maps variable names to Polynomials (or numbers).  Variables
    not listed map to themselves, which requires ``target == p.vars``.  When
    ``target`` differs from ``p.vars`` every variable occurring in ``p`` must
    be assigned.
    """
    target = target or p.vars
    fld = p.field
    images = []
    for name in p.vars.names:
        if name in assignment:
            v = assignment[name]
            if isinstance(v, Polynomial):
                if v.vars != target:
                    raise PolynomialError(f"substitution target for {name} lives in a different variable table")
                if v.field != fld:
                    v = v.to_field(fld)
            else:
                v = Polynomial.constant(target, v, fld)
            images.append(v)
        elif target == p.vars:
            images.append(None)
        else:
            images.append(name)
    result = Polynomial.zero(target, fld)
    power_cache: dict = {}
    for e, c in p.terms.items():
        keep = [0] * target.nvars
        term = Polynomial.constant(target, c, fld)
        for i, a in enumerate(e):
            if not a:
                continue
            img = images[i]
            if img is None:
                keep[i] += a
            elif isinstance(img, str):
                raise PolynomialError(f"variable {img!r} is not assigned")
            else:
                key = (i, a)
                if key not in power_cache:
                    power_cache[key] = img ** a
                term = term * power_cache[key]
        if any(keep):
            term = term.mul_monomial(tuple(keep))
        result = result + term
    return result


def monomial_basis(a: int, b: int, vars: VarTable) -> list[Monomial]:
    """All monomials of bidegree (a, b), largest first in degrevlex."""
    if a < 0 or b < 0:
        return []
    m, n = len(vars.mu), len(vars.x)
    out = []
    for mu_part in _exponents(a, m):
        for x_part in _exponents(b, n):
            out.append(mu_part + x_part)
    out.sort(key=degrevlex_key, reverse=True)
    return out


def monomial_count(a: int, b: int, vars: VarTable) -> int:
    m, n = len(vars.mu), len(vars.x)
    if a < 0 or b < 0:
        return 0
    ca = comb(a + m - 1, m - 1) if m else int(a == 0)
    cb = comb(b + n - 1, n - 1) if n else int(b == 0)
    return ca * cb


def _exponents(d: int, n: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def monomials_of_degree(d: int, n: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree d in n variables, largest first (degrevlex)."""
    return sorted(_exponents(d, n), key=degrevlex_key, reverse=True)


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial | None:
    """Return q with f == q*g, or None when g does not divide f.

    Division by leading terms decides the question for a principal ideal;
    the result is double-checked by multiplying back.  If the leading-term
    path leaves a remainder, a recursive coefficient division in the last
    variable that occurs in g confirms the negative answer.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    f = g._coerce(f)
    if f.is_zero():
        return Polynomial.zero(f.vars, f.field)
    q = _divide_leading(f, g)
    if q is not None and q * g == f:
        return q
    q = _divide_recursive(f, g)
    if q is not None and q * g == f:
        return q
    return None


def _divide_leading(f: Polynomial, g: Polynomial) -> Polynomial | None:
    fld = f.field
    ge, gc = g.leading()
    ginv = pow(gc, -1, fld) if fld else Fraction(1) / gc
    rem = dict(f.terms)
    quot: dict = {}
    gterms = list(g.terms.items())
    while rem:
        e = max(rem, key=degrevlex_key)
        if any(a < b for a, b in zip(e, ge)):
            return None
        c = rem[e] * ginv
        if fld:
            c %= fld
        else:
            c = normalize_coeff(c, 0)
        shift = tuple(a - b for a, b in zip(e, ge))
        quot[shift] = c
        for h, hc in gterms:
            k = tuple(a + b for a, b in zip(shift, h))
            v = rem.get(k, 0) - c * hc
            if fld:
                v %= fld
            if v:
                rem[k] = normalize_coeff(v, 0) if not fld else v
            else:
                rem.pop(k, None)
    return Polynomial(f.vars, quot, fld)


def _divide_recursive(f: Polynomial, g: Polynomial) -> Polynomial | None:
    """Divide by viewing both as univariate in the last variable of g."""
    idx = max((i for e in g.terms for i, a in enumerate(e) if a), default=None)
    if idx is None:
        c = g.constant_term()
        inv = pow(c, -1, f.field) if f.field else Fraction(1) / c
        return f.scale(inv)
    fu, gu = _univariate(f, idx), _univariate(g, idx)
    dg = max(gu)
    lead = gu[dg]
    rem = dict(fu)
    quot: dict = {}
    while rem:
        df = max(rem)
        if df < dg:
            return None
        c = exact_divide(rem[df], lead)
        if c is None:
            return None
        quot[df - dg] = c
        for k, gk in gu.items():
            v = rem.get(df - dg + k, Polynomial.zero(f.vars, f.field)) - c * gk
            if v.is_zero():
                rem.pop(df - dg + k, None)
            else:
                rem[df - dg + k] = v
    out = Polynomial.zero(f.vars, f.field)
    for k, c in quot.items():
        e = [0] * f.vars.nvars
        e[idx] = k
        out = out + c.mul_monomial(tuple(e))
    return out


def _univariate(f: Polynomial, idx: int) -> dict[int, Polynomial]:
    parts: dict[int, dict] = {}
    for e, c in f.terms.items():
        k = e[idx]
        parts.setdefault(k, {})[e[:idx] + (0,) + e[idx + 1:]] = c
    return {k: Polynomial._raw(f.vars, t, f.field) for k, t in parts.items()}


# ---------------------------------------------------------------------------
# printing and parsing

def _format_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return f"({c.numerator}/{c.denominator})" if c.denominator != 1 else str(c.numerator)
    return str(c)


def format_monomial(e: Monomial, names: Iterable[str]) -> str:
    parts = []
    for name, a in zip(names, e):
        if a == 1:
            parts.append(name)
        elif a > 1:
            parts.append(f"{name}^{a}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    names = p.vars.names
    out = []
    for e, c in p.sorted_terms():
        mono = format_monomial(e, names)
        neg = (c < 0) if not p.field else False
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{_format_coeff(mag)}*{mono}"
        else:
            body = _format_coeff(mag)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\S)")


def _tokenize(src: str):
    tokens = []
    pos = 0
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(src, pos)
        if m.group(1) is not None:
            tokens.append(("INT", int(m.group(1)), pos))
        elif m.group(2) is not None:
            tokens.append(("VAR", m.group(2), pos))
        else:
            ch = m.group(3)
            if ch not in "+-*^()/":
                raise ParseError(f"unexpected character {ch!r}", pos, src)
            tokens.append((ch, ch, pos))
        pos = m.end()
    tokens.append(("EOF", None, n))
    return tokens


class _Parser:
    # expr := term (('+'|'-') term)* ; term := factor ('*' factor)*
    # factor := ['-'] atom ['^' INT] ; atom := INT | VAR | '(' expr ')'
    def __init__(self, src: str, vars: VarTable, field: int):
        self.src = src
        self.vars = vars
        self.field = field
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "EOF" else repr(kind)
            got = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", tok[2], self.src)
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "EOF":
            raise ParseError("empty expression", 0, self.src)
        p = self.expr()
        self.take("EOF")
        return p

    def expr(self) -> Polynomial:
        if self.peek()[0] in ("+", "-"):
            sign = self.take()[0]
            p = self.term()
            if sign == "-":
                p = -p
        else:
            p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            q = self.factor()
            if op[0] == "*":
                p = p * q
            else:
                if len(q.terms) != 1 or q.degree() != 0:
                    raise ParseError("division only by nonzero constants", op[2], self.src)
                c = q.constant_term()
                p = p.scale(pow(c, -1, self.field) if self.field else Fraction(1) / c)
        return p

    def factor(self) -> Polynomial:
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            k = self.take("INT")[1]
            base = base ** k
        return base

    def atom(self) -> Polynomial:
        tok = self.peek()
        kind = tok[0]
        if kind == "INT":
            self.take()
            return Polynomial.constant(self.vars, tok[1], self.field)
        if kind == "VAR":
            self.take()
            if tok[1] not in self.vars:
                raise UnknownVariable(tok[1], tok[2])
            return Polynomial.var(self.vars, tok[1], self.field)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        found = "end of input" if kind == "EOF" else repr(tok[1])
        raise ParseError(f"unexpected {found}", tok[2], self.src)


def parse_polynomial(src: str, vars: VarTable, field: int = QQ) -> Polynomial:
    """Parse ``src`` (integers, variables, + - * ^ and parentheses)."""
    return _Parser(src, vars, field).parse()
