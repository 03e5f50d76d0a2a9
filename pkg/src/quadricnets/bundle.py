"""Quadric surface bundle attached to a net of quadrics containing a line.

If the line x2 = ... = x7 = 0 lies on every Q_i, then Q_i = x0*L_i + x1*M_i + q_i
with L_i, M_i linear and q_i quadratic in x2..x7.  The planes through the line
contained in {sum l_i Q_i = 0} are cut out in P^2 x P^5 by

    e1 = sum l_i L_i,   e2 = sum l_i M_i,   e3 = sum l_i q_i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .groebner import buchberger
from .poly import Polynomial, PolynomialError, VarTable, exact_divide, substitute

LINE_VARS = ("x0", "x1")
FIBER_VARS = ("x2", "x3", "x4", "x5", "x6", "x7")
LAMBDAS = ("l0", "l1", "l2")


class LineError(PolynomialError):
    pass


class UnsupportedShape(PolynomialError):
    pass


@dataclass(frozen=True)
class LineDecomposition:
    L: Polynomial
    M: Polynomial
    q: Polynomial


@dataclass(frozen=True)
class BundleSystem:
    e1: Polynomial
    e2: Polynomial
    e3: Polynomial

    @property
    def vars(self) -> VarTable:
        return self.e1.vars

    @property
    def equations(self) -> tuple[Polynomial, Polynomial, Polynomial]:
        return (self.e1, self.e2, self.e3)

    def to_text(self) -> str:
        v = self.vars
        lines = [f"vars mu: {' '.join(v.mu)}", f"vars x: {' '.join(v.x)}"]
        lines += [f"poly {n} = {e}" for n, e in zip(("e1", "e2", "e3"), self.equations)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BundleSystem":
        from .scenario import parse_scenario  # scenario imports this module
        sc = parse_scenario(text)
        return cls(sc.polys["e1"], sc.polys["e2"], sc.polys["e3"])


@dataclass(frozen=True)
class RationalSection:
    """Values of x2..x7 as polynomials in the lambdas."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != len(FIBER_VARS):
            raise PolynomialError(f"a section has {len(FIBER_VARS)} coordinates, got {len(coords)}")
        if all(c.is_zero() for c in coords):
            raise PolynomialError("the zero tuple is not a point of P^5")


def contains_standard_line(net) -> bool:
    quadrics = net.Q if hasattr(net, "Q") else net
    for q in quadrics:
        for a, b in (("x0", "x0"), ("x0", "x1"), ("x1", "x1")):
            if q.coefficient({a: 1, b: 1} if a != b else {a: 2}):
                return False
    return True


def decompose_along_line(Q: Polynomial) -> LineDecomposition:
    v = Q.vars
    if not contains_standard_line([Q]):
        raise LineError(f"{Q} has x0^2, x0*x1 or x1^2 terms, so it does not contain the line")
    i0, i1 = v.position("x0"), v.position("x1")
    L, M, q = {}, {}, {}
    for e, c in Q.terms.items():
        if e[i0]:
            bucket, e = L, e[:i0] + (e[i0] - 1,) + e[i0 + 1:]
        elif e[i1]:
            bucket, e = M, e[:i1] + (e[i1] - 1,) + e[i1 + 1:]
        else:
            bucket = q
        bucket[e] = c
    out = LineDecomposition(*(Polynomial(v, t, Q.field) for t in (L, M, q)))
    x0, x1 = Polynomial.var(v, "x0", Q.field), Polynomial.var(v, "x1", Q.field)
    if x0 * out.L + x1 * out.M + out.q != Q:
        raise AssertionError("line decomposition does not reassemble the quadric")
    return out


def fiber_table(lambdas: Sequence[str] = LAMBDAS) -> VarTable:
    return VarTable(tuple(lambdas), FIBER_VARS)


def bundle_system(net, lambdas: Sequence[str] = LAMBDAS) -> BundleSystem:
    quadrics = list(net.Q if hasattr(net, "Q") else net)
    if len(quadrics) != 3:
        raise PolynomialError("a net needs exactly three quadrics")
    table = fiber_table(lambdas)
    lam = [Polynomial.var(table, n) for n in lambdas]
    parts = [[], [], []]
    for q in quadrics:
        d = decompose_along_line(q)
        for k, f in enumerate((d.L, d.M, d.q)):
            parts[k].append(substitute(f, {x: Polynomial.var(table, x) for x in FIBER_VARS}, table))
    e = [sum((l * f for l, f in zip(lam, fs)), Polynomial.zero(table)) for fs in parts]
    for f, want in zip(e, [(1, 1), (1, 1), (1, 2)]):
        if not f.is_zero() and f.bidegree() != want:
            raise AssertionError(f"bundle equation {f} has bidegree {f.bidegree()}, expected {want}")
    return BundleSystem(*e)


def section_residuals(sys: BundleSystem, s: RationalSection) -> list[Polynomial]:
    """e1, e2, e3 evaluated along the section, as polynomials in the lambdas."""
    assignment = dict(zip(FIBER_VARS, s.coords))
    return [substitute(e, assignment) for e in sys.equations]


def verify_section(sys: BundleSystem, s: RationalSection) -> bool:
    return all(r.is_zero() for r in section_residuals(sys, s))


# ---------------------------------------------------------------------------
# discriminant

def _hessian_half(e3: Polynomial, xs) -> list[list[Polynomial]]:
    half = Fraction(1, 2)
    return [[e3.derivative(a).derivative(b).scale(half) for b in xs] for a in xs]


def bordered_matrix(sys: BundleSystem) -> list[list[Polynomial]]:
    xs = [x for x in sys.vars.x]
    G = _hessian_half(sys.e3, xs)
    L = [[e.derivative(x) for x in xs] for e in (sys.e1, sys.e2)]
    zero = Polynomial.zero(sys.vars)
    n = len(xs)
    top = [G[i] + [L[0][i], L[1][i]] for i in range(n)]
    bottom = [L[k] + [zero, zero] for k in range(2)]
    return top + bottom


def det_bareiss(M: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free determinant of a square polynomial matrix."""
    n = len(M)
    if n == 0:
        raise PolynomialError("empty matrix")
    A = [list(row) for row in M]
    vars, fld = A[0][0].vars, A[0][0].field
    one = Polynomial.constant(vars, 1, fld)
    sign = 1
    prev = one
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if swap is None:
                return Polynomial.zero(vars, fld)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                q = exact_divide(num, prev)
                if q is None:
                    raise AssertionError("Bareiss step is not exact")
                A[i][j] = q
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return -d if sign < 0 else d


def discriminant_octic(sys: BundleSystem) -> Polynomial:
    """det [[G, L^T], [L, 0]]; a form of degree 8 in the lambdas or zero."""
    for f, want in zip(sys.equations, [(1, 1), (1, 1), (1, 2)]):
        if not f.is_zero() and f.bidegree() != want:
            raise PolynomialError(f"{f} has bidegree {f.bidegree()}, expected {want}")
    D = det_bareiss(bordered_matrix(sys))
    want = (len(sys.vars.x) + 2, 0)
    if not D.is_zero() and D.bidegree() != want:
        raise AssertionError(f"discriminant has bidegree {D.bidegree()}, expected {want}")
    return D


# ---------------------------------------------------------------------------
# elimination to a (2,2) hypersurface

def _solve_for(e: Polynomial, candidates: Sequence[str]):
    """Write e = A*x_v + R with A free of x-variables and R free of candidates."""
    v = e.vars
    present = [c for c in candidates if c in e.variables()]
    if len(present) != 1:
        raise UnsupportedShape(f"{e} is not solvable for exactly one of {', '.join(candidates)}")
    x = present[0]
    A = e.derivative(x)
    if A.is_zero() or A.bidegree() not in ((1, 0), (0, 0)) or any(n in v.x for n in A.variables()):
        raise UnsupportedShape(f"{e} is not linear in {x} with a coefficient in the lambdas")
    xv = Polynomial.var(v, x)
    R = e - A * xv
    if x in R.variables():
        raise UnsupportedShape(f"{e} is not linear in {x}")
    return x, A, R


@dataclass(frozen=True)
class Elimination:
    result: Polynomial          # bidegree (2,2) in (lambda; x2..x5)
    multiplier: Polynomial      # result * multiplier == A-power * e3 after substitution
    solved: dict                # x -> (A, R) with A*x + R = 0


def eliminate(sys: BundleSystem, solve_vars: Sequence[str] = ("x6", "x7")) -> Elimination:
    solved = {}
    for e in (sys.e1, sys.e2):
        if e.is_zero():
            raise UnsupportedShape("a linear equation of the bundle is identically zero")
        x, A, R = _solve_for(e, solve_vars)
        if x in solved:
            raise UnsupportedShape(f"both linear equations only involve {x}")
        solved[x] = (A, R)
    vars = sys.vars
    e3 = sys.e3
    # x = -R/A; clear denominators with A^(degree of e3 in x)
    degs = {x: max((e[vars.position(x)] for e in e3.terms), default=0) for x in solved}
    mult = Polynomial.constant(vars, 1)
    for x, (A, _) in solved.items():
        mult = mult * A ** degs[x]
    N = Polynomial.zero(vars)
    for e, c in e3.terms.items():
        term = Polynomial.monomial(vars, tuple(0 if vars.names[i] in solved else a for i, a in enumerate(e)), c)
        for x, (A, R) in solved.items():
            k = e[vars.position(x)]
            term = term * (-R) ** k * A ** (degs[x] - k)
        N = N + term
    # divide out lambda factors of the multiplier while exact
    factors = [A for A, _ in solved.values()] + [Polynomial.var(vars, m) for m in vars.mu]
    divisor = Polynomial.constant(vars, 1)
    changed = True
    while changed:
        changed = False
        for f in factors:
            if f.degree() == 0:
                continue
            q = exact_divide(N, f)
            m = exact_divide(mult, divisor * f)
            if q is not None and m is not None:
                N, divisor, changed = q, divisor * f, True
    if not N.is_zero():
        _, lc = N.leading()
        if lc < 0:
            N, divisor = -N, -divisor
    return Elimination(N, exact_divide(mult, divisor), solved)


def eliminate_to_22(sys: BundleSystem) -> Polynomial:
    out = eliminate(sys).result
    if out.is_zero() or out.bidegree() != (2, 2):
        raise UnsupportedShape(f"elimination produced {out}, not a (2,2) form")
    return out


def elimination_in_ideal(sys: BundleSystem, elim: Elimination) -> bool:
    """multiplier*e3 - result lies in (e1, e2): the result comes from the system."""
    lhs = elim.multiplier * sys.e3 - elim.result
    gb = buchberger([sys.e1, sys.e2])
    return gb.contains(lhs)


def same_up_to_scalar(f: Polynomial, g: Polynomial):
    """The constant c with f == c*g, or None."""
    if f.is_zero() or g.is_zero():
        return 1 if f.is_zero() and g.is_zero() else None
    if set(f.terms) != set(g.terms):
        return None
    e = next(iter(f.terms))
    c = Fraction(f.terms[e]) / Fraction(g.terms[e])
    if g.scale(c) != f:
        return None
    return c.numerator if c.denominator == 1 else c
