"""Bigraded Jacobian ring of a net of quadrics and its multiplication maps.

For quadrics Q0, Q1, Q2 in x0..x7 put F = m0*Q0 + m1*Q1 + m2*Q2 and let I be
generated by the eleven partials of F.  The graded piece I_(a,b) is spanned
by the products (monomial)*(generator) of bidegree (a,b), so every piece of
R = S/I is computed by a rank over F_p.  Columns are the monomials of
bidegree (a,b) in decreasing degrevlex order; pivots are taken leftmost, so
the surviving (free) columns are the standard monomials of the piece.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_PRIMES, ExactMatrix, ModularEchelon
from .poly import Polynomial, PolynomialError, VarTable, monomial_basis

HODGE_TARGETS = {(0, -2): 0, (1, 0): 3, (2, 2): 37, (3, 4): 3}


class NetError(ValueError):
    pass


@dataclass(frozen=True)
class QuadricNet:
    """Three quadrics in the x-block of a table whose mu-block has three variables."""

    Q: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        Q = tuple(self.Q)
        object.__setattr__(self, "Q", Q)
        if len(Q) != 3:
            raise NetError("a net needs exactly three quadrics")
        vars = Q[0].vars
        if len(vars.mu) != 3:
            raise NetError("the variable table needs a mu-block of three variables")
        for q in Q:
            if q.vars != vars or q.field != Q[0].field:
                raise NetError("quadrics must share a variable table and field")
            if q.bidegree() != (0, 2):
                raise NetError(f"{q} is not a quadric in the x-block")

    @property
    def vars(self) -> VarTable:
        return self.Q[0].vars

    @property
    def F(self) -> Polynomial:
        v = self.vars
        return sum((Polynomial.var(v, m, self.Q[0].field) * q for m, q in zip(v.mu, self.Q)),
                   Polynomial.zero(v, self.Q[0].field))

    def mod(self, p: int) -> "QuadricNet":
        return QuadricNet(tuple(q.to_field(p) for q in self.Q), self.name)


def jacobian_generators(net: QuadricNet) -> list[Polynomial]:
    """dF/dm_i (bidegree (0,2)) followed by dF/dx_j (bidegree (1,1))."""
    F = net.F
    gens = [F.derivative(m) for m in net.vars.mu] + [F.derivative(x) for x in net.vars.x]
    for g, want in zip(gens, [(0, 2)] * 3 + [(1, 1)] * len(net.vars.x)):
        if not g.is_zero() and g.bidegree() != want:
            raise AssertionError(f"generator {g} has bidegree {g.bidegree()}, expected {want}")
    return gens


@dataclass
class GradedPiece:
    bidegree: tuple[int, int]
    prime: int
    monomials: list           # ambient basis, decreasing degrevlex
    nrows: int                # number of generator multiples
    rank: int
    basis: list               # standard monomials spanning the quotient
    echelon: ModularEchelon | None = field(default=None, repr=False)

    @property
    def ambient_dim(self) -> int:
        return len(self.monomials)

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.rank

    def column(self, mono) -> int:
        return self._index[tuple(mono)]

    def __post_init__(self):
        self._index = {m: i for i, m in enumerate(self.monomials)}
        self._basis_cols = [self._index[m] for m in self.basis]

    def vectorize(self, polys: Sequence[Polynomial]) -> np.ndarray:
        p = self.prime
        out = np.zeros((len(polys), self.ambient_dim))
        for i, f in enumerate(polys):
            for e, c in f.terms.items():
                try:
                    out[i, self._index[e]] = int(c % p) if f.field != p else c
                except KeyError:
                    raise PolynomialError(f"{f} is not of bidegree {self.bidegree}") from None
        return out

    def coordinates(self, polys: Sequence[Polynomial]) -> np.ndarray:
        """Coordinates of the classes of ``polys`` in the standard-monomial basis."""
        if not polys:
            return np.zeros((0, self.dim))
        V = self.vectorize([f.to_field(self.prime) for f in polys])
        if self.echelon is not None:
            V = self.echelon.reduce(V)
        return V[:, self._basis_cols]


def _generator_rows(net: QuadricNet, a: int, b: int, index: dict, p: int):
    vars = net.vars
    for g in jacobian_generators(net):
        if g.is_zero():
            continue
        c, d = g.bidegree()
        if c > a or d > b:
            continue
        terms = [(e, int(v) % p) for e, v in g.terms.items()]
        for m in monomial_basis(a - c, b - d, vars):
            row = {}
            for e, v in terms:
                if v:
                    row[index[tuple(x + y for x, y in zip(m, e))]] = v
            yield row


@lru_cache(maxsize=64)
def graded_piece(net: QuadricNet, a: int, b: int, p: int = DEFAULT_PRIMES[0]) -> GradedPiece:
    """Dimension and standard-monomial basis of R_(a,b) computed over F_p."""
    if a < 0 or b < 0:
        return GradedPiece((a, b), p, [], 0, 0, [], None)
    monos = monomial_basis(a, b, net.vars)
    index = {m: i for i, m in enumerate(monos)}
    E = ModularEchelon(len(monos), p)
    rows = list(_generator_rows(net, a, b, index, p))
    E.add_sparse(rows)
    basis = [monos[c] for c in E.free_columns()]
    return GradedPiece((a, b), p, monos, len(rows), E.rank, basis, E)


def quotient_dimension(net: QuadricNet, a: int, b: int, p: int = DEFAULT_PRIMES[0]) -> int:
    return graded_piece(net, a, b, p).dim


def _as_monomial_polys(net: QuadricNet, monomials) -> list[Polynomial]:
    out = []
    for m in monomials:
        if isinstance(m, Polynomial):
            out.append(m)
        else:
            out.append(Polynomial.monomial(net.vars, tuple(m)))
    return out


def verify_basis(net: QuadricNet, monomials, a: int, b: int, p: int = DEFAULT_PRIMES[0]) -> bool:
    """True iff the given elements of bidegree (a,b) form a basis of R_(a,b)."""
    polys = _as_monomial_polys(net, monomials)
    for f in polys:
        if f.bidegree() != (a, b):
            raise NetError(f"{f} does not have bidegree {(a, b)}")
    piece = graded_piece(net, a, b, p)
    if len(polys) != piece.dim:
        return False
    if piece.dim == 0:
        return True
    C = piece.coordinates(polys)
    return _rank_dense(C, p) == piece.dim


def _rank_dense(C: np.ndarray, p: int) -> int:
    E = ModularEchelon(C.shape[1], p)
    if C.shape[0]:
        E.add_dense(C)
    return E.rank


def multiplication_map(net: QuadricNet, gamma: Polynomial, p: int = DEFAULT_PRIMES[0],
                       source=(1, 2), target=(3, 4)) -> ExactMatrix:
    """Matrix of v -> v*gamma from R_source to R_target (columns = images of basis)."""
    shift = (target[0] - source[0], target[1] - source[1])
    if not gamma.is_zero() and gamma.bidegree() != shift:
        raise NetError(f"gamma has bidegree {gamma.bidegree()}, expected {shift}")
    src = graded_piece(net, *source, p)
    dst = graded_piece(net, *target, p)
    gamma = gamma.to_field(p)
    basis = [Polynomial.monomial(net.vars, m, 1, p) for m in src.basis]
    images = [b * gamma for b in basis]
    C = dst.coordinates(images) if images else np.zeros((0, dst.dim))
    cols = C.T  # dst.dim x src.dim
    return ExactMatrix([[int(v) for v in row] for row in cols], p, src.dim)


def period_surjective(net: QuadricNet, gamma: Polynomial, p: int = DEFAULT_PRIMES[0]) -> bool:
    M = multiplication_map(net, gamma, p)
    dim = graded_piece(net, 3, 4, p).dim
    if dim == 0:
        return True
    return _rank_dense(np.array(M.rows, dtype=float).reshape(dim, M.ncols), p) == dim


def period_rank(net: QuadricNet, gamma: Polynomial, p: int = DEFAULT_PRIMES[0]) -> int:
    M = multiplication_map(net, gamma, p)
    if not M.rows:
        return 0
    return _rank_dense(np.array(M.rows, dtype=float), p)


@dataclass
class HodgeReport:
    dims: dict            # prime -> {(a,b): dim}
    targets: dict
    passed: bool
    primes: tuple

    def as_dict(self) -> dict:
        return {
            "primes": list(self.primes),
            "dims": {str(p): {f"R{a},{b}": d for (a, b), d in dims.items()} for p, dims in self.dims.items()},
            "expected": {f"R{a},{b}": d for (a, b), d in self.targets.items()},
            "passed": self.passed,
        }


def hodge_check(net: QuadricNet, primes: Sequence[int] = DEFAULT_PRIMES) -> HodgeReport:
    """Pieces R_(q, 2q-2), q = 0..3, against h^{4-q,q}_prim = (0, 3, 37, 3)."""
    dims = {}
    for p in primes:
        dims[p] = {bd: quotient_dimension(net, *bd, p) for bd in HODGE_TARGETS}
    passed = all(d == HODGE_TARGETS for d in dims.values())
    return HodgeReport(dims, dict(HODGE_TARGETS), passed, tuple(primes))
