"""Buchberger's algorithm over F_p and Q, and a smoothness certificate.

Internally monomials are packed integers, one 16-bit field per variable
with the variable of index 0 in the lowest field.  The top bit of each
field is a guard, which turns divisibility into one subtraction and a mask.
Within a fixed degree, degrevlex with x0 > x1 > ... is the reverse of the
integer order on packed monomials, so the leading term of a homogeneous
polynomial is its smallest packed key.

Pairs are processed by the normal strategy (smallest lcm first) after
Gebauer-Moeller elimination; the basis is inter-reduced at the end.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .poly import Polynomial, PolynomialError, VarTable, degrevlex_key

W = 16
FMASK = (1 << W) - 1
DEFAULT_POWER_BOUND = 32
SMOOTHNESS_PRIMES = (101, 32003, 65537)


class Inconclusive(RuntimeError):
    """A bounded search ran out before deciding."""


# ---------------------------------------------------------------------------
# packed monomials

class _Ring:
    def __init__(self, n: int, field: int):
        self.n = n
        self.field = field
        self.guard = sum(1 << (W * i + W - 1) for i in range(n))
        self.ones = sum(1 << (W * i) for i in range(n))

    def pack(self, e) -> int:
        out = 0
        for i, a in enumerate(e):
            if a >= 1 << (W - 1):
                raise PolynomialError("exponent too large for packed monomials")
            out |= a << (W * i)
        return out

    def unpack(self, m: int) -> tuple:
        return tuple((m >> (W * i)) & FMASK for i in range(self.n))

    def degree(self, m: int) -> int:
        return sum(self.unpack(m))

    def divides(self, a: int, b: int) -> bool:
        """a | b"""
        g = self.guard
        return ((b + g - a) & g) == g

    def lcm(self, a: int, b: int) -> int:
        out = 0
        for i in range(self.n):
            s = W * i
            x, y = (a >> s) & FMASK, (b >> s) & FMASK
            out |= (x if x > y else y) << s
        return out

    def coprime(self, a: int, b: int) -> bool:
        for i in range(self.n):
            s = W * i
            if (a >> s) & FMASK and (b >> s) & FMASK:
                return False
        return True

    def key(self, m: int):
        # heap key: smallest key = largest monomial in degrevlex
        return (-self.degree(m), m)

    def inv(self, c):
        return pow(c, -1, self.field) if self.field else Fraction(1) / c


class _Poly:
    """Internal polynomial: packed monomial -> coeff, plus cached leading term."""

    __slots__ = ("terms", "lm", "lc", "tail")

    def __init__(self, terms: dict, ring: _Ring):
        self.terms = terms
        self.lm = min(terms, key=ring.key)
        self.lc = terms[self.lm]
        self.tail = [(m, c) for m, c in terms.items() if m != self.lm]


def _normalize(terms: dict, ring: _Ring) -> _Poly | None:
    if not terms:
        return None
    f = _Poly(terms, ring)
    if f.lc != 1:
        inv = ring.inv(f.lc)
        p = ring.field
        if p:
            terms = {m: c * inv % p for m, c in terms.items()}
        else:
            terms = {m: _canon(c * inv) for m, c in terms.items()}
        f = _Poly(terms, ring)
    return f


def _canon(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _reduce(terms: dict, basis: list[_Poly], ring: _Ring, full: bool = True) -> dict:
    """Normal form of ``terms`` with respect to monic ``basis`` elements."""
    p = ring.field
    key = ring.key
    h = dict(terms)
    heap = [(key(m), m) for m in h]
    heapq.heapify(heap)
    result = {}
    divides = ring.divides
    lms = [(g.lm, g) for g in basis]
    while heap:
        _, m = heapq.heappop(heap)
        c = h.pop(m, None)
        if c is None:
            continue
        red = None
        for lm, g in lms:
            if divides(lm, m):
                red = g
                break
        if red is None:
            result[m] = c
            if not full:
                # leading term is irreducible: copy the rest untouched
                result.update(h)
                return result
            continue
        q = m - red.lm
        for mg, cg in red.tail:
            mm = mg + q
            old = h.get(mm)
            if old is None:
                v = -c * cg
                if p:
                    v %= p
                h[mm] = v if p else _canon(v)
                heapq.heappush(heap, (key(mm), mm))
            else:
                v = old - c * cg
                if p:
                    v %= p
                if v:
                    h[mm] = v if p else _canon(v)
                else:
                    del h[mm]
    return result


def _spoly(f: _Poly, g: _Poly, ring: _Ring) -> dict:
    L = ring.lcm(f.lm, g.lm)
    qf, qg = L - f.lm, L - g.lm
    p = ring.field
    out: dict = {}
    for m, c in f.tail:
        out[m + qf] = c
    for m, c in g.tail:
        k = m + qg
        v = out.get(k, 0) - c
        if p:
            v %= p
        if v:
            out[k] = v if p else _canon(v)
        else:
            out.pop(k, None)
    return out


# ---------------------------------------------------------------------------
# public API

@dataclass
class GroebnerBasis:
    generators: list[Polynomial]
    vars: VarTable
    field: int
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self._ring = _Ring(self.vars.nvars, self.field)
        self._polys = [_normalize({self._ring.pack(e): c for e, c in g.terms.items()}, self._ring)
                       for g in self.generators]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def leading_monomials(self) -> list[tuple]:
        return [g.leading()[0] for g in self.generators]

    def is_unit(self) -> bool:
        return any(g.degree() == 0 for g in self.generators)

    def normal_form(self, f: Polynomial) -> Polynomial:
        f = _prepare(f, self.vars, self.field)
        ring = self._ring
        nf = _reduce({ring.pack(e): c for e, c in f.terms.items()}, self._polys, ring)
        return Polynomial(self.vars, {ring.unpack(m): c for m, c in nf.items()}, self.field)

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()


def _prepare(f: Polynomial, vars: VarTable, fld: int) -> Polynomial:
    if f.vars != vars:
        raise PolynomialError("polynomial lives in a different variable table")
    if f.field != fld:
        f = f.to_field(fld)
    return f


def buchberger(gens: Sequence[Polynomial], check: bool | None = None,
               max_degree: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis for degrevlex over the full variable list.

    ``max_degree`` truncates the computation (pairs whose lcm exceeds it
    are skipped); the result is then only a truncated basis and is marked
    so in ``stats``.  ``check`` re-verifies Buchberger's criterion on the
    result (default: only for small bases).
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PolynomialError("empty generator list; pass at least one nonzero polynomial")
    vars, fld = gens[0].vars, gens[0].field
    for g in gens:
        _prepare(g, vars, fld)
    ring = _Ring(vars.nvars, fld)
    homogeneous = all(g.is_homogeneous() for g in gens)
    if homogeneous:
        ring.key = lambda m: m  # same degree throughout a polynomial

    polys: list[_Poly] = []
    active: list[int] = []
    pairs: dict[tuple[int, int], int] = {}  # (i, j) -> lcm
    stats = {"pairs_reduced": 0, "zero_reductions": 0, "truncated": False}

    def add(h: _Poly):
        nonlocal active
        idx = len(polys)
        polys.append(h)
        active, new_pairs = _gm_update(polys, active, pairs, idx, ring)
        pairs.clear()
        pairs.update(new_pairs)

    # seed with inter-reduced generators, lowest degree first
    seeds = sorted((_normalize({ring.pack(e): c for e, c in g.terms.items()}, ring) for g in gens),
                   key=lambda f: (ring.degree(f.lm), ring.key(f.lm)))
    for f in seeds:
        r = _reduce(f.terms, [polys[i] for i in active], ring)
        h = _normalize(r, ring)
        if h is not None:
            add(h)
            if ring.degree(h.lm) == 0:
                break

    while pairs and not any(ring.degree(polys[i].lm) == 0 for i in active):
        (i, j), L = min(pairs.items(), key=lambda kv: (ring.degree(kv[1]), ring.key(kv[1])))
        del pairs[(i, j)]
        if max_degree is not None and ring.degree(L) > max_degree:
            stats["truncated"] = True
            continue
        s = _spoly(polys[i], polys[j], ring)
        stats["pairs_reduced"] += 1
        r = _reduce(s, [polys[k] for k in active], ring)
        h = _normalize(r, ring)
        if h is None:
            stats["zero_reductions"] += 1
            continue
        add(h)

    basis = _interreduce([polys[i] for i in active], ring)
    out = [Polynomial(vars, {ring.unpack(m): c for m, c in f.terms.items()}, fld) for f in basis]
    out.sort(key=lambda g: degrevlex_key(g.leading()[0]), reverse=True)
    gb = GroebnerBasis(out, vars, fld, stats)
    if check is None:
        check = len(out) <= 40 and not stats["truncated"]
    if check and not is_groebner(gb):
        raise AssertionError("Buchberger postcondition failed: an S-polynomial does not reduce to 0")
    return gb


def _gm_update(polys, active, pairs, h_idx, ring):
    """Gebauer-Moeller criteria: returns (new active list, new pair dict)."""
    h = polys[h_idx]
    lh = h.lm
    C = [(g, ring.lcm(lh, polys[g].lm)) for g in active]
    D = []
    while C:
        g1, L1 = C.pop()
        if ring.coprime(lh, polys[g1].lm):
            D.append((g1, L1))
            continue
        dominated = any(ring.divides(L2, L1) for _, L2 in C) or any(ring.divides(L2, L1) for _, L2 in D)
        if not dominated:
            D.append((g1, L1))
    E = {}
    for g, L in D:
        if not ring.coprime(lh, polys[g].lm):
            E[(g, h_idx)] = L
    new_pairs = {}
    for (g1, g2), L in pairs.items():
        if (not ring.divides(lh, L)
                or ring.lcm(polys[g1].lm, lh) == L
                or ring.lcm(lh, polys[g2].lm) == L):
            new_pairs[(g1, g2)] = L
    new_pairs.update(E)
    new_active = [g for g in active if not ring.divides(lh, polys[g].lm)]
    new_active.append(h_idx)
    return new_active, new_pairs


def _interreduce(basis: list[_Poly], ring: _Ring) -> list[_Poly]:
    basis = sorted(basis, key=lambda f: ring.key(f.lm))
    minimal = []
    for i, f in enumerate(basis):
        if any(ring.divides(g.lm, f.lm) for j, g in enumerate(basis) if j != i and (g.lm != f.lm or j < i)):
            continue
        minimal.append(f)
    out = []
    for i, f in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        tail = _reduce(dict(f.tail), others, ring)
        tail[f.lm] = 1
        out.append(_Poly(tail, ring))
    return out


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    ring = _Ring(f.vars.nvars, f.field)
    F = _normalize({ring.pack(e): c for e, c in f.terms.items()}, ring)
    G = _normalize({ring.pack(e): c for e, c in g.terms.items()}, ring)
    s = _spoly(F, G, ring)
    return Polynomial(f.vars, {ring.unpack(m): c for m, c in s.items()}, f.field)


def is_groebner(gb: GroebnerBasis) -> bool:
    """Buchberger's criterion over all pairs (coprime leading terms skipped)."""
    ring, polys = gb._ring, gb._polys
    for f, g in combinations(polys, 2):
        if ring.coprime(f.lm, g.lm):
            continue
        if _reduce(_spoly(f, g, ring), polys, ring):
            return False
    return True


def ideal_member(f: Polynomial, gb: GroebnerBasis) -> bool:
    return gb.contains(f)


def projective_empty(gb: GroebnerBasis, variables: Sequence[str] | None = None,
                     bound: int = DEFAULT_POWER_BOUND) -> bool:
    """True iff some power v^k (k <= bound) of every listed variable lies in the ideal.

    A variable without any pure-power leading monomial has no power in the
    ideal at all, which decides ``False``.  Running past ``bound`` raises
    :class:`Inconclusive`.
    """
    variables = list(variables or gb.vars.names)
    if gb.is_unit():
        return True
    lms = gb.leading_monomials()
    for v in variables:
        i = gb.vars.position(v)
        if not any(e[i] and sum(e) == e[i] for e in lms):
            return False
    for v in variables:
        x = Polynomial.var(gb.vars, v, gb.field)
        power = x
        for k in range(1, bound + 1):
            if gb.contains(power):
                break
            power = power * x
        else:
            raise Inconclusive(f"no power of {v} up to {bound} lies in the ideal")
    return True


def pure_power_exponents(gb: GroebnerBasis, variables: Sequence[str] | None = None,
                         bound: int = DEFAULT_POWER_BOUND) -> dict:
    """Smallest k <= bound with v^k in the ideal, per variable (None if absent)."""
    out = {}
    for v in variables or gb.vars.names:
        x = Polynomial.var(gb.vars, v, gb.field)
        power = x
        out[v] = None
        for k in range(1, bound + 1):
            if gb.contains(power):
                out[v] = k
                break
            power = power * x
    return out


# ---------------------------------------------------------------------------
# smoothness of a complete intersection of three quadrics

def jacobian_minors(quadrics: Sequence[Polynomial], variables: Sequence[str]) -> list[Polynomial]:
    """All maximal minors of the matrix (dQ_i/dx_j)."""
    J = [[q.derivative(v) for v in variables] for q in quadrics]
    k = len(quadrics)
    out = []
    for cols in combinations(range(len(variables)), k):
        out.append(_det([[J[i][c] for c in cols] for i in range(k)]))
    return out


def _det(M: list[list[Polynomial]]) -> Polynomial:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def singular_locus_ideal(quadrics: Sequence[Polynomial], variables: Sequence[str]) -> list[Polynomial]:
    return list(quadrics) + [m for m in jacobian_minors(quadrics, variables) if not m.is_zero()]


@dataclass
class SmoothnessCertificate:
    prime: int
    status: str            # certified-smooth | singular-mod-p | inconclusive
    witness: dict = field(default_factory=dict)
    attempts: list = field(default_factory=list)

    @property
    def smooth(self) -> bool:
        return self.status == "certified-smooth"

    def as_dict(self) -> dict:
        return {"prime": self.prime, "status": self.status, "witness": self.witness,
                "attempts": self.attempts}


def _x_table(quadrics) -> tuple[VarTable, list[str]]:
    vars = quadrics[0].vars
    xs = list(vars.x)
    return VarTable((), tuple(xs)), xs


def _restrict(q: Polynomial, table: VarTable, p: int) -> Polynomial:
    m = len(q.vars.mu)
    terms = {}
    for e, c in q.terms.items():
        if any(e[:m]):
            raise PolynomialError("quadric involves mu-block variables")
        terms[e[m:]] = c
    return Polynomial(table, terms, 0).to_field(p)


def smoothness_at_prime(quadrics: Sequence[Polynomial], p: int,
                        bound: int = DEFAULT_POWER_BOUND) -> SmoothnessCertificate:
    """Certificate for smoothness of {Q0 = Q1 = Q2 = 0} from its reduction mod p."""
    table, xs = _x_table(quadrics)
    for q in quadrics:
        if q.field == 0 and q.content_divisible_by(p):
            raise PolynomialError(f"{p} divides the content of {q}")
    Qp = [_restrict(q, table, p) for q in quadrics]
    gens = singular_locus_ideal(Qp, xs)
    gb = buchberger(gens, check=False)
    info = {"generators": len(gens), "basis_size": len(gb), **gb.stats}
    try:
        empty = projective_empty(gb, xs, bound)
    except Inconclusive as exc:
        return SmoothnessCertificate(p, "inconclusive", {"reason": str(exc), **info})
    if empty:
        powers = pure_power_exponents(gb, xs, bound)
        return SmoothnessCertificate(p, "certified-smooth", {"pure_powers": powers, **info})
    lms = gb.leading_monomials()
    missing = [v for i, v in enumerate(xs) if not any(e[i] and sum(e) == e[i] for e in lms)]
    return SmoothnessCertificate(p, "singular-mod-p", {"variables_without_pure_power": missing, **info})


def smoothness_check(net, p: int | None = None, primes: Sequence[int] = SMOOTHNESS_PRIMES,
                     bound: int = DEFAULT_POWER_BOUND) -> SmoothnessCertificate:
    """Try ``p`` (or each of ``primes``) until one certifies smoothness.

    Only ``certified-smooth`` is conclusive: smoothness of the reduction mod p
    of a flat projective family implies smoothness over Q; the other two
    outcomes do not disprove it.
    """
    quadrics = list(net.Q) if hasattr(net, "Q") else list(net)
    order = [p] if p is not None else []
    order += [q for q in primes if q not in order]
    attempts = []
    cert = None
    for q in order:
        cert = smoothness_at_prime(quadrics, q, bound)
        attempts.append({"prime": q, "status": cert.status})
        if cert.smooth:
            break
    cert.attempts = attempts
    return cert
