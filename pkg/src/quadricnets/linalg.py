"""Exact linear algebra over Q, F_p and Z.

Small matrices over Q are eliminated with Fractions.  Large matrices go
through :class:`ModularEchelon`, an incremental reduced row echelon form
over F_p whose bulk updates are float64 matrix products.  Those products
are exact as long as every partial sum stays below 2**53, which
:func:`matmul_mod` enforces by splitting the inner dimension.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

QQ = 0
ZZ = -1

_EXACT_FLOAT = 2 ** 53
# primes at or above this bound use Python-int arithmetic instead of float64
FLOAT_PRIME_LIMIT = 2 ** 26
DEFAULT_PRIMES = (32003, 65537)
DEFAULT_EXACT_THRESHOLD = 40_000  # rows * cols above which rank over Q goes modular


class LinalgError(ValueError):
    pass


def field_name(f: int) -> str:
    return {QQ: "QQ", ZZ: "ZZ"}.get(f, f"GF({f})")


@dataclass
class ExactMatrix:
    """Dense matrix with a field tag: QQ, ZZ or a prime p."""

    rows: list
    field: int = QQ
    ncols: int | None = None

    def __post_init__(self):
        self.rows = [list(r) for r in self.rows]
        if self.ncols is None:
            self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise LinalgError("ragged matrix")
        if self.field > 0:
            self.rows = [[int(v) % self.field for v in r] for r in self.rows]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def to_list(self) -> list[list]:
        return [list(r) for r in self.rows]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([list(c) for c in zip(*self.rows)] if self.rows else [], self.field,
                           len(self.rows))

    def mod(self, p: int) -> "ExactMatrix":
        out = []
        for r in self.rows:
            row = []
            for v in r:
                v = Fraction(v)
                den = v.denominator % p
                if den == 0:
                    raise LinalgError(f"entry {v} is undefined mod {p}")
                row.append(v.numerator * pow(den, -1, p) % p)
            out.append(row)
        return ExactMatrix(out, p, self.ncols)

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise LinalgError("dimension mismatch")
        p = self.field if self.field > 0 else 0
        out = []
        for r in self.rows:
            s = sum(a * b for a, b in zip(r, v))
            out.append(s % p if p else s)
        return out


# ---------------------------------------------------------------------------
# modular kernels

def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """(A @ B) mod p for float64 arrays with entries in [0, p)."""
    if p >= FLOAT_PRIME_LIMIT:
        return np.asarray(np.dot(A.astype(object), B.astype(object)) % p, dtype=object)
    k = A.shape[1]
    step = max(1, (_EXACT_FLOAT - 1) // ((p - 1) ** 2 or 1))
    if k <= step:
        return np.fmod(A @ B, p)
    out = np.zeros((A.shape[0], B.shape[1]))
    for s in range(0, k, step):
        out += A[:, s:s + step] @ B[s:s + step]
        np.fmod(out, p, out=out)
    return out


def _inverse_mod(a: int, p: int) -> int:
    return pow(int(a), -1, p)


class ModularEchelon:
    """Incremental reduced row echelon form over F_p.

    Rows are fed in batches; after every batch the stored rows form the
    RREF of everything seen so far (pivot = leftmost nonzero column), so
    the pivot set is the set of leading positions of the row space.
    """

    def __init__(self, ncols: int, p: int, batch: int = 256):
        self.n = ncols
        self.p = p
        self.batch = batch
        self._obj = p >= FLOAT_PRIME_LIMIT
        self.dtype = object if self._obj else np.float64
        self.E = np.zeros((min(ncols, 64), ncols), dtype=self.dtype)
        self.pivots: list[int] = []
        self._pivot_pos: dict[int, int] = {}
        self._free = None
        self.rows_seen = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _grow(self, used: int, need: int):
        if need <= self.E.shape[0]:
            return
        cap = min(self.n, max(need, 2 * self.E.shape[0]))
        E = np.zeros((cap, self.n), dtype=self.dtype)
        E[:used] = self.E[:used]
        self.E = E

    def _free_index(self) -> np.ndarray:
        if self._free is None:
            mask = np.ones(self.n, dtype=bool)
            mask[self.pivots] = False
            self._free = np.flatnonzero(mask)
        return self._free

    def _reduce_against(self, B: np.ndarray) -> np.ndarray:
        # pivot columns of the result are zero by construction, so only the
        # free columns are computed
        r = self.rank
        if r == 0:
            return B
        free = self._free_index()
        out = np.zeros_like(B)
        if free.size:
            coeff = B[:, self.pivots]
            out[:, free] = self._mod(B[:, free] - matmul_mod(coeff, self.E[:r][:, free], self.p))
        return out

    def _mod(self, X: np.ndarray) -> np.ndarray:
        if self._obj:
            return X % self.p
        X = np.fmod(X, self.p)
        X[X < 0] += self.p
        return X

    def _echelonize(self, B: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """RREF of a block by recursive halving; returns (pivot rows, pivot columns)."""
        p = self.p
        if B.shape[0] <= 8:
            B = B.copy()
            piv, rows = [], []
            for i in range(B.shape[0]):
                nz = np.flatnonzero(B[i])
                if nz.size == 0:
                    continue
                c = int(nz[0])
                inv = _inverse_mod(B[i, c], p)
                B[i] = self._mod(B[i] * inv)
                col = B[:, c].copy()
                col[i] = 0
                if np.any(col != 0):
                    B = self._mod(B - self._mod(np.outer(col, B[i])))
                piv.append(c)
                rows.append(i)
            return B[rows], piv
        h = B.shape[0] // 2
        R1, P1 = self._echelonize(B[:h])
        bottom = B[h:]
        if P1:
            bottom = self._mod(bottom - matmul_mod(bottom[:, P1], R1, p))
            bottom = bottom[np.any(bottom != 0, axis=1)]
        if bottom.shape[0] == 0:
            return R1, P1
        R2, P2 = self._echelonize(bottom)
        if not P2:
            return R1, P1
        if P1:
            R1 = self._mod(R1 - matmul_mod(R1[:, P2], R2, p))
        return np.vstack([R1, R2]), P1 + P2

    def add_dense(self, B: np.ndarray):
        """Feed a dense block of rows (entries already reduced mod p)."""
        p = self.p
        B = np.array(B, dtype=self.dtype, copy=True)
        self.rows_seen += B.shape[0]
        if self.rank == self.n:
            return
        B = self._reduce_against(B)
        B = B[np.any(B != 0, axis=1)]
        if B.shape[0] == 0:
            return
        Bn, new_piv = self._echelonize(B)
        if not new_piv:
            return
        r = self.rank
        self.pivots.extend(new_piv)
        self._free = None
        if r:
            coeff = self.E[:r][:, new_piv]
            if np.any(coeff != 0):
                free = self._free_index()
                if free.size:
                    upd = self._mod(self.E[:r][:, free] - matmul_mod(coeff, Bn[:, free], p))
                    self.E[:r, free] = upd
                self.E[:r, new_piv] = 0
        self._grow(r, r + len(new_piv))
        self.E[r:r + len(new_piv)] = Bn
        for k, c in enumerate(new_piv):
            self._pivot_pos[c] = r + k

    def add_sparse(self, rows: Iterable[dict]):
        """Feed rows given as {column: value} dicts, batching internally."""
        buf = []
        for r in rows:
            buf.append(r)
            if len(buf) >= self.batch:
                self._flush(buf)
                buf = []
                if self.rank == self.n:
                    return
        if buf:
            self._flush(buf)

    def _flush(self, buf: list[dict]):
        B = np.zeros((len(buf), self.n), dtype=self.dtype)
        if self._obj:
            B[:] = 0
        for i, r in enumerate(buf):
            for c, v in r.items():
                B[i, c] = int(v) % self.p
        self.add_dense(B)

    def reduce(self, V: np.ndarray) -> np.ndarray:
        """Normal form of row vectors modulo the row space (support off pivots)."""
        V = np.array(V, dtype=self.dtype, copy=True)
        if V.ndim == 1:
            return self._reduce_against(V[None, :])[0]
        return self._reduce_against(V)

    def free_columns(self) -> list[int]:
        piv = set(self.pivots)
        return [c for c in range(self.n) if c not in piv]

    def rref(self) -> tuple[np.ndarray, list[int]]:
        """Rows sorted by pivot column, and the sorted pivot list."""
        order = sorted(range(self.rank), key=lambda k: self.pivots[k])
        return self.E[order], [self.pivots[k] for k in order]

    def kernel(self) -> list[np.ndarray]:
        """Right kernel basis: one vector per free column."""
        E, piv = self.rref()
        out = []
        for f in self.free_columns():
            v = np.zeros(self.n, dtype=self.dtype)
            v[f] = 1
            for k, c in enumerate(piv):
                v[c] = (-E[k, f]) % self.p
            out.append(v)
        return out


def _to_mod_rows(M: ExactMatrix, p: int) -> np.ndarray:
    if M.field > 0:
        if M.field != p:
            raise LinalgError("matrix already lives over a different prime field")
        rows = M.rows
    else:
        rows = M.mod(p).rows
    dtype = object if p >= FLOAT_PRIME_LIMIT else np.float64
    return np.array(rows, dtype=dtype).reshape(len(rows), M.ncols)


def rank_mod_p(M: ExactMatrix, p: int) -> int:
    E = ModularEchelon(M.ncols, p)
    if M.rows:
        E.add_dense(_to_mod_rows(M, p))
    return E.rank


# ---------------------------------------------------------------------------
# exact elimination over Q

def _rref_fraction(rows: list[list], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    A = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(A)):
            v = A[i][c]
            if v and (best is None or abs(v.numerator) < abs(A[best][c].numerator)):
                best = i
        if best is None:
            continue
        A[r], A[best] = A[best], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


@dataclass
class RankResult:
    rank: int
    method: str  # "exact" or "modular certificate"
    primes: tuple = ()
    ranks: tuple = ()

    @property
    def agree(self) -> bool:
        return len(set(self.ranks)) <= 1


def rank_certified(M: ExactMatrix, exact: bool | None = None,
                   primes: Sequence[int] = DEFAULT_PRIMES,
                   threshold: int = DEFAULT_EXACT_THRESHOLD) -> RankResult:
    """Rank with provenance.  Over Q large matrices use two primes and report agreement."""
    if M.field == ZZ:
        raise LinalgError("integer matrix without a field tag; use smith_normal_form or tag it QQ")
    if M.field > 0:
        r = rank_mod_p(M, M.field)
        return RankResult(r, "exact", (M.field,), (r,))
    rows, cols = M.shape
    if exact or (exact is None and rows * cols <= threshold):
        _, piv = _rref_fraction(M.rows, cols)
        return RankResult(len(piv), "exact")
    ranks = tuple(rank_mod_p(M, p) for p in primes)
    return RankResult(max(ranks), "modular certificate", tuple(primes), ranks)


def rank(M: ExactMatrix, **kw) -> int:
    return rank_certified(M, **kw).rank


def kernel_basis(M: ExactMatrix) -> list[list]:
    """Right kernel basis (cols - rank vectors, each with M v == 0)."""
    if M.field == ZZ:
        raise LinalgError("kernel needs a field tag")
    if M.field > 0:
        E = ModularEchelon(M.ncols, M.field)
        if M.rows:
            E.add_dense(_to_mod_rows(M, M.field))
        return [[int(x) for x in v] for v in E.kernel()]
    R, piv = _rref_fraction(M.rows, M.ncols)
    free = [c for c in range(M.ncols) if c not in set(piv)]
    out = []
    for f in free:
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for k, c in enumerate(piv):
            v[c] = -R[k][f]
        out.append([x.numerator if x.denominator == 1 else x for x in v])
    return out


def random_prime(lo: int, hi: int, rng: random.Random | None = None) -> int:
    rng = rng or random.Random()
    while True:
        c = rng.randrange(lo, hi) | 1
        if isprime(c):
            return c


# ---------------------------------------------------------------------------
# Smith normal form over Z

@dataclass
class SmithForm:
    D: list[list[int]]
    U: list[list[int]]
    V: list[list[int]]
    divisors: list[int] = field(default_factory=list)


def _matmul_int(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def det_int(M: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free Bareiss elimination."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def smith_normal_form(M) -> SmithForm:
    """U*M*V = D with D diagonal, d1 | d2 | ..., U and V unimodular."""
    if isinstance(M, ExactMatrix):
        if M.field not in (ZZ, QQ):
            raise LinalgError("Smith normal form needs integer entries")
        M = M.rows
    A = [[int(v) for v in r] for r in M]
    for r, orig in zip(A, M):
        if any(Fraction(a) != Fraction(b) for a, b in zip(r, orig)):
            raise LinalgError("non-integer entry")
    m = len(A)
    n = len(A[0]) if A else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in A:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(dst, src, f):  # row dst += f * row src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for R in A:
            R[dst] += f * R[src]
        for R in V:
            R[dst] += f * R[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: fold an offending row into row t
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    divisors = [A[i][i] for i in range(min(m, n))]
    form = SmithForm(A, U, V, divisors)
    _check_smith(M, form)
    return form


def _check_smith(M, form: SmithForm):
    prod = _matmul_int(_matmul_int(form.U, [[int(v) for v in r] for r in M]), form.V)
    if prod != form.D:
        raise AssertionError("Smith normal form postcondition U*M*V == D failed")
    d = form.divisors
    for a, b in zip(d, d[1:]):
        if a == 0 and b != 0 or (a and b % a):
            raise AssertionError(f"divisibility chain broken: {d}")
    if abs(det_int(form.U)) != 1 or abs(det_int(form.V)) != 1:
        raise AssertionError("transforms are not unimodular")


def discriminant_group(G) -> list[int]:
    """Invariant factors > 1 of coker(G), ascending; G must be nonsingular."""
    rows = G.rows if isinstance(G, ExactMatrix) else G
    if det_int(rows) == 0:
        raise LinalgError("singular Gram matrix")
    return [d for d in smith_normal_form(rows).divisors if d > 1]


def rank_mod(M, p: int) -> int:
    """Rank of an integer matrix reduced mod p (small matrices)."""
    rows = M.rows if isinstance(M, ExactMatrix) else M
    return rank_mod_p(ExactMatrix([[int(v) for v in r] for r in rows], QQ), p)


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
