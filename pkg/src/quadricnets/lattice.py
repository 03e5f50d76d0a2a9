"""Intersection tables in the Chow ring of P^a x P^b and their 2-adic invariants.

CH(P^a x P^b) = Z[g1, g2] / (g1^(a+1), g2^(b+1)).  A class is stored as a
dict {(i, j): coefficient} of g1^i g2^j with zero coefficients dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .linalg import LinalgError, SmithForm, det_int, rank_mod, smith_normal_form
from .poly import VarTable, parse_polynomial

BASIS_LABELS = ("g1^2", "g1*g2", "g2^2")
CONTEXT = ("invariants can separate lattices but never prove them equivalent; "
           "the comparison is conditional on Pic(S) = Z for the very general double cover")


class ChowError(ValueError):
    pass


@dataclass(frozen=True)
class ChowClass:
    ambient: tuple
    coeffs: tuple = ()       # sorted ((i, j), c) pairs

    def __post_init__(self):
        a, b = self.ambient
        clean = {}
        for (i, j), c in dict(self.coeffs).items():
            if i < 0 or j < 0:
                raise ChowError(f"negative exponent in g1^{i} g2^{j}")
            if i <= a and j <= b and c:
                clean[(i, j)] = clean.get((i, j), 0) + int(c)
        object.__setattr__(self, "ambient", (a, b))
        object.__setattr__(self, "coeffs", tuple(sorted((k, v) for k, v in clean.items() if v)))

    @classmethod
    def one(cls, ambient) -> "ChowClass":
        return cls(tuple(ambient), (((0, 0), 1),))

    @classmethod
    def g1(cls, ambient) -> "ChowClass":
        return cls(tuple(ambient), (((1, 0), 1),))

    @classmethod
    def g2(cls, ambient) -> "ChowClass":
        return cls(tuple(ambient), (((0, 1), 1),))

    @classmethod
    def parse(cls, src: str, ambient, names=("g1", "g2")) -> "ChowClass":
        table = VarTable((), tuple(names))
        f = parse_polynomial(src, table)
        terms = {}
        for e, c in f.terms.items():
            if getattr(c, "denominator", 1) != 1:
                raise ChowError(f"non-integer coefficient {c}")
            terms[e] = int(c)
        return cls(tuple(ambient), tuple(terms.items()))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def codimensions(self) -> set:
        return {i + j for (i, j), _ in self.coeffs}

    def _check(self, other: "ChowClass"):
        if self.ambient != other.ambient:
            raise ChowError(f"ambient mismatch: P^{self.ambient[0]} x P^{self.ambient[1]} "
                            f"vs P^{other.ambient[0]} x P^{other.ambient[1]}")

    def __add__(self, other: "ChowClass") -> "ChowClass":
        self._check(other)
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return ChowClass(self.ambient, tuple(d.items()))

    def __mul__(self, other):
        if isinstance(other, int):
            return ChowClass(self.ambient, tuple((k, v * other) for k, v in self.coeffs))
        return chow_mul(self, other)

    __rmul__ = __mul__

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for (i, j), c in sorted(self.coeffs, key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            mono = "*".join(s for s in (_pow("g1", i), _pow("g2", j)) if s) or "1"
            parts.append(f"{c}*{mono}" if c != 1 else mono)
        return " + ".join(parts).replace("+ -", "- ")


def _pow(name, k):
    return "" if k == 0 else name if k == 1 else f"{name}^{k}"


def chow_mul(u: ChowClass, v: ChowClass) -> ChowClass:
    u._check(v)
    out: dict = {}
    for ((i, j), c), ((k, l), d) in product(u.coeffs, v.coeffs):
        key = (i + k, j + l)
        out[key] = out.get(key, 0) + c * d
    return ChowClass(u.ambient, tuple(out.items()))


def degree(u: ChowClass) -> int:
    return u.as_dict().get(tuple(u.ambient), 0)


def ci_class(bidegrees: Sequence[tuple], ambient) -> ChowClass:
    """Class of a complete intersection of hypersurfaces of the given bidegrees."""
    if not bidegrees:
        raise ChowError("need at least one hypersurface")
    out = ChowClass.one(ambient)
    for d, e in bidegrees:
        out = out * ChowClass(tuple(ambient), (((1, 0), d), ((0, 1), e)))
    return out


def basis_classes(ambient) -> list[ChowClass]:
    g1, g2 = ChowClass.g1(ambient), ChowClass.g2(ambient)
    return [g1 * g1, g1 * g2, g2 * g2]


@dataclass
class GramLattice:
    labels: tuple
    matrix: list
    smith: SmithForm | None = field(default=None, repr=False)

    def __post_init__(self):
        M = [[int(v) for v in r] for r in self.matrix]
        n = len(M)
        if any(len(r) != n for r in M):
            raise ChowError("Gram matrix must be square")
        if any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
            raise ChowError("Gram matrix must be symmetric")
        self.matrix = M

    @property
    def det(self) -> int:
        return det_int(self.matrix)

    @property
    def nonsingular(self) -> bool:
        return self.det != 0

    @property
    def snf(self) -> SmithForm:
        if self.smith is None:
            self.smith = smith_normal_form(self.matrix)
            prod = 1
            for d in self.smith.divisors:
                prod *= d
            if prod != abs(self.det):
                raise AssertionError("product of elementary divisors differs from |det|")
        return self.smith

    @property
    def elementary_divisors(self) -> list[int]:
        return list(self.snf.divisors)

    @property
    def discriminant_group(self) -> list[int]:
        if not self.nonsingular:
            raise LinalgError("singular Gram matrix has no finite discriminant group")
        return [d for d in self.elementary_divisors if d > 1]

    @property
    def rank_mod2(self) -> int:
        return rank_mod(self.matrix, 2)

    def as_dict(self) -> dict:
        out = {"basis": list(self.labels), "matrix": self.matrix, "det": self.det,
               "rank_mod_2": self.rank_mod2}
        if self.nonsingular:
            out["discriminant_group"] = format_group(self.discriminant_group)
            out["elementary_divisors"] = self.elementary_divisors
        return out


def format_group(divs: Sequence[int]) -> str:
    if not divs:
        return "0"
    out, i = [], 0
    while i < len(divs):
        j = i
        while j < len(divs) and divs[j] == divs[i]:
            j += 1
        k = j - i
        out.append(f"(Z/{divs[i]})^{k}" if k > 1 else f"Z/{divs[i]}")
        i = j
    return " + ".join(out)


def gram_table(fourfold: ChowClass) -> GramLattice:
    """Intersection numbers deg(u*v*[X]) over the basis g1^2, g1*g2, g2^2."""
    a, b = fourfold.ambient
    codim = a + b - 4
    if not fourfold.is_zero() and fourfold.codimensions() != {codim}:
        raise ChowError(f"a fourfold in P^{a} x P^{b} has codimension {codim}, "
                        f"got {sorted(fourfold.codimensions())}")
    B = basis_classes(fourfold.ambient)
    M = [[degree(u * v * fourfold) for v in B] for u in B]
    return GramLattice(BASIS_LABELS, M)


@dataclass
class LatticeComparison:
    A: GramLattice
    B: GramLattice
    verdict: str
    reasons: list

    def as_dict(self) -> dict:
        return {"first": self.A.as_dict(), "second": self.B.as_dict(), "verdict": self.verdict,
                "reasons": self.reasons, "context": CONTEXT}


def two_adic_compare(A: GramLattice, B: GramLattice) -> LatticeComparison:
    """Compare rank mod 2 and discriminant groups; can only prove inequivalence."""
    for G in (A, B):
        if not G.nonsingular:
            raise LinalgError(f"singular Gram matrix {G.matrix}")
    reasons = []
    if A.rank_mod2 != B.rank_mod2:
        reasons.append(f"ranks mod 2 differ: {A.rank_mod2} vs {B.rank_mod2}")
    if A.discriminant_group != B.discriminant_group:
        reasons.append(f"discriminant groups differ: {format_group(A.discriminant_group)} "
                       f"vs {format_group(B.discriminant_group)}")
    verdict = "inequivalent" if reasons else "indistinguishable by these invariants"
    return LatticeComparison(A, B, verdict, reasons)
