import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadricnets.lattice import (ChowClass, ChowError, GramLattice, ci_class, degree, format_group,
                                 gram_table, two_adic_compare)
from quadricnets.linalg import LinalgError

T1 = [[0, 0, 2], [0, 2, 2], [2, 2, 0]]
T2 = [[0, 0, 2], [0, 2, 5], [2, 5, 4]]
LABELS = ("g1^2", "g1*g2", "g2^2")


def C(src, ambient, names=("g1", "g2")):
    return ChowClass.parse(src, ambient, names)


class TestChowRing:
    def test_truncation(self):
        g1 = ChowClass.g1((2, 5))
        assert g1 * g1 == C("g1^2", (2, 5))
        assert (g1 * g1 * g1).is_zero()

    def test_q2_class(self):
        h = C("g1 + g2", (2, 5))
        assert h * h * C("g1 + 2*g2", (2, 5)) == C("4*g1^2*g2 + 5*g1*g2^2 + 2*g2^3", (2, 5))

    def test_unit(self):
        u = C("3*g1*g2 - g2^2", (2, 3))
        assert u * ChowClass.one((2, 3)) == u

    def test_ambient_mismatch(self):
        with pytest.raises(ChowError):
            ChowClass.g1((2, 3)) * ChowClass.g1((2, 5))

    def test_degrees(self):
        assert degree(C("g1^2*g2^3", (2, 3))) == 1
        assert degree(C("g1^2", (2, 3))) == 0
        assert degree(C("h1^2*h2^2", (2, 3), ("h1", "h2")) * C("2*h1 + 2*h2", (2, 3), ("h1", "h2"))) == 2

    def test_ci_classes(self):
        assert ci_class([(2, 2)], (2, 3)) == C("2*g1 + 2*g2", (2, 3))
        assert ci_class([(1, 1), (1, 1), (1, 2)], (2, 5)) == C("4*g1^2*g2 + 5*g1*g2^2 + 2*g2^3", (2, 5))
        assert ci_class([(1, 0)], (2, 5)) == ChowClass.g1((2, 5))

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=4),
           st.randoms(use_true_random=False))
    def test_ci_order_independent(self, degs, rnd):
        shuffled = list(degs)
        rnd.shuffle(shuffled)
        assert ci_class(degs, (3, 4)) == ci_class(shuffled, (3, 4))

    @given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-5, 5), max_size=5),
           st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-5, 5), max_size=5),
           st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-5, 5), max_size=5))
    def test_ring_laws(self, a, b, c):
        A, B, D = (ChowClass((3, 3), tuple(x.items())) for x in (a, b, c))
        assert A * B == B * A
        assert (A * B) * D == A * (B * D)
        assert A * (B + D) == A * B + A * D


class TestGram:
    def test_first_table(self):
        assert gram_table(ci_class([(2, 2)], (2, 3))).matrix == T1

    def test_second_table(self):
        assert gram_table(ci_class([(1, 1), (1, 1), (1, 2)], (2, 5))).matrix == T2

    def test_zero_class(self):
        assert gram_table(ChowClass((2, 3))).matrix == [[0] * 3] * 3

    def test_codimension_mismatch(self):
        with pytest.raises(ChowError):
            gram_table(ChowClass.g1((2, 5)))

    def test_swapping_factors(self):
        swapped = gram_table(ci_class([(2, 2)], (3, 2))).matrix
        back = [[swapped[2 - i][2 - j] for j in range(3)] for i in range(3)]
        assert back == T1

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=3))
    def test_symmetric(self, degs):
        G = gram_table(ci_class(degs, (2, 5))).matrix
        assert all(G[i][j] == G[j][i] for i in range(3) for j in range(3))

    def test_invariants(self):
        A, B = GramLattice(LABELS, T1), GramLattice(LABELS, T2)
        assert (A.rank_mod2, B.rank_mod2) == (0, 2)
        assert format_group(A.discriminant_group) == "(Z/2)^3"
        assert format_group(B.discriminant_group) == "Z/8"
        assert abs(A.det) == abs(B.det) == 8


class TestCompare:
    def test_inequivalent(self):
        rep = two_adic_compare(GramLattice(LABELS, T1), GramLattice(LABELS, T2))
        assert rep.verdict == "inequivalent"
        assert len(rep.reasons) == 2

    def test_reflexive(self):
        A = GramLattice(LABELS, T1)
        rep = two_adic_compare(A, A)
        assert rep.verdict == "indistinguishable by these invariants"
        assert "equivalent" not in rep.verdict.replace("indistinguishable", "")

    def test_singular(self):
        with pytest.raises(LinalgError):
            two_adic_compare(GramLattice(LABELS, T1), GramLattice(LABELS, [[1, 1, 0], [1, 1, 0], [0, 0, 1]]))

    def test_asymmetric_rejected(self):
        with pytest.raises(ChowError):
            GramLattice(LABELS, [[0, 1, 0], [0, 0, 0], [0, 0, 1]])
