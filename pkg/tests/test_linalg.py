from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from sympy.polys.matrices import DomainMatrix

from quadricnets.linalg import (QQ, ZZ, ExactMatrix, LinalgError, ModularEchelon, det_int,
                                discriminant_group, kernel_basis, rank, rank_certified, rank_mod,
                                rank_mod_p, smith_normal_form)

T1 = [[0, 0, 2], [0, 2, 2], [2, 2, 0]]
T2 = [[0, 0, 2], [0, 2, 5], [2, 5, 4]]


def int_matrices(max_rows=6, max_cols=6, lo=-6, hi=6):
    return st.integers(1, max_rows).flatmap(lambda r: st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)))


def square_int(max_n=4):
    return st.integers(1, max_n).flatmap(lambda n: st.lists(
        st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


class TestRank:
    def test_identity(self):
        assert rank(ExactMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 3

    def test_zero(self):
        assert rank(ExactMatrix([[0, 0], [0, 0]])) == 0

    def test_lattice_table_mod_2(self):
        assert rank(ExactMatrix(T2, 2)) == 2
        assert rank_mod(T2, 2) == 2
        assert rank_mod(T1, 2) == 0

    def test_untagged_integer_matrix_rejected(self):
        with pytest.raises(LinalgError):
            rank(ExactMatrix([[1, 2]], ZZ))

    def test_large_rational_matrix_reports_modular_certificate(self):
        rng = np.random.default_rng(3)
        M = rng.integers(-3, 4, size=(60, 40)).tolist()
        res = rank_certified(ExactMatrix(M), threshold=100)
        assert res.method == "modular certificate" and res.agree
        assert res.rank == DomainMatrix.from_list(M, sympy.ZZ).convert_to(sympy.QQ).rank()

    @given(int_matrices())
    def test_rank_matches_sympy(self, M):
        assert rank(ExactMatrix(M, QQ), exact=True) == sympy.Matrix(M).rank()

    @given(int_matrices(lo=-40, hi=40), st.sampled_from([2, 3, 5, 7, 101, 32003]))
    def test_rank_over_q_bounds_rank_mod_p(self, M, p):
        rq = rank(ExactMatrix(M), exact=True)
        rp = rank_mod_p(ExactMatrix(M), p)
        assert rq >= rp

    @given(int_matrices(max_rows=8, max_cols=8, lo=0, hi=100))
    def test_modular_rank_matches_sympy_gf(self, M):
        p = 101
        expected = sympy.Matrix(M).applyfunc(lambda v: v % p)
        dm = DomainMatrix.from_list_sympy(len(M), len(M[0]), expected.tolist()).convert_to(sympy.GF(p))
        assert rank_mod_p(ExactMatrix(M), p) == dm.rank()


class TestKernel:
    def test_zero_matrix(self):
        K = kernel_basis(ExactMatrix([[0, 0], [0, 0]]))
        assert sorted(K) == [[0, 1], [1, 0]]

    def test_identity(self):
        assert kernel_basis(ExactMatrix([[1, 0], [0, 1]])) == []

    def test_single_row(self):
        K = kernel_basis(ExactMatrix([[1, 1]]))
        assert len(K) == 1
        a, b = K[0]
        assert a == -b != 0

    @given(int_matrices())
    def test_kernel_vectors_annihilate(self, M):
        A = ExactMatrix(M)
        K = kernel_basis(A)
        assert len(K) == A.ncols - rank(A, exact=True)
        for v in K:
            assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in M)

    @given(int_matrices(max_rows=7, max_cols=7, lo=0, hi=30))
    def test_kernel_mod_p(self, M):
        p = 31
        A = ExactMatrix(M, p)
        K = kernel_basis(A)
        assert len(K) == A.ncols - rank(A)
        for v in K:
            assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in A.rows)


class TestEchelon:
    def test_incremental_rows_match_batch(self):
        rng = np.random.default_rng(0)
        B = rng.integers(0, 101, size=(30, 20))
        B[15:] = (B[:15] * 3) % 101          # second half depends on the first
        E = ModularEchelon(20, 101)
        E.add_dense(B[:10])
        E.add_dense(B[10:])
        assert E.rank == rank_mod_p(ExactMatrix(B.tolist()), 101) == 15


class TestSmith:
    def test_diagonal(self):
        assert smith_normal_form([[2, 0], [0, 2]]).divisors == [2, 2]

    def test_first_table(self):
        assert smith_normal_form(T1).divisors == [2, 2, 2]

    def test_second_table(self):
        assert smith_normal_form(T2).divisors == [1, 1, 8]

    def test_discriminant_groups(self):
        assert discriminant_group([[1, 0], [0, 1]]) == []
        assert discriminant_group(T1) == [2, 2, 2]
        assert discriminant_group(T2) == [8]

    def test_singular_gram(self):
        with pytest.raises(LinalgError):
            discriminant_group([[1, 1], [1, 1]])

    @given(int_matrices(max_rows=5, max_cols=5, lo=-12, hi=12))
    def test_postconditions(self, M):
        S = smith_normal_form(M)
        assert matmul(matmul(S.U, M), S.V) == S.D
        assert abs(det_int(S.U)) == 1 and abs(det_int(S.V)) == 1
        n, m = len(M), len(M[0])
        assert all(S.D[i][j] == 0 for i in range(n) for j in range(m) if i != j)
        nonzero = [d for d in S.divisors if d]
        assert all(d > 0 for d in nonzero)
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))

    @given(square_int())
    def test_matches_sympy_and_det(self, M):
        S = smith_normal_form(M)
        ours = sorted(abs(d) for d in S.divisors)
        theirs = sorted(abs(int(v)) for v in sympy_snf(sympy.Matrix(M), domain=sympy.ZZ).diagonal())
        assert ours == theirs
        prod = 1
        for d in S.divisors:
            prod *= d
        assert prod == abs(det_int(M))

    @given(square_int())
    def test_det_matches_sympy(self, M):
        assert det_int(M) == sympy.Matrix(M).det()
