import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quadricnets.bundle import (BundleSystem, LineError, RationalSection, UnsupportedShape, bundle_system,
                                contains_standard_line, decompose_along_line, discriminant_octic,
                                eliminate, eliminate_to_22, elimination_in_ideal, fiber_table,
                                same_up_to_scalar, section_residuals, verify_section)
from quadricnets.poly import Polynomial, PolynomialError, VarTable, parse_polynomial
from strategies import to_sympy

NET = VarTable(("m0", "m1", "m2"), tuple(f"x{i}" for i in range(8)))
FIB = fiber_table()


def Q(src):
    return parse_polynomial(src, NET)


def E(src):
    return parse_polynomial(src, FIB)


def net_of(sc):
    return [sc.poly(n) for n in ("Q0", "Q1", "Q2")]


def section(*srcs):
    return RationalSection(tuple(E(s) for s in srcs))


class TestLine:
    def test_special_net(self, xspecial):
        assert contains_standard_line(net_of(xspecial))

    def test_section_net(self, xsection):
        assert contains_standard_line(net_of(xsection))

    def test_x0_squared(self):
        assert not contains_standard_line([Q("x0^2"), Q("x2^2"), Q("x3^2")])

    def test_decompose_special_q0(self, xspecial):
        d = decompose_along_line(xspecial.poly("Q0"))
        assert d.L == Q("-x5") and d.M.is_zero() and d.q == Q("x3^2 + x4*x6 - 2*x5^2")

    def test_decompose_section_q0(self, xsection):
        d = decompose_along_line(xsection.poly("Q0"))
        assert d.L == Q("x3 + x5 + 2*x6 + 3*x7")
        assert d.M == Q("-x5 + 5*x6 + 2*x7")

    def test_decompose_fiber_only(self):
        d = decompose_along_line(Q("x2^2"))
        assert d.L.is_zero() and d.M.is_zero() and d.q == Q("x2^2")

    def test_decompose_rejects(self):
        with pytest.raises(LineError):
            decompose_along_line(Q("x0*x1 + x2^2"))

    @given(st.lists(st.integers(-4, 4), min_size=33, max_size=33))
    def test_decomposition_reassembles(self, cs):
        xs = NET.x
        monos = [f"x0*{x}" for x in xs[2:]] + [f"x1*{x}" for x in xs[2:]] + \
            [f"{xs[i]}*{xs[j]}" for i in range(2, 8) for j in range(i, 8)]
        q = Q(" + ".join(f"({c})*{m}" for c, m in zip(cs, monos)))
        d = decompose_along_line(q)
        x0, x1 = Q("x0"), Q("x1")
        assert x0 * d.L + x1 * d.M + d.q == q
        assert not ({"x0", "x1"} & (d.L.variables() | d.M.variables() | d.q.variables()))


class TestBundleSystem:
    def test_special_matches_display(self, xspecial):
        sys = bundle_system(net_of(xspecial))
        assert same_up_to_scalar(sys.e1, xspecial.poly("E1")) == -1
        assert sys.e2 == xspecial.poly("E2")
        assert sys.e3 == xspecial.poly("E3")

    def test_section_net_matches_display(self, xsection):
        sys = bundle_system(net_of(xsection))
        assert sys.equations == tuple(xsection.poly(n) for n in ("E1", "E2", "E3"))

    def test_identical_quadrics(self):
        q = Q("x2^2 + x3*x4")
        sys = bundle_system([q, q, q])
        assert sys.e1.is_zero() and sys.e2.is_zero()
        assert sys.e3 == E("(l0 + l1 + l2)*(x2^2 + x3*x4)")

    def test_bidegrees(self, xsection):
        sys = bundle_system(net_of(xsection))
        assert [e.bidegree() for e in sys.equations] == [(1, 1), (1, 1), (1, 2)]

    def test_text_roundtrip(self, xspecial):
        sys = bundle_system(net_of(xspecial))
        back = BundleSystem.from_text(sys.to_text())
        assert [str(e) for e in back.equations] == [str(e) for e in sys.equations]


class TestSection:
    def test_plane_section(self, xsection):
        sys = bundle_system(net_of(xsection))
        s = section("l0", "l1", "l2", "0", "0", "0")
        assert verify_section(sys, s)
        assert all(r.is_zero() for r in section_residuals(sys, s))

    def test_swapped_section_fails(self, xsection):
        sys = bundle_system(net_of(xsection))
        s = section("l1", "l0", "l2", "0", "0", "0")
        res = section_residuals(sys, s)
        assert not verify_section(sys, s)
        assert any(not r.is_zero() for r in res)

    def test_zero_section_rejected(self):
        with pytest.raises(PolynomialError):
            section("0", "0", "0", "0", "0", "0")


def _sympy_bordered_det(sys):
    xs = sympy.symbols(FIB.x)
    e3, syms = to_sympy(sys.e3)
    lin = [to_sympy(e)[0] for e in (sys.e1, sys.e2)]
    G = sympy.Matrix(6, 6, lambda i, j: sympy.Rational(1, 2) * sympy.diff(e3, xs[i], xs[j]))
    L = sympy.Matrix(2, 6, lambda k, j: sympy.diff(lin[k], xs[j]))
    M = sympy.BlockMatrix([[G, L.T], [L, sympy.zeros(2, 2)]]).as_explicit()
    return sympy.expand(M.det(method="berkowitz")), syms


class TestDiscriminant:
    def test_coordinate_border(self):
        c = ["l1", "l2", "l0 + l1", "l1 - l2"]
        e3 = " + ".join(f"({ci})*{x}^2" for ci, x in zip(c, ("x2", "x3", "x4", "x5")))
        sys = BundleSystem(E("l0*x6"), E("l0*x7"), E(e3))
        D = discriminant_octic(sys)
        # the border pairs x6, x7 with l0 twice each: det = l0^4 * c2*c3*c4*c5
        prod = E("l0^4")
        for ci in c:
            prod = prod * E(ci)
        assert same_up_to_scalar(D, prod) in (1, -1)

    def test_special_system(self, xspecial):
        sys = BundleSystem(*(xspecial.poly(n) for n in ("E1", "E2", "E3")))
        D = discriminant_octic(sys)
        assert D.bidegree() == (8, 0)
        assert D == xspecial.poly("D")

    def test_degenerate_vanishes(self):
        e1, e2 = E("l0*x2 + l1*x3"), E("l2*x4 - l0*x5")
        sys = BundleSystem(e1, e2, e1 * E("x6") + e2 * E("x7 + x2"))
        assert discriminant_octic(sys).is_zero()

    @settings(max_examples=25)   # the symbolic 8x8 determinant is the slow part
    @given(st.lists(st.integers(-3, 3), min_size=60, max_size=60))
    def test_matches_sympy(self, cs):
        lam = ("l0", "l1", "l2")
        xs = FIB.x
        lin = [" + ".join(f"({cs[6 * k + 2 * j]})*{lam[j % 3]}*{xs[j]}" for j in range(6)) for k in range(2)]
        quad = [f"({cs[24 + i]})*{lam[i % 3]}*{xs[i % 6]}*{xs[(i * 5) % 6]}" for i in range(36)]
        sys = BundleSystem(E(lin[0]), E(lin[1]), E(" + ".join(quad)))
        D = discriminant_octic(sys)
        ref, syms = _sympy_bordered_det(sys)
        ours, _ = to_sympy(D)
        assert sympy.expand(ours - ref) == 0
        assert D.is_zero() or D.bidegree() == (8, 0)


class TestElimination:
    def test_special_system(self, xspecial):
        sys = BundleSystem(*(xspecial.poly(n) for n in ("E1", "E2", "E3")))
        Y = eliminate_to_22(sys)
        assert Y == xspecial.poly("Y")
        F = xspecial.poly("F")
        x5 = FIB.position("x5")
        coeff = Polynomial(FIB, {e[:x5] + (0,) + e[x5 + 1:]: c for e, c in Y.terms.items() if e[x5] == 2})
        assert coeff == F

    def test_result_comes_from_system(self, xspecial):
        sys = BundleSystem(*(xspecial.poly(n) for n in ("E1", "E2", "E3")))
        el = eliminate(sys)
        assert el.multiplier == E("l2")
        assert elimination_in_ideal(sys, el)

    def test_zero_linear_equations(self):
        z = Polynomial.zero(FIB)
        with pytest.raises(UnsupportedShape):
            eliminate_to_22(BundleSystem(z, z, E("l0*x2^2")))

    def test_general_shape_rejected(self, xsection):
        sys = bundle_system(net_of(xsection))
        with pytest.raises(UnsupportedShape):
            eliminate_to_22(sys)

    @given(st.lists(st.integers(-3, 3).filter(bool), min_size=4, max_size=4),
           st.lists(st.integers(-3, 3), min_size=10, max_size=10))
    def test_random_solvable_shape_in_ideal(self, a, c):
        lam = ("l0", "l1", "l2")
        e1 = E(f"({a[0]})*l1*x5 - ({a[1]})*l2*x7")
        e2 = E(f"({a[2]})*l0*x4 - ({a[3]})*l2*x6")
        sq = ["x2^2", "x3^2", "x4*x6", "x5*x7", "x7^2", "x6^2", "x2*x3", "x4^2", "x5^2", "x3*x6"]
        e3 = E(" + ".join(f"({ci})*{lam[i % 3]}*{m}" for i, (ci, m) in enumerate(zip(c, sq))))
        sys = BundleSystem(e1, e2, e3)
        el = eliminate(sys)
        assert not ({"x6", "x7"} & el.result.variables())
        assert elimination_in_ideal(sys, el)
