import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quadricnets.jacobian import (HODGE_TARGETS, NetError, QuadricNet, graded_piece, hodge_check,
                                  jacobian_generators, multiplication_map, period_rank,
                                  period_surjective, quotient_dimension, verify_basis)
from quadricnets.poly import Polynomial, VarTable, monomial_basis, parse_polynomial

P = 32003


def net_of(sc):
    return QuadricNet(tuple(sc.poly(n) for n in ("Q0", "Q1", "Q2")))


@pytest.fixture(scope="module")
def xprime_net(xprime):
    return net_of(xprime)


def toy_net(srcs, xs=("x0", "x1", "x2", "x3")):
    T = VarTable(("m0", "m1", "m2"), xs)
    return QuadricNet(tuple(parse_polynomial(s, T) for s in srcs))


TOY = ("x0^2 + x1*x2 + 3*x3^2", "x1^2 - x0*x3 + x2^2", "x2*x3 + 2*x0*x1 + x3^2 - x0^2")


def quadrics(xs):
    monos = [(i, j) for i in range(len(xs)) for j in range(i, len(xs))]

    def build(coeffs):
        return " + ".join(f"{c}*{xs[i]}*{xs[j]}" for c, (i, j) in zip(coeffs, monos) if c) or "0"
    quad = st.lists(st.integers(-3, 3), min_size=len(monos), max_size=len(monos)).filter(any).map(build)
    return st.tuples(quad, quad, quad)


def sympy_dimension(net, a, b, p):
    """dim R_(a,b) by counting standard monomials of a sympy Groebner basis mod p."""
    syms = sympy.symbols(net.vars.names)
    F = sum(sympy.sympify(str(m)) * sympy.sympify(str(q)) for m, q in zip(net.vars.mu, net.Q))
    gens = [sympy.diff(F, s) for s in syms]
    G = sympy.groebner([g for g in gens if g != 0], *syms, order="grevlex", modulus=p)
    lms = [g.monoms(order="grevlex")[0] for g in G.polys]
    count = 0
    for m in monomial_basis(a, b, net.vars):
        if not any(all(x <= y for x, y in zip(lm, m)) for lm in lms):
            count += 1
    return count


class TestGenerators:
    def test_count_and_linearity(self, xspecial):
        net = net_of(xspecial)
        gens = jacobian_generators(net)
        assert len(gens) == 11
        assert gens[1] == net.Q[1]

    def test_special_x7_partial(self, xspecial):
        net = net_of(xspecial)
        g = jacobian_generators(net)[3 + 7]
        assert g == parse_polynomial("m2*(x0 + 2*x7)", net.vars)

    def test_rejects_non_quadric(self):
        with pytest.raises(NetError):
            toy_net(("x0^3", "x1^2", "x2^2"))


class TestGradedPieces:
    def test_mu_linear_piece(self, xprime_net):
        assert quotient_dimension(xprime_net, 1, 0) == 3

    def test_negative_degree(self, xprime_net):
        assert quotient_dimension(xprime_net, 0, -2) == 0

    def test_toy_net_matches_sympy(self):
        net = toy_net(TOY)
        for a, b in [(0, 2), (1, 1), (1, 2), (2, 2), (2, 3)]:
            assert quotient_dimension(net, a, b, 101) == sympy_dimension(net, a, b, 101)

    @settings(max_examples=100)
    @given(quadrics(("x0", "x1", "x2", "x3")), st.permutations(range(4)))
    def test_dimension_independent_of_variable_order(self, srcs, perm):
        net = toy_net(srcs)
        names = ("x0", "x1", "x2", "x3")
        T2 = VarTable(("m0", "m1", "m2"), tuple(names[i] for i in perm))
        moved = QuadricNet(tuple(parse_polynomial(str(q), T2) for q in net.Q))
        for a, b in [(1, 1), (1, 2), (2, 2)]:
            assert quotient_dimension(net, a, b, 101) == quotient_dimension(moved, a, b, 101)

    def test_middle_piece_two_primes(self, xprime_net):
        assert quotient_dimension(xprime_net, 2, 2, 32003) == 37
        assert quotient_dimension(xprime_net, 2, 2, 65537) == 37

    @pytest.mark.slow
    def test_top_piece_and_basis(self, xprime_net):
        piece = graded_piece(xprime_net, 3, 4, P)
        assert piece.ambient_dim == 3300
        assert piece.dim == 3
        names = [sympy.sympify(" * ".join(f"{n}**{k}" for n, k in zip(xprime_net.vars.names, m) if k))
                 for m in piece.basis]
        assert set(map(str, names)) == {"m0*m2**2*x7**4", "m1*m2**2*x7**4", "m2**3*x7**4"}


class TestVerifyBasis:
    def test_mu_block(self, xprime_net):
        v = xprime_net.vars
        assert verify_basis(xprime_net, [Polynomial.var(v, m) for m in v.mu], 1, 0)

    def test_dependent_candidates(self, xprime_net):
        v = xprime_net.vars
        b = parse_polynomial("m0*m2^2*x7^4", v)
        assert not verify_basis(xprime_net, [b, b.scale(2), parse_polynomial("m2^3*x7^4", v)], 3, 4)

    def test_wrong_bidegree(self, xprime_net):
        with pytest.raises(NetError):
            verify_basis(xprime_net, [parse_polynomial("m0*x7", xprime_net.vars)], 1, 0)

    @pytest.mark.slow
    def test_stated_basis(self, xprime_net):
        v = xprime_net.vars
        B = [parse_polynomial(s, v) for s in ("m0*m2^2*x7^4", "m1*m2^2*x7^4", "m2^3*x7^4")]
        assert verify_basis(xprime_net, B, 3, 4, 32003)
        assert verify_basis(xprime_net, B, 3, 4, 65537)


@pytest.mark.slow
class TestPeriodMap:
    def test_gamma_rank(self, xprime_net):
        gamma = parse_polynomial("m2^2*x7^2", xprime_net.vars)
        assert period_rank(xprime_net, gamma) == 3
        assert period_surjective(xprime_net, gamma)

    def test_zero_gamma(self, xprime_net):
        zero = Polynomial.zero(xprime_net.vars)
        M = multiplication_map(xprime_net, zero)
        assert all(v == 0 for row in M.rows for v in row)
        assert not period_surjective(xprime_net, zero)

    def test_wrong_bidegree(self, xprime_net):
        with pytest.raises(NetError):
            multiplication_map(xprime_net, parse_polynomial("m2*x7^2", xprime_net.vars))

    @given(st.data())
    def test_ideal_elements_act_by_zero(self, xprime_net, data):
        gens = jacobian_generators(xprime_net)
        v = xprime_net.vars
        gamma = Polynomial.zero(v)
        for g in data.draw(st.lists(st.sampled_from(gens[3:]), min_size=1, max_size=3)):
            m = data.draw(st.sampled_from(monomial_basis(1, 1, v)))
            gamma = gamma + g * Polynomial.monomial(v, m, data.draw(st.integers(1, 50)))
        for g in data.draw(st.lists(st.sampled_from(gens[:3]), max_size=2)):
            m = data.draw(st.sampled_from(monomial_basis(2, 0, v)))
            gamma = gamma + g * Polynomial.monomial(v, m, data.draw(st.integers(1, 50)))
        M = multiplication_map(xprime_net, gamma)
        assert all(x == 0 for row in M.rows for x in row)

    @given(st.data())
    def test_linear_in_gamma(self, xprime_net, data):
        v = xprime_net.vars
        monos = monomial_basis(2, 2, v)

        def gamma():
            picks = data.draw(st.lists(st.sampled_from(monos), min_size=1, max_size=4, unique=True))
            return Polynomial(v, {m: data.draw(st.integers(-20, 20)) for m in picks})
        g1, g2 = gamma(), gamma()
        A, B, C = (multiplication_map(xprime_net, g) for g in (g1, g2, g1 + g2))
        assert all((a + b - c) % P == 0 for ra, rb, rc in zip(A.rows, B.rows, C.rows)
                   for a, b, c in zip(ra, rb, rc))


@pytest.mark.slow
class TestHodge:
    def test_deformed_net(self, xprime_net):
        rep = hodge_check(xprime_net)
        assert rep.passed
        assert rep.dims[32003] == HODGE_TARGETS

    def test_section_net(self, xsection):
        assert hodge_check(net_of(xsection)).passed

    def test_symmetry(self, xprime_net, xsection):
        for net in (xprime_net, net_of(xsection)):
            assert quotient_dimension(net, 1, 0) == quotient_dimension(net, 3, 4)
