"""Graded pieces of the Jacobian ring of a smooth net and its period map.

Takes about half a minute on one core.  Run:  python demos/jacobian_ring.py
"""
from quadricnets.groebner import smoothness_check
from quadricnets.jacobian import QuadricNet, graded_piece, hodge_check, period_rank
from quadricnets.poly import format_monomial, parse_polynomial
from quadricnets.runner import load_preset

sc = load_preset("xprime")
net = QuadricNet(tuple(sc.poly(n) for n in ("Q0", "Q1", "Q2")))

cert = smoothness_check(net)
print(f"smoothness: {cert.status} (prime {cert.prime})")

rep = hodge_check(net)
for p, dims in rep.dims.items():
    print(f"R(q, 2q-2) for q = 0..3 mod {p}: {dims}")

top = graded_piece(net, 3, 4)
print("standard monomials of R(3,4):", [format_monomial(m, net.vars.names) for m in top.basis])

gamma = parse_polynomial("m2^2*x7^2", net.vars)
print("rank of multiplication by m2^2*x7^2 into R(3,4):", period_rank(net, gamma))
