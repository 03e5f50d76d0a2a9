"""From three quadrics in P^7 to a (2,2) hypersurface and its conic bundle.

Run:  python demos/specialization_chain.py
"""
from quadricnets.birational import maps_into_report
from quadricnets.bundle import bundle_system, discriminant_octic, eliminate
from quadricnets.runner import load_preset

sc = load_preset("xspecial")
net = [sc.poly(n) for n in ("Q0", "Q1", "Q2")]

system = bundle_system(net)
print("quadric surface bundle over P^2:")
for name, e in zip(("e1", "e2", "e3"), system.equations):
    print(f"  {name} = {e}")

print("\ndiscriminant octic:", discriminant_octic(system))

el = eliminate(system)
print(f"\nafter eliminating x6, x7 (multiplier {el.multiplier}):\n  {el.result}")

special = load_preset("prop-special")
eqs = [special.poly(n) for n in ("E1", "E2", "E3")]
rep = maps_into_report(special.poly("Y"), special.maps["phi"], eqs)
print("\nphi sends Y into the bundle:", rep.passed)
print("quotients by Y:", [str(q) for q in rep.quotients])
