"""The Atiyah class, the L-operator and the identities it satisfies.

Run with:  python3 demos/l_operator_tour.py
"""
from hochrr.cech import parse_variety
from hochrr.charclass import (
    L_operator,
    check_zero_class,
    verify_at_jacobi,
    verify_at_symmetry,
    verify_L_adjoint,
    verify_td_annihilation,
)
from hochrr.ratseries import l_coefficients, t_coefficients

print("l_n :", [str(c) for c in l_coefficients(6)])
print("t_n :", [str(c) for c in t_coefficients(6)])

P1 = parse_variety("P1")
L = L_operator(P1)
print("\nL on P1, component by component:")
for key, comp in sorted(L.items()):
    if comp is None:
        print(f"  L{key}: absent")
        continue
    report, _ = check_zero_class(comp, key[1])
    zero = report.status == "success"
    print(f"  L{key}: Ext degree {comp.degree}, {'zero' if zero else 'nonzero'} class")

for name in ("P1", "P2", "P1xP1"):
    V = parse_variety(name)
    print(f"\n{name}")
    for rep in (verify_at_symmetry(V), verify_at_jacobi(V), verify_td_annihilation(V), verify_L_adjoint(V)):
        states = ", ".join(f"p={c.p}:{c.status}" for c in rep.components)
        print(f"  {rep.identity:20} {'ok' if rep.success else 'FAILED'}  [{states}]")
