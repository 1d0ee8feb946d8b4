"""Euler characteristics two ways on a few projective varieties.

Run with:  python3 demos/riemann_roch_tour.py
"""
from hochrr.cech import cech_cohomology, parse_variety
from hochrr.charclass import chern_character, class_numbers, hrr_verify, todd_class
from hochrr.cli import parse_sheaf

P2 = parse_variety("P2")

print("Todd class of P2 (∫ td_p · h^(2-p)):")
for p, rows in sorted(class_numbers(todd_class(P2)).items()):
    print(f"  p={p}: {[str(v) for _, v in rows]}")

print("\nChern character of the tangent bundle of P2:")
for p, rows in sorted(class_numbers(chern_character(parse_sheaf(P2, "T"))).items()):
    print(f"  ch_{p}: {[str(v) for _, v in rows]}")

jobs = [
    ("P1", "O(5)"),
    ("P2", "O(3)"),
    ("P2", "T"),
    ("P2", "Omega(1)"),
    ("P2", "wedge^2 dual T * O(1)"),
    ("P1xP1", "O(2,3)"),
    ("P1xP1", "O(1,-3)"),
    ("P3", "Omega^2"),
]
print("\n  variety  sheaf                       h^*            χ    ∫ ch·td")
for vname, text in jobs:
    V = parse_variety(vname)
    E = parse_sheaf(V, text)
    dims = cech_cohomology(E).dims
    rep = hrr_verify(E)
    mark = "" if rep["equal"] else "  MISMATCH"
    print(f"  {vname:7}  {text:26}  {str(dims):13}  {rep['chi_cohomology']:>3}  {rep['chi_rr']:>6}{mark}")
