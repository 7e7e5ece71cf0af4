"""Tour of the exact projective-group layer.

Enumerates PSL2(F_q) for small odd primes, acts on the projective line,
and measures centralizer sizes, which control how many points a
nontrivial translation can fix.
"""

from fractions import Fraction

from soficlab.algebra import (
    PSL2Element,
    centralizer_fraction,
    centralizer_fraction_max,
    moebius_act,
    projective_line,
    psl2_enumerate,
    psl2_order,
)

for q in (5, 7, 11, 13):
    elems = psl2_enumerate(q)
    print(f"q = {q}: enumerated {len(elems)} elements, "
          f"formula gives q(q^2-1)/2 = {psl2_order(q)}")

q = 7
shear = PSL2Element(1, 1, 0, 1, q)
flip = PSL2Element(0, -1, 1, 0, q)
line = projective_line(q)
print("\nshear orbit of 0:", end=" ")
x = line[0]
for _ in range(q + 1):
    print(x.value, end=" ")
    x = moebius_act(shear, x)
print("\nflip sends infinity to", moebius_act(flip, line[-1]).value)

print("\ncentralizer fractions at q = 7:")
print("  identity:", centralizer_fraction(PSL2Element.identity(q)))
print("  shear:   ", centralizer_fraction(shear))
for q in (5, 7, 11, 13):
    worst = centralizer_fraction_max(q)
    bound = Fraction(1, 2 * (q - 1))
    print(f"  q={q}: worst nontrivial fraction {worst} <= 1/(2(q-1)) = {bound}: "
          f"{worst <= bound}")
