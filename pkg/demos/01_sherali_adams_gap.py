"""Where degree-2 Sherali-Adams is fooled, and the functional that proves it.

Run: python3 demos/01_sherali_adams_gap.py
"""

from fractions import Fraction

from liftlab.csp import encode_polynomial, maxcut_graph, odd_cycle_xor, opt_brute
from liftlab.sa import PseudoExpectation, check_pseudoexpectation, degp_exact, duality_check, sa_value, separating_functional, verify_separating_functional

triangle = maxcut_graph(3, [(1, 2), (2, 3), (1, 3)])
opt, best = opt_brute(triangle)
print("Triangle MAX-CUT: the best cut has value %s, e.g. at %s." % (opt, best))

for d in (2, 3):
    value, _ = sa_value(triangle, d)
    print("  degree-%d Sherali-Adams value: %s" % (d, value))

# the degree-2 LP is fooled by perfectly anti-correlated pairs, which no real distribution on 3 bits has
pe = PseudoExpectation(3, 2, {0b011: -1, 0b101: -1, 0b110: -1})
print("  E~[x_i x_j] = -1 on all edges is locally consistent: %s" % bool(check_pseudoexpectation(pe)))
print("  and claims every edge is cut: E~[I] = %s" % pe.apply(encode_polynomial(triangle)))

print("\nDuality: SA_d <= c exactly when c - I is a conical d-junta.")
for c in (Fraction(5, 6), Fraction(1)):
    rep = duality_check(triangle, 2, c)
    print("  c = %-4s SA_2 <= c: %-5s deg+(c - I) <= 2: %-5s agree: %s" % (c, rep.sa_le_c, rep.degp_le_d, rep.ok))

cycle = odd_cycle_xor(3)
f = Fraction(11, 12) - encode_polynomial(cycle)
print("\nOdd 3-cycle XOR: f = 11/12 - I has conical degree %d, so no degree-2 junta fits." % degp_exact(f))
sf = separating_functional(f, 2, Fraction(1, 24))
rep = verify_separating_functional(sf)
print("A degree-2 functional L separates f from the 2-junta cone:")
print("  E[L f] = %s (< -1/24)" % sf.L.inner(f))
for name, verdict in rep.items.items():
    print("  %-24s %s" % (name, "ok" if verdict else "FAILED: " + verdict.reason))
