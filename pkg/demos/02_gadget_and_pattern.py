"""The block gadget, its slight bias, and the pattern matrix it builds.

Run: python3 demos/02_gadget_and_pattern.py
"""

from fractions import Fraction

from liftlab.core import BooleanFunction, Density
from liftlab.csp import maxcut_graph
from liftlab.pattern import Gadget, acc, build_pattern_matrix, extractor_bias_check, planted_embedding, verify_submatrix

print("Gadget tables (rows x, columns y):")
for b in (1, 2):
    print("  b = %d" % b)
    for row in Gadget(b).table():
        print("    " + " ".join("%+d" % v for v in row))

print("\nThe gadget leans towards -1 by exactly 1/q:")
for b in range(1, 9):
    print("  b = %d  E[g] = %s" % (b, Gadget(b).mean()))

f = 1 - BooleanFunction.coordinate(1, 0)
M = build_pattern_matrix(f, 1)
print("\nPattern matrix of f = 1 - z1 at b = 1: %s" % [list(map(str, r)) for r in M.entries])
print("Its mean is %s while E[f] = %s: the bias shows up in the matrix average." % (Fraction(sum(map(sum, M.entries)), 4), f.mean()))

u = Density.uniform(4, 1)
print("\nAcc of two uniform blocks at b = 2 (density of the gadget output): %s" % [str(v) for v in acc(u, u).values])
bias, verdict = extractor_bias_check(8, u := Density.uniform(256, 1), u)
print("Uniform sources at b = 8 have bias %s; bound satisfied: %s" % (bias, verdict.ok))

S, M, rows, cols = planted_embedding(maxcut_graph(2, [(1, 2)]), 1, 1, 1)
print("\nPlanting one MAX-CUT edge at b = 1 embeds the pattern matrix of 1 - I in the slack matrix: %s" % bool(verify_submatrix(S, M, rows, cols)))
