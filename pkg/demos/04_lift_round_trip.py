"""From a conical junta to a matrix factorization and back to an approximate junta.

Run: python3 demos/04_lift_round_trip.py
"""

from liftlab.core import BooleanFunction
from liftlab.lift import factorization_to_witness, junta_to_factorization, robustness_check, verify_factorization, verify_witness
from liftlab.pattern import build_pattern_matrix
from liftlab.sa import degp_exact, degp_feasible

f = 1 - BooleanFunction.coordinate(1, 0)
d = degp_exact(f)
rep = degp_feasible(f, d).junta
print("f = 1 - z1 is a conical %d-junta: %s" % (d, [(str(w), c.fixed) for w, c in rep.terms]))

F = junta_to_factorization(rep, 1, 1, f)
print("\nAt b = 1 the junta becomes %d nonnegative rank-one terms:" % F.rank)
for t in F.terms:
    print("  weight %s  x-side max prob %s  y-side max prob %s" % (t.weight, t.x.max_probability(), t.y.max_probability()))
print("They reproduce the pattern matrix exactly: %s" % bool(verify_factorization(build_pattern_matrix(f, 1), F)))

F20 = junta_to_factorization(rep, 20, 1, f)
print("\nAt b = 20 the factorization has %d terms, stored as %d orbit representatives." % (F20.rank, len(F20.terms)))
W = factorization_to_witness(F20, 1)
report = verify_witness(f, W)
print("Decomposing every term gives an approximate junta with %d terms and E[gamma] = %s." % (len(W.terms), W.delta))
for name, v in report.items.items():
    print("  %-20s %s" % (name, "ok" if v else "FAILED: " + v.reason))
rob = robustness_check(f, W, 1)
print("Robustness: f + 1/n is a conical junta of degree <= %d: %s" % (rob.degree, rob.ok))
