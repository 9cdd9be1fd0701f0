"""Split a structured density at b = 20 into dense rectangles and a small error.

Run: python3 demos/03_rectangle_decomposition.py [seed]
"""

import random
import sys
from fractions import Fraction

from liftlab.cells import random_cell_density
from liftlab.decompose import check_premise, decompose_rect, verify_decomposition, verify_trace, walk
from liftlab.pattern import leaf_junta_terms

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 3
mu = random_cell_density(random.Random(seed), 20, 3, pieces=3, planted=2)
print("Density on [2^20]^3 x [2^20]^3 built from dyadic cells with 2 planted heavy points.")
print("Min-entropy deficiency t = %s bits" % check_premise(mu))

res = decompose_rect(mu, 2)
print("\nDecomposition at d = 2: %d nodes, %d leaves" % (res.node_count, len(res.leaves)))
print("  good rectangles (with families): %d" % res.good_count())
print("  error mass: x-side %s, y-side %s" % (res.error_mass("error_a"), res.error_mass("error_b")))

kinds = {}
for node in walk(res.root):
    kinds[node.kind] = kinds.get(node.kind, 0) + 1
print("  node kinds: %s" % kinds)

rep = verify_decomposition(mu, res)
trace = verify_trace(res)
print("\nIndependent re-check:")
for name, v in list(rep.items.items()) + [("trace " + k, v) for k, v in trace.items.items()]:
    print("  %-22s %s" % (name, "ok" if v else "FAILED: " + v.reason))

leaf = max(res.good, key=lambda l: l.F)
terms = leaf_junta_terms(mu, leaf, mu.b)
print("\nA good leaf fixing blocks %s becomes %d junta terms; first: weight %s, conjunction %s" % (leaf.F, len(terms), terms[0][0], terms[0][1].fixed))
print("Its correction h has largest coefficient %s (decay threshold 2^-10 per block)." % max((abs(c) for _, c in terms[0][2].spectrum.items()), default=Fraction(0)))
