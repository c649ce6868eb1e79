"""Decompose a loop, then build a connection that detects it.

The commutator of two triangles is a nontrivial loop whose word is
[1, 2, -1, -2]. Over U(1) every connection gives it trivial holonomy;
over SO(3) we synthesize a connection with prescribed generator
holonomies and watch the loop's holonomy move away from the identity.
"""

import numpy as np

from hoops.gauge import SO3, U1, random_connection, transport
from hoops.geom import PolyLoop, compose, decompose, invert_loop
from hoops.synth import falsify_hoop_triviality

a = PolyLoop.through((0, 0), (1, 0), (1, 1))
b = PolyLoop.through((0, 0), (-1, 0), (-1, -1))
loop = compose(compose(a, b), compose(invert_loop(a), invert_loop(b)))

dec = decompose(loop)
print("generators:", len(dec.generators), "word:", dec.word.to_list())
for n, g in enumerate(dec.generators, 1):
    print(f"  e{n}: clearance {float(g.clearance):.3f}")

worst = max(
    transport(random_connection(U1, ((-2, -2), (2, 2)), 6, seed=s), loop).distance_to_identity()
    for s in range(20)
)
print(f"U(1), 20 random connections: max |H - 1| = {worst:.1e}")

res = falsify_hoop_triviality(loop, SO3)
print("SO(3) verdict:", res.verdict)
print("  holonomy distance from identity:", round(res.holonomy.distance_to_identity(), 4))
print("  matches word evaluated on targets:", np.allclose(res.holonomy.matrix, res.predicted, atol=1e-6))
