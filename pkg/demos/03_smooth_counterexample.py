"""A smooth loop that abelian holonomy cannot see.

Four graph curves built from dyadic bumps meet infinitely often near the
origin. Their loop has trivial holonomy for every U(1) connection, yet at
each truncation level its piecewise-linear transcription has a nonempty
reduced word with zero exponent vector.
"""

from hoops.gauge import U1, random_connection, transport
from hoops.geom import decompose
from hoops.pathology import MollifierSpec, cn_distance, counterexample_family, flatten_loop, mollify
from hoops.words import exponent_vector

for levels in (2, 4, 6):
    ce = counterexample_family(levels)
    worst = max(
        transport(random_connection(U1, ((0, -0.2), (1, 0.2)), 8, seed=s, radius_range=(0.05, 0.5)), ce.loop).distance_to_identity()
        for s in range(20)
    )
    dec = decompose(flatten_loop(ce.loop))
    print(f"levels {levels}: max |H - 1| {worst:.1e}, reduced word length {len(dec.word)}, exponents {exponent_vector(dec.word)}")

# Flattening the curves near a point with a smooth cutoff keeps every
# coincidence between them and moves them by a bounded C^N distance.
ce = counterexample_family(6)
out = mollify(ce.curves, MollifierSpec((0.0,), (2.0**-3,)))
for i, (f, g) in enumerate(zip(ce.curves, out), 1):
    print(f"f{i}: C^4 distance to mollified curve {cn_distance(f, g, 4).value:.3e}")
