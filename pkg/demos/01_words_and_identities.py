"""Free-group words and group identities.

A word is an identity of a group when it evaluates to the identity under
every assignment. Commutators are identities of every abelian group but
never of a non-solvable connected Lie group, where a random SO(3)
assignment exposes them.
"""

from hoops.words import (
    ABELIAN,
    NONSOLVABLE,
    Word,
    commutator,
    derived_series,
    is_identity,
    reduce,
    symmetric_table,
    witness_search,
)

w = Word([1, 2, -2, -1, 3])
print("reduce", w.to_list(), "->", reduce(w).to_list())

c = commutator(Word([1]), Word([2]))
print("commutator", c.to_list())
print("  identity of abelian groups:", is_identity(c, ABELIAN))
print("  identity of non-solvable groups:", is_identity(c, NONSOLVABLE))

wit = witness_search(c)
print(f"  SO(3) witness: distance {wit.distance:.3f} from the identity")

# S3 is solvable: its derived series reaches the trivial group, so a
# double commutator is an identity of S3 though not of SO(3).
s3 = symmetric_table(3)
print("S3 derived series sizes:", [len(h) for h in derived_series(s3)])
dc = commutator(commutator(Word([1]), Word([2])), commutator(Word([3]), Word([4])))
print("double commutator is an S3 identity:", is_identity(dc, s3))
