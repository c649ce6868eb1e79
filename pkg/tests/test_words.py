import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import all_words, brute_reduce
from hoops.words import (
    ABELIAN,
    NONSOLVABLE,
    CayleyTable,
    EnumerationBudgetExceeded,
    Finite,
    Word,
    alternating_table,
    commutator,
    cyclic_table,
    derived_series,
    evaluate_in_table,
    evaluate_matrices,
    exponent_vector,
    invert,
    is_identity,
    is_solvable,
    multiply,
    reduce,
    reduce_batch,
    so3_sampler,
    su2_sampler,
    symmetric_table,
    table_from_permutations,
    witness_search,
)

letters = st.integers(1, 4).flatmap(lambda g: st.sampled_from([g, -g]))
words = st.lists(letters, max_size=16).map(Word)


def test_reduce_examples():
    assert reduce([1, 1, -1]).to_list() == [1]
    assert reduce([]).to_list() == []
    assert reduce([2, 3, -1]).to_list() == [2, 3, -1]
    assert reduce([1, 2, -2, -1, 3]).to_list() == [3]


def test_word_rejects_zero_letter():
    with pytest.raises(ValueError):
        Word([1, 0])


def test_word_serialization():
    w = Word([2, 3, -1])
    assert w.dumps() == "[2, 3, -1]"
    assert Word.loads(w.dumps()) == w
    for bad in ('{"a": 1}', "[1.5]", "[true]", "[1, 0]"):
        with pytest.raises(ValueError):
            Word.loads(bad)


def test_symbols():
    w = Word([2, -1])
    assert [(s.index, s.sign) for s in w.symbols] == [(2, 1), (1, -1)]
    assert list(w.generators()) == [2, 1]  # order of first appearance


@pytest.mark.parametrize("n", range(7))
def test_reduce_matches_cancellation_closure(n):
    for w in all_words(n, 2):
        assert reduce(w).to_list() == list(brute_reduce(w))


@given(words)
def test_reduce_idempotent(w):
    r = reduce(w)
    assert reduce(r) == r
    assert all(r.letters[i] != -r.letters[i + 1] for i in range(len(r) - 1))


@given(words, words, words)
def test_group_axioms(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, Word()) == reduce(a)
    assert multiply(a, invert(a)) == Word()
    assert multiply(invert(a), a) == Word()


@given(words, words)
def test_exponent_vector_is_a_homomorphism(a, b):
    ea, eb = exponent_vector(a), exponent_vector(b)
    expected = {k: ea.get(k, 0) + eb.get(k, 0) for k in set(ea) | set(eb)}
    assert exponent_vector(multiply(a, b)) == {k: v for k, v in sorted(expected.items()) if v}


@given(words)
def test_reduce_batch_agrees(w):
    arr = np.zeros((1, max(1, len(w))), dtype=np.int64)
    arr[0, : len(w)] = w.letters
    out, n = reduce_batch(arr)
    assert out[0, : n[0]].tolist() == reduce(w).to_list()
    assert not out[0, n[0] :].any()


def test_reduce_batch_skips_padding():
    out, n = reduce_batch(np.array([[1, 0, -1, 2], [0, 0, 0, 0]]))
    assert n.tolist() == [1, 0]
    assert out.tolist() == [[2, 0, 0, 0], [0, 0, 0, 0]]


def test_reduce_batch_column_sweep_matches_kernel():
    from hoops.words import _reduce_scatter

    rng = np.random.default_rng(3)
    w = rng.choice([1, -1, 2, -2, 0], size=(3000, 12))
    a, la = reduce_batch(w)
    b, lb = _reduce_scatter(w)
    assert np.array_equal(a, b) and np.array_equal(la, lb)


# ---------------------------------------------------------------------------
# Cayley tables


def test_table_validation():
    with pytest.raises(ValueError):
        CayleyTable([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        CayleyTable([[1, 0], [0, 1]])
    # a Latin square with identity that is not associative (order 5 loop)
    loop5 = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(ValueError, match="associative"):
        CayleyTable(loop5)


def test_table_roundtrip():
    t = symmetric_table(3)
    u = CayleyTable.loads(t.dumps())
    assert np.array_equal(t.table, u.table)
    with pytest.raises(ValueError):
        CayleyTable.loads("3\n0 1 2\n1 2 0\n")


def test_table_inverse():
    t = alternating_table(4)
    assert all(t.table[a, t.inverse[a]] == 0 for a in range(t.order))


def test_derived_series_sizes():
    assert [len(h) for h in derived_series(symmetric_table(3))] == [6, 3, 1]
    assert [len(h) for h in derived_series(alternating_table(5))] == [60, 60]
    assert [len(h) for h in derived_series(cyclic_table(4))] == [4, 1]
    assert [len(h) for h in derived_series(symmetric_table(4))] == [24, 12, 4, 1]
    assert is_solvable(cyclic_table(1))
    assert is_solvable(symmetric_table(4))
    assert not is_solvable(alternating_table(5))


def test_table_from_permutations_closure():
    t = table_from_permutations([(0, 1, 2), (1, 2, 0), (2, 0, 1)])
    assert t.order == 3


def test_abelian_identities():
    assert is_identity(Word([1, 2, -1, -2]), ABELIAN)
    assert not is_identity(Word([1, 2, -1]), ABELIAN)
    assert is_identity(Word([]), ABELIAN)


def test_nonsolvable_identities():
    assert not is_identity(Word([1, 2, -1, -2]), NONSOLVABLE)
    assert is_identity(Word([1, -1]), NONSOLVABLE)
    assert is_identity(Word([]), NONSOLVABLE)


def test_finite_identities():
    s3 = symmetric_table(3)
    assert not is_identity(Word([1, 2, -1, -2]), s3)
    dc = commutator(commutator(Word([1]), Word([2])), commutator(Word([3]), Word([4])))
    assert is_identity(dc, Finite(s3))
    assert is_identity(Word([1, 2, -1, -2]), cyclic_table(5))
    assert is_identity(Word([1] * 6), s3)
    assert not is_identity(Word([1] * 3), s3)


def test_finite_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        is_identity(Word([1, 2, 3]), Finite(symmetric_table(3), budget=100))


@pytest.mark.parametrize("n", range(1, 9))
def test_cyclic_identities_are_exponents_mod_n(n):
    # in Z/n a word is an identity iff every exponent is 0 mod n
    t = cyclic_table(n)
    for w in all_words(4 if n > 4 else 5, 2):
        w = Word(w)
        expected = all(v % n == 0 for v in exponent_vector(w).values())
        assert is_identity(w, t) == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(letters, max_size=8), st.integers(1, 8))
def test_cyclic_identities_hypothesis(w, n):
    w = Word(w)
    assert is_identity(w, cyclic_table(n)) == all(v % n == 0 for v in exponent_vector(w).values())


def test_evaluate_in_table():
    t = cyclic_table(5)
    assert evaluate_in_table(Word([1, 1, -2]), t, {1: 2, 2: 1}) == 3


# ---------------------------------------------------------------------------
# Random-matrix witnesses


@pytest.mark.parametrize("sampler,n", [(so3_sampler, 3), (su2_sampler, 2)])
def test_samplers_land_in_group(sampler, n):
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = sampler(rng)
        assert g.shape == (n, n)
        assert np.allclose(g @ g.conj().T, np.eye(n), atol=1e-12)
        assert abs(np.linalg.det(g) - 1) < 1e-12


def test_witness_for_commutator():
    wit = witness_search(Word([1, 2, -1, -2]))
    assert wit is not None and wit.distance > 1e-6
    assert np.allclose(evaluate_matrices(Word([1, 2, -1, -2]), wit.assignment), wit.value)


def test_witness_rejects_trivial_word():
    with pytest.raises(ValueError):
        witness_search(Word([1, -1]))


def test_witness_for_finite_identity_still_found_in_so3():
    # (e1^6) is an identity of S3 but not of SO(3)
    assert witness_search(Word([1] * 6)) is not None


def test_substitution_instances_of_commutators_are_abelian_identities():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = Word(rng.choice([1, -1, 2, -2, 3], size=rng.integers(0, 6)).tolist())
        b = Word(rng.choice([1, -2, 3, -3], size=rng.integers(0, 6)).tolist())
        assert is_identity(commutator(a, b), ABELIAN)


def test_enumerated_small_words_in_s3():
    s3 = symmetric_table(3)
    for w in itertools.islice(all_words(4, 2), 500):
        w = Word(w)
        brute = all(
            evaluate_in_table(reduce(w), s3, dict(zip(w.generators(), vals))) == 0
            for vals in itertools.product(range(6), repeat=len(w.generators()))
        )
        assert is_identity(w, s3) == brute
