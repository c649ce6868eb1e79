"""Free-group words, identities of groups, and finite-group oracles.

A word is a finite sequence of signed generator letters; ``e_i`` is the
integer ``i`` and ``e_i^{-1}`` is ``-i``.  Words serialize as exactly these
signed-integer lists, e.g. ``[2, 3, -1]`` for ``e2 e3 e1^-1``.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "GenSymbol",
    "Word",
    "reduce",
    "reduce_batch",
    "multiply",
    "invert",
    "commutator",
    "exponent_vector",
    "CayleyTable",
    "AbelianConnectedLie",
    "NonsolvableConnectedLie",
    "Finite",
    "ABELIAN",
    "NONSOLVABLE",
    "EnumerationBudgetExceeded",
    "is_identity",
    "evaluate_in_table",
    "derived_series",
    "is_solvable",
    "Witness",
    "witness_search",
    "so3_sampler",
    "su2_sampler",
    "evaluate_matrices",
    "cyclic_table",
    "symmetric_table",
    "alternating_table",
    "table_from_permutations",
]

DEFAULT_ENUMERATION_BUDGET = 10**7


class GenSymbol(NamedTuple):
    index: int
    sign: int

    @property
    def letter(self) -> int:
        return self.index * self.sign


class Word:
    """Immutable sequence of signed generator letters.

    Construction does not reduce; use :func:`reduce` (or ``Word.reduced``)
    for the free-group normal form.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int] = ()):
        letters = tuple(int(x) for x in letters)
        if any(x == 0 for x in letters):
            raise ValueError("generator letters are nonzero integers")
        object.__setattr__(self, "letters", letters)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def from_symbols(cls, symbols: Iterable[GenSymbol]) -> "Word":
        out = []
        for s in symbols:
            if s.index < 1 or s.sign not in (1, -1):
                raise ValueError(f"invalid symbol {s}")
            out.append(s.index * s.sign)
        return cls(out)

    @property
    def symbols(self) -> tuple[GenSymbol, ...]:
        return tuple(GenSymbol(abs(x), 1 if x > 0 else -1) for x in self.letters)

    @property
    def is_reduced(self) -> bool:
        return all(a != -b for a, b in zip(self.letters, self.letters[1:]))

    @property
    def reduced(self) -> "Word":
        return reduce(self)

    def generators(self) -> list[int]:
        """Distinct generator indices, in order of first appearance."""
        return list(dict.fromkeys(abs(x) for x in self.letters))

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __eq__(self, other):
        if isinstance(other, Word):
            return self.letters == other.letters
        return NotImplemented

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __repr__(self):
        return f"Word({list(self.letters)})"

    def __str__(self):
        if not self.letters:
            return "∅"
        return " ".join(f"e{abs(x)}" + ("" if x > 0 else "⁻¹") for x in self.letters)

    def to_list(self) -> list[int]:
        return list(self.letters)

    def dumps(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def loads(cls, text: str) -> "Word":
        data = json.loads(text)
        if not isinstance(data, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in data
        ):
            raise ValueError("a word is a JSON list of nonzero integers")
        return cls(data)


def reduce(w: Word | Sequence[int]) -> Word:
    """Free-group normal form: cancel adjacent ``e_i e_i^{-1}`` pairs."""
    stack: list[int] = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(stack)


try:  # optional compiled kernel for large batches
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None


def _reduce_rows(words, out, top):
    m, n = words.shape
    for r in range(m):
        t = 0
        for j in range(n):
            x = words[r, j]
            if x == 0:
                continue
            if t > 0 and out[r, t - 1] == -x:
                t -= 1
                out[r, t] = 0
            else:
                out[r, t] = x
                t += 1
        top[r] = t


_reduce_rows_jit = _numba.njit(cache=True, nogil=True)(_reduce_rows) if _numba is not None else None


def _reduce_scatter(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m, n = words.shape
    out = np.zeros(m * n, dtype=words.dtype)
    top = np.zeros(m, dtype=np.intp)
    rows = np.arange(m, dtype=np.intp) * n
    for j in range(n):
        x = words[:, j]
        prev = out[rows + np.maximum(top - 1, 0)]
        cancel = (top > 0) & (prev == -x) & (x != 0)
        top -= cancel
        # cancelled slots are cleared, pushed letters land on top
        out[rows + top] = np.where(cancel, 0, x)
        top += (x != 0) & ~cancel
    return out.reshape(m, n), top


def reduce_batch(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce many words at once.

    ``words`` is an ``(M, L)`` integer array of letters, ``0`` marking
    padding (skipped wherever it occurs). Returns the reduced words
    left-aligned and zero-padded in an array of the same shape, and their
    lengths. Uses a compiled kernel when numba is installed and a
    vectorized column sweep otherwise.
    """
    words = np.asarray(words)
    if words.ndim != 2:
        raise ValueError("expected an (M, L) array of letters")
    if words.size == 0:
        return words.copy(), np.zeros(len(words), dtype=np.intp)
    if _reduce_rows_jit is not None:
        out = np.zeros_like(words)
        top = np.zeros(len(words), dtype=np.intp)
        _reduce_rows_jit(words, out, top)
        return out, top
    return _reduce_scatter(words)


def multiply(a: Word, b: Word) -> Word:
    return reduce(tuple(a) + tuple(b))


def invert(w: Word) -> Word:
    return Word(-x for x in reversed(tuple(w)))


def commutator(a: Word, b: Word) -> Word:
    """``a b a^-1 b^-1``, reduced."""
    return reduce(tuple(a) + tuple(b) + tuple(invert(a)) + tuple(invert(b)))


def exponent_vector(w: Word) -> dict[int, int]:
    """Signed occurrence count per generator index (zero entries dropped)."""
    counts: Counter[int] = Counter()
    for x in w:
        counts[abs(x)] += 1 if x > 0 else -1
    return {k: v for k, v in sorted(counts.items()) if v != 0}


# ---------------------------------------------------------------------------
# Finite groups as Cayley tables


class CayleyTable:
    """Multiplication table of a finite group on elements ``0..n-1``.

    Element 0 must be the identity. The table is validated on construction
    (identity row/column, Latin square, associativity).
    """

    def __init__(self, table, name: str | None = None):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
            raise ValueError("Cayley table must be a nonempty square array")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise ValueError("table entries must lie in [0, n)")
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise ValueError("element 0 must be the identity")
        for i in range(n):
            if len(set(t[i])) != n or len(set(t[:, i])) != n:
                raise ValueError("every row and column must be a permutation")
        # (ab)c == a(bc) for all triples, vectorized
        lhs = t[t[:, :, None], ar[None, None, :]]
        rhs = t[ar[:, None, None], t[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise ValueError("table is not associative")
        t.setflags(write=False)
        self.table = t
        self.order = n
        self.name = name
        self.inverse = np.argmin(t, axis=1)  # t[a, inv[a]] == 0 is the row minimum

    def mul(self, a, b):
        return self.table[a, b]

    @property
    def elements(self) -> frozenset[int]:
        return frozenset(range(self.order))

    def __repr__(self):
        return f"CayleyTable(order={self.order}{', ' + self.name if self.name else ''})"

    def dumps(self) -> str:
        """Text format: the order on the first line, then ``n`` rows of ``n`` indices."""
        lines = [str(self.order)]
        lines += [" ".join(str(int(x)) for x in row) for row in self.table]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "CayleyTable":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows or len(rows[0]) != 1:
            raise ValueError("first line must hold the group order")
        n = int(rows[0][0])
        body = rows[1:]
        if len(body) != n or any(len(r) != n for r in body):
            raise ValueError(f"expected {n} rows of {n} entries")
        return cls([[int(x) for x in r] for r in body])


def table_from_permutations(perms: Sequence[Sequence[int]], name=None) -> CayleyTable:
    """Cayley table of a permutation group given as a list of its elements.

    The identity permutation is moved to index 0; composition is
    ``(p*q)(i) = p[q[i]]``.
    """
    perms = [tuple(p) for p in perms]
    ident = tuple(range(len(perms[0])))
    perms.sort(key=lambda p: (p != ident, p))
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = [[index[tuple(p[q[i]] for i in range(len(q)))] for q in perms] for p in perms]
    assert len(index) == n
    return CayleyTable(table, name=name)


def _parity(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def cyclic_table(n: int) -> CayleyTable:
    ar = np.arange(n)
    return CayleyTable((ar[:, None] + ar[None, :]) % n, name=f"Z{n}")


def symmetric_table(k: int) -> CayleyTable:
    return table_from_permutations(list(itertools.permutations(range(k))), name=f"S{k}")


def alternating_table(k: int) -> CayleyTable:
    perms = [p for p in itertools.permutations(range(k)) if _parity(p) == 1]
    return table_from_permutations(perms, name=f"A{k}")


def _generated_subgroup(t: CayleyTable, gens: Iterable[int]) -> frozenset[int]:
    members = {0}
    frontier = [0]
    gens = list(set(gens))
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = int(t.table[a, g])
                if b not in members:
                    members.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(members)


def _derived_subgroup(t: CayleyTable, h: frozenset[int]) -> frozenset[int]:
    hs = np.array(sorted(h))
    tab, inv = t.table, t.inverse
    comm = tab[tab[hs[:, None], hs[None, :]], tab[inv[hs][:, None], inv[hs][None, :]]]
    return _generated_subgroup(t, np.unique(comm).tolist())


def derived_series(g: CayleyTable) -> list[frozenset[int]]:
    """``[G, G', G'', ...]`` until it reaches ``{e}`` or stops shrinking.

    A perfect group yields its repeated last term, e.g. ``[A5, A5]``.
    """
    series = [g.elements]
    while len(series[-1]) > 1:
        nxt = _derived_subgroup(g, series[-1])
        series.append(nxt)
        if nxt == series[-2]:
            break
    return series


def is_solvable(g: CayleyTable) -> bool:
    return len(derived_series(g)[-1]) == 1


# ---------------------------------------------------------------------------
# Group classes and the identity decider


class AbelianConnectedLie:
    """Connected abelian Lie group (e.g. U(1), tori, R^n)."""

    def __repr__(self):
        return "AbelianConnectedLie"


class NonsolvableConnectedLie:
    """Connected non-solvable Lie group (e.g. SO(3), SU(2), SL(2,R))."""

    def __repr__(self):
        return "NonsolvableConnectedLie"


@dataclass(frozen=True)
class Finite:
    table: CayleyTable
    budget: int = DEFAULT_ENUMERATION_BUDGET


ABELIAN = AbelianConnectedLie()
NONSOLVABLE = NonsolvableConnectedLie()


class EnumerationBudgetExceeded(ValueError):
    def __init__(self, order: int, k: int, budget: int):
        self.order, self.k, self.budget = order, k, budget
        super().__init__(
            f"exhaustive check needs {order}^{k} = {order**k} assignments, "
            f"budget is {budget}"
        )


def evaluate_in_table(w: Word, t: CayleyTable, assignment: dict[int, int]) -> int:
    acc = 0
    for x in w:
        g = assignment[abs(x)]
        acc = int(t.table[acc, g if x > 0 else t.inverse[g]])
    return acc


def _all_assignments_identity(w: Word, t: CayleyTable, budget: int, chunk=1 << 20) -> bool:
    gens = w.generators()
    k, n = len(gens), t.order
    if k == 0:
        return True
    total = n**k
    if total > budget:
        raise EnumerationBudgetExceeded(n, k, budget)
    slot = {g: i for i, g in enumerate(gens)}
    tab, inv = t.table, t.inverse
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        # mixed-radix digits are the assigned elements
        digits = [(idx // n**i) % n for i in range(k)]
        acc = np.zeros_like(idx)
        for x in w:
            g = digits[slot[abs(x)]]
            acc = tab[acc, g if x > 0 else inv[g]]
        if np.any(acc != 0):
            return False
    return True


def is_identity(w: Word, g) -> bool:
    """Whether ``w`` evaluates to the identity under every assignment in ``g``.

    ``g`` is :data:`ABELIAN`, :data:`NONSOLVABLE`, a :class:`Finite` or a bare
    :class:`CayleyTable`.
    """
    if isinstance(g, AbelianConnectedLie):
        return not exponent_vector(w)
    if isinstance(g, NonsolvableConnectedLie):
        return len(reduce(w)) == 0
    if isinstance(g, CayleyTable):
        g = Finite(g)
    if isinstance(g, Finite):
        return _all_assignments_identity(reduce(w), g.table, g.budget)
    raise TypeError(f"unsupported group class {g!r}")


# ---------------------------------------------------------------------------
# Random-matrix witnesses for non-identities


def so3_sampler(rng: np.random.Generator) -> np.ndarray:
    """Haar-random rotation of 3-space (QR of a Gaussian matrix, sign-fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def su2_sampler(rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SU(2) from a uniform unit quaternion."""
    a, b, c, d = rng.standard_normal(4)
    n = np.sqrt(a * a + b * b + c * c + d * d)
    a, b, c, d = a / n, b / n, c / n, d / n
    return np.array([[a + 1j * b, -c + 1j * d], [c + 1j * d, a - 1j * b]])


def evaluate_matrices(w: Word, assignment: dict[int, np.ndarray]) -> np.ndarray:
    any_m = next(iter(assignment.values()))
    acc = np.eye(any_m.shape[0], dtype=any_m.dtype)
    inverses = {}
    for x in w:
        m = assignment[abs(x)]
        if x < 0:
            if abs(x) not in inverses:
                inverses[abs(x)] = np.linalg.inv(m)
            m = inverses[abs(x)]
        acc = acc @ m
    return acc


@dataclass
class Witness:
    """Assignment of matrices to generators under which a word is not ``I``."""

    assignment: dict[int, np.ndarray]
    value: np.ndarray
    distance: float
    trial: int


def witness_search(
    w: Word,
    sampler: Callable[[np.random.Generator], np.ndarray] = so3_sampler,
    trials: int = 200,
    tol: float = 1e-9,
    seed: int = 0,
) -> Witness | None:
    """Look for generator values making ``w`` differ from the identity.

    Returns ``None`` when no sample in ``trials`` draws exceeds ``tol``; that
    is inconclusive, never a proof that ``w`` is an identity.
    """
    rw = reduce(w)
    if not len(rw):
        raise ValueError("witness_search needs a word that is not freely trivial")
    rng = np.random.default_rng(seed)
    gens = rw.generators()
    for trial in range(trials):
        assignment = {g: sampler(rng) for g in gens}
        value = evaluate_matrices(rw, assignment)
        dist = float(np.linalg.norm(value - np.eye(value.shape[0]), 2))
        if dist > tol:
            return Witness(assignment, value, dist, trial)
    return None
