"""Piecewise-linear based loops and their decomposition into independent loops.

All coordinates are exact rationals (:class:`fractions.Fraction`); two PL
segments either meet in finitely many points or share a sub-segment, and
every classification below is decided exactly.

A loop is cut at every self-intersection into an arrangement graph. A
spanning tree rooted at the basepoint turns each non-tree edge into a
generator loop ``tree path -> edge -> tree path back``; the edge is traced
exactly once by its generator and by no other generator, so the generators
are independent, and the input loop is the word read off from its non-tree
edge traversals.
"""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .words import Word, reduce

Point = tuple[Fraction, ...]

__all__ = [
    "Point",
    "as_point",
    "PolyPath",
    "PolyLoop",
    "compose",
    "invert_loop",
    "spur_reduce",
    "segment_intersection",
    "Arrangement",
    "build_arrangement",
    "Generator",
    "Decomposition",
    "decompose",
    "is_independent",
    "loop_equal",
    "evaluate_word",
    "reduce_edge_sequence",
    "BasepointMismatch",
]


class BasepointMismatch(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    return Fraction(x)


def as_point(coords: Iterable) -> Point:
    return tuple(_frac(c) for c in coords)


def _sub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def _dot(a: Point, b: Point) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _parallel(u: Point, v: Point) -> bool:
    d = len(u)
    return all(u[i] * v[j] == u[j] * v[i] for i in range(d) for j in range(i + 1, d))


def _lerp(p: Point, q: Point, t: Fraction) -> Point:
    return tuple(a + t * (b - a) for a, b in zip(p, q))


def _fmt_point(p: Point) -> list[str]:
    return [str(c) for c in p]


# ---------------------------------------------------------------------------
# Paths and loops


@dataclass(frozen=True)
class PolyPath:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if len(vs) < 2:
            raise ValueError("a path needs at least two vertices")
        d = len(vs[0])
        if d < 2 or any(len(v) != d for v in vs):
            raise ValueError("vertices must share a dimension >= 2")
        if any(a == b for a, b in zip(vs, vs[1:])):
            raise ValueError("consecutive vertices must be distinct")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def segments(self):
        return list(zip(self.vertices, self.vertices[1:]))


@dataclass(frozen=True)
class PolyLoop:
    """PL closed curve based at ``basepoint``.

    ``vertices`` starts and ends at the basepoint.  The constant loop is the
    single-vertex tuple ``(basepoint,)``.  Repeated consecutive vertices are
    dropped on construction.
    """

    basepoint: Point
    vertices: tuple[Point, ...] = ()

    def __post_init__(self):
        o = as_point(self.basepoint)
        vs = [as_point(v) for v in self.vertices] or [o]
        d = len(o)
        if d < 2 or any(len(v) != d for v in vs):
            raise ValueError("vertices must share the basepoint's dimension (>= 2)")
        if vs[0] != o or vs[-1] != o:
            raise ValueError("a loop must start and end at its basepoint")
        dedup = [vs[0]]
        for v in vs[1:]:
            if v != dedup[-1]:
                dedup.append(v)
        object.__setattr__(self, "basepoint", o)
        object.__setattr__(self, "vertices", tuple(dedup))

    @classmethod
    def constant(cls, basepoint) -> "PolyLoop":
        return cls(as_point(basepoint), ())

    @classmethod
    def through(cls, *points) -> "PolyLoop":
        """Loop ``p0 -> p1 -> ... -> p0`` based at ``p0``; the closing vertex is added."""
        pts = [as_point(p) for p in points]
        if pts[-1] != pts[0]:
            pts.append(pts[0])
        return cls(pts[0], tuple(pts))

    @property
    def dim(self) -> int:
        return len(self.basepoint)

    @property
    def is_constant(self) -> bool:
        return len(self.vertices) == 1

    @property
    def path(self) -> PolyPath | None:
        return None if self.is_constant else PolyPath(self.vertices)

    def segments(self):
        return list(zip(self.vertices, self.vertices[1:]))

    # -- loop file format ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "basepoint": _fmt_point(self.basepoint),
            "vertices": [_fmt_point(v) for v in self.vertices],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "PolyLoop":
        try:
            dim = int(data["dim"])
            o = as_point(data["basepoint"])
            vs = tuple(as_point(v) for v in data["vertices"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed loop record: {exc}") from exc
        if len(o) != dim:
            raise ValueError("basepoint dimension does not match 'dim'")
        return cls(o, vs)

    @classmethod
    def loads(cls, text: str) -> "PolyLoop":
        return cls.from_dict(json.loads(text))


def compose(a: PolyLoop, b: PolyLoop) -> PolyLoop:
    """Loop product ``ab``: traverse ``a`` then ``b``."""
    if a.basepoint != b.basepoint:
        raise BasepointMismatch(f"{a.basepoint} != {b.basepoint}")
    return PolyLoop(a.basepoint, a.vertices + b.vertices[1:])


def invert_loop(a: PolyLoop) -> PolyLoop:
    return PolyLoop(a.basepoint, a.vertices[::-1])


def spur_reduce(a: PolyLoop) -> PolyLoop:
    """Remove all retraced sub-segments, including partial backtracks.

    Interior vertices where the path continues straight are also dropped,
    so the result is the canonical PL representative of ``a`` modulo
    reparameterization and retracing.
    """
    stack: list[Point] = [a.vertices[0]]
    for v in a.vertices[1:]:
        while len(stack) >= 2 and _parallel(_sub(stack[-1], stack[-2]), _sub(v, stack[-1])):
            stack.pop()
        if v != stack[-1]:
            stack.append(v)
    return PolyLoop(a.basepoint, tuple(stack))


# ---------------------------------------------------------------------------
# Exact segment intersection


def _param(p: Point, d: Point, x: Point) -> Fraction:
    return _dot(_sub(x, p), d) / _dot(d, d)


def point_on_segment(x: Point, p: Point, q: Point) -> bool:
    d = _sub(q, p)
    w = _sub(x, p)
    if not _parallel(w, d):
        return False
    t = _dot(w, d) / _dot(d, d)
    return 0 <= t <= 1


def segment_intersection(p: Point, q: Point, r: Point, s: Point):
    """Intersection of closed segments ``pq`` and ``rs``.

    Returns ``None``, a single point, or a pair of distinct points bounding
    a shared sub-segment.
    """
    d1, d2, w = _sub(q, p), _sub(s, r), _sub(r, p)
    dim = len(p)
    if _parallel(d1, d2):
        if not _parallel(w, d1):
            return None
        dd = _dot(d1, d1)
        t0, t1 = _dot(w, d1) / dd, _dot(_sub(s, p), d1) / dd
        lo, hi = max(Fraction(0), min(t0, t1)), min(Fraction(1), max(t0, t1))
        if lo > hi:
            return None
        if lo == hi:
            return _lerp(p, q, lo)
        return (_lerp(p, q, lo), _lerp(p, q, hi))
    # t*d1 - u*d2 = w; solve on a non-degenerate 2x2 minor, then verify
    for i in range(dim):
        for j in range(i + 1, dim):
            det = -d1[i] * d2[j] + d1[j] * d2[i]
            if det != 0:
                t = (-w[i] * d2[j] + w[j] * d2[i]) / det
                u = (d1[i] * w[j] - d1[j] * w[i]) / det
                break
        else:
            continue
        break
    if not (0 <= t <= 1 and 0 <= u <= 1):
        return None
    x = _lerp(p, q, t)
    if x != _lerp(r, s, u):
        return None  # skew lines in d >= 3
    return x


def _bbox_overlap(p, q, r, s) -> bool:
    return all(
        max(min(a, b), min(c, e)) <= min(max(a, b), max(c, e))
        for a, b, c, e in zip(p, q, r, s)
    )


def _sqdist_point_segment(x: Point, p: Point, q: Point) -> Fraction:
    d = _sub(q, p)
    t = _dot(_sub(x, p), d) / _dot(d, d)
    t = min(Fraction(1), max(Fraction(0), t))
    y = _sub(x, _lerp(p, q, t))
    return _dot(y, y)


# ---------------------------------------------------------------------------
# Arrangements


@dataclass(frozen=True)
class Arrangement:
    """Planar-or-not graph cut out by a family of PL paths.

    ``nodes`` are sorted lexicographically; ``edges[k] = (i, j)`` with
    ``i < j`` is the straight segment between nodes ``i`` and ``j``, whose
    interior meets no other edge.  ``path_edges[m]`` is path ``m`` as a
    sequence of ``(edge, sign)``; sign ``+1`` means traversal from ``i`` to
    ``j``.
    """

    nodes: tuple[Point, ...]
    edges: tuple[tuple[int, int], ...]
    path_edges: tuple[tuple[tuple[int, int], ...], ...] = ()
    node_index: dict = field(default=None, compare=False, repr=False)
    edge_index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "node_index", {p: i for i, p in enumerate(self.nodes)})
        object.__setattr__(self, "edge_index", {e: k for k, e in enumerate(self.edges)})

    @cached_property
    def _float_nodes(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.nodes], dtype=float).reshape(len(self.nodes), -1)

    @cached_property
    def _float_tol(self) -> float:
        # float rounding of exact coordinates stays far below this slack
        scale = max(1.0, float(np.abs(self._float_nodes).max(initial=0.0)))
        return 1e-9 * scale * scale

    def _near_nodes(self, p: Point, q: Point) -> np.ndarray:
        """Indices of nodes whose float image lies in the slightly grown bbox of ``pq``."""
        fp = np.array([float(c) for c in p])
        fq = np.array([float(c) for c in q])
        lo, hi = np.minimum(fp, fq) - self._float_tol, np.maximum(fp, fq) + self._float_tol
        x = self._float_nodes
        return np.flatnonzero(np.all((x >= lo) & (x <= hi), axis=1))

    def edge_points(self, k: int) -> tuple[Point, Point]:
        i, j = self.edges[k]
        return self.nodes[i], self.nodes[j]

    def neighbors(self) -> dict[int, list[tuple[int, int]]]:
        """Node -> sorted list of ``(neighbor node, edge)``."""
        adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(self.nodes))}
        for k, (i, j) in enumerate(self.edges):
            adj[i].append((j, k))
            adj[j].append((i, k))
        for v in adj.values():
            v.sort()
        return adj

    def edge_sequence(self, loop: PolyLoop | PolyPath) -> tuple[tuple[int, int], ...]:
        """Express a path carried by this arrangement as signed edges.

        Raises ``ValueError`` if some segment is not a union of edges.
        """
        out = []
        for p, q in loop.segments():
            d = _sub(q, p)
            on = [
                (_param(p, d, self.nodes[i]), int(i))
                for i in self._near_nodes(p, q)
                if point_on_segment(self.nodes[i], p, q)
            ]
            on.sort()
            if not on or on[0][0] != 0 or on[-1][0] != 1:
                raise ValueError(f"segment {p}->{q} is not carried by the arrangement")
            for (_, a), (_, b) in zip(on, on[1:]):
                key = (a, b) if a < b else (b, a)
                if key not in self.edge_index:
                    raise ValueError(f"segment {p}->{q} is not carried by the arrangement")
                out.append((self.edge_index[key], 1 if a < b else -1))
        return tuple(out)

    def check(self) -> bool:
        """Exact check that edge interiors are pairwise disjoint."""
        for a in range(len(self.edges)):
            p, q = self.edge_points(a)
            for b in range(a + 1, len(self.edges)):
                r, s = self.edge_points(b)
                if not _bbox_overlap(p, q, r, s):
                    continue
                x = segment_intersection(p, q, r, s)
                if x is None:
                    continue
                if isinstance(x[0], tuple):
                    return False
                if x not in (p, q) or x not in (r, s):
                    return False
        return True


def build_arrangement(paths: Sequence[PolyPath | PolyLoop]) -> Arrangement:
    """Cut a family of PL paths at all mutual intersections."""
    segs: list[tuple[Point, Point]] = []
    owner: list[int] = []
    for m, path in enumerate(paths):
        for p, q in path.segments():
            segs.append((p, q))
            owner.append(m)
    on_seg: list[set[Point]] = [{p, q} for p, q in segs]
    for a in range(len(segs)):
        p, q = segs[a]
        for b in range(a + 1, len(segs)):
            r, s = segs[b]
            if not _bbox_overlap(p, q, r, s):
                continue
            x = segment_intersection(p, q, r, s)
            if x is None:
                continue
            pts = x if isinstance(x[0], tuple) else (x,)
            on_seg[a].update(pts)
            on_seg[b].update(pts)
    nodes = tuple(sorted(set().union(*on_seg))) if segs else ()
    nidx = {p: i for i, p in enumerate(nodes)}
    edges: dict[tuple[int, int], int] = {}
    per_path: list[list[tuple[int, int]]] = [[] for _ in paths]
    for a, (p, q) in enumerate(segs):
        d = _sub(q, p)
        chain = sorted(on_seg[a], key=lambda x: _param(p, d, x))
        for x, y in zip(chain, chain[1:]):
            i, j = nidx[x], nidx[y]
            key = (min(i, j), max(i, j))
            k = edges.setdefault(key, len(edges))
            per_path[owner[a]].append((k, 1 if i < j else -1))
    # renumber edges in sorted key order for determinism
    order = sorted(edges, key=lambda e: e)
    renum = {edges[e]: n for n, e in enumerate(order)}
    return Arrangement(
        nodes=nodes,
        edges=tuple(order),
        path_edges=tuple(tuple((renum[k], s) for k, s in pe) for pe in per_path),
    )


def reduce_edge_sequence(seq: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Cancel immediate backtracks ``(e, s), (e, -s)``."""
    stack: list[tuple[int, int]] = []
    for e, s in seq:
        if stack and stack[-1] == (e, -s):
            stack.pop()
        else:
            stack.append((e, s))
    return tuple(stack)


# ---------------------------------------------------------------------------
# Decomposition


@dataclass(frozen=True)
class Generator:
    """Loop ``tree path -> marked edge -> tree path back`` based at the root.

    ``marked`` is the closed sub-segment of the non-tree edge inside the
    clearance ball of radius ``clearance`` about the edge midpoint; the ball
    meets the arrangement only in this edge.
    """

    edge: int
    tail: int
    head: int
    to_tail: tuple[int, ...]
    from_head: tuple[int, ...]
    vertices: tuple[Point, ...]
    clearance: Fraction
    marked: tuple[Point, Point]

    @property
    def loop(self) -> PolyLoop:
        return PolyLoop(self.vertices[0], self.vertices)

    @property
    def midpoint(self) -> Point:
        a, b = self.marked
        return tuple((x + y) / 2 for x, y in zip(a, b))


@dataclass(frozen=True)
class Decomposition:
    basepoint: Point
    arrangement: Arrangement
    tree_edges: frozenset[int]
    generators: tuple[Generator, ...]
    word: Word
    loop_edges: tuple[tuple[int, int], ...] = ()

    @property
    def generator_of_edge(self) -> dict[int, tuple[int, int]]:
        """Non-tree edge -> ``(generator number, orientation sign)``."""
        out = {}
        for n, g in enumerate(self.generators, start=1):
            i, j = self.arrangement.edges[g.edge]
            out[g.edge] = (n, 1 if (g.tail, g.head) == (i, j) else -1)
        return out

    def transcribe(self, loop: PolyLoop) -> Word:
        """Word of any loop carried by this decomposition's arrangement."""
        if loop.basepoint != self.basepoint:
            raise BasepointMismatch(f"{loop.basepoint} != {self.basepoint}")
        seq = self.arrangement.edge_sequence(loop) if not loop.is_constant else ()
        gen = self.generator_of_edge
        letters = []
        for e, s in seq:
            if e in gen:
                n, o = gen[e]
                letters.append(n * s * o)
            elif e not in self.tree_edges:
                raise ValueError(f"edge {e} has no generator")
        return reduce(letters)

    # -- export format -----------------------------------------------------
    def to_dict(self) -> dict:
        arr = self.arrangement
        return {
            "format": "hoops-decomposition/1",
            "basepoint": _fmt_point(self.basepoint),
            "nodes": [_fmt_point(p) for p in arr.nodes],
            "edges": [list(e) for e in arr.edges],
            "tree_edges": sorted(self.tree_edges),
            "loop_edges": [list(x) for x in self.loop_edges],
            "word": self.word.to_list(),
            "generators": [
                {
                    "edge": g.edge,
                    "tail": g.tail,
                    "head": g.head,
                    "to_tail": list(g.to_tail),
                    "from_head": list(g.from_head),
                    "clearance": str(g.clearance),
                    "marked": [_fmt_point(g.marked[0]), _fmt_point(g.marked[1])],
                }
                for g in self.generators
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "Decomposition":
        nodes = tuple(as_point(p) for p in data["nodes"])
        loop_edges = tuple((int(e), int(s)) for e, s in data.get("loop_edges", []))
        arr = Arrangement(
            nodes=nodes,
            edges=tuple((int(i), int(j)) for i, j in data["edges"]),
            path_edges=(loop_edges,),
        )
        gens = []
        for g in data["generators"]:
            to_tail = tuple(int(x) for x in g["to_tail"])
            from_head = tuple(int(x) for x in g["from_head"])
            gens.append(
                Generator(
                    edge=int(g["edge"]),
                    tail=int(g["tail"]),
                    head=int(g["head"]),
                    to_tail=to_tail,
                    from_head=from_head,
                    vertices=tuple(nodes[i] for i in to_tail + from_head),
                    clearance=Fraction(g["clearance"]),
                    marked=(as_point(g["marked"][0]), as_point(g["marked"][1])),
                )
            )
        return cls(
            basepoint=as_point(data["basepoint"]),
            arrangement=arr,
            tree_edges=frozenset(int(x) for x in data["tree_edges"]),
            generators=tuple(gens),
            word=Word(data["word"]),
            loop_edges=loop_edges,
        )

    @classmethod
    def loads(cls, text: str) -> "Decomposition":
        return cls.from_dict(json.loads(text))


def _spanning_tree(arr: Arrangement, root: int, method: str, seed: int):
    """Parent pointers ``node -> (parent, edge)`` of a spanning tree."""
    adj = arr.neighbors()
    parent: dict[int, tuple[int, int] | None] = {root: None}
    if method == "bfs":
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, k in adj[v]:
                if w not in parent:
                    parent[w] = (v, k)
                    queue.append(w)
    elif method in ("dfs", "random"):
        rng = random.Random(seed)
        stack = [(root, None)]
        seen = set()
        while stack:
            v, via = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            parent[v] = via
            nbrs = list(adj[v])
            if method == "random":
                rng.shuffle(nbrs)
            else:
                nbrs.reverse()  # pop order follows sorted neighbor order
            for w, k in nbrs:
                if w not in seen:
                    stack.append((w, (v, k)))
    else:
        raise ValueError(f"unknown spanning-tree method {method!r}")
    return parent


def _root_path(parent, v: int) -> list[int]:
    out = [v]
    while parent[v] is not None:
        v = parent[v][0]
        out.append(v)
    return out[::-1]


def _clearance(arr: Arrangement, k: int) -> tuple[Fraction, tuple[Point, Point]]:
    p, q = arr.edge_points(k)
    mid = tuple((a + b) / 2 for a, b in zip(p, q))
    # float distances shortlist the edges that can attain the exact minimum
    others = [m for m in range(len(arr.edges)) if m != k]
    best = None
    if others:
        x = arr._float_nodes
        e = np.array([arr.edges[m] for m in others])
        a, b = x[e[:, 0]], x[e[:, 1]]
        fm = np.array([float(c) for c in mid])
        d = b - a
        t = np.clip(np.einsum("ij,ij->i", fm - a, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
        fd = np.sum((fm - a - t[:, None] * d) ** 2, axis=1)
        close = np.flatnonzero(fd <= fd.min() + arr._float_tol)
        best = min(_sqdist_point_segment(mid, *arr.edge_points(others[i])) for i in close)
    half2 = _dot(_sub(q, p), _sub(q, p)) / 4
    if best is None or best > half2:
        best = half2
    r = Fraction(math.sqrt(float(best)) * 0.9).limit_denominator(1 << 30)
    while r * r >= best or r <= 0:
        r = r * Fraction(9, 10) if r > 0 else Fraction(math.sqrt(float(best))) / 2
    # sub-segment of the edge inside the ball
    length2 = 4 * half2
    h = Fraction(float(r) / math.sqrt(float(length2)) * 0.999).limit_denominator(1 << 30)
    while h * h * length2 > r * r:
        h *= Fraction(9, 10)
    d = _sub(q, p)
    a = tuple(m - h * x for m, x in zip(mid, d))
    b = tuple(m + h * x for m, x in zip(mid, d))
    return r, (a, b)


def decompose(loop: PolyLoop, tree: str = "bfs", seed: int = 0) -> Decomposition:
    """Write ``loop`` as a word in independent generator loops.

    ``tree`` selects the spanning-tree heuristic: ``"bfs"`` (default,
    lexicographic neighbor order), ``"dfs"`` or ``"random"`` (seeded).
    Generator ``e_n`` is the ``n``-th distinct non-tree edge met by the loop,
    oriented along its first traversal.
    """
    o = loop.basepoint
    if loop.is_constant:
        arr = Arrangement(nodes=(o,), edges=(), path_edges=((),))
        return Decomposition(o, arr, frozenset(), (), Word(), ())
    arr = build_arrangement([loop.path])
    root = arr.node_index[o]
    parent = _spanning_tree(arr, root, tree, seed)
    tree_edges = frozenset(v[1] for v in parent.values() if v is not None)
    seq = arr.path_edges[0]
    gens: list[Generator] = []
    number: dict[int, tuple[int, int]] = {}
    letters = []
    for e, s in seq:
        if e in tree_edges:
            continue
        if e not in number:
            i, j = arr.edges[e]
            tail, head = (i, j) if s > 0 else (j, i)
            to_tail = tuple(_root_path(parent, tail))
            from_head = tuple(_root_path(parent, head)[::-1])
            r, marked = _clearance(arr, e)
            verts = tuple(arr.nodes[x] for x in to_tail + from_head)
            gens.append(Generator(e, tail, head, to_tail, from_head, verts, r, marked))
            number[e] = (len(gens), s)
        n, first = number[e]
        letters.append(n if s == first else -n)
    return Decomposition(o, arr, tree_edges, tuple(gens), reduce(letters), seq)


def evaluate_word(dec: Decomposition, word: Word | Sequence[int]) -> PolyLoop:
    """Substitute generator loops into ``word`` and compose."""
    out = PolyLoop.constant(dec.basepoint)
    for x in word:
        g = dec.generators[abs(x) - 1].loop
        out = compose(out, g if x > 0 else invert_loop(g))
    return out


def is_independent(dec: Decomposition) -> bool:
    """Exact check of independence of the generator loops.

    Each generator must contain its marked segment in exactly one of its PL
    segments, no other segment of that generator may touch the marked
    segment away from its endpoints, and marked segments must be pairwise
    disjoint.
    """
    gens = dec.generators
    for g in gens:
        u, v = g.marked
        if u == v:
            return False
        hits = 0
        for p, q in g.loop.segments():
            if not _bbox_overlap(p, q, u, v):
                continue
            x = segment_intersection(p, q, u, v)
            if x is None:
                continue
            if isinstance(x[0], tuple):
                if set(x) == {u, v}:
                    hits += 1
                else:
                    return False
            elif x not in (u, v):
                return False
        if hits != 1:
            return False
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            if segment_intersection(*gens[a].marked, *gens[b].marked) is not None:
                return False
    return True


def loop_equal(a: PolyLoop, b: PolyLoop) -> bool:
    """Equality in the group of loops (retracing and reparameterization)."""
    return len(decompose(compose(a, invert_loop(b))).word) == 0
