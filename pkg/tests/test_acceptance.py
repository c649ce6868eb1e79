"""Acceptance suite: ten end-to-end criteria, each with a tolerance and a time limit.

Every test prints one ``PASS``/``FAIL`` line (shown even under capture) and
then asserts both the property and the time budget.
"""

import math
import time

import numpy as np
import pytest

from _support import CancellationOracle, all_words, brute_reduce, random_loop, random_reduced_word
from hoops.gauge import SO3, SU2, U1, group_distance, random_connection, transport
from hoops.geom import PolyLoop, compose, decompose, evaluate_word, invert_loop, is_independent, reduce_edge_sequence
from hoops.pathology import (
    BumpAtom,
    GraphCurve,
    MollifierSpec,
    closeness_sequence,
    cn_distance,
    counterexample_family,
    flatten_loop,
    interpolating_homotopy,
    mollify,
    smallness_width,
)
from hoops.synth import falsify_hoop_triviality, group_class, synthesize
from hoops.words import (
    ABELIAN,
    Word,
    commutator,
    evaluate_matrices,
    exponent_vector,
    invert,
    is_identity,
    multiply,
    reduce,
    reduce_batch,
    so3_sampler,
    su2_sampler,
    witness_search,
)


def report(capsys, k, ok, elapsed, limit, detail=""):
    verdict = "PASS" if ok and elapsed <= limit else "FAIL"
    with capsys.disabled():
        print(f"\n{verdict} criterion {k:2d}: {detail} [{elapsed:.1f}s / {limit}s]")
    assert ok, detail
    assert elapsed <= limit, f"took {elapsed:.1f}s, limit {limit}s"


# ---------------------------------------------------------------------------


def test_c01_free_group_oracle(capsys):
    t0 = time.perf_counter()
    oracle = CancellationOracle(table_len=8)
    total, bad = 0, 0
    for n in range(11):
        for words, keys in oracle.blocks(n):
            red, lengths = reduce_batch(words)
            bad += int(np.count_nonzero(oracle.keys(red, lengths) != keys))
            total += len(words)
    # the scalar path against the naive closure on short words
    for w in all_words(6, 3):
        bad += reduce(w).to_list() != list(brute_reduce(w))
    elapsed = time.perf_counter() - t0
    report(capsys, 1, bad == 0 and total == sum(6**n for n in range(11)), elapsed, 10, f"{total} words, {bad} mismatches")


def test_c02_abelian_identities(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    # oracle: value under random commuting (diagonal unitary) matrices
    diag = {g: np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 2))) for g in range(1, 5)}
    bad = 0
    for i in range(1000):
        w = rng.choice([1, -1, 2, -2, 3, -3, 4, -4], size=rng.integers(0, 14)).tolist()
        if i % 2:  # half with zero exponent vector by construction
            w = w + list(-rng.permutation(w))
        w = Word(w)
        val = evaluate_matrices(w, diag) if len(reduce(w)) else np.eye(2)
        oracle = np.abs(val - np.eye(2)).max() < 1e-9
        bad += is_identity(w, ABELIAN) != oracle
        bad += is_identity(w, ABELIAN) != (exponent_vector(w) == {})
    for _ in range(500):
        a, b, c = (Word(random_reduced_word(rng, 6, 4)) for _ in range(3))
        inst = commutator(a, b)
        bad += not is_identity(inst, ABELIAN)
        bad += not is_identity(multiply(multiply(c, inst), invert(c)), ABELIAN)
    elapsed = time.perf_counter() - t0
    report(capsys, 2, bad == 0, elapsed, 5, f"1000 words + 1000 commutator instances, {bad} disagreements")


def test_c03_nonsolvable_witnesses(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    found, worst = 0, math.inf
    for i in range(100):
        w = []
        while not w:
            w = random_reduced_word(rng, 12, 4)
        wit = witness_search(Word(w), so3_sampler, trials=200, tol=1e-6, seed=i)
        if wit is not None and wit.distance > 1e-6:
            found += 1
            worst = min(worst, wit.distance)
    elapsed = time.perf_counter() - t0
    report(capsys, 3, found == 100, elapsed, 60, f"{found}/100 witnesses, smallest distance {worst:.3g}")


def test_c04_decomposition_roundtrip(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    bad = 0
    for i in range(200):
        dec = decompose(random_loop(rng, dim=2 + i % 2, max_edges=40))
        e = evaluate_word(dec, dec.word)
        got = () if e.is_constant else reduce_edge_sequence(dec.arrangement.edge_sequence(e))
        bad += got != reduce_edge_sequence(dec.loop_edges)
        bad += not is_independent(dec)
    elapsed = time.perf_counter() - t0
    report(capsys, 4, bad == 0, elapsed, 60, f"200 loops (d=2,3), {bad} failures")


def _convergence_ratio(spec, steps):
    box = ((-1.5, -1.5), (1.5, 1.5))
    loop = PolyLoop.through((0, 0), (1, 0), (1, 1), (0, 0), (-1, 0), (-1, -1))
    A = random_connection(spec, box, 4, seed=0, radius_range=(1.0, 1.5), coeff_scale=2.0)
    ref = transport(A, loop, steps=20 * steps, estimate_error=False).matrix
    e1 = np.linalg.norm(transport(A, loop, steps=steps, estimate_error=False).matrix - ref, 2)
    e2 = np.linalg.norm(transport(A, loop, steps=2 * steps, estimate_error=False).matrix - ref, 2)
    return e1 / e2


def test_c05_holonomy_algebra(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    rho = PolyLoop.through((0, 0), (2, 1), ("1/3", 3))
    worst = 0.0
    for spec in (U1, SO3):
        for k in range(50):
            a, b = random_loop(rng, max_edges=12), random_loop(rng, max_edges=12)
            A = random_connection(spec, ((-3, -3), (3, 3)), 6, seed=k, radius_range=(0.5, 2.0))
            ha = transport(A, a, steps=64, estimate_error=False)
            hb = transport(A, b, steps=64, estimate_error=False)
            hom = group_distance(transport(A, compose(a, b), steps=64, estimate_error=False), ha @ hb)
            inv = group_distance(transport(A, invert_loop(a), steps=64, estimate_error=False), ha.inverse())
            ret = compose(compose(a, compose(rho, invert_loop(rho))), b)
            rtr = group_distance(transport(A, ret, steps=64, estimate_error=False), ha @ hb)
            worst = max(worst, hom, inv, rtr)
    ratios = [_convergence_ratio(spec, 16) for spec in (SO3, SU2)]
    ok = worst < 1e-8 and all(12 <= r <= 20 for r in ratios)
    elapsed = time.perf_counter() - t0
    report(capsys, 5, ok, elapsed, 120, f"max residual {worst:.2e}, convergence ratios {', '.join(f'{r:.2f}' for r in ratios)}")


def _u1_sampler(rng):
    return np.array([[np.exp(1j * rng.uniform(-np.pi, np.pi))]])


def test_c06_synthesis_roundtrip(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst, cases = 0.0, 0
    for spec, sampler in ((U1, _u1_sampler), (SO3, so3_sampler), (SU2, su2_sampler)):
        done = 0
        while done < 8:
            loop = random_loop(rng, max_edges=12)
            dec = decompose(loop)
            if not 1 <= len(dec.generators) <= 4:
                continue
            targets = [sampler(rng) for _ in dec.generators]
            syn = synthesize(dec, targets, spec)
            for gen, t in zip(dec.generators, targets):
                worst = max(worst, group_distance(transport(syn.connection, gen.loop), t))
            expected = evaluate_matrices(dec.word, dict(enumerate(targets, 1))) if len(dec.word) else spec.identity()
            worst = max(worst, group_distance(transport(syn.connection, loop), expected))
            done += 1
            cases += 1
    elapsed = time.perf_counter() - t0
    report(capsys, 6, worst < 1e-6, elapsed, 120, f"{cases} decompositions, max target error {worst:.2e}")


def _fixture_loops():
    """Thirty loops built from three disjoint triangles and a square, via words."""
    base = [
        PolyLoop.through((0, 0), (1, 0), (1, 1)),
        PolyLoop.through((0, 0), (-1, 0), (-1, -1)),
        PolyLoop.through((0, 0), (0, 2), (-1, 2)),
        PolyLoop.through((0, 0), (1, -1), (2, -1), (2, -2)),
    ]
    inv = [invert_loop(x) for x in base]

    def loop(letters):
        out = None
        for x in letters:
            piece = base[x - 1] if x > 0 else inv[-x - 1]
            out = piece if out is None else compose(out, piece)
        return out if out is not None else PolyLoop.constant((0, 0))

    words = [
        [], [1], [1, -1], [1, 2], [1, 2, -1, -2], [2, 1, -2, -1], [1, 1], [1, 2, -1],
        [1, 2, -1, -2, 3, 4, -3, -4], [1, 2, 3, -1, -2, -3], [1, 2, -2, -1], [3],
        [1, 3, -1, -3], [1, 2, -1, -2, 2, 1, -2, -1], [1, -2], [4, 1, -4, -1],
        [1, 2, -1, -2, 1, 3, -1, -3], [1, 1, -1, -1], [2, 3, 4, -2, -3, -4], [1, 2, 3, 4],
        [1, 2, 2, -1, -2, -2], [3, -3, 3], [1, 2, -1, 3, -2, -3], [4, -4],
        [1, 2, 1, -2, -1, -1], [2, 2, 3, -2, -2, -3], [1, 2, 3, -3, -2, -1, 4], [1, -1, 2, -2, 3],
        [4, 3, -4, -3, 4], [1, 2, 3, 1, -2, -1, -3, -1],
    ]
    return [loop(w) for w in words]


def test_c07_main_theorem_bidirectional(capsys):
    t0 = time.perf_counter()
    loops = _fixture_loops()
    bad, witnesses, classes = 0, 0, {"trivial": 0, "nontrivial": 0}
    for spec in (U1, SO3, SU2):
        for i, loop in enumerate(loops):
            res = falsify_hoop_triviality(loop, spec, seed=i)
            expected = is_identity(res.decomposition.word, group_class(spec))
            bad += res.trivial != expected
            classes[res.verdict] += 1
            if not res.trivial:
                ok = res.holonomy.distance_to_identity() > 1e-6 and group_distance(transport(res.connection, loop), res.predicted) < 1e-6
                witnesses += ok
                bad += not ok
    elapsed = time.perf_counter() - t0
    detail = f"30 loops x 3 groups, {classes['trivial']} trivial / {classes['nontrivial']} nontrivial, {witnesses} verified witnesses, {bad} failures"
    report(capsys, 7, bad == 0 and min(classes.values()) > 0, elapsed, 120, detail)


def test_c08_counterexample(capsys):
    t0 = time.perf_counter()
    worst, bad = 0.0, 0
    for levels in range(2, 9):
        ce = counterexample_family(levels)
        for seed in range(100):
            A = random_connection(U1, ((0, -0.2), (1, 0.2)), 8, seed=1000 * levels + seed, radius_range=(0.05, 0.5))
            worst = max(worst, transport(A, ce.loop, estimate_error=False).distance_to_identity())
        dec = decompose(flatten_loop(ce.loop))
        bad += not (len(dec.word) > 0 and exponent_vector(dec.word) == {})
    elapsed = time.perf_counter() - t0
    report(capsys, 8, worst < 1e-6 and bad == 0, elapsed, 120, f"levels 2..8 x 100 U1 connections, max |H-1| {worst:.2e}, {bad} bad words")


def test_c09_deformation(capsys):
    t0 = time.perf_counter()
    ce = counterexample_family(8)
    c, N = 4, 4
    x = np.linspace(0, 1, 20001)
    before = [f(x) for f in ce.curves]
    ok, notes = True, []
    for eps in (1e-2, 1e-3):
        w = smallness_width(ce.curves, 0.0, eps, N)
        out = mollify(ce.curves, MollifierSpec((0.0,), (w["delta"],)))
        dist = max(cn_distance(f, g, N).value for f, g in zip(ce.curves, out))
        ok &= dist <= 2.0 ** (2 ** (c + 1)) * eps
        after = [g(x) for g in out]
        for i in range(4):
            for j in range(i + 1, 4):
                eq = before[i] == before[j]
                ok &= bool(np.array_equal(after[i][eq], after[j][eq]))
        tag = " degenerate" if w["degenerate"] else ""
        notes.append(f"eps={eps:g}: delta=2^{int(math.log2(w['delta']))}{tag}, dist {dist:.2e}")
    elapsed = time.perf_counter() - t0
    report(capsys, 9, ok, elapsed, 60, "; ".join(notes))


def test_c10_homotopy_bound(capsys):
    t0 = time.perf_counter()
    gamma = GraphCurve((BumpAtom(1, 0.3), BumpAtom(2, -0.2)), 1.0)
    pert = GraphCurve((BumpAtom(1, 1.0, 1), BumpAtom(3, 0.5, 5)), 1.0)
    phi = interpolating_homotopy(gamma, closeness_sequence(gamma, pert, 9, min_order=3))
    rep = phi.verify_bounds(max_order=3, all_orders=True)
    worst = max(r["max"] / r["bound"] for r in rep["rows"])
    elapsed = time.perf_counter() - t0
    report(capsys, 10, rep["ok"], elapsed, 30, f"{len(rep['rows'])} (n, k, l) bands, n <= 8, k + l <= 3, worst max/bound {worst:.2e}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
