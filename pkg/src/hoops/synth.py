"""Connections with prescribed holonomies around independent loops.

For each generator a few bump terms are placed on its once-traced edge,
inside the certified clearance ball, with a constant Lie-algebra direction.
Along the edge the form is ``X * phi(t) dt`` with commuting values, so the
holonomy is ``exp(X * integral(phi))`` and calibration reduces to a scalar
line integral. Every other generator avoids the ball and sees nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gauge import (
    DEFAULT_STEPS,
    SL2R,
    SO3,
    SU2,
    U1,
    BumpTerm,
    Connection,
    Holonomy,
    LieGroupSpec,
    bump_line_integral,
    group_distance,
    transport,
)
from .geom import Decomposition, PolyLoop, decompose, is_independent
from .words import ABELIAN, NONSOLVABLE, Word, evaluate_matrices, exponent_vector, is_identity, so3_sampler, su2_sampler, witness_search

__all__ = [
    "log_map",
    "SynthesisError",
    "synthesize",
    "Synthesis",
    "group_class",
    "FalsificationResult",
    "falsify_hoop_triviality",
    "U1_WITNESS_ANGLE",
]

# bumps carrying larger logarithms are split so RK4 at default steps stays well under 1e-6
MAX_LOG_NORM = math.pi / 2
U1_WITNESS_ANGLE = 1.0


def _so3_log(R: np.ndarray) -> np.ndarray:
    v = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]]) / 2  # sin(theta) n
    c = (np.trace(R) - 1) / 2
    theta = math.atan2(float(np.linalg.norm(v)), c)
    if theta < 1e-8:
        return (R - R.T) / 2
    if theta < math.pi / 2:
        n = v / np.linalg.norm(v)
    else:
        # (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) n n^T, well conditioned near pi
        M = ((R + R.T) / 2 - c * np.eye(3)) / (1 - c)
        k = int(np.argmax(np.diag(M)))
        n = M[:, k] / math.sqrt(M[k, k])
        if v @ n < 0:
            n = -n
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return theta * K


def _su2_log(g: np.ndarray) -> np.ndarray:
    c = float(np.real(np.trace(g))) / 2
    N = g - c * np.eye(2)  # sin(phi) times a unit element of the algebra
    sn = float(np.linalg.norm(N)) / math.sqrt(2)
    phi = math.atan2(sn, c)
    if phi < 1e-8:
        return (g - g.conj().T) / 2
    if sn < 1e-12:
        return np.array([[1j * math.pi, 0], [0, -1j * math.pi]])
    return phi / sn * N


def _sl2_log(g: np.ndarray) -> np.ndarray | None:
    """Real logarithm of ``g`` in SL(2,R), or ``None`` outside the exp image."""
    c = float(np.trace(g)) / 2
    N = g - c * np.eye(2)  # traceless, N @ N = (c^2 - 1) I
    if c > 1 + 1e-12:
        th = math.acosh(c)
        return th / math.sinh(th) * N
    if c > 1 - 1e-12:
        return N
    if c > -1 + 1e-12:
        th = math.acos(c)
        return th / math.sin(th) * N
    if np.allclose(g, -np.eye(2), atol=1e-10):
        return math.pi * np.array([[0.0, -1.0], [1.0, 0.0]])
    return None


def log_map(g, spec: LieGroupSpec):
    """Lie-algebra preimage of ``g``.

    Returns one matrix ``X`` with ``exp(X) = g`` (principal branch), or for
    SL(2,R) elements outside the exponential image a pair ``(X1, X2)`` with
    ``exp(X1) exp(X2) = g``.
    """
    g = np.asarray(g, dtype=spec.dtype)
    if spec.residual(g) > 1e-10:
        raise ValueError(f"matrix is not in {spec} (residual {spec.residual(g):.2e})")
    if spec is U1:
        return np.array([[1j * np.angle(g[0, 0])]])
    if spec is SO3:
        return _so3_log(g)
    if spec is SU2:
        return _su2_log(g)
    if spec is SL2R:
        X = _sl2_log(g)
        if X is not None:
            return X
        # g = (-I)(-g) and -g has trace >= 2, so it is an exponential
        X1 = math.pi * np.array([[0.0, -1.0], [1.0, 0.0]])
        return (X1, _sl2_log(-g))
    raise ValueError(f"no logarithm for {spec}")


class SynthesisError(ValueError):
    pass


@dataclass
class Synthesis:
    connection: Connection
    targets: list[np.ndarray]
    provenance: list[dict] = field(default_factory=list)

    def provenance_record(self) -> dict:
        return {"group": self.connection.spec.name, "generators": self.provenance}


def _split_logs(logs: list[np.ndarray]) -> list[np.ndarray]:
    pieces = []
    for X in logs:
        k = max(1, math.ceil(np.linalg.norm(X, 2) / MAX_LOG_NORM - 1e-12))
        pieces += [X / k] * k
    return pieces


def synthesize(
    dec: Decomposition,
    targets,
    spec: LieGroupSpec,
    min_clearance: float = 1e-9,
    check: bool = True,
) -> Synthesis:
    """Connection with holonomy ``targets[i]`` around generator ``i + 1``."""
    if len(targets) != len(dec.generators):
        raise SynthesisError(f"expected {len(dec.generators)} targets, got {len(targets)}")
    if check and not is_independent(dec):
        raise SynthesisError("decomposition generators are not independent")
    dim = len(dec.basepoint)
    terms: list[BumpTerm] = []
    prov = []
    targets = [np.asarray(t, dtype=spec.dtype) for t in targets]
    for n, (g, target) in enumerate(zip(dec.generators, targets), start=1):
        r = float(g.clearance)
        if r < min_clearance:
            raise SynthesisError(f"generator e{n}: clearance {r:.3g} below minimum {min_clearance:.3g}")
        if np.allclose(target, spec.identity(), atol=1e-14):
            prov.append({"generator": n, "edge": g.edge, "terms": [], "target": _enc(target)})
            continue
        logs = log_map(target, spec)
        logs = list(logs) if isinstance(logs, tuple) else [logs]
        pieces = _split_logs(logs)
        k = len(pieces)
        tail = np.array(g.vertices[len(g.to_tail) - 1], dtype=float)
        head = np.array(g.vertices[len(g.to_tail)], dtype=float)
        u = (head - tail) / np.linalg.norm(head - tail)
        mid = np.array(g.midpoint, dtype=float)
        axis = int(np.argmax(np.abs(u)))
        rho = 0.9 * r / k
        first = len(terms)
        for j, X in enumerate(pieces):
            center = mid + u * r * ((2 * j + 1) / k - 1)
            coeff = X / (u[axis] * bump_line_integral(rho))
            terms.append(BumpTerm(center, rho, axis, coeff))
        prov.append({"generator": n, "edge": g.edge, "terms": list(range(first, len(terms))), "target": _enc(target)})
    return Synthesis(Connection(spec, dim, tuple(terms)), targets, prov)


def _enc(m):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(z) for z in row] for row in m]


# ---------------------------------------------------------------------------
# Hoop triviality


def group_class(spec: LieGroupSpec):
    return ABELIAN if spec.abelian else NONSOLVABLE


def _sl2r_sampler(rng):
    a = SL2R.exp(SL2R.random_algebra(rng))
    b = SL2R.exp(SL2R.random_algebra(rng))
    return a @ b


_SAMPLERS = {"SO3": so3_sampler, "SU2": su2_sampler, "SL2R": _sl2r_sampler}


@dataclass
class FalsificationResult:
    verdict: str  # "trivial" or "nontrivial"
    decomposition: Decomposition
    connection: Connection | None = None
    holonomy: Holonomy | None = None
    targets: list[np.ndarray] | None = None
    predicted: np.ndarray | None = None
    synthesis: Synthesis | None = None

    @property
    def trivial(self) -> bool:
        return self.verdict == "trivial"


def falsify_hoop_triviality(
    loop: PolyLoop,
    spec: LieGroupSpec,
    seed: int = 0,
    steps: int = DEFAULT_STEPS,
    trials: int = 200,
) -> FalsificationResult:
    """Decide hoop triviality of ``loop`` for ``spec`` and build a witness.

    If the loop's word is not an identity of the group class, a connection
    is synthesized whose holonomy around the loop is verified to differ
    from the identity by more than ``1e-6``.
    """
    dec = decompose(loop)
    w = dec.word
    if is_identity(w, group_class(spec)):
        return FalsificationResult("trivial", dec)
    ngen = len(dec.generators)
    targets = [spec.identity() for _ in range(ngen)]
    if spec.abelian:
        j = next(iter(exponent_vector(w)))
        targets[j - 1] = spec.exp(U1_WITNESS_ANGLE * spec.basis[0])
    else:
        wit = None
        for attempt in range(8):
            wit = witness_search(w, _SAMPLERS[spec.name], trials=trials, tol=1e-3, seed=seed + attempt)
            if wit is not None:
                break
        if wit is None:
            raise RuntimeError("no witness found for a freely nontrivial word")
        for n, m in wit.assignment.items():
            targets[n - 1] = spec.project(m)
    syn = synthesize(dec, targets, spec)
    hol = transport(syn.connection, loop, steps)
    predicted = evaluate_matrices(Word(w), {n: t for n, t in enumerate(targets, start=1)}) if len(w) else spec.identity()
    if hol.distance_to_identity() <= 1e-6:
        raise RuntimeError("synthesized witness failed verification")
    return FalsificationResult("nontrivial", dec, syn.connection, hol, targets, predicted, syn)
