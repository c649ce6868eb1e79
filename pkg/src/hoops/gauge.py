"""Matrix Lie groups, bump-form connections on R^d, and parallel transport.

Transport solves ``U'(t) = U(t) A(gamma(t))[gamma'(t)]`` with ``U(0) = I``
using classical fourth-order Runge-Kutta. With this right-accumulating
convention the holonomy of a product of loops is the product of holonomies,
``H(ab) = H(a) H(b)``.

Each straight segment is integrated in a canonical direction (from its
lexicographically smaller endpoint) and the propagator is inverted when the
segment is traversed backwards, so retraced segments cancel to roundoff.
Only the part of a segment that meets some bump support is integrated; the
integrand vanishes identically elsewhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .geom import Decomposition, PolyLoop, PolyPath

__all__ = [
    "LieGroupSpec",
    "U1",
    "SU2",
    "SO3",
    "SL2R",
    "GROUPS",
    "get_group",
    "BUMP_ORDER",
    "bump",
    "bump_line_integral",
    "BumpTerm",
    "Connection",
    "Holonomy",
    "transport",
    "holonomy_of_word",
    "random_connection",
    "group_distance",
]

DEFAULT_STEPS = 64


# ---------------------------------------------------------------------------
# Groups


@dataclass(frozen=True, eq=False)
class LieGroupSpec:
    name: str
    n: int
    dtype: type
    basis: tuple[np.ndarray, ...]
    abelian: bool = False

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=self.dtype)

    def exp(self, X) -> np.ndarray:
        return expm(np.asarray(X, dtype=self.dtype))

    def in_algebra(self, X, tol=1e-12) -> bool:
        X = np.asarray(X)
        if X.shape != (self.n, self.n):
            return False
        if self.name in ("U1", "SU2"):
            ok = np.allclose(X + X.conj().T, 0, atol=tol)
            return ok and (self.name == "U1" or abs(np.trace(X)) < tol)
        if self.name == "SO3":
            re = np.real(X)
            return np.allclose(np.imag(X), 0, atol=tol) and np.allclose(re + re.T, 0, atol=tol)
        if self.name == "SL2R":
            return np.allclose(np.imag(X), 0, atol=tol) and abs(np.trace(X)) < tol
        return False

    def residual(self, g) -> float:
        """Distance of ``g`` from satisfying the group's defining equations."""
        g = np.asarray(g)
        det_err = abs(np.linalg.det(g) - 1)
        if self.name == "U1":
            return float(abs(abs(g[0, 0]) - 1))
        if self.name == "SL2R":
            return float(det_err + np.abs(np.imag(g)).max())
        if self.name == "SU2":
            return float(np.linalg.norm(g.conj().T @ g - np.eye(self.n), 2) + det_err)
        return float(np.linalg.norm(g.T @ g - np.eye(self.n), 2) + det_err + np.abs(np.imag(g)).max())

    def project(self, g) -> np.ndarray:
        """Nearest-ish group element: polar factor, then determinant fix."""
        g = np.asarray(g, dtype=self.dtype)
        if self.name == "U1":
            return g / abs(g[0, 0])
        if self.name == "SL2R":
            d = np.linalg.det(g)
            return g / math.sqrt(d) if d > 0 else g
        u, _, vh = np.linalg.svd(g)
        w = u @ vh
        if self.name == "SO3":
            if np.linalg.det(w) < 0:
                u[:, -1] = -u[:, -1]
                w = u @ vh
            return w
        # SU2: remove the determinant phase
        return w / np.sqrt(np.linalg.det(w))

    def random_algebra(self, rng: np.random.Generator, scale=1.0) -> np.ndarray:
        c = rng.standard_normal(len(self.basis)) * scale
        return sum(ci * b for ci, b in zip(c, self.basis))

    def __repr__(self):
        return self.name


def _su2_basis():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return tuple(0.5j * s for s in (sx, sy, sz))


def _so3_basis():
    Lx = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
    Ly = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=float)
    Lz = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
    return (Lx, Ly, Lz)


def _sl2r_basis():
    H = np.array([[1, 0], [0, -1]], dtype=float)
    E = np.array([[0, 1], [0, 0]], dtype=float)
    F = np.array([[0, 0], [1, 0]], dtype=float)
    return (H, E, F)


U1 = LieGroupSpec("U1", 1, complex, (np.array([[1j]]),), abelian=True)
SU2 = LieGroupSpec("SU2", 2, complex, _su2_basis())
SO3 = LieGroupSpec("SO3", 3, float, _so3_basis())
SL2R = LieGroupSpec("SL2R", 2, float, _sl2r_basis())
GROUPS = {g.name: g for g in (U1, SU2, SO3, SL2R)}


def get_group(name: str) -> LieGroupSpec:
    key = name.upper().replace("(", "").replace(")", "").replace(",", "")
    if key not in GROUPS:
        raise ValueError(f"unknown group {name!r}; choose from {sorted(GROUPS)}")
    return GROUPS[key]


# ---------------------------------------------------------------------------
# Bump forms

BUMP_ORDER = 6  # b(s) = (1 - s^2)^(BUMP_ORDER + 1) is C^BUMP_ORDER across s = 1


def bump(s):
    s = np.asarray(s, dtype=float)
    return np.where(s < 1.0, np.clip(1.0 - s * s, 0.0, None) ** (BUMP_ORDER + 1), 0.0)


def bump_line_integral(radius: float) -> float:
    """Integral of ``b(|x-c|/r)`` along a full chord through the center."""
    m = BUMP_ORDER + 1
    return radius * 2.0 ** (2 * m + 1) * math.factorial(m) ** 2 / math.factorial(2 * m + 1)


@dataclass(frozen=True, eq=False)
class BumpTerm:
    """``coeff * b(|x - center| / radius) dx^axis`` (``axis`` is 0-based)."""

    center: np.ndarray
    radius: float
    axis: int
    coeff: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "coeff", np.asarray(self.coeff))
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")
        if not 0 <= self.axis < len(self.center):
            raise ValueError("bump axis out of range")


@dataclass(frozen=True, eq=False)
class Connection:
    spec: LieGroupSpec
    dim: int
    terms: tuple[BumpTerm, ...] = ()

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if len(t.center) != self.dim:
                raise ValueError("bump center dimension mismatch")
            if not self.spec.in_algebra(t.coeff, tol=1e-9):
                raise ValueError(f"bump coefficient not in the Lie algebra of {self.spec}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def zero(cls, spec: LieGroupSpec, dim: int) -> "Connection":
        return cls(spec, dim, ())

    def __add__(self, other: "Connection") -> "Connection":
        if other.spec is not self.spec or other.dim != self.dim:
            raise ValueError("connections live in different bundles")
        return Connection(self.spec, self.dim, self.terms + other.terms)

    def weights(self, x: np.ndarray) -> np.ndarray:
        """Bump profile values, shape ``(n_terms, len(x))``."""
        x = np.atleast_2d(x)
        if not self.terms:
            return np.zeros((0, len(x)))
        c = np.stack([t.center for t in self.terms])
        r = np.array([t.radius for t in self.terms])
        dist = np.linalg.norm(x[None, :, :] - c[:, None, :], axis=-1)
        return bump(dist / r[:, None])

    def form(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``A(x)[v]`` for arrays of points and velocities, shape ``(T, n, n)``."""
        x, v = np.atleast_2d(x), np.atleast_2d(v)
        out = np.zeros((len(x), self.spec.n, self.spec.n), dtype=self.spec.dtype)
        if not self.terms:
            return out
        w = self.weights(x)
        axes = np.array([t.axis for t in self.terms])
        w = w * v[:, axes].T
        X = np.stack([t.coeff for t in self.terms]).astype(self.spec.dtype)
        return np.einsum("kt,kij->tij", w, X)

    # -- file format -------------------------------------------------------
    def to_dict(self) -> dict:
        def enc(m):
            m = np.asarray(m)
            if np.iscomplexobj(m):
                return [[[float(z.real), float(z.imag)] for z in row] for row in m]
            return [[float(z) for z in row] for row in m]

        return {
            "group": self.spec.name,
            "dim": self.dim,
            "terms": [
                {
                    "center": [float(c) for c in t.center],
                    "radius": float(t.radius),
                    "axis": int(t.axis),
                    "coeff": enc(t.coeff),
                }
                for t in self.terms
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "Connection":
        spec = get_group(data["group"])
        terms = []
        for t in data.get("terms", []):
            c = np.array(t["coeff"], dtype=float)
            if c.ndim == 3:
                c = c[..., 0] + 1j * c[..., 1]
            terms.append(BumpTerm(np.array(t["center"], float), float(t["radius"]), int(t["axis"]), c.astype(spec.dtype)))
        dim = int(data["dim"]) if "dim" in data else (len(terms[0].center) if terms else 2)
        return cls(spec, dim, tuple(terms))

    @classmethod
    def loads(cls, text: str) -> "Connection":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Holonomy


@dataclass
class Holonomy:
    matrix: np.ndarray
    spec: LieGroupSpec
    error: float = 0.0
    residual: float = field(default=None)

    def __post_init__(self):
        if self.residual is None:
            self.residual = self.spec.residual(self.matrix)

    def __matmul__(self, other: "Holonomy") -> "Holonomy":
        _same_spec(self, other)
        return Holonomy(self.matrix @ other.matrix, self.spec, self.error + other.error)

    def inverse(self) -> "Holonomy":
        return Holonomy(np.linalg.inv(self.matrix), self.spec, self.error)

    def distance_to_identity(self) -> float:
        return float(np.linalg.norm(self.matrix - np.eye(self.spec.n), 2))

    def to_dict(self) -> dict:
        m = self.matrix
        if np.iscomplexobj(m):
            enc = [[[float(z.real), float(z.imag)] for z in row] for row in m]
        else:
            enc = [[float(z) for z in row] for row in m]
        return {"group": self.spec.name, "matrix": enc, "residual": self.residual, "error": self.error}


def _same_spec(a: Holonomy, b: Holonomy):
    if a.spec is not b.spec:
        raise ValueError(f"group mismatch: {a.spec} vs {b.spec}")


def group_distance(a, b) -> float:
    """Operator-norm distance between two group elements."""
    if isinstance(a, Holonomy) and isinstance(b, Holonomy):
        _same_spec(a, b)
    ma = a.matrix if isinstance(a, Holonomy) else np.asarray(a)
    mb = b.matrix if isinstance(b, Holonomy) else np.asarray(b)
    if ma.shape != mb.shape:
        raise ValueError("group mismatch: matrix shapes differ")
    return float(np.linalg.norm(ma - mb, 2))


def _chain_product(P: np.ndarray) -> np.ndarray:
    """Ordered product ``P[0] @ P[1] @ ... @ P[-1]`` by pairwise reduction."""
    while len(P) > 1:
        if len(P) % 2:
            P = np.concatenate([P, np.eye(P.shape[1], dtype=P.dtype)[None]])
        P = np.matmul(P[0::2], P[1::2])
    return P[0]


def _rk4_propagator(A: Connection, pos, vel, t0: float, t1: float, steps: int) -> np.ndarray:
    """RK4 propagator of ``U' = U M(t)`` over ``[t0, t1]`` with uniform steps."""
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    tm = ts[:-1] + h / 2
    M_nodes = A.form(pos(ts), vel(ts))
    M_mid = A.form(pos(tm), vel(tm))
    M0, M1 = M_nodes[:-1], M_nodes[1:]
    n = A.spec.n
    k1 = M0
    k2 = M_mid + (h / 2) * k1 @ M_mid
    k3 = M_mid + (h / 2) * k2 @ M_mid
    k4 = M1 + h * k3 @ M1
    P = np.eye(n, dtype=A.spec.dtype)[None] + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return _chain_product(P)


def _active_intervals(A: Connection, p: np.ndarray, q: np.ndarray) -> list[tuple[float, float]]:
    d = q - p
    dd = float(d @ d)
    spans = []
    for t in A.terms:
        if d[t.axis] == 0.0:
            continue
        w = p - t.center
        b = 2 * float(d @ w)
        c = float(w @ w) - t.radius**2
        disc = b * b - 4 * dd * c
        if disc <= 0:
            continue
        sq = math.sqrt(disc)
        lo, hi = max(0.0, (-b - sq) / (2 * dd)), min(1.0, (-b + sq) / (2 * dd))
        if lo < hi:
            spans.append((lo, hi))
    spans.sort()
    merged: list[list[float]] = []
    for lo, hi in spans:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(a, b) for a, b in merged]


def _segment_propagator(A: Connection, p, q, steps: int) -> np.ndarray:
    p, q = np.asarray(p, float), np.asarray(q, float)
    d = q - p
    out = np.eye(A.spec.n, dtype=A.spec.dtype)
    for lo, hi in _active_intervals(A, p, q):
        out = out @ _rk4_propagator(A, lambda t: p + t[:, None] * d, lambda t: np.broadcast_to(d, (len(t), len(d))), lo, hi, steps)
    return out


def _float_point(v) -> tuple[float, ...]:
    return tuple(float(c) for c in v)


def _transport_matrix(A: Connection, path, steps: int, cache: dict) -> np.ndarray:
    U = np.eye(A.spec.n, dtype=A.spec.dtype)
    if isinstance(path, (PolyLoop, PolyPath)):
        if len(path.vertices[0]) != A.dim:
            raise ValueError("path and connection dimensions differ")
        for a, b in zip(path.vertices, path.vertices[1:]):
            pa, pb = _float_point(a), _float_point(b)
            key = (pa, pb) if pa < pb else (pb, pa)
            if key not in cache:
                P = _segment_propagator(A, key[0], key[1], steps)
                cache[key] = (P, np.linalg.inv(P))
            P, Pinv = cache[key]
            U = U @ (P if key[0] == pa else Pinv)
        return U
    if hasattr(path, "smooth_pieces"):
        for curve, x0, x1, sign in path.smooth_pieces():
            key = (id(curve), x0, x1)
            if key not in cache:
                P = _rk4_propagator(A, curve.position, curve.velocity, x0, x1, steps)
                cache[key] = (P, np.linalg.inv(P))
            P, Pinv = cache[key]
            U = U @ (P if sign > 0 else Pinv)
        return U
    raise TypeError(f"cannot transport along {type(path).__name__}")


def transport(A: Connection, path, steps: int = DEFAULT_STEPS, estimate_error: bool = True) -> Holonomy:
    """Holonomy of ``A`` along a PL path/loop or a smooth curve chain.

    ``steps`` uniform RK4 steps are used on every active piece of every
    segment (or on every smooth piece). The error estimate compares against
    a run with ``2 * steps``. The returned matrix is re-projected onto the
    group.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    U = _transport_matrix(A, path, steps, {})
    if not np.all(np.isfinite(U)):
        raise FloatingPointError("transport produced non-finite values")
    err = 0.0
    if estimate_error:
        U2 = _transport_matrix(A, path, 2 * steps, {})
        err = float(np.linalg.norm(U - U2, 2))
    P = A.spec.project(U)
    return Holonomy(P, A.spec, err + float(np.linalg.norm(P - U, 2)))


def holonomy_of_word(A: Connection, dec: Decomposition, steps: int = DEFAULT_STEPS) -> Holonomy:
    """Multiply generator holonomies according to the decomposition's word."""
    hol = {}
    out = Holonomy(A.spec.identity(), A.spec, 0.0)
    for x in dec.word:
        n = abs(x)
        if n not in hol:
            hol[n] = transport(A, dec.generators[n - 1].loop, steps)
        out = out @ (hol[n] if x > 0 else hol[n].inverse())
    out.matrix = A.spec.project(out.matrix)
    out.residual = A.spec.residual(out.matrix)
    return out


def random_connection(
    spec: LieGroupSpec,
    region: Sequence[Sequence[float]],
    n_terms: int,
    seed: int = 0,
    radius_range: tuple[float, float] = (0.5, 1.5),
    coeff_scale: float = 1.0,
) -> Connection:
    """Seeded random bump connection with centers in the box ``region = (lo, hi)``."""
    if n_terms < 0:
        raise ValueError("n_terms must be >= 0")
    lo, hi = (np.asarray(x, float) for x in region)
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(n_terms):
        c = rng.uniform(lo, hi)
        r = rng.uniform(*radius_range)
        axis = int(rng.integers(len(lo)))
        terms.append(BumpTerm(c, r, axis, spec.random_algebra(rng, coeff_scale)))
    return Connection(spec, len(lo), tuple(terms))
