"""Graph curves with exact derivative oracles and the differentiable-case constructions.

Curves are graphs ``t -> (t, f(t))`` where ``f`` is a finite sum of dyadic
bump atoms ``s * beta(2^n x - k)``, optionally multiplied by smooth cutoffs
that vanish near chosen points.  ``beta`` is the polynomial bump
``4^(N+1) (x(1-x))^(N+1)`` on ``[0, 1]``, flat to order ``N`` at both ends,
so every derivative up to order ``N`` is exact (polynomial evaluation plus
the Leibniz rule).

Main entry points:

* :func:`counterexample_family` -- four graphs whose loop has trivial
  abelian holonomy but is not freely trivial.
* :func:`cn_distance` -- sampled ``C^N`` distance.
* :func:`interpolating_homotopy` -- the blend of a convergent sequence into
  a smooth homotopy, with its derivative bound checked on a grid.
* :func:`mollify` -- multiply curves by cutoffs, keeping coincidences.
* :func:`flatten_to_pl` -- exact rational PL chords for the geometry code.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .geom import PolyLoop, PolyPath

__all__ = [
    "BUMP_N",
    "N_MAX",
    "Profile",
    "BUMP",
    "STEP",
    "CUTOFF",
    "bump_sup",
    "bump_level_constant",
    "step_constant",
    "cutoff_constant",
    "BumpAtom",
    "MollifierSpec",
    "GraphCurve",
    "CurveChain",
    "Counterexample",
    "counterexample_family",
    "CNDistance",
    "cn_distance",
    "ClosenessViolation",
    "InterpolatingHomotopy",
    "interpolating_homotopy",
    "closeness_sequence",
    "MollifierOverlap",
    "mollify",
    "smallness_width",
    "flatten_to_pl",
    "flatten_loop",
    "write_derivative_csv",
]

BUMP_N = 8
N_MAX = BUMP_N


class Profile:
    """Piecewise polynomial on R, constant outside its pieces.

    A piece ``(lo, hi, p, a, b)`` has value ``p(a*x + b)`` on ``[lo, hi]``;
    the affine inner map keeps the polynomials centered and well
    conditioned. Between/outside the pieces the value is
    ``constants[gap index]`` (``len(pieces) + 1`` gaps).
    """

    def __init__(self, pieces, constants):
        self.pieces = list(pieces)
        self.constants = list(constants)
        self._derivs: dict[tuple[int, int], Polynomial] = {}

    def _poly(self, i: int, k: int) -> Polynomial:
        key = (i, k)
        if key not in self._derivs:
            p = self.pieces[i][2]
            self._derivs[key] = p.deriv(k) if k else p
        return self._derivs[key]

    def derivs(self, x, order: int) -> np.ndarray:
        """Values of the profile and its derivatives, shape ``(order + 1, len(x))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((order + 1, len(x)))
        gap = np.zeros(len(x), dtype=int)
        covered = np.zeros(len(x), dtype=bool)
        for i, (lo, hi, _, a, b) in enumerate(self.pieces):
            # endpoints take the adjacent constant exactly (junctions are flat)
            gap += x >= hi
            m = (x > lo) & (x < hi) & ~covered
            covered |= m
            if m.any():
                y = a * x[m] + b
                for k in range(order + 1):
                    out[k, m] = a**k * self._poly(i, k)(y)
        consts = np.asarray(self.constants, dtype=float)
        out[0, ~covered] = consts[gap[~covered]]
        return out

    def __call__(self, x):
        return self.derivs(x, 0)[0]

    def sup(self, k: int) -> float:
        """``max |p^(k)|`` over R from the critical points of each piece."""
        best = max(abs(c) for c in self.constants) if k == 0 else 0.0
        for i, (lo, hi, _, a, b) in enumerate(self.pieces):
            p = self._poly(i, k)
            ylo, yhi = sorted((a * lo + b, a * hi + b))
            cands = [ylo, yhi]
            dp = p.deriv()
            if dp.coef.any():
                for r in dp.roots():
                    if abs(r.imag) < 1e-9 and ylo <= r.real <= yhi:
                        cands.append(r.real)
            best = max(best, abs(a) ** k * max(abs(p(c)) for c in cands))
        return float(best)


def _make_profiles(N: int):
    # beta(x) = 4^(N+1) (x(1-x))^(N+1) = (1 - y^2)^(N+1) with y = 2x - 1
    base = Polynomial([1.0, 0.0, -1.0]) ** (N + 1)
    bump = Profile([(0.0, 1.0, base, 2.0, -1.0)], [0.0, 0.0])
    prim = base.integ(lbnd=-1.0)
    step_poly = prim / prim(1.0)
    step = Profile([(0.0, 1.0, step_poly, 2.0, -1.0)], [0.0, 1.0])
    # rho(x) = S(2|x| - 1) on 1/2 <= |x| <= 1, i.e. y = 4|x| - 3
    cutoff = Profile(
        [(-1.0, -0.5, step_poly, -4.0, -3.0), (0.5, 1.0, step_poly, 4.0, -3.0)],
        [1.0, 0.0, 1.0],
    )
    return bump, step, cutoff


BUMP, STEP, CUTOFF = _make_profiles(BUMP_N)


@lru_cache(maxsize=None)
def bump_sup(k: int) -> float:
    """``max |beta^(k)|``."""
    return BUMP.sup(k)


@lru_cache(maxsize=None)
def bump_level_constant(n: int) -> float:
    """Normalizer for level ``n`` atoms: ``max_{1<=k<=n} max |beta^(k)|``."""
    return max(bump_sup(k) for k in range(1, max(n, 1) + 1))


@lru_cache(maxsize=None)
def step_constant(n: int) -> float:
    """``max_{k<=n} max |S^(k)|`` for the smooth step ``S``."""
    return max(STEP.sup(k) for k in range(n + 1))


@lru_cache(maxsize=None)
def cutoff_constant(n: int) -> float:
    """``max |rho^(n)|`` for the cutoff profile."""
    return CUTOFF.sup(n)


# ---------------------------------------------------------------------------
# Curves


@dataclass(frozen=True)
class BumpAtom:
    """``scale * beta(2^level x - shift)``, supported on ``[shift, shift+1] / 2^level``."""

    level: int
    scale: float
    shift: int = 1

    @property
    def interval(self) -> tuple[float, float]:
        w = 2.0**-self.level
        return self.shift * w, (self.shift + 1) * w

    def derivs(self, x, order: int) -> np.ndarray:
        lam = 2.0**self.level
        d = BUMP.derivs(lam * np.asarray(x, float) - self.shift, order)
        return self.scale * d * (lam ** np.arange(order + 1))[:, None]


@dataclass(frozen=True)
class MollifierSpec:
    """Cutoffs ``rho((x - p_k) / delta_k)``: zero on ``|x-p| <= delta/2``, one beyond ``delta``."""

    points: tuple[float, ...] = ()
    widths: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(self, "widths", tuple(float(d) for d in self.widths))
        if len(self.points) != len(self.widths):
            raise ValueError("one width per mollifier point")
        if any(not d > 0 for d in self.widths):
            raise ValueError("mollifier widths must be positive")

    def __len__(self):
        return len(self.points)

    def derivative_bounds(self, n: int) -> list[float]:
        """``max |rho_{p,delta}^(k)| = a_k / delta^k`` for ``k <= n``, per point."""
        return [[cutoff_constant(k) / d**k for k in range(n + 1)] for d in self.widths]


def _leibniz(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    order = f.shape[0] - 1
    out = np.zeros_like(f)
    for n in range(order + 1):
        for k in range(n + 1):
            out[n] += math.comb(n, k) * f[k] * g[n - k]
    return out


@dataclass(frozen=True)
class GraphCurve:
    """Graph ``t -> (t, f(t))`` over ``[0, t_end]`` with derivative oracle.

    ``f = (sum of atoms) * prod_k rho((x - p_k) / delta_k)`` over the
    ``cutoffs`` pairs ``(p_k, delta_k)``.
    """

    atoms: tuple[BumpAtom, ...] = ()
    t_end: float = 1.0
    cutoffs: tuple[tuple[float, float], ...] = ()
    name: str = ""

    def __post_init__(self):
        merged: dict[tuple[int, int], float] = {}
        for a in self.atoms:
            key = (a.level, a.shift)
            merged[key] = merged.get(key, 0.0) + a.scale
        atoms = tuple(BumpAtom(lv, s, sh) for (lv, sh), s in merged.items() if s != 0.0)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "cutoffs", tuple((float(p), float(d)) for p, d in self.cutoffs))

    @property
    def max_order(self) -> int:
        return N_MAX

    def derivs(self, x, order: int) -> np.ndarray:
        """``f^(k)(x)`` for ``k = 0..order``, shape ``(order + 1, len(x))``."""
        if order > N_MAX:
            raise ValueError(f"derivative order {order} exceeds oracle order {N_MAX}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((order + 1, len(x)))
        for a in self.atoms:
            lo, hi = a.interval
            m = (x >= lo) & (x <= hi)
            if m.any():
                out[:, m] += a.derivs(x[m], order)
        for p, d in self.cutoffs:
            c = CUTOFF.derivs((x - p) / d, order) / (d ** np.arange(order + 1))[:, None]
            out = _leibniz(out, c)
        return out

    def __call__(self, x):
        return self.derivs(x, 0)[0]

    def position(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        return np.stack([x, self(x)], axis=1)

    def velocity(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        return np.stack([np.ones_like(x), self.derivs(x, 1)[1]], axis=1)

    def breakpoints(self) -> list[float]:
        pts = {0.0, self.t_end}
        for a in self.atoms:
            pts.update(a.interval)
        for p, d in self.cutoffs:
            pts.update((p - d, p - d / 2, p + d / 2, p + d))
        return sorted(x for x in pts if 0.0 <= x <= self.t_end)

    def _with(self, atoms=None, cutoffs=None, name=None):
        return GraphCurve(
            self.atoms if atoms is None else atoms,
            self.t_end,
            self.cutoffs if cutoffs is None else cutoffs,
            self.name if name is None else name,
        )

    def __neg__(self):
        return self._with(atoms=tuple(BumpAtom(a.level, -a.scale, a.shift) for a in self.atoms), name=f"-{self.name}")

    def scaled(self, c: float) -> "GraphCurve":
        return self._with(atoms=tuple(BumpAtom(a.level, c * a.scale, a.shift) for a in self.atoms))

    def __add__(self, other: "GraphCurve") -> "GraphCurve":
        if self.cutoffs != other.cutoffs or self.t_end != other.t_end:
            raise ValueError("can only add curves with the same domain and cutoffs")
        return self._with(atoms=self.atoms + other.atoms, name="")

    def __sub__(self, other: "GraphCurve") -> "GraphCurve":
        return self + (-other)

    def truncated(self, n_max: int) -> "GraphCurve":
        return self._with(atoms=tuple(a for a in self.atoms if a.level <= n_max))

    # -- curve file format--------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "t_end": self.t_end,
            "atoms": [{"level": a.level, "sign": 1 if a.scale >= 0 else -1, "scale": abs(a.scale), "shift": a.shift} for a in self.atoms],
            "mollifier": {"points": [p for p, _ in self.cutoffs], "widths": [d for _, d in self.cutoffs]},
            "name": self.name,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "GraphCurve":
        atoms = tuple(
            BumpAtom(int(a["level"]), float(a.get("sign", 1)) * float(a["scale"]), int(a.get("shift", 1)))
            for a in data.get("atoms", [])
        )
        mol = data.get("mollifier") or {}
        cutoffs = tuple(zip(mol.get("points", []), mol.get("widths", [])))
        return cls(atoms, float(data.get("t_end", 1.0)), cutoffs, data.get("name", ""))

    @classmethod
    def loads(cls, text: str) -> "GraphCurve":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CurveChain:
    """Product of graph curves (sign ``-1`` = traversed backwards) based at ``(0, 0)``."""

    parts: tuple[tuple[GraphCurve, int], ...]

    @property
    def basepoint(self):
        return (0.0, 0.0)

    def smooth_pieces(self):
        for curve, sign in self.parts:
            bp = curve.breakpoints()
            pieces = list(zip(bp, bp[1:]))
            if sign < 0:
                pieces.reverse()
            for a, b in pieces:
                yield curve, a, b, sign


@dataclass(frozen=True)
class Counterexample:
    curves: tuple[GraphCurve, GraphCurve, GraphCurve, GraphCurve]
    loop: CurveChain
    n_max: int


def counterexample_family(n_max: int) -> Counterexample:
    """The four graphs ``f_1..f_4`` truncated at level ``n_max`` and ``c = c1 c2^-1 c3 c4^-1``.

    On ``(2^-n, 2^-n+1]``, ``f_i = (3 - 2i)^n beta(2^n x - 1) / (2^n a_n)``
    for ``i = 1, 2``; ``f_3 = -f_1`` and ``f_4 = -f_2``.
    """
    if not 1 <= n_max <= 24:
        raise ValueError("n_max must lie in [1, 24]")
    f = []
    for i in (1, 2):
        atoms = tuple(
            BumpAtom(n, (3 - 2 * i) ** n / (2.0**n * bump_level_constant(n)), 1) for n in range(1, n_max + 1)
        )
        f.append(GraphCurve(atoms, 1.0, (), f"f{i}"))
    f1, f2 = f
    f3, f4 = (-f1)._with(name="f3"), (-f2)._with(name="f4")
    loop = CurveChain(((f1, 1), (f2, -1), (f3, 1), (f4, -1)))
    return Counterexample((f1, f2, f3, f4), loop, n_max)


# ---------------------------------------------------------------------------
# C^N distance


@dataclass
class CNDistance:
    value: float
    coarse_value: float
    by_order: list[float]
    samples: int

    @property
    def refinement_change(self) -> float:
        return self.value - self.coarse_value

    def __float__(self):
        return self.value


def _sample_grid(curves, samples: int, lo: float, hi: float) -> np.ndarray:
    pts = set(np.linspace(lo, hi, samples).tolist())
    for c in curves:
        pts.update(x for x in c.breakpoints() if lo <= x <= hi)
    return np.array(sorted(pts))


def cn_distance(f: GraphCurve, g: GraphCurve, N: int, samples: int = 4001, interval=None) -> CNDistance:
    """Sampled ``max_{n<=N} sup_x |f^(n) - g^(n)|`` (a lower bound on the true sup).

    The grid is uniform plus all atom/cutoff breakpoints. ``coarse_value``
    repeats the computation on half the samples as a refinement diagnostic.
    """
    if f.t_end != g.t_end:
        raise ValueError("curves must share a domain")
    if N > min(f.max_order, g.max_order):
        raise ValueError(f"order {N} exceeds oracle order")
    lo, hi = interval if interval is not None else (0.0, f.t_end)

    def run(m):
        x = _sample_grid((f, g), m, lo, hi)
        diff = np.abs(f.derivs(x, N) - g.derivs(x, N))
        return diff.max(axis=1)

    fine = run(samples)
    coarse = run(max(2, samples // 2))
    return CNDistance(float(fine.max()), float(coarse.max()), fine.tolist(), samples)


# ---------------------------------------------------------------------------
# Interpolating homotopy


class ClosenessViolation(ValueError):
    def __init__(self, n: int, order: int, distance: float, bound: float):
        self.n, self.order = n, order
        super().__init__(
            f"alpha_{n} is not within {bound:.3e} of gamma in C^{order} (distance {distance:.3e})"
        )


def _closeness_bound(N: int) -> float:
    return 2.0 ** (-N * N - N - 1) / step_constant(N)


def closeness_sequence(gamma: GraphCurve, perturbation: GraphCurve, count: int, min_order: int = 0) -> list[GraphCurve]:
    """``alpha_n = gamma + eps_n * perturbation`` meeting the homotopy lemma's closeness condition.

    Requires ``perturbation`` to share ``gamma``'s cutoffs; ``eps_n`` is half
    the largest admissible size over orders ``N <= min(max(n + 1, min_order), N_MAX)``.
    Raising ``min_order`` makes the early terms close in higher orders too.
    """
    x = _sample_grid((perturbation,), 4001, 0.0, perturbation.t_end)
    sup = np.abs(perturbation.derivs(x, N_MAX)).max(axis=1)
    out = []
    for n in range(count):
        eps = min(_closeness_bound(N) / max(sup[: N + 1].max(), 1e-300) for N in range(min(max(n + 1, min_order), N_MAX) + 1))
        out.append(gamma + perturbation.scaled(0.5 * eps))
    return out


@dataclass
class InterpolatingHomotopy:
    """``phi(s, t)``: ``gamma`` for ``s <= 0``; on ``2^-n <= s < 2^-n+1`` the blend
    ``(1 - S(2^n s - 1)) alpha_n + S(2^n s - 1) alpha_{n-1}`` with the smooth step ``S``.
    """

    gamma: GraphCurve
    alphas: Sequence[GraphCurve]
    deltas: list[GraphCurve] = field(default_factory=list)

    @property
    def levels(self) -> int:
        return len(self.alphas) - 1

    def level(self, s: float) -> int:
        if s > 1:
            raise ValueError("s must be <= 1")
        if s <= 0:
            raise ValueError("s must be positive")
        # band n is 2^-n <= s < 2^-(n-1); s = 1 falls at the top of band 1
        n = 1 - math.frexp(s)[1]
        if n > self.levels:
            raise ValueError(f"s = {s} needs alpha_{n}, only {self.levels} levels supplied")
        return max(n, 1)

    def partial(self, s: float, t, k: int = 0, l: int = 0) -> np.ndarray:
        """``d^(k+l) phi / ds^k dt^l`` at ``s`` for an array of ``t``."""
        t = np.atleast_1d(np.asarray(t, float))
        if s <= 0:
            return self.gamma.derivs(t, l)[l] if k == 0 else np.zeros_like(t)
        n = self.level(s)
        sig = 2.0**n * s - 1
        S = STEP.derivs(np.array([sig]), k)[:, 0]
        if k == 0:
            a = self.alphas[n].derivs(t, l)[l]
            b = self.alphas[n - 1].derivs(t, l)[l]
            return (1 - S[0]) * a + S[0] * b
        return 2.0 ** (n * k) * S[k] * self.deltas[n].derivs(t, l)[l]

    def __call__(self, s: float, t):
        return self.partial(s, t)

    def verify_bounds(self, max_order: int = 3, s_samples: int = 33, t_samples: int = 257, all_orders: bool = False) -> dict:
        """Sampled maxima of the mixed partials on each level band, against ``2^-n``.

        For ``k >= 1`` the partial itself is bounded; for ``k = 0`` the
        deviation from ``gamma^(l)``. Only pairs with ``k, l <= n`` are
        covered by the construction's estimate; ``all_orders`` checks every
        ``k + l <= max_order`` regardless.
        """
        t = np.linspace(0.0, self.gamma.t_end, t_samples)
        rows = []
        for n in range(1, self.levels + 1):
            ss = np.linspace(2.0**-n, 2.0 ** (-n + 1), s_samples)[:-1]
            for k in range(max_order + 1):
                for l in range(max_order + 1 - k):
                    if not all_orders and (k > n or l > n):
                        continue
                    g = self.gamma.derivs(t, l)[l]
                    worst = 0.0
                    for s in ss:
                        v = self.partial(float(s), t, k, l)
                        if k == 0:
                            v = v - g
                        worst = max(worst, float(np.abs(v).max()))
                    rows.append({"n": n, "k": k, "l": l, "max": worst, "bound": 2.0**-n, "ok": worst <= 2.0**-n})
        return {"rows": rows, "ok": all(r["ok"] for r in rows)}


def interpolating_homotopy(gamma: GraphCurve, alphas: Sequence[GraphCurve], check: bool = True) -> InterpolatingHomotopy:
    """Smooth homotopy through ``alphas[n]`` at ``s = 2^-n`` ending at ``gamma`` at ``s = 0``.

    With ``check`` the closeness precondition ``alpha_n in U^N(gamma,
    2^(-N^2-N-1) / a_N)`` is verified on a grid for every ``N <= n + 1``
    (capped at the oracle order); a violation raises
    :class:`ClosenessViolation` naming ``n``.
    """
    if len(alphas) < 2:
        raise ValueError("need at least alpha_0 and alpha_1")
    if check:
        for n, a in enumerate(alphas):
            diff = a - gamma
            x = _sample_grid((diff,), 2001, 0.0, gamma.t_end)
            sup = np.abs(diff.derivs(x, N_MAX)).max(axis=1)
            for N in range(min(n + 1, N_MAX) + 1):
                dist, bound = float(sup[: N + 1].max()), _closeness_bound(N)
                if dist >= bound:
                    raise ClosenessViolation(n, N, dist, bound)
    deltas = [None] + [alphas[n - 1] - alphas[n] for n in range(1, len(alphas))]
    return InterpolatingHomotopy(gamma, list(alphas), deltas)


# ---------------------------------------------------------------------------
# Mollification


class MollifierOverlap(ValueError):
    pass


def mollify(curves: Sequence[GraphCurve], spec: MollifierSpec, assignment=None) -> list[GraphCurve]:
    """``f_i * prod_{k in Q_i} rho((x - p_k) / delta_k)`` for each curve.

    ``assignment[i]`` lists the point indices applied to curve ``i``
    (default: all points to all curves). Cores ``(p - delta/2, p + delta/2)``
    of distinct points must be disjoint.
    """
    order = sorted(range(len(spec)), key=lambda k: spec.points[k])
    for a, b in zip(order, order[1:]):
        if spec.points[a] + spec.widths[a] / 2 > spec.points[b] - spec.widths[b] / 2:
            raise MollifierOverlap(f"mollifier cores around {spec.points[a]} and {spec.points[b]} overlap")
    out = []
    for i, c in enumerate(curves):
        if any(not 0.0 <= p <= c.t_end for p in spec.points):
            raise ValueError("mollifier points must lie in the curve domain")
        ks = range(len(spec)) if assignment is None else assignment[i]
        extra = tuple((spec.points[k], spec.widths[k]) for k in ks)
        out.append(c._with(cutoffs=c.cutoffs + extra))
    return out


def _weighted_sup(f: GraphCurve, p: float, delta: float, N: int, samples: int) -> np.ndarray:
    """``r_p(f^(n), delta) = sup_{0<|x-p|<delta} |f^(n)(x)| / |x-p|^(N-n)`` for ``n <= N``."""
    lo, hi = max(0.0, p - delta), min(f.t_end, p + delta)
    x = _sample_grid((f,), samples, lo, hi)
    x = x[(np.abs(x - p) > 0) & (np.abs(x - p) < delta)]
    if len(x) == 0:
        return np.zeros(N + 1)
    d = np.abs(f.derivs(x, N))
    w = np.abs(x - p)[None, :] ** (N - np.arange(N + 1))[:, None]
    return (d / w).max(axis=1)


def smallness_width(curves: Sequence[GraphCurve], p: float, eps: float, N: int, samples: int = 2001, max_halvings: int = 40) -> dict:
    """Largest dyadic ``delta`` meeting the cutoff-width conditions at ``p``.

    For every curve and ``n <= N``: ``r_p(f^(n), delta) < eps`` and
    ``sum_{k=1..n} C(n,k) a_k r_p(f^(n-k), delta) <= r_p(f^(n), delta)``,
    where ``a_k`` bounds the cutoff profile's derivatives.
    """
    a = [cutoff_constant(k) for k in range(N + 1)]
    delta = 1.0
    for _ in range(max_halvings):
        ok = True
        for f in curves:
            r = _weighted_sup(f, p, delta, N, samples)
            if np.any(r >= eps) and np.any(r > 0):
                ok = False
                break
            for n in range(N + 1):
                s = sum(math.comb(n, k) * a[k] * r[n - k] for k in range(1, n + 1))
                if s > r[n]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            # degenerate: every curve vanishes identically on the window
            flat = all(not np.any(_weighted_sup(f, p, delta, N, samples)) for f in curves)
            return {"delta": delta, "eps": eps, "N": N, "point": p, "degenerate": flat}
        delta /= 2
    raise ValueError("no admissible width found")


# ---------------------------------------------------------------------------
# PL bridge


def flatten_to_pl(curve: GraphCurve, resolution: int = 4) -> PolyPath:
    """Chord approximation with ``resolution`` chords per breakpoint interval.

    Abscissae are exact dyadic subdivisions of the breakpoints; ordinates
    are the exact binary values of the float samples, so equal samples on
    different curves give identical vertices and ``-f`` mirrors ``f``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    bp = [Fraction(b) for b in curve.breakpoints()]
    xs = [bp[0]]
    for a, b in zip(bp, bp[1:]):
        xs += [a + (b - a) * Fraction(j, resolution) for j in range(1, resolution + 1)]
    ys = curve(np.array([float(x) for x in xs]))
    return PolyPath(tuple((x, Fraction(float(y))) for x, y in zip(xs, ys)))


def flatten_loop(chain: CurveChain, resolution: int = 4) -> PolyLoop:
    verts: list = []
    for curve, sign in chain.parts:
        vs = list(flatten_to_pl(curve, resolution).vertices)
        if sign < 0:
            vs.reverse()
        verts += vs if not verts else vs[1:]
    return PolyLoop(verts[0], tuple(verts))


def write_derivative_csv(curve: GraphCurve, path, N: int = 4, samples: int = 1025) -> None:
    """CSV rows ``x, f(x), f'(x), ..., f^(N)(x)``."""
    x = np.linspace(0.0, curve.t_end, samples)
    d = curve.derivs(x, N)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [f"d{k}" for k in range(N + 1)])
        for i in range(len(x)):
            w.writerow([repr(float(x[i]))] + [repr(float(v)) for v in d[:, i]])
