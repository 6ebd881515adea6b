"""Piecewise-linear Lipschitz graphs, region tests, cones and dyadic approximation.

A graph is Gamma = {u + i a(u)} with a(u) linear between breakpoints and
extended by straight tails. Everything downstream (quadrature, conformal maps,
bound constants) reads a(u), a'(u) and the declared Lipschitz constant M here.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, GraphValidationError, InputError, ResourceError

_SLOPE_EPS = 1e-12
# below this turning angle two adjacent edges are treated as collinear
_ANGLE_EPS = 1e-13


class RegionTag(enum.Enum):
    UPPER = "UpperDomain"
    BOUNDARY = "Boundary"
    LOWER = "LowerDomain"


@dataclass(frozen=True)
class CurvePoint:
    zeta: complex
    derivative: complex | None
    left_derivative: complex
    right_derivative: complex
    density: float | None

    @property
    def at_breakpoint(self) -> bool:
        return self.derivative is None


@dataclass(frozen=True, eq=False)
class LipschitzGraph:
    """Graph of a piecewise-linear Lipschitz function.

    ``u``/``a`` hold the breakpoints (strictly increasing ``u``); the tails
    leave the first and last breakpoint with the given slopes.
    """

    u: tuple[float, ...]
    a: tuple[float, ...]
    tail_slope_left: float
    tail_slope_right: float
    M: float

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(x) for x in self.u))
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        self.validate()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_breakpoints(cls, breakpoints, tail_slope_left, tail_slope_right, M=None):
        pts = [(float(p[0]), float(p[1])) for p in breakpoints]
        if M is None:
            slopes = [abs(tail_slope_left), abs(tail_slope_right)]
            slopes += [abs((b[1] - a[1]) / (b[0] - a[0])) for a, b in zip(pts, pts[1:]) if b[0] != a[0]]
            M = max(slopes)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts),
                   float(tail_slope_left), float(tail_slope_right), float(M))

    @classmethod
    def flat(cls) -> "LipschitzGraph":
        return cls((0.0,), (0.0,), 0.0, 0.0, 0.0)

    @classmethod
    def wedge(cls, M: float = 1.0, apex: float = 0.0) -> "LipschitzGraph":
        """a(u) = M|u - apex|."""
        return cls((apex,), (0.0,), -M, M, M)

    @classmethod
    def zigzag(cls, breakpoints, tail_slope_left, tail_slope_right, M=None) -> "LipschitzGraph":
        return cls.from_breakpoints(breakpoints, tail_slope_left, tail_slope_right, M)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], u_samples, M: float,
                      tail_slope_left: float = 0.0, tail_slope_right: float = 0.0) -> "LipschitzGraph":
        """Chord interpolation of a smooth boundary function on ``u_samples``."""
        us = np.asarray(sorted(set(float(x) for x in u_samples)))
        return cls(tuple(us), tuple(np.asarray(func(us), dtype=float)), tail_slope_left, tail_slope_right, M)

    @classmethod
    def from_dict(cls, data: dict) -> "LipschitzGraph":
        try:
            bps = data["breakpoints"]
            sl = data["tail_slope_left"]
            sr = data["tail_slope_right"]
            M = data["M"]
        except KeyError as exc:
            raise GraphValidationError(f"graph JSON missing key {exc.args[0]!r}") from None
        if not bps:
            raise GraphValidationError("graph JSON needs at least one breakpoint")
        return cls(tuple(float(p[0]) for p in bps), tuple(float(p[1]) for p in bps),
                   float(sl), float(sr), float(M))

    @classmethod
    def load(cls, path) -> "LipschitzGraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "breakpoints": [[u, a] for u, a in zip(self.u, self.a)],
            "tail_slope_left": self.tail_slope_left,
            "tail_slope_right": self.tail_slope_right,
            "M": self.M,
        }

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def validate(self) -> None:
        u, a = self.u, self.a
        if len(u) == 0 or len(u) != len(a):
            raise GraphValidationError("breakpoints must be a non-empty list of (u, a) pairs")
        vals = list(u) + list(a) + [self.tail_slope_left, self.tail_slope_right, self.M]
        if not all(math.isfinite(v) for v in vals):
            raise GraphValidationError("graph data must be finite")
        if self.M < 0:
            raise GraphValidationError(f"Lipschitz constant must be non-negative, got {self.M}")
        tol = _SLOPE_EPS * max(1.0, self.M)
        for k in range(len(u) - 1):
            du = u[k + 1] - u[k]
            if du <= 0:
                raise GraphValidationError(
                    f"breakpoints not strictly increasing at chord {k}: u={u[k]} -> u={u[k + 1]}")
            slope = (a[k + 1] - a[k]) / du
            if abs(slope) > self.M + tol:
                raise GraphValidationError(
                    f"chord {k} from ({u[k]}, {a[k]}) to ({u[k + 1]}, {a[k + 1]}) has slope "
                    f"{slope:.6g} exceeding M={self.M}")
        for name, s in (("tail_slope_left", self.tail_slope_left), ("tail_slope_right", self.tail_slope_right)):
            if abs(s) > self.M + tol:
                raise GraphValidationError(f"{name}={s} exceeds M={self.M}")

    # -- evaluation -------------------------------------------------------

    @property
    def n_breakpoints(self) -> int:
        return len(self.u)

    def slopes(self) -> np.ndarray:
        """Edge slopes left tail, chords..., right tail (length n+1)."""
        u = np.asarray(self.u)
        a = np.asarray(self.a)
        inner = np.diff(a) / np.diff(u) if len(u) > 1 else np.empty(0)
        return np.concatenate([[self.tail_slope_left], inner, [self.tail_slope_right]])

    def edge_angles(self) -> np.ndarray:
        return np.arctan(self.slopes())

    def height(self, u):
        """a(u), vectorised."""
        uu = np.asarray(u, dtype=float)
        ub = np.asarray(self.u)
        ab = np.asarray(self.a)
        out = np.interp(uu, ub, ab)
        out = np.where(uu < ub[0], ab[0] + self.tail_slope_left * (uu - ub[0]), out)
        out = np.where(uu > ub[-1], ab[-1] + self.tail_slope_right * (uu - ub[-1]), out)
        return out if out.ndim else float(out)

    def slope_at(self, u):
        """Right-continuous a'(u)."""
        uu = np.asarray(u, dtype=float)
        idx = np.searchsorted(np.asarray(self.u), uu, side="right")
        out = self.slopes()[idx]
        return out if out.ndim else float(out)

    def zeta(self, u):
        uu = np.asarray(u, dtype=float)
        return uu + 1j * self.height(uu)

    def eval_curve(self, u: float) -> CurvePoint:
        if not math.isfinite(u):
            raise InputError(f"non-finite curve parameter {u!r}")
        s = self.slopes()
        i_left = int(np.searchsorted(self.u, u, side="left"))
        i_right = int(np.searchsorted(self.u, u, side="right"))
        left = complex(1.0, s[i_left])
        right = complex(1.0, s[i_right])
        z = complex(u, self.height(u))
        if i_left != i_right and s[i_left] != s[i_right]:
            return CurvePoint(z, None, left, right, None)
        return CurvePoint(z, right, left, right, math.sqrt(1.0 + s[i_right] ** 2))

    def classify(self, w: complex, tol: float = 0.0) -> RegionTag:
        w = complex(w)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise InputError(f"non-finite point {w!r}")
        if tol < 0:
            raise InputError("classification tolerance must be >= 0")
        h = self.height(w.real)
        if w.imag > h + tol:
            return RegionTag.UPPER
        if w.imag < h - tol:
            return RegionTag.LOWER
        return RegionTag.BOUNDARY

    def vertical_offset(self, w):
        """Im w - a(Re w), vectorised; positive above the graph."""
        w = np.asarray(w, dtype=complex)
        return w.imag - self.height(w.real)

    def distance(self, w):
        """Euclidean distance from points to the curve, vectorised."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        pts = self.zeta(np.asarray(self.u))
        best = np.full(w.shape, np.inf)
        for p, q in zip(pts[:-1], pts[1:]):
            d = q - p
            t = np.clip(((w - p) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
            best = np.minimum(best, np.abs(w - (p + t * d)))
        for p, d in ((pts[0], -complex(1.0, self.tail_slope_left)), (pts[-1], complex(1.0, self.tail_slope_right))):
            t = np.maximum(((w - p) * np.conj(d)).real / abs(d) ** 2, 0.0)
            best = np.minimum(best, np.abs(w - (p + t * d)))
        return best

    def max_height(self, u1: float, u2: float) -> float:
        lo, hi = min(u1, u2), max(u1, u2)
        cand = [lo, hi] + [x for x in self.u if lo < x < hi]
        return float(np.max(self.height(np.asarray(cand))))

    def vertices(self):
        """Breakpoints where the curve actually turns: (u, a, theta_left, theta_right)."""
        th = self.edge_angles()
        out = []
        for k, (u, a) in enumerate(zip(self.u, self.a)):
            if abs(th[k] - th[k + 1]) > _ANGLE_EPS:
                out.append((u, a, float(th[k]), float(th[k + 1])))
        return out

    def extent(self) -> float:
        return max(1.0, self.u[-1] - self.u[0], max(abs(x) for x in self.a))


# -- non-tangential cones ---------------------------------------------------

@dataclass(frozen=True)
class NTCone:
    vertex_u: float
    tangent_angle_phi0: float
    half_angle_phi: float

    def __post_init__(self):
        if not 0.0 < self.half_angle_phi < math.pi / 2:
            raise InputError(f"cone half angle must lie in (0, pi/2), got {self.half_angle_phi}")


def cone_at(graph: LipschitzGraph, u0: float, phi: float) -> NTCone:
    """Cone at zeta(u0); at a kink the chord-average of the one-sided angles is used."""
    pt = graph.eval_curve(u0)
    if pt.derivative is not None:
        phi0 = math.atan2(pt.derivative.imag, pt.derivative.real)
    else:
        phi0 = 0.5 * (math.atan(pt.left_derivative.imag) + math.atan(pt.right_derivative.imag))
    if abs(phi0) > math.atan(graph.M) + 1e-12:
        raise InputError("tangent angle exceeds arctan M")
    return NTCone(float(u0), phi0, float(phi))


def _wrap(theta):
    return (theta + np.pi) % (2 * np.pi) - np.pi


def in_cone(cone: NTCone, zeta0: complex, w) -> np.ndarray:
    d = np.asarray(w, dtype=complex) - zeta0
    rel = _wrap(np.angle(d) - cone.tangent_angle_phi0)
    return (rel > cone.half_angle_phi) & (rel < math.pi - cone.half_angle_phi)


def cone_contains(cone: NTCone, graph: LipschitzGraph, w: complex, *, max_radius: float = 1.0,
                  n_angles: int = 64, n_radii: int = 24, tol: float = 0.0) -> tuple[bool, float]:
    """Membership of ``w`` in the cone plus a sampled entry radius.

    The radius is the largest dyadic fraction of ``max_radius`` for which every
    sampled z (golden-ratio angles inside the cone, dyadic radii below it) has
    zeta0 + z above and zeta0 - z below the graph.
    """
    zeta0 = complex(graph.zeta(cone.vertex_u))
    if complex(w) == zeta0:
        raise DomainError("direction undefined at the cone vertex")
    inside = bool(in_cone(cone, zeta0, complex(w)))

    golden = (math.sqrt(5.0) - 1.0) / 2.0
    frac = (np.arange(1, n_angles + 1) * golden) % 1.0
    lo = cone.tangent_angle_phi0 + cone.half_angle_phi
    theta = lo + frac * (math.pi - 2 * cone.half_angle_phi)
    dirs = np.exp(1j * theta)
    delta = max_radius
    for _ in range(60):
        radii = delta * 0.5 ** np.arange(n_radii)
        # radii strictly below delta
        radii = radii * (1.0 - 1e-12)
        z = (radii[:, None] * dirs[None, :]).ravel()
        up = graph.vertical_offset(zeta0 + z) > tol
        down = graph.vertical_offset(zeta0 - z) < -tol
        if np.all(up & down):
            return inside, float(delta)
        delta *= 0.5
    return inside, 0.0


# -- dyadic polygonal approximation -------------------------------------------

def polygonal_approximation(graph: LipschitzGraph, j: int, max_nodes: int = 200_001) -> LipschitzGraph:
    """Piecewise-affine majorant through (k 2^-j, a(k 2^-j) + 2M 2^-j), |k| <= j 2^j.

    Tails have slopes -M and +M; the result decreases to ``a`` as j grows.
    """
    if int(j) != j or j < 1:
        raise InputError(f"approximation level must be a positive integer, got {j}")
    j = int(j)
    n_half = j * 2 ** j
    if 2 * n_half + 1 > max_nodes:
        raise ResourceError(f"level j={j} needs {2 * n_half + 1} nodes, limit is {max_nodes}")
    h = 2.0 ** -j
    k = np.arange(-n_half, n_half + 1)
    x = k * h
    y = graph.height(x) + 2.0 * graph.M * h
    return LipschitzGraph(tuple(x), tuple(y), -graph.M, graph.M, graph.M)


def graph_from_points(points: Sequence[tuple[float, float]], M: float | None = None,
                      tail_slope_left: float = 0.0, tail_slope_right: float = 0.0) -> LipschitzGraph:
    return LipschitzGraph.from_breakpoints(points, tail_slope_left, tail_slope_right, M)
