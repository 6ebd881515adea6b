"""Schwarz-Christoffel maps from the upper half-plane onto polygonal graph domains.

Phi'(z) = scale * exp(i gamma) * prod (z - c_j)^gamma_j, with every factor on
the branch arg(z - c_j) in [0, pi]. Phi is evaluated by integrating Phi' from
the nearest prevertex, whose image is known: the first panel carries the
endpoint singularity through Gauss-Jacobi weights, later panels are
Gauss-Legendre with lengths at most half the distance to any prevertex.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares
from scipy.spatial import cKDTree
from scipy.special import roots_jacobi, roots_legendre

from .certificate import Certificate
from .errors import BranchPointError, CrowdingError, InputError, InversionError, RegionError, SolverError
from .geometry import LipschitzGraph, RegionTag, polygonal_approximation

_NQ = 16
_GL_T, _GL_W = roots_legendre(_NQ)
CROWDING_GAP = 1e-12


def _log_branch(d: np.ndarray) -> np.ndarray:
    """log with arg in [0, pi] for points in the closed upper half-plane."""
    arg = np.where((d.imag == 0) & (d.real < 0), math.pi, np.angle(d))
    return np.log(np.abs(d)) + 1j * arg


@dataclass(frozen=True)
class SchwarzChristoffelMap:
    gamma: float
    prevertices: tuple = ()
    exponents: tuple = ()
    base_point: complex = 1j
    base_value: complex = 0j
    scale: float = 1.0

    def __post_init__(self):
        c = [float(x) for x in self.prevertices]
        g = [float(x) for x in self.exponents]
        object.__setattr__(self, "prevertices", tuple(c))
        object.__setattr__(self, "exponents", tuple(g))
        object.__setattr__(self, "base_point", complex(self.base_point))
        object.__setattr__(self, "base_value", complex(self.base_value))
        if len(c) != len(g):
            raise InputError("prevertices and exponents differ in length")
        if any(b <= a for a, b in zip(c, c[1:])):
            raise InputError("prevertices must be strictly increasing")
        if any(not -1.0 < x < 1.0 for x in g):
            raise InputError("exponents must lie in (-1, 1)")
        if not self.scale > 0:
            raise InputError("scale must be > 0")
        if not self.base_point.imag > 0:
            raise InputError("base point must lie in the upper half-plane")

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "prevertices": list(self.prevertices), "exponents": list(self.exponents),
                "base_point": [self.base_point.real, self.base_point.imag],
                "base_value": [self.base_value.real, self.base_value.imag], "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> "SchwarzChristoffelMap":
        try:
            bp = d.get("base_point", [0.0, 1.0])
            bv = d.get("base_value", [0.0, 0.0])
            return cls(float(d["gamma"]), tuple(d.get("prevertices", ())), tuple(d.get("exponents", ())),
                       complex(bp[0], bp[1]), complex(bv[0], bv[1]), float(d.get("scale", 1.0)))
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed map description: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SchwarzChristoffelMap":
        return cls.from_dict(json.loads(Path(path).read_text()))

    @classmethod
    def identity(cls, gamma: float = 0.0) -> "SchwarzChristoffelMap":
        return cls(gamma, (), (), 1j, 1j, 1.0)

    # -- derivative -------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.prevertices)

    @cached_property
    def _c(self) -> np.ndarray:
        return np.asarray(self.prevertices, dtype=float)

    @cached_property
    def _g(self) -> np.ndarray:
        return np.asarray(self.exponents, dtype=float)

    def _prep(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if np.any(z.imag < -1e-14 * np.maximum(1.0, np.abs(z))):
            raise RegionError("point below the real axis")
        return z.real + 1j * np.where(z.imag > 0, z.imag, 0.0)

    def _log_derivative(self, z: np.ndarray) -> np.ndarray:
        out = np.full(z.shape, math.log(self.scale) + 1j * self.gamma, dtype=complex)
        for c, g in zip(self.prevertices, self.exponents):
            d = z - c
            if np.any(d == 0):
                raise BranchPointError(f"evaluation at prevertex {c}")
            out = out + g * _log_branch(d)
        return out

    def derivative(self, z):
        zz = self._prep(z)
        out = np.exp(self._log_derivative(zz))
        return out if out.ndim else complex(out)

    def second_derivative(self, z):
        zz = self._prep(z)
        d1 = np.exp(self._log_derivative(zz))
        s = np.zeros(zz.shape, dtype=complex)
        for c, g in zip(self.prevertices, self.exponents):
            s = s + g / (zz - c)
        out = d1 * s
        return out if out.ndim else complex(out)

    def boundary_arguments(self) -> np.ndarray:
        """arg Phi' on (-inf, c_1), (c_1, c_2), ..., (c_N, inf)."""
        g = self._g
        tail = np.concatenate([np.cumsum(g[::-1])[::-1], [0.0]])
        return self.gamma + math.pi * tail

    # -- path integration ---------------------------------------------------
    @cached_property
    def _anchor_radius(self) -> np.ndarray:
        c = self._c
        if len(c) < 2:
            return np.full(len(c), np.inf)
        gaps = np.diff(c)
        left = np.concatenate([[np.inf], gaps])
        right = np.concatenate([gaps, [np.inf]])
        return 0.5 * np.minimum(left, right)

    @cached_property
    def _jacobi(self) -> list:
        return [roots_jacobi(_NQ, 0.0, g) for g in self.exponents]

    def _integrate_from(self, k: np.ndarray, z: np.ndarray) -> np.ndarray:
        """int_{c_k}^{z} Phi' along the straight segment, vectorised over (k, z)."""
        c, g = self._c, self._g
        start = c[k]
        diff = z - start
        L = np.abs(diff)
        e = np.where(L > 0, diff / np.where(L > 0, L, 1.0), 1.0 + 0j)
        e = e.real + 1j * np.where(e.imag > 0, e.imag, 0.0)
        out = np.zeros(z.shape, dtype=complex)
        first = np.minimum(L, self._anchor_radius[k])
        lnorm = math.log(self.scale) + 1j * self.gamma
        # singular first panel, grouped by anchor
        for kk in np.unique(k):
            m = (k == kk) & (first > 0)
            if not np.any(m):
                continue
            t, w = self._jacobi[kk]
            gk = g[kk]
            s = first[m]
            em = e[m]
            zeta = start[m][:, None] + (em * s)[:, None] * ((1.0 + t) / 2.0)[None, :]
            lg = np.full(zeta.shape, lnorm, dtype=complex)
            for j in range(len(c)):
                if j != kk:
                    lg = lg + g[j] * _log_branch(zeta - c[j])
            pref = np.exp((gk + 1.0) * (np.log(s / 2.0) + 1j * np.angle(em)))
            out[m] = pref * (np.exp(lg) @ w)
        pos = first.copy()
        active = pos < L * (1.0 - 1e-15)
        while np.any(active):
            idx = np.nonzero(active)[0]
            cur = start[idx] + e[idx] * pos[idx]
            dmin = np.min(np.abs(cur[:, None] - c[None, :]), axis=1)
            h = np.minimum(0.5 * dmin, L[idx] - pos[idx])
            zeta = cur[:, None] + (e[idx] * h)[:, None] * ((1.0 + _GL_T) / 2.0)[None, :]
            vals = np.exp(self._log_derivative(zeta))
            out[idx] += (vals @ _GL_W) * e[idx] * h / 2.0
            pos[idx] += h
            active[idx] = pos[idx] < L[idx] * (1.0 - 1e-15)
        return out

    @cached_property
    def _relative_anchor_images(self) -> np.ndarray:
        """Phi(c_k) - Phi(c_1)."""
        c = self._c
        n = len(c)
        out = np.zeros(n, dtype=complex)
        if n > 1:
            mid = 0.5 * (c[:-1] + c[1:]) + 0j
            ks = np.arange(n - 1)
            inc = self._integrate_from(ks, mid) - self._integrate_from(ks + 1, mid)
            out[1:] = np.cumsum(inc)
        return out

    def _nearest_anchor(self, z: np.ndarray) -> np.ndarray:
        return np.argmin(np.abs(z[..., None] - self._c), axis=-1)

    @cached_property
    def _offset(self) -> complex:
        """Phi(c_1), fixed by Phi(base_point) = base_value."""
        if not self.prevertices:
            return 0j
        b = np.array([self.base_point])
        k = self._nearest_anchor(b)
        rel = self._relative_anchor_images[k] + self._integrate_from(k, b)
        return complex(self.base_value - rel[0])

    def vertex_images(self) -> np.ndarray:
        return self._offset + self._relative_anchor_images

    def evaluate(self, z):
        """Phi(z) for z in the closed upper half-plane minus the prevertices."""
        zz = self._prep(z)
        flat = np.atleast_1d(zz).ravel()
        if not self.prevertices:
            out = self.base_value + self.scale * np.exp(1j * self.gamma) * (flat - self.base_point)
        else:
            k = self._nearest_anchor(flat)
            out = self._offset + self._relative_anchor_images[k] + self._integrate_from(k, flat)
        out = out.reshape(zz.shape)
        return out if out.ndim else complex(out)

    __call__ = evaluate

    def evaluate_along(self, z, via: complex) -> np.ndarray:
        """Phi(z) integrated from ``via`` instead of the nearest prevertex (path-independence check)."""
        zz = np.atleast_1d(self._prep(z))
        v = complex(self.evaluate(via))
        if not self.prevertices:
            return self.evaluate(zz)
        # integrate via -> z with Gauss-Legendre panels sized by prevertex distance
        out = np.full(zz.shape, v, dtype=complex)
        diff = zz - via
        L = np.abs(diff)
        e = diff / np.where(L > 0, L, 1.0)
        pos = np.zeros(zz.shape)
        active = L > 0
        while np.any(active):
            idx = np.nonzero(active)[0]
            cur = via + e[idx] * pos[idx]
            dmin = np.min(np.abs(cur[:, None] - self._c[None, :]), axis=1)
            h = np.minimum(0.5 * dmin, L[idx] - pos[idx])
            if np.any(h < 1e-13 * np.maximum(L[idx], 1.0)):
                raise BranchPointError("path passes through a prevertex")
            zeta = cur[:, None] + (e[idx] * h)[:, None] * ((1.0 + _GL_T) / 2.0)[None, :]
            out[idx] += (np.exp(self._log_derivative(zeta)) @ _GL_W) * e[idx] * h / 2.0
            pos[idx] += h
            active[idx] = pos[idx] < L[idx] * (1.0 - 1e-15)
        return out

    # -- reparametrization ---------------------------------------------------
    def precompose(self, alpha: float, beta: float, base_point: complex | None = None) -> "SchwarzChristoffelMap":
        """The map z -> Phi(alpha z + beta), alpha > 0, beta real."""
        if not alpha > 0:
            raise InputError("alpha must be > 0")
        bp = self.base_point if base_point is None else complex(base_point)
        c = tuple((x - beta) / alpha for x in self.prevertices)
        scale = self.scale * alpha ** (1.0 + sum(self.exponents))
        bv = complex(self.evaluate(alpha * bp + beta))
        return SchwarzChristoffelMap(self.gamma, c, self.exponents, bp, bv, scale)

    # -- inverse -------------------------------------------------------------
    @cached_property
    def _inverse_table(self):
        c = self._c
        centre = float(np.mean(c)) if len(c) else 0.0
        span = float(c[-1] - c[0]) if len(c) > 1 else 1.0
        theta = np.linspace(0.02, math.pi - 0.02, 41)
        R = span * np.logspace(-3, 6, 80)
        pts = [centre + (R[:, None] * np.exp(1j * theta)[None, :]).ravel()]
        for ck, rk in zip(c, self._anchor_radius):
            r = min(rk, span) * np.logspace(-5, 0, 20)
            pts.append(ck + (r[:, None] * np.exp(1j * theta)[None, :]).ravel())
        z = np.concatenate(pts)
        w = np.atleast_1d(self.evaluate(z))
        return z, w, cKDTree(np.stack([w.real, w.imag], axis=1))

    def _newton(self, w: np.ndarray, z: np.ndarray, tol: float, max_iter: int = 80):
        F = np.atleast_1d(self.evaluate(z)) - w
        scale = np.maximum(1.0, np.abs(w))
        done = np.abs(F) <= tol * scale
        for _ in range(max_iter):
            if np.all(done):
                break
            idx = np.nonzero(~done)[0]
            d1 = np.atleast_1d(self.derivative(z[idx]))
            step = -F[idx] / d1
            lam = np.ones(len(idx))
            # never cross the real axis
            down = step.imag < 0
            lam[down] = np.minimum(1.0, 0.5 * z[idx][down].imag / -step.imag[down])
            fnorm = np.abs(F[idx])
            for _ in range(30):
                cand = z[idx] + lam * step
                Fc = np.atleast_1d(self.evaluate(cand)) - w[idx]
                bad = ~(np.abs(Fc) < fnorm) & (lam > 1e-8)
                if not np.any(bad):
                    break
                lam = np.where(bad, 0.5 * lam, lam)
            z[idx] = cand
            F[idx] = Fc
            done[idx] = np.abs(Fc) <= tol * scale[idx]
        return z, F, done

    def _continuation(self, w: complex, tol: float) -> complex | None:
        """Track the preimage along a path from the base value to w."""
        w0 = self.base_value
        top = max(w.imag, w0.imag) + abs(w.real - w0.real) + 1.0
        path = [w0, complex(w0.real, top), complex(w.real, top), w]
        z = complex(self.base_point)
        for a, b in zip(path[:-1], path[1:]):
            t = 0.0
            h = 0.05
            while t < 1.0:
                tn = min(1.0, t + h)
                target = np.array([a + tn * (b - a)])
                zn, _, ok = self._newton(target, np.array([z]), tol, max_iter=40)
                if ok[0] and zn[0].imag > 0:
                    z, t = complex(zn[0]), tn
                    h = min(0.25, 2 * h)
                else:
                    h *= 0.5
                    if h < 1e-6:
                        return None
        return z

    def invert(self, w, initial_guess=None, tol: float = 1e-13):
        """Psi(w), the preimage of w in the upper half-plane."""
        ww = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        if initial_guess is None:
            zt, _, tree = self._inverse_table
            _, nn = tree.query(np.stack([ww.real, ww.imag], axis=1))
            z = zt[nn].copy()
        else:
            z = np.atleast_1d(np.asarray(initial_guess, dtype=complex)).ravel().copy()
            z = np.broadcast_to(z, ww.shape).copy()
        z, F, done = self._newton(ww, z, tol)
        for i in np.nonzero(~done | (z.imag <= 0))[0]:
            zi = self._continuation(complex(ww[i]), tol)
            if zi is None:
                raise InversionError(f"inversion failed at w={ww[i]!r} (residual {abs(F[i]):.3e})")
            z[i] = zi
        out = z.reshape(np.shape(w))
        return out if out.ndim else complex(out)

    def inverse_derivative(self, w, z=None):
        """Psi'(w) = 1 / Phi'(Psi(w))."""
        z = self.invert(w) if z is None else z
        return 1.0 / np.asarray(self.derivative(z))

    def inverse_second_derivative(self, w, z=None):
        """Psi''(w) = -Phi''(z) / Phi'(z)^3 at z = Psi(w)."""
        z = self.invert(w) if z is None else z
        d1 = np.asarray(self.derivative(z))
        return -np.asarray(self.second_derivative(z)) / d1 ** 3


# -- parameter problem ----------------------------------------------------------

@dataclass(frozen=True)
class Normalization:
    """Fixes the affine freedom z -> alpha z + beta of the half-plane.

    Default: Phi(base_point) = base_value. With ``pin_c1`` the first prevertex is
    pinned and only the distance from Phi(base_point) to the first vertex is matched.
    """

    base_point: complex = 1j
    base_value: complex | None = None
    pin_c1: float | None = None


def target_data(graph: LipschitzGraph):
    verts = graph.vertices()
    w = np.array([complex(u, a) for u, a, _, _ in verts])
    expo = np.array([(tl - tr) / math.pi for _, _, tl, tr in verts])
    gamma = math.atan(graph.tail_slope_right)
    return w, expo, gamma


def default_base_value(graph: LipschitzGraph) -> complex:
    return complex(0.0, graph.height(0.0) + 1.0)


@dataclass
class SolveReport:
    residuals: np.ndarray
    iterations: int
    max_residual: float


def _raw_map(gamma: float, c: np.ndarray, expo: np.ndarray, scale: float = 1.0) -> SchwarzChristoffelMap:
    return SchwarzChristoffelMap(gamma, tuple(c), tuple(expo), 1j, 0j, scale)


def _edge_lengths(gamma, c, expo) -> np.ndarray:
    m = _raw_map(gamma, c, expo)
    return np.abs(np.diff(m._relative_anchor_images))


def sc_solve(graph: LipschitzGraph, normalization: Normalization = Normalization(), *,
             tol: float = 1e-12, return_report: bool = False):
    """Solve the parameter problem for a polygonal graph."""
    w, expo, gamma = target_data(graph)
    n = len(w)
    bv = default_base_value(graph) if normalization.base_value is None else complex(normalization.base_value)
    if graph.classify(bv, 1e-12) is not RegionTag.UPPER:
        raise InputError(f"base value {bv!r} is not above the graph")
    if n == 0:
        theta = math.atan(graph.tail_slope_right)
        m = SchwarzChristoffelMap(theta, (), (), normalization.base_point, bv, 1.0)
        rep = SolveReport(np.zeros(0), 0, 0.0)
        return (m, rep) if return_report else m
    target_len = np.abs(np.diff(w))
    iters = 0
    if n <= 2:
        c = np.array([0.0, 1.0])[:n]
    else:
        # unknowns: log gaps 2..n-1 with c_2 - c_1 = 1
        x0 = np.log(target_len[1:] / target_len[0])

        def resid(x):
            c = np.concatenate([[0.0], np.cumsum(np.concatenate([[1.0], np.exp(x)]))])
            if np.min(np.diff(c)) < CROWDING_GAP:
                raise CrowdingError("prevertex gap below 1e-12")
            L = _edge_lengths(gamma, c, expo)
            return np.log(L[1:] / L[0]) - np.log(target_len[1:] / target_len[0])

        sol = least_squares(resid, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200 * (n + 1))
        iters = int(sol.nfev)
        c = np.concatenate([[0.0], np.cumsum(np.concatenate([[1.0], np.exp(sol.x)]))])
        if np.max(np.abs(sol.fun)) > 1e-8:
            raise SolverError("side-length problem did not converge", sol.fun)
    scale = 1.0
    if n >= 2:
        scale = float(target_len[0] / _edge_lengths(gamma, c, expo)[0])
    # raw map with Phi(c_1) = w_1
    raw = SchwarzChristoffelMap(gamma, tuple(c), tuple(expo), 1j, 0j, scale)
    shift = w[0] - raw._offset
    raw = SchwarzChristoffelMap(gamma, tuple(c), tuple(expo), 1j, raw.base_value + shift, scale)
    bp = complex(normalization.base_point)
    if normalization.pin_c1 is None:
        zstar = complex(raw.invert(bv))
        alpha, beta = zstar.imag / bp.imag, zstar.real - bp.real * zstar.imag / bp.imag
    else:
        pin = float(normalization.pin_c1)

        # match |Phi(base_point) - w_1|; it grows from 0 to infinity with alpha
        def height(log_alpha):
            al = math.exp(log_alpha)
            return abs(complex(raw.evaluate(c[0] - al * pin + al * bp)) - w[0]) - abs(bv - w[0])

        lo, hi = -30.0, 30.0
        try:
            la = brentq(height, lo, hi, xtol=1e-15)
        except ValueError as exc:
            raise SolverError(f"pinned normalization has no solution: {exc}") from exc
        alpha = math.exp(la)
        beta = c[0] - alpha * pin
    m = raw.precompose(alpha, beta, bp)
    res = np.abs(m.vertex_images() - w)
    if np.min(np.diff(m._c), initial=np.inf) < CROWDING_GAP:
        raise CrowdingError("prevertex gap below 1e-12 after normalization")
    rep = SolveReport(res, iters, float(np.max(res)))
    if rep.max_residual > 1e-6 * max(1.0, float(np.max(np.abs(w)))):
        raise SolverError(f"vertex residual {rep.max_residual:.3e} too large", res)
    return (m, rep) if return_report else m


# -- certificates -----------------------------------------------------------------

@dataclass
class SectorCertificate:
    samples: list
    worst_ratio: float
    min_re: float
    M: float
    rel_tol: float = 1e-9
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.min_re > 0 and self.worst_ratio <= self.M * (1.0 + self.rel_tol) + 1e-15)

    def as_certificate(self, name: str = "sector") -> Certificate:
        worst = max(self.samples, key=lambda s: abs(s[1].imag) / s[1].real if s[1].real > 0 else math.inf)
        return Certificate(name, self.worst_ratio, self.M, {"min_re": self.min_re, "n": len(self.samples),
                                                             "worst_z": worst[0], "worst_value": worst[1]},
                           rel_slack=self.rel_tol, passed=self.passed)


def sample_upper(m: SchwarzChristoffelMap, n: int, seed: int = 0) -> np.ndarray:
    """Random points in C+, half near the prevertices."""
    rng = np.random.default_rng(seed)
    c = np.asarray(m.prevertices) if m.prevertices else np.zeros(1)
    lo, hi = c[0] - 3.0, c[-1] + 3.0
    n1 = n // 2
    x = rng.uniform(lo, hi, n1)
    y = 10.0 ** rng.uniform(-4, 2, n1)
    near = c[rng.integers(0, len(c), n - n1)] + 10.0 ** rng.uniform(-4, 0, n - n1) * np.exp(
        1j * rng.uniform(0.01, math.pi - 0.01, n - n1))
    return np.concatenate([x + 1j * y, near])


def sector_certificate(m: SchwarzChristoffelMap, M: float, z=None, n: int = 1000, seed: int = 0,
                       inverse: bool = False, rel_tol: float = 1e-9) -> SectorCertificate:
    """Re F > 0 and |Im F| <= M Re F for F = Phi' (or Psi' at w = Phi(z))."""
    z = sample_upper(m, n, seed) if z is None else np.asarray(z, dtype=complex)
    d = np.asarray(m.derivative(z))
    if inverse:
        d = 1.0 / d
    ratio = np.abs(d.imag) / np.where(d.real > 0, d.real, np.nan)
    worst = float(np.nanmax(ratio)) if np.all(d.real > 0) else math.inf
    return SectorCertificate([(complex(a), complex(b)) for a, b in zip(z, d)], worst, float(np.min(d.real)),
                             M, rel_tol)


def _gap_samples(m: SchwarzChristoffelMap, per_gap: int = 9):
    c = list(m.prevertices)
    fr = np.linspace(0.1, 0.9, per_gap)
    if not c:
        return [np.linspace(-5, 5, per_gap)]
    span = max(1.0, c[-1] - c[0])
    gaps = [c[0] - span * 3.0 * (1 - fr)]
    gaps += [a + fr * (b - a) for a, b in zip(c[:-1], c[1:])]
    gaps.append(c[-1] + span * 3.0 * fr)
    return gaps


def boundary_argument_certificate(m: SchwarzChristoffelMap, M: float, per_gap: int = 9) -> Certificate:
    """arg Phi' is constant on each prevertex gap, equals the step formula and stays in [-atan M, atan M]."""
    expected = m.boundary_arguments()
    theta0 = math.atan(M)
    dev = 0.0
    worst = 0.0
    for xs, val in zip(_gap_samples(m, per_gap), expected):
        arg = np.angle(np.asarray(m.derivative(xs + 0j)))
        dev = max(dev, float(np.max(np.abs(arg - val))))
        worst = max(worst, float(np.max(np.abs(arg))))
    ok = dev <= 1e-9 and worst <= theta0 + 1e-9
    return Certificate("boundary_argument", worst, theta0, {"step_deviation": dev, "values": list(expected)},
                       passed=ok)


def tangency_certificate(m: SchwarzChristoffelMap, graph: LipschitzGraph, per_gap: int = 9,
                         tol: float = 1e-6) -> Certificate:
    """At boundary points off the prevertices arg Phi'(x) is the direction of the image edge."""
    xs = np.concatenate(_gap_samples(m, per_gap)) + 0j
    arg = np.angle(np.asarray(m.derivative(xs)))
    img = np.asarray(m.evaluate(xs))
    edge = np.arctan(graph.slope_at(img.real))
    on_curve = float(np.max(np.abs(graph.vertical_offset(img))))
    dev = float(np.max(np.abs(arg - edge)))
    return Certificate("boundary_tangency", dev, tol, {"max_offset_from_curve": on_curve, "n": len(xs)},
                       passed=dev <= tol and on_curve <= 1e-6 * max(1.0, graph.extent()))


def round_trip_certificate(m: SchwarzChristoffelMap, w, tol: float = 1e-9) -> Certificate:
    """|Phi(Psi(w)) - w| and |Phi'(Psi(w)) Psi'(w) - 1| over a sample of w."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(m.invert(w))
    rt = float(np.max(np.abs(np.asarray(m.evaluate(z)) - w) / np.maximum(1.0, np.abs(w))))
    prod = float(np.max(np.abs(np.asarray(m.derivative(z)) * m.inverse_derivative(w, z) - 1.0)))
    return Certificate("inverse_round_trip", max(rt, prod), tol,
                       {"round_trip": rt, "derivative_product": prod, "n": int(w.size),
                        "min_im_preimage": float(np.min(z.imag))},
                       passed=rt <= tol and prod <= tol and bool(np.all(z.imag > 0)))


def sample_domain(graph: LipschitzGraph, n: int, seed: int = 0, span: float = 3.0) -> np.ndarray:
    """Random points above the graph."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-span, span, n)
    return u + 1j * (graph.height(u) + 10.0 ** rng.uniform(-2, 1, n))


# -- Caratheodory experiment --------------------------------------------------------

@dataclass
class CaratheodoryRow:
    j: int
    probe: complex
    value: complex | None
    successive_diff: float | None
    error: str | None = None


@dataclass
class CaratheodoryTable:
    rows: list
    max_diffs: dict
    w0: complex

    def decreasing(self) -> bool:
        vals = [v for _, v in sorted(self.max_diffs.items()) if v is not None]
        return all(b < a for a, b in zip(vals, vals[1:]))

    def to_csv_rows(self) -> list:
        out = []
        for r in self.rows:
            out.append([r.j, f"{r.probe.real:.17g}{r.probe.imag:+.17g}j",
                        "" if r.value is None else repr(r.value.real),
                        "" if r.value is None else repr(r.value.imag),
                        "" if r.successive_diff is None else repr(r.successive_diff)])
        return out


def caratheodory_experiment(graph: LipschitzGraph, j_range: Sequence[int], probes: Sequence[complex],
                            w0: complex | None = None, base_point: complex = 1j) -> CaratheodoryTable:
    """Solve on each dyadic approximation with Phi_j(base_point) = w0 and compare at the probes."""
    js = sorted(int(j) for j in j_range)
    probes = [complex(p) for p in probes]
    if any(p.imag <= 0 for p in probes):
        raise InputError("probes must lie in the upper half-plane")
    if w0 is None:
        w0 = complex(0.0, graph.height(0.0) + 2.0 * graph.M * 2.0 ** -js[0] + 1.0)
    values: dict[int, np.ndarray | None] = {}
    errors: dict[int, str] = {}
    for j in js:
        try:
            gj = polygonal_approximation(graph, j)
            m = sc_solve(gj, Normalization(base_point, w0))
            values[j] = np.asarray(m.evaluate(np.array(probes)))
        except Exception as exc:  # failures become table markers
            values[j] = None
            errors[j] = f"{type(exc).__name__}: {exc}"
    rows = []
    max_diffs: dict[int, float | None] = {}
    prev = None
    for j in js:
        v = values[j]
        diffs = None
        if v is not None and prev is not None:
            diffs = np.abs(v - prev)
            max_diffs[j] = float(np.max(diffs))
        elif j != js[0]:
            max_diffs[j] = None
        for i, p in enumerate(probes):
            rows.append(CaratheodoryRow(j, p, None if v is None else complex(v[i]),
                                        None if diffs is None else float(diffs[i]), errors.get(j)))
        prev = v
    return CaratheodoryTable(rows, max_diffs, complex(w0))
