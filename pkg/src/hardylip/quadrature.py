"""Adaptive integration along unbounded Lipschitz graphs.

Integrals over Gamma are pulled back to the parameter u. The finite window
holds every breakpoint; the two half-lines beyond it are mapped onto (0, 1] by
u = c +- D s^(-1/(k-1)), where k is the assumed algebraic decay of the
integrand, which makes the transformed integrand bounded at s = 0.
Gauss-Kronrod 7/15 pairs estimate the error per panel.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ProximityError, QuadratureConvergenceError, RegionError
from .geometry import LipschitzGraph, NTCone, RegionTag, in_cone
from .kernels import k_kernel

# QUADPACK G7/K15 abscissae and weights
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
W_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_G = np.zeros(15)
# Gauss nodes sit at odd positions of the Kronrod set
_g = np.concatenate([_WG[:-1], _WG[::-1]])
W_G[1::2] = _g

FLAT = LipschitzGraph.flat()


@dataclass(frozen=True)
class QuadratureSpec:
    R: float = 20.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_panels: int = 4000
    tail_k: float = 2.0
    # evaluation points closer than this to Gamma are refused
    min_distance: float = 1e-3

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("truncation radius R must be > 0")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be > 0")
        if self.max_panels < 4:
            raise ValueError("max_panels must be >= 4")
        if not self.tail_k > 1:
            raise ValueError("tail decay exponent must exceed 1")

    @classmethod
    def from_dict(cls, d: dict) -> "QuadratureSpec":
        keymap = {"R": "R", "rel_tol": "rel_tol", "abs_tol": "abs_tol", "max_panels": "max_panels",
                  "tail_k": "tail_k", "min_distance": "min_distance"}
        kw = {keymap[k]: v for k, v in d.items() if k in keymap}
        if "max_panels" in kw:
            kw["max_panels"] = int(kw["max_panels"])
        return cls(**kw)

    def to_dict(self) -> dict:
        return {"R": self.R, "rel_tol": self.rel_tol, "abs_tol": self.abs_tol,
                "max_panels": self.max_panels, "tail_k": self.tail_k, "min_distance": self.min_distance}

    def with_(self, **kw) -> "QuadratureSpec":
        return replace(self, **kw)


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class IntegralResult:
    value: complex
    error_estimate: float
    tail_estimate: float
    panels_used: int
    converged: bool

    def to_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "error_estimate": self.error_estimate,
                "tail_estimate": self.tail_estimate, "panels_used": self.panels_used,
                "converged": self.converged}


_FINITE, _LEFT, _RIGHT, _GRADED = 0, 1, 2, 3


def _fsum_complex(vals) -> complex:
    vals = list(vals)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def _panel_rule(fv: np.ndarray, half: np.ndarray):
    """K15 value and QUADPACK-style error for a batch of panels (rows of fv)."""
    k = fv @ W_K
    g = fv @ W_G
    mean = k / 2.0
    resasc = np.abs(fv - mean[:, None]) @ W_K
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5), err)
    scaled = np.maximum(scaled, 50.0 * np.finfo(float).eps * (np.abs(fv) @ W_K))
    return k * half, scaled * np.abs(half)


def integrate_curve(graph: LipschitzGraph, integrand: Callable[[np.ndarray], np.ndarray],
                    spec: QuadratureSpec = DEFAULT_SPEC, center_u: float = 0.0, *,
                    measure: str = "dz", shift: float = 0.0, tail_k: float | None = None,
                    breaks: Sequence[float] = (), singular: Sequence[float] = (),
                    raise_on_fail: bool = True) -> IntegralResult:
    """Integrate ``integrand(zeta)`` over Gamma + i*shift.

    ``measure`` selects d zeta ("dz"), arc length |d zeta| ("ds") or du ("du").
    Breakpoints of the graph, ``breaks`` and ``singular`` are always panel
    boundaries; pieces touching a ``singular`` knot are graded towards it.
    """
    if measure not in ("dz", "ds", "du"):
        raise ValueError(f"unknown measure {measure!r}")
    k = spec.tail_k if tail_k is None else float(tail_k)
    if not k > 1:
        raise ValueError("tail decay exponent must exceed 1")
    beta = 1.0 / (k - 1.0)
    sing = sorted({float(b) for b in singular if math.isfinite(b)})
    ub = list(graph.u) + [float(b) for b in breaks if math.isfinite(b)] + sing
    lo = min(center_u - spec.R, min(ub))
    hi = max(center_u + spec.R, max(ub))
    knots = sorted(set([lo, hi, center_u] + [x for x in ub if lo <= x <= hi]))
    # a plain knot within rounding distance of a singular one would hide it
    snap = 1e-12 * max(1.0, hi - lo)
    knots = [x for x in knots if x in sing or all(abs(x - y) > snap for y in sing)]
    pieces = []
    max_len = max((hi - lo) / 32.0, 1e-300)
    for a, b in zip(knots[:-1], knots[1:]):
        if a in sing or b in sing:
            # u = end + L t^4 from the singular end: a factor |u - end|^g becomes t^(4g + 3)
            halves = []
            if a in sing and b in sing:
                m = 0.5 * (a + b)
                halves = [(a, m - a), (b, m - b)]
            elif a in sing:
                halves = [(a, b - a)]
            else:
                halves = [(b, a - b)]
            for end, length in halves:
                pieces += [(_GRADED, x, x + 0.25, end, length) for x in (0.0, 0.25, 0.5, 0.75)]
            continue
        n = max(1, int(math.ceil((b - a) / max_len)))
        edges = np.linspace(a, b, n + 1)
        pieces += [(_FINITE, float(x), float(y), 0.0, 0.0) for x, y in zip(edges[:-1], edges[1:])]
    for kind in (_LEFT, _RIGHT):
        pieces += [(kind, 0.0, 0.25, 0.0, 0.0), (kind, 0.25, 0.5, 0.0, 0.0), (kind, 0.5, 1.0, 0.0, 0.0)]
    DL = center_u - lo
    DR = hi - center_u
    # tail anchors differ from the window ends only if center_u is not centred
    anchor = center_u

    def nodes_of(batch):
        kinds = np.array([p[0] for p in batch])
        a = np.array([p[1] for p in batch])
        b = np.array([p[2] for p in batch])
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = mid[:, None] + half[:, None] * NODES[None, :]
        u = x.copy()
        jac = np.ones_like(x)
        for kind, D, sgn in ((_LEFT, DL, -1.0), (_RIGHT, DR, 1.0)):
            m = kinds == kind
            if np.any(m):
                s = x[m]
                u[m] = anchor + sgn * D * s ** (-beta)
                jac[m] = D * beta * s ** (-beta - 1.0)
        m = kinds == _GRADED
        if np.any(m):
            end = np.array([p[3] for p in batch])[m][:, None]
            length = np.array([p[4] for p in batch])[m][:, None]
            t = x[m]
            u[m] = end + length * t ** 4
            jac[m] = np.abs(length) * 4.0 * t ** 3
            # nodes that rounded onto the singular knot carry sub-ulp mass; drop them
            hit = np.zeros(x.shape, dtype=bool)
            hit[m] = u[m] == end
            jac[hit] = 0.0
            return u, jac, half, hit
        return u, jac, half, None

    def evaluate(batch):
        u, jac, half, hit = nodes_of(batch)
        if hit is not None and np.any(hit):
            # move them to a harmless interior point; their weight is zero
            rows = np.nonzero(hit)[0]
            u[hit] = np.array([batch[r][3] + 0.5 * batch[r][4] for r in rows])
        h = graph.height(u)
        zeta = u + 1j * (h + shift)
        slope = graph.slope_at(u)
        f = np.asarray(integrand(zeta.ravel()), dtype=complex).reshape(u.shape)
        if measure == "dz":
            f = f * (1.0 + 1j * slope)
        elif measure == "ds":
            f = f * np.sqrt(1.0 + slope * slope)
        f = f * jac
        if not np.all(np.isfinite(f)):
            bad = np.argwhere(~np.isfinite(f))[0]
            raise FloatingPointError(f"integrand not finite at zeta={zeta[tuple(bad)]!r}")
        return _panel_rule(f, half)

    vals, errs = evaluate(pieces)
    heap = [(-e, i) for i, e in enumerate(errs)]
    heapq.heapify(heap)
    store = {i: (p, v, e) for i, (p, v, e) in enumerate(zip(pieces, vals, errs))}
    next_id = len(pieces)
    tiny = 1e-14

    def totals():
        v = _fsum_complex(s[1] for s in store.values())
        e = math.fsum(s[2] for s in store.values())
        return v, e

    value, err = totals()
    converged = err <= max(spec.abs_tol, spec.rel_tol * abs(value))
    while not converged and len(store) < spec.max_panels:
        target = max(spec.abs_tol, spec.rel_tol * abs(value))
        # split the worst panels until the untouched remainder fits the budget
        chosen = []
        remaining = err
        limit = max(1, len(store) // 4)
        while heap and len(chosen) < limit and remaining > 0.5 * target:
            ne, i = heapq.heappop(heap)
            p = store[i][0]
            if p[2] - p[1] <= tiny * max(1.0, abs(p[1])):
                continue
            chosen.append(i)
            remaining += ne
        if not chosen:
            break
        children = []
        for i in chosen:
            kind, a, b, A, B = store.pop(i)[0]
            m = 0.5 * (a + b)
            children += [(kind, a, m, A, B), (kind, m, b, A, B)]
        cv, ce = evaluate(children)
        for p, v, e in zip(children, cv, ce):
            store[next_id] = (p, v, e)
            heapq.heappush(heap, (-e, next_id))
            next_id += 1
        value, err = totals()
        converged = err <= max(spec.abs_tol, spec.rel_tol * abs(value))
    tail_err = math.fsum(s[2] for s in store.values() if s[0][0] in (_LEFT, _RIGHT))
    res = IntegralResult(value, err - tail_err, tail_err, len(store), bool(converged))
    if not converged and raise_on_fail:
        raise QuadratureConvergenceError(
            f"no convergence with {len(store)} panels: |value|={abs(value):.3e}, error={err:.3e}", res)
    return res


def integrate_line(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec = DEFAULT_SPEC,
                   y: float = 0.0, center: float = 0.0, *, tail_k: float | None = None,
                   breaks: Sequence[float] = (), singular: Sequence[float] = ()) -> IntegralResult:
    """Integrate f(t + i y) dt over the real line."""
    return integrate_curve(FLAT, f, spec, center, measure="du", shift=y, tail_k=tail_k, breaks=breaks,
                           singular=singular)


# -- transforms -------------------------------------------------------------

def _check_clearance(graph: LipschitzGraph, w: complex, spec: QuadratureSpec):
    if graph.classify(w, spec.min_distance) is RegionTag.BOUNDARY or \
            float(graph.distance(w)[0]) < spec.min_distance:
        raise ProximityError(f"evaluation point {w!r} within {spec.min_distance} of the curve")


def cauchy_integral(graph: LipschitzGraph, boundary_fn, w: complex, spec: QuadratureSpec = DEFAULT_SPEC,
                    *, tail_k: float | None = None) -> complex:
    """(1/2 pi i) int_Gamma f(zeta) / (zeta - w) d zeta."""
    w = complex(w)
    _check_clearance(graph, w, spec)
    res = integrate_curve(graph, lambda z: boundary_fn(z) / (z - w), spec, w.real, tail_k=tail_k)
    return res.value / (2j * math.pi)


def k_transform(graph: LipschitzGraph, boundary_fn, zeta0: complex, z: complex,
                spec: QuadratureSpec = DEFAULT_SPEC, *, tail_k: float | None = None,
                full: bool = False):
    """int_Gamma K_z(zeta, zeta0) f(zeta) d zeta, for zeta0 + z above and zeta0 - z below Gamma."""
    zeta0 = complex(zeta0)
    z = complex(z)
    tol = spec.min_distance
    if graph.classify(zeta0 + z, tol) is not RegionTag.UPPER:
        raise RegionError(f"zeta0 + z = {zeta0 + z!r} is not in the upper domain")
    if graph.classify(zeta0 - z, tol) is not RegionTag.LOWER:
        raise RegionError(f"zeta0 - z = {zeta0 - z!r} is not in the lower domain")
    _check_clearance(graph, zeta0 + z, spec)
    _check_clearance(graph, zeta0 - z, spec)
    res = integrate_curve(graph, lambda t: k_kernel(t, zeta0, z) * boundary_fn(t), spec, zeta0.real,
                          tail_k=tail_k, breaks=((zeta0 + z).real, (zeta0 - z).real))
    return res if full else res.value


def kernel_mass(graph: LipschitzGraph, zeta0: complex, z: complex, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    return k_transform(graph, lambda t: np.ones_like(t), zeta0, z, spec, tail_k=2.0)


def k_transform_function(graph: LipschitzGraph, boundary_fn, zeta0: complex,
                         spec: QuadratureSpec = DEFAULT_SPEC, tail_k: float | None = None):
    """w -> int K_{w - zeta0}(zeta, zeta0) f(zeta) d zeta, the local extension near zeta0."""
    def G(w):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        return np.array([k_transform(graph, boundary_fn, zeta0, x - zeta0, spec, tail_k=tail_k) for x in w])
    return G


@dataclass
class HardyNorm:
    p: float
    taus: list[float]
    per_tau: list[float]
    sup_estimate: float
    estimate: bool = True

    def to_dict(self) -> dict:
        return {"p": self.p, "tau": self.taus, "m": self.per_tau, "sup_estimate": self.sup_estimate,
                "is_lower_estimate": self.estimate}


def lp_norm_on_curve(graph: LipschitzGraph, F, p: float, spec: QuadratureSpec = DEFAULT_SPEC,
                     shift: float = 0.0, *, tail_k: float | None = None, center_u: float = 0.0,
                     breaks: Sequence[float] = ()) -> float:
    """(int_Gamma |F(zeta + i shift)|^p ds)^(1/p)."""
    res = integrate_curve(graph, lambda z: np.abs(F(z)) ** p, spec, center_u, measure="ds", shift=shift,
                          tail_k=p if tail_k is None else tail_k, breaks=breaks)
    return float(res.value.real) ** (1.0 / p)


def hardy_norm(graph: LipschitzGraph, F, p: float, tau_grid: Sequence[float],
               spec: QuadratureSpec = DEFAULT_SPEC, *, tail_k: float | None = None,
               center_u: float = 0.0) -> HardyNorm:
    """Grid estimate of sup_tau (int_{Gamma_tau} |F|^p ds)^(1/p); a lower estimate of the norm."""
    taus = [float(t) for t in tau_grid]
    if not taus:
        raise ValueError("empty grid: tau")
    if any(not t > 0 for t in taus):
        raise ValueError("tau grid must be strictly positive")
    if not p > 1:
        raise ValueError("p must exceed 1")
    vals = [lp_norm_on_curve(graph, F, p, spec, t, tail_k=tail_k, center_u=center_u) for t in taus]
    return HardyNorm(float(p), taus, vals, max(vals))


# -- non-tangential limits ----------------------------------------------------

@dataclass
class LimitProbe:
    radii: list[float]
    values: list[complex]
    extrapolated_limit: complex
    converged: bool
    deviations: list[float] = field(default_factory=list)


def richardson_limit(radii: Sequence[float], values: Sequence[complex]) -> complex:
    """Two Richardson steps on the last three samples, error model c1 r + c2 r^2."""
    r = np.asarray(radii[-3:], dtype=float)
    v = np.asarray(values[-3:], dtype=complex)
    if len(r) < 3:
        return complex(v[-1])
    # fit v = L + c1 r + c2 r^2 exactly through three points
    A = np.stack([np.ones(3), r, r * r], axis=1)
    sol = np.linalg.solve(A, v)
    return complex(sol[0])


def nontangential_limit_probe(graph: LipschitzGraph, F, cone: NTCone, radii: Sequence[float],
                              direction: float | None = None) -> LimitProbe:
    """Sample F along a ray inside the cone and extrapolate to the vertex.

    ``direction`` is the ray angle; by default the cone bisector.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 2 or any(b >= a for a, b in zip(radii, radii[1:])) or radii[-1] <= 0:
        raise ValueError("radii must be positive and strictly decreasing")
    zeta0 = complex(graph.zeta(cone.vertex_u))
    theta = cone.tangent_angle_phi0 + math.pi / 2 if direction is None else float(direction)
    e = complex(math.cos(theta), math.sin(theta))
    pts = np.array([zeta0 + r * e for r in radii])
    if not np.all(in_cone(cone, zeta0, pts)):
        raise RegionError("probe ray is not strictly inside the cone")
    if np.any(graph.vertical_offset(pts) <= 0):
        raise RegionError("probe point left the upper domain")
    vals = [complex(v) for v in np.atleast_1d(F(pts))]
    lim = richardson_limit(radii, vals)
    dev = [abs(b - a) for a, b in zip(vals, vals[1:])]
    conv = all(d2 <= d1 for d1, d2 in zip(dev, dev[1:]))
    return LimitProbe(radii, vals, lim, conv, dev)


# -- L^p bound of the vertical K-transform ------------------------------------

def k_transform_lp_norm(graph: LipschitzGraph, f, p: float, tau: float,
                        outer: QuadratureSpec | None = None, inner: QuadratureSpec | None = None,
                        data_decay: float = 2.0) -> float:
    """(int_{Gamma_tau} |int_Gamma K_{i tau}(zeta, zeta0) f(zeta) d zeta|^p |dw|)^(1/p), w = zeta0 + i tau."""
    outer = outer or QuadratureSpec(rel_tol=1e-6, abs_tol=1e-12, max_panels=2000)
    inner = inner or QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, max_panels=4000, min_distance=0.0)
    z = 1j * float(tau)

    def transform_abs_p(w):
        zeta0 = w - z
        vals = np.empty(w.shape, dtype=float)
        for i, z0 in enumerate(zeta0):
            r = integrate_curve(graph, lambda t: k_kernel(t, z0, z) * f(t), inner, z0.real,
                                tail_k=data_decay + 2.0, breaks=(z0.real,))
            vals[i] = abs(r.value) ** p
        return vals

    res = integrate_curve(graph, transform_abs_p, outer, measure="ds", shift=float(tau), tail_k=p)
    return float(res.value.real) ** (1.0 / p)


def k_transform_lp_certificate(graph: LipschitzGraph, f, p: float, tau: float, data_decay: float = 2.0,
                               outer: QuadratureSpec | None = None):
    """Measured norm against (1+M^2)^(1/(2p)+1/2) C' ||f||_{L^p(Gamma)}."""
    from .certificate import Certificate
    from .kernels import vertical_constant

    measured = k_transform_lp_norm(graph, f, p, tau, outer, data_decay=data_decay)
    fnorm = lp_norm_on_curve(graph, f, p, QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14), tail_k=p * data_decay)
    const = (1.0 + graph.M ** 2) ** (1.0 / (2.0 * p) + 0.5) * vertical_constant(graph.M)
    return Certificate("k_transform_Lp", measured, const * fnorm, {"p": p, "tau": tau, "data_norm": fnorm},
                       constant=const, rel_slack=1e-9)
