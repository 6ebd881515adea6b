"""The isomorphism T between H^p of the graph domain and H^p of the half-plane.

Also: rational test functions with explicit norm bounds, pairings, the
auxiliary functions h and H with their removable values, and the bound
certificates of the surjectivity argument. Powers (.)^(1/p) use the principal
branch; Phi' and Psi' take values in the sector Re > 0, so no cut is crossed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gamma as gamma_fn

from .certificate import Certificate, worst_of
from .conformal import SchwarzChristoffelMap
from .errors import InputError, PreconditionError, RegionError
from .geometry import LipschitzGraph, RegionTag
from .quadrature import DEFAULT_SPEC, QuadratureSpec, cauchy_integral, hardy_norm, integrate_curve, integrate_line

DEFAULT_TAU_GRID = tuple(np.logspace(-2, 1, 10))


def conjugate(p: float) -> float:
    if not p > 1:
        raise InputError(f"exponent must exceed 1, got {p}")
    return p / (p - 1.0)


# -- function handles ----------------------------------------------------------

class HardyFunction:
    """A holomorphic function that can be evaluated on arrays."""

    def __call__(self, w):
        raise NotImplementedError

    def boundary(self, zeta):
        """Boundary values; for continuous handles the function itself."""
        return self(zeta)


@dataclass(frozen=True)
class RationalFunction(HardyFunction):
    """sum c / (w - alpha)^k over terms (alpha, k, c)."""

    terms: tuple

    def __post_init__(self):
        clean = []
        for t in self.terms:
            alpha, k, c = t
            if int(k) != k or k < 1:
                raise InputError(f"pole order must be a positive integer, got {k}")
            clean.append((complex(alpha), int(k), complex(c)))
        if not clean:
            raise InputError("rational function needs at least one term")
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def simple(cls, *poles, coefficient: complex = 1.0) -> "RationalFunction":
        return cls(tuple((a, 1, coefficient) for a in poles))

    @property
    def poles(self) -> list:
        return sorted({t[0] for t in self.terms}, key=lambda a: (a.real, a.imag))

    def decay_order(self) -> int:
        """Order of vanishing at infinity (lower bound when leading terms cancel)."""
        return min(k for _, k, _ in self.terms)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape, dtype=complex)
        for alpha, k, c in self.terms:
            out = out + c / (w - alpha) ** k
        return out if out.ndim else complex(out)

    def to_dict(self) -> dict:
        return {"terms": [[[a.real, a.imag], k, [c.real, c.imag]] for a, k, c in self.terms]}

    @classmethod
    def from_dict(cls, d: dict) -> "RationalFunction":
        try:
            return cls(tuple((complex(*a), int(k), complex(*c)) for a, k, c in d["terms"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed rational function: {exc}") from exc


TO_HALF_PLANE = "ToHalfPlane"
TO_DOMAIN = "ToDomain"


@dataclass(frozen=True)
class Pullback(HardyFunction):
    """T F (ToHalfPlane) or T^-1 f (ToDomain) as an evaluatable handle."""

    map: SchwarzChristoffelMap
    inner: Callable
    p: float
    direction: str = TO_HALF_PLANE

    def __post_init__(self):
        conjugate(self.p)
        if self.direction not in (TO_HALF_PLANE, TO_DOMAIN):
            raise InputError(f"unknown direction {self.direction!r}")

    def __call__(self, x):
        if self.direction == TO_HALF_PLANE:
            return apply_T(self.map, self.inner, self.p, x)
        return apply_T_inverse(self.map, self.inner, self.p, x)


@dataclass(frozen=True)
class CauchyExtension(HardyFunction):
    """F(w) = (1/2 pi i) int_Gamma f(zeta)/(zeta - w) d zeta for boundary data f."""

    graph: LipschitzGraph
    data: Callable
    spec: QuadratureSpec = DEFAULT_SPEC

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.array([cauchy_integral(self.graph, self.data, x, self.spec) for x in w.ravel()]).reshape(w.shape)
        return out if out.ndim else complex(out)

    def boundary(self, zeta):
        return self.data(zeta)


# -- the operator T --------------------------------------------------------------

def apply_T(m: SchwarzChristoffelMap, F: Callable, p: float, z):
    """TF(z) = F(Phi(z)) Phi'(z)^(1/p)."""
    conjugate(p)
    z = np.asarray(z, dtype=complex)
    out = np.asarray(F(np.asarray(m.evaluate(z)))) * np.asarray(m.derivative(z)) ** (1.0 / p)
    return out if out.ndim else complex(out)


def apply_T_inverse(m: SchwarzChristoffelMap, f: Callable, p: float, w, graph: LipschitzGraph | None = None):
    """T^-1 f(w) = f(Psi(w)) Psi'(w)^(1/p)."""
    conjugate(p)
    w = np.asarray(w, dtype=complex)
    if graph is not None and np.any(graph.vertical_offset(w) <= 0):
        raise RegionError("T^-1 needs points above the graph")
    z = np.asarray(m.invert(w))
    out = np.asarray(f(z)) * np.asarray(m.inverse_derivative(w, z)) ** (1.0 / p)
    return out if out.ndim else complex(out)


def _sum_exponent(m: SchwarzChristoffelMap) -> float:
    return float(sum(m.exponents))


def boundary_norm_identity(m: SchwarzChristoffelMap, graph: LipschitzGraph, F: Callable, p: float,
                           spec: QuadratureSpec | None = None, decay: float = 1.0) -> Certificate:
    """int_R |TF(x)|^p dx against int_Gamma |F|^p |d zeta|, both by quadrature.

    ``decay`` is the order with which F vanishes at infinity.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, max_panels=20000)
    s = _sum_exponent(m)
    k_line = p * decay * (1.0 + s) - s
    lhs = integrate_line(lambda x: np.abs(apply_T(m, F, p, x)) ** p, spec, tail_k=k_line,
                         singular=m.prevertices).value.real
    rhs = integrate_curve(graph, lambda zeta: np.abs(F(zeta)) ** p, spec, measure="ds",
                          tail_k=p * decay).value.real
    rel = abs(lhs - rhs) / abs(rhs)
    return Certificate("boundary_norm_identity", rel, 1e-4, {"p": p, "line_integral": lhs, "curve_integral": rhs})


def round_trip_T(m: SchwarzChristoffelMap, f: Callable, p: float, z) -> float:
    """max |T(T^-1 f)(z) - f(z)|."""
    z = np.asarray(z, dtype=complex)
    inv = lambda w: apply_T_inverse(m, f, p, w)
    return float(np.max(np.abs(apply_T(m, inv, p, z) - f(z))))


# -- rational membership -----------------------------------------------------------

def simple_pole_bound(d: float, M: float, p: float) -> float:
    """d^(1-p) M^-1 (2 (1+M^2)^(p/2) + 2 M^p / (p-1)), as stated for 1/(w - alpha)."""
    if M == 0:
        return math.inf
    return d ** (1.0 - p) / M * (2.0 * (1.0 + M * M) ** (p / 2.0) + 2.0 * M ** p / (p - 1.0))


def flat_pole_norm(d: float, p: float) -> float:
    """sup_tau int_R |t + i tau - alpha|^-p dt on the real axis, exact."""
    return d ** (1.0 - p) * math.sqrt(math.pi) * gamma_fn((p - 1.0) / 2.0) / gamma_fn(p / 2.0)


@dataclass
class MembershipCertificate:
    member: bool
    p: float
    terms: list
    bound: float
    measured: float | None
    degenerate: bool
    passed: bool

    def to_dict(self) -> dict:
        return {"member": self.member, "p": self.p, "terms": self.terms, "bound": self.bound,
                "measured": self.measured, "degenerate_flat_bound": self.degenerate, "pass": self.passed}

    def as_certificate(self) -> Certificate:
        return Certificate("rational_membership", self.measured if self.measured is not None else math.inf,
                           self.bound, {"p": self.p, "member": self.member, "degenerate": self.degenerate,
                                        "terms": self.terms}, passed=self.passed)


def rational_in_hp(graph: LipschitzGraph, F: RationalFunction, p: float,
                   tau_grid: Sequence[float] = DEFAULT_TAU_GRID, spec: QuadratureSpec = DEFAULT_SPEC,
                   measure: bool = True) -> MembershipCertificate:
    """Pole test plus the explicit bound on sup_tau int_{Gamma_tau} |F|^p ds.

    The bound is Minkowski over terms; a pole of order k uses the simple-pole
    bound with exponent p k. For M = 0 the stated bound is infinite and the
    exact flat-line value is used instead (flagged as degenerate).
    """
    conjugate(p)
    member = all(graph.classify(a, 0.0) is RegionTag.LOWER for a in F.poles)
    degenerate = graph.M == 0
    terms = []
    total = 0.0
    for alpha, k, c in F.terms:
        d = abs(alpha.imag - graph.height(alpha.real))
        if member:
            b = flat_pole_norm(d, p * k) if degenerate else simple_pole_bound(d, graph.M, p * k)
            total += abs(c) * b ** (1.0 / p)
        else:
            b = math.inf
        terms.append({"alpha": [alpha.real, alpha.imag], "order": k, "d": d, "bound": b})
    bound = total ** p if member else math.inf
    measured = None
    if member and measure:
        hn = hardy_norm(graph, F, p, tau_grid, spec, tail_k=p * F.decay_order(),
                        center_u=float(np.mean([a.real for a in F.poles])))
        measured = hn.sup_estimate ** p
    passed = member and (measured is None or measured <= bound * (1.0 + 1e-9))
    return MembershipCertificate(member, float(p), terms, bound, measured, degenerate, passed)


def check_membership(graph: LipschitzGraph, F) -> None:
    if isinstance(F, RationalFunction):
        bad = [a for a in F.poles if graph.classify(a, 0.0) is not RegionTag.LOWER]
        if bad:
            raise PreconditionError(f"poles {bad} are not below the graph")


# -- pairings -------------------------------------------------------------------

def pairing_orthogonality(graph: LipschitzGraph, F, G, p: float, spec: QuadratureSpec = DEFAULT_SPEC,
                          check: bool = True, tail_k: float = 2.0) -> complex:
    """int_Gamma F(zeta) G(zeta) d zeta, which vanishes for F in H^p and G in H^q."""
    conjugate(p)
    if check:
        check_membership(graph, F)
        check_membership(graph, G)
    fb = F.boundary if isinstance(F, HardyFunction) else F
    gb = G.boundary if isinstance(G, HardyFunction) else G
    return integrate_curve(graph, lambda z: fb(z) * gb(z), spec, tail_k=tail_k).value


def annihilation_pairing(graph: LipschitzGraph, F, alpha: complex, p: float = 2.0,
                         spec: QuadratureSpec = DEFAULT_SPEC, check: bool = True) -> complex:
    """int_Gamma F(zeta)/(zeta - alpha) d zeta; zero for every alpha outside the closed domain."""
    alpha = complex(alpha)
    if check and graph.classify(alpha, 0.0) is not RegionTag.LOWER:
        raise PreconditionError(f"alpha={alpha!r} is not below the graph")
    G = RationalFunction(((alpha, 1, 1.0),))
    return pairing_orthogonality(graph, F, G, p, spec, check=False)


# -- auxiliary functions h and H -----------------------------------------------------

_N_CIRCLE = 64


@dataclass
class AuxFunction:
    """Direct formula away from the singular point, Taylor series (circle FFT) near it."""

    direct: Callable
    center: complex
    limit: complex
    switch_radius: float
    coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        R = 2.0 * self.switch_radius
        th = 2.0 * math.pi * np.arange(_N_CIRCLE) / _N_CIRCLE
        vals = np.asarray(self.direct(self.center + R * np.exp(1j * th)))
        c = np.fft.fft(vals) / _N_CIRCLE
        n = np.arange(_N_CIRCLE // 2)
        self.coeffs = c[: _N_CIRCLE // 2] / R ** n

    def series(self, x):
        d = np.asarray(x, dtype=complex) - self.center
        out = np.full(d.shape, self.limit, dtype=complex)
        powd = np.ones_like(d)
        for a in self.coeffs[1:]:
            powd = powd * d
            out = out + a * powd
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        near = np.abs(x - self.center) < self.switch_radius
        out = np.empty(x.shape, dtype=complex)
        if np.any(near):
            out[near] = self.series(x[near])
        if np.any(~near):
            out[~near] = np.asarray(self.direct(x[~near]))
        return out if out.ndim else complex(out)


def h_limit(m: SchwarzChristoffelMap, z0: complex, p: float) -> complex:
    """(1/2)(1/p - 1/q) Phi''(z0) / Phi'(z0)^(1+1/p)."""
    q = conjugate(p)
    return 0.5 * (1.0 / p - 1.0 / q) * complex(m.second_derivative(z0)) / complex(m.derivative(z0)) ** (1.0 + 1.0 / p)


def H_limit(m: SchwarzChristoffelMap, w0: complex, p: float) -> complex:
    """(1/2 - 1/q) Psi''(w0) / Psi'(w0)^(1+1/p)."""
    q = conjugate(p)
    z0 = complex(m.invert(w0))
    d1 = complex(m.inverse_derivative(w0, z0))
    d2 = complex(m.inverse_second_derivative(w0, z0))
    return (0.5 - 1.0 / q) * d2 / d1 ** (1.0 + 1.0 / p)


def aux_h_function(m: SchwarzChristoffelMap, z0: complex, p: float, switch_radius: float | None = None) -> AuxFunction:
    """h(z) = Psi'(w0)^(1/p)/(z - z0) - Phi'(z)^(1/q)/(Phi(z) - w0), w0 = Phi(z0)."""
    q = conjugate(p)
    z0 = complex(z0)
    if not z0.imag > 0:
        raise InputError("z0 must lie in the upper half-plane")
    w0 = complex(m.evaluate(z0))
    a = complex(m.derivative(z0)) ** (-1.0 / p)

    def direct(z):
        z = np.asarray(z, dtype=complex)
        return a / (z - z0) - np.asarray(m.derivative(z)) ** (1.0 / q) / (np.asarray(m.evaluate(z)) - w0)

    r = 0.1 * z0.imag if switch_radius is None else float(switch_radius)
    if m.prevertices:
        r = min(r, 0.1 * float(np.min(np.abs(z0 - np.asarray(m.prevertices)))))
    return AuxFunction(direct, z0, h_limit(m, z0, p), r)


def aux_H_function(m: SchwarzChristoffelMap, w0: complex, p: float, graph: LipschitzGraph | None = None,
                   switch_radius: float | None = None) -> AuxFunction:
    """H(w) = Psi'(w0)^(-1/p)/(w - w0) - Psi'(w)^(1/q)/(Psi(w) - Psi(w0))."""
    q = conjugate(p)
    w0 = complex(w0)
    if graph is not None and graph.classify(w0, 0.0) is not RegionTag.UPPER:
        raise RegionError("w0 must lie above the graph")
    z0 = complex(m.invert(w0))
    a = complex(m.inverse_derivative(w0, z0)) ** (-1.0 / p)

    def direct(w):
        w = np.asarray(w, dtype=complex)
        z = np.asarray(m.invert(w, initial_guess=np.full(w.shape, z0)))
        return a / (w - w0) - np.asarray(m.inverse_derivative(w, z)) ** (1.0 / q) / (z - z0)

    if switch_radius is None:
        dist = float(graph.distance(w0)[0]) if graph is not None else z0.imag / abs(complex(m.derivative(z0)))
        r = 0.1 * dist
    else:
        r = float(switch_radius)
    return AuxFunction(direct, w0, H_limit(m, w0, p), r)


def circle_means(f: Callable, center: complex, radii: Sequence[float], n: int = 64) -> np.ndarray:
    """Mean of f over circles about ``center``; equals the holomorphic extension at the centre."""
    th = 2.0 * math.pi * (np.arange(n) + 0.5) / n
    return np.array([np.mean(np.asarray(f(center + r * np.exp(1j * th)))) for r in radii])


# -- bound certificates -------------------------------------------------------------

def exterior_pole_bound(q: float, M: float, eps: float) -> float:
    """2^(q+1) sqrt(1+M^2) / ((q-1) eps^(q-1))."""
    return 2.0 ** (q + 1.0) * math.sqrt(1.0 + M * M) / ((q - 1.0) * eps ** (q - 1.0))


def sector_split(M: float) -> tuple[int, float]:
    """N and M1 of the domain-side bound: 2 theta0 / N < (pi/2 - theta0)/2, M1 = sec(theta0 + theta1)."""
    theta0 = math.atan(M)
    if theta0 == 0:
        return 1, 1.0
    N = int(math.floor(4.0 * theta0 / (math.pi / 2.0 - theta0))) + 1
    theta1 = 2.0 * theta0 / N
    return N, 1.0 / math.cos(theta0 + theta1)


def domain_side_bound(q: float, M: float, eps: float) -> float:
    """2^(q+1) M1 N / ((q-1) eps^(q-1))."""
    N, M1 = sector_split(M)
    return 2.0 ** (q + 1.0) * M1 * N / ((q - 1.0) * eps ** (q - 1.0))


def growth_constant(M: float, p: float) -> float:
    """(2(1+M^2)/pi)^(1/p)."""
    return (2.0 * (1.0 + M * M) / math.pi) ** (1.0 / p)


def exterior_pole_certificates(m: SchwarzChristoffelMap, graph: LipschitzGraph, alpha: complex, q: float,
                               y_grid: Sequence[float], spec: QuadratureSpec | None = None) -> list[Certificate]:
    """int_R |g(t + i y)|^q dt for g = Phi'^(1/q)/(Phi - alpha) against the stated bound."""
    conjugate(q)
    alpha = complex(alpha)
    if graph.classify(alpha, 0.0) is not RegionTag.LOWER:
        raise PreconditionError(f"alpha={alpha!r} lies in the closed domain")
    eps = float(graph.distance(alpha)[0])
    rhs = exterior_pole_bound(q, graph.M, eps)
    spec = spec or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12, max_panels=20000)
    s = _sum_exponent(m)
    k = q * (1.0 + s) - s
    certs = []
    for y in y_grid:
        if not y > 0:
            raise InputError("y grid must be positive")

        def integrand(t, y=y):
            z = t + 1j * y
            return np.abs(np.asarray(m.derivative(z))) / np.abs(np.asarray(m.evaluate(z)) - alpha) ** q

        lhs = integrate_line(lambda t: integrand(t.real), spec, tail_k=k).value.real
        certs.append(Certificate("exterior_pole_Hq", lhs, rhs, {"alpha": alpha, "q": q, "y": float(y), "eps": eps},
                                 constant=rhs * eps ** (q - 1.0), rel_slack=1e-9))
    return certs


def domain_side_certificates(m: SchwarzChristoffelMap, graph: LipschitzGraph, alpha: complex, q: float,
                             tau_grid: Sequence[float], spec: QuadratureSpec | None = None) -> list[Certificate]:
    """int_Gamma |G(zeta + i tau)|^q |d zeta| for G = Psi'^(1/q)/(Psi - alpha), Im alpha < 0."""
    conjugate(q)
    alpha = complex(alpha)
    if not alpha.imag < 0:
        raise PreconditionError(f"alpha={alpha!r} lies in the closed half-plane")
    eps = -alpha.imag
    rhs = domain_side_bound(q, graph.M, eps)
    spec = spec or QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12, max_panels=20000)
    s = _sum_exponent(m)
    k = 1.0 + (q - 1.0) / (1.0 + s)
    certs = []
    for tau in tau_grid:
        if not tau > 0:
            raise InputError("tau grid must be positive")

        def integrand(w):
            z = np.asarray(m.invert(w))
            return np.abs(np.asarray(m.inverse_derivative(w, z))) / np.abs(z - alpha) ** q

        lhs = integrate_curve(graph, integrand, spec, measure="ds", shift=float(tau), tail_k=k).value.real
        N, M1 = sector_split(graph.M)
        certs.append(Certificate("domain_side_Hq", lhs, rhs, {"alpha": alpha, "q": q, "tau": float(tau),
                                                              "eps": eps, "N": N, "M1": M1}, rel_slack=1e-9))
    return certs


def max_on_shifted_curve(graph: LipschitzGraph, F: Callable, tau: float, poles: Sequence[complex] = (),
                         span: float = 50.0, n: int = 4001) -> tuple[float, float]:
    """max_u |F(zeta(u) + i tau)| by a dense grid refined with a bounded scalar search."""
    u = np.unique(np.concatenate([np.linspace(-span, span, n), np.asarray(graph.u),
                                  np.array([complex(a).real for a in poles], dtype=float)]))
    vals = np.abs(np.asarray(F(graph.zeta(u) + 1j * tau)))
    i = int(np.argmax(vals))
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, len(u) - 1)]
    best_u, best = float(u[i]), float(vals[i])
    if hi > lo:
        res = minimize_scalar(lambda x: -abs(complex(np.asarray(F(graph.zeta(x) + 1j * tau)))),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best_u, best = float(res.x), float(-res.fun)
    return best, best_u


def growth_certificates(graph: LipschitzGraph, F: Callable, p: float, tau_grid: Sequence[float],
                        norm: float | None = None, spec: QuadratureSpec = DEFAULT_SPEC,
                        norm_grid: Sequence[float] = DEFAULT_TAU_GRID, poles: Sequence[complex] = (),
                        tail_k: float | None = None) -> list[Certificate]:
    """|F(zeta + i tau)| <= C ||F|| tau^(-1/p) with C = (2(1+M^2)/pi)^(1/p).

    With ``norm`` omitted the grid estimate of the H^p norm is used; it is a lower
    estimate, so the check is conservative.
    """
    C = growth_constant(graph.M, p)
    if norm is None:
        norm = hardy_norm(graph, F, p, norm_grid, spec, tail_k=tail_k).sup_estimate
    certs = []
    for tau in tau_grid:
        if not tau > 0:
            raise InputError("tau grid must be positive")
        lhs, u_star = max_on_shifted_curve(graph, F, float(tau), poles)
        rhs = C * norm * tau ** (-1.0 / p)
        certs.append(Certificate("growth", lhs, rhs, {"p": p, "tau": float(tau), "norm": norm, "argmax_u": u_star},
                                 constant=C, rel_slack=1e-9))
    return certs


def bound_certificates(scenario: str, **kw) -> Certificate:
    """One aggregated certificate for scenario 'exterior_pole', 'growth' or 'domain_side'."""
    if scenario == "exterior_pole":
        certs = exterior_pole_certificates(**kw)
    elif scenario == "growth":
        certs = growth_certificates(**kw)
    elif scenario == "domain_side":
        certs = domain_side_certificates(**kw)
    else:
        raise InputError(f"unknown scenario {scenario!r}")
    return worst_of(certs, certs[0].bound_name)
