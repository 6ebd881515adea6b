"""Paired Cauchy kernel, Poisson kernel and the two kernel-bound certificates."""
from __future__ import annotations

import math

import numpy as np

from .certificate import Certificate
from .errors import DomainError, PoleError, PreconditionError
from .geometry import LipschitzGraph, NTCone, cone_contains, in_cone

VERTICAL = "VerticalShift"
CONE = "ConeApproach"


def k_kernel(zeta, zeta0, z):
    """K_z(zeta, zeta0) = z / (pi i ((zeta - zeta0)^2 - z^2)), vectorised."""
    d = np.asarray(zeta, dtype=complex) - zeta0
    z = np.asarray(z, dtype=complex)
    den = d * d - z * z
    if np.any(den == 0):
        raise PoleError("z = +-(zeta - zeta0): kernel has a pole")
    out = z / (1j * math.pi * den)
    return out if out.ndim else complex(out)


def k_kernel_difference(zeta, zeta0, z):
    """Two-term form (1/2 pi i)(1/(zeta - zeta0 - z) - 1/(zeta - zeta0 + z))."""
    d = np.asarray(zeta, dtype=complex) - zeta0
    z = np.asarray(z, dtype=complex)
    if np.any(d == z) or np.any(d == -z):
        raise PoleError("z = +-(zeta - zeta0): kernel has a pole")
    out = (1.0 / (d - z) - 1.0 / (d + z)) / (2j * math.pi)
    return out if out.ndim else complex(out)


def poisson_kernel(x, y):
    """P_y(x) = y / (pi (x^2 + y^2)) for y > 0."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0):
        raise DomainError("Poisson kernel needs y > 0")
    x = np.asarray(x, dtype=float)
    out = y_arr / (math.pi * (x * x + y_arr * y_arr))
    return out if out.ndim else float(out)


def vertical_constant(M: float) -> float:
    """C' = max{13/5, 39 sqrt(1+M^2)/8}."""
    return max(13.0 / 5.0, 39.0 * math.sqrt(1.0 + M * M) / 8.0)


def cone_constant(phi: float) -> float:
    """C' = max{5/3, 2/sin^2(phi/2)}."""
    return max(5.0 / 3.0, 2.0 / math.sin(phi / 2.0) ** 2)


def chord_radius(graph: LipschitzGraph, u0: float) -> float:
    """Half the u-distance from u0 to the nearest kink.

    Inside it every chord from zeta0 has the tangent direction exactly, which is
    what the cone estimate needs from its radius.
    """
    ks = [v[0] for v in graph.vertices()]
    d = min((abs(k - u0) for k in ks), default=math.inf)
    return 0.5 * d


def cone_entry_radius(graph: LipschitzGraph, cone: NTCone, max_radius: float = 1.0) -> float:
    """Sampled entry radius of the cone, capped by the straight-chord radius."""
    zeta0 = complex(graph.zeta(cone.vertex_u))
    probe = zeta0 + 1j * complex(math.cos(cone.tangent_angle_phi0), math.sin(cone.tangent_angle_phi0))
    _, delta = cone_contains(cone, graph, probe, max_radius=max_radius)
    return min(delta, chord_radius(graph, cone.vertex_u))


def vertical_bound_sweep(graph: LipschitzGraph, u, u0, taus) -> list[Certificate]:
    """Vertical-regime certificates over the product grid u x u0 x tau."""
    U, U0, T = np.meshgrid(np.asarray(u, float), np.asarray(u0, float), np.asarray(taus, float), indexing="ij")
    zeta = graph.zeta(U.ravel())
    zeta0 = graph.zeta(U0.ravel())
    tau = T.ravel()
    const = vertical_constant(graph.M)
    lhs = np.abs(k_kernel_difference(zeta, zeta0, 1j * tau))
    rhs = const / math.pi * tau / (np.abs(zeta - zeta0) ** 2 + tau * tau)
    return [Certificate(f"kernel_bound_{VERTICAL}", l, r, {"zeta": a, "zeta0": b, "z": 1j * t},
                        constant=const / math.pi, regime=VERTICAL)
            for l, r, a, b, t in zip(lhs, rhs, zeta, zeta0, tau)]


def kernel_bound_certificate(graph: LipschitzGraph, zeta: complex, zeta0: complex, z,
                             regime: str = VERTICAL, cone: NTCone | None = None,
                             max_radius: float = 1.0, delta: float | None = None) -> Certificate:
    """|K_z(zeta, zeta0)| <= (C'/pi) |z| / (|zeta - zeta0|^2 + |z|^2) for one sample.

    In the cone regime ``delta`` may carry a radius from :func:`cone_entry_radius`.
    """
    zeta = complex(zeta)
    zeta0 = complex(zeta0)
    if regime == VERTICAL:
        tau = z.imag if isinstance(z, complex) else float(z)
        if isinstance(z, complex) and z.real != 0.0:
            raise PreconditionError("VerticalShift regime needs z = i tau")
        if not tau > 0:
            raise PreconditionError("VerticalShift regime needs tau > 0")
        zc = 1j * tau
        const = vertical_constant(graph.M)
    elif regime == CONE:
        if cone is None:
            raise PreconditionError("ConeApproach regime needs a cone")
        zc = complex(z)
        if not in_cone(cone, zeta0, zeta0 + zc):
            raise PreconditionError("zeta0 + z lies outside the cone")
        if delta is None:
            delta = cone_entry_radius(graph, cone, max_radius)
        if not abs(zc) < delta:
            raise PreconditionError(f"|z|={abs(zc):.3g} not below certified radius {delta:.3g}")
        const = cone_constant(cone.half_angle_phi)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    lhs = abs(k_kernel(zeta, zeta0, zc))
    r2 = abs(zeta - zeta0) ** 2
    rhs = const / math.pi * abs(zc) / (r2 + abs(zc) ** 2)
    sample = {"zeta": zeta, "zeta0": zeta0, "z": zc}
    return Certificate(f"kernel_bound_{regime}", lhs, rhs, sample, constant=const / math.pi, regime=regime)
