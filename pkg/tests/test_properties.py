"""Property tests over randomly generated Lipschitz graphs."""
from __future__ import annotations

import json
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from hardylip.certificate import Certificate
from hardylip.conformal import round_trip_certificate, sample_domain, sc_solve, sector_certificate
from hardylip.geometry import LipschitzGraph, RegionTag, polygonal_approximation
from hardylip.kernels import k_kernel, kernel_bound_certificate, vertical_constant, VERTICAL
from hardylip.quadrature import kernel_mass

SLOW = settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, max_points=5, max_slope=2.0):
    n = draw(st.integers(1, max_points))
    gaps = draw(st.lists(st.floats(0.3, 2.0), min_size=n - 1, max_size=n - 1))
    u = np.concatenate([[draw(st.floats(-2.0, 0.0))], np.cumsum(gaps) + 0.0]) if n > 1 else np.array([0.0])
    if n > 1:
        u[1:] += u[0]
    slopes = draw(st.lists(st.floats(-max_slope, max_slope), min_size=n + 1, max_size=n + 1))
    a = [draw(st.floats(-1.0, 1.0))]
    for k in range(1, n):
        a.append(a[-1] + slopes[k] * (u[k] - u[k - 1]))
    return LipschitzGraph.from_breakpoints(list(zip(u.tolist(), a)), slopes[0], slopes[-1])


@given(graphs(), st.floats(-4, 4), st.floats(1e-3, 10))
def test_points_above_curve_are_upper(g, u, t):
    w = complex(g.zeta(u)) + 1j * t
    assert g.classify(w, 0.0) is RegionTag.UPPER
    assert g.classify(w - 2j * t, 0.0) is RegionTag.LOWER


@given(graphs())
def test_graph_json_round_trip(g):
    back = LipschitzGraph.from_dict(json.loads(json.dumps(g.to_dict())))
    assert back.to_dict() == g.to_dict()


@given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_kernel_is_odd_in_z(zeta, zeta0, z):
    d = zeta - zeta0
    if min(abs(d - z), abs(d + z)) < 1e-3:
        return
    assert abs(k_kernel(zeta, zeta0, z) + k_kernel(zeta, zeta0, -z)) <= 1e-12 * (1 + abs(k_kernel(zeta, zeta0, z)))


@given(graphs(), st.lists(st.floats(-5, 5), min_size=2, max_size=2), st.floats(1e-2, 20))
def test_vertical_kernel_bound_holds(g, us, tau):
    zeta, zeta0 = (complex(g.zeta(u)) for u in us)
    c = kernel_bound_certificate(g, zeta, zeta0, 1j * tau, VERTICAL)
    assert c.passed
    assert c.constant == vertical_constant(g.M) / math.pi


@SLOW
@given(graphs(max_slope=1.5), st.floats(-3, 3), st.floats(0.05, 5))
def test_kernel_mass_is_one(g, u0, tau):
    assert abs(kernel_mass(g, complex(g.zeta(u0)), 1j * tau) - 1.0) <= 1e-6


@settings(max_examples=20, deadline=None)
@given(graphs(), st.integers(2, 4))
def test_polygonal_approximation_majorant(g, j):
    gj = polygonal_approximation(g, j)
    x = np.linspace(-j, j, 801)
    diff = gj.height(x) - g.height(x)
    assert np.all(diff > 0) if g.M > 0 else np.all(diff == 0)
    assert np.max(diff) <= 4 * g.M * 2.0 ** -j + 1e-12


@SLOW
@given(graphs(max_points=4, max_slope=1.5))
def test_sc_map_sector_and_round_trip(g):
    m = sc_solve(g)
    assert sector_certificate(m, g.M, n=200).passed
    assert round_trip_certificate(m, sample_domain(g, 20, seed=1)).passed


@given(st.floats(allow_nan=True, allow_infinity=True), st.floats(-1e6, 1e6))
def test_certificate_json_is_valid(lhs, rhs):
    d = Certificate("x", lhs, rhs, {"z": complex(lhs, 1.0)}).to_dict()
    json.loads(json.dumps(d, allow_nan=False))
    assert d["pass"] == (math.isfinite(lhs) and lhs <= rhs)
