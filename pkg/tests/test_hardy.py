from __future__ import annotations

import math

import numpy as np
import pytest

from hardylip.conformal import SchwarzChristoffelMap, sc_solve
from hardylip.errors import InputError, PreconditionError
from hardylip.hardy import (RationalFunction, annihilation_pairing, apply_T, apply_T_inverse, aux_H_function,
                            aux_h_function, boundary_norm_identity, bound_certificates, circle_means, conjugate,
                            domain_side_bound, exterior_pole_bound, growth_constant, h_limit, H_limit,
                            pairing_orthogonality, rational_in_hp, round_trip_T, sector_split,
                            simple_pole_bound)


def test_conjugate():
    assert conjugate(4.0) == pytest.approx(4 / 3)
    with pytest.raises(InputError):
        conjugate(1.0)


def test_membership_wedge(wedge):
    cert = rational_in_hp(wedge, RationalFunction.simple(-1j), 2.0)
    assert cert.member and not cert.degenerate
    assert cert.bound == pytest.approx(6.0)
    assert cert.measured <= 6.0
    assert cert.passed


def test_membership_flat_degenerate(flat):
    cert = rational_in_hp(flat, RationalFunction.simple(-1j), 2.0)
    assert cert.member and cert.degenerate
    assert cert.bound == pytest.approx(math.pi)
    assert cert.measured <= cert.bound


def test_membership_pole_above(flat):
    cert = rational_in_hp(flat, RationalFunction.simple(1j), 2.0)
    assert not cert.member and not cert.passed


def test_simple_pole_bound_arithmetic():
    assert simple_pole_bound(1.0, 1.0, 2.0) == pytest.approx(6.0)


def test_rational_round_trip():
    F = RationalFunction(((-1j, 2, 0.5 + 1j), (2 - 3j, 1, -1.0)))
    assert RationalFunction.from_dict(F.to_dict()) == F
    assert F.decay_order() == 1


def test_T_identity(flat):
    m = sc_solve(flat)
    F = lambda w: 1 / (w + 1j)
    z = np.array([1j, 2 + 0.3j])
    assert np.allclose(apply_T(m, F, 2.0, z), F(z))
    assert np.allclose(apply_T_inverse(m, F, 2.0, z), F(z))


def test_T_wedge(wedge_map):
    assert complex(apply_T(wedge_map, lambda w: 1 / (w + 1j), 2.0, 1j)) == pytest.approx(-0.353553j, abs=1e-6)
    assert complex(apply_T_inverse(wedge_map, lambda z: 1 / (z + 1j), 2.0, 1j)) == pytest.approx(
        -0.707107j, abs=1e-6)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_boundary_norm_identity(wedge, p):
    m = sc_solve(wedge)
    F = RationalFunction(((0.5 - 1j, 1, 1.0), (-1 - 1j, 2, 0.5j)))
    assert boundary_norm_identity(m, wedge, F, p).passed


def test_T_round_trip(wedge_map):
    rng = np.random.default_rng(1)
    z = rng.uniform(-3, 3, 50) + 1j * 10 ** rng.uniform(-2, 1, 50)
    assert round_trip_T(wedge_map, lambda x: 1 / (x + 1j) ** 2, 3.0, z) <= 1e-8


def test_pairings_flat(flat):
    F = RationalFunction.simple(-2j)
    G = RationalFunction.simple(-3j)
    assert abs(pairing_orthogonality(flat, F, G, 2.0)) <= 1e-8
    assert abs(annihilation_pairing(flat, F, -5j)) <= 1e-8


def test_pairings_wedge(wedge):
    assert abs(annihilation_pairing(wedge, RationalFunction.simple(-2j), -3j)) <= 1e-6
    with pytest.raises(PreconditionError):
        annihilation_pairing(wedge, RationalFunction.simple(-2j), 3j)
    with pytest.raises(PreconditionError):
        pairing_orthogonality(wedge, RationalFunction.simple(2j), RationalFunction.simple(-3j), 2.0)


def test_aux_identity_map():
    m = SchwarzChristoffelMap.identity()
    h = aux_h_function(m, 1j, 4.0)
    assert h.limit == 0
    assert abs(h(1.3 + 0.4j)) <= 1e-12


def test_aux_p2_limits_vanish(wedge_map):
    assert h_limit(wedge_map, 1j, 2.0) == 0
    assert abs(H_limit(wedge_map, 1j, 2.0)) <= 1e-12


def test_aux_h_p4_wedge(wedge_map):
    expected = 0.5 * (0.25 - 0.75) * complex(wedge_map.second_derivative(1j)) / complex(
        wedge_map.derivative(1j)) ** 1.25
    h = aux_h_function(wedge_map, 1j, 4.0)
    assert h.limit == pytest.approx(expected)
    assert np.max(np.abs(circle_means(h.direct, 1j, [1e-2, 1e-3]) - expected)) <= 1e-5
    assert abs(h(1j) - expected) <= 1e-10


def test_aux_H_p4_wedge(wedge, wedge_map):
    H = aux_H_function(wedge_map, 1j, 4.0, wedge)
    assert np.max(np.abs(circle_means(H.direct, 1j, [1e-2, 1e-3]) - H.limit)) <= 1e-5


def test_bound_constants():
    assert exterior_pole_bound(2.0, 0.0, 1.0) == pytest.approx(8.0)
    assert growth_constant(0.0, 2.0) == pytest.approx(math.sqrt(2 / math.pi))
    assert growth_constant(1.0, 2.0) == pytest.approx(math.sqrt(4 / math.pi))
    N, M1 = sector_split(1.0)
    assert N == 5 and M1 == pytest.approx(1 / math.cos(math.pi / 4 + math.pi / 10))
    assert domain_side_bound(2.0, 1.0, 1.0) > 0


def test_exterior_pole_flat(flat):
    m = sc_solve(flat)
    y = list(np.logspace(-2, 1, 10))
    c = bound_certificates("exterior_pole", m=m, graph=flat, alpha=-1j, q=2.0, y_grid=y)
    assert c.passed
    assert c.rhs == pytest.approx(8.0)
    # measured value pi/(1+y) is maximal at the smallest y
    assert c.lhs == pytest.approx(math.pi / 1.01, rel=1e-6)


def test_growth_flat(flat):
    c = bound_certificates("growth", graph=flat, F=lambda w: 1 / (w + 1j), p=2.0, tau_grid=[1.0],
                           norm=math.sqrt(math.pi))
    assert c.lhs == pytest.approx(0.5)
    assert c.rhs == pytest.approx(math.sqrt(2 / math.pi) * math.sqrt(math.pi))
    assert c.passed


def test_growth_wedge_sweep(wedge):
    F = RationalFunction.simple(-1j)
    c = bound_certificates("growth", graph=wedge, F=F, p=2.0, tau_grid=[0.1, 1.0, 10.0], poles=F.poles,
                           tail_k=2.0)
    assert c.passed and c.constant == pytest.approx(math.sqrt(4 / math.pi))


def test_domain_side_finite(wedge):
    m = sc_solve(wedge)
    c = bound_certificates("domain_side", m=m, graph=wedge, alpha=-1j, q=2.0, tau_grid=[0.1, 1.0, 10.0])
    assert c.passed and math.isfinite(c.lhs)
    with pytest.raises(PreconditionError):
        bound_certificates("domain_side", m=m, graph=wedge, alpha=1j, q=2.0, tau_grid=[1.0])
