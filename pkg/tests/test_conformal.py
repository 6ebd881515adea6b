from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from conftest import wedge_closed_form
from hardylip.conformal import (Normalization, SchwarzChristoffelMap, boundary_argument_certificate,
                                caratheodory_experiment, round_trip_certificate, sample_domain, sc_solve,
                                sector_certificate, tangency_certificate)
from hardylip.errors import BranchPointError, InputError
from hardylip.geometry import LipschitzGraph


def test_wedge_derivative(wedge_map):
    assert complex(wedge_map.derivative(1j)) == pytest.approx(0.5, abs=1e-14)
    assert complex(SchwarzChristoffelMap.identity().derivative(2 + 3j)) == 1


def test_derivative_matches_finite_differences(zigzag5):
    m = sc_solve(zigzag5)
    h = 1e-5
    for z in (0.3 + 0.7j, -2 + 0.2j, 4 + 3j):
        fd = (complex(m.evaluate(z + h)) - complex(m.evaluate(z - h))) / (2 * h)
        assert abs(fd - complex(m.derivative(z))) <= 1e-8 * max(1.0, abs(fd))


def test_branch_point(wedge_map):
    with pytest.raises(BranchPointError):
        wedge_map.derivative(0j)


def test_wedge_values(wedge_map):
    assert complex(wedge_map.evaluate(1j)) == pytest.approx(1j, abs=1e-13)
    assert complex(wedge_map.evaluate(1 + 0j)) == pytest.approx(cmath.exp(1j * math.pi / 4), abs=1e-12)
    z = np.array([0.5 + 2j, -3 + 0.1j, 2 + 0.01j])
    assert np.allclose(wedge_map.evaluate(z), [wedge_closed_form(x) for x in z], atol=1e-12)


def test_identity_map():
    m = SchwarzChristoffelMap.identity()
    assert complex(m.evaluate(2 + 3j)) == pytest.approx(2 + 3j)
    assert complex(m.invert(2 + 3j)) == pytest.approx(2 + 3j)


def test_solve_wedge(wedge):
    m, rep = sc_solve(wedge, return_report=True)
    assert m.exponents == pytest.approx((-0.5,))
    assert m.gamma == pytest.approx(math.pi / 4)
    assert rep.max_residual <= 1e-8
    # default normalization Phi(i) = i(a(0) + 1) = i coincides with the closed form
    z = np.array([1j, 2 + 0.5j, -1 + 3j])
    assert np.allclose(m.evaluate(z), [wedge_closed_form(x) for x in z], atol=1e-12)


def test_solve_flat(flat):
    m = sc_solve(flat)
    assert m.exponents == ()
    assert complex(m.evaluate(2 + 1j)) == pytest.approx(2 + 1j)


def test_solve_zigzag(zigzag):
    m, rep = sc_solve(zigzag, return_report=True)
    assert rep.max_residual <= 1e-6
    assert sector_certificate(m, zigzag.M).passed
    assert boundary_argument_certificate(m, zigzag.M).passed
    assert tangency_certificate(m, zigzag).passed


def test_solve_rejects_base_value_below(wedge):
    with pytest.raises(InputError):
        sc_solve(wedge, Normalization(1j, -1j))


def test_pinned_prevertex(zigzag):
    m = sc_solve(zigzag, Normalization(pin_c1=0.0))
    assert m.prevertices[0] == pytest.approx(0.0, abs=1e-12)
    assert sector_certificate(m, zigzag.M).passed


def test_inverse_wedge(wedge_map):
    assert complex(wedge_map.invert(1j)) == pytest.approx(1j, abs=1e-12)
    assert complex(wedge_map.inverse_derivative(1j)) == pytest.approx(2.0, abs=1e-10)


def test_round_trip_zigzag(zigzag):
    m = sc_solve(zigzag)
    c = round_trip_certificate(m, sample_domain(zigzag, 100, seed=3))
    assert c.passed and c.lhs <= 1e-9


def test_map_json_round_trip(zigzag, tmp_path):
    m = sc_solve(zigzag)
    assert SchwarzChristoffelMap.from_dict(m.to_dict()) == m


def test_caratheodory_flat(flat):
    t = caratheodory_experiment(flat, [2, 3, 4], [2j, 1 + 1j])
    assert all(v <= 1e-12 for v in t.max_diffs.values())


def test_caratheodory_wedge(wedge):
    t = caratheodory_experiment(wedge, [2, 3, 4, 5], [2j])
    assert t.decreasing()
    for j in (2, 3, 4, 5):
        from hardylip.geometry import polygonal_approximation
        mj = sc_solve(polygonal_approximation(wedge, j), Normalization(1j, t.w0))
        assert abs(complex(mj.evaluate(1j)) - t.w0) <= 1e-10
