from __future__ import annotations

import math

import numpy as np
import pytest

from hardylip.errors import DomainError, GraphValidationError, InputError, ResourceError
from hardylip.geometry import (LipschitzGraph, NTCone, RegionTag, cone_at, cone_contains, graph_from_points,
                               polygonal_approximation)


def test_eval_curve_flat(flat):
    pt = flat.eval_curve(3.0)
    assert pt.zeta == 3 + 0j
    assert pt.derivative == 1
    assert pt.density == 1


def test_eval_curve_wedge(wedge):
    pt = wedge.eval_curve(-2.0)
    assert pt.zeta == -2 + 2j
    assert pt.derivative == 1 - 1j
    assert pt.density == pytest.approx(math.sqrt(2))


def test_eval_curve_kink_is_flagged(wedge):
    pt = wedge.eval_curve(0.0)
    assert pt.at_breakpoint
    assert pt.left_derivative == 1 - 1j
    assert pt.right_derivative == 1 + 1j


def test_eval_curve_rejects_nonfinite(wedge):
    with pytest.raises(InputError):
        wedge.eval_curve(math.nan)


def test_classify(flat, wedge):
    assert flat.classify(1j, 0.0) is RegionTag.UPPER
    assert wedge.classify(1 + 0.5j, 0.0) is RegionTag.LOWER
    assert wedge.classify(1 + 1j, 1e-12) is RegionTag.BOUNDARY
    assert RegionTag.UPPER.value == "UpperDomain"
    with pytest.raises(InputError):
        flat.classify(complex(math.inf, 0.0), 0.0)


def test_validation_rejects_bad_graphs():
    with pytest.raises(GraphValidationError):
        LipschitzGraph.from_breakpoints([(0.0, 0.0), (0.0, 1.0)], 0.0, 0.0)
    with pytest.raises(GraphValidationError):
        LipschitzGraph.from_breakpoints([(0.0, 0.0), (1.0, 2.0)], 0.0, 0.0, M=1.0)


def test_serialization_round_trip(zigzag5, tmp_path):
    path = tmp_path / "g.json"
    zigzag5.dump(path)
    back = LipschitzGraph.load(path)
    assert back.to_dict() == zigzag5.to_dict()
    assert graph_from_points([(0.0, 0.0), (1.0, 1.0)]).M == 1.0


def test_distance_to_wedge(wedge):
    assert wedge.distance(-1j)[0] == pytest.approx(1.0)
    assert wedge.distance(2 + 0j)[0] == pytest.approx(math.sqrt(2))


def test_cone_flat(flat):
    cone = NTCone(0.0, 0.0, math.pi / 4)
    assert cone_contains(cone, flat, 1j)[0]
    assert not cone_contains(cone, flat, 1 + 0.1j)[0]
    with pytest.raises(DomainError):
        cone_contains(cone, flat, 0j)


def test_cone_wedge_entry_radius(wedge):
    cone = cone_at(wedge, 1.0, math.pi / 3)
    assert cone.tangent_angle_phi0 == pytest.approx(math.pi / 4)
    zeta0 = 1 + 1j
    inside, delta = cone_contains(cone, wedge, zeta0 + 0.01j * np.exp(1j * math.pi / 4))
    assert inside
    assert delta >= 0.01


def test_cone_half_angle_range():
    with pytest.raises(InputError):
        NTCone(0.0, 0.0, math.pi / 2)


def test_polygonal_approximation_wedge(wedge):
    g3 = polygonal_approximation(wedge, 3)
    assert g3.height(0.0) == pytest.approx(0.25)
    g4 = polygonal_approximation(wedge, 4)
    x = np.linspace(-4, 4, 4001)
    diff = g4.height(x) - wedge.height(x)
    assert np.max(np.abs(diff)) <= 0.25
    assert np.all(diff > 0)


def test_polygonal_approximation_flat_is_exact(flat):
    g = polygonal_approximation(flat, 3)
    x = np.linspace(-10, 10, 101)
    assert np.all(g.height(x) == 0.0)


def test_polygonal_approximation_resource_limit(wedge):
    with pytest.raises(ResourceError):
        polygonal_approximation(wedge, 20)
    with pytest.raises(InputError):
        polygonal_approximation(wedge, 0)
