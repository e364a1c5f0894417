import math

import pytest

import starsos


def test_disk_approximation():
    disk = starsos.fixture("disk")
    r = starsos.approximate(disk, degree=2)
    assert math.sqrt(1.001) <= r["s_star"] <= math.sqrt(1.001) + 1e-3 + 1e-6
    assert r["certificate"]["valid"]
    f = r["f"]
    assert f.degree == 2
    assert f([0.0, 0.0]) < 1.0
    assert f([1.0, 0.0]) > 1.0


def test_set_roundtrip_and_membership():
    A = starsos.fixture("exampleA")
    B = starsos.SemialgebraicSet.from_json(A.to_json())
    assert B.n == 2 and B.m == A.m
    assert B.contains([0.0, 0.0])
    assert not B.contains([2.0, 0.0])


def test_example_e_kernel_is_empty():
    E = starsos.fixture("exampleE", c=0.9, r=0.4)
    K = starsos.outer_kernel(E, n_samples=2000, seed=7)
    assert K["polytope"]["empty"]
    assert "farkas" in K["polytope"]


def test_example_a_outer_kernel():
    K = starsos.outer_kernel(starsos.fixture("exampleA"), n_samples=2000, seed=7)
    assert not K["polytope"]["empty"]
    assert len(K["polytope"]["vertices"]) == 4
    assert K["chebyshev"]["radius"] > 0.05


def test_disk_support_point():
    s = starsos.find_support(starsos.fixture("disk"), [1.0, 0.0], mult_degree=2)
    assert s["status"] == "Feasible"
    assert abs(s["point"][0] - 1.0) < 1e-3


def test_volumes_and_estimator():
    disk = starsos.fixture("disk")
    assert abs(starsos.volume_polar(disk, [0.0, 0.0]) - math.pi) < 1e-3
    E = starsos.fixture("exampleE", c=0.9, r=0.4)
    assert abs(starsos.volume_grid(E, 1.0) - 2.8315) < 5e-3
    est = starsos.scaling_lower_bound_estimate(E, 2000, 1)
    assert est <= starsos.exampleE_scaling_lower_bound(0.9, 0.4) + 1e-6


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        starsos.fixture("nope")
    with pytest.raises(ValueError):
        starsos.approximate(starsos.fixture("disk"), degree=3)
