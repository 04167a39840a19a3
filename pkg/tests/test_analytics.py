"""Error-analytics tests; expected values from figure captions or algebra."""

import math

import numpy as np
import pytest

from homroi import analytics, engine, problems
from homroi.engine import ApproxSolution
from homroi.errors import DomainError, NeitherCase, OutOfValidity, PreconditionViolation
from homroi.geometry import RoiSpec


def test_alpha_reference_values():
    assert analytics.alpha(0.4, 0.9) == pytest.approx(13.7568, abs=1e-3)
    assert analytics.alpha(1.5, 0.5) == pytest.approx(14.0056, abs=1e-3)
    assert analytics.alpha(5.0, 0.1) == pytest.approx(5.2527, abs=1e-3)
    # r = 0 specialization: delta / sqrt(1 - delta^2)
    for d in (0.1, 0.5, 0.77):
        assert analytics.alpha(0.0, d) == pytest.approx(d / math.sqrt(1 - d * d), abs=1e-12)
    assert analytics.alpha(0.0, 0.1) == pytest.approx(0.100504, abs=1e-6)


def test_alpha_domain():
    with pytest.raises(DomainError):
        analytics.alpha(1.0, 1.5)
    with pytest.raises(DomainError):
        analytics.alpha(-0.1, 0.5)
    with pytest.raises(OutOfValidity):
        analytics.alpha(analytics.region_of_validity(0.5) + 0.01, 0.5)


def test_region_of_validity_values():
    assert analytics.region_of_validity(0.1) == pytest.approx(9.9499, abs=1e-3)
    assert analytics.region_of_validity(0.5) == pytest.approx(1.7321, abs=1e-3)
    assert analytics.region_of_validity(0.9) == pytest.approx(0.4843, abs=1e-3)
    assert analytics.region_of_validity(1 / math.sqrt(2)) == pytest.approx(1.0, abs=1e-12)
    for bad in (0.0, 1.0, -0.2, 2.0):
        with pytest.raises(DomainError):
            analytics.region_of_validity(bad)


def test_alpha_monotonicity():
    for d in (0.1, 0.4, 0.8):
        r_max = analytics.region_of_validity(d) * 0.98
        grid = np.linspace(0.0, r_max, 50)
        vals = [analytics.alpha(r, d) for r in grid]
        assert np.all(np.diff(vals) > 0)
    for r in (0.2, 1.0, 3.0):
        d_max = 1.0 / math.sqrt(1 + r * r)
        grid = np.linspace(1e-4, d_max * 0.98, 50)
        vals = [analytics.alpha(r, d) for d in grid]
        assert np.all(np.diff(vals) > 0)


def test_alpha_blowup():
    for d in (0.1, 0.5, 0.9):
        r = 0.999999 * analytics.region_of_validity(d)
        assert analytics.alpha(r, d) > 1e5


def test_worst_case_sharpness_random():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        d = rng.uniform(0.01, 0.99)
        r = rng.uniform(0.0, 0.999) * analytics.region_of_validity(d)
        y, n, achieved = analytics.worst_case_construction(r, d)
        assert y == r
        assert achieved == pytest.approx(analytics.alpha(r, d), abs=1e-9, rel=1e-9)


def test_worst_case_examples():
    y, n, achieved = analytics.worst_case_construction(5.0, 0.1)
    assert n == pytest.approx(10.2526, abs=1e-3)
    assert achieved == pytest.approx(5.2527, abs=1e-3)
    for d in (0.2, 0.6):
        y, n, achieved = analytics.worst_case_construction(0.0, d)
        assert n == pytest.approx(d / math.sqrt(1 - d * d), abs=1e-12)
        assert achieved == pytest.approx(analytics.alpha(0.0, d), abs=1e-12)
    # vanishing precision parameter: n -> r, error -> 0
    y, n, achieved = analytics.worst_case_construction(2.0, 1e-9)
    assert n == pytest.approx(2.0, abs=1e-6)
    assert achieved == pytest.approx(0.0, abs=1e-6)


def test_max_delta_for_inversions():
    assert analytics.max_delta_for(5.0, analytics.alpha(5.0, 0.1)) == pytest.approx(0.1, abs=1e-8)
    assert analytics.max_delta_for(0.4, analytics.alpha(0.4, 0.9)) == pytest.approx(0.9, abs=1e-8)
    rng = np.random.default_rng(1)
    for _ in range(200):
        d0 = rng.uniform(0.02, 0.98)
        r = rng.uniform(0.05, 0.95) * analytics.region_of_validity(d0)
        assert analytics.max_delta_for(r, analytics.alpha(r, d0)) == pytest.approx(d0, abs=1e-8)
    with pytest.raises(DomainError):
        analytics.max_delta_for(0.0, 1.0)


def test_error_curve():
    curve = analytics.error_curve(0.1, 200)
    assert curve.samples.shape == (200, 2)
    assert np.all(np.diff(curve.samples[:, 0]) > 0)
    assert np.all(np.diff(curve.samples[:, 1]) > 0)
    assert np.all(curve.samples[:, 0] < curve.r_validity)
    # figure point at r = 5 via direct evaluation near the grid
    i = int(np.argmin(np.abs(curve.samples[:, 0] - 5.0)))
    assert analytics.alpha(5.0, 0.1) == pytest.approx(5.2527, abs=1e-3)
    assert curve.samples[i, 1] == pytest.approx(
        analytics.alpha(curve.samples[i, 0], 0.1), abs=1e-9
    )
    big = analytics.error_curve(0.5, 1000)
    assert big.samples[-1, 1] > 100.0 * big.samples[0, 1]
    with pytest.raises(DomainError):
        analytics.error_curve(0.5, 1)
    with pytest.raises(DomainError):
        analytics.error_curve(1.2, 100)


# -- boundary-point classification -------------------------------------------


def _flat_solution(delta=0.1):
    """Synthetic verified-shape solution: vertices on the flat boundary arm."""
    vertices = np.array([[0.0, -1.0], [200.0, -1.0]])
    return ApproxSolution(
        X=np.array([[0.0], [0.0]]),
        image_vertices=vertices,
        vertex_kinds=["seed", "direction"],
        cone_rays=np.eye(2),
        delta_target=delta,
        gap_estimate=delta,
        roi=RoiSpec(np.zeros(2), 5.0),
        iterations=1,
        candidate_log=[],
        status="Success",
        seed=0,
        problem_name="parabola2d",
    )


def test_classify_exact_boundary_point():
    inst = problems.parabola2d()
    sol = _flat_solution()
    res = analytics.classify_boundary_point(np.array([0.0, -1.0]), sol, inst)
    assert res.kind == "NearBoundary"
    assert res.bound == pytest.approx(0.0, abs=1e-6)
    assert res.q == pytest.approx(0.0, abs=1e-6)


def test_classify_far_point_is_direction():
    inst = problems.parabola2d()
    sol = _flat_solution(delta=0.1)
    y = np.array([100.0, -1.0])
    res = analytics.classify_boundary_point(y, sol, inst)
    assert res.kind == "NearDirection"
    norm_y = np.linalg.norm(y)
    want = math.sqrt(norm_y**2 + 1.0) / norm_y * 0.1
    assert res.bound == pytest.approx(want, abs=1e-9)
    # attained direction distance for (1, -0.01)-ish against the orthant
    assert float(np.linalg.norm(y / norm_y - res.witness)) <= res.bound + 1e-9


def test_direction_bound_formula():
    # |y| = 10 at delta 0.1: sqrt(101)/10 * 0.1 = 0.1005
    want = math.sqrt(101.0) / 10.0 * 0.1
    assert want == pytest.approx(0.1005, abs=1e-4)


def test_classify_precondition():
    inst = problems.parabola2d()
    sol = _flat_solution()
    # (50, 5) sits strictly inside the image polytope, not on its boundary
    with pytest.raises(PreconditionViolation):
        analytics.classify_boundary_point(np.array([50.0, 5.0]), sol, inst)


def test_classify_neither_case_on_corrupt_solution():
    # a fabricated solution whose vertex lies far outside the attainable set
    inst = problems.parabola2d()
    sol = _flat_solution(delta=0.01)
    sol.image_vertices = np.array([[0.0, -6.0], [200.0, -6.0]])
    with pytest.raises(NeitherCase):
        analytics.classify_boundary_point(np.array([0.0, -6.0]), sol, inst)


def test_classify_engine_solution_sound():
    inst = problems.parabola2d()
    cfg = engine.EngineConfig(delta=0.3, roi=RoiSpec(np.zeros(2), 2.0), seed=2)
    sol = engine.approximate(inst.problem, cfg)
    for y in sol.boundary_points(40, radius_limit=30.0):
        res = analytics.classify_boundary_point(y, sol, inst)
        assert res.kind in ("NearBoundary", "NearDirection")
