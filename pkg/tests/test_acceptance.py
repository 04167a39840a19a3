"""Acceptance criteria, one test per criterion, with timing budgets.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail
line per criterion. The optional very-fine long run (delta 0.01) is
enabled by setting HOMROI_LONG=1.
"""

import math
import os
import time

import numpy as np
import pytest

from homroi import analytics, engine, geometry, problems, verification
from homroi.geometry import RoiSpec

BUDGETS = {
    "formulas": 1.0,
    "validity": 1.0,
    "sharpness": 5.0,
    "example_run": 300.0,
    "bound_check": 30.0,
    "classification": 60.0,
    "existence": 300.0,
    "polyhedral": 30.0,
    "point_bound": 60.0,
}


def _report(name, ok, elapsed, budget, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({elapsed:.2f}s / "
          f"budget {budget:.0f}s)")
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name} exceeded runtime budget"


@pytest.fixture(scope="module")
def parabola():
    return problems.parabola2d()


@pytest.fixture(scope="module")
def example_runs(parabola):
    """The three-step exploration sequence, verified brute-force."""
    settings = [
        (0.9, np.array([0.0, -20.0]), 0.4),
        (0.5, np.array([0.0, 0.0]), 1.5),
        (0.1, np.array([0.0, 0.0]), 5.0),
    ]
    out = {}
    for delta, center, radius in settings:
        cfg = engine.EngineConfig(delta=delta, roi=RoiSpec(center, radius), seed=1)
        t0 = time.time()
        solution = engine.approximate(parabola.problem, cfg)
        report = verification.brute_force_dtH(solution, parabola, resolution=2500)
        out[delta] = (solution, report, time.time() - t0)
    return out


def test_criterion_formula_regression():
    t0 = time.time()
    values = {
        (0.4, 0.9): 13.7568,
        (1.5, 0.5): 14.0056,
        (5.0, 0.1): 5.2527,
    }
    worst = max(abs(analytics.alpha(r, d) - want) for (r, d), want in values.items())
    _report("formula regression", worst <= 1e-3, time.time() - t0,
            BUDGETS["formulas"], f"max deviation {worst:.2e}")


def test_criterion_region_of_validity():
    t0 = time.time()
    values = {0.1: 9.9499, 0.5: 1.7321, 0.9: 0.4843}
    worst = max(abs(analytics.region_of_validity(d) - want)
                for d, want in values.items())
    _report("region of validity", worst <= 1e-3, time.time() - t0,
            BUDGETS["validity"], f"max deviation {worst:.2e}")


def test_criterion_sharpness():
    t0 = time.time()
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        d = rng.uniform(0.01, 0.99)
        r = rng.uniform(0.0, 0.999) * analytics.region_of_validity(d)
        _, _, achieved = analytics.worst_case_construction(r, d)
        ref = analytics.alpha(r, d)
        worst = max(worst, abs(achieved - ref) / max(1.0, ref))
    _report("worst-case sharpness", worst <= 1e-9, time.time() - t0,
            BUDGETS["sharpness"], f"max relative deviation {worst:.2e}")


def test_criterion_example_end_to_end(example_runs, parabola):
    for delta, (solution, report, elapsed) in example_runs.items():
        inner = bool(np.all(parabola.membership(
            solution.image_vertices_original, tol=1e-6)))
        ok = (report.measured_gap <= delta and report.slack <= 1e-2
              and inner and report.passed)
        _report(f"example run delta={delta}", ok, elapsed,
                BUDGETS["example_run"],
                f"measured {report.measured_gap:.4f} <= {delta}, "
                f"slack {report.slack:.4f}, vertices attainable: {inner}")


def test_criterion_absolute_bound(example_runs, parabola):
    solution, _, _ = example_runs[0.1]
    t0 = time.time()
    bound = analytics.alpha(5.0, 0.1)
    pts = solution.boundary_points(400, radius_limit=5.0)
    assert len(pts) >= 200
    pts = pts[np.linspace(0, len(pts) - 1, 200).astype(int)]
    worst = max(parabola.boundary_distance(y) for y in pts)
    _report("absolute bound inside region of interest",
            worst <= bound, time.time() - t0, BUDGETS["bound_check"],
            f"max boundary distance {worst:.4f} <= alpha(5, 0.1) = {bound:.4f} "
            f"on {len(pts)} points")


def test_criterion_classification(example_runs, parabola):
    solution, _, _ = example_runs[0.1]
    t0 = time.time()
    pts = solution.boundary_points(300, radius_limit=40.0)
    pts = pts[np.linspace(0, len(pts) - 1, 200).astype(int)]
    r_val = analytics.region_of_validity(0.1)
    inside = outside = 0
    for y in pts:
        res = analytics.classify_boundary_point(y, solution, parabola)
        norm_y = float(np.linalg.norm(y))
        if res.kind == "NearBoundary":
            assert parabola.boundary_distance(y) <= res.bound + 1e-6 * (1 + res.bound)
        else:
            want = math.sqrt(norm_y**2 + 1.0) / norm_y * 0.1
            assert res.bound == pytest.approx(want, rel=1e-9)
        if norm_y < r_val:
            inside += 1
        else:
            outside += 1
    ok = inside > 0 and outside > 0
    _report("boundary-point classification", ok, time.time() - t0,
            BUDGETS["classification"],
            f"{inside} inside / {outside} outside validity, zero unclassified")


def test_criterion_existence_construction(parabola):
    for delta in (0.5, 0.2):
        t0 = time.time()
        _, report, t_bar = verification.existence_construction(
            parabola, delta, net_resolution=600)
        ok = report.passed and report.measured_gap <= delta
        _report(f"constructive existence delta={delta}", ok,
                time.time() - t0, BUDGETS["existence"],
                f"verified gap {report.measured_gap:.4f} <= {delta}, "
                f"shrink factor {t_bar:.4f}")


def test_criterion_exact_polyhedral():
    t0 = time.time()
    linear = problems.linear2d()
    cfg = engine.EngineConfig(delta=0.2, roi=RoiSpec(np.zeros(2), 1.0), seed=1)
    solution = engine.approximate(linear.problem, cfg)
    report = verification.brute_force_dtH(solution, linear, resolution=2000)
    _report("exact polyhedral control", report.measured_gap <= 1e-9,
            time.time() - t0, BUDGETS["polyhedral"],
            f"measured gap {report.measured_gap:.2e}")


def test_criterion_point_bound(parabola):
    t0 = time.time()
    rng = np.random.default_rng(1)
    failures = 0
    for _ in range(100):
        t = rng.uniform(-6.0, 6.0)
        eps = rng.uniform(0.02, 0.5)
        base = parabola.boundary_point(np.array([t]))[0]
        off = rng.uniform(-0.9, 0.9) * eps
        x = base + np.array([0.0, off])
        ok, _, _ = verification.point_bound_check(x, parabola, eps,
                                                  resolution=3000)
        failures += 0 if ok else 1
    _report("single-point relative bound", failures == 0,
            time.time() - t0, BUDGETS["point_bound"],
            f"{100 - failures}/100 random pairs passed")


def test_criterion_property_suites(parabola):
    t0 = time.time()
    rng = np.random.default_rng(2)
    # lifting round trips
    for _ in range(100):
        y = rng.standard_normal(2) * rng.uniform(0.1, 20)
        back = geometry.dehomogenize(geometry.homogenize_point(y))
        assert np.allclose(back.vector, y, atol=1e-10 * (1 + np.abs(y).max()))
    # projection orthogonality, norm contraction, truncation identity,
    # radial monotonicity, universal bound
    for _ in range(60):
        rows = rng.standard_normal((int(rng.integers(1, 6)), 3))
        rows[:, -1] = np.abs(rows[:, -1])
        K = geometry.GenCone(rows)
        v = rng.standard_normal(3)
        p = geometry.project_onto_gencone(v, K)
        assert abs(float((v - p.projection) @ p.projection)) <= 1e-8 * (1 + v @ v)
        assert np.linalg.norm(p.projection) <= np.linalg.norm(v) + 1e-10
        u = v / np.linalg.norm(v)
        assert geometry.dist_unit_to_truncated(u, K) == pytest.approx(
            geometry.project_onto_gencone(u, K).distance, abs=1e-12)
        d1 = geometry.project_onto_gencone(0.5 * u, K).distance
        assert d1 <= 0.5 * geometry.project_onto_gencone(u, K).distance + 1e-10
    for _ in range(5):
        A = geometry.GenCone(np.abs(rng.standard_normal((3, 3))))
        B = geometry.GenCone(np.abs(rng.standard_normal((2, 3))))
        est, _ = geometry.truncated_hausdorff_sampled(A, B, 128)
        assert est <= 1.0 + 1e-12
    # analytics monotonicity and inverse round trips
    for _ in range(100):
        d = rng.uniform(0.02, 0.98)
        r = rng.uniform(0.05, 0.95) * analytics.region_of_validity(d)
        assert analytics.max_delta_for(r, analytics.alpha(r, d)) == pytest.approx(
            d, abs=1e-8)
    grid = np.linspace(0, analytics.region_of_validity(0.3) * 0.98, 40)
    vals = [analytics.alpha(r, 0.3) for r in grid]
    assert np.all(np.diff(vals) > 0)
    # engine determinism
    cfg = engine.EngineConfig(delta=0.7, roi=RoiSpec(np.zeros(2), 0.8), seed=9)
    a = engine.approximate(parabola.problem, cfg)
    b = engine.approximate(parabola.problem, cfg)
    assert np.array_equal(a.X, b.X) and a.gap_estimate == b.gap_estimate
    _report("property suites", True, time.time() - t0, 120.0,
            "geometry, analytics, determinism invariants")


@pytest.mark.skipif(not os.environ.get("HOMROI_LONG"),
                    reason="long run: set HOMROI_LONG=1 to enable")
def test_optional_long_run(parabola):
    t0 = time.time()
    cfg = engine.EngineConfig(delta=0.01, roi=RoiSpec(np.zeros(2), 50.0), seed=1)
    solution = engine.approximate(parabola.problem, cfg)
    report = verification.brute_force_dtH(solution, parabola, resolution=6000)
    _report("optional fine run delta=0.01", report.measured_gap <= 0.01,
            time.time() - t0, 1800.0,
            f"measured {report.measured_gap:.5f}, {len(solution.X)} vertices")
