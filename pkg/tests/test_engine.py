"""Engine tests: verified gaps, inner-ness, determinism, probe behavior."""

import math

import numpy as np
import pytest

from homroi import engine, problems, verification
from homroi.geometry import RoiSpec, dist_to_single_ray


@pytest.fixture(scope="module")
def parabola():
    return problems.parabola2d()


@pytest.fixture(scope="module")
def linear():
    return problems.linear2d()


@pytest.fixture(scope="module")
def run_05(parabola):
    cfg = engine.EngineConfig(delta=0.5, roi=RoiSpec(np.zeros(2), 1.5), seed=1)
    return engine.approximate(parabola.problem, cfg)


@pytest.fixture(scope="module")
def run_linear(linear):
    cfg = engine.EngineConfig(delta=0.2, roi=RoiSpec(np.zeros(2), 1.0), seed=1)
    return engine.approximate(linear.problem, cfg)


def test_config_validation():
    with pytest.raises(Exception):
        engine.EngineConfig(delta=1.0, roi=RoiSpec(np.zeros(2), 1.0))
    with pytest.raises(Exception):
        engine.EngineConfig(delta=0.0, roi=RoiSpec(np.zeros(2), 1.0))
    cfg = engine.EngineConfig(delta=0.25, roi=RoiSpec(np.zeros(2), 1.0))
    assert cfg.far_radius == pytest.approx(40.0)


def test_parabola_verified(run_05, parabola):
    assert run_05.status == engine.SUCCESS
    assert run_05.gap_estimate <= 0.5
    report = verification.brute_force_dtH(run_05, parabola, resolution=1500)
    assert report.passed
    assert report.measured_gap <= 0.5
    assert np.all(parabola.membership(run_05.image_vertices_original, tol=1e-6))


def test_shifted_run(parabola):
    cfg = engine.EngineConfig(
        delta=0.9, roi=RoiSpec(np.array([0.0, -20.0]), 0.4), seed=1
    )
    sol = engine.approximate(parabola.problem, cfg)
    report = verification.brute_force_dtH(sol, parabola, resolution=1500)
    assert report.passed and report.measured_gap <= 0.9
    # vertices reported in both frames, differing by the center
    assert np.allclose(
        sol.image_vertices_original - sol.image_vertices, [0.0, -20.0]
    )


def test_linear_exact(run_linear, linear):
    report = verification.brute_force_dtH(run_linear, linear, resolution=1500)
    assert report.measured_gap <= 1e-9
    vertices = {tuple(np.round(v, 6)) for v in run_linear.image_vertices_original}
    assert (0.0, 1.0) in vertices and (1.0, 0.0) in vertices


def test_determinism(parabola):
    cfg = engine.EngineConfig(delta=0.6, roi=RoiSpec(np.zeros(2), 1.0), seed=7)
    a = engine.approximate(parabola.problem, cfg)
    b = engine.approximate(parabola.problem, cfg)
    assert np.array_equal(a.X, b.X)
    assert np.array_equal(a.image_vertices, b.image_vertices)
    assert a.gap_estimate == b.gap_estimate
    assert a.status == b.status


def test_candidate_reduction_after_extension(parabola):
    cfg = engine.EngineConfig(delta=0.1, roi=RoiSpec(np.zeros(2), 5.0), seed=1)
    sol = engine.approximate(parabola.problem, cfg)
    assert sol.gap_estimate <= 0.1
    extended = [e for e in sol.candidate_log if e.after_extend is not None]
    assert extended, "refinement should have extended at least one candidate"
    for e in extended:
        assert e.after_extend < e.measured


def test_gap_probe(run_05, run_linear, parabola, linear):
    assert engine.gap_probe(run_05, parabola.problem, 0) == run_05.gap_estimate
    probed = engine.gap_probe(run_05, parabola.problem, 64)
    assert probed >= run_05.gap_estimate
    assert probed <= 0.5
    probed_lin = engine.gap_probe(run_linear, linear.problem, 64)
    assert probed_lin <= 1e-6


def test_single_point_lift_bound():
    # d_tH(lift{x}, lift Z) <= eps / sqrt(x.x + 1) whenever d(x, Z) <= eps:
    # the lifted excess of a singleton is the point-to-ray distance, which
    # the lift contracts by exactly the norm factor
    rng = np.random.default_rng(5)
    inst = problems.parabola2d()
    for _ in range(200):
        t = rng.uniform(-5, 5)
        z = inst.boundary_point(np.array([t]))[0]
        x = z - np.abs(rng.normal(scale=0.3)) * np.array([0.0, 1.0])
        eps = float(np.linalg.norm(x - z))
        u = np.append(x, 1.0)
        u /= np.linalg.norm(u)
        measured = dist_to_single_ray(u, np.append(z, 1.0))
        assert measured <= eps / math.sqrt(float(x @ x) + 1.0) + 1e-12


def test_boundary_points_sampling(run_05, parabola):
    pts = run_05.boundary_points(64, radius_limit=6.0)
    assert len(pts) >= 32
    assert np.all(np.linalg.norm(pts, axis=1) <= 6.0 * (1 + 1e-9))
    gen = run_05.gencone()
    lifted = np.column_stack([pts, np.ones(len(pts))])
    lifted /= np.linalg.norm(lifted, axis=1)[:, None]
    from homroi.geometry import dist_many_to_gencone

    assert dist_many_to_gencone(lifted, gen).max() <= 1e-7


def test_solution_roundtrip(run_05):
    doc = run_05.to_dict()
    back = engine.ApproxSolution.from_dict(doc)
    assert np.allclose(back.X, run_05.X)
    assert np.allclose(back.image_vertices, run_05.image_vertices)
    assert back.delta_target == run_05.delta_target
    assert back.roi.radius == run_05.roi.radius


def test_oracle_cone_instance_end_to_end():
    soc = problems.soc2d()
    cfg = engine.EngineConfig(
        delta=0.35, roi=RoiSpec(np.zeros(2), 1.0), seed=1,
        candidate_batch=48, extend_per_round=6,
    )
    sol = engine.approximate(soc.problem, cfg)
    assert sol.status == engine.SUCCESS
    report = verification.brute_force_dtH(sol, soc, resolution=1500)
    assert report.passed
    assert report.measured_gap <= 0.35
    assert np.all(soc.membership(sol.image_vertices_original, tol=1e-6))
    # generator cone rows sampled from the membership oracle stay inside
    for row in sol.cone_rays:
        assert soc.problem.cone.member(row, tol=1e-9)
