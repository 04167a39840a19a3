"""Independent brute-force verification (two objectives only).

Measures, by dense sampling of the true attainable set's lifted rays,
the gap of a computed approximation; also contains the constructive
existence procedure (shrunken net) and the single-point relative-bound
check. Everything here deliberately avoids the engine's own projection
machinery: distances are taken against analytically parameterized
boundaries, so the engine's gap estimates are confirmed or refuted by
an independent route.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .engine import ApproxSolution
from .errors import NetTooCoarse, PreconditionViolation, UnsupportedDimension
from .geometry import RoiSpec, dist_many_to_gencone
from .problems import AnalyticInstance


@dataclass
class VerificationReport:
    measured_gap: float
    resolution: int
    sample_count: int
    worst_ray: np.ndarray
    passed: bool
    slack: float
    inner_ok: bool
    delta: float

    def to_dict(self) -> dict:
        return {
            "measured_gap": self.measured_gap,
            "resolution": self.resolution,
            "sample_count": self.sample_count,
            "worst_ray": self.worst_ray.tolist(),
            "pass": self.passed,
            "slack": self.slack,
            "inner_ok": self.inner_ok,
            "delta": self.delta,
        }


def _lift_unit(rows) -> np.ndarray:
    rows = np.atleast_2d(rows)
    return rows / np.linalg.norm(rows, axis=1)[:, None]


def _recession_arc(instance, count) -> np.ndarray:
    """Unit rays of the recession cone at level zero (m = 2 arc)."""
    gens = instance.recession_generators
    angles = np.sort([math.atan2(g[1], g[0]) for g in gens])
    ang = np.linspace(angles[0], angles[-1], count)
    return np.column_stack([np.cos(ang), np.sin(ang), np.zeros(count)])


def hom_target_rays(instance: AnalyticInstance, center, horizon, resolution,
                    interior=True) -> tuple:
    """Unit rays of the lifted attainable set, shifted by -center.

    Returns (rays, slack): boundary-point rays over a parameter grid out
    to the horizon, interior anchors filling the spherical cap, and the
    recession arc at level zero. slack is the largest chord between
    consecutive boundary rays (the grid-control term for the measured
    excess, the distance function being 1-Lipschitz).
    """
    center = np.asarray(center, dtype=np.float64)
    lo, hi = instance.param_window(center, horizon)
    # pre-grid, then re-sample at equal arc length of the lifted ray curve
    # so the chord slack is uniform instead of blowing up where the curve
    # moves fast
    pre_t = np.linspace(lo, hi, min(40000, 12 * resolution + 1))
    pre_pts = instance.boundary_point(pre_t) - center
    pre_rays = _lift_unit(np.column_stack([pre_pts, np.ones(len(pre_pts))]))
    seg = np.linalg.norm(np.diff(pre_rays, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    ts = np.interp(np.linspace(0.0, arc[-1], resolution), arc, pre_t)
    bpts = instance.boundary_point(ts) - center
    keep = np.linalg.norm(bpts, axis=1) <= horizon * 1.05
    bpts = bpts[keep]
    boundary = _lift_unit(np.column_stack([bpts, np.ones(len(bpts))]))
    slack = float(np.linalg.norm(np.diff(boundary, axis=0), axis=1).max())

    rows = [boundary]
    arc = _recession_arc(instance, max(64, resolution // 4))
    rows.append(arc)
    slack = max(slack, float(np.linalg.norm(np.diff(arc, axis=0), axis=1).max()))

    if interior:
        direction = instance.problem.cone.interior_direction()
        depth = np.geomspace(0.05, max(4.0, horizon), 24)
        sub = bpts[:: max(1, len(bpts) // max(1, resolution // 8))]
        inner = (sub[None, :, :] + depth[:, None, None] * direction).reshape(-1, 2)
        rows.append(_lift_unit(np.column_stack([inner, np.ones(len(inner))])))

    return np.vstack(rows), slack


def brute_force_dtH(solution: ApproxSolution, instance: AnalyticInstance,
                    resolution: int = 2000) -> VerificationReport:
    """Measure the gap between the solution cone and the true lifted set.

    Inner-ness (every vertex attainable) makes the excess of the
    approximation over the true set zero, so the gap is the largest
    distance from a sampled true ray to the solution's generator cone;
    the sample grid controls the slack. Dense sampling is the honest
    route here: no finite vertex reduction exists for truncated cones.
    """
    if instance.problem.m != 2:
        raise UnsupportedDimension("brute-force verification supports m = 2 only")
    center = solution.roi.center
    from .analytics import region_of_validity

    horizon = max(100.0, 10.0 * region_of_validity(solution.delta_target))
    rays, slack = hom_target_rays(instance, center, horizon, resolution)
    gen = solution.gencone()
    dists = dist_many_to_gencone(rays, gen)
    worst = float(dists.max())
    # deterministic worst ray: lexicographic tie-break on coordinates
    at_max = np.nonzero(dists >= worst - 1e-15)[0]
    order = np.lexsort(rays[at_max].T[::-1])
    worst_ray = rays[at_max[order[0]]]

    inner_ok = bool(
        np.all(instance.membership(solution.image_vertices_original, tol=1e-6))
    )
    passed = inner_ok and worst <= solution.delta_target + slack
    return VerificationReport(
        measured_gap=worst,
        resolution=resolution,
        sample_count=int(rays.shape[0]),
        worst_ray=worst_ray,
        passed=passed,
        slack=slack,
        inner_ok=inner_ok,
        delta=solution.delta_target,
    )


# ---------------------------------------------------------------------------
# constructive existence procedure
# ---------------------------------------------------------------------------


def shrink_factor(delta: float, dist_norms) -> float:
    """Shrink step toward the relative interior point: min(delta/(2|d|), 1)."""
    dist_norms = np.asarray(dist_norms, dtype=np.float64)
    with np.errstate(divide="ignore"):
        ratios = np.where(dist_norms > 0, delta / (2.0 * dist_norms), np.inf)
    return float(np.minimum(ratios, 1.0).min())


def _dist_to_hull_upper(points, probes) -> np.ndarray:
    """Upper bound on d(probe, conv(points u {0})) via capped cone weights.

    The cone projection rescaled into the hull can be loose when the
    active generators are spread out, so the nearest single point is
    taken as a second upper bound.
    """
    points = np.atleast_2d(points)
    probes = np.atleast_2d(probes)
    cols = np.ascontiguousarray(points.T)
    proj, dist, sums = _kernels.project_many(cols, probes)
    capped = sums > 1.0
    out = np.where(np.isnan(dist), np.inf, dist)
    if np.any(capped):
        scaled = proj[capped] / sums[capped, None]
        out[capped] = np.linalg.norm(probes[capped] - scaled, axis=1)
    # nearest-vertex fallback, chunked pairwise distances
    pp = np.einsum("ij,ij->i", points, points)
    for start in range(0, probes.shape[0], 1024):
        block = probes[start : start + 1024]
        d2 = (
            np.einsum("ij,ij->i", block, block)[:, None]
            - 2.0 * block @ points.T
            + pp[None, :]
        )
        out[start : start + 1024] = np.minimum(
            out[start : start + 1024], np.sqrt(np.maximum(d2.min(axis=1), 0.0))
        )
    return out


def existence_construction(instance: AnalyticInstance, delta: float,
                           net_resolution: int = 600):
    """Finite solution set from the shrunken-net construction.

    Builds a delta/2-net of the truncated lifted attainable set, shrinks
    every net point toward a relative interior point by the factor
    min_i {delta/(2 ||d_i||), 1} (which keeps the hull inside the set
    while moving each vertex by at most delta/2), drops the shrunk
    points back to attainable-space and recovers feasible pre-images.
    The returned report verifies the resulting approximation brute-force.
    """
    if instance.problem.m != 2:
        raise UnsupportedDimension("existence construction supports m = 2 only")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1); at 1 or above any single "
                         "feasible point already qualifies (gap never exceeds 1)")
    from .analytics import region_of_validity

    horizon = max(100.0, 10.0 * region_of_validity(delta))
    rays, _ = hom_target_rays(instance, np.zeros(2), horizon, net_resolution)
    net = np.vstack([rays, np.zeros((1, 3))])

    # verify the net density on an offset, denser probe family
    probes, _ = hom_target_rays(instance, np.zeros(2), horizon * 1.01,
                                3 * net_resolution + 7)
    over = _dist_to_hull_upper(rays, probes)
    if float(over.max()) > 0.45 * delta:
        raise NetTooCoarse(
            f"net misses delta/2 density: {over.max():.4f} > {0.45 * delta:.4f}"
        )

    interior_pt = net.mean(axis=0)
    diffs = interior_pt[None, :] - net
    t_bar = shrink_factor(delta, np.linalg.norm(diffs, axis=1))
    shrunk = net + t_bar * diffs
    assert np.all(shrunk[:, 2] > 0.0), "shrunk net left the positive levels"

    dropped = shrunk[:, :2] / shrunk[:, 2][:, None]
    xs = []
    for pt in dropped:
        xs.append(instance.dominated_preimage(pt))
    X = np.unique(np.round(np.asarray(xs), 12), axis=0)

    vertices = np.atleast_2d(instance.problem.objective(X))
    cone_rows = (
        instance.problem.cone.generators
        if instance.problem.cone.is_polyhedral
        else instance.problem.cone.unit_rays(64)
    )
    solution = ApproxSolution(
        X=X,
        image_vertices=vertices,
        vertex_kinds=["net"] * len(X),
        cone_rays=np.asarray(cone_rows),
        delta_target=delta,
        gap_estimate=delta,
        roi=RoiSpec(np.zeros(2), region_of_validity(delta)),
        iterations=1,
        candidate_log=[],
        status="Success",
        seed=0,
        problem_name=instance.name,
    )
    report = brute_force_dtH(solution, instance, resolution=2 * net_resolution)
    return solution, report, t_bar


# ---------------------------------------------------------------------------
# single-point relative bound
# ---------------------------------------------------------------------------


def dense_hom_distance(instance: AnalyticInstance, v, resolution: int = 4000,
                       horizon: float = None) -> float:
    """d(v, lifted attainable cone) by minimizing over dense sampled rays.

    Every point of a cone lies on one of its rays, so the minimum of the
    closed-form point-to-ray distance over a dense ray family converges
    to the true distance from above.
    """
    v = np.asarray(v, dtype=np.float64)
    if horizon is None:
        horizon = 200.0
    rays, _ = hom_target_rays(instance, np.zeros(2), horizon, resolution)
    t = np.maximum(0.0, rays @ v)  # rays are unit rows
    d = np.linalg.norm(t[:, None] * rays - v, axis=1)
    return float(min(d.min(), np.linalg.norm(v)))


def point_bound_check(x, instance: AnalyticInstance, epsilon: float,
                      resolution: int = 4000, slack: float = 1e-3):
    """Check the relative single-point bound eps/sqrt(x.x + 1).

    Verifies d(x, P) <= epsilon first, then measures the excess of the
    single lifted ray through (x, 1) over the lifted attainable cone
    (the fat-side excess is structurally ~1 for a singleton, so the
    sharp bound refers to the singleton side's excess).
    """
    x = np.asarray(x, dtype=np.float64)
    member = bool(instance.membership(x, tol=1e-12))
    dist_to_set = 0.0 if member else instance.boundary_distance(x)
    if dist_to_set > epsilon * (1.0 + 1e-9) + 1e-12:
        raise PreconditionViolation(
            f"point is {dist_to_set:.3e} from the set, beyond eps = {epsilon:.3e}"
        )
    bound = epsilon / math.sqrt(float(x @ x) + 1.0)
    if member:
        # the singleton's lifted ray is inside the lifted set: excess zero
        return True, 0.0, bound
    lifted = np.append(x, 1.0)
    u = lifted / np.linalg.norm(lifted)
    horizon = max(200.0, 10.0 * float(np.linalg.norm(x)))
    measured = dense_hom_distance(instance, u, resolution, horizon)
    return measured <= bound + slack, measured, bound
