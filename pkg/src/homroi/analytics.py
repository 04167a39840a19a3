"""Closed-form error analytics for inner conic approximations.

For a precision parameter delta in (0, 1) the absolute-error bound

    alpha(r, delta) = delta (r^2 + 1) / (sqrt(1 - delta^2) - delta r)

holds for boundary points of the approximation within radius r of the
origin, valid for r below the validity radius R_delta = sqrt(1/delta^2
- 1). alpha is strictly increasing in both arguments and blows up as r
approaches R_delta, which is exactly the trade-off surface the
interactive procedure presents to a decision-maker.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DomainError, NeitherCase, NoFeasibleDelta, OutOfValidity, PreconditionViolation


def region_of_validity(delta: float) -> float:
    """Radius below which the absolute error bound applies."""
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    return math.sqrt(1.0 / (delta * delta) - 1.0)


def alpha(r: float, delta: float) -> float:
    """Sharp bound on the distance from approximate to true boundary."""
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    if r < 0.0:
        raise DomainError("radius must be nonnegative")
    denom = math.sqrt(1.0 - delta * delta) - delta * r
    if denom <= 0.0:
        raise OutOfValidity(f"r = {r} is not below the validity radius")
    return delta * (r * r + 1.0) / denom


def max_delta_for(r: float, alpha_target: float) -> float:
    """Largest precision parameter meeting an error target at radius r.

    alpha is strictly increasing in delta on the admissible interval and
    sweeps (0, inf), so bisection applies; tolerance 1e-10.
    """
    if r <= 0.0 or alpha_target <= 0.0:
        raise DomainError("radius and error target must be positive")
    hi = 1.0 / math.sqrt(1.0 + r * r)  # delta with R_delta = r
    lo = 0.0
    if not alpha(r, hi * (1.0 - 1e-14)) >= alpha_target:
        raise NoFeasibleDelta("error target unreachable (cannot occur for positive targets)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-10:
            break
        try:
            val = alpha(r, mid)
        except OutOfValidity:
            hi = mid
            continue
        if val <= alpha_target:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class ErrorCurve:
    delta: float
    samples: np.ndarray  # rows (r, alpha), strictly increasing in both
    r_validity: float


def error_curve(delta: float, r_count: int) -> ErrorCurve:
    """Sampled trade-off curve on (0, R_delta), denser near the blow-up."""
    if r_count < 2:
        raise DomainError("need at least two samples")
    r_max = region_of_validity(delta) * 0.999
    s = np.linspace(1.0 / r_count, 1.0, r_count)
    grid = r_max * (1.0 - (1.0 - s) ** 3)
    vals = np.array([alpha(r, delta) for r in grid])
    return ErrorCurve(delta, np.column_stack([grid, vals]), region_of_validity(delta))


def worst_case_construction(r: float, delta: float):
    """Two-dimensional configuration attaining the bound exactly.

    Places the approximate boundary point at y = r and returns the true
    boundary point n = (sqrt(1-delta^2) y + delta) / (sqrt(1-delta^2) -
    delta y) whose distance |n - y| equals alpha(r, delta).
    """
    alpha(r, delta)  # validates the domain
    root = math.sqrt(1.0 - delta * delta)
    y = r
    n = (root * y + delta) / (root - delta * y)
    return y, n, abs(n - y)


@dataclass(frozen=True)
class BoundaryClassification:
    kind: str  # "NearBoundary" | "NearDirection"
    bound: float
    witness: np.ndarray
    q: Optional[float] = None


def _ray_distance(u, w):
    ww = float(w @ w)
    t = max(0.0, float(u @ w) / ww) if ww > 0 else 0.0
    return float(np.linalg.norm(u - t * w))


def _attained_q(instance, center, y, horizon, grid=4001):
    """min over true boundary points n of d(unit(n,1), ray{(y,1)})."""
    lo, hi = instance.param_window(center, horizon)
    ts = np.linspace(lo, hi, grid)
    pts = instance.boundary_point(ts) - center
    lifted = np.column_stack([pts, np.ones(len(pts))])
    lifted = lifted / np.linalg.norm(lifted, axis=1)[:, None]
    ray = np.append(y, 1.0)
    rr = float(ray @ ray)
    t = np.maximum(0.0, lifted @ ray / rr)
    d = np.linalg.norm(lifted - t[:, None] * ray, axis=1)
    i = int(np.argmin(d))
    a, b = ts[max(0, i - 1)], ts[min(grid - 1, i + 1)]

    def f(t1):
        p = instance.boundary_point(t1) - center
        u = np.append(p, 1.0)
        u = u / np.linalg.norm(u)
        return _ray_distance(u, ray), p

    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = b - inv * (b - a), a + inv * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(120):
        if f1[0] <= f2[0]:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = f(x2)
    return min(f1, f2, key=lambda z: z[0])


def _distance_to_chain(solution, y):
    """Distance from y to the boundary polyline of the image polytope."""
    chain, ray_in, ray_out = solution.boundary_chain()
    best = math.inf
    segs = []
    far = 1.0e7 * (1.0 + float(np.linalg.norm(y)))
    segs.append((chain[0] + ray_in * far, chain[0]))
    for a, b in zip(chain[:-1], chain[1:]):
        segs.append((a, b))
    segs.append((chain[-1], chain[-1] + ray_out * far))
    for a, b in segs:
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0 else min(1.0, max(0.0, float((y - a) @ ab) / denom))
        best = min(best, float(np.linalg.norm(a + t * ab - y)))
    return best


def classify_boundary_point(y, solution, instance, tol=1e-5) -> BoundaryClassification:
    """Dichotomy for approximate boundary points.

    Either the point is within alpha(||y||, q) of the true boundary,
    where q is the attained lifted-ray distance to some true boundary
    point (NearBoundary), or its direction y/||y|| is within
    ||(y,1)||/||y|| * delta of the recession cone (NearDirection). y is
    given in the solution's shifted coordinates. Both cases can hold at
    once; inside the validity radius the boundary case is reported,
    outside it the direction reading is preferred. Failing both is a
    contract violation, never silently resolved.
    """
    y = np.asarray(y, dtype=np.float64)
    delta = solution.delta_target
    if _distance_to_chain(solution, y) > tol * (1.0 + float(np.linalg.norm(y))):
        raise PreconditionViolation("point is not on the approximation boundary")
    center = solution.roi.center
    norm_y = float(np.linalg.norm(y))
    horizon = max(100.0, 10.0 * max(1.0, norm_y))

    def near_boundary():
        q, nearest = _attained_q(instance, center, y, horizon)
        d_bd = instance.boundary_distance(y + center)
        if q < 1.0:
            denom = math.sqrt(1.0 - q * q) - q * norm_y
            if denom > 0.0:
                bound = q * (norm_y * norm_y + 1.0) / denom
                if d_bd <= bound + 1e-6 * (1.0 + bound):
                    return BoundaryClassification("NearBoundary", bound, nearest, q=q)
        return None

    def near_direction():
        if norm_y <= 0.0:
            return None
        rec = np.ascontiguousarray(instance.recession_generators.T)
        lam, rnorm, info = _kernels.nnls_project(rec, y / norm_y)
        if info != 0:
            return None
        bound = math.sqrt(norm_y * norm_y + 1.0) / norm_y * delta
        if rnorm > bound + 1e-6 * (1.0 + bound):
            return None
        proj = rec @ lam
        pn = np.linalg.norm(proj)
        witness = proj / pn if pn > 0 else proj
        return BoundaryClassification("NearDirection", bound, witness)

    inside_validity = norm_y < region_of_validity(delta)
    order = (near_boundary, near_direction) if inside_validity else (
        near_direction, near_boundary)
    for attempt in order:
        result = attempt()
        if result is not None:
            return result
    raise NeitherCase("boundary point fits neither proximity case")
