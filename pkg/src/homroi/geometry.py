"""Lifting calculus and cone distance machinery.

Convex sets in R^m are lifted to closed cones in R^{m+1}: a point y maps
to the ray through (y, 1), a recession direction d to the ray through
(d, 0). Distances between such cones are measured on the unit ball
(truncated Hausdorff distance), which is what every error guarantee in
this package is expressed in.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateRay, DimensionMismatch, NumericalFailure, ZeroDirection

# last lifted coordinate above this value classifies a ray as a point ray
LEVEL_TOL = 1e-9
UNIT_TOL = 1e-12

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


@dataclass(frozen=True)
class HomRay:
    """A unit vector in the lifted space with nonnegative last coordinate."""

    dir: np.ndarray
    level_positive: bool

    def __post_init__(self):
        d = _as_vector(self.dir)
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise ValueError("ray direction must be unit norm")
        if d[-1] < -UNIT_TOL:
            raise ValueError("ray has negative level coordinate")
        object.__setattr__(self, "dir", d)


@dataclass(frozen=True)
class Dehomogenized:
    """Result of dropping a ray back to the base space."""

    kind: str  # "point" | "direction"
    vector: np.ndarray


@dataclass(frozen=True)
class RoiSpec:
    """Region of interest: the closed ball of given radius around center."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _as_vector(self.center)
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise ValueError("region-of-interest radius must be positive")


def homogenize_point(y) -> HomRay:
    """Lift a point y to the unit ray through (y, 1)."""
    y = _as_vector(y)
    lifted = np.append(y, 1.0)
    return HomRay(lifted / np.linalg.norm(lifted), True)


def homogenize_direction(d) -> HomRay:
    """Lift a recession direction d to the unit ray through (d, 0)."""
    d = _as_vector(d)
    norm = np.linalg.norm(d)
    if norm <= 1e-12:
        raise ZeroDirection("direction norm below tolerance")
    return HomRay(np.append(d / norm, 0.0), False)


def dehomogenize(ray: HomRay) -> Dehomogenized:
    """Inverse lift: point q/mu if the level mu is positive, else direction."""
    vec = ray.dir
    q, mu = vec[:-1], vec[-1]
    if mu > LEVEL_TOL:
        return Dehomogenized("point", q / mu)
    norm = np.linalg.norm(q)
    if norm <= LEVEL_TOL:
        raise DegenerateRay("both spatial part and level are zero")
    return Dehomogenized("direction", q / norm)


class GenCone:
    """Finitely generated cone given by unit generators (rows).

    Immutable; `extend` returns a new cone. The trivial cone {0} is
    rejected: lifted nonempty sets never produce it.
    """

    def __init__(self, generators):
        rows = np.atleast_2d(np.asarray(generators, dtype=np.float64))
        if rows.size == 0:
            raise ValueError("a generated cone needs at least one generator")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms <= 1e-9):
            raise ValueError("zero generator: the trivial cone is not representable")
        rows = rows / norms[:, None]
        if np.any(rows[:, -1] < -1e-12):
            raise ValueError("generator with negative level coordinate")
        self._rows = rows
        self._rows.setflags(write=False)
        # kernel wants generators as columns
        self._cols = np.ascontiguousarray(rows.T)

    @classmethod
    def from_rays(cls, rays) -> "GenCone":
        return cls(np.vstack([r.dir for r in rays]))

    @property
    def generators(self) -> np.ndarray:
        return self._rows

    @property
    def ambient_dim(self) -> int:
        return self._rows.shape[1]

    def __len__(self) -> int:
        return self._rows.shape[0]

    def extend(self, extra_rows) -> "GenCone":
        return GenCone(np.vstack([self._rows, np.atleast_2d(extra_rows)]))


@dataclass(frozen=True)
class ConeProjection:
    projection: np.ndarray
    distance: float
    coefficients: np.ndarray


def project_onto_gencone(v, cone: GenCone) -> ConeProjection:
    """Nearest point of the cone: min ||G lam - v|| over lam >= 0."""
    v = _as_vector(v)
    if v.shape[0] != cone.ambient_dim:
        raise DimensionMismatch(
            f"vector dim {v.shape[0]} != cone ambient dim {cone.ambient_dim}"
        )
    lam, rnorm, info = _kernels.nnls_project(cone._cols, v)
    if info != 0:
        raise NumericalFailure("cone projection did not converge in budget")
    return ConeProjection(cone._cols @ lam, float(rnorm), lam)


def dist_unit_to_truncated(u, cone: GenCone) -> float:
    """d(u, K cap unit ball) for ||u|| <= 1.

    Equals d(u, K): the cone projection of a vector in the ball stays in
    the ball, so the truncation is inactive.
    """
    u = _as_vector(u)
    if np.linalg.norm(u) > 1.0 + 1e-9:
        raise ValueError("input must lie in the unit ball")
    return project_onto_gencone(u, cone).distance


def dist_many_to_gencone(V, cone: GenCone) -> np.ndarray:
    """Batch distances to the cone; identical to the sequential map."""
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    if V.shape[1] != cone.ambient_dim:
        raise DimensionMismatch("batch vectors have wrong ambient dimension")
    out = _kernels.project_distances(cone._cols, V)
    if np.any(np.isnan(out)):
        raise NumericalFailure("cone projection did not converge in budget")
    return out


def dist_to_single_ray(u, w) -> float:
    """d(u, cone{w}) in closed form; w need not be unit."""
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    ww = float(w @ w)
    if ww <= 0.0:
        return float(np.linalg.norm(u))
    t = max(0.0, float(u @ w) / ww)
    return float(np.linalg.norm(u - t * w))


def sphere_sample(dim: int, count: int, seed: int) -> np.ndarray:
    """Deterministic quasi-uniform unit vectors, one per row.

    dim 2 uses an offset uniform angle grid, dim 3 a Fibonacci lattice;
    higher dimensions fall back to seeded Gaussian directions. The seed
    shifts lattice phases, so fixed seed means identical output.
    """
    if dim < 2:
        raise ValueError("sphere sampling needs dim >= 2")
    if count < 1:
        raise ValueError("count must be positive")
    phase = (seed * _GOLDEN) % 1.0
    if dim == 2:
        ang = 2.0 * np.pi * (np.arange(count) + phase) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        i = np.arange(count)
        z = 1.0 - 2.0 * (i + 0.5) / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        ang = 2.0 * np.pi * (i / _GOLDEN + phase)
        return np.column_stack([r * np.cos(ang), r * np.sin(ang), z])
    rng = np.random.default_rng(seed)
    out = np.empty((count, dim))
    filled = 0
    while filled < count:
        block = rng.standard_normal((count - filled, dim))
        norms = np.linalg.norm(block, axis=1)
        ok = norms > 1e-12
        block = block[ok] / norms[ok, None]
        out[filled : filled + block.shape[0]] = block
        filled += block.shape[0]
    return out


def _cone_ray_candidates(cone: GenCone, resolution: int, seed: int) -> np.ndarray:
    """Unit rays of the cone: generators, pairwise mixtures, projected samples."""
    rows = [cone.generators]
    gens = cone.generators
    k = gens.shape[0]
    if k >= 2:
        # normalized midpoints of generator pairs (capped for large cones)
        pairs = []
        step = 1 if k <= 64 else max(1, (k * (k - 1) // 2) // 2048)
        idx = 0
        for i in range(k - 1):
            for j in range(i + 1, k):
                if idx % step == 0:
                    pairs.append(0.5 * (gens[i] + gens[j]))
                idx += 1
        if pairs:
            mix = np.asarray(pairs)
            norms = np.linalg.norm(mix, axis=1)
            rows.append(mix[norms > 1e-12] / norms[norms > 1e-12, None])
    samples = sphere_sample(cone.ambient_dim, resolution, seed)
    projected = []
    for s in samples:
        proj = project_onto_gencone(s, cone).projection
        norm = np.linalg.norm(proj)
        if norm > 1e-9:
            projected.append(proj / norm)
    if projected:
        rows.append(np.asarray(projected))
    return np.vstack(rows)


def _covering_gap(samples: np.ndarray, dim: int, resolution: int) -> float:
    """Max distance from a fresh probe grid to the sample set (density proxy)."""
    probes = sphere_sample(dim, 2 * resolution + 1, resolution + 13)
    # min over samples of chordal distance, maximized over probes
    best = np.full(probes.shape[0], np.inf)
    chunk = 512
    for start in range(0, samples.shape[0], chunk):
        block = samples[start : start + chunk]
        d2 = (
            np.sum(probes * probes, axis=1)[:, None]
            - 2.0 * probes @ block.T
            + np.sum(block * block, axis=1)[None, :]
        )
        best = np.minimum(best, np.sqrt(np.maximum(d2, 0.0)).min(axis=1))
    return float(best.max())


def truncated_hausdorff_sampled(cone_a: GenCone, cone_b: GenCone, resolution: int):
    """Sampled truncated Hausdorff distance between two generated cones.

    Symmetric max of sampled excesses over unit rays of each cone. Exact
    vertex reductions do not exist for truncated cones, so the value is a
    lower estimate; resolution_gap reports the angular density of the
    probing so callers can bound the true value. The estimate never
    exceeds 1 (the origin belongs to every cone).
    """
    if cone_a.ambient_dim != cone_b.ambient_dim:
        raise DimensionMismatch("cones live in different ambient dimensions")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    dim = cone_a.ambient_dim
    rays_a = _cone_ray_candidates(cone_a, resolution, seed=1)
    rays_b = _cone_ray_candidates(cone_b, resolution, seed=1)
    excess_ab = float(dist_many_to_gencone(rays_a, cone_b).max())
    excess_ba = float(dist_many_to_gencone(rays_b, cone_a).max())
    estimate = max(excess_ab, excess_ba)
    gap = _covering_gap(sphere_sample(dim, resolution, 1), dim, resolution)
    return estimate, gap
