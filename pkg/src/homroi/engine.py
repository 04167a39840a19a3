"""Refinement engine producing finite inner approximations.

Given a problem and a precision target delta, builds a finite feasible
set X whose image polytope conv F[X] + C, lifted to the cone spanned by
its homogenized vertices and the cone's rays, sits within (an estimated)
truncated Hausdorff distance delta of the lifted attainable set.

The loop projects batches of candidate unit rays onto the lifted
attainable cone, measures how far each projected ray is from the current
generator cone, and recovers a feasible witness for every candidate that
measures above delta*(1 - safety): point rays are refined through the
reference-direction scalarization, recession rays are represented by far
points along the direction (an adequate ray surrogate once the point is
far enough out). Objectives are shifted by the region-of-interest center
first, so all reported vertices live in shifted coordinates.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import scalarize
from .config import SolverConfig
from .errors import DomainError, SolverFailure
from .geometry import GenCone, RoiSpec, dist_many_to_gencone, sphere_sample
from .problems import VcpProblem

SUCCESS = "Success"
BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class EngineConfig:
    delta: float
    roi: RoiSpec
    seed_direction_count: int = 16
    candidate_batch: int = 96
    safety: float = 0.1
    far_point_radius: Optional[float] = None
    max_rounds: int = 80
    extend_per_round: int = 8
    max_vertices: int = 800
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError("delta must lie in (0, 1)")
        if not 0.0 < self.safety < 1.0:
            raise DomainError("safety must lie in (0, 1)")

    @property
    def far_radius(self) -> float:
        # ray surrogate: a point this far out is within angle ~delta/10
        # of the direction it represents
        return self.far_point_radius if self.far_point_radius else 10.0 / self.delta


@dataclass
class CandidateRecord:
    ray: tuple
    measured: float
    after_extend: Optional[float] = None


@dataclass
class ApproxSolution:
    """Finite solution set with its image polytope description.

    image_vertices are F(x) - center (shifted coordinates); the cone
    generator rows complete the polytope description conv F[X] + C.
    """

    X: np.ndarray
    image_vertices: np.ndarray
    vertex_kinds: list
    cone_rays: np.ndarray
    delta_target: float
    gap_estimate: float
    roi: RoiSpec
    iterations: int
    candidate_log: list
    status: str
    seed: int
    problem_name: str

    @property
    def image_vertices_original(self) -> np.ndarray:
        return self.image_vertices + self.roi.center

    def gencone(self) -> GenCone:
        return GenCone(np.vstack([_lift_points(self.image_vertices),
                                  _lift_directions(self.cone_rays)]))

    def boundary_chain(self):
        """Minimal-face vertex chain of the image polytope (m = 2).

        Returns (chain_vertices, first_ray, last_ray): the boundary of
        conv(V) + C walks in from infinity along first_ray, visits the
        chain, and leaves along last_ray.
        """
        return _minimal_chain(self.image_vertices, self.cone_rays)

    def boundary_points(self, count: int, radius_limit: float) -> np.ndarray:
        """Sample the boundary of the image polytope out to a radius."""
        chain, ray_in, ray_out = self.boundary_chain()
        pts = [chain[0] + ray_in * t for t in
               np.linspace(_exit_len(chain[0], ray_in, radius_limit), 0.0, count, endpoint=False)]
        for a, b in zip(chain[:-1], chain[1:]):
            seg = np.linspace(0.0, 1.0, max(2, count), endpoint=False)[1:]
            pts.extend(a + (b - a) * t for t in seg)
            pts.append(b)
        pts.extend(chain[-1] + ray_out * t for t in
                   np.linspace(0.0, _exit_len(chain[-1], ray_out, radius_limit), count)[1:])
        pts = np.asarray(pts)
        keep = np.linalg.norm(pts, axis=1) <= radius_limit * (1.0 + 1e-9)
        return pts[keep]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem_name,
            "delta": self.delta_target,
            "roi": {"center": self.roi.center.tolist(), "radius": self.roi.radius},
            "seed": self.seed,
            "status": self.status,
            "gap_estimate": self.gap_estimate,
            "iterations": self.iterations,
            "X": np.asarray(self.X).tolist(),
            "image_vertices": np.asarray(self.image_vertices).tolist(),
            "image_vertices_original": self.image_vertices_original.tolist(),
            "vertex_kinds": list(self.vertex_kinds),
            "cone_rays": np.asarray(self.cone_rays).tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ApproxSolution":
        roi = RoiSpec(np.asarray(doc["roi"]["center"], dtype=np.float64),
                      float(doc["roi"]["radius"]))
        return cls(
            X=np.asarray(doc["X"], dtype=np.float64),
            image_vertices=np.asarray(doc["image_vertices"], dtype=np.float64),
            vertex_kinds=list(doc.get("vertex_kinds", [])),
            cone_rays=np.asarray(doc["cone_rays"], dtype=np.float64),
            delta_target=float(doc["delta"]),
            gap_estimate=float(doc["gap_estimate"]),
            roi=roi,
            iterations=int(doc.get("iterations", 0)),
            candidate_log=[],
            status=doc.get("status", SUCCESS),
            seed=int(doc.get("seed", 0)),
            problem_name=doc.get("problem", "unknown"),
        )


def _lift_points(points) -> np.ndarray:
    pts = np.atleast_2d(points)
    lifted = np.column_stack([pts, np.ones(pts.shape[0])])
    return lifted / np.linalg.norm(lifted, axis=1)[:, None]


def _lift_directions(dirs) -> np.ndarray:
    ds = np.atleast_2d(dirs)
    lifted = np.column_stack([ds, np.zeros(ds.shape[0])])
    return lifted / np.linalg.norm(lifted, axis=1)[:, None]


def _exit_len(vertex, ray, radius_limit) -> float:
    """Length along the ray until leaving the radius_limit ball."""
    a = float(ray @ ray)
    b = 2.0 * float(vertex @ ray)
    c = float(vertex @ vertex) - radius_limit * radius_limit
    disc = b * b - 4.0 * a * c
    if disc <= 0.0 or a <= 0.0:
        return 0.0
    return max(0.0, (-b + math.sqrt(disc)) / (2.0 * a))


def _minimal_chain(vertices, cone_rays):
    """Vertices on the minimal boundary of conv(V) + cone (m = 2)."""
    V = np.atleast_2d(vertices)
    if V.shape[1] != 2:
        raise ValueError("boundary chain is only available for two objectives")
    rays = np.atleast_2d(cone_rays)
    angles = np.sort([math.atan2(r[1], r[0]) for r in rays])
    theta_lo, theta_hi = angles[0], angles[-1]
    # dual directions sweep strictly inside the dual cone's angular arc;
    # dense enough that no vertex's support interval is skipped
    phi_lo, phi_hi = theta_hi - math.pi / 2.0, theta_lo + math.pi / 2.0
    sweep_n = max(2048, 128 * V.shape[0])
    sweep = np.linspace(phi_lo + 1e-7, phi_hi - 1e-7, sweep_n)
    chain_idx = []
    for phi in sweep:
        w = np.array([math.cos(phi), math.sin(phi)])
        i = int(np.argmin(V @ w))
        if not chain_idx or chain_idx[-1] != i:
            chain_idx.append(i)
    # dedupe non-adjacent repeats while preserving sweep order
    seen, ordered = set(), []
    for i in chain_idx:
        if i not in seen:
            seen.add(i)
            ordered.append(i)
    chain = V[ordered]
    ray_in = np.array([math.cos(theta_hi), math.sin(theta_hi)])
    ray_out = np.array([math.cos(theta_lo), math.sin(theta_lo)])
    return chain, ray_in, ray_out


def shift_problem(problem: VcpProblem, center) -> VcpProblem:
    """View of the problem with objectives translated by -center."""
    center = np.asarray(center, dtype=np.float64)
    if not np.any(center):
        return problem
    base = problem.objective
    return replace(
        problem,
        name=problem.name,
        objective=lambda X: base(X) - center,
        document=None,
    )


def _seed_weights(problem: VcpProblem) -> list:
    """Dual-cone span directions; componentwise-clipped to the oracle domain."""
    duals = problem.cone.dual_extreme_rays()
    mean = duals.mean(axis=0)
    rows = [duals[0], duals[1], mean / np.linalg.norm(mean)]
    out = []
    for w in rows:
        w = np.maximum(w, 0.0)
        if np.any(w > 0):
            out.append(w / np.linalg.norm(w))
    return out


def _cone_generator_rows(problem: VcpProblem, count=64) -> np.ndarray:
    cone = problem.cone
    if cone.is_polyhedral:
        return cone.generators
    return cone.unit_rays(count)


def _candidates(config: EngineConfig, m: int, rnd: int, vertex_rays) -> np.ndarray:
    """Candidate unit rays: half-sphere samples, level-0 probes, jitter."""
    base = sphere_sample(m + 1, config.candidate_batch, config.seed * 1009 + rnd)
    base[:, -1] = np.abs(base[:, -1])
    rows = [base]
    equator = sphere_sample(m, max(16, config.candidate_batch // 4),
                            config.seed * 2027 + rnd)
    rows.append(np.column_stack([equator, np.zeros(equator.shape[0])]))
    if len(vertex_rays):
        rng = np.random.default_rng(config.seed * 4051 + rnd)
        take = vertex_rays[rng.integers(0, len(vertex_rays), size=min(32, 4 * len(vertex_rays)))]
        noise = rng.normal(scale=config.delta / 3.0, size=take.shape)
        pert = take + noise
        pert[:, -1] = np.abs(pert[:, -1])
        norms = np.linalg.norm(pert, axis=1)
        rows.append(pert[norms > 1e-9] / norms[norms > 1e-9, None])
    cand = np.vstack(rows)
    return cand / np.linalg.norm(cand, axis=1)[:, None]


def approximate(problem: VcpProblem, config: EngineConfig) -> ApproxSolution:
    """Compute a finite inner approximation at the configured precision.

    Every vertex is the image of a feasible point, so the polytope is an
    inner approximation by construction; the reported gap_estimate is
    the largest candidate distance of the final full batch and is meant
    to be confirmed by the independent brute-force verifier.
    """
    center = config.roi.center
    sp = shift_problem(problem, center)
    scfg = config.solver

    X, kinds = [], []
    for w in _seed_weights(problem):
        rep = scalarize.weighted_sum_min(sp, w, scfg)
        if rep.status == scalarize.UNBOUNDED:
            continue  # unbounded seed scalarization: skipped
        if rep.x is not None and np.isfinite(rep.value):
            X.append(np.asarray(rep.x, dtype=np.float64))
            kinds.append("seed")
    if not X:
        raise SolverFailure("all seed scalarizations failed or were unbounded")
    X, kinds = _dedupe(X, kinds)

    vertices = np.atleast_2d(sp.objective(np.asarray(X)))
    cone_rows = _cone_generator_rows(problem)
    gen = GenCone(np.vstack([_lift_points(vertices), _lift_directions(cone_rows)]))

    threshold = config.delta * (1.0 - config.safety)
    anchor = vertices[0]
    log = []
    rounds_used = 0
    gap_estimate = 1.0
    status = BUDGET_EXHAUSTED

    for rnd in range(config.max_rounds):
        rounds_used = rnd + 1
        vertex_rays = _lift_points(vertices)
        cands = _candidates(config, problem.m, rnd, vertex_rays)
        projections = scalarize.project_onto_hom_upper_image_batch(sp, cands, scfg)

        rays, recs = [], []
        for proj in projections:
            vec = np.append(proj.q, proj.mu)
            norm = np.linalg.norm(vec)
            if norm <= 1e-9:
                continue  # projection collapsed to the apex: no ray information
            rays.append(vec / norm)
            recs.append(proj)
        if not rays:
            gap_estimate = 0.0
            status = SUCCESS
            break
        rays = np.asarray(rays)
        dists = dist_many_to_gencone(rays, gen)
        entries = [CandidateRecord(tuple(r), float(d)) for r, d in zip(rays, dists)]
        log.extend(entries)

        round_gap = float(dists.max())
        if round_gap <= threshold:
            gap_estimate = round_gap
            status = SUCCESS
            break
        if len(X) >= config.max_vertices:
            gap_estimate = round_gap
            break

        order = np.argsort(-dists)
        added = 0
        for idx in order:
            if dists[idx] <= threshold or added >= config.extend_per_round:
                break
            proj = recs[idx]
            x_new, kind = _recover_witness(sp, proj, anchor, config, scfg)
            if x_new is None:
                continue
            if _is_new(X, x_new):
                X.append(x_new)
                kinds.append(kind)
                v_new = np.atleast_1d(sp.objective(x_new))
                vertices = np.vstack([vertices, v_new])
                gen = gen.extend(_lift_points(v_new[None, :]))
                added += 1
                after = float(dist_many_to_gencone(rays[idx][None, :], gen)[0])
                entries[idx].after_extend = after
        if added == 0:
            gap_estimate = round_gap
            break

    return ApproxSolution(
        X=np.asarray(X),
        image_vertices=vertices,
        vertex_kinds=kinds,
        cone_rays=np.asarray(cone_rows),
        delta_target=config.delta,
        gap_estimate=gap_estimate,
        roi=config.roi,
        iterations=rounds_used,
        candidate_log=log,
        status=status,
        seed=config.seed,
        problem_name=problem.name,
    )


def _dedupe(X, kinds, tol=1e-9):
    out_x, out_k = [], []
    for x, k in zip(X, kinds):
        if all(np.linalg.norm(x - y) > tol for y in out_x):
            out_x.append(x)
            out_k.append(k)
    return out_x, out_k


def _is_new(X, x, tol=1e-9):
    return all(np.linalg.norm(x - y) > tol for y in X)


def _recover_witness(sp, proj, anchor, config, scfg):
    """Feasible pre-image covering a measured candidate ray."""
    if proj.mu > 0.0 and proj.witness_x is not None:
        reference = proj.q / proj.mu
        kind = "point"
        warm = proj.witness_x
    else:
        norm = np.linalg.norm(proj.q)
        if norm <= 1e-12:
            return None, None
        reference = anchor + config.far_radius * (proj.q / norm)
        kind = "direction"
        warm = None
    try:
        report, _ = scalarize.pascoletti_serafini(sp, reference, cfg=scfg, warm_x=warm)
        if report.x is not None and np.isfinite(report.value):
            if sp.max_violation(report.x) <= 1e-6:
                return np.asarray(report.x, dtype=np.float64), kind
    except SolverFailure:
        pass
    if proj.witness_x is not None and sp.max_violation(proj.witness_x) <= 1e-6:
        return np.asarray(proj.witness_x, dtype=np.float64), kind
    return None, None


def gap_probe(solution: ApproxSolution, problem: VcpProblem, extra_candidates: int,
              cfg: SolverConfig = SolverConfig()) -> float:
    """Re-measure with a fresh candidate batch; never decreases the estimate."""
    if extra_candidates <= 0:
        return solution.gap_estimate
    sp = shift_problem(problem, solution.roi.center)
    gen = solution.gencone()
    m = problem.m
    cands = sphere_sample(m + 1, extra_candidates, solution.seed * 7919 + 13)
    cands[:, -1] = np.abs(cands[:, -1])
    cands = cands / np.linalg.norm(cands, axis=1)[:, None]
    projections = scalarize.project_onto_hom_upper_image_batch(sp, cands, cfg)
    rays = []
    for proj in projections:
        vec = np.append(proj.q, proj.mu)
        norm = np.linalg.norm(vec)
        if norm > 1e-9:
            rays.append(vec / norm)
    if not rays:
        return solution.gap_estimate
    dists = dist_many_to_gencone(np.asarray(rays), gen)
    return max(solution.gap_estimate, float(dists.max()))
