"""Convex subproblem solvers.

Three operations power everything downstream: weighted-sum scalarization
(seeding), projection of a lifted vector onto the lifted attainable cone
(gap measurement), and reference-direction scalarization refining
attainable points to weakly minimal ones (witness recovery).

All three run on one batched projected-subgradient core: a diminishing
step_a/(k+step_b) warm-up followed by adaptive step-length epochs that
shrink geometrically once progress stalls. Constraints are handled by an
exact projector where one exists, otherwise by steering along the most
violated constraint's subgradient (switching rule).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import SolverConfig
from .errors import NonSolidCone, SolverFailure
from .problems import VcpProblem

OPTIMAL = "Optimal"
TOLERANCE_REACHED = "ToleranceReached"
UNBOUNDED = "Unbounded"
INFEASIBLE = "Infeasible"
BUDGET_EXHAUSTED = "BudgetExhausted"

DEFAULT_CONFIG = SolverConfig()


@dataclass
class SolveReport:
    status: str
    x: Optional[np.ndarray]
    value: float
    certified_gap: float


@dataclass
class HomProjection:
    """Nearest lifted-cone element (q, mu) to a query vector.

    mu above the level tolerance certifies q/mu attainable, with
    witness_x a feasible pre-image whose image is dominated by q/mu.
    """

    q: np.ndarray
    mu: float
    witness_x: Optional[np.ndarray]
    distance: float


# ---------------------------------------------------------------------------
# batched projected-subgradient core
# ---------------------------------------------------------------------------


def _minimize_batch(value_fn, grad_fn, cons_fn, cons_grad_fn, project_fn, X0, cfg):
    """Minimize rows independently; returns (X, f, gap, converged).

    value_fn(X)->(B,), grad_fn(X)->(B,D); cons_fn(X)->(B,J) or None;
    cons_grad_fn(X, jmax)->(B,D) subgradient of each row's selected
    constraint; project_fn exact projector applied after every step.
    """
    X = project_fn(np.array(X0, dtype=np.float64))
    B, D = X.shape
    feas_tol = cfg.feas_tol

    def violations(Xc):
        if cons_fn is None:
            return None, np.zeros(B)
        V = cons_fn(Xc)
        if V.shape[-1] == 0:
            return None, np.zeros(B)
        return V, V.max(axis=-1)

    def merit(Xc):
        _, mv = violations(Xc)
        f = value_fn(Xc)
        return np.where(mv <= feas_tol * 10.0, f, np.inf), mv

    best_X = X.copy()
    best_f, _ = merit(X)
    g_scale = np.ones(B)

    def step_once(Xc, lengths):
        nonlocal best_X, best_f, g_scale
        V, mv = violations(Xc)
        g_obj = grad_fn(Xc)
        if V is not None:
            jmax = np.argmax(V, axis=-1)
            g_cons = cons_grad_fn(Xc, jmax)
            nn = np.linalg.norm(g_cons, axis=-1)
            n_hat = g_cons / np.maximum(nn, 1e-300)[:, None]
            normal_comp = np.einsum("ij,ij->i", g_obj, n_hat)
            # feasible rows within one step of an active constraint whose
            # descent direction points into it walk tangentially along the
            # boundary instead of ping-ponging across it
            near = (
                (mv <= feas_tol)
                & (mv >= -(lengths * np.maximum(nn, 1e-300)))
                & (normal_comp < 0.0)
            )
            tangential = g_obj - normal_comp[:, None] * n_hat
            g = np.where(
                (mv > feas_tol)[:, None],
                g_cons,
                np.where(near[:, None], tangential, g_obj),
            )
        else:
            g = g_obj
        norms = np.linalg.norm(g, axis=-1)
        g_scale = 0.9 * g_scale + 0.1 * np.maximum(norms, 1e-12)
        safe = np.maximum(norms, 1e-300)
        Xn = project_fn(Xc - (lengths / safe)[:, None] * g)
        f, mv2 = merit(Xn)
        better = f < best_f
        if np.any(better):
            best_X[better] = Xn[better]
            best_f[better] = f[better]
        return Xn, norms

    iters = 0
    # warm-up: diminishing step lengths
    for k in range(cfg.warmup_iters):
        lengths = np.full(B, cfg.step_a / (k + cfg.step_b))
        X, norms = step_once(X, lengths)
        iters += 1
        if np.all(norms < 1e-300):
            break

    # adaptive epochs: expand while improving, shrink when stalled,
    # retire a row once its step falls below its relative floor
    s = np.full(B, max(cfg.step_a / (cfg.step_b + cfg.warmup_iters), 1e-2))
    active = np.ones(B, dtype=bool)
    last_improve = np.full(B, np.inf)
    max_epochs = max(1, (cfg.max_iters - iters) // max(cfg.epoch_len, 1))
    for _ in range(max_epochs):
        if iters >= cfg.max_iters or not active.any():
            break
        start = np.where(np.isfinite(best_f)[:, None], best_X, X)
        X = start.copy()
        prev = best_f.copy()
        lengths = np.where(active, s, 0.0)
        for _ in range(cfg.epoch_len):
            X, _ = step_once(X, lengths)
            iters += 1
        improve = np.where(np.isfinite(prev), prev - best_f, np.inf)
        last_improve = np.where(active, improve, last_improve)
        # progress must be proportional to the step to sustain it, or the
        # near-optimal boundary zigzag keeps steps alive forever; a
        # prematurely shrunk step regrows within two epochs
        meaningful = 1e-15 * (1.0 + np.abs(np.where(np.isfinite(best_f), best_f, 0.0)))
        grew = improve > np.maximum(0.25 * s * g_scale, meaningful)
        s = np.where(active & grew, s * 1.7, s * 0.5)
        s = np.minimum(s, 1e6)
        floor_row = np.maximum(
            cfg.step_floor,
            1e-14 * (1.0 + np.linalg.norm(best_X, axis=-1)),
        )
        active &= s > floor_row

    gap = 4.0 * s * g_scale + 4.0 * np.where(np.isfinite(last_improve), last_improve, 0.0)
    gap = np.maximum(gap, 1e-13 * (1.0 + np.abs(np.where(np.isfinite(best_f), best_f, 0.0))))
    _, mv = violations(best_X)
    converged = np.isfinite(best_f) & (mv <= feas_tol * 10.0)
    return best_X, best_f, gap, converged


def _minimize_single(value_fn, grad_fn, cons_fn, cons_grad_fn, project_fn, x0, cfg):
    def v(X):
        return np.atleast_1d(value_fn(X[0]))

    def g(X):
        return grad_fn(X[0])[None, :]

    cf = None
    cgf = None
    if cons_fn is not None:

        def cf(X):
            return np.atleast_2d(cons_fn(X[0]))

        def cgf(X, jmax):
            return cons_grad_fn(X[0], int(jmax[0]))[None, :]

    def p(X):
        return project_fn(X[0])[None, :]

    Xb, fb, gapb, okb = _minimize_batch(v, g, cf, cgf, p, np.asarray(x0)[None, :], cfg)
    return Xb[0], float(fb[0]), float(gapb[0]), bool(okb[0])


# ---------------------------------------------------------------------------
# feasibility helpers
# ---------------------------------------------------------------------------


def _project_or_identity(problem):
    if problem.project_feasible is not None:
        return lambda x: np.asarray(problem.project_feasible(x), dtype=np.float64)
    return lambda x: np.asarray(x, dtype=np.float64)


def _feasible_point(problem, cfg) -> np.ndarray:
    if problem.feasible_point is not None:
        return np.asarray(problem.feasible_point, dtype=np.float64)
    x0 = np.zeros(problem.n)
    if problem.n_constraints == 0 or problem.max_violation(x0) <= cfg.feas_tol:
        problem.feasible_point = x0
        return x0
    # phase 1: minimize the worst violation, clamped at a mildly negative
    # level so the solve stops once safely feasible instead of chasing an
    # unbounded interior
    def value(x):
        return max(problem.violations(x).max(), -1.0)

    def grad(x):
        vals = problem.violations(x)
        if vals.max() <= -1.0:
            return np.zeros(problem.n)
        j = int(np.argmax(vals))
        return problem.constraint_jac(x)[j]

    lean = cfg.with_overrides(max_iters=min(cfg.max_iters, 4000))
    x, v, _, _ = _minimize_single(
        value, grad, None, None, _project_or_identity(problem), x0, lean
    )
    if v > cfg.feas_tol * 10.0:
        raise SolverFailure("no feasible point found (phase-1 ended positive)")
    problem.feasible_point = x
    return x


def _scan_unbounded(problem, w, x0, project, cfg):
    """Doubling ray scan; returns a witness probe point or None."""
    dirs = []
    for i in range(problem.n):
        e = np.zeros(problem.n)
        e[i] = 1.0
        dirs.extend([e, -e])
    g0 = problem.combined_subgrad(x0, w)
    if np.linalg.norm(g0) > 1e-12:
        dirs.append(-g0 / np.linalg.norm(g0))
    base_val = float(w @ problem.objective(x0))
    for d in dirs:
        prev = base_val
        descending = True
        for j in range(60):
            x = project(x0 + (2.0**j) * d)
            if problem.n_constraints and problem.max_violation(x) > cfg.feas_tol * 10:
                descending = False
                break
            val = float(w @ problem.objective(x))
            if val >= prev:
                descending = False
                break
            prev = val
            if val <= -cfg.unbounded_threshold:
                return x
        if descending and prev <= -cfg.unbounded_threshold:
            return x
    return None


# ---------------------------------------------------------------------------
# weighted-sum scalarization
# ---------------------------------------------------------------------------


def weighted_sum_min(problem: VcpProblem, w, cfg: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Minimize w . F(x) over the feasible set.

    Ties among minimizers are broken toward the smallest-norm x by a
    second-stage solve constrained to near-optimal values.
    """
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be nonnegative and not all zero")
    project = _project_or_identity(problem)
    x0 = _feasible_point(problem, cfg)

    witness = _scan_unbounded(problem, w, x0, project, cfg)
    if witness is not None:
        return SolveReport(UNBOUNDED, witness, -math.inf, math.inf)

    use_switching = problem.project_feasible is None and problem.n_constraints > 0

    def value(x):
        return float(w @ problem.objective(x))

    def grad(x):
        return problem.combined_subgrad(x, w)

    cons_fn = (lambda x: problem.violations(x)) if use_switching else None
    cons_grad = (
        (lambda x, j: problem.constraint_jac(x)[j]) if use_switching else None
    )

    x, val, gap, ok = _minimize_single(value, grad, cons_fn, cons_grad, project, x0, cfg)
    if use_switching:
        # boundary walking can stall below the step resolution; never
        # certify tighter than the configured tolerance on this path
        gap = max(gap, cfg.tolerance)
    if not ok:
        return SolveReport(BUDGET_EXHAUSTED, x, val, gap)

    # smallest-norm tie break among near-minimizers
    margin = max(10.0 * gap, 1e-9 * (1.0 + abs(val)))
    bound = val + margin

    def tb_value(xx):
        return float(xx @ xx)

    def tb_grad(xx):
        return 2.0 * xx

    def tb_cons(xx):
        rows = [value(xx) - bound]
        if use_switching:
            rows.extend(problem.violations(xx).tolist())
        return np.asarray(rows)

    def tb_cons_grad(xx, j):
        if j == 0:
            return grad(xx)
        return problem.constraint_jac(xx)[j - 1]

    x2, _, _, ok2 = _minimize_single(tb_value, tb_grad, tb_cons, tb_cons_grad, project, x, cfg)
    if ok2 and value(x2) <= bound + cfg.feas_tol:
        x = x2
        val = value(x2)
    status = OPTIMAL if gap <= cfg.tolerance else TOLERANCE_REACHED
    if gap > cfg.tolerance:
        status = BUDGET_EXHAUSTED
    return SolveReport(status, x, val, gap)


# ---------------------------------------------------------------------------
# reference-direction scalarization (refinement to weak minimality)
# ---------------------------------------------------------------------------


def pascoletti_serafini(problem: VcpProblem, reference, direction=None,
                        cfg: SolverConfig = DEFAULT_CONFIG, warm_x=None):
    """min t subject to F(x) <=_C reference + t*direction, x feasible.

    Returns (SolveReport with value t*, attained image point F(x*)). The
    attained image is weakly minimal within solver tolerance. Requires a
    solid ordering cone (direction defaults to an interior vector).
    """
    if not problem.cone.solid:
        raise NonSolidCone("refinement needs an ordering cone with interior")
    reference = np.asarray(reference, dtype=np.float64)
    direction = (
        problem.cone.interior_direction()
        if direction is None
        else np.asarray(direction, dtype=np.float64)
    )
    if not problem.cone.member(direction, tol=1e-9):
        raise ValueError("direction must lie in the ordering cone interior")

    project_x = _project_or_identity(problem)
    x0 = warm_x if warm_x is not None else _feasible_point(problem, cfg)
    x0 = np.asarray(x0, dtype=np.float64)

    # initial t making the order constraint feasible (direction interior)
    t0 = 0.0
    img0 = problem.objective(x0)
    for _ in range(80):
        if problem.cone.member(reference + t0 * direction - img0, tol=1e-12):
            break
        t0 = 2.0 * t0 + 1.0
    else:
        raise SolverFailure("could not find a feasible scalarization start")

    n = problem.n

    def split(zz):
        return zz[:n], zz[n]

    def value(zz):
        return zz[n]

    def grad(zz):
        g = np.zeros(n + 1)
        g[n] = 1.0
        return g

    def order_residual(zz):
        x, t = split(zz)
        z = reference + t * direction - problem.objective(x)
        r = z - problem.cone.project(z)
        return z, r

    def cons(zz):
        _, r = order_residual(zz)
        rows = [float(np.linalg.norm(r))]
        if problem.project_feasible is None and problem.n_constraints:
            rows.extend(problem.violations(zz[:n]).tolist())
        return np.asarray(rows)

    def cons_grad(zz, j):
        x, t = split(zz)
        if j == 0:
            _, r = order_residual(zz)
            nr = np.linalg.norm(r)
            s = r / nr if nr > 0 else r
            gx = -problem.objective_jac(x).T @ s
            return np.append(gx, float(s @ direction))
        return np.append(problem.constraint_jac(x)[j - 1], 0.0)

    def project(zz):
        return np.append(project_x(zz[:n]), zz[n])

    z0 = np.append(x0, t0)
    z, tval, gap, ok = _minimize_single(value, grad, cons, cons_grad, project, z0, cfg)
    # the order constraint is always handled by switching: same floor as
    # other boundary-walking solves
    gap = max(gap, cfg.tolerance)
    if not ok:
        return SolveReport(BUDGET_EXHAUSTED, z[:n], tval, gap), problem.objective(z[:n])

    # smallest-norm tie break at fixed near-optimal level
    margin = max(10.0 * gap, 1e-9 * (1.0 + abs(tval)))
    level = tval + margin

    def tb_value(xx):
        return float(xx @ xx)

    def tb_grad(xx):
        return 2.0 * xx

    def tb_cons(xx):
        z = reference + level * direction - problem.objective(xx)
        r = z - problem.cone.project(z)
        rows = [float(np.linalg.norm(r))]
        if problem.project_feasible is None and problem.n_constraints:
            rows.extend(problem.violations(xx).tolist())
        return np.asarray(rows)

    def tb_cons_grad(xx, j):
        if j == 0:
            z = reference + level * direction - problem.objective(xx)
            r = z - problem.cone.project(z)
            nr = np.linalg.norm(r)
            s = r / nr if nr > 0 else r
            return -problem.objective_jac(xx).T @ s
        return problem.constraint_jac(xx)[j - 1]

    x2, _, _, ok2 = _minimize_single(
        tb_value, tb_grad, tb_cons, tb_cons_grad, project_x, z[:n], cfg
    )
    x_final = x2 if ok2 else z[:n]
    status = OPTIMAL if gap <= cfg.tolerance else TOLERANCE_REACHED
    if gap > cfg.tolerance:
        status = BUDGET_EXHAUSTED
    report = SolveReport(status, x_final, float(tval), gap)
    return report, problem.objective(x_final)


# ---------------------------------------------------------------------------
# projection onto the lifted attainable cone
# ---------------------------------------------------------------------------


def _cone_residual_many(cone, Z):
    """Rows of Z minus their cone projections, with fast vectorized paths."""
    if cone.is_polyhedral and cone.label == "orthant":
        return np.minimum(Z, 0.0)
    if cone.label == "soc" and cone.m == 2:
        inside = Z[:, 1] >= 2.0 * np.abs(Z[:, 0])
        R = np.zeros_like(Z)
        for i in np.nonzero(~inside)[0]:
            R[i] = Z[i] - cone.project(Z[i])
        return R
    R = np.empty_like(Z)
    for i in range(Z.shape[0]):
        R[i] = Z[i] - cone.project(Z[i])
    return R


def project_onto_hom_upper_image_batch(problem: VcpProblem, V,
                                       cfg: SolverConfig = DEFAULT_CONFIG):
    """Project each row of V onto the lifted cone of the attainable set.

    Perspective branch: with q eliminated (best q for fixed (u, mu) is
    mu F(u/mu) + the cone projection of the residual), minimize the
    smooth convex function

        f(u, mu) = dist_C(v_q - mu F(u/mu))^2 + (mu - v_mu)^2

    over mu >= mu_min plus the perspective feasibility constraints
    mu g_j(u/mu) <= 0. The recession branch projects onto {(q, 0): q in
    K} in closed form, K being the known recession cone (the ordering
    cone when no sharper description exists). The better branch wins.
    """
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    B = V.shape[0]
    m, n = problem.m, problem.n
    mu_min = cfg.mu_min
    Vq, Vmu = V[:, :m], V[:, m]

    x_feas = _feasible_point(problem, cfg)
    cone = problem.cone

    # layout per row: [u (n) | mu]
    def unpack(Z):
        return Z[:, :n], Z[:, n]

    def residual(Z):
        U, MU = unpack(Z)
        X = U / MU[:, None]
        FX = problem.objective(X)
        R = Vq - MU[:, None] * FX
        RP = _cone_residual_many(cone, R)
        return X, FX, RP

    def value(Z):
        _, _, RP = residual(Z)
        _, MU = unpack(Z)
        return np.einsum("ij,ij->i", RP, RP) + (MU - Vmu) ** 2

    def grad(Z):
        U, MU = unpack(Z)
        X, FX, RP = residual(Z)
        W = 2.0 * RP
        jac = problem.objective_jac(X)  # (B, m, n)
        gu = -np.einsum("bmn,bm->bn", jac, W)
        hom_part = FX - np.einsum("bmn,bn->bm", jac, X)
        gmu = -np.einsum("bm,bm->b", hom_part, W) + 2.0 * (MU - Vmu)
        return np.column_stack([gu, gmu])

    has_g = problem.n_constraints > 0
    cons = None
    cons_grad = None
    if has_g:

        def cons(Z):
            U, MU = unpack(Z)
            X = U / MU[:, None]
            return MU[:, None] * problem.constraint_values(X)

        def cons_grad(Z, jmax):
            U, MU = unpack(Z)
            X = U / MU[:, None]
            gj = problem.constraint_jac(X)  # (B, J, n)
            gv = problem.constraint_values(X)  # (B, J)
            take_j = np.take_along_axis(gj, jmax[:, None, None], axis=1)[:, 0, :]
            take_v = np.take_along_axis(gv, jmax[:, None], axis=1)[:, 0]
            gmu = take_v - np.einsum("bn,bn->b", take_j, X)
            return np.column_stack([take_j, gmu])

    def project(Z):
        Z = Z.copy()
        Z[:, n] = np.maximum(Z[:, n], mu_min)
        return Z

    mu0 = max(mu_min, 0.25)
    Z0 = np.zeros((B, n + 1))
    Z0[:, :n] = mu0 * x_feas
    Z0[:, n] = mu0

    Zb, fb, _, okb = _minimize_batch(value, grad, cons, cons_grad, project, Z0, cfg)
    Ub, MUb = unpack(Zb)
    _, _, RPb = residual(Zb)
    Qb = Vq - RPb
    persp_dist = np.sqrt(np.maximum(fb, 0.0))

    # recession branch: closed form over {(q, 0): q in K}
    K = problem.recession_cone if problem.recession_cone is not None else problem.cone
    rec_dist = np.empty(B)
    rec_q = np.empty((B, m))
    for i in range(B):
        proj = K.project(V[i, :m])
        rec_q[i] = proj
        rec_dist[i] = math.sqrt(
            float(np.sum((V[i, :m] - proj) ** 2)) + float(V[i, m] ** 2)
        )

    results = []
    for i in range(B):
        if okb[i] and persp_dist[i] <= rec_dist[i]:
            results.append(
                HomProjection(
                    q=Qb[i].copy(),
                    mu=float(MUb[i]),
                    witness_x=(Ub[i] / MUb[i]).copy(),
                    distance=float(persp_dist[i]),
                )
            )
        elif np.isfinite(rec_dist[i]):
            results.append(
                HomProjection(
                    q=rec_q[i].copy(), mu=0.0, witness_x=None,
                    distance=float(rec_dist[i]),
                )
            )
        else:
            raise SolverFailure("both projection branches failed")
    return results


def project_onto_hom_upper_image(problem: VcpProblem, v,
                                 cfg: SolverConfig = DEFAULT_CONFIG) -> HomProjection:
    """Single-vector wrapper around the batched lifted-cone projection."""
    v = np.asarray(v, dtype=np.float64)
    if np.linalg.norm(v) > 1.0 + 1e-9:
        raise ValueError("query vector must lie in the unit ball")
    return project_onto_hom_upper_image_batch(problem, v[None, :], cfg)[0]
