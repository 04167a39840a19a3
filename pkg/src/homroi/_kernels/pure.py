"""Pure-numpy lane of the cone-projection kernel.

Mirrors the compiled extension (same Gram-matrix formulation, same
active-set pivoting order) so both lanes agree to rounding error.
"""

import numpy as np

BACKEND = "pure"


def _solve_passive(GtG, Gtv, idx):
    """Normal-equation solve restricted to the passive generator set."""
    A = GtG[idx[:, None], idx]
    b = Gtv[idx]
    jitter = 0.0
    for _ in range(3):
        try:
            return np.linalg.solve(A + jitter * np.eye(A.shape[0]), b)
        except np.linalg.LinAlgError:
            jitter = max(jitter * 100.0, 1e-13 * (np.trace(A) + 1.0))
    return np.linalg.lstsq(A, b, rcond=None)[0]


def _nnls_core(G, GtG, Gtv, v, tol, maxiter):
    # the iterate's support stays inside the passive set, so gradient and
    # residual updates cost O(k * |passive|), never O(k^2)
    k = G.shape[1]
    x = np.zeros(k)
    passive = np.zeros(k, dtype=bool)
    scale = max(1.0, float(np.abs(Gtv).max(initial=0.0)))
    opt_tol = tol * scale

    for _ in range(maxiter):
        idx = np.flatnonzero(passive)
        w = Gtv - GtG[:, idx] @ x[idx] if idx.size else Gtv.copy()
        w[passive] = -np.inf
        j = int(np.argmax(w))
        if not np.isfinite(w[j]) or w[j] <= opt_tol:
            resid = v - G[:, idx] @ x[idx] if idx.size else v
            return x, float(np.linalg.norm(resid)), 0
        passive[j] = True
        # inner loop: restore positivity of the passive-set LS solution
        for _ in range(maxiter):
            idx = np.flatnonzero(passive)
            z = _solve_passive(GtG, Gtv, idx)
            if z.min(initial=np.inf) > 0.0:
                x[:] = 0.0
                x[idx] = z
                break
            xp = x[idx]
            denom = xp - z
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where((z <= 0.0) & (denom > 0.0), xp / denom, np.inf)
            alpha = float(ratios.min())
            if not np.isfinite(alpha):
                alpha = 0.0
            xp = xp + alpha * (z - xp)
            x[:] = 0.0
            x[idx] = xp
            drop = xp <= tol * max(1.0, float(np.abs(xp).max(initial=0.0)))
            x[idx[drop]] = 0.0
            passive[idx[drop]] = False
            if not passive.any():
                break
    idx = np.flatnonzero(passive)
    resid = v - G[:, idx] @ x[idx] if idx.size else v
    return x, float(np.linalg.norm(resid)), -1


def nnls_project(G, v, tol=1e-10, maxiter=0):
    """Project v onto cone{columns of G}: min ||G @ lam - v||, lam >= 0.

    Returns (lam, rnorm, info) with info 0 on convergence, -1 on budget
    exhaustion. Lawson-Hanson active set, deterministic pivoting.
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if maxiter <= 0:
        maxiter = 100 * G.shape[1]
    GtG = G.T @ G
    Gtv = G.T @ v
    return _nnls_core(G, GtG, Gtv, v, tol, maxiter)


def project_distances(G, V, tol=1e-10, maxiter=0):
    """Distances from each row of V to cone{columns of G}.

    Identical to projecting each row with nnls_project sequentially
    (embarrassingly-parallel map contract).
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    V = np.atleast_2d(np.ascontiguousarray(V, dtype=np.float64))
    if maxiter <= 0:
        maxiter = 100 * G.shape[1]
    GtG = G.T @ G
    GtV = V @ G
    out = np.empty(V.shape[0])
    for i in range(V.shape[0]):
        _, rnorm, info = _nnls_core(G, GtG, GtV[i], V[i], tol, maxiter)
        out[i] = rnorm if info == 0 else np.nan
    return out


def project_many(G, V, tol=1e-10, maxiter=0):
    """Batch cone projection: (projections, distances, coefficient sums)."""
    G = np.ascontiguousarray(G, dtype=np.float64)
    V = np.atleast_2d(np.ascontiguousarray(V, dtype=np.float64))
    if maxiter <= 0:
        maxiter = 100 * G.shape[1]
    GtG = G.T @ G
    GtV = V @ G
    nv = V.shape[0]
    proj = np.empty((nv, G.shape[0]))
    dist = np.empty(nv)
    sums = np.empty(nv)
    for i in range(nv):
        lam, rnorm, info = _nnls_core(G, GtG, GtV[i], V[i], tol, maxiter)
        if info != 0:
            dist[i] = np.nan
            sums[i] = np.nan
            proj[i] = np.nan
            continue
        dist[i] = rnorm
        sums[i] = lam.sum()
        proj[i] = G @ lam
    return proj, dist, sums
