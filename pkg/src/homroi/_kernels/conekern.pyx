# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled lane of the cone-projection kernel (Lawson-Hanson active set).

Same algorithm as the pure lane: Gram-matrix formulation, deterministic
pivoting, normal-equation inner solves with jitter fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, fabs, sqrt
from libc.stdlib cimport free, malloc
from libc.string cimport memset

cnp.import_array()

BACKEND = "compiled"

cdef double INF = 1e300


cdef int _gauss_solve(double* A, double* b, double* z, int n) noexcept nogil:
    """Solve A z = b in place (row-major, partial pivoting). 0 on success."""
    cdef int i, j, p, piv
    cdef double maxv, tmp, f
    for i in range(n):
        piv = i
        maxv = fabs(A[i * n + i])
        for p in range(i + 1, n):
            if fabs(A[p * n + i]) > maxv:
                maxv = fabs(A[p * n + i])
                piv = p
        if maxv == 0.0:
            return -1
        if piv != i:
            for j in range(n):
                tmp = A[i * n + j]
                A[i * n + j] = A[piv * n + j]
                A[piv * n + j] = tmp
            tmp = b[i]
            b[i] = b[piv]
            b[piv] = tmp
        for p in range(i + 1, n):
            f = A[p * n + i] / A[i * n + i]
            if f != 0.0:
                for j in range(i, n):
                    A[p * n + j] -= f * A[i * n + j]
                b[p] -= f * b[i]
    for i in range(n - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, n):
            tmp -= A[i * n + j] * z[j]
        z[i] = tmp / A[i * n + i]
    return 0


cdef int _solve_passive(double* GtG, double* Gtv, unsigned char* passive,
                        int k, int npas, int* idx, double* A, double* b,
                        double* z) noexcept nogil:
    """LS on the passive set via jittered normal equations; npas entries."""
    cdef int i, j, attempt, p
    cdef double jitter = 0.0, trace
    p = 0
    for i in range(k):
        if passive[i]:
            idx[p] = i
            p += 1
    for attempt in range(3):
        trace = 0.0
        for i in range(npas):
            for j in range(npas):
                A[i * npas + j] = GtG[idx[i] * k + idx[j]]
            A[i * npas + i] += jitter
            trace += A[i * npas + i]
            b[i] = Gtv[idx[i]]
        if _gauss_solve(A, b, z, npas) == 0:
            return 0
        if jitter == 0.0:
            jitter = 1e-13 * (trace + 1.0)
        else:
            jitter *= 100.0
    return -1


cdef int _nnls_core(double* G, double* GtG, double* Gtv, double* v,
                    int d, int k, double tol, int maxiter,
                    double* x, double* rnorm,
                    unsigned char* passive, int* idx,
                    double* A, double* b, double* z, double* xp) noexcept nogil:
    # the iterate's support stays inside the passive set, so gradient and
    # residual updates cost O(k * |passive|), never O(k^2)
    cdef int it, inner, i, j, t, jmax, npas, nsup
    cdef double scale = 1.0, opt_tol, wmax, wi, alpha, ratio, zmin, xmax, r, s, wchk
    memset(x, 0, k * sizeof(double))
    memset(passive, 0, k)
    nsup = 0  # idx[:nsup] lists the current support (passive indices)
    for i in range(k):
        if fabs(Gtv[i]) > scale:
            scale = fabs(Gtv[i])
    opt_tol = tol * scale

    for it in range(maxiter):
        jmax = -1
        wmax = -INF
        for i in range(k):
            if passive[i]:
                continue
            wi = Gtv[i]
            for t in range(nsup):
                wi -= GtG[i * k + idx[t]] * x[idx[t]]
            if wi > wmax:
                wmax = wi
                jmax = i
        if jmax < 0 or wmax <= opt_tol:
            break
        passive[jmax] = 1
        for inner in range(maxiter):
            npas = 0
            for i in range(k):
                if passive[i]:
                    npas += 1
            if npas == 0:
                nsup = 0
                break
            if _solve_passive(GtG, Gtv, passive, k, npas, idx, A, b, z) != 0:
                return -1
            zmin = INF
            for i in range(npas):
                if z[i] < zmin:
                    zmin = z[i]
            if zmin > 0.0:
                memset(x, 0, k * sizeof(double))
                for i in range(npas):
                    x[idx[i]] = z[i]
                nsup = npas
                break
            alpha = INF
            for i in range(npas):
                xp[i] = x[idx[i]]
                if z[i] <= 0.0 and xp[i] - z[i] > 0.0:
                    ratio = xp[i] / (xp[i] - z[i])
                    if ratio < alpha:
                        alpha = ratio
            if alpha >= INF:
                alpha = 0.0
            xmax = 1.0
            for i in range(npas):
                xp[i] = xp[i] + alpha * (z[i] - xp[i])
                if fabs(xp[i]) > xmax:
                    xmax = fabs(xp[i])
            memset(x, 0, k * sizeof(double))
            nsup = 0
            for i in range(npas):
                if xp[i] <= tol * xmax:
                    passive[idx[i]] = 0
                else:
                    x[idx[i]] = xp[i]
            # recompute the support list after drops
            for i in range(k):
                if passive[i]:
                    idx[nsup] = i
                    nsup += 1
            if nsup == 0:
                break
    s = 0.0
    for i in range(d):
        r = v[i]
        for t in range(nsup):
            r -= G[i * k + idx[t]] * x[idx[t]]
        s += r * r
    rnorm[0] = sqrt(s)
    for i in range(k):
        if passive[i]:
            continue
        wchk = Gtv[i]
        for t in range(nsup):
            wchk -= GtG[i * k + idx[t]] * x[idx[t]]
        if wchk > opt_tol:
            return -1
    return 0


def nnls_project(G, v, double tol=1e-10, int maxiter=0):
    """Project v onto cone{columns of G}: min ||G @ lam - v||, lam >= 0.

    Returns (lam, rnorm, info) with info 0 on convergence, -1 on budget
    exhaustion.
    """
    cdef cnp.ndarray[double, ndim=2, mode="c"] Ga = np.ascontiguousarray(G, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] va = np.ascontiguousarray(v, dtype=np.float64)
    cdef int d = Ga.shape[0], k = Ga.shape[1]
    if maxiter <= 0:
        maxiter = 100 * k
    cdef cnp.ndarray[double, ndim=2, mode="c"] GtG = np.ascontiguousarray(Ga.T @ Ga)
    cdef cnp.ndarray[double, ndim=1, mode="c"] Gtv = np.ascontiguousarray(Ga.T @ va)
    cdef cnp.ndarray[double, ndim=1, mode="c"] x = np.zeros(k)
    cdef double rnorm = 0.0
    cdef unsigned char* passive = <unsigned char*> malloc(k)
    cdef int* idx = <int*> malloc(k * sizeof(int))
    cdef double* A = <double*> malloc(k * k * sizeof(double))
    cdef double* b = <double*> malloc(k * sizeof(double))
    cdef double* z = <double*> malloc(k * sizeof(double))
    cdef double* xp = <double*> malloc(k * sizeof(double))
    cdef int info
    try:
        info = _nnls_core(&Ga[0, 0], &GtG[0, 0], &Gtv[0], &va[0], d, k,
                          tol, maxiter, &x[0], &rnorm, passive, idx, A, b, z, xp)
    finally:
        free(passive); free(idx); free(A); free(b); free(z); free(xp)
    return x, rnorm, info


def project_many(G, V, double tol=1e-10, int maxiter=0):
    """Batch cone projection: (projections, distances, coefficient sums)."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] Ga = np.ascontiguousarray(G, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Va = np.ascontiguousarray(np.atleast_2d(V), dtype=np.float64)
    cdef int d = Ga.shape[0], k = Ga.shape[1], nv = Va.shape[0]
    if maxiter <= 0:
        maxiter = 100 * k
    cdef cnp.ndarray[double, ndim=2, mode="c"] GtG = np.ascontiguousarray(Ga.T @ Ga)
    cdef cnp.ndarray[double, ndim=2, mode="c"] GtV = np.ascontiguousarray(Va @ Ga)
    cdef cnp.ndarray[double, ndim=2, mode="c"] proj = np.empty((nv, d))
    cdef cnp.ndarray[double, ndim=1, mode="c"] dist = np.empty(nv)
    cdef cnp.ndarray[double, ndim=1, mode="c"] sums = np.empty(nv)
    cdef double* x = <double*> malloc(k * sizeof(double))
    cdef unsigned char* passive = <unsigned char*> malloc(k)
    cdef int* idx = <int*> malloc(k * sizeof(int))
    cdef double* A = <double*> malloc(k * k * sizeof(double))
    cdef double* b = <double*> malloc(k * sizeof(double))
    cdef double* z = <double*> malloc(k * sizeof(double))
    cdef double* xp = <double*> malloc(k * sizeof(double))
    cdef double rnorm = 0.0, ssum, acc
    cdef int i, j, t, info
    try:
        with nogil:
            for i in range(nv):
                info = _nnls_core(&Ga[0, 0], &GtG[0, 0], &GtV[i, 0], &Va[i, 0],
                                  d, k, tol, maxiter, x, &rnorm,
                                  passive, idx, A, b, z, xp)
                if info != 0:
                    dist[i] = NAN
                    sums[i] = NAN
                    for t in range(d):
                        proj[i, t] = NAN
                    continue
                dist[i] = rnorm
                ssum = 0.0
                for j in range(k):
                    ssum += x[j]
                sums[i] = ssum
                for t in range(d):
                    acc = 0.0
                    for j in range(k):
                        if x[j] != 0.0:
                            acc += Ga[t, j] * x[j]
                    proj[i, t] = acc
    finally:
        free(x); free(passive); free(idx); free(A); free(b); free(z); free(xp)
    return proj, dist, sums


def project_distances(G, V, double tol=1e-10, int maxiter=0):
    """Distances from each row of V to cone{columns of G}."""
    cdef cnp.ndarray[double, ndim=2, mode="c"] Ga = np.ascontiguousarray(G, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Va = np.ascontiguousarray(np.atleast_2d(V), dtype=np.float64)
    cdef int d = Ga.shape[0], k = Ga.shape[1], nv = Va.shape[0]
    if maxiter <= 0:
        maxiter = 100 * k
    cdef cnp.ndarray[double, ndim=2, mode="c"] GtG = np.ascontiguousarray(Ga.T @ Ga)
    cdef cnp.ndarray[double, ndim=2, mode="c"] GtV = np.ascontiguousarray(Va @ Ga)
    cdef cnp.ndarray[double, ndim=1, mode="c"] out = np.empty(nv)
    cdef double* x = <double*> malloc(k * sizeof(double))
    cdef unsigned char* passive = <unsigned char*> malloc(k)
    cdef int* idx = <int*> malloc(k * sizeof(int))
    cdef double* A = <double*> malloc(k * k * sizeof(double))
    cdef double* b = <double*> malloc(k * sizeof(double))
    cdef double* z = <double*> malloc(k * sizeof(double))
    cdef double* xp = <double*> malloc(k * sizeof(double))
    cdef double rnorm = 0.0
    cdef int i, info
    try:
        with nogil:
            for i in range(nv):
                info = _nnls_core(&Ga[0, 0], &GtG[0, 0], &GtV[i, 0], &Va[i, 0],
                                  d, k, tol, maxiter, x, &rnorm,
                                  passive, idx, A, b, z, xp)
                out[i] = rnorm if info == 0 else NAN
    finally:
        free(x); free(passive); free(idx); free(A); free(b); free(z); free(xp)
    return out
