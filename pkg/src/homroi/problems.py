"""Problem instances: objective/constraint oracle bundles plus built-ins.

A problem bundles vectorized oracles for the objectives F, the feasible
set S (inequality constraints, optionally an exact projector), and the
ordering cone C. Built-in analytic instances additionally expose an
exact membership predicate and boundary parameterization of the
attainable set P = cl(F[S] + C), which the verification oracles need.
"""

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import InvalidCone, SchemaError, UnknownInstance

MEMBER_TOL = 1e-9


# ---------------------------------------------------------------------------
# ordering cones
# ---------------------------------------------------------------------------


class ConeSpec:
    """Non-trivial pointed closed convex ordering cone in R^m.

    Either finitely generated (V-representation) or given by membership
    and projection oracles (general closed convex cones).
    """

    def __init__(self, m, generators=None, member=None, project=None,
                 solid=None, interior=None, label=""):
        self.m = int(m)
        self.label = label
        if generators is not None:
            gens = np.atleast_2d(np.asarray(generators, dtype=np.float64))
            if gens.size == 0:
                raise InvalidCone("cone needs at least one generator")
            if gens.shape[1] != self.m:
                raise InvalidCone("generator dimension mismatch")
            norms = np.linalg.norm(gens, axis=1)
            if np.any(norms <= 1e-12):
                raise InvalidCone("zero generator")
            gens = gens / norms[:, None]
            self.generators = gens
            self._cols = np.ascontiguousarray(gens.T)
            self._check_pointed()
            self.solid = bool(np.linalg.matrix_rank(gens, tol=1e-10) == self.m) \
                if solid is None else solid
            self._member = None
            self._project = None
            self._interior = interior
        else:
            if member is None or project is None:
                raise InvalidCone("oracle cone needs member and project callables")
            self.generators = None
            self._cols = None
            self._member = member
            self._project = project
            self.solid = True if solid is None else solid
            self._interior = interior

    def _check_pointed(self):
        # pointed: the cone contains no line, i.e. -g stays outside for each g
        for g in self.generators:
            _, rnorm, info = _kernels.nnls_project(self._cols, -g)
            if info == 0 and rnorm <= 1e-9:
                raise InvalidCone("cone contains a line (not pointed)")

    @property
    def is_polyhedral(self) -> bool:
        return self.generators is not None

    def project(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if self.is_polyhedral:
            lam, _, _ = _kernels.nnls_project(self._cols, z)
            return self._cols @ lam
        return np.asarray(self._project(z), dtype=np.float64)

    def distance(self, z) -> float:
        return float(np.linalg.norm(np.asarray(z, dtype=np.float64) - self.project(z)))

    def member(self, z, tol=MEMBER_TOL) -> bool:
        if self._member is not None:
            return bool(self._member(np.asarray(z, dtype=np.float64), tol))
        return self.distance(z) <= tol

    def interior_direction(self) -> np.ndarray:
        if self._interior is not None:
            return np.asarray(self._interior, dtype=np.float64)
        if not self.solid:
            raise InvalidCone("cone has no interior direction")
        d = self.generators.mean(axis=0)
        return d / np.linalg.norm(d)

    # -- two-dimensional helpers (angle arithmetic) --

    def _extreme_angles(self):
        """Smallest angle interval [lo, hi] containing the cone (m = 2)."""
        if self.m != 2:
            raise InvalidCone("angle helpers are 2-dimensional")
        if self.is_polyhedral:
            base = math.atan2(self.generators[0, 1], self.generators[0, 0])
            rel = []
            for g in self.generators:
                a = math.atan2(g[1], g[0]) - base
                while a > math.pi:
                    a -= 2 * math.pi
                while a < -math.pi:
                    a += 2 * math.pi
                rel.append(a)
            lo, hi = min(rel), max(rel)
            if hi - lo >= math.pi:
                raise InvalidCone("cone spans a half-space or more")
            return base + lo, base + hi
        # oracle cone: bisect the membership arc around an interior direction
        c = self.interior_direction()
        mid = math.atan2(c[1], c[0])

        def inside(a):
            return self.member(np.array([math.cos(a), math.sin(a)]), tol=1e-12)

        if not inside(mid):
            raise InvalidCone("interior direction fails cone membership")

        def edge(sign):
            lo_a, hi_a = 0.0, math.pi / 2 + 0.2
            while inside(mid + sign * hi_a) and hi_a < math.pi:
                lo_a = hi_a
                hi_a = min(math.pi, hi_a * 1.5)
            for _ in range(80):
                half = 0.5 * (lo_a + hi_a)
                if inside(mid + sign * half):
                    lo_a = half
                else:
                    hi_a = half
            return mid + sign * lo_a

        return edge(-1.0), edge(+1.0)

    def unit_rays(self, count=2) -> np.ndarray:
        """Unit vectors spanning the cone; exact for polyhedral m = 2."""
        if self.is_polyhedral and self.m == 2:
            lo, hi = self._extreme_angles()
            ang = np.linspace(lo, hi, max(count, len(self.generators)))
            rays = np.column_stack([np.cos(ang), np.sin(ang)])
            return np.vstack([self.generators, rays]) if count > 2 else self.generators
        if self.is_polyhedral:
            return self.generators
        lo, hi = self._extreme_angles()
        ang = np.linspace(lo, hi, max(2, count))
        return np.column_stack([np.cos(ang), np.sin(ang)])

    def dual_extreme_rays(self) -> np.ndarray:
        """Extreme rays of the dual cone (m = 2 only)."""
        lo, hi = self._extreme_angles()
        a1, a2 = hi - math.pi / 2, lo + math.pi / 2
        return np.array(
            [[math.cos(a1), math.sin(a1)], [math.cos(a2), math.sin(a2)]]
        )


def nonnegative_orthant(m=2) -> ConeSpec:
    return ConeSpec(m, generators=np.eye(m), label="orthant")


# ---------------------------------------------------------------------------
# problems
# ---------------------------------------------------------------------------


@dataclass
class VcpProblem:
    """Oracle bundle of a convex vector optimization instance.

    All value oracles are vectorized over leading axes; subgradient
    "jacobians" stack one row per objective component / constraint.
    Immutable after load; oracle evaluations are pure.
    """

    name: str
    m: int
    n: int
    objective: Callable  # (..., n) -> (..., m)
    objective_jac: Callable  # (..., n) -> (..., m, n), rows are subgradients
    cone: ConeSpec
    constraint_values: Optional[Callable] = None  # (..., n) -> (..., J)
    constraint_jac: Optional[Callable] = None  # (..., n) -> (..., J, n)
    n_constraints: int = 0
    feasible_point: Optional[np.ndarray] = None
    project_feasible: Optional[Callable] = None  # exact projector onto S
    recession_cone: Optional[ConeSpec] = None  # description of 0+P if known
    document: Optional[dict] = None

    def combined_subgrad(self, x, w):
        """Subgradient of x -> w . F(x) for nonnegative weights w."""
        jac = self.objective_jac(np.asarray(x, dtype=np.float64))
        return np.tensordot(np.asarray(w, dtype=np.float64), jac, axes=(0, -2))

    def violations(self, X):
        """Stacked constraint values; empty last axis when S = R^n."""
        X = np.asarray(X, dtype=np.float64)
        if self.n_constraints == 0:
            return np.zeros(X.shape[:-1] + (0,))
        return self.constraint_values(X)

    def max_violation(self, x) -> float:
        v = self.violations(np.asarray(x, dtype=np.float64))
        return float(v.max()) if v.size else 0.0


@dataclass
class AnalyticInstance:
    """Built-in problem with exact knowledge of its attainable set.

    `boundary_point` parameterizes bd P by a scalar; `param_window`
    returns a parameter interval whose image covers bd P inside a given
    ball. `dominated_preimage(y)` recovers x feasible with F(x) <=_C y.
    """

    problem: VcpProblem
    membership: Callable  # (y, tol) -> bool, vectorized over rows
    boundary_point: Callable  # t -> point on bd P (vectorized)
    param_window: Callable  # (center, horizon) -> (t_lo, t_hi)
    recession_generators: np.ndarray
    dominated_preimage: Callable  # y in P -> x in S with F(x) <=_C y

    @property
    def name(self):
        return self.problem.name

    def boundary_points(self, count, center=None, horizon=None) -> np.ndarray:
        """Boundary sample covering bd P, restricted to a ball if given."""
        center = np.zeros(self.problem.m) if center is None else np.asarray(center)
        horizon = 100.0 if horizon is None else float(horizon)
        lo, hi = self.param_window(center, horizon)
        ts = np.linspace(lo, hi, count)
        pts = self.boundary_point(ts)
        keep = np.linalg.norm(pts - center, axis=1) <= horizon * (1 + 1e-9)
        return pts[keep]

    def boundary_distance(self, y, center=None, horizon=None, grid=4096) -> float:
        """d(y, bd P): dense parameter grid plus golden-section refinement."""
        y = np.asarray(y, dtype=np.float64)
        center = y if center is None else np.asarray(center)
        horizon = (
            max(50.0, 4.0 * float(np.linalg.norm(y - center)) + 50.0)
            if horizon is None
            else horizon
        )
        lo, hi = self.param_window(center, horizon)
        ts = np.linspace(lo, hi, grid)
        d = np.linalg.norm(self.boundary_point(ts) - y, axis=1)
        i = int(np.argmin(d))
        a = ts[max(0, i - 1)]
        b = ts[min(grid - 1, i + 1)]
        return _golden_min(lambda t: float(np.linalg.norm(self.boundary_point(t) - y)), a, b)


def _golden_min(f, a, b, iters=200):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a < 1e-14 * (1.0 + abs(a) + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = f(x2)
    return min(f1, f2)


# ---------------------------------------------------------------------------
# built-in instances
# ---------------------------------------------------------------------------


def parabola2d() -> AnalyticInstance:
    """F(x) = (x, x^2 - 1) on S = R with C the nonnegative orthant.

    The attainable set is {(a, b): b >= phi(a)} with phi(t) = t^2 - 1
    for t <= 0 and phi(t) = -1 for t > 0 (the parabola arm is flooded by
    the cone to the right of its minimum).
    """

    def objective(X):
        X = np.asarray(X, dtype=np.float64)
        x = X[..., 0]
        return np.stack([x, x * x - 1.0], axis=-1)

    def objective_jac(X):
        X = np.asarray(X, dtype=np.float64)
        x = X[..., 0]
        ones = np.ones_like(x)
        return np.stack([ones, 2.0 * x], axis=-1)[..., :, None]

    problem = VcpProblem(
        name="parabola2d",
        m=2,
        n=1,
        objective=objective,
        objective_jac=objective_jac,
        cone=nonnegative_orthant(2),
        feasible_point=np.array([0.0]),
        project_feasible=lambda x: np.asarray(x, dtype=np.float64),
        recession_cone=nonnegative_orthant(2),
        document={"builtin": "parabola2d"},
    )

    def phi(t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(t <= 0.0, t * t - 1.0, -1.0)

    def membership(y, tol=MEMBER_TOL):
        y = np.asarray(y, dtype=np.float64)
        return y[..., 1] >= phi(y[..., 0]) - tol

    def boundary_point(t):
        t = np.asarray(t, dtype=np.float64)
        return np.stack([t, phi(t)], axis=-1)

    def param_window(center, horizon):
        c = np.asarray(center, dtype=np.float64)
        lo = -(math.sqrt(horizon + abs(c[1]) + 2.0) + abs(c[0]) + 1.0)
        hi = horizon + abs(c[0]) + 1.0
        return lo, hi

    def dominated_preimage(y):
        y = np.asarray(y, dtype=np.float64)
        if not membership(y, tol=1e-7):
            raise ValueError("point is not attainable")
        return np.array([min(y[0], 0.0)])

    return AnalyticInstance(
        problem=problem,
        membership=membership,
        boundary_point=boundary_point,
        param_window=param_window,
        recession_generators=np.eye(2),
        dominated_preimage=dominated_preimage,
    )


def linear2d() -> AnalyticInstance:
    """F(x) = x on the polyhedron {x >= 0, x1 + x2 >= 1}, C the orthant.

    The attainable set equals the feasible set itself; its lifted cone
    is finitely generated, so exact approximations exist.
    """

    def objective(X):
        return np.asarray(X, dtype=np.float64)

    def objective_jac(X):
        X = np.asarray(X, dtype=np.float64)
        eye = np.eye(2)
        return np.broadcast_to(eye, X.shape[:-1] + (2, 2)).copy()

    def constraint_values(X):
        X = np.asarray(X, dtype=np.float64)
        return np.stack(
            [-X[..., 0], -X[..., 1], 1.0 - X[..., 0] - X[..., 1]], axis=-1
        )

    def constraint_jac(X):
        X = np.asarray(X, dtype=np.float64)
        jac = np.array([[-1.0, 0.0], [0.0, -1.0], [-1.0, -1.0]])
        return np.broadcast_to(jac, X.shape[:-1] + (3, 2)).copy()

    def project_feasible(z):
        z = np.asarray(z, dtype=np.float64)
        if z[0] >= 0 and z[1] >= 0 and z[0] + z[1] >= 1:
            return z
        cands = []
        q = z + 0.5 * (1.0 - z[0] - z[1]) * np.ones(2)  # onto x1+x2 = 1
        cands.append(np.array([min(max(q[0], 0.0), 1.0), 0.0]))
        cands[-1][1] = 1.0 - cands[-1][0]
        cands.append(np.array([0.0, max(z[1], 1.0)]))
        cands.append(np.array([max(z[0], 1.0), 0.0]))
        best, best_d = None, np.inf
        for c in cands:
            if c[0] >= -1e-12 and c[1] >= -1e-12 and c[0] + c[1] >= 1 - 1e-12:
                d = np.linalg.norm(c - z)
                if d < best_d:
                    best, best_d = c, d
        return best

    problem = VcpProblem(
        name="linear2d",
        m=2,
        n=2,
        objective=objective,
        objective_jac=objective_jac,
        cone=nonnegative_orthant(2),
        constraint_values=constraint_values,
        constraint_jac=constraint_jac,
        n_constraints=3,
        feasible_point=np.array([0.5, 0.5]),
        project_feasible=project_feasible,
        recession_cone=nonnegative_orthant(2),
        document={"builtin": "linear2d"},
    )

    def membership(y, tol=MEMBER_TOL):
        y = np.asarray(y, dtype=np.float64)
        return np.minimum(
            np.minimum(y[..., 0], y[..., 1]), y[..., 0] + y[..., 1] - 1.0
        ) >= -tol

    def boundary_point(t):
        t = np.asarray(t, dtype=np.float64)
        x = np.where(t < 0.0, 0.0, np.where(t > 1.0, t, t))
        ylow = np.where(t < 0.0, 1.0 - t, np.where(t > 1.0, 0.0, 1.0 - t))
        return np.stack([x, ylow], axis=-1)

    def param_window(center, horizon):
        c = np.asarray(center, dtype=np.float64)
        pad = horizon + abs(c[0]) + abs(c[1]) + 2.0
        return -pad, pad

    def dominated_preimage(y):
        y = np.asarray(y, dtype=np.float64)
        if not membership(y, tol=1e-7):
            raise ValueError("point is not attainable")
        return y.copy()

    return AnalyticInstance(
        problem=problem,
        membership=membership,
        boundary_point=boundary_point,
        param_window=param_window,
        recession_generators=np.eye(2),
        dominated_preimage=dominated_preimage,
    )


_SOC_EDGES = np.array([[1.0, 2.0], [-1.0, 2.0]]) / math.sqrt(5.0)


def _soc_member(y, tol=MEMBER_TOL):
    y = np.asarray(y, dtype=np.float64)
    return y[..., 1] >= 2.0 * np.abs(y[..., 0]) - tol


def _soc_project(z):
    z = np.asarray(z, dtype=np.float64)
    if _soc_member(z, tol=0.0):
        return z
    best, best_d = np.zeros(2), float(np.linalg.norm(z))
    for e in _SOC_EDGES:
        t = max(0.0, float(z @ e))
        cand = t * e
        d = float(np.linalg.norm(z - cand))
        if d < best_d:
            best, best_d = cand, d
    return best


def soc2d() -> AnalyticInstance:
    """The parabola objective ordered by the oracle cone {y2 >= 2|y1|}.

    The cone enters through membership/projection oracles only, which
    exercises the non-V-representation code paths. Attainable-set
    membership reduces to the one-dimensional convex minimization
    min_x 2|a - x| + x^2 - 1 - b <= 0, solved in closed form at
    x* = clip(a, -1, 1).
    """

    def objective(X):
        X = np.asarray(X, dtype=np.float64)
        x = X[..., 0]
        return np.stack([x, x * x - 1.0], axis=-1)

    def objective_jac(X):
        X = np.asarray(X, dtype=np.float64)
        x = X[..., 0]
        ones = np.ones_like(x)
        return np.stack([ones, 2.0 * x], axis=-1)[..., :, None]

    cone = ConeSpec(
        2,
        member=_soc_member,
        project=_soc_project,
        solid=True,
        interior=np.array([0.0, 1.0]),
        label="soc",
    )

    problem = VcpProblem(
        name="soc2d",
        m=2,
        n=1,
        objective=objective,
        objective_jac=objective_jac,
        cone=cone,
        feasible_point=np.array([0.0]),
        project_feasible=lambda x: np.asarray(x, dtype=np.float64),
        recession_cone=ConeSpec(
            2,
            member=_soc_member,
            project=_soc_project,
            solid=True,
            interior=np.array([0.0, 1.0]),
            label="soc",
        ),
        document={"builtin": "soc2d"},
    )

    def phi(t):
        t = np.asarray(t, dtype=np.float64)
        return np.where(
            t < -1.0, -2.0 * (t + 1.0), np.where(t > 1.0, 2.0 * (t - 1.0), t * t - 1.0)
        )

    def membership(y, tol=MEMBER_TOL):
        y = np.asarray(y, dtype=np.float64)
        return y[..., 1] >= phi(y[..., 0]) - tol

    def boundary_point(t):
        t = np.asarray(t, dtype=np.float64)
        return np.stack([t, phi(t)], axis=-1)

    def param_window(center, horizon):
        c = np.asarray(center, dtype=np.float64)
        pad = horizon + abs(c[0]) + abs(c[1]) + 2.0
        return -pad, pad

    def dominated_preimage(y):
        y = np.asarray(y, dtype=np.float64)
        if not membership(y, tol=1e-7):
            raise ValueError("point is not attainable")
        return np.array([min(max(y[0], -1.0), 1.0)])

    return AnalyticInstance(
        problem=problem,
        membership=membership,
        boundary_point=boundary_point,
        param_window=param_window,
        recession_generators=_SOC_EDGES.copy(),
        dominated_preimage=dominated_preimage,
    )


_BUILTINS = {
    "parabola2d": parabola2d,
    "linear2d": linear2d,
    "soc2d": soc2d,
}


def builtin_instance(name: str) -> AnalyticInstance:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownInstance(f"no builtin instance named {name!r}") from None
    return factory()


def builtin_names():
    return sorted(_BUILTINS)


# ---------------------------------------------------------------------------
# problem documents (restricted convex expression grammar)
# ---------------------------------------------------------------------------


class _Expr:
    """Compiled convex expression: value + one subgradient, vectorized."""

    def __init__(self, value, subgrad):
        self.value = value
        self.subgrad = subgrad


def _compile_expr(node, n):
    if not isinstance(node, dict) or len(node) != 1:
        raise SchemaError(f"expression node must be a single-key object: {node!r}")
    (kind, body), = node.items()
    if kind == "affine":
        coeffs = np.asarray(body.get("coeffs", []), dtype=np.float64)
        const = float(body.get("const", 0.0))
        if coeffs.shape != (n,):
            raise SchemaError("affine coeffs must have length n")

        def value(X):
            return np.asarray(X) @ coeffs + const

        def subgrad(X):
            X = np.asarray(X)
            return np.broadcast_to(coeffs, X.shape[:-1] + (n,)).copy()

        return _Expr(value, subgrad)
    if kind in ("square", "abs"):
        inner = _compile_expr(body, n)
        if "affine" not in body:
            raise SchemaError(f"{kind} accepts an affine argument only")

        if kind == "square":

            def value(X):
                v = inner.value(X)
                return v * v

            def subgrad(X):
                return 2.0 * inner.value(X)[..., None] * inner.subgrad(X)

        else:

            def value(X):
                return np.abs(inner.value(X))

            def subgrad(X):
                return np.sign(inner.value(X))[..., None] * inner.subgrad(X)

        return _Expr(value, subgrad)
    if kind == "max":
        if not isinstance(body, list) or not body:
            raise SchemaError("max needs a nonempty list of expressions")
        parts = [_compile_expr(b, n) for b in body]

        def value(X):
            return np.max(np.stack([p.value(X) for p in parts], axis=-1), axis=-1)

        def subgrad(X):
            vals = np.stack([p.value(X) for p in parts], axis=-1)
            idx = np.argmax(vals, axis=-1)
            grads = np.stack([p.subgrad(X) for p in parts], axis=-2)
            return np.take_along_axis(grads, idx[..., None, None], axis=-2)[..., 0, :]

        return _Expr(value, subgrad)
    if kind == "sum":
        if not isinstance(body, list) or not body:
            raise SchemaError("sum needs a nonempty list of expressions")
        parts = [_compile_expr(b, n) for b in body]

        def value(X):
            return sum(p.value(X) for p in parts)

        def subgrad(X):
            return sum(p.subgrad(X) for p in parts)

        return _Expr(value, subgrad)
    if kind == "scale":
        factor = float(body.get("factor", 1.0))
        if factor < 0:
            raise SchemaError("scale factor must be nonnegative (convexity)")
        inner = _compile_expr(body["of"], n)
        return _Expr(
            lambda X: factor * inner.value(X), lambda X: factor * inner.subgrad(X)
        )
    raise SchemaError(f"unknown expression kind {kind!r}")


def _cone_from_document(node, m):
    if not isinstance(node, dict):
        raise SchemaError("cone must be an object")
    if "generators" in node:
        gens = node["generators"]
        if not gens:
            raise InvalidCone("cone generator list is empty")
        return ConeSpec(m, generators=np.asarray(gens, dtype=np.float64))
    if "soc" in node:
        # standard second-order cone {y : y_m >= ||y_1..m-1||}
        def member(y, tol=MEMBER_TOL):
            y = np.asarray(y, dtype=np.float64)
            return y[..., -1] >= np.linalg.norm(y[..., :-1], axis=-1) - tol

        def project(z):
            z = np.asarray(z, dtype=np.float64)
            head, tail = z[:-1], float(z[-1])
            nh = float(np.linalg.norm(head))
            if nh <= tail:
                return z
            if nh <= -tail:
                return np.zeros_like(z)
            coef = (nh + tail) / 2.0
            out = np.concatenate([head / nh * coef, [coef]])
            return out

        interior = np.zeros(m)
        interior[-1] = 1.0
        return ConeSpec(m, member=member, project=project, solid=True,
                        interior=interior, label="soc")
    raise SchemaError("cone must specify generators or soc")


def load_problem(document) -> VcpProblem:
    """Validate a problem document and construct its oracle bundle.

    Accepts a dict or a JSON string. Built-in instances are referenced
    by name: {"builtin": "parabola2d"}; an explicit cone may be given
    alongside and replaces the default ordering cone.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("problem document must be an object")

    if "builtin" in document:
        inst = builtin_instance(document["builtin"])
        problem = inst.problem
        if "cone" in document:
            cone = _cone_from_document(document["cone"], problem.m)
            problem.cone = cone
            problem.document = {"builtin": document["builtin"],
                                "cone": document["cone"]}
        return problem

    try:
        m = int(document["m"])
        n = int(document["n"])
        objective_nodes = document["objective"]
        cone_node = document["cone"]
    except KeyError as exc:
        raise SchemaError(f"missing required field {exc}") from exc
    if m < 1 or n < 1:
        raise SchemaError("m and n must be positive")
    if not isinstance(objective_nodes, list) or len(objective_nodes) != m:
        raise SchemaError("objective must list exactly m expressions")

    objectives = [_compile_expr(node, n) for node in objective_nodes]
    constraint_nodes = document.get("constraints", [])
    constraints = [_compile_expr(node, n) for node in constraint_nodes]
    cone = _cone_from_document(cone_node, m)

    def objective_fn(X):
        X = np.asarray(X, dtype=np.float64)
        return np.stack([o.value(X) for o in objectives], axis=-1)

    def objective_jac(X):
        X = np.asarray(X, dtype=np.float64)
        return np.stack([o.subgrad(X) for o in objectives], axis=-2)

    constraint_values = None
    constraint_jac = None
    if constraints:

        def constraint_values(X):
            X = np.asarray(X, dtype=np.float64)
            return np.stack([c.value(X) for c in constraints], axis=-1)

        def constraint_jac(X):
            X = np.asarray(X, dtype=np.float64)
            return np.stack([c.subgrad(X) for c in constraints], axis=-2)

    return VcpProblem(
        name=document.get("name", "document"),
        m=m,
        n=n,
        objective=objective_fn,
        objective_jac=objective_jac,
        cone=cone,
        constraint_values=constraint_values,
        constraint_jac=constraint_jac,
        n_constraints=len(constraints),
        feasible_point=None,
        project_feasible=None,
        recession_cone=None,
        document=document,
    )


def save_problem(problem: VcpProblem) -> dict:
    """Document round trip; semantics preserved, bit-exactness not required."""
    if problem.document is None:
        raise SchemaError("problem carries no serializable document")
    return json.loads(json.dumps(problem.document))


def check_convexity(problem: VcpProblem, samples=64, seed=0, tol=1e-8) -> bool:
    """Spot check C-convexity of F along random feasible segments."""
    rng = np.random.default_rng(seed)
    base = problem.feasible_point
    if base is None:
        base = np.zeros(problem.n)
    for _ in range(samples):
        x1 = base + rng.normal(size=problem.n) * 3.0
        x2 = base + rng.normal(size=problem.n) * 3.0
        if problem.project_feasible is not None:
            x1 = problem.project_feasible(x1)
            x2 = problem.project_feasible(x2)
        mid = 0.5 * (x1 + x2)
        gap = 0.5 * (problem.objective(x1) + problem.objective(x2)) - problem.objective(mid)
        if problem.cone.distance(gap) > tol * (1.0 + float(np.linalg.norm(gap))):
            return False
    return True
