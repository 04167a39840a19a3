"""Command-line front door: curve, solve, verify, classify, serve.

Exit codes are a stable contract: 0 success, 1 I/O, 2 domain, 3 solver,
4 unsupported, 5 verification failure, 6 contract violation.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import analytics, engine, problems, verification
from .config import SolverConfig, load_solver_config
from .errors import (
    DomainError,
    InvalidCone,
    NeitherCase,
    NoFeasibleDelta,
    PreconditionViolation,
    SchemaError,
    SolverFailure,
    UnknownInstance,
    UnsupportedDimension,
)
from .geometry import RoiSpec

EXIT_OK = 0
EXIT_IO = 1
EXIT_DOMAIN = 2
EXIT_SOLVER = 3
EXIT_UNSUPPORTED = 4
EXIT_VERIFY_FAIL = 5
EXIT_CONTRACT = 6


def _fmt6(x: float) -> str:
    """Six significant digits for human-readable files."""
    if x == 0:
        return "0"
    return f"{x:.6g}"


def _write_manifest(path: Path, command: str, args: dict, outputs: dict,
                    started: float, status: str):
    manifest = {
        "command": command,
        "args": args,
        "outputs": outputs,
        "started_unix": started,
        "duration_s": time.time() - started,
        "status": status,
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.asarray([float(t) for t in text.split(",")], dtype=np.float64)
    except ValueError as exc:
        raise DomainError(f"could not parse point {text!r}") from exc


def _load_problem_arg(args):
    if getattr(args, "builtin", None):
        return problems.load_problem({"builtin": args.builtin})
    path = Path(args.problem)
    if not path.exists():
        raise FileNotFoundError(f"problem file not found: {path}")
    return problems.load_problem(path.read_text(encoding="utf-8"))


def _solver_config(args) -> SolverConfig:
    if getattr(args, "config", None):
        return load_solver_config(args.config)
    return SolverConfig()


def polygon_chain(points, center) -> np.ndarray:
    """Vertices sorted by angle around the center, closed at the end."""
    pts = np.atleast_2d(points)
    ang = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    order = np.argsort(ang, kind="stable")
    chain = pts[order]
    return np.vstack([chain, chain[:1]])


def cmd_curve(args) -> int:
    started = time.time()
    curve = analytics.error_curve(args.delta, args.count)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# delta={_fmt6(curve.delta)} r_validity={_fmt6(curve.r_validity)}",
             "r,alpha"]
    lines.extend(f"{_fmt6(r)},{_fmt6(a)}" for r, a in curve.samples)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"), "curve",
                    {"delta": args.delta, "count": args.count},
                    {"curve": str(out)}, started, "ok")
    print(f"wrote {args.count} samples to {out} (r_validity {_fmt6(curve.r_validity)})")
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.time()
    problem = _load_problem_arg(args)
    center = _parse_point(args.center)
    cfg = engine.EngineConfig(
        delta=args.delta,
        roi=RoiSpec(center, args.radius),
        seed=args.seed,
        solver=_solver_config(args),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = "ok"
    try:
        solution = engine.approximate(problem, cfg)
    except SolverFailure:
        _write_manifest(out_dir / "manifest.json", "solve",
                        {"delta": args.delta, "center": center.tolist(),
                         "radius": args.radius, "seed": args.seed},
                        {}, started, "solver-failure")
        raise

    chain = polygon_chain(solution.image_vertices_original, center)
    vert_path = out_dir / "vertices.csv"
    vert_lines = ["x,y"] + [f"{_fmt6(x)},{_fmt6(y)}" for x, y in chain]
    vert_path.write_text("\n".join(vert_lines) + "\n", encoding="utf-8")

    sol_path = out_dir / "solution.json"
    doc = solution.to_dict()
    doc["problem_document"] = problems.save_problem(problem) if problem.document else None
    sol_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    if solution.status != engine.SUCCESS:
        status = "partial: " + solution.status
    _write_manifest(out_dir / "manifest.json", "solve",
                    {"delta": args.delta, "center": center.tolist(),
                     "radius": args.radius, "seed": args.seed,
                     "problem": doc["problem_document"]},
                    {"vertices": str(vert_path), "solution": str(sol_path)},
                    started, status)
    print(f"solution with {len(solution.X)} vertices, gap estimate "
          f"{_fmt6(solution.gap_estimate)} ({solution.status}) -> {out_dir}")
    return EXIT_OK


def _load_solution_dir(path_str):
    path = Path(path_str)
    sol_file = path / "solution.json"
    if not sol_file.exists():
        raise FileNotFoundError(f"no solution.json under {path}")
    doc = json.loads(sol_file.read_text(encoding="utf-8"))
    solution = engine.ApproxSolution.from_dict(doc)
    problem_doc = doc.get("problem_document")
    return solution, problem_doc


def _instance_for(solution, problem_doc):
    name = None
    if problem_doc and "builtin" in problem_doc:
        name = problem_doc["builtin"]
    elif solution.problem_name in problems.builtin_names():
        name = solution.problem_name
    if name is None:
        raise UnsupportedDimension(
            "verification needs a builtin analytic instance"
        )
    return problems.builtin_instance(name)


def cmd_verify(args) -> int:
    started = time.time()
    solution, problem_doc = _load_solution_dir(args.solution)
    instance = _instance_for(solution, problem_doc)
    report = verification.brute_force_dtH(solution, instance, args.resolution)
    out = Path(args.out) if args.out else Path(args.solution) / "verification.json"
    out.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    _write_manifest(out.with_suffix(".manifest.json"), "verify",
                    {"solution": args.solution, "resolution": args.resolution},
                    {"report": str(out)}, started,
                    "pass" if report.passed else "fail")
    print(f"measured gap {_fmt6(report.measured_gap)} vs delta "
          f"{_fmt6(report.delta)} (slack {_fmt6(report.slack)}): "
          f"{'pass' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def cmd_classify(args) -> int:
    solution, problem_doc = _load_solution_dir(args.solution)
    instance = _instance_for(solution, problem_doc)
    point = _parse_point(args.point)
    shifted = point - solution.roi.center
    result = analytics.classify_boundary_point(shifted, solution, instance)
    payload = {
        "kind": result.kind,
        "bound": result.bound,
        "witness": np.asarray(result.witness).tolist(),
    }
    if result.q is not None:
        payload["q"] = result.q
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homroi",
        description="inner conic approximation of attainable sets with "
                    "region-of-interest error analytics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("curve", help="sample the error bound trade-off curve")
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--count", type=int, default=200)
    c.add_argument("--out", default="curve.csv")
    c.set_defaults(func=cmd_curve)

    s = sub.add_parser("solve", help="compute a finite inner approximation")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=problems.builtin_names())
    src.add_argument("--problem", help="path to a problem document (JSON)")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--center", default="0,0")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--config", help="solver config JSON")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="brute-force verification of a solution dir")
    v.add_argument("--solution", required=True)
    v.add_argument("--resolution", type=int, default=2000)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("classify", help="classify an approximate boundary point")
    k.add_argument("--solution", required=True)
    k.add_argument("--point", required=True)
    k.set_defaults(func=cmd_classify)

    r = sub.add_parser("serve", help="run the HTTP service")
    r.add_argument("--host", default="127.0.0.1")
    r.add_argument("--port", type=int, default=8787)
    r.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, OSError, json.JSONDecodeError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, SchemaError, InvalidCone, UnknownInstance,
            NoFeasibleDelta, PreconditionViolation, ValueError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except UnsupportedDimension as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except NeitherCase as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
