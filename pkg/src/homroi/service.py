"""Session-oriented HTTP interface for the interactive exploration loop.

Sessions hold a problem and an append-only run history; computation
itself is stateless, so replaying a history on a fresh session
reproduces identical summaries. One approximation may be active per
session (409 on conflict); progress is observable through the status
endpoint while a run executes on its worker thread.

Payload field names are fixed by interface_schema.json shipped next to
this module.
"""

import threading
import time
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import analytics, engine, problems, scalarize
from .errors import (
    DomainError,
    HomroiError,
    InvalidCone,
    NonSolidCone,
    SchemaError,
    UnknownInstance,
)
from .geometry import RoiSpec


class Session:
    def __init__(self, problem_doc, problem):
        self.id = uuid.uuid4().hex
        self.problem_doc = problem_doc
        self.problem = problem
        self.history = []  # append-only run summaries
        self.active = False
        self.created = time.time()
        self.updated = self.created
        self.last_error: Optional[str] = None


class CreateSessionBody(BaseModel):
    problem: dict


class ApproximateBody(BaseModel):
    delta: float
    center: list
    radius: float
    seed: int = 0
    wait: bool = True


class RefineBody(BaseModel):
    point: list
    direction: Optional[list] = None


def _polygon(points, center):
    pts = np.atleast_2d(points)
    ang = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    order = np.argsort(ang, kind="stable")
    chain = pts[order]
    return np.vstack([chain, chain[:1]]).tolist()


def _run_summary(index, body: ApproximateBody, solution) -> dict:
    summary = {
        "index": index,
        "delta": body.delta,
        "center": list(map(float, body.center)),
        "radius": body.radius,
        "seed": body.seed,
        "status": solution.status,
        "gap_estimate": solution.gap_estimate,
        "region_of_validity": analytics.region_of_validity(body.delta),
        "vertices": _polygon(solution.image_vertices_original, np.asarray(body.center)),
        "vertices_shifted": solution.image_vertices.tolist(),
        "vertex_kinds": list(solution.vertex_kinds),
        "far_points": [
            v for v, k in zip(solution.image_vertices_original.tolist(),
                              solution.vertex_kinds)
            if k == "direction"
        ],
        "X": np.asarray(solution.X).tolist(),
    }
    if body.radius < summary["region_of_validity"]:
        summary["bound"] = analytics.alpha(body.radius, body.delta)
    else:
        summary["bound_omitted_reason"] = "OutOfValidity"
    return summary


def create_app() -> FastAPI:
    app = FastAPI(title="homroi service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions = {}
    lock = threading.Lock()
    # injectable for tests that need a controllable long run
    app.state.runner = engine.approximate

    def get_session(session_id) -> Session:
        try:
            return sessions[session_id]
        except KeyError:
            raise HTTPException(404, "unknown session") from None

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            problem = problems.load_problem(body.problem)
        except (SchemaError, InvalidCone, UnknownInstance) as exc:
            raise HTTPException(400, str(exc)) from exc
        session = Session(body.problem, problem)
        with lock:
            sessions[session.id] = session
        return {"session_id": session.id}

    @app.get("/curve")
    def get_curve(delta: float, count: int = 200):
        try:
            curve = analytics.error_curve(delta, count)
        except DomainError as exc:
            raise HTTPException(400, str(exc)) from exc
        return {
            "delta": delta,
            "r_validity": curve.r_validity,
            "samples": curve.samples.tolist(),
        }

    @app.post("/sessions/{session_id}/approximate")
    def approximate(session_id: str, body: ApproximateBody):
        session = get_session(session_id)
        try:
            roi = RoiSpec(np.asarray(body.center, dtype=np.float64), body.radius)
            cfg = engine.EngineConfig(delta=body.delta, roi=roi, seed=body.seed)
        except (DomainError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        with lock:
            if session.active:
                raise HTTPException(409, "an approximation is already running")
            session.active = True
            index = len(session.history)
            session.history.append({"index": index, "status": "running"})

        def work():
            try:
                solution = app.state.runner(session.problem, cfg)
                summary = _run_summary(index, body, solution)
            except HomroiError as exc:
                summary = {"index": index, "status": "error", "error": str(exc)}
                session.last_error = str(exc)
            with lock:
                session.history[index] = summary
                session.active = False
                session.updated = time.time()

        thread = threading.Thread(target=work, daemon=True)
        thread.start()
        if body.wait:
            thread.join()
            with lock:
                return session.history[index]
        return {"index": index, "status": "running"}

    @app.get("/sessions/{session_id}/status")
    def status(session_id: str):
        session = get_session(session_id)
        with lock:
            return {
                "active": session.active,
                "runs": len(session.history),
                "updated_unix": session.updated,
                "last_error": session.last_error,
            }

    @app.get("/sessions/{session_id}/result/{index}")
    def result(session_id: str, index: int):
        session = get_session(session_id)
        with lock:
            if not 0 <= index < len(session.history):
                raise HTTPException(404, "no such run")
            return session.history[index]

    @app.get("/sessions/{session_id}/history")
    def history(session_id: str):
        session = get_session(session_id)
        with lock:
            return {"entries": list(session.history)}

    @app.post("/sessions/{session_id}/refine")
    def refine(session_id: str, body: RefineBody):
        session = get_session(session_id)
        direction = None if body.direction is None else np.asarray(body.direction)
        try:
            report, image = scalarize.pascoletti_serafini(
                session.problem, np.asarray(body.point, dtype=np.float64),
                direction,
            )
        except NonSolidCone as exc:
            raise HTTPException(422, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        with lock:
            session.updated = time.time()
        return {
            "image": np.asarray(image).tolist(),
            "x": np.asarray(report.x).tolist(),
            "t": report.value,
            "status": report.status,
        }

    return app
