"""Session-oriented HTTP service driving the fairing engine.

Each session wraps one model: an immutable original, the current geometry,
per-point weights and an append-only metrics trace.  Mutations on a session
are serialized by a per-session lock; a long run polls a cancel flag so
``POST .../reset`` can interrupt it.  All errors use the payload
``{"code", "message", "detail"}``.
"""

from __future__ import annotations

import math
import threading
import uuid
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .autoselect import rank_control_points
from .engine import DEFAULT_ITER_TOLERANCE, DEFAULT_MAX_ITERATIONS, FairingIteration, weight_upper_bound
from .errors import FairPiaError, InvalidWeightError, ModelFormatError
from .gram import FunctionalKind, gram_for
from .metrics import MetricsRecord
from .modelio import LoadedModel, model_document, parse_model_document, parse_range_spec
from .splines import BSplineCurve, BSplineSurface, curvature_comb, surface_curvature_grid


class ApiError(FairPiaError):
    def __init__(self, status: int, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.detail = detail


def _error_response(status: int, code: str, message: str, detail: Any = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


@dataclass
class Session:
    """Server-side fairing state for one model."""

    id: str
    original: LoadedModel
    current: BSplineCurve | BSplineSurface
    weights: np.ndarray | None
    kind: FunctionalKind | None = None
    status: str = "idle"   # idle | running | converged | iteration-capped
    trace: list[MetricsRecord] = field(default_factory=list)
    driver: FairingIteration | None = None
    active_set: list[int] | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    cancel: threading.Event = field(default_factory=threading.Event)

    @property
    def n_points(self) -> int:
        return self.original.n_points

    def flat_current(self) -> np.ndarray:
        if isinstance(self.current, BSplineSurface):
            return self.current.flat_points()
        return self.current.control_points

    def invalidate_driver(self) -> None:
        self.driver = None

    def ensure_driver(self, kind: FunctionalKind, active_set: list[int] | None) -> FairingIteration:
        if self.weights is None:
            raise ApiError(409, "weights-not-set", "set per-point weights before fairing")
        if (
            self.driver is None
            or self.kind != kind
            or (self.driver.active_set or None) != (sorted(active_set) if active_set else None)
        ):
            k = self.trace[-1].k if self.trace else 0
            self.driver = FairingIteration(
                self.original.geometry,
                kind,
                self.weights,
                active_set=active_set,
                weight_policy="clamp",
                start_points=self.flat_current(),
                start_k=k,
            )
            self.kind = kind
            self.active_set = sorted(active_set) if active_set else None
            if k == 0 and not self.trace:
                self.trace.extend(self.driver.state.trace)  # baseline k=0 row
        return self.driver

    def sync_from_driver(self) -> None:
        if self.driver is None:
            return
        self.current = self.driver.current_geometry()
        known = {rec.k for rec in self.trace}
        for rec in self.driver.state.trace:
            if rec.k not in known:
                self.trace.append(rec)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, model: LoadedModel) -> Session:
        sid = uuid.uuid4().hex
        session = Session(
            id=sid,
            original=model,
            current=model.geometry,
            weights=model.weights.copy() if model.weights is not None else None,
        )
        with self._lock:
            self._sessions[sid] = session
        return session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise ApiError(404, "unknown-session", f"no session {sid!r}")
        return session


# ---------------------------------------------------------------------------
# request bodies


class CreateSessionBody(BaseModel):
    model: dict


class WeightsBody(BaseModel):
    weights: list[float] | None = None
    rangeSpec: str | None = None


class FairBody(BaseModel):
    mode: str = "run"
    kind: str | None = None
    maxIter: int | None = None
    tol: float | None = None
    activeSet: list[int] | None = None


class AutoSelectBody(BaseModel):
    m: int
    kind: str | None = None


# ---------------------------------------------------------------------------


def _num(x: float):
    return None if (isinstance(x, float) and math.isnan(x)) else float(x)


def _trace_json(trace: list[MetricsRecord]) -> list[dict]:
    return [
        {"k": r.k, "eDev": _num(r.e_dev), "eIter": _num(r.e_iter),
         "eAbs": _num(r.e_abs), "eRel": _num(r.e_rel)}
        for r in trace
    ]


def _resolve_kind(session: Session, text: str | None) -> FunctionalKind:
    if text:
        try:
            kind = FunctionalKind.parse(text)
        except ValueError as exc:
            raise ApiError(400, "bad-kind", str(exc)) from None
    elif session.kind is not None:
        kind = session.kind
    elif session.original.kind == "surface":
        p, q = session.original.geometry.degrees
        kind = FunctionalKind.SURFACE_SECOND if (p >= 2 and q >= 2) else FunctionalKind.SURFACE_FIRST
    else:
        kind = FunctionalKind.CURVE_R2
    if kind.is_surface != (session.original.kind == "surface"):
        raise ApiError(400, "bad-kind", f"functional {kind.value} does not apply to a {session.original.kind}")
    return kind


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="fairpia session service", version="1")
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, str(exc), exc.detail)

    @app.exception_handler(FairPiaError)
    async def _domain_error(_req: Request, exc: FairPiaError):
        code = {
            InvalidWeightError: "invalid-weight",
            ModelFormatError: "model-format",
        }.get(type(exc), "domain-error")
        return _error_response(400, code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return _error_response(422, "validation-error", "request body failed validation", exc.errors())

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            model = parse_model_document(body.model)
        except ModelFormatError as exc:
            raise ApiError(400, "model-format", str(exc)) from None
        session = store.create(model)
        return {"sessionId": session.id, "kind": model.kind, "nPoints": model.n_points}

    @app.get("/sessions/{sid}/model")
    def get_model(sid: str):
        session = store.get(sid)
        with session.lock:
            doc = model_document(session.current, weights=session.weights,
                                 metadata=session.original.metadata)
            bounds = weight_upper_bound(gram_for(session.current, _resolve_kind(session, None)))
            return {
                "model": doc,
                "status": session.status,
                "weightBounds": [float(b) for b in bounds],
                "activeSet": session.active_set,
            }

    @app.put("/sessions/{sid}/weights")
    def put_weights(sid: str, body: WeightsBody):
        session = store.get(sid)
        with session.lock:
            n = session.n_points
            if (body.weights is None) == (body.rangeSpec is None):
                raise ApiError(400, "bad-weights", "provide exactly one of 'weights' or 'rangeSpec'")
            if body.weights is not None:
                arr = np.asarray(body.weights, dtype=float)
                if arr.shape != (n,):
                    raise ApiError(400, "bad-weights", f"expected {n} weights, got {arr.size}")
            else:
                try:
                    arr = parse_range_spec(body.rangeSpec, n, session.weights)
                except ValueError as exc:
                    raise ApiError(400, "bad-weights", str(exc)) from None
            if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
                raise ApiError(400, "invalid-weight", "weights must lie strictly in (0, 1)")
            session.weights = arr
            if session.driver is not None:
                session.driver.set_weights(arr)  # rebuilds the system lazily
            return {"weights": arr.tolist()}

    @app.post("/sessions/{sid}/fair")
    def post_fair(sid: str, body: FairBody):
        session = store.get(sid)
        if body.mode not in ("run", "step"):
            raise ApiError(400, "bad-mode", f"mode must be 'run' or 'step', got {body.mode!r}")
        with session.lock:
            kind = _resolve_kind(session, body.kind)
            active = None
            if body.activeSet is not None:
                n = session.n_points
                if any(not (0 <= i < n) for i in body.activeSet):
                    raise ApiError(400, "bad-active-set", f"indices must lie in [0, {n})")
                active = list(body.activeSet)
            driver = session.ensure_driver(kind, active)
            session.status = "running"
            session.cancel.clear()
            try:
                if body.mode == "step":
                    rec, fixed_point = driver.step()
                    stop_reason = "converged" if fixed_point else None
                    session.status = "idle" if stop_reason is None else "converged"
                else:
                    run = driver.run(
                        body.maxIter if body.maxIter is not None else DEFAULT_MAX_ITERATIONS,
                        body.tol if body.tol is not None else DEFAULT_ITER_TOLERANCE,
                        cancel_check=session.cancel.is_set,
                    )
                    stop_reason = run.stop_reason
                    session.status = {
                        "converged": "converged",
                        "iteration-capped": "iteration-capped",
                        "cancelled": "idle",
                    }[run.stop_reason]
            finally:
                session.sync_from_driver()
            return {
                "sessionId": sid,
                "status": session.status,
                "iterations": session.trace[-1].k if session.trace else 0,
                "stopReason": stop_reason,
                "warnings": driver.warnings,
            }

    @app.post("/sessions/{sid}/autoselect")
    def post_autoselect(sid: str, body: AutoSelectBody):
        session = store.get(sid)
        with session.lock:
            kind = _resolve_kind(session, body.kind)
            if not (1 <= body.m <= session.n_points):
                raise ApiError(400, "bad-selection", f"m must lie in [1, {session.n_points}]")
            ranking = rank_control_points(session.current, kind)
            return {
                "ranking": [
                    {"index": rp.index, "z": rp.impact, "rank": rp.rank, "excluded": rp.excluded}
                    for rp in ranking[: body.m]
                ],
                "m": body.m,
            }

    @app.get("/sessions/{sid}/trace")
    def get_trace(sid: str):
        session = store.get(sid)
        with session.lock:
            return {"status": session.status, "trace": _trace_json(session.trace)}

    @app.get("/sessions/{sid}/comb")
    def get_comb(sid: str, samples: int = 256, scale: float | None = None):
        session = store.get(sid)
        with session.lock:
            if not isinstance(session.current, BSplineCurve):
                raise ApiError(400, "not-a-curve", "curvature comb applies to curve sessions")
            if samples < 2:
                raise ApiError(400, "bad-samples", "samples must be at least 2")
            comb = curvature_comb(session.current, samples, scale)
            return {
                "parameters": comb.parameters.tolist(),
                "points": comb.points.tolist(),
                "tips": comb.tips.tolist(),
                "kappa": comb.kappa.tolist(),
                "degenerate": comb.degenerate.tolist(),
                "scale": comb.scale,
            }

    @app.get("/sessions/{sid}/curvature-grid")
    def get_curvature_grid(sid: str, nu: int = 32, nv: int = 32):
        session = store.get(sid)
        with session.lock:
            if not isinstance(session.current, BSplineSurface):
                raise ApiError(400, "not-a-surface", "curvature grid applies to surface sessions")
            if nu < 2 or nv < 2:
                raise ApiError(400, "bad-grid", "nu and nv must be at least 2")
            grid = surface_curvature_grid(session.current, nu, nv)
            values = [[_num(v) for v in row] for row in grid.values]
            return {
                "nu": nu,
                "nv": nv,
                "us": grid.us.tolist(),
                "vs": grid.vs.tolist(),
                "values": values,
                "undefined": grid.undefined.tolist(),
                "positions": grid.positions.tolist(),
                "normals": grid.normals.tolist(),
            }

    @app.post("/sessions/{sid}/reset")
    def post_reset(sid: str):
        session = store.get(sid)
        session.cancel.set()  # interrupts an in-flight run before taking the lock
        with session.lock:
            session.current = session.original.geometry
            session.weights = (
                session.original.weights.copy() if session.original.weights is not None else None
            )
            session.trace = []
            session.driver = None
            session.kind = None
            session.active_set = None
            session.status = "idle"
            session.cancel.clear()
            return {"sessionId": sid, "status": session.status}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="studio")

    return app
