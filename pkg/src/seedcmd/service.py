"""HTTP service exposing grounding, environment state and learner sessions.

Each session owns one environment instance plus at most one live learner
dialogue.  Seed-command stores are shared per application, so a template
learned in one session immediately benefits every session of that app.
All responses carry a ``schema_version`` field.
"""

from __future__ import annotations

import os
import time
import uuid
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .engine import GroundingEngine
from .environments import WorldError, environment_for_app
from .learning import (
    AscLearner,
    AscStore,
    IndexOutOfRangeError,
    InvalidStateError,
    TERMINAL_STATES,
)
from .marking import load_spec
from .specfile import data_path

SCHEMA_VERSION = 1
SESSION_IDLE_SECONDS = 30 * 60

BUNDLED_APPS = ("blocksworld", "webpage")


class CreateSessionRequest(BaseModel):
    spec: str
    backend: str = "vsm"


class GroundRequest(BaseModel):
    command: str
    execute: bool = False


class LearnerStartRequest(BaseModel):
    command: str


class LearnerVerifyRequest(BaseModel):
    answer: str = Field(pattern="^(yes|no|silence)$")


class LearnerChooseRequest(BaseModel):
    index: Optional[int] = None
    reject: bool = False
    rephrased: Optional[str] = None


class LearnerConfirmRequest(BaseModel):
    confirmed: bool


class Session:
    def __init__(self, app_name: str, engine: GroundingEngine, store: AscStore, env):
        self.session_id = uuid.uuid4().hex
        self.app_name = app_name
        self.engine = engine
        self.store = store
        self.env = env
        self.state_version = 0
        self.last_access = time.monotonic()
        self.learner_session = None
        self.learner = AscLearner(engine, store, env)


def create_app(specs_dir: Optional[str] = None, sidecar_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="seedcmd", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    spec_paths = {name: data_path(f"{name}.yaml") for name in BUNDLED_APPS}
    if specs_dir:
        for fname in sorted(os.listdir(specs_dir)):
            if fname.endswith((".yaml", ".yml")):
                spec_paths[os.path.splitext(fname)[0]] = os.path.join(specs_dir, fname)

    stores: dict[str, AscStore] = {}
    sessions: dict[str, Session] = {}

    def get_store(name: str) -> AscStore:
        if name not in stores:
            sidecar = None
            if sidecar_dir:
                sidecar = os.path.join(sidecar_dir, f"{name}.learned.yaml")
            stores[name] = AscStore(load_spec(spec_paths[name]), sidecar_path=sidecar)
        return stores[name]

    def get_session(session_id: str) -> Session:
        now = time.monotonic()
        for sid in list(sessions):
            if now - sessions[sid].last_access > SESSION_IDLE_SECONDS:
                del sessions[sid]
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        session.last_access = now
        return session

    def respond(**payload) -> dict:
        payload["schema_version"] = SCHEMA_VERSION
        return payload

    def learner_view(session: Session) -> dict:
        ls = session.learner_session
        return ls.to_dict() if ls else None

    @app.get("/specs")
    def list_specs():
        return respond(specs=sorted(spec_paths))

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        if req.spec not in spec_paths:
            raise HTTPException(status_code=404, detail=f"unknown spec {req.spec!r}")
        store = get_store(req.spec)
        try:
            engine = GroundingEngine(store.spec, backend=req.backend)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if req.spec in BUNDLED_APPS:
            env = environment_for_app(req.spec)
        else:
            raise HTTPException(
                status_code=400, detail=f"no environment available for {req.spec!r}"
            )
        session = Session(req.spec, engine, store, env)
        sessions[session.session_id] = session
        return respond(
            session_id=session.session_id,
            app_name=session.app_name,
            backend=req.backend,
            state_version=session.state_version,
        )

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = get_session(session_id)
        return respond(state=session.env.snapshot(), state_version=session.state_version)

    @app.post("/sessions/{session_id}/ground")
    def ground_command(session_id: str, req: GroundRequest):
        session = get_session(session_id)
        session.engine.reload(session.store.spec)
        result = session.engine.ground(req.command, session.env)
        payload = {"result": result.to_dict()}
        if req.execute and not result.empty:
            call = result.action_call
            try:
                session.env.execute_action(call["api"], call["arguments"])
                session.state_version += 1
                payload["executed"] = True
            except WorldError as exc:
                payload["executed"] = False
                payload["execution_error"] = str(exc)
            payload["state"] = session.env.snapshot()
        payload["state_version"] = session.state_version
        return respond(**payload)

    @app.post("/sessions/{session_id}/learner/start")
    def learner_start(session_id: str, req: LearnerStartRequest):
        session = get_session(session_id)
        session.engine.reload(session.store.spec)
        result = session.engine.ground(req.command, session.env)
        session.learner_session = session.learner.start_session(req.command, result)
        return respond(session=learner_view(session))

    def _require_learner(session: Session):
        if session.learner_session is None:
            raise HTTPException(status_code=409, detail="no active learner session")
        return session.learner_session

    @app.post("/sessions/{session_id}/learner/verify")
    def learner_verify(session_id: str, req: LearnerVerifyRequest):
        session = get_session(session_id)
        ls = _require_learner(session)
        try:
            session.learner_session = session.learner.answer_verification(ls, req.answer)
        except InvalidStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return respond(session=learner_view(session))

    @app.get("/sessions/{session_id}/learner/options")
    def learner_options(session_id: str):
        session = get_session(session_id)
        ls = _require_learner(session)
        return respond(
            options=[o.to_dict() for o in ls.options],
            state=ls.state,
            attempt=ls.attempt,
        )

    @app.post("/sessions/{session_id}/learner/choose")
    def learner_choose(session_id: str, req: LearnerChooseRequest):
        session = get_session(session_id)
        ls = _require_learner(session)
        try:
            if req.reject:
                session.learner_session = session.learner.choose_option(
                    ls, "reject", rephrased=req.rephrased
                )
            else:
                if req.index is None:
                    raise HTTPException(status_code=400, detail="index required")
                session.learner_session = session.learner.choose_option(ls, req.index)
        except InvalidStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except IndexOutOfRangeError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return respond(session=learner_view(session))

    @app.post("/sessions/{session_id}/learner/confirm")
    def learner_confirm(session_id: str, req: LearnerConfirmRequest):
        session = get_session(session_id)
        ls = _require_learner(session)
        try:
            session.learner_session = session.learner.confirm_arguments(ls, req.confirmed)
        except InvalidStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        view = learner_view(session)
        if session.learner_session.state in TERMINAL_STATES:
            session.learner_session = None
        return respond(session=view)

    return app
