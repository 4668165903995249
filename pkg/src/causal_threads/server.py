"""HTTP service over a loaded model: episodes, threads, narratives,
exports, and per-user sessions.

The model is parsed once at startup and is immutable for the process
lifetime; per-episode simulation results are precomputed. Sessions are the
only mutable state, guarded by a single lock and optionally persisted to an
append-only log so a restart can rebuild them.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import format as model_format
from .engine import DEFAULT_QUIESCENCE_WINDOW, Trace, detect_equilibrium, run
from .export import (
    HighlightSpec,
    export_graph,
    export_timeline,
    highlight_for_episode,
    serialize_timeline,
)
from .model import SystemModel, lookup, validate_model
from .narrative import Session, personalize, record_view, render_overview, render_steps
from .threads import (
    CausalThread,
    check_episode,
    classify_links,
    detect_feedback_loops,
    trace_thread,
)

DEFAULT_MAX_STEPS = 60


@dataclass
class ServerConfig:
    model_path: str
    bind_address: str = "127.0.0.1"
    port: int = 8000
    default_detail_level: int = 0
    quiescence_window: int = DEFAULT_QUIESCENCE_WINDOW
    max_steps: int = DEFAULT_MAX_STEPS
    session_log: Optional[str] = None

    @classmethod
    def from_env(cls, model_path: Optional[str] = None, **kwargs: Any) -> "ServerConfig":
        path = model_path or os.environ.get("CT_MODEL")
        if not path:
            raise ValueError("no model path given and CT_MODEL is unset")
        return cls(model_path=path, **kwargs)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str,
                 element_id: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.element_id = element_id

    def payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.element_id is not None:
            out["elementId"] = self.element_id
        return out


class SessionStore:
    """In-memory sessions with an optional append-only persistence log."""

    def __init__(self, model: SystemModel, log_path: Optional[str] = None):
        self._model = model
        self._log_path = log_path
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        if log_path and os.path.exists(log_path):
            self._replay_log(log_path)

    def _replay_log(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                sid = record["sessionId"]
                session = self._sessions.get(sid, Session(session_id=sid))
                self._sessions[sid] = record_view(
                    session, record.get("propositionIds", []), self._model)

    def _append_log(self, session_id: str, ids: list[str]) -> None:
        if not self._log_path:
            return
        record = {"sessionId": session_id, "timestamp": time.time(),
                  "propositionIds": ids}
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    def create(self) -> Session:
        with self._lock:
            session = Session(session_id=uuid.uuid4().hex)
            self._sessions[session.session_id] = session
            self._append_log(session.session_id, [])
            return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}",
                           session_id)
        return session

    def record(self, session_id: str, ids: list[str]) -> Session:
        with self._lock:
            session = self.get(session_id)
            try:
                session = record_view(session, ids, self._model)
            except KeyError as exc:
                raise ApiError(422, "unknown_proposition", str(exc)) from exc
            self._sessions[session_id] = session
            self._append_log(session_id, ids)
            return session


def _event_payload(e: Any) -> dict[str, Any]:
    return {"step": e.step, "dimension": e.dimension, "fromState": e.from_state,
            "toState": e.to_state, "causeKind": e.cause_kind, "causeId": e.cause_id}


def _thread_payload(thread: CausalThread) -> dict[str, Any]:
    return {
        "rootCause": thread.root_cause,
        "orderedDimensionPath": list(thread.ordered_dimension_path),
        "events": [_event_payload(e) for e in thread.events],
        "links": [
            {
                "from": _event_payload(l.from_event),
                "to": _event_payload(l.to_event),
                "viaTransition": l.via_transition,
                "classification": l.classification,
                "loopClosure": l.loop_closure,
            }
            for l in thread.links
        ],
    }


def _highlight_payload(h: HighlightSpec) -> dict[str, Any]:
    return {
        "equilibriumTransitionIds": list(h.equilibrium_transition_ids),
        "causalLinkEdges": [list(edge) for edge in h.causal_link_edges],
        "grayedStateIds": list(h.grayed_state_ids),
        "highlightedTransitionIds": list(h.highlighted_transition_ids),
    }


def _model_payload(model: SystemModel) -> dict[str, Any]:
    return {
        "name": model.name,
        "regions": [{"id": r.id, "label": r.label} for r in model.regions],
        "entities": [{"id": e.id, "label": e.label, "region": e.region}
                     for e in model.entities],
        "dimensions": [
            {
                "id": d.id, "entity": d.entity, "kind": d.kind.value,
                "states": [{"id": s.id, "label": s.label} for s in d.states],
                "initial": d.initial_state(), "systemLevel": d.system_level,
                "detailLevel": d.detail_level, "note": d.note,
            }
            for d in model.dimensions
        ],
        "transitions": [
            {
                "id": t.id, "subject": t.subject, "verb": t.verb,
                "roles": dict(t.roles),
                "when": [
                    {"dimension": c.dimension, "test": c.test.value, "state": c.state}
                    for c in t.when
                ],
                "effects": [{"dimension": e.dimension, "state": e.state}
                            for e in t.effects],
                "detailLevel": t.detail_level, "note": t.note,
            }
            for t in model.transitions
        ],
        "disruptions": [
            {
                "id": d.id, "atStep": d.at_step, "label": d.label,
                "effects": [{"dimension": e.dimension, "state": e.state}
                            for e in d.effects],
            }
            for d in model.disruptions
        ],
        "episodes": [
            {
                "id": e.id, "label": e.label, "overview": e.overview,
                "equilibriumTransitions": list(e.equilibrium_transitions),
                "causalDisruption": e.causal_disruption,
                "expectedThreadDimensions": list(e.expected_thread_dimensions),
            }
            for e in model.episodes
        ],
        "layout": {eid: {"x": x, "y": y} for eid, (x, y) in model.layout},
    }


@dataclass
class _EpisodeData:
    thread: CausalThread
    highlight: HighlightSpec
    loops: list
    report: Any


def _precompute(model: SystemModel, config: ServerConfig) -> tuple[Trace, list, dict[str, _EpisodeData]]:
    trace = run(model, model.disruptions, config.max_steps, config.quiescence_window)
    intervals = detect_equilibrium(trace, config.quiescence_window)
    data: dict[str, _EpisodeData] = {}
    for episode in model.episodes:
        thread = classify_links(
            trace_thread(trace, model, episode.causal_disruption), intervals)
        data[episode.id] = _EpisodeData(
            thread=thread,
            highlight=highlight_for_episode(model, episode, thread),
            loops=detect_feedback_loops(thread, model),
            report=check_episode(model, episode, trace, config.quiescence_window),
        )
    return trace, intervals, data


def create_app(config: ServerConfig) -> FastAPI:
    model, _doc = model_format.parse_file(config.model_path)
    report = validate_model(model)
    if not report.ok():
        details = "; ".join(f"{d.element_id}: {d.message}" for d in report.errors)
        raise ValueError(f"model failed validation: {details}")

    trace, _intervals, episode_data = _precompute(model, config)
    sessions = SessionStore(model, config.session_log)
    app = FastAPI(title="causal-threads", version="0.1.0")
    # The explorer client is typically served from a separate static origin.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.payload())

    def episode_or_404(episode_id: str):
        episode = model.episode_map().get(episode_id)
        if episode is None:
            raise ApiError(404, "unknown_episode", f"no episode {episode_id!r}",
                           episode_id)
        return episode

    @app.get("/model")
    def get_model() -> dict[str, Any]:
        return _model_payload(model)

    @app.get("/episodes")
    def get_episodes() -> list[dict[str, Any]]:
        return [
            {"id": e.id, "label": e.label, "overview": render_overview(model, e)}
            for e in model.episodes
        ]

    @app.get("/episodes/{episode_id}/thread")
    def get_thread(episode_id: str) -> dict[str, Any]:
        episode = episode_or_404(episode_id)
        data = episode_data[episode.id]
        return {
            "thread": _thread_payload(data.thread),
            "highlight": _highlight_payload(data.highlight),
            "feedbackLoops": [
                {
                    "cycle": list(loop.cycle),
                    "polarity": loop.polarity,
                    "terminationCondition": None if loop.termination_condition is None else {
                        "dimension": loop.termination_condition.dimension,
                        "test": loop.termination_condition.test.value,
                        "state": loop.termination_condition.state,
                    },
                }
                for loop in data.loops
            ],
            "report": {
                "equilibriumVerified": data.report.equilibrium_verified,
                "threadPathMatches": data.report.thread_path_matches,
                "diffs": list(data.report.diffs),
            },
        }

    @app.get("/episodes/{episode_id}/narrative")
    def get_narrative(episode_id: str, level: Optional[int] = None,
                      session: Optional[str] = None) -> dict[str, Any]:
        episode = episode_or_404(episode_id)
        detail = config.default_detail_level if level is None else level
        if detail < 0:
            raise ApiError(400, "bad_level", "level must be >= 0")
        thread = episode_data[episode.id].thread
        if session is not None:
            steps = personalize(model, thread, sessions.get(session), detail)
        else:
            steps = render_steps(model, thread, detail)
        return {
            "episodeId": episode.id,
            "overview": render_overview(model, episode),
            "steps": [
                {"ordinal": s.ordinal, "text": s.text,
                 "propositionIds": list(s.proposition_ids),
                 "detailLevel": s.detail_level}
                for s in steps
            ],
        }

    @app.get("/dimensions/{dimension_id}/info")
    def get_dimension_info(dimension_id: str) -> dict[str, Any]:
        dim = model.dimension_map().get(dimension_id)
        if dim is None:
            raise ApiError(404, "unknown_dimension", f"no dimension {dimension_id!r}",
                           dimension_id)
        return {"id": dim.id, "entity": dim.entity, "kind": dim.kind.value,
                "note": dim.note,
                "states": [{"id": s.id, "label": s.label} for s in dim.states]}

    def session_payload(session: Session) -> dict[str, Any]:
        return {"sessionId": session.session_id,
                "viewedPropositions": sorted(session.viewed_propositions),
                "cursor": list(session.cursor) if session.cursor else None}

    @app.post("/sessions", status_code=201)
    def create_session() -> dict[str, Any]:
        return session_payload(sessions.create())

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        return session_payload(sessions.get(session_id))

    @app.post("/sessions/{session_id}/views")
    async def post_views(session_id: str, request: Request) -> dict[str, Any]:
        try:
            body = await request.json()
        except Exception as exc:
            raise ApiError(400, "bad_body", "request body is not valid JSON") from exc
        ids = body.get("propositionIds") if isinstance(body, dict) else None
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise ApiError(400, "bad_body", "body must carry propositionIds: [string]")
        return session_payload(sessions.record(session_id, ids))

    @app.get("/export/graph")
    def get_graph(episode: Optional[str] = None) -> PlainTextResponse:
        highlight = None
        if episode is not None:
            highlight = episode_data[episode_or_404(episode).id].highlight
        return PlainTextResponse(export_graph(model, highlight))

    @app.get("/export/timeline")
    def get_timeline() -> dict[str, Any]:
        records = export_timeline(trace, model.episodes, model)
        return {
            "timeline": [
                {"step": r.step, "dimension": r.dimension, "fromState": r.from_state,
                 "toState": r.to_state, "episodeId": r.episode_id,
                 "threadRoot": r.thread_root}
                for r in records
            ],
            "text": serialize_timeline(records),
        }

    return app
