"""Wire API over the session engine.

Stateless request handling over a stateful in-memory store; event-log files
are the durable form.  When the store has a log directory, every committed
record is appended to ``{session_id}.jsonl`` as it happens, and an unknown
session id is recovered from its file by replay before raising 404, so a
process restart loses nothing.

The session id doubles as the access token: ids are unguessable and every
endpoint requires one.  Errors: 404 unknown session, 409 for submissions out
of order or after completion, 422 for anything malformed.
"""

from __future__ import annotations

import threading
from dataclasses import asdict
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from . import __version__
from .content import default_bank
from .questions import QuestionBank
from .serialize import LOG_SCHEMA, append_jsonl, read_jsonl
from .session import (
    CompletedError,
    OutOfOrderError,
    ReplayError,
    Session,
    SessionConfig,
    SessionError,
    replay,
)

VERSION_HEADER = "X-Menulab-Version"
SCHEMA_HEADER = "X-Menulab-Schema"


class SessionStore:
    """Holds live sessions; optionally persists event logs to a directory."""

    def __init__(self, bank: QuestionBank | None = None,
                 log_dir: str | Path | None = None):
        self.bank = bank if bank is not None else default_bank()
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._persisted: dict[str, int] = {}
        self._lock = threading.Lock()

    def create(self, treatment: str, seed: int = 0,
               config: SessionConfig | None = None) -> Session:
        session = Session(treatment, config, seed, bank=self.bank)
        with self._lock:
            self._sessions[session.id] = session
        self.flush(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        session = self._restore(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def _restore(self, session_id: str) -> Session | None:
        if not self.log_dir:
            return None
        path = self.log_dir / f"{session_id}.jsonl"
        if not path.exists():
            return None
        session = replay(read_jsonl(path), bank=self.bank)
        with self._lock:
            existing = self._sessions.setdefault(session_id, session)
            if existing is session:
                self._persisted[session_id] = session.next_seq
            return existing

    def flush(self, session: Session) -> None:
        """Append any not-yet-persisted records to the session's log file."""
        if not self.log_dir:
            return
        with self._lock:
            done = self._persisted.get(session.id, 0)
            records = session.serialized_log()[done:]
            path = self.log_dir / f"{session.id}.jsonl"
            for record in records:
                append_jsonl(path, record)
            self._persisted[session.id] = done + len(records)


def _screen_body(session: Session) -> dict:
    spec = session.current_screen()
    return {
        "session": session.id,
        "treatment": session.treatment,
        "status": session.status,
        "next_seq": session.next_seq,
        "screen": {"id": spec.id, "kind": spec.kind, "payload": spec.payload},
    }


def _score_body(session: Session) -> dict:
    report = session.score_report()
    body = asdict(report)
    body.update(
        session=session.id,
        tr=report.tr, abstract=report.abstract, practical=report.practical,
        spu=report.spu, round_earnings=session.cumulative_earnings)
    return body


def create_app(bank: QuestionBank | None = None,
               log_dir: str | Path | None = None,
               store: SessionStore | None = None) -> FastAPI:
    store = store or SessionStore(bank=bank, log_dir=log_dir)
    app = FastAPI(title="menulab", version=__version__)
    app.state.store = store

    @app.middleware("http")
    async def stamp_version(request, call_next):
        response = await call_next(request)
        response.headers[VERSION_HEADER] = __version__
        response.headers[SCHEMA_HEADER] = str(LOG_SCHEMA)
        return response

    def _get(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}")
        except ReplayError as exc:
            raise HTTPException(404, f"unreadable session log: {exc}")

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        treatment = body.get("treatment")
        seed = body.get("seed", 0)
        if not isinstance(seed, int):
            raise HTTPException(422, "seed must be an integer")
        try:
            config = SessionConfig.from_dict(body.get("config") or {})
            session = store.create(treatment, seed, config)
        except (ValueError, TypeError) as exc:
            raise HTTPException(422, str(exc))
        return _screen_body(session)

    @app.get("/sessions/{session_id}/screen")
    def get_screen(session_id: str):
        return _screen_body(_get(session_id))

    @app.post("/sessions/{session_id}/response")
    def post_response(session_id: str, body: dict = Body(...)):
        session = _get(session_id)
        response = body.get("response")
        seq = body.get("seq")
        if not isinstance(response, dict):
            raise HTTPException(422, "body must carry a 'response' object")
        if seq is not None and not isinstance(seq, int):
            raise HTTPException(422, "seq must be an integer")
        try:
            feedback = session.submit_response(response, client_seq=seq)
        except (OutOfOrderError, CompletedError) as exc:
            raise HTTPException(409, str(exc))
        except (SessionError, ValueError, KeyError) as exc:
            raise HTTPException(422, str(exc))
        store.flush(session)
        result = _screen_body(session)
        result["feedback"] = feedback.to_dict()
        return result

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str):
        session = _get(session_id)
        return {"session": session.id, "schema": LOG_SCHEMA,
                "records": session.serialized_log()}

    @app.get("/sessions/{session_id}/score")
    def get_score(session_id: str):
        return _score_body(_get(session_id))

    return app
