"""In-memory session store with optional append-only persistence.

A session is (scenario text, ordered override list).  Reports are always
recomputed from those inputs, never persisted, so a restart replays the
log and an engine upgrade transparently re-evaluates every session.
Requests on one session serialize on the session lock; distinct sessions
proceed concurrently.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from riskbn.riskmodel.types import Scenario
from riskbn.scenario.format import parse_scenario
from riskbn.scenario.overrides import apply_override


@dataclass
class Session:
    id: str
    scenario_text: str
    overrides: list[tuple[str, object]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def effective_scenario(self) -> Scenario:
        scenario = parse_scenario(self.scenario_text)
        for path, value in self.overrides:
            scenario = apply_override(scenario, path, value)
        return scenario


class SessionStore:
    def __init__(self, persist_path: Path | None = None):
        self._sessions: dict[str, Session] = {}
        self._by_key: dict[str, str] = {}  # idempotency key -> session id
        self._lock = threading.Lock()
        self._persist_path = Path(persist_path) if persist_path else None
        if self._persist_path and self._persist_path.exists():
            self._replay()

    def create(self, scenario_text: str, idempotency_key: str | None = None) -> Session:
        with self._lock:
            if idempotency_key and idempotency_key in self._by_key:
                return self._sessions[self._by_key[idempotency_key]]
            session_id = secrets.token_hex(16)
            session = Session(id=session_id, scenario_text=scenario_text)
            self._sessions[session_id] = session
            if idempotency_key:
                self._by_key[idempotency_key] = session_id
        self._append({"event": "create", "id": session_id, "scenario": scenario_text})
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def add_override(self, session: Session, path: str, value) -> None:
        session.overrides.append((path, value))
        self._append(
            {"event": "override", "id": session.id, "path": path, "value": value}
        )

    def _append(self, record: dict) -> None:
        if not self._persist_path:
            return
        with self._lock:
            with self._persist_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _replay(self) -> None:
        for line in self._persist_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            if record["event"] == "create":
                self._sessions[record["id"]] = Session(
                    id=record["id"], scenario_text=record["scenario"]
                )
            elif record["event"] == "override":
                session = self._sessions.get(record["id"])
                if session is not None:
                    session.overrides.append((record["path"], record["value"]))
