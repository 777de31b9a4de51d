"""FastAPI application: versioned JSON API under /v1.

Endpoints:
    POST  /v1/sessions                       create a session from scenario text
    GET   /v1/sessions/{id}/report           latest machine-format report
    PATCH /v1/sessions/{id}/overrides        append an override, returns pre/post ORR
    GET   /v1/sessions/{id}/posteriors/{node} binned marginal for charts
    POST  /v1/combine                        combine report JSONs into a hazard table
    GET   /v1/health

Report bytes are produced by the same renderer as the CLI's machine
format, so the two interfaces are byte-identical for equal inputs.
Errors use {"code", "message", "detail"} bodies.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from riskbn.errors import (
    InvalidOverrideError,
    RiskBnError,
    ScenarioError,
    UnknownNodeError,
)
from riskbn.inference import compile_network, posterior
from riskbn.riskmodel.ops import assess_scenario, hazard_table
from riskbn.riskmodel.template import build_evidence, build_template, grid_policy_for
from riskbn.riskmodel.types import HazardRow
from riskbn.scenario.overrides import apply_override
from riskbn.scenario.render import (
    parse_machine_report,
    hazard_table_to_machine_dict,
    render_report,
    report_to_machine_dict,
)
from riskbn.service.store import SessionStore


def _error(status: int, code: str, message: str, detail: object = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(persist_path: Path | None = None) -> FastAPI:
    app = FastAPI(title="riskbn service", version="v1")
    store = SessionStore(persist_path=persist_path)

    @app.exception_handler(RiskBnError)
    async def _on_riskbn_error(request: Request, exc: RiskBnError):
        if isinstance(exc, (InvalidOverrideError, UnknownNodeError)):
            return _error(422, type(exc).__name__, str(exc))
        return _error(400, type(exc).__name__, str(exc))

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request):
        payload = await request.json()
        text = payload.get("scenario")
        if not isinstance(text, str) or not text.strip():
            return _error(400, "SchemaError", "body needs a 'scenario' text field")
        key = payload.get("idempotency_key")
        try:
            session = store.create(text, idempotency_key=key)
            session.effective_scenario()  # validate eagerly
        except ScenarioError as exc:
            return _error(
                400, type(exc).__name__, str(exc), detail={"line": exc.line}
            )
        return {"id": session.id}

    @app.get("/v1/sessions/{session_id}/report")
    def get_report(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        with session.lock:
            report = assess_scenario(session.effective_scenario())
        return Response(
            content=render_report(report, "machine"),
            media_type="application/json",
        )

    @app.patch("/v1/sessions/{session_id}/overrides")
    async def set_override(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        payload = await request.json()
        path = payload.get("path")
        if not isinstance(path, str) or not path:
            return _error(422, "InvalidOverride", "body needs a 'path' field")
        value = payload.get("value")
        with session.lock:
            before = assess_scenario(session.effective_scenario())
            try:
                updated = apply_override(session.effective_scenario(), path, value)
            except (InvalidOverrideError, ScenarioError) as exc:
                return _error(422, type(exc).__name__, str(exc))
            store.add_override(session, path, value)
            after = assess_scenario(updated)
        return {
            "pre": {
                "orr": report_to_machine_dict(before)["orr"],
                "controls_required": report_to_machine_dict(before)[
                    "controls_required"
                ],
            },
            "post": {
                "orr": report_to_machine_dict(after)["orr"],
                "controls_required": report_to_machine_dict(after)[
                    "controls_required"
                ],
            },
            "report": report_to_machine_dict(after),
        }

    @app.get("/v1/sessions/{session_id}/posteriors/{node}")
    def get_posterior(session_id: str, node: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        with session.lock:
            scenario = session.effective_scenario()
            net = build_template(scenario)
            resolved = _resolve_node(net, node)
            if resolved is None:
                return _error(422, "UnknownNode", f"no node {node!r} in this model")
            cnet = compile_network(net, grid_policy_for(scenario))
            summary = posterior(cnet, build_evidence(scenario), resolved)
        if summary.kind == "continuous":
            return {
                "node": resolved,
                "kind": "continuous",
                "edges": [float(e) for e in summary.edges],
                "masses": [float(m) for m in summary.masses],
                "mean": summary.mean,
                "median": summary.median,
            }
        return {
            "node": resolved,
            "kind": summary.kind,
            "states": list(summary.states),
            "probs": [float(p) for p in summary.probs],
        }

    @app.post("/v1/combine")
    async def combine(request: Request):
        payload = await request.json()
        reports = payload.get("reports")
        if not isinstance(reports, list) or len(reports) < 1:
            return _error(400, "SchemaError", "body needs a 'reports' list")
        rows = []
        for i, item in enumerate(reports):
            name = "Hazard %d" % (i + 1)
            if isinstance(item, dict) and "report" in item:
                name = str(item.get("name", name))
                item = item["report"]
            report = parse_machine_report(json.dumps(item))
            rows.append(HazardRow.from_report(name, report))
        table = hazard_table(rows)
        return hazard_table_to_machine_dict(table)

    return app


def _resolve_node(net, node: str) -> str | None:
    if node in net.kinds:
        return node
    lowered = node.lower()
    for name in net.kinds:
        if name.lower() == lowered:
            return name
    return None


app = create_app()
