"""HTTP service over the assessment engine, all JSON under /v1.

Every response is a pure function of the graph, the event log and the
request; reads never write. Outcome posts to one session are serialized
behind a per-session lock so exactly one of two conflicting posts wins.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from typing import Callable, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import dtree, graph as graphmod, infotheory, session as sessionmod, store
from .errors import (
    GraphValidationError,
    PreassessError,
    SessionNotComplete,
    SessionNotFound,
)
from .fmt import recommendation_payload, weight_payload
from .probability import (
    GroupPerformance,
    Outcome,
    PerformanceVector,
    aggregate_scheme_posterior,
    bayes_fail_posterior,
    fail_weight,
    uniform_scheme_joints,
    weight_table_row,
)

__all__ = ["create_app", "serve"]

# HTTP status per error code; anything unlisted is a 400.
_STATUS = {
    "UNKNOWN_NODE": 404,
    "UNKNOWN_LEAF": 404,
    "UNKNOWN_ATTRIBUTE": 404,
    "UNKNOWN_FEATURE": 404,
    "NO_QUIZ_DEFINED": 404,
    "SESSION_NOT_FOUND": 404,
    "SESSION_NOT_COMPLETE": 404,
    "SESSION_COMPLETE": 409,
    "ALREADY_RECORDED_DIFFERENTLY": 409,
    "LEAF_NOT_QUEUED": 409,
    "SEQUENCE_GAP": 409,
    "DUPLICATE_ROW": 409,
    "STORAGE_FAILURE": 500,
    "CORRUPT_LOG": 500,
}


class CreateSessionBody(BaseModel):
    desired: str
    mode: str


class OutcomeBody(BaseModel):
    leaf: str
    outcome: Optional[str] = None
    answers: Optional[list[int]] = None


class FailWeightBody(BaseModel):
    performance: str


class BayesBody(BaseModel):
    scheme: str
    groups: Optional[list[dict]] = None
    counts_csv: Optional[str] = None
    leaf: Optional[str] = None


def _session_json(state: sessionmod.AssessmentSession) -> dict:
    return {
        "id": state.id,
        "desired": state.desired,
        "mode": state.mode.value,
        "status": state.status.value,
        "queue": [{"parent": p, "leaf": l} for p, l in state.queue],
        "outcomes": {leaf: outcome.value for leaf, outcome in state.outcomes.items()},
        "answered": len(state.outcomes),
        "total": len(state.queue),
        "created_at": state.created_at,
        "updated_at": state.updated_at,
    }


def create_app(
    g: graphmod.KnowledgeGraph,
    log: store.EventLog,
    *,
    webui_dir=None,
    clock: Callable[[], str] = sessionmod.utc_now,
    id_factory: Optional[Callable[[], str]] = None,
) -> FastAPI:
    app = FastAPI(title="preassess", docs_url=None, redoc_url=None)

    sessions = log.load_sessions()
    session_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)
    create_lock = threading.Lock()

    @app.exception_handler(PreassessError)
    async def domain_error(_: Request, exc: PreassessError) -> JSONResponse:
        return JSONResponse(
            status_code=_STATUS.get(exc.code, 400),
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    async def body_error(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "VALIDATION_ERROR", "message": str(exc.errors()[:1])},
        )

    def get_session(session_id: str) -> sessionmod.AssessmentSession:
        state = sessions.get(session_id)
        if state is None:
            raise SessionNotFound(f"no session {session_id!r}")
        return state

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/v1/graph")
    def graph_view() -> dict:
        return {
            "parents": [
                {
                    "id": parent,
                    "leaves": list(g.leaves_by_parent[parent]),
                    "prerequisites": graphmod.prerequisites_of(g, parent),
                    "next_higher": graphmod.next_higher(g, parent),
                }
                for parent in g.parents
            ],
            "aliases": dict(g.aliases),
        }

    @app.get("/v1/graph/parents/{parent_id}/leaves")
    def parent_leaves(parent_id: str) -> list[dict]:
        leaves = graphmod.leaves_under(g, parent_id)
        out = []
        for leaf in leaves:
            items = g.quizzes.get(leaf)
            out.append(
                {
                    "id": leaf,
                    "quiz": (
                        [
                            {"prompt": item.prompt, "choices": list(item.choices)}
                            for item in items
                        ]
                        if items
                        else None
                    ),
                }
            )
        return out

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        try:
            mode = sessionmod.Mode(body.mode)
        except ValueError:
            raise GraphValidationError(
                f"mode must be 'prerequisite' or 'direct', got {body.mode!r}"
            ) from None
        with create_lock:
            state = sessionmod.start_session(
                g,
                body.desired,
                mode,
                session_id=id_factory() if id_factory else None,
                at=clock(),
            )
            log.append_created(state)
            sessions[state.id] = state
        return _session_json(state)

    @app.get("/v1/sessions/{session_id}")
    def session_view(session_id: str) -> dict:
        return _session_json(get_session(session_id))

    @app.post("/v1/sessions/{session_id}/outcomes")
    def post_outcome(session_id: str, body: OutcomeBody) -> dict:
        if (body.outcome is None) == (body.answers is None):
            raise GraphValidationError("supply exactly one of 'outcome' or 'answers'")
        with session_locks[session_id]:
            state = get_session(session_id)
            grade = None
            if body.answers is not None:
                grade = sessionmod.grade_quiz(g, body.leaf, body.answers)
                outcome = grade.outcome
            else:
                try:
                    outcome = Outcome(body.outcome)
                except ValueError:
                    raise GraphValidationError(
                        f"outcome must be Pass or Fail, got {body.outcome!r}"
                    ) from None
            at = clock()
            advanced = sessionmod.record_outcome(state, body.leaf, outcome, at=at)
            rec_json = None
            if advanced.status is sessionmod.SessionStatus.COMPLETE:
                rec_json = recommendation_payload(sessionmod.finalize(g, advanced))
            if advanced is not state:
                log.append_outcome(state, body.leaf, outcome, at)
                sessions[session_id] = advanced
                if rec_json is not None:
                    log.append_finalized(advanced, {"recommendation": rec_json}, at)
            state = advanced
        response: dict = {"session": _session_json(state)}
        if grade is not None:
            response["grade"] = {
                "leaf": grade.leaf,
                "outcome": grade.outcome.value,
                "correct": list(grade.correct),
            }
        if rec_json is not None:
            response["recommendation"] = rec_json
        return response

    @app.get("/v1/sessions/{session_id}/recommendation")
    def recommendation_view(session_id: str) -> dict:
        state = get_session(session_id)
        if state.status is not sessionmod.SessionStatus.COMPLETE:
            raise SessionNotComplete(f"session {session_id} is still active")
        return recommendation_payload(sessionmod.finalize(g, state))

    @app.post("/v1/analytics/fail-weight")
    def analytics_fail_weight(body: FailWeightBody) -> dict:
        try:
            perf = PerformanceVector.from_string(body.performance)
        except ValueError as exc:
            raise GraphValidationError(str(exc)) from None
        return {"performance": body.performance, "weight": weight_payload(fail_weight(perf))}

    @app.post("/v1/analytics/bayes")
    def analytics_bayes(body: BayesBody) -> dict:
        if body.scheme == "uniform":
            if not body.groups:
                raise GraphValidationError("uniform scheme needs 'groups'")
            try:
                gp = GroupPerformance(
                    tuple(
                        (
                            entry["parent"],
                            PerformanceVector.from_string(entry["performance"]),
                        )
                        for entry in body.groups
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise GraphValidationError(f"bad group entry: {exc}") from None
            table = bayes_fail_posterior(uniform_scheme_joints(gp))
            return {
                "scheme": "uniform",
                "posteriors": [
                    {"target": target, "weight": weight_payload(weight)}
                    for target, weight in table.entries
                ],
            }
        if body.scheme in ("paper", "consistent"):
            if body.counts_csv is None or body.leaf is None:
                raise GraphValidationError(
                    f"{body.scheme} scheme needs 'counts_csv' and 'leaf'"
                )
            counts = store.parse_counts_csv(body.counts_csv)
            posterior = aggregate_scheme_posterior(counts, body.leaf, scheme=body.scheme)
            return {
                "scheme": body.scheme,
                "leaf": body.leaf,
                "posterior": weight_payload(posterior),
            }
        raise GraphValidationError(f"unknown scheme {body.scheme!r}")

    @app.post("/v1/analytics/entropy")
    async def analytics_entropy(request: Request) -> dict:
        text = (await request.body()).decode("utf-8")
        dataset = store.parse_episodes_csv(text)
        return infotheory.gain_report(dataset).to_dict()

    @app.post("/v1/analytics/tree")
    async def analytics_tree(
        request: Request, criterion: str = "gain_ratio", min_leaf: int = 2
    ) -> dict:
        text = (await request.body()).decode("utf-8")
        dataset = store.parse_episodes_csv(text)
        try:
            cfg = dtree.TrainConfig(criterion=criterion, min_leaf=min_leaf)
        except ValueError as exc:
            raise GraphValidationError(str(exc)) from None
        tree = dtree.build_tree(dataset, cfg)
        matrix = dtree.evaluate(tree, dataset)
        return {
            "criterion": criterion,
            "min_leaf": min_leaf,
            "tree": dtree.tree_to_dict(tree),
            "confusion": matrix.to_dict(),
        }

    @app.get("/v1/analytics/weight-table")
    def analytics_weight_table(n: int) -> dict:
        try:
            row = weight_table_row(n)
        except ValueError as exc:
            raise GraphValidationError(str(exc)) from None
        return {
            "n": row.n,
            "pairs": [
                {"pass": weight_payload(p), "fail": weight_payload(f)}
                for p, f in row.pairs
            ],
        }

    if webui_dir is not None:
        app.mount("/", StaticFiles(directory=str(webui_dir), html=True), name="webui")

    return app


def default_webui_dir():
    """Packaged static console, if it was built and shipped."""
    from importlib.resources import files

    candidate = files("preassess").joinpath("webui")
    try:
        if candidate.joinpath("index.html").is_file():
            return candidate
    except (OSError, AttributeError):
        pass
    return None


def serve(graph_path: str, log_path: str, addr: str) -> None:
    """Run the service; blocks until interrupted."""
    import uvicorn

    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"addr must look like host:port, got {addr!r}")
    g = graphmod.load_graph_file(graph_path)
    log = store.EventLog(log_path, writer=True)
    try:
        app = create_app(g, log, webui_dir=default_webui_dir())
        uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    finally:
        log.close()
