"""HTTP session service exposing the fine-tuning workflow to the UI.

Sessions hold the loaded graph, the working exemplar layout, retrieved
targets, a copy/paste clipboard, and an append-only commit history. Mutating
endpoints take an optional optimistic revision number; stale writes get 409.
Long-running work can be pushed to a background job and polled on /jobs/{id}.
"""
from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from fastapi import Body, FastAPI, HTTPException

from .correspondence import MarkerSet, seeded_auto_match
from .embedding import EmbeddingConfig, compute_embeddings
from .graph import Graph, GraphError, Structure, induced_subgraph
from .merge import MergeParams, merge_with_optimization
from .pipeline import markers_for_transfer
from .correspondence import FilterParams
from .retrieval import RetrievalParams, retrieve_similar
from .transfer import DeformParams, MatchRadiusPolicy, transfer_modification


def _graph_to_json(g: Graph) -> dict:
    return {
        "nodes": [{"id": nid, "x": float(x), "y": float(y)}
                  for nid, (x, y) in zip(g.node_ids, g.positions)],
        "edges": [{"source": a, "target": b} for a, b in g.edge_ids()],
    }


def _graph_from_json(obj: dict) -> Graph:
    return Graph.build(
        [(str(n["id"]), float(n["x"]), float(n["y"])) for n in obj["nodes"]],
        [(str(e["source"]), str(e["target"])) for e in obj["edges"]],
    )


class Session:
    def __init__(self, sid: str):
        self.id = sid
        self.revision = 0
        self.graph: Graph | None = None
        self.embeddings = None
        self.exemplar: Structure | None = None
        self.exemplar_before: dict[str, tuple[float, float]] = {}
        self.working_positions: dict[str, tuple[float, float]] = {}
        self.targets: list[dict] = []  # {"nodes": [...], "similarity": float}
        self.clipboard: dict | None = None
        self.pending: dict | None = None  # last paste proposal
        self.history: list[dict] = []
        self.snapshots: list[Graph] = []  # pre-commit graphs, for undo
        self.lock = threading.Lock()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "revision": self.revision,
            "graph": _graph_to_json(self.graph) if self.graph else None,
            "exemplar": list(self.exemplar.node_ids) if self.exemplar else None,
            "exemplar_before": self.exemplar_before,
            "working_positions": self.working_positions,
            "targets": self.targets,
            "clipboard": self.clipboard,
            "history": self.history,
        }


class SessionStore:
    def __init__(self, state_dir: str | None = None):
        self.sessions: dict[str, Session] = {}
        self.state_dir = Path(state_dir) if state_dir else None
        if self.state_dir:
            self.state_dir.mkdir(parents=True, exist_ok=True)

    def create(self) -> Session:
        sid = uuid.uuid4().hex[:12]
        s = Session(sid)
        self.sessions[sid] = s
        return s

    def get(self, sid: str) -> Session:
        s = self.sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid}")
        return s

    def persist(self, s: Session) -> None:
        if self.state_dir:
            (self.state_dir / f"{s.id}.json").write_text(json.dumps(s.to_json()))


def create_app(state_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="layout fine-tuning service")
    store = SessionStore(state_dir)
    jobs: dict[str, dict] = {}
    executor = ThreadPoolExecutor(max_workers=2)

    def check_revision(s: Session, body: dict) -> None:
        rev = body.get("revision")
        if rev is not None and rev != s.revision:
            raise HTTPException(409, f"stale revision {rev}, current {s.revision}")

    def submit_job(fn) -> str:
        jid = uuid.uuid4().hex[:12]
        jobs[jid] = {"status": "running", "result": None, "error": None}

        def run():
            try:
                jobs[jid]["result"] = fn()
                jobs[jid]["status"] = "done"
            except Exception as e:  # surfaced via polling
                jobs[jid]["error"] = str(e)
                jobs[jid]["status"] = "failed"

        executor.submit(run)
        return jid

    @app.exception_handler(GraphError)
    async def graph_error(_, exc: GraphError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.post("/sessions")
    def create_session():
        s = store.create()
        store.persist(s)
        return {"id": s.id, "revision": s.revision}

    @app.post("/sessions/{sid}/graph")
    def load_graph(sid: str, body: dict = Body(...)):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            s.graph = _graph_from_json(body["graph"])
            s.embeddings = None
            s.exemplar = None
            s.targets = []
            s.revision += 1
            store.persist(s)
            return {"revision": s.revision, "nodes": s.graph.n,
                    "edges": len(s.graph.edges)}

    @app.post("/sessions/{sid}/exemplar")
    def set_exemplar(sid: str, body: dict = Body(...)):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            if s.graph is None:
                raise HTTPException(400, "no graph loaded")
            exemplar = Structure("session", tuple(str(n) for n in body["nodes"]))
            exemplar.validate_against(s.graph)
            s.exemplar = exemplar
            s.exemplar_before = {
                n: tuple(map(float, s.graph.position_of(n))) for n in exemplar.node_ids}
            s.working_positions = dict(s.exemplar_before)
            s.revision += 1
            store.persist(s)
            return {"revision": s.revision, "nodes": list(exemplar.node_ids)}

    @app.post("/sessions/{sid}/retrieve")
    def retrieve(sid: str, body: dict = Body(default={})):
        s = store.get(sid)

        def work():
            with s.lock:
                if s.graph is None or s.exemplar is None:
                    raise HTTPException(400, "graph and exemplar required")
                if s.embeddings is None:
                    s.embeddings = compute_embeddings(s.graph, EmbeddingConfig())
                params = RetrievalParams.for_exemplar(
                    len(s.exemplar.node_ids),
                    k=int(body.get("k", 5)),
                    epsilon=float(body.get("epsilon", 0.5)))
                if "min" in body or "max" in body:
                    from dataclasses import replace
                    params = replace(params,
                                     min_count=int(body.get("min", params.min_count)),
                                     max_count=int(body.get("max", params.max_count)))
                found = retrieve_similar(s.graph, s.exemplar, s.embeddings, params)
                s.targets = [{"nodes": list(r.structure.node_ids),
                              "similarity": r.similarity} for r in found]
                s.revision += 1
                store.persist(s)
                return {"revision": s.revision, "targets": s.targets}

        if body.get("background"):
            return {"job": submit_job(work)}
        return work()

    @app.get("/jobs/{jid}")
    def job_status(jid: str):
        job = jobs.get(jid)
        if job is None:
            raise HTTPException(404, f"unknown job {jid}")
        return job

    @app.post("/sessions/{sid}/exemplar/positions")
    def move_exemplar_nodes(sid: str, body: dict = Body(...)):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            if s.exemplar is None:
                raise HTTPException(400, "no exemplar selected")
            for nid, (x, y) in body["positions"].items():
                if nid not in s.working_positions:
                    raise HTTPException(422, f"node {nid} not in exemplar")
                s.working_positions[nid] = (float(x), float(y))
            s.revision += 1
            store.persist(s)
            return {"revision": s.revision}

    @app.post("/sessions/{sid}/copy")
    def copy_modification(sid: str, body: dict = Body(default={})):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            if s.exemplar is None:
                raise HTTPException(400, "no exemplar selected")
            s.clipboard = {
                "nodes": list(s.exemplar.node_ids),
                "before": dict(s.exemplar_before),
                "after": dict(s.working_positions),
                "markers": body.get("markers"),
            }
            s.revision += 1
            store.persist(s)
            return {"revision": s.revision,
                    "modified": s.clipboard["before"] != s.clipboard["after"]}

    @app.post("/sessions/{sid}/paste/{target_index}")
    def paste(sid: str, target_index: int, body: dict = Body(default={})):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            if s.clipboard is None:
                raise HTTPException(409, "no recorded modification")
            if not 0 <= target_index < len(s.targets):
                raise HTTPException(404, f"no target {target_index}")
            clip = s.clipboard
            s_struct = Structure("session", tuple(clip["nodes"]))
            s_graph = induced_subgraph(s.graph, s_struct)
            s_graph = s_graph.with_positions(
                np.array([clip["before"][n] for n in s_graph.node_ids]))
            s_prime = s_graph.with_positions(
                np.array([clip["after"][n] for n in s_graph.node_ids]))
            t_struct = Structure("session", tuple(s.targets[target_index]["nodes"]))
            t_graph = induced_subgraph(s.graph, t_struct)
            if clip.get("markers"):
                markers = MarkerSet(tuple((p["source"], p["target"])
                                          for p in clip["markers"]))
            else:
                corr = seeded_auto_match(s_graph, t_graph)
                markers, _ = markers_for_transfer(s_graph, t_graph, corr, FilterParams())
            transferred, report = transfer_modification(
                s_graph, s_prime, t_graph, markers, DeformParams(), MatchRadiusPolicy())
            s.pending = {
                "target_index": target_index,
                "positions": {nid: [float(x), float(y)] for nid, (x, y)
                              in zip(transferred.node_ids, transferred.positions)},
            }
            store.persist(s)
            return {"revision": s.revision, "proposal": s.pending["positions"],
                    "report": {k: v for k, v in report.items() if k != "markers"}}

    @app.post("/sessions/{sid}/commit")
    def commit(sid: str, body: dict = Body(default={})):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            if s.pending is None:
                raise HTTPException(409, "nothing to commit")
            target_nodes = s.targets[s.pending["target_index"]]["nodes"]
            before = {n: [float(x) for x in s.graph.position_of(n)]
                      for n in target_nodes}
            modified = induced_subgraph(
                s.graph, Structure("session", tuple(target_nodes)))
            modified = modified.with_positions(
                np.array([s.pending["positions"][n] for n in modified.node_ids]))
            s.snapshots.append(s.graph)
            s.graph = merge_with_optimization(s.graph, modified, MergeParams())
            s.history.append({
                "target_index": s.pending["target_index"],
                "before": before,
                "after": {n: [float(x) for x in s.graph.position_of(n)]
                          for n in target_nodes},
            })
            s.pending = None
            s.revision += 1
            store.persist(s)
            return {"revision": s.revision, "graph": _graph_to_json(s.graph),
                    "history_length": len(s.history)}

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str, body: dict = Body(default={})):
        s = store.get(sid)
        with s.lock:
            check_revision(s, body)
            if not s.snapshots:
                raise HTTPException(409, "nothing to undo")
            s.graph = s.snapshots.pop()
            s.history.pop()
            s.revision += 1
            store.persist(s)
            return {"revision": s.revision, "graph": _graph_to_json(s.graph)}

    @app.get("/sessions/{sid}/history")
    def history(sid: str):
        s = store.get(sid)
        return {"revision": s.revision, "history": s.history}

    @app.get("/sessions/{sid}")
    def snapshot(sid: str):
        return store.get(sid).to_json()

    return app
