"""HTTP/JSON service exposing ingestion, scoping, tables, inspection,
history and pins.

Analysis state (stems, scopes, dendrograms) lives in an in-memory LRU
keyed by content hashes and is cheap to recompute; pins are the only
durable state. Binds to loopback by default: this is a single-user desk
tool.
"""

from __future__ import annotations

import hashlib
import os
import threading
from collections import OrderedDict
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import schemas
from .errors import (
    CycleDetected,
    DanglingParent,
    EmptyScope,
    FragexError,
    GitInvocationFailed,
    InvalidArgument,
    MalformedRecord,
    MissingHead,
    NotARepository,
    PersistenceFailure,
    UnknownRelease,
)
from .fragments import Fragment, FragmentHistory, InspectionMatrix, PinBoard, \
    PinStore, history, inspect
from .ingest import RepoSnapshot, load_source
from .scope import Scope, ScopeFilter, rescope, resolve_scope
from .stem import StemSequence, annotate_releases, build_stem
from .table import Dimension, build_table, commit_details, table_payload

DEFAULT_PORT = 7845
_SCOPE_CACHE_SIZE = 128

_STATUS_BY_ERROR = {
    InvalidArgument: 400,
    MalformedRecord: 400,
    DanglingParent: 400,
    MissingHead: 400,
    NotARepository: 400,
    CycleDetected: 400,
    EmptyScope: 422,
    UnknownRelease: 422,
    GitInvocationFailed: 500,
    PersistenceFailure: 500,
}


class ApiError(Exception):
    """Error with a fixed (status, code) pair; rendered as the error schema."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message

    @classmethod
    def from_fragex(cls, exc: FragexError) -> "ApiError":
        return cls(_STATUS_BY_ERROR.get(type(exc), 500), exc.code, str(exc))

    def response(self) -> JSONResponse:
        return JSONResponse(status_code=self.status, content={
            "status": self.status, "code": self.code, "message": self.message,
        })


@dataclass
class RepoEntry:
    repo_id: str
    snapshot: RepoSnapshot
    stem: StemSequence
    pin_lock: threading.Lock


class Registry:
    """Repositories, scopes and pins behind one lock.

    Scope entries cache the whole materialized Scope (dendrogram
    included) so a granularity change replays merges instead of
    re-clustering; eviction is LRU.
    """

    def __init__(self, data_dir: str | None = None):
        self.repos: dict[str, RepoEntry] = {}
        self.scopes: OrderedDict[str, tuple[str, Scope]] = OrderedDict()
        self.pins = PinStore(data_dir)
        self.lock = threading.RLock()

    def add_repo(self, snapshot: RepoSnapshot) -> RepoEntry:
        repo_id = hashlib.sha256(
            f"{snapshot.name}:{snapshot.default_head}".encode()).hexdigest()[:12]
        with self.lock:
            if repo_id in self.repos:
                raise ApiError(409, "RepoAlreadyLoaded",
                               f"repository {snapshot.name!r} is already loaded "
                               f"as {repo_id}")
            stem = annotate_releases(build_stem(snapshot))
            entry = RepoEntry(repo_id=repo_id, snapshot=snapshot, stem=stem,
                              pin_lock=threading.Lock())
            self.repos[repo_id] = entry
            return entry

    def repo(self, repo_id: str) -> RepoEntry:
        with self.lock:
            entry = self.repos.get(repo_id)
        if entry is None:
            raise ApiError(404, "UnknownRepo", f"no repository {repo_id!r}")
        return entry

    def put_scope(self, repo_id: str, scope: Scope) -> None:
        with self.lock:
            self.scopes[scope.id] = (repo_id, scope)
            self.scopes.move_to_end(scope.id)
            while len(self.scopes) > _SCOPE_CACHE_SIZE:
                self.scopes.popitem(last=False)

    def scope(self, scope_id: str) -> tuple[str, Scope]:
        with self.lock:
            found = self.scopes.get(scope_id)
            if found is not None:
                self.scopes.move_to_end(scope_id)
        if found is None:
            raise ApiError(404, "UnknownScope", f"no scope {scope_id!r}")
        return found


# ---------------------------------------------------------------------------
# Payload builders (shared with the CLI for byte-identical numbers)

def scope_response(repo_id: str, scope: Scope) -> dict:
    return {
        "scope_id": scope.id,
        "repo_id": repo_id,
        "node_range": list(scope.node_range),
        "granularity": scope.granularity,
        "commit_count": scope.commit_count,
        "matched_nodes": sorted(scope.matched_nodes),
        "clusters": [
            {"id": c.id, "node_range": list(c.node_range),
             "commit_count": c.commit_count}
            for c in scope.clusters
        ],
    }


def stem_response(entry: RepoEntry) -> dict:
    stem = entry.stem
    timestamps = [node.lead.timestamp for node in stem.nodes]
    return {
        "repo_id": entry.repo_id,
        "name": entry.snapshot.name,
        "node_count": len(stem.nodes),
        "commit_count": stem.total_commits,
        "unreachable_count": stem.unreachable_count,
        "date_range": {"from": min(timestamps), "to": max(timestamps)},
        "releases": [
            {"index": node.index, "tag": node.release}
            for node in stem.nodes if node.release is not None
        ],
    }


def inspection_response(scope: Scope, matrix: InspectionMatrix) -> dict:
    return {
        "scope_id": scope.id,
        "fragments": [
            {"dimension": f.dimension.value, "value": f.value}
            for f in matrix.fragments
        ],
        "clusters": list(matrix.cluster_ids),
        "grid": [list(row) for row in matrix.grid],
        "matched_sum": list(matrix.matched_sum),
    }


def history_response(result: FragmentHistory) -> dict:
    return {
        "fragment": {"dimension": result.fragment.dimension.value,
                     "value": result.fragment.value},
        "occurrences": [
            {"hash": o.hash, "timestamp": o.timestamp,
             "stem_index": o.stem_index, "in_scope": o.in_scope}
            for o in result.occurrences
        ],
    }


def pins_response(board: PinBoard) -> dict:
    return {
        "repo": board.repo,
        "version": board.version,
        "pins": [
            {"dimension": p.fragment.dimension.value, "value": p.fragment.value,
             "pinned_at": p.pinned_at}
            for p in board.pins
        ],
    }


def _parse_filter(raw: dict) -> ScopeFilter:
    if not isinstance(raw, dict):
        raise InvalidArgument("filter must be an object")
    known = {"date_from", "date_to", "release_from", "release_to",
             "authors", "keywords", "index_from", "index_to"}
    unknown = set(raw) - known
    if unknown:
        raise InvalidArgument(f"unknown filter fields: {sorted(unknown)}")
    return ScopeFilter(
        date_from=raw.get("date_from"),
        date_to=raw.get("date_to"),
        release_from=raw.get("release_from"),
        release_to=raw.get("release_to"),
        authors=frozenset(raw.get("authors") or ()),
        keywords=frozenset(raw.get("keywords") or ()),
        index_from=raw.get("index_from"),
        index_to=raw.get("index_to"),
    )


def _parse_fragment(raw: dict) -> Fragment:
    if not isinstance(raw, dict) or "dimension" not in raw or "value" not in raw:
        raise InvalidArgument("fragment must be {dimension, value}")
    return Fragment(Dimension.parse(str(raw["dimension"])), str(raw["value"]))


def _parse_dims(raw: str | None) -> tuple[Dimension, ...] | None:
    if raw is None or raw == "":
        return None
    return tuple(Dimension.parse(part) for part in raw.split(","))


# ---------------------------------------------------------------------------

def create_app(data_dir: str | None = None, ui_origin: str = "*") -> FastAPI:
    app = FastAPI(title="fragex", version="0.1.0", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[ui_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = Registry(data_dir)
    app.state.registry = registry

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(FragexError)
    async def on_fragex_error(request: Request, exc: FragexError):
        return ApiError.from_fragex(exc).response()

    @app.post("/repos", status_code=201)
    def create_repo(body: dict):
        source = body.get("path") or body.get("dump")
        if not source:
            raise InvalidArgument("body must carry 'path' or 'dump'")
        entry = registry.add_repo(load_source(source))
        return {
            "repo_id": entry.repo_id,
            "name": entry.snapshot.name,
            "head": entry.snapshot.default_head,
            "commit_count": len(entry.snapshot),
            "node_count": len(entry.stem.nodes),
        }

    @app.get("/repos/{repo_id}/stem")
    def get_stem(repo_id: str):
        return stem_response(registry.repo(repo_id))

    @app.post("/repos/{repo_id}/scopes", status_code=201)
    def create_scope(repo_id: str, body: dict):
        entry = registry.repo(repo_id)
        flt = _parse_filter(body.get("filter") or {})
        g = body.get("granularity", 0.5)
        if not isinstance(g, (int, float)):
            raise InvalidArgument("granularity must be a number")
        scope = resolve_scope(entry.stem, flt, float(g))
        registry.put_scope(repo_id, scope)
        return scope_response(repo_id, scope)

    @app.post("/scopes/{scope_id}/granularity")
    def set_granularity(scope_id: str, body: dict):
        repo_id, scope = registry.scope(scope_id)
        if "g" not in body or not isinstance(body["g"], (int, float)):
            raise InvalidArgument("body must carry a numeric 'g'")
        recut = rescope(scope, float(body["g"]))
        registry.put_scope(repo_id, recut)
        return scope_response(repo_id, recut)

    @app.get("/scopes/{scope_id}/table")
    def get_table(scope_id: str, k: int = 5, dims: str | None = None):
        _repo_id, scope = registry.scope(scope_id)
        table = build_table(scope, k=k, dims=_parse_dims(dims))
        return table_payload(table, scope)

    @app.get("/scopes/{scope_id}/clusters/{cluster_id}/commits")
    def get_commits(scope_id: str, cluster_id: str):
        _repo_id, scope = registry.scope(scope_id)
        cluster = scope.cluster_by_id(cluster_id)
        if cluster is None:
            raise ApiError(404, "UnknownCluster",
                           f"no cluster {cluster_id!r} in scope {scope_id!r}")
        return {"cluster": cluster_id,
                "commits": commit_details(cluster, scope.stem)}

    @app.post("/scopes/{scope_id}/inspect")
    def post_inspect(scope_id: str, body: dict):
        _repo_id, scope = registry.scope(scope_id)
        raw = body.get("fragments")
        if not isinstance(raw, list):
            raise InvalidArgument("body must carry a 'fragments' list")
        fragments = [_parse_fragment(f) for f in raw]
        return inspection_response(scope, inspect(fragments, scope))

    @app.get("/repos/{repo_id}/fragments/history")
    def get_history(repo_id: str, dimension: str, value: str,
                    scope_id: str | None = None):
        entry = registry.repo(repo_id)
        scope = registry.scope(scope_id)[1] if scope_id else None
        fragment = Fragment(Dimension.parse(dimension), value)
        return history_response(history(entry.stem, fragment, scope))

    @app.get("/repos/{repo_id}/pins")
    def get_pins(repo_id: str):
        entry = registry.repo(repo_id)
        return pins_response(registry.pins.load(entry.snapshot.name))

    @app.post("/repos/{repo_id}/pins", status_code=201)
    def post_pin(repo_id: str, body: dict):
        entry = registry.repo(repo_id)
        fragment = _parse_fragment(body)
        with entry.pin_lock:
            board = registry.pins.pin(entry.snapshot.name, fragment)
        return pins_response(board)

    @app.delete("/repos/{repo_id}/pins")
    def delete_pin(repo_id: str, dimension: str, value: str):
        entry = registry.repo(repo_id)
        fragment = Fragment(Dimension.parse(dimension), value)
        with entry.pin_lock:
            board = registry.pins.unpin(entry.snapshot.name, fragment)
        return pins_response(board)

    @app.get("/schema/")
    def schema_index():
        return {"schemas": sorted(schemas.ALL)}

    @app.get("/schema/{name}")
    def schema_by_name(name: str):
        if name not in schemas.ALL:
            raise ApiError(404, "UnknownSchema", f"no schema {name!r}")
        return schemas.ALL[name]

    return app


def resolve_port(port: int | None) -> int:
    if port is not None:
        return port
    return int(os.environ.get("FRAGEX_PORT", DEFAULT_PORT))
