"""Fragments: the (dimension, value) atoms of search.

Containment checks run against the full per-commit data, never the
rendered top-k, so a value that fell off the table still matches — recall
over precision. The pin board persists fragments per repository as an
NDJSON file written via write-temp-then-rename.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, replace

from .clustering import Cluster
from .errors import InvalidArgument, MalformedRecord, PersistenceFailure
from .ingest import CommitRecord
from .scope import Scope
from .stem import StemSequence
from .table import Dimension, cluster_commits

PIN_FORMAT = "fragex-pins"
PIN_VERSION = 1


@dataclass(frozen=True)
class Fragment:
    dimension: Dimension
    value: str

    def __post_init__(self):
        if not self.value:
            raise InvalidArgument("fragment value must be non-empty")
        if self.dimension is Dimension.KEYWORD and self.value != self.value.lower():
            # Keywords are stored lowercase everywhere; canonicalize here so
            # a fragment clicked in any view compares equal.
            object.__setattr__(self, "value", self.value.lower())

    @classmethod
    def parse(cls, spec: str) -> "Fragment":
        """Parse the CLI syntax ``dimension=value``."""
        if "=" not in spec:
            raise InvalidArgument(f"fragment must look like dim=value, got {spec!r}")
        dim, value = spec.split("=", 1)
        return cls(dimension=Dimension.parse(dim), value=value)


def commit_contains(commit: CommitRecord, fragment: Fragment) -> bool:
    if fragment.dimension is Dimension.AUTHOR:
        return commit.author == fragment.value
    if fragment.dimension is Dimension.KEYWORD:
        return fragment.value in commit.keywords()
    if fragment.dimension is Dimension.FILE:
        return any(change.path == fragment.value for change in commit.changes)
    return fragment.value in commit.directories()


def contains(commits: list[CommitRecord], fragment: Fragment) -> bool:
    """Whether any commit of a cluster carries the fragment's value."""
    return any(commit_contains(commit, fragment) for commit in commits)


@dataclass(frozen=True)
class InspectionMatrix:
    fragments: tuple[Fragment, ...]
    cluster_ids: tuple[str, ...]
    grid: tuple[tuple[bool, ...], ...]  # [fragment][cluster]
    matched_sum: tuple[int, ...]  # per cluster


def inspect(fragments: list[Fragment], scope: Scope) -> InspectionMatrix:
    """Containment grid over the scope's clusters plus the matched-sum row."""
    if not fragments:
        raise InvalidArgument("inspect needs at least one fragment")
    members = {
        cluster.id: cluster_commits(cluster, scope.stem)
        for cluster in scope.clusters
    }
    grid = tuple(
        tuple(contains(members[cluster.id], fragment)
              for cluster in scope.clusters)
        for fragment in fragments
    )
    matched = tuple(
        sum(1 for row in grid if row[column]) for column in range(len(scope.clusters))
    )
    return InspectionMatrix(
        fragments=tuple(fragments),
        cluster_ids=tuple(cluster.id for cluster in scope.clusters),
        grid=grid,
        matched_sum=matched,
    )


@dataclass(frozen=True)
class Occurrence:
    hash: str
    timestamp: int
    stem_index: int
    in_scope: bool


@dataclass(frozen=True)
class FragmentHistory:
    fragment: Fragment
    occurrences: tuple[Occurrence, ...]


def history(stem: StemSequence, fragment: Fragment,
            scope: Scope | None = None) -> FragmentHistory:
    """Whole-stem occurrence list, ascending by stem index; squashed
    commits report their node's index. The optional scope only sets the
    in_scope flag, it never trims the list."""
    in_range = (lambda i: scope.node_range[0] <= i <= scope.node_range[1]) \
        if scope is not None else (lambda i: False)
    occurrences = []
    for node in stem.nodes:
        for commit in node.members():
            if commit_contains(commit, fragment):
                occurrences.append(Occurrence(
                    hash=commit.hash,
                    timestamp=commit.timestamp,
                    stem_index=node.index,
                    in_scope=in_range(node.index),
                ))
    return FragmentHistory(fragment=fragment, occurrences=tuple(occurrences))


# ---------------------------------------------------------------------------
# Pin board

@dataclass(frozen=True)
class Pin:
    fragment: Fragment
    pinned_at: int


@dataclass(frozen=True)
class PinBoard:
    repo: str
    pins: tuple[Pin, ...] = ()
    version: int = PIN_VERSION

    def fragments(self) -> list[Fragment]:
        return [pin.fragment for pin in self.pins]

    def has(self, fragment: Fragment) -> bool:
        return any(pin.fragment == fragment for pin in self.pins)


def pin(board: PinBoard, fragment: Fragment, now: int | None = None) -> PinBoard:
    """Add a fragment; pinning an already-pinned fragment is a no-op."""
    if board.has(fragment):
        return board
    at = int(time.time()) if now is None else now
    return replace(board, pins=board.pins + (Pin(fragment, at),))


def unpin(board: PinBoard, fragment: Fragment) -> PinBoard:
    """Remove a fragment; unpinning an absent fragment is a no-op."""
    if not board.has(fragment):
        return board
    return replace(board, pins=tuple(p for p in board.pins if p.fragment != fragment))


def list_pins(board: PinBoard) -> list[Fragment]:
    return board.fragments()


_UNSAFE_PATH_CHARS = re.compile(r"[^A-Za-z0-9._-]+")


def _repo_dirname(repo: str) -> str:
    return _UNSAFE_PATH_CHARS.sub("_", repo) or "_"


def default_data_dir() -> str:
    return os.environ.get("FRAGEX_DATA",
                          os.path.join(os.path.expanduser("~"), ".fragex"))


class PinStore:
    """Per-repository pin persistence under ``<data-dir>/<repo>/pins.ndjson``.

    Every mutation rewrites the file atomically: the new contents go to a
    temp file in the same directory, then replace the old file in one
    rename. A crash in between leaves the previous board intact.
    """

    def __init__(self, data_dir: str | os.PathLike | None = None):
        self.data_dir = os.fspath(data_dir) if data_dir else default_data_dir()

    def path_for(self, repo: str) -> str:
        return os.path.join(self.data_dir, _repo_dirname(repo), "pins.ndjson")

    def load(self, repo: str) -> PinBoard:
        path = self.path_for(repo)
        if not os.path.exists(path):
            return PinBoard(repo=repo)
        with open(path, encoding="utf-8") as fp:
            lines = [line for line in fp if line.strip()]
        if not lines:
            return PinBoard(repo=repo)
        header = json.loads(lines[0])
        if header.get("format") != PIN_FORMAT or header.get("version") != PIN_VERSION:
            raise MalformedRecord(1, f"not a {PIN_FORMAT} v{PIN_VERSION} file")
        pins = []
        for raw in lines[1:]:
            record = json.loads(raw)
            pins.append(Pin(
                fragment=Fragment(Dimension.parse(record["dimension"]),
                                  record["value"]),
                pinned_at=int(record["pinned_at"]),
            ))
        return PinBoard(repo=header.get("repo", repo), pins=tuple(pins))

    def save(self, board: PinBoard) -> None:
        path = self.path_for(board.repo)
        payload = json.dumps({"format": PIN_FORMAT, "version": PIN_VERSION,
                              "repo": board.repo}, ensure_ascii=False) + "\n"
        for p in board.pins:
            payload += json.dumps({
                "dimension": p.fragment.dimension.value,
                "value": p.fragment.value,
                "pinned_at": p.pinned_at,
            }, ensure_ascii=False) + "\n"
        tmp = path + ".tmp"
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(tmp, "w", encoding="utf-8") as fp:
                fp.write(payload)
                fp.flush()
                os.fsync(fp.fileno())
            os.replace(tmp, path)
        except OSError as exc:
            raise PersistenceFailure(path, exc) from exc

    def pin(self, repo: str, fragment: Fragment, now: int | None = None) -> PinBoard:
        board = pin(self.load(repo), fragment, now=now)
        self.save(board)
        return board

    def unpin(self, repo: str, fragment: Fragment) -> PinBoard:
        board = unpin(self.load(repo), fragment)
        self.save(board)
        return board
