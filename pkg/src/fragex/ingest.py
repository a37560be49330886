"""Repository ingestion: canonical dumps, the live git adapter, and the
derived dimension values (keywords, directories).

The canonical dump is newline-delimited JSON. Line 1 is a header record
``{"format": "fragex-dump", "version": 1, "head": <hash>, "name": <text>}``;
every following line is one commit record. The dump is the primary test
surface; :func:`extract_live` is a thin translator that shells out to git.
"""

from __future__ import annotations

import json
import os
import re
import subprocess
from collections import deque
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import (
    CycleDetected,
    DanglingParent,
    GitInvocationFailed,
    MalformedRecord,
    MissingHead,
    NotARepository,
)

DUMP_FORMAT = "fragex-dump"
DUMP_VERSION = 1

# Fixed stopword list, shipped as data. Merge-generated words ("merge",
# "branch", "pull", "request") are deliberately absent: they are
# legitimate fragments.
STOPWORDS = frozenset({
    "the", "a", "an", "and", "or", "of", "in", "on", "to", "for", "is",
    "this", "that", "with", "from", "into", "are", "was", "were",
})

_HASH_RE = re.compile(r"^[0-9a-f]{40}$")
# Maximal runs of alphanumeric characters (unicode-aware, underscore splits).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_NUMSTAT_RE = re.compile(r"^(\d+|-)\t(\d+|-)\t(.+)$")


def is_commit_hash(value: object) -> bool:
    return isinstance(value, str) and bool(_HASH_RE.match(value))


@dataclass(frozen=True)
class FileChange:
    """One file touched by a commit, with numstat line counts.

    Binary changes are recorded with additions = deletions = 0.
    """

    path: str
    additions: int
    deletions: int

    def __post_init__(self):
        if not self.path or self.path.startswith("/"):
            raise ValueError(f"invalid change path {self.path!r}")
        if any(seg in ("", ".", "..") for seg in self.path.split("/")):
            raise ValueError(f"invalid change path {self.path!r}")
        if self.additions < 0 or self.deletions < 0:
            raise ValueError(f"negative line count for {self.path!r}")

    @property
    def loc(self) -> int:
        return self.additions + self.deletions


@dataclass(frozen=True)
class CommitRecord:
    """One commit's metadata; parents are ordered, first-parent first."""

    hash: str
    parents: tuple[str, ...]
    author: str
    timestamp: int
    message: str
    changes: tuple[FileChange, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if not _HASH_RE.match(self.hash):
            raise ValueError(f"invalid commit hash {self.hash!r}")
        for p in self.parents:
            if not _HASH_RE.match(p):
                raise ValueError(f"invalid parent hash {p!r}")
        if not self.author:
            raise ValueError("author must be non-empty")
        if self.timestamp < 0:
            raise ValueError("timestamp must be >= 0")

    def keywords(self) -> list[str]:
        return tokenize_keywords(self.message)

    def paths(self) -> list[str]:
        return [c.path for c in self.changes]

    def directories(self) -> list[str]:
        """Directories touched, deduplicated preserving first occurrence."""
        seen: set[str] = set()
        out: list[str] = []
        for change in self.changes:
            for d in derive_directories(change.path):
                if d not in seen:
                    seen.add(d)
                    out.append(d)
        return out


@dataclass(frozen=True)
class RepoSnapshot:
    """Immutable, hash-indexed view of a repository's commits."""

    commits: dict[str, CommitRecord]
    default_head: str
    name: str

    def __post_init__(self):
        if self.default_head not in self.commits:
            raise MissingHead(self.default_head)
        _check_acyclic(self.commits)

    def __len__(self) -> int:
        return len(self.commits)


def _check_acyclic(commits: dict[str, CommitRecord]) -> None:
    # Kahn's algorithm over parent->child edges; leftovers mean a cycle.
    children: dict[str, list[str]] = {h: [] for h in commits}
    indegree: dict[str, int] = {}
    for h, record in commits.items():
        indegree[h] = len(record.parents)
        for p in record.parents:
            children[p].append(h)
    queue = deque(h for h, d in indegree.items() if d == 0)
    seen = 0
    while queue:
        h = queue.popleft()
        seen += 1
        for child in children[h]:
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if seen != len(commits):
        raise CycleDetected("commit graph contains a cycle")


def tokenize_keywords(message: str) -> list[str]:
    """Extract keyword tokens from a commit message.

    Lowercase, split on every non-alphanumeric character; drops tokens
    shorter than 3 characters, pure-numeric tokens and stopwords;
    deduplicates preserving first occurrence.
    """
    out: list[str] = []
    seen: set[str] = set()
    for token in _TOKEN_RE.findall(message.lower()):
        if len(token) < 3 or token.isdigit() or token in STOPWORDS:
            continue
        if token not in seen:
            seen.add(token)
            out.append(token)
    return out


def derive_directories(path: str) -> list[str]:
    """Every proper ancestor directory of ``path``, deepest first, then "/".

    A top-level file yields only the root marker.
    """
    parts = path.split("/")
    out = ["/".join(parts[:i]) for i in range(len(parts) - 1, 0, -1)]
    out.append("/")
    return out


# ---------------------------------------------------------------------------
# Canonical dump

def _require(condition: bool, line_number: int, reason: str) -> None:
    if not condition:
        raise MalformedRecord(line_number, reason)


def _parse_change(raw: object, line_number: int) -> FileChange:
    _require(isinstance(raw, dict), line_number, "change must be an object")
    path = raw.get("path")
    add = raw.get("add")
    dele = raw.get("del")
    _require(isinstance(path, str), line_number, "change path must be a string")
    _require(isinstance(add, int) and not isinstance(add, bool), line_number,
             "change add must be an integer")
    _require(isinstance(dele, int) and not isinstance(dele, bool), line_number,
             "change del must be an integer")
    try:
        return FileChange(path=path, additions=add, deletions=dele)
    except ValueError as exc:
        raise MalformedRecord(line_number, str(exc)) from exc


def _parse_commit_line(raw: object, line_number: int) -> CommitRecord:
    _require(isinstance(raw, dict), line_number, "record must be an object")
    for key in ("hash", "parents", "author", "timestamp", "message", "tags", "changes"):
        _require(key in raw, line_number, f"missing field {key!r}")
    _require(isinstance(raw["parents"], list), line_number, "parents must be a list")
    _require(isinstance(raw["tags"], list), line_number, "tags must be a list")
    _require(all(isinstance(t, str) for t in raw["tags"]), line_number,
             "tags must be strings")
    _require(isinstance(raw["changes"], list), line_number, "changes must be a list")
    _require(isinstance(raw["author"], str), line_number, "author must be a string")
    _require(isinstance(raw["message"], str), line_number, "message must be a string")
    ts = raw["timestamp"]
    _require(isinstance(ts, int) and not isinstance(ts, bool), line_number,
             "timestamp must be an integer")
    _require(is_commit_hash(raw["hash"]), line_number,
             "hash must be a 40-char lowercase hex hash")
    _require(all(isinstance(p, str) for p in raw["parents"]), line_number,
             "parents must be strings")
    changes = tuple(_parse_change(c, line_number) for c in raw["changes"])
    try:
        return CommitRecord(
            hash=raw["hash"],
            parents=tuple(raw["parents"]),
            author=raw["author"],
            timestamp=ts,
            message=raw["message"],
            changes=changes,
            tags=tuple(raw["tags"]),
        )
    except ValueError as exc:
        raise MalformedRecord(line_number, str(exc)) from exc


def parse_dump(stream: Iterable[str]) -> RepoSnapshot:
    """Parse a canonical dump into a validated snapshot.

    ``stream`` is any iterable of lines (an open text file works). Record
    order in the stream is irrelevant. Raises MalformedRecord with the
    offending line number, DanglingParent after the full read, and
    MissingHead when the declared head is absent.
    """
    lines = iter(stream)
    header_line = None
    line_number = 0
    for line in lines:
        line_number += 1
        if line.strip():
            header_line = line
            break
    _require(header_line is not None, 1, "missing header record")
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_number, f"invalid JSON: {exc}") from exc
    _require(isinstance(header, dict), line_number, "header must be an object")
    _require(header.get("format") == DUMP_FORMAT, line_number,
             f"format must be {DUMP_FORMAT!r}")
    _require(header.get("version") == DUMP_VERSION, line_number,
             f"unsupported version {header.get('version')!r}")
    _require(is_commit_hash(header.get("head")), line_number,
             "header head must be a 40-char lowercase hex hash")
    _require(isinstance(header.get("name"), str) and header["name"] != "",
             line_number, "header name must be a non-empty string")

    commits: dict[str, CommitRecord] = {}
    for line in lines:
        line_number += 1
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_number, f"invalid JSON: {exc}") from exc
        record = _parse_commit_line(raw, line_number)
        _require(record.hash not in commits, line_number,
                 f"duplicate commit hash {record.hash}")
        commits[record.hash] = record

    for record in commits.values():
        for p in record.parents:
            if p not in commits:
                raise DanglingParent(p)
    return RepoSnapshot(commits=commits, default_head=header["head"], name=header["name"])


def _commit_to_json(record: CommitRecord) -> dict:
    return {
        "hash": record.hash,
        "parents": list(record.parents),
        "author": record.author,
        "timestamp": record.timestamp,
        "message": record.message,
        "tags": list(record.tags),
        "changes": [
            {"path": c.path, "add": c.additions, "del": c.deletions}
            for c in record.changes
        ],
    }


def dump_snapshot(snapshot: RepoSnapshot, fp: IO[str]) -> None:
    """Serialize a snapshot in the canonical dump format.

    Commits are emitted sorted by (timestamp, hash) so the same snapshot
    always produces the same bytes.
    """
    header = {
        "format": DUMP_FORMAT,
        "version": DUMP_VERSION,
        "head": snapshot.default_head,
        "name": snapshot.name,
    }
    fp.write(json.dumps(header, ensure_ascii=False) + "\n")
    for record in sorted(snapshot.commits.values(), key=lambda r: (r.timestamp, r.hash)):
        fp.write(json.dumps(_commit_to_json(record), ensure_ascii=False) + "\n")


def load_dump(path: str | os.PathLike) -> RepoSnapshot:
    with open(path, encoding="utf-8") as fp:
        return parse_dump(fp)


# ---------------------------------------------------------------------------
# Live git adapter

def _git_executable() -> str:
    return os.environ.get("FRAGEX_GIT", "git")


def _run_git(repo_path: str, *args: str) -> str:
    cmd = [_git_executable(), "-C", repo_path, "-c", "core.quotepath=false", *args]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True,
                              encoding="utf-8", errors="replace")
    except FileNotFoundError as exc:
        raise GitInvocationFailed(127, f"git executable not found: {exc}") from exc
    if proc.returncode != 0:
        raise GitInvocationFailed(proc.returncode, proc.stderr)
    return proc.stdout


def _tags_by_commit(repo_path: str) -> dict[str, list[str]]:
    # %(*objectname) is the peeled target for annotated tags.
    out = _run_git(repo_path, "for-each-ref", "refs/tags",
                   "--format=%(objectname)%09%(*objectname)%09%(refname:short)")
    tags: dict[str, list[str]] = {}
    for line in out.splitlines():
        if not line:
            continue
        objectname, peeled, name = line.split("\t", 2)
        target = peeled or objectname
        tags.setdefault(target, []).append(name)
    for names in tags.values():
        names.sort()
    return tags


def _parse_numstat_block(block: str) -> tuple[FileChange, ...]:
    changes = []
    for line in block.splitlines():
        m = _NUMSTAT_RE.match(line)
        if not m:
            continue
        add = 0 if m.group(1) == "-" else int(m.group(1))
        dele = 0 if m.group(2) == "-" else int(m.group(2))
        changes.append(FileChange(path=m.group(3), additions=add, deletions=dele))
    return tuple(changes)


def extract_live(repo_path: str | os.PathLike) -> RepoSnapshot:
    """Read a git repository from disk into a snapshot.

    Equivalent to parsing the dump that ``fragex ingest`` would emit.
    First-parent order is preserved; annotated tags are peeled to the
    commits they point at; renames are not followed. Merge commits carry
    no file changes (raw numstat semantics).
    """
    repo_path = os.fspath(repo_path)
    if not os.path.isdir(repo_path):
        raise NotARepository(repo_path)
    probe = subprocess.run(
        [_git_executable(), "-C", repo_path, "rev-parse", "--git-dir"],
        capture_output=True, text=True)
    if probe.returncode != 0:
        raise NotARepository(repo_path)

    head = _run_git(repo_path, "rev-parse", "HEAD").strip()
    tags = _tags_by_commit(repo_path)

    log = _run_git(
        repo_path, "log", "--all", "--no-renames", "--numstat",
        "--format=%x1e%H%x1f%P%x1f%an%x1f%at%x1f%B%x1f")
    commits: dict[str, CommitRecord] = {}
    for chunk in log.split("\x1e"):
        if not chunk.strip():
            continue
        hash_, parents_str, author, timestamp, message, tail = chunk.split("\x1f")
        commits[hash_] = CommitRecord(
            hash=hash_,
            parents=tuple(parents_str.split()) if parents_str else (),
            author=author,
            timestamp=int(timestamp),
            message=message.rstrip("\n"),
            changes=_parse_numstat_block(tail),
            tags=tuple(tags.get(hash_, ())),
        )
    return RepoSnapshot(commits=commits, default_head=head,
                        name=os.path.basename(os.path.abspath(repo_path)))


def load_source(source: str | os.PathLike) -> RepoSnapshot:
    """Load either a canonical dump file or a live git repository."""
    if os.path.isdir(os.fspath(source)):
        return extract_live(source)
    return load_dump(source)
