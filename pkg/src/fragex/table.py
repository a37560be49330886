"""The dimension value table: scope-wide and per-cluster top-k frequent
values for each dimension, with LOC for files and directories, plus links
between columns where a value appears in both top-k lists.

Counts are commit-presence counts: a commit contributes at most 1 to a
value's count no matter how many of its file changes touch the value.
LOC, by contrast, sums every matching change; count measures breadth,
LOC measures volume, and the two travel as separate fields so renderers
can give them distinct channels.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .clustering import Cluster
from .errors import InvalidArgument
from .ingest import CommitRecord, derive_directories
from .scope import Scope
from .stem import StemSequence

DEFAULT_TOP_K = 5


class Dimension(str, Enum):
    AUTHOR = "author"
    KEYWORD = "keyword"
    FILE = "file"
    DIRECTORY = "directory"

    @classmethod
    def parse(cls, name: str) -> "Dimension":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise InvalidArgument(f"unknown dimension {name!r}") from None


ALL_DIMENSIONS = (Dimension.AUTHOR, Dimension.KEYWORD, Dimension.FILE,
                  Dimension.DIRECTORY)

SCOPE_COLUMN_ID = "scope"


@dataclass(frozen=True)
class FrequencyEntry:
    value: str
    count: int
    loc: int | None
    rank: int


@dataclass(frozen=True)
class RankLink:
    """A value present in the top-k of two columns, with its rank in each."""

    dimension: Dimension
    value: str
    columns: tuple[str, str]
    ranks: tuple[int, int]


@dataclass(frozen=True)
class DimensionValueTable:
    scope_column: dict[Dimension, list[FrequencyEntry]]
    cluster_columns: dict[str, dict[Dimension, list[FrequencyEntry]]]
    rank_links: tuple[RankLink, ...]
    k: int
    dimensions: tuple[Dimension, ...]


def full_frequency(commits: Iterable[CommitRecord],
                   dim: Dimension) -> dict[str, tuple[int, int | None]]:
    """Complete value -> (count, loc) map over a commit set.

    count(v) is the number of distinct commits containing v; a commit
    touching a directory through many files still counts once. loc is the
    summed additions+deletions of matching file changes for FILE and
    DIRECTORY, and None for AUTHOR and KEYWORD.
    """
    counts: dict[str, int] = {}
    locs: dict[str, int] = {}
    for commit in commits:
        if dim is Dimension.AUTHOR:
            present = [commit.author]
        elif dim is Dimension.KEYWORD:
            present = commit.keywords()
        elif dim is Dimension.FILE:
            present = []
            seen: set[str] = set()
            for change in commit.changes:
                locs[change.path] = locs.get(change.path, 0) + change.loc
                if change.path not in seen:
                    seen.add(change.path)
                    present.append(change.path)
        else:
            present = []
            seen = set()
            for change in commit.changes:
                for directory in derive_directories(change.path):
                    locs[directory] = locs.get(directory, 0) + change.loc
                    if directory not in seen:
                        seen.add(directory)
                        present.append(directory)
        for value in present:
            counts[value] = counts.get(value, 0) + 1
    if dim in (Dimension.FILE, Dimension.DIRECTORY):
        return {v: (c, locs[v]) for v, c in counts.items()}
    return {v: (c, None) for v, c in counts.items()}


def top_k(freq: dict[str, tuple[int, int | None]],
          k: int = DEFAULT_TOP_K) -> list[FrequencyEntry]:
    """Rank by count desc, then loc desc (absent loc counts as 0), then
    value ascending; truncate to k."""
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    ordered = sorted(freq.items(),
                     key=lambda item: (-item[1][0], -(item[1][1] or 0), item[0]))
    return [
        FrequencyEntry(value=value, count=count, loc=loc, rank=rank)
        for rank, (value, (count, loc)) in enumerate(ordered[:k], start=1)
    ]


def _column(commits: list[CommitRecord], dims: tuple[Dimension, ...],
            k: int) -> dict[Dimension, list[FrequencyEntry]]:
    return {dim: top_k(full_frequency(commits, dim), k) for dim in dims}


def _links_between(left_id: str, left: dict[Dimension, list[FrequencyEntry]],
                   right_id: str, right: dict[Dimension, list[FrequencyEntry]],
                   dims: tuple[Dimension, ...]) -> list[RankLink]:
    links = []
    for dim in dims:
        right_ranks = {entry.value: entry.rank for entry in right[dim]}
        for entry in left[dim]:
            if entry.value in right_ranks:
                links.append(RankLink(
                    dimension=dim, value=entry.value,
                    columns=(left_id, right_id),
                    ranks=(entry.rank, right_ranks[entry.value]),
                ))
    return links


def cluster_commits(cluster: Cluster, stem: StemSequence) -> list[CommitRecord]:
    """All member commits of a cluster: stem order, lead first then
    squashed ascending by timestamp within each node."""
    first, last = cluster.node_range
    out: list[CommitRecord] = []
    for node in stem.nodes[first:last + 1]:
        out.extend(node.members())
    return out


def build_table(scope: Scope, k: int = DEFAULT_TOP_K,
                dims: tuple[Dimension, ...] | None = None) -> DimensionValueTable:
    """Compute the table for a materialized scope.

    The scope column aggregates every commit in the node range; one more
    column per cluster. Links join the scope column with each cluster and
    each adjacent cluster pair, one link per value present in both
    columns' top-k. ``dims`` drops whole dimension rows when given.
    """
    dims = tuple(dims) if dims is not None else ALL_DIMENSIONS
    if not dims:
        raise InvalidArgument("dimension filter must keep at least one dimension")
    scope_commits = [c for node in scope.nodes() for c in node.members()]
    scope_column = _column(scope_commits, dims, k)
    cluster_columns: dict[str, dict[Dimension, list[FrequencyEntry]]] = {}
    for cluster in scope.clusters:
        cluster_columns[cluster.id] = _column(
            cluster_commits(cluster, scope.stem), dims, k)

    links: list[RankLink] = []
    for cluster in scope.clusters:
        links.extend(_links_between(SCOPE_COLUMN_ID, scope_column,
                                    cluster.id, cluster_columns[cluster.id], dims))
    for left, right in zip(scope.clusters, scope.clusters[1:]):
        links.extend(_links_between(left.id, cluster_columns[left.id],
                                    right.id, cluster_columns[right.id], dims))

    table = DimensionValueTable(
        scope_column=scope_column,
        cluster_columns=cluster_columns,
        rank_links=tuple(links),
        k=k,
        dimensions=dims,
    )
    if k == DEFAULT_TOP_K:
        # Brightness contract consumed by renderers: rank is the
        # brightness level, and there are exactly five levels.
        for column in (scope_column, *cluster_columns.values()):
            for entries in column.values():
                assert all(1 <= e.rank <= 5 for e in entries)
    return table


def commit_details(cluster: Cluster, stem: StemSequence) -> list[dict]:
    """Ordered commit list with the per-commit dimension values a reader
    needs to turn any cell of the detail view into a fragment."""
    return [
        {
            "hash": commit.hash,
            "author": commit.author,
            "timestamp": commit.timestamp,
            "message": commit.message,
            "keywords": commit.keywords(),
            "files": _unique(commit.paths()),
            "directories": commit.directories(),
        }
        for commit in cluster_commits(cluster, stem)
    ]


def _unique(values: list[str]) -> list[str]:
    seen: set[str] = set()
    out = []
    for v in values:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# Serialization

def _entries_payload(entries: list[FrequencyEntry]) -> list[dict]:
    return [
        {"value": e.value, "count": e.count, "loc": e.loc, "rank": e.rank}
        for e in entries
    ]


def table_payload(table: DimensionValueTable, scope: Scope) -> dict:
    """JSON-ready table representation, consumed by the UI and the CLI."""
    return {
        "scope_id": scope.id,
        "k": table.k,
        "dimensions": [d.value for d in table.dimensions],
        "columns": [
            {
                "id": SCOPE_COLUMN_ID,
                "node_range": list(scope.node_range),
                "commit_count": scope.commit_count,
                "entries": {d.value: _entries_payload(table.scope_column[d])
                            for d in table.dimensions},
            },
            *[
                {
                    "id": cluster.id,
                    "node_range": list(cluster.node_range),
                    "commit_count": cluster.commit_count,
                    "entries": {
                        d.value: _entries_payload(table.cluster_columns[cluster.id][d])
                        for d in table.dimensions
                    },
                }
                for cluster in scope.clusters
            ],
        ],
        "rank_links": [
            {
                "dimension": link.dimension.value,
                "value": link.value,
                "columns": list(link.columns),
                "ranks": list(link.ranks),
            }
            for link in table.rank_links
        ],
    }


def table_to_csv(table: DimensionValueTable, scope: Scope) -> str:
    """Flatten to (column-id, dimension, rank, value, count, loc) rows.

    RFC 4180 quoting with LF line endings; byte-identical for identical
    inputs, which is what the golden tests pin down.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["column", "dimension", "rank", "value", "count", "loc"])
    columns: list[tuple[str, dict[Dimension, list[FrequencyEntry]]]] = [
        (SCOPE_COLUMN_ID, table.scope_column)
    ]
    columns.extend((c.id, table.cluster_columns[c.id]) for c in scope.clusters)
    for column_id, column in columns:
        for dim in table.dimensions:
            for entry in column[dim]:
                writer.writerow([
                    column_id, dim.value, entry.rank, entry.value, entry.count,
                    "" if entry.loc is None else entry.loc,
                ])
    return buffer.getvalue()
