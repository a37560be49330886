"""Scope selection: a contiguous stem interval picked by date, release or
index range, refined (but never shrunk) by author/keyword matching.

Interior nodes that fail the author/keyword refinement stay in the scope;
they are only left out of ``matched_nodes``. Topological neighbors are the
point of the exercise: they are where new fragments turn up.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

from .clustering import (
    Cluster,
    Dendrogram,
    SimilarityWeights,
    build_dendrogram,
    cut,
    granularity_to_k,
)
from .errors import EmptyScope, InvalidArgument, UnknownRelease
from .stem import StemNode, StemSequence


@dataclass(frozen=True)
class ScopeFilter:
    """At most one of the index / release / date ranges may be supplied;
    author and keyword sets are refinements on top of it."""

    date_from: int | None = None
    date_to: int | None = None
    release_from: str | None = None
    release_to: str | None = None
    authors: frozenset[str] = frozenset()
    keywords: frozenset[str] = frozenset()
    index_from: int | None = None
    index_to: int | None = None

    def __post_init__(self):
        sources = [
            self.index_from is not None or self.index_to is not None,
            self.release_from is not None or self.release_to is not None,
            self.date_from is not None or self.date_to is not None,
        ]
        if sum(sources) > 1:
            raise InvalidArgument(
                "supply at most one of index range, release range, date range")

    def canonical(self) -> dict:
        out: dict = {}
        for key in ("date_from", "date_to", "release_from", "release_to",
                    "index_from", "index_to"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.authors:
            out["authors"] = sorted(self.authors)
        if self.keywords:
            out["keywords"] = sorted(self.keywords)
        return out


@dataclass(frozen=True)
class Scope:
    """A materialized exploration range: immutable; recutting the clusters
    at another granularity yields a new Scope with the same id."""

    id: str
    node_range: tuple[int, int]
    clusters: tuple[Cluster, ...]
    granularity: float
    matched_nodes: frozenset[int]
    stem: StemSequence = field(repr=False)
    dendrogram: Dendrogram = field(repr=False)
    filter: ScopeFilter = field(repr=False, default_factory=ScopeFilter)

    def nodes(self) -> list[StemNode]:
        first, last = self.node_range
        return list(self.stem.nodes[first:last + 1])

    @property
    def commit_count(self) -> int:
        return sum(node.total_commits for node in self.nodes())

    def cluster_by_id(self, cluster_id: str) -> Cluster | None:
        for cluster in self.clusters:
            if cluster.id == cluster_id:
                return cluster
        return None


def _release_node_index(stem: StemSequence, tag: str) -> int:
    for node in stem.nodes:
        if any(tag in member.tags for member in node.members()):
            return node.index
    raise UnknownRelease(tag)


def _release_interval_start(stem: StemSequence, node_index: int) -> int:
    # A release names the interval (previous release boundary, its node].
    previous = [n.index for n in stem.nodes
                if n.release is not None and n.index < node_index]
    return previous[-1] + 1 if previous else 0


def _contiguity_interval(stem: StemSequence, flt: ScopeFilter) -> tuple[int, int]:
    n = len(stem.nodes)
    if flt.index_from is not None or flt.index_to is not None:
        first = max(0, flt.index_from if flt.index_from is not None else 0)
        last = min(n - 1, flt.index_to if flt.index_to is not None else n - 1)
        if first > last:
            raise EmptyScope("index range selects no stem nodes")
        return first, last
    if flt.release_from is not None or flt.release_to is not None:
        if flt.release_from is not None:
            from_node = _release_node_index(stem, flt.release_from)
            first = _release_interval_start(stem, from_node)
        else:
            first = 0
        last = (_release_node_index(stem, flt.release_to)
                if flt.release_to is not None else n - 1)
        if first > last:
            raise EmptyScope("release range selects no stem nodes")
        return first, last
    if flt.date_from is not None or flt.date_to is not None:
        passing = [
            node.index for node in stem.nodes
            if (flt.date_from is None or node.lead.timestamp >= flt.date_from)
            and (flt.date_to is None or node.lead.timestamp <= flt.date_to)
        ]
        if not passing:
            raise EmptyScope("date range selects no stem nodes")
        # Widen to the smallest contiguous interval covering every passing
        # node; clock skew can make the passing set itself non-contiguous.
        return min(passing), max(passing)
    return 0, n - 1


def _node_matches(node: StemNode, flt: ScopeFilter) -> bool:
    if flt.authors:
        if not any(member.author in flt.authors for member in node.members()):
            return False
    if flt.keywords:
        if not any(flt.keywords.intersection(member.keywords())
                   for member in node.members()):
            return False
    return True


def _scope_id(stem: StemSequence, flt: ScopeFilter,
              node_range: tuple[int, int]) -> str:
    payload = json.dumps({
        "repo": f"{stem.repo.name}:{stem.repo.default_head}",
        "filter": flt.canonical(),
        "node_range": list(node_range),
    }, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def resolve_scope(stem: StemSequence, flt: ScopeFilter, g: float,
                  weights: SimilarityWeights = SimilarityWeights()) -> Scope:
    """Materialize a scope: resolve the contiguity source to an interval,
    mark refinement matches, build the interval's dendrogram and cut it."""
    if not stem.nodes:
        raise EmptyScope("stem is empty")
    first, last = _contiguity_interval(stem, flt)
    matched = frozenset(
        index for index in range(first, last + 1)
        if _node_matches(stem.nodes[index], flt)
    )
    dendrogram = build_dendrogram(stem, weights,
                                  leaves=tuple(range(first, last + 1)))
    k = granularity_to_k(g, last - first + 1)
    clusters = tuple(cut(dendrogram, k, stem))
    return Scope(
        id=_scope_id(stem, flt, (first, last)),
        node_range=(first, last),
        clusters=clusters,
        granularity=g,
        matched_nodes=matched,
        stem=stem,
        dendrogram=dendrogram,
        filter=flt,
    )


def rescope(scope: Scope, g: float) -> Scope:
    """Recut an existing scope at a new granularity; the dendrogram is
    reused and the node range, matches and id never change."""
    first, last = scope.node_range
    k = granularity_to_k(g, last - first + 1)
    clusters = tuple(cut(scope.dendrogram, k, scope.stem))
    return replace(scope, clusters=clusters, granularity=g)
