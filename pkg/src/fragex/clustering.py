"""Order-constrained clustering of stem nodes.

Only adjacent runs ever merge, so every cluster is a contiguous interval
of the stem. Run features are plain set unions recomputed after each
merge, which keeps the agglomeration exact and deterministic but makes
merge scores non-monotone; a cut therefore replays a merge count instead
of thresholding scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor

from .errors import InvalidArgument
from .stem import StemSequence


@dataclass(frozen=True)
class SimilarityWeights:
    """Weights of the file/author/keyword Jaccard terms; must sum to 1."""

    w_file: float = 0.5
    w_author: float = 0.25
    w_keyword: float = 0.25

    def __post_init__(self):
        if min(self.w_file, self.w_author, self.w_keyword) < 0:
            raise InvalidArgument("similarity weights must be non-negative")
        if abs(self.w_file + self.w_author + self.w_keyword - 1.0) > 1e-9:
            raise InvalidArgument("similarity weights must sum to 1")


@dataclass(frozen=True)
class FeatureSets:
    """Union of touched files, authors and keywords over a run of nodes."""

    files: frozenset[str]
    authors: frozenset[str]
    keywords: frozenset[str]

    def union(self, other: "FeatureSets") -> "FeatureSets":
        return FeatureSets(
            files=self.files | other.files,
            authors=self.authors | other.authors,
            keywords=self.keywords | other.keywords,
        )


@dataclass(frozen=True)
class Merge:
    """One agglomeration step joining two adjacent runs.

    Runs are (start, end) positions into the dendrogram's leaf list,
    inclusive; ``left`` ends where ``right`` begins.
    """

    left: tuple[int, int]
    right: tuple[int, int]
    score: float


@dataclass(frozen=True)
class Dendrogram:
    leaves: tuple[int, ...]  # stem-node indices, in stem order
    merges: tuple[Merge, ...]  # exactly len(leaves) - 1 entries


@dataclass(frozen=True)
class Cluster:
    """A contiguous run of stem nodes; node_range is inclusive and in
    stem indices."""

    id: str
    node_range: tuple[int, int]
    commit_count: int

    @property
    def first(self) -> int:
        return self.node_range[0]

    @property
    def last(self) -> int:
        return self.node_range[1]


def _cluster_id(first: int, last: int) -> str:
    return f"c{first}-{last}"


def node_features(node_range: tuple[int, int], stem: StemSequence) -> FeatureSets:
    """Feature sets of the inclusive stem interval: unions over all member
    commits, leads and squashed alike."""
    first, last = node_range
    files: set[str] = set()
    authors: set[str] = set()
    keywords: set[str] = set()
    for node in stem.nodes[first:last + 1]:
        for commit in node.members():
            files.update(c.path for c in commit.changes)
            authors.add(commit.author)
            keywords.update(commit.keywords())
    return FeatureSets(frozenset(files), frozenset(authors), frozenset(keywords))


def _jaccard(a: frozenset, b: frozenset) -> float:
    # J(empty, empty) = 1: two runs both lacking a dimension are not
    # penalized on it.
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union


def similarity(a: FeatureSets, b: FeatureSets,
               w: SimilarityWeights = SimilarityWeights()) -> float:
    """Weighted Jaccard similarity in [0, 1]."""
    return (w.w_file * _jaccard(a.files, b.files)
            + w.w_author * _jaccard(a.authors, b.authors)
            + w.w_keyword * _jaccard(a.keywords, b.keywords))


def build_dendrogram(stem: StemSequence,
                     w: SimilarityWeights = SimilarityWeights(),
                     leaves: tuple[int, ...] | None = None) -> Dendrogram:
    """Agglomerate adjacent runs until one remains.

    Each round merges the adjacent pair with the greatest similarity
    (ties break toward the smaller left index), unions the features and
    recomputes the two affected pair scores. ``leaves`` restricts the
    dendrogram to a contiguous subset of stem indices (used by scopes);
    it defaults to the whole stem.
    """
    if leaves is None:
        leaves = tuple(range(len(stem.nodes)))
    if not leaves:
        raise InvalidArgument("cannot build a dendrogram over zero nodes")

    # runs[i] = (start, end) in leaf positions; features[i] matches runs[i]
    runs: list[tuple[int, int]] = [(i, i) for i in range(len(leaves))]
    features: list[FeatureSets] = [
        node_features((stem_index, stem_index), stem) for stem_index in leaves
    ]
    scores: list[float] = [
        similarity(features[i], features[i + 1], w) for i in range(len(runs) - 1)
    ]
    merges: list[Merge] = []
    while len(runs) > 1:
        best = 0
        for i in range(1, len(scores)):
            if scores[i] > scores[best]:
                best = i
        merges.append(Merge(left=runs[best], right=runs[best + 1], score=scores[best]))
        runs[best] = (runs[best][0], runs[best + 1][1])
        features[best] = features[best].union(features[best + 1])
        del runs[best + 1], features[best + 1], scores[best]
        if best > 0:
            scores[best - 1] = similarity(features[best - 1], features[best], w)
        if best < len(scores):
            scores[best] = similarity(features[best], features[best + 1], w)
    return Dendrogram(leaves=tuple(leaves), merges=tuple(merges))


def cut(dendrogram: Dendrogram, k: int, stem: StemSequence) -> list[Cluster]:
    """Replay merges until exactly min(k, n) runs remain; clusters come
    back in stem order with stem-index ranges."""
    if k < 1:
        raise InvalidArgument("cluster count must be >= 1")
    n = len(dendrogram.leaves)
    target = min(k, n)
    runs: list[tuple[int, int]] = [(i, i) for i in range(n)]
    for merge in dendrogram.merges[: n - target]:
        pos = runs.index(merge.left)
        runs[pos] = (merge.left[0], merge.right[1])
        del runs[pos + 1]
    return [_make_cluster(dendrogram.leaves[a], dendrogram.leaves[b], stem)
            for a, b in runs]


def _make_cluster(first: int, last: int, stem: StemSequence) -> Cluster:
    count = sum(node.total_commits for node in stem.nodes[first:last + 1])
    return Cluster(id=_cluster_id(first, last), node_range=(first, last),
                   commit_count=count)


def cluster_by_release(stem: StemSequence) -> list[Cluster]:
    """Split the stem after every node carrying a release; trailing
    unreleased nodes form the final cluster."""
    if not stem.nodes:
        raise InvalidArgument("cannot cluster an empty stem")
    clusters = []
    start = 0
    for node in stem.nodes:
        if node.release is not None:
            clusters.append(_make_cluster(start, node.index, stem))
            start = node.index + 1
    if start < len(stem.nodes):
        clusters.append(_make_cluster(start, len(stem.nodes) - 1, stem))
    return clusters


def granularity_to_k(g: float, n: int) -> int:
    """Map the slider value g in [0, 1] to a cluster count: max(1, round(n^g)).

    The power curve spreads useful cluster counts evenly for long stems;
    g = 0 gives one cluster, g = 1 gives n.
    """
    if not 0.0 <= g <= 1.0:
        raise InvalidArgument("granularity must be within [0, 1]")
    if n < 1:
        raise InvalidArgument("stem length must be >= 1")
    return max(1, int(floor(n ** g + 0.5)))
