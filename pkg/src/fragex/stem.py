"""The stem: the first-parent main line of the default branch, with
side-branch commits squashed into the merge commit that brought them in.

Walking oldest to newest, a merge node claims every commit reachable from
its non-first parents that no earlier node has claimed. Because the nodes
0..i-1 together cover exactly the commits reachable from lead i-1 (the
merge's first parent), "not yet claimed" and "not reachable from the first
parent" select the same commits; the claimed set also makes the partition
robust under criss-cross merges, where first claim wins.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import CycleDetected
from .ingest import CommitRecord, RepoSnapshot


@dataclass(frozen=True)
class StemNode:
    """One unit on the stem: a lead commit plus any squashed side commits."""

    lead: CommitRecord
    squashed: tuple[CommitRecord, ...]
    index: int
    release: str | None = None

    @property
    def total_commits(self) -> int:
        return 1 + len(self.squashed)

    def members(self) -> list[CommitRecord]:
        """Lead first, then squashed ascending by timestamp."""
        return [self.lead, *self.squashed]


@dataclass(frozen=True)
class StemSequence:
    """Stem nodes ordered oldest to newest; indices, not timestamps,
    define the order (clock skew is tolerated)."""

    nodes: tuple[StemNode, ...]
    repo: RepoSnapshot
    unreachable: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def total_commits(self) -> int:
        return sum(node.total_commits for node in self.nodes)

    @property
    def unreachable_count(self) -> int:
        return len(self.unreachable)


def _first_parent_chain(repo: RepoSnapshot) -> list[str]:
    chain = []
    seen = set()
    cursor: str | None = repo.default_head
    while cursor is not None:
        if cursor in seen:
            raise CycleDetected(f"first-parent chain revisits {cursor}")
        seen.add(cursor)
        chain.append(cursor)
        parents = repo.commits[cursor].parents
        cursor = parents[0] if parents else None
    chain.reverse()
    return chain


def build_stem(repo: RepoSnapshot) -> StemSequence:
    """Partition the commits reachable from the default head into stem nodes.

    Commits unreachable from the default head are excluded and reported on
    the sequence's ``unreachable`` field.
    """
    chain = _first_parent_chain(repo)
    claimed: set[str] = set(chain)
    nodes: list[StemNode] = []
    for index, lead_hash in enumerate(chain):
        lead = repo.commits[lead_hash]
        squashed: list[CommitRecord] = []
        if len(lead.parents) > 1:
            stack = [p for p in lead.parents[1:] if p not in claimed]
            while stack:
                h = stack.pop()
                if h in claimed:
                    continue
                claimed.add(h)
                commit = repo.commits[h]
                squashed.append(commit)
                stack.extend(p for p in commit.parents if p not in claimed)
        squashed.sort(key=lambda c: (c.timestamp, c.hash))
        nodes.append(StemNode(lead=lead, squashed=tuple(squashed), index=index))
    unreachable = tuple(sorted(set(repo.commits) - claimed))
    return StemSequence(nodes=tuple(nodes), repo=repo, unreachable=unreachable)


def annotate_releases(stem: StemSequence) -> StemSequence:
    """Mark each node carrying a tagged member with its release name.

    When several members are tagged, the lexicographically greatest tag
    wins; unreleased nodes keep ``release = None``.
    """
    nodes = []
    for node in stem.nodes:
        tags = [t for member in node.members() for t in member.tags]
        release = max(tags) if tags else None
        nodes.append(replace(node, release=release))
    return replace(stem, nodes=tuple(nodes))


# Caching envelope: the stem can be stored next to its snapshot as NDJSON
# records of type "stem-node" and rebuilt without re-walking the graph.

def stem_records(stem: StemSequence) -> list[dict]:
    return [
        {
            "type": "stem-node",
            "index": node.index,
            "lead": node.lead.hash,
            "squashed": [c.hash for c in node.squashed],
            "release": node.release,
        }
        for node in stem.nodes
    ]


def stem_from_records(records: list[dict], repo: RepoSnapshot) -> StemSequence:
    nodes = tuple(
        StemNode(
            lead=repo.commits[r["lead"]],
            squashed=tuple(repo.commits[h] for h in r["squashed"]),
            index=r["index"],
            release=r.get("release"),
        )
        for r in sorted(records, key=lambda r: r["index"])
    )
    claimed = {c.hash for node in nodes for c in node.members()}
    unreachable = tuple(sorted(set(repo.commits) - claimed))
    return StemSequence(nodes=nodes, repo=repo, unreachable=unreachable)
