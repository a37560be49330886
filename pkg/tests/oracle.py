"""Independent brute-force reference implementations.

Everything here works on raw dump records (plain dicts from json.loads)
and deliberately shares no code with the fragex package: set differences
are recomputed from scratch, tokenization is a character loop, the
dendrogram oracle re-scores every adjacent pair every round, and the CSV
writer quotes by hand. Slow and obvious beats fast and shared.
"""

import json

STOPWORDS = {
    "the", "a", "an", "and", "or", "of", "in", "on", "to", "for", "is",
    "this", "that", "with", "from", "into", "are", "was", "were",
}


def load_raw_dump(path):
    """(header, {hash: raw record}) straight from the NDJSON file."""
    with open(path, encoding="utf-8") as fp:
        lines = [line for line in fp if line.strip()]
    header = json.loads(lines[0])
    commits = {}
    for line in lines[1:]:
        record = json.loads(line)
        commits[record["hash"]] = record
    return header, commits


# ---------------------------------------------------------------------------
# Graph walking

def reachable(commits, start_hashes):
    """Every commit reachable from the given hashes, start included."""
    seen = set()
    frontier = list(start_hashes)
    while frontier:
        h = frontier.pop()
        if h in seen:
            continue
        seen.add(h)
        frontier.extend(commits[h]["parents"])
    return seen


def first_parent_chain(commits, head):
    chain = []
    cursor = head
    while cursor is not None:
        chain.append(cursor)
        parents = commits[cursor]["parents"]
        cursor = parents[0] if parents else None
    chain.reverse()
    return chain


def stem_groups(commits, head):
    """Stem partition computed literally from the definition: for every
    merge lead, squashed = reachable(side parents) - reachable(first
    parent), first claim wins walking oldest to newest."""
    chain = first_parent_chain(commits, head)
    claimed = set(chain)
    groups = []
    for lead in chain:
        parents = commits[lead]["parents"]
        squashed = set()
        if len(parents) > 1:
            squashed = reachable(commits, parents[1:]) - reachable(commits, parents[:1])
            squashed -= claimed
            claimed |= squashed
        ordered = sorted(squashed,
                         key=lambda h: (commits[h]["timestamp"], h))
        groups.append({"lead": lead, "squashed": ordered})
    return groups


def group_members(group, commits):
    return [commits[group["lead"]]] + [commits[h] for h in group["squashed"]]


# ---------------------------------------------------------------------------
# Dimension values

def tokenize(message):
    tokens = []
    current = []
    for ch in message.lower():
        if ch.isalnum():
            current.append(ch)
        else:
            if current:
                tokens.append("".join(current))
                current = []
    if current:
        tokens.append("".join(current))
    kept = []
    for token in tokens:
        if len(token) < 3:
            continue
        if all(ch.isdigit() for ch in token):
            continue
        if token in STOPWORDS:
            continue
        if token not in kept:
            kept.append(token)
    return kept


def directories(path):
    prefixes = []
    accumulated = None
    for segment in path.split("/")[:-1]:
        accumulated = segment if accumulated is None else accumulated + "/" + segment
        prefixes.append(accumulated)
    return list(reversed(prefixes)) + ["/"]


def frequency(raw_commits, dimension):
    """value -> (count, loc or None); the brute-force recount."""
    counts = {}
    locs = {}
    for record in raw_commits:
        if dimension == "author":
            values = {record["author"]}
        elif dimension == "keyword":
            values = set(tokenize(record["message"]))
        elif dimension == "file":
            values = set()
            for change in record["changes"]:
                values.add(change["path"])
                locs[change["path"]] = locs.get(change["path"], 0) \
                    + change["add"] + change["del"]
        elif dimension == "directory":
            values = set()
            for change in record["changes"]:
                for d in directories(change["path"]):
                    values.add(d)
                    locs[d] = locs.get(d, 0) + change["add"] + change["del"]
        else:
            raise ValueError(dimension)
        for value in values:
            counts[value] = counts.get(value, 0) + 1
    if dimension in ("file", "directory"):
        return {v: (c, locs[v]) for v, c in counts.items()}
    return {v: (c, None) for v, c in counts.items()}


def topk(freq, k):
    """[(value, count, loc, rank)] sorted by count desc, loc desc, value asc."""
    def key(item):
        value, (count, loc) = item
        return (-count, -(loc if loc is not None else 0), value)
    ranked = sorted(freq.items(), key=key)[:k]
    return [(value, count, loc, rank)
            for rank, (value, (count, loc)) in enumerate(ranked, start=1)]


# ---------------------------------------------------------------------------
# Clustering

def features_of(raw_commits):
    files, authors, keywords = set(), set(), set()
    for record in raw_commits:
        authors.add(record["author"])
        keywords.update(tokenize(record["message"]))
        files.update(change["path"] for change in record["changes"])
    return files, authors, keywords


def jaccard(a, b):
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def similarity(fa, fb, weights=(0.5, 0.25, 0.25)):
    return sum(w * jaccard(x, y) for w, x, y in zip(weights, fa, fb))


def merge_order(groups, commits, weights=(0.5, 0.25, 0.25)):
    """Full agglomeration replay, re-scoring every adjacent pair from
    scratch each round. Returns [(left_positions, right_positions, score)]
    where positions are leaf indices."""
    runs = [[i] for i in range(len(groups))]

    def run_features(run):
        members = []
        for position in run:
            members.extend(group_members(groups[position], commits))
        return features_of(members)

    merges = []
    while len(runs) > 1:
        scores = [
            similarity(run_features(runs[i]), run_features(runs[i + 1]), weights)
            for i in range(len(runs) - 1)
        ]
        best = 0
        for i in range(1, len(scores)):
            if scores[i] > scores[best]:
                best = i
        merges.append((list(runs[best]), list(runs[best + 1]), scores[best]))
        runs[best] = runs[best] + runs[best + 1]
        del runs[best + 1]
    return merges


def cut_ranges(n, merges, k):
    """Leaf-position ranges after replaying merges down to min(k, n) runs."""
    runs = [[i] for i in range(n)]
    for left, right, _score in merges[: n - min(k, n)]:
        position = runs.index(left)
        runs[position] = left + right
        del runs[position + 1]
    return [(run[0], run[-1]) for run in runs]


def granularity_to_k(g, n):
    import math
    return max(1, int(math.floor(n ** g + 0.5)))


# ---------------------------------------------------------------------------
# CSV

def csv_field(value):
    text = str(value)
    if any(ch in text for ch in ",\"\r\n"):
        return '"' + text.replace('"', '""') + '"'
    return text


def csv_text(rows):
    return "".join(",".join(csv_field(field) for field in row) + "\n"
                   for row in rows)
