"""Small builders for hand-made repository fixtures.

Snapshots are always constructed by serializing raw records to dump text
and running them through the real parser, so every test input also
exercises the ingest validation path.
"""

import hashlib
import io
import json

from fragex import parse_dump

_counter = 0


def fake_hash(label) -> str:
    return hashlib.sha1(f"fragex-test:{label}".encode()).hexdigest()


def commit(label, parents=(), author="kim", timestamp=None, message="",
           changes=(), tags=()):
    """Raw dump record. ``changes`` is a list of (path, add, del) tuples;
    parents are labels, not hashes."""
    global _counter
    _counter += 1
    return {
        "hash": fake_hash(label),
        "parents": [fake_hash(p) for p in parents],
        "author": author,
        "timestamp": _counter * 1000 if timestamp is None else timestamp,
        "message": message,
        "tags": list(tags),
        "changes": [{"path": p, "add": a, "del": d} for p, a, d in changes],
    }


def dump_text(records, head_label, name="testrepo"):
    header = {"format": "fragex-dump", "version": 1,
              "head": fake_hash(head_label), "name": name}
    lines = [json.dumps(header)]
    lines.extend(json.dumps(r) for r in records)
    return "\n".join(lines) + "\n"


def snapshot(records, head_label, name="testrepo"):
    return parse_dump(io.StringIO(dump_text(records, head_label, name)))


def chain(labels, **kwargs):
    """Linear chain of commits, oldest first."""
    records = []
    previous = None
    for label in labels:
        records.append(commit(label, parents=(previous,) if previous else (),
                              **kwargs))
        previous = label
    return records
