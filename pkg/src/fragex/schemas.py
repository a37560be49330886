"""JSON schemas for every payload the service emits, published under
/schema/ so clients can validate bodies against a fixed contract."""

DIMENSION = {"type": "string", "enum": ["author", "keyword", "file", "directory"]}

_HASH = {"type": "string", "pattern": "^[0-9a-f]{40}$"}

_NODE_RANGE = {
    "type": "array", "items": {"type": "integer", "minimum": 0},
    "minItems": 2, "maxItems": 2,
}

_FRAGMENT = {
    "type": "object",
    "properties": {"dimension": DIMENSION, "value": {"type": "string", "minLength": 1}},
    "required": ["dimension", "value"],
    "additionalProperties": False,
}

_CLUSTER = {
    "type": "object",
    "properties": {
        "id": {"type": "string", "pattern": "^c[0-9]+-[0-9]+$"},
        "node_range": _NODE_RANGE,
        "commit_count": {"type": "integer", "minimum": 1},
    },
    "required": ["id", "node_range", "commit_count"],
    "additionalProperties": False,
}

_FREQUENCY_ENTRY = {
    "type": "object",
    "properties": {
        "value": {"type": "string"},
        "count": {"type": "integer", "minimum": 1},
        "loc": {"type": ["integer", "null"], "minimum": 0},
        "rank": {"type": "integer", "minimum": 1},
    },
    "required": ["value", "count", "loc", "rank"],
    "additionalProperties": False,
}

REPO = {
    "$id": "repo", "type": "object",
    "properties": {
        "repo_id": {"type": "string"},
        "name": {"type": "string"},
        "head": _HASH,
        "commit_count": {"type": "integer", "minimum": 1},
        "node_count": {"type": "integer", "minimum": 1},
    },
    "required": ["repo_id", "name", "head", "commit_count", "node_count"],
    "additionalProperties": False,
}

STEM = {
    "$id": "stem", "type": "object",
    "properties": {
        "repo_id": {"type": "string"},
        "name": {"type": "string"},
        "node_count": {"type": "integer", "minimum": 1},
        "commit_count": {"type": "integer", "minimum": 1},
        "unreachable_count": {"type": "integer", "minimum": 0},
        "date_range": {
            "type": "object",
            "properties": {"from": {"type": "integer"}, "to": {"type": "integer"}},
            "required": ["from", "to"],
            "additionalProperties": False,
        },
        "releases": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"index": {"type": "integer", "minimum": 0},
                               "tag": {"type": "string"}},
                "required": ["index", "tag"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["repo_id", "name", "node_count", "commit_count",
                 "unreachable_count", "date_range", "releases"],
    "additionalProperties": False,
}

SCOPE = {
    "$id": "scope", "type": "object",
    "properties": {
        "scope_id": {"type": "string"},
        "repo_id": {"type": "string"},
        "node_range": _NODE_RANGE,
        "granularity": {"type": "number", "minimum": 0, "maximum": 1},
        "commit_count": {"type": "integer", "minimum": 1},
        "matched_nodes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "clusters": {"type": "array", "items": _CLUSTER, "minItems": 1},
    },
    "required": ["scope_id", "repo_id", "node_range", "granularity",
                 "commit_count", "matched_nodes", "clusters"],
    "additionalProperties": False,
}

TABLE = {
    "$id": "table", "type": "object",
    "properties": {
        "scope_id": {"type": "string"},
        "k": {"type": "integer", "minimum": 1},
        "dimensions": {"type": "array", "items": DIMENSION, "minItems": 1},
        "columns": {
            "type": "array", "minItems": 2,
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "string"},
                    "node_range": _NODE_RANGE,
                    "commit_count": {"type": "integer", "minimum": 1},
                    "entries": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "array", "items": _FREQUENCY_ENTRY,
                        },
                    },
                },
                "required": ["id", "node_range", "commit_count", "entries"],
                "additionalProperties": False,
            },
        },
        "rank_links": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "dimension": DIMENSION,
                    "value": {"type": "string"},
                    "columns": {"type": "array", "items": {"type": "string"},
                                "minItems": 2, "maxItems": 2},
                    "ranks": {"type": "array",
                              "items": {"type": "integer", "minimum": 1},
                              "minItems": 2, "maxItems": 2},
                },
                "required": ["dimension", "value", "columns", "ranks"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["scope_id", "k", "dimensions", "columns", "rank_links"],
    "additionalProperties": False,
}

COMMITS = {
    "$id": "commits", "type": "object",
    "properties": {
        "cluster": {"type": "string"},
        "commits": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "hash": _HASH,
                    "author": {"type": "string"},
                    "timestamp": {"type": "integer", "minimum": 0},
                    "message": {"type": "string"},
                    "keywords": {"type": "array", "items": {"type": "string"}},
                    "files": {"type": "array", "items": {"type": "string"}},
                    "directories": {"type": "array", "items": {"type": "string"}},
                },
                "required": ["hash", "author", "timestamp", "message",
                             "keywords", "files", "directories"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["cluster", "commits"],
    "additionalProperties": False,
}

INSPECTION = {
    "$id": "inspection", "type": "object",
    "properties": {
        "scope_id": {"type": "string"},
        "fragments": {"type": "array", "items": _FRAGMENT, "minItems": 1},
        "clusters": {"type": "array", "items": {"type": "string"}},
        "grid": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "boolean"}},
        },
        "matched_sum": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    "required": ["scope_id", "fragments", "clusters", "grid", "matched_sum"],
    "additionalProperties": False,
}

HISTORY = {
    "$id": "history", "type": "object",
    "properties": {
        "fragment": _FRAGMENT,
        "occurrences": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "hash": _HASH,
                    "timestamp": {"type": "integer", "minimum": 0},
                    "stem_index": {"type": "integer", "minimum": 0},
                    "in_scope": {"type": "boolean"},
                },
                "required": ["hash", "timestamp", "stem_index", "in_scope"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["fragment", "occurrences"],
    "additionalProperties": False,
}

PINS = {
    "$id": "pins", "type": "object",
    "properties": {
        "repo": {"type": "string"},
        "version": {"type": "integer"},
        "pins": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "dimension": DIMENSION,
                    "value": {"type": "string"},
                    "pinned_at": {"type": "integer"},
                },
                "required": ["dimension", "value", "pinned_at"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["repo", "version", "pins"],
    "additionalProperties": False,
}

ERROR = {
    "$id": "error", "type": "object",
    "properties": {
        "status": {"type": "integer"},
        "code": {"type": "string"},
        "message": {"type": "string"},
    },
    "required": ["status", "code", "message"],
    "additionalProperties": False,
}

ALL = {
    "repo": REPO,
    "stem": STEM,
    "scope": SCOPE,
    "table": TABLE,
    "commits": COMMITS,
    "inspection": INSPECTION,
    "history": HISTORY,
    "pins": PINS,
    "error": ERROR,
}
