import io
import json

import pytest
from hypothesis import given, strategies as st

import oracle
from fragex import (
    derive_directories,
    dump_snapshot,
    parse_dump,
    tokenize_keywords,
)
from fragex.errors import (
    CycleDetected,
    DanglingParent,
    MalformedRecord,
    MissingHead,
)
from fragex.ingest import STOPWORDS
from conftest import fixture_path
from helpers import chain, commit, dump_text, fake_hash, snapshot


def parse_text(text):
    return parse_dump(io.StringIO(text))


class TestParseDump:
    def test_header_only_stream_is_missing_head(self):
        header = json.dumps({"format": "fragex-dump", "version": 1,
                             "head": fake_hash("h"), "name": "x"})
        with pytest.raises(MissingHead):
            parse_text(header + "\n")

    def test_single_root_commit(self):
        snap = snapshot([commit("c0")], "c0")
        assert len(snap) == 1
        assert snap.commits[snap.default_head].parents == ()

    def test_tiny3_fixture(self):
        with open(fixture_path("tiny3")) as fp:
            snap = parse_dump(fp)
        assert len(snap) == 3
        # independent re-parse and count
        header, raw = oracle.load_raw_dump(fixture_path("tiny3"))
        assert len(raw) == 3
        assert snap.default_head == header["head"]
        newest = max(raw.values(), key=lambda r: r["timestamp"])
        assert snap.default_head == newest["hash"]

    def test_completely_empty_stream(self):
        with pytest.raises(MalformedRecord) as err:
            parse_text("")
        assert err.value.line_number == 1

    def test_record_order_is_irrelevant(self):
        records = chain(["a", "b", "c"])
        forward = snapshot(records, "c")
        backward = snapshot(list(reversed(records)), "c")
        assert forward.commits == backward.commits

    @pytest.mark.parametrize("mutate, field", [
        (lambda r: r.update(hash="XYZ"), "hash"),
        (lambda r: r.update(hash="f" * 39), "hash"),
        (lambda r: r.update(timestamp=-5), "timestamp"),
        (lambda r: r.update(timestamp="soon"), "timestamp"),
        (lambda r: r.update(author=""), "author"),
        (lambda r: r.pop("message"), "message"),
        (lambda r: r.update(changes=[{"path": "/abs", "add": 1, "del": 0}]), "path"),
        (lambda r: r.update(changes=[{"path": "a/../b", "add": 1, "del": 0}]), "path"),
        (lambda r: r.update(changes=[{"path": "a", "add": -1, "del": 0}]), "add"),
        (lambda r: r.update(tags=[7]), "tags"),
    ])
    def test_malformed_record_reports_line(self, mutate, field):
        record = commit("c0")
        mutate(record)
        with pytest.raises(MalformedRecord) as err:
            parse_text(dump_text([record], "c0"))
        assert err.value.line_number == 2

    def test_invalid_json_line(self):
        text = dump_text([commit("c0")], "c0") + "{not json\n"
        with pytest.raises(MalformedRecord) as err:
            parse_text(text)
        assert err.value.line_number == 3

    def test_duplicate_hash(self):
        record = commit("c0")
        with pytest.raises(MalformedRecord):
            parse_text(dump_text([record, dict(record)], "c0"))

    def test_dangling_parent(self):
        record = commit("c1", parents=["ghost"])
        with pytest.raises(DanglingParent):
            parse_text(dump_text([record], "c1"))

    def test_cycle_rejected(self):
        a = commit("a", parents=["b"])
        b = commit("b", parents=["a"])
        with pytest.raises(CycleDetected):
            parse_text(dump_text([a, b], "a"))

    def test_binary_change_zero_zero_accepted(self):
        snap = snapshot([commit("c0", changes=[("logo.png", 0, 0)])], "c0")
        change = snap.commits[snap.default_head].changes[0]
        assert (change.additions, change.deletions) == (0, 0)


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["tiny3", "fx_branchy", "fx_large"])
    def test_dump_parse_identity(self, name, snapshots):
        snap = snapshots[name]
        buffer = io.StringIO()
        dump_snapshot(snap, buffer)
        again = parse_text(buffer.getvalue())
        assert again.commits == snap.commits
        assert again.default_head == snap.default_head
        assert again.name == snap.name

    def test_dump_is_deterministic(self, snapshots):
        one, two = io.StringIO(), io.StringIO()
        dump_snapshot(snapshots["fx_branchy"], one)
        dump_snapshot(snapshots["fx_branchy"], two)
        assert one.getvalue() == two.getvalue()


REAL_WORLD_MESSAGES = [
    "Fix NPE in URL parser, fix #42",
    "Merge pull request #101 from team/feature-branch",
    "Add support for nested config files",
    "Revert \"Remove legacy API endpoints\" (breaks prod)",
    "WIP: refactor the table renderer into smaller pieces",
    "chore(deps): bump lodash from 4.17.20 to 4.17.21",
    "Update README.md",
    "fix typo in error message; also fixes the CI flake",
    "[BACKPORT] handle empty commit messages gracefully, see JIRA-1234",
    "Initial commit",
    "performance: cache the similarity matrix between runs (30% faster)",
    "Don't crash when the repo has no tags at all",
    "feat: granularity slider for cluster view",
    "Release v2.0.1",
    "s/colour/color/g across the docs",
    "Fixes crash on empty input. This was reported by 3 users.",
    "tests: stop depending on wall-clock time in history tests",
    "Rework the directory aggregation so LOC sums are per-prefix",
    "merge branch 'hotfix/2021-03' into main",
    "Remove unused imports flagged by the linter",
]


class TestTokenizeKeywords:
    def test_empty(self):
        assert tokenize_keywords("") == []

    def test_spec_example(self):
        assert tokenize_keywords("Fix NPE in URL parser, fix #42") == \
            ["fix", "npe", "url", "parser"]

    @pytest.mark.parametrize("message", REAL_WORLD_MESSAGES)
    def test_matches_reference_tokenizer(self, message):
        assert tokenize_keywords(message) == oracle.tokenize(message)

    @given(st.text(max_size=200))
    def test_token_invariants(self, message):
        tokens = tokenize_keywords(message)
        for token in tokens:
            assert len(token) >= 3
            assert token == token.lower()
            assert token not in STOPWORDS
            assert not token.isdigit()
        assert len(set(tokens)) == len(tokens)

    @given(st.text(max_size=200))
    def test_agrees_with_reference_on_arbitrary_text(self, message):
        assert tokenize_keywords(message) == oracle.tokenize(message)


_segment = st.text(
    alphabet=st.characters(codec="utf-8", exclude_characters="/\x00"),
    min_size=1, max_size=8,
).filter(lambda s: s not in (".", ".."))


class TestDeriveDirectories:
    @pytest.mark.parametrize("path, expected", [
        ("README.md", ["/"]),
        ("a/b/c.rs", ["a/b", "a", "/"]),
        ("x/y/z/w/file", ["x/y/z/w", "x/y/z", "x/y", "x", "/"]),
    ])
    def test_examples(self, path, expected):
        assert derive_directories(path) == expected

    @given(st.lists(_segment, min_size=1, max_size=6))
    def test_entry_count_matches_separator_count(self, segments):
        path = "/".join(segments)
        result = derive_directories(path)
        assert len(result) == path.count("/") + 1
        assert result[-1] == "/"
        assert derive_directories(path) == oracle.directories(path)
