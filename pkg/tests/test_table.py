import pytest

import oracle
from conftest import fixture_path
from fragex import (
    Dimension,
    ScopeFilter,
    build_stem,
    build_table,
    commit_details,
    full_frequency,
    resolve_scope,
    table_to_csv,
    top_k,
)
from fragex.errors import InvalidArgument
from fragex.table import SCOPE_COLUMN_ID, cluster_commits, table_payload
from helpers import chain, commit, snapshot

ALL_DIMS = ["author", "keyword", "file", "directory"]


def scope_of(stem, g=0.5, flt=None):
    return resolve_scope(stem, flt or ScopeFilter(), g)


class TestFullFrequency:
    def test_empty_commit_set(self):
        for dim in Dimension:
            assert full_frequency([], dim) == {}

    def test_directory_counts_once_per_commit_but_sums_loc(self):
        snap = snapshot([commit("c0", changes=[("a/x", 3, 2), ("a/y", 1, 0)])], "c0")
        record = snap.commits[snap.default_head]
        freq = full_frequency([record], Dimension.DIRECTORY)
        assert freq["a"] == (1, 6)
        assert freq["/"] == (1, 6)

    def test_author_and_keyword_have_no_loc(self):
        snap = snapshot([commit("c0", author="kim", message="fix parser")], "c0")
        record = snap.commits[snap.default_head]
        assert full_frequency([record], Dimension.AUTHOR) == {"kim": (1, None)}
        assert full_frequency([record], Dimension.KEYWORD) == \
            {"fix": (1, None), "parser": (1, None)}

    @pytest.mark.parametrize("dim", ALL_DIMS)
    def test_matches_oracle_recount_on_fixture(self, dim, stems):
        stem = stems["fx_branchy"]
        commits = [c for node in stem.nodes for c in node.members()]
        result = full_frequency(commits, Dimension(dim))
        header, raw = oracle.load_raw_dump(fixture_path("fx_branchy"))
        expected = oracle.frequency(
            [raw[c.hash] for c in commits], dim)
        assert result == expected


class TestTopK:
    def test_empty(self):
        assert top_k({}, 5) == []

    def test_count_tie_broken_lexicographically(self):
        freq = {"b": (3, None), "a": (3, None), "c": (1, None)}
        entries = top_k(freq, 5)
        assert [(e.value, e.rank) for e in entries] == [("a", 1), ("b", 2), ("c", 3)]

    def test_loc_breaks_count_ties_before_value(self):
        freq = {"small": (2, 5), "big": (2, 50), "none": (2, None)}
        entries = top_k(freq, 3)
        assert [e.value for e in entries] == ["big", "small", "none"]

    def test_truncates_and_ranks(self, stems):
        stem = stems["fx_branchy"]
        commits = [c for node in stem.nodes for c in node.members()]
        freq = full_frequency(commits, Dimension.KEYWORD)
        assert len(freq) > 5
        entries = top_k(freq, 5)
        assert [e.rank for e in entries] == [1, 2, 3, 4, 5]
        header, raw = oracle.load_raw_dump(fixture_path("fx_branchy"))
        expected = oracle.topk(
            oracle.frequency([raw[c.hash] for c in commits], "keyword"), 5)
        assert [(e.value, e.count, e.loc, e.rank) for e in entries] == expected

    def test_rejects_nonpositive_k(self):
        with pytest.raises(InvalidArgument):
            top_k({}, 0)


class TestBuildTable:
    def test_single_cluster_scope_column_equals_cluster_column(self, stems):
        scope = scope_of(stems["fx_linear"], g=0.0)
        table = build_table(scope)
        assert len(scope.clusters) == 1
        only = scope.clusters[0].id
        assert table.cluster_columns[only] == table.scope_column
        for link in table.rank_links:
            assert link.columns == (SCOPE_COLUMN_ID, only)
            assert link.ranks[0] == link.ranks[1]

    def test_dimension_filter(self, stems):
        scope = scope_of(stems["fx_linear"], g=0.0)
        table = build_table(scope, dims=(Dimension.AUTHOR,))
        assert table.dimensions == (Dimension.AUTHOR,)
        assert set(table.scope_column) == {Dimension.AUTHOR}

    def test_multi_cluster_columns_match_oracle(self, stems):
        stem = stems["fx_branchy"]
        scope = scope_of(stem, g=0.5)
        assert len(scope.clusters) >= 3
        table = build_table(scope)
        header, raw = oracle.load_raw_dump(fixture_path("fx_branchy"))
        for cluster in scope.clusters:
            members = [raw[c.hash] for c in cluster_commits(cluster, stem)]
            for dim in ALL_DIMS:
                expected = oracle.topk(oracle.frequency(members, dim), 5)
                got = table.cluster_columns[cluster.id][Dimension(dim)]
                assert [(e.value, e.count, e.loc, e.rank) for e in got] == expected

    def test_link_soundness(self, stems):
        scope = scope_of(stems["fx_branchy"], g=0.5)
        table = build_table(scope)
        columns = {SCOPE_COLUMN_ID: table.scope_column, **table.cluster_columns}
        assert table.rank_links
        for link in table.rank_links:
            for column_id, rank in zip(link.columns, link.ranks):
                entries = columns[column_id][link.dimension]
                assert any(e.value == link.value and e.rank == rank
                           for e in entries)

    def test_links_cover_scope_and_adjacent_pairs_only(self, stems):
        scope = scope_of(stems["fx_branchy"], g=0.5)
        table = build_table(scope)
        ids = [c.id for c in scope.clusters]
        allowed = {(SCOPE_COLUMN_ID, cid) for cid in ids}
        allowed.update(zip(ids, ids[1:]))
        assert {link.columns for link in table.rank_links} <= allowed

    def test_conservation_scope_count_is_sum_of_cluster_counts(self, stems):
        stem = stems["fx_branchy"]
        scope = scope_of(stem, g=0.5)
        for dim in Dimension:
            scope_freq = full_frequency(
                [c for node in scope.nodes() for c in node.members()], dim)
            summed: dict[str, int] = {}
            for cluster in scope.clusters:
                for value, (count, _) in full_frequency(
                        cluster_commits(cluster, stem), dim).items():
                    summed[value] = summed.get(value, 0) + count
            assert {v: c for v, (c, _) in scope_freq.items()} == summed

    def test_monotone_ranks(self, stems):
        table = build_table(scope_of(stems["fx_branchy"], g=0.5))
        for column in (table.scope_column, *table.cluster_columns.values()):
            for entries in column.values():
                counts = [e.count for e in entries]
                assert counts == sorted(counts, reverse=True)

    def test_rejects_empty_dimension_filter(self, stems):
        with pytest.raises(InvalidArgument):
            build_table(scope_of(stems["fx_linear"]), dims=())


class TestCommitDetails:
    def test_singleton_cluster(self, stems):
        scope = scope_of(stems["tiny3"], g=1.0)
        details = commit_details(scope.clusters[0], stems["tiny3"])
        assert len(details) == 1
        assert set(details[0]) == {"hash", "author", "timestamp", "message",
                                   "keywords", "files", "directories"}

    def test_merge_node_lead_first_then_squashed_by_timestamp(self):
        records = chain(["r0", "r1"])
        records.append(commit("f0", parents=["r1"], timestamp=5000))
        records.append(commit("f1", parents=["f0"], timestamp=4000))
        records.append(commit("m", parents=["r1", "f1"], timestamp=9000))
        stem = build_stem(snapshot(records, "m"))
        scope = scope_of(stem, g=0.0)
        details = commit_details(scope.clusters[0], stem)
        hashes = [d["hash"] for d in details]
        # node 2 group: merge lead first, then squashed ascending timestamp
        assert hashes[2:] == [records[4]["hash"], records[3]["hash"],
                              records[2]["hash"]]

    def test_matches_flattening_oracle(self, stems):
        stem = stems["fx_octopus"]
        scope = scope_of(stem, g=0.0)
        details = commit_details(scope.clusters[0], stem)
        header, raw = oracle.load_raw_dump(fixture_path("fx_octopus"))
        expected = []
        for group in oracle.stem_groups(raw, header["head"]):
            expected.append(group["lead"])
            expected.extend(group["squashed"])
        assert [d["hash"] for d in details] == expected


class TestSerialization:
    def test_payload_shape(self, stems):
        scope = scope_of(stems["fx_branchy"], g=0.5)
        payload = table_payload(build_table(scope), scope)
        assert payload["columns"][0]["id"] == SCOPE_COLUMN_ID
        assert len(payload["columns"]) == 1 + len(scope.clusters)
        assert payload["k"] == 5
        assert payload["dimensions"] == ALL_DIMS

    def test_csv_quoting_and_line_endings(self):
        snap = snapshot([commit(
            "c0", author='Eve "The Knife", Jr.', message="tricky, author")], "c0")
        stem = build_stem(snap)
        scope = scope_of(stem, g=0.0)
        text = table_to_csv(build_table(scope), scope)
        assert "\r" not in text
        assert '"Eve ""The Knife"", Jr."' in text
        assert text.splitlines()[0] == "column,dimension,rank,value,count,loc"
