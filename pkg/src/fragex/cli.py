"""Command-line front door.

Exit codes: 0 success, 1 usage error, 2 data error. Data goes to stdout,
diagnostics to stderr, and identical inputs always print identical bytes.
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone

import click

from .errors import FragexError
from .fragments import Fragment, history as fragment_history, inspect as inspect_scope
from .ingest import dump_snapshot, extract_live, load_source
from .scope import Scope, ScopeFilter, resolve_scope
from .stem import annotate_releases, build_stem
from .table import Dimension, build_table, table_payload, table_to_csv

_FILTER_KEYS = ("date-from", "date-to", "release-from", "release-to",
                "author", "keyword", "index-from", "index-to")


def _parse_date(value: str) -> int:
    if value.lstrip("-").isdigit():
        return int(value)
    try:
        parsed = datetime.strptime(value, "%Y-%m-%d")
    except ValueError:
        raise click.UsageError(
            f"dates must be epoch seconds or YYYY-MM-DD, got {value!r}")
    return int(parsed.replace(tzinfo=timezone.utc).timestamp())


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise click.UsageError(f"{key} expects an integer, got {value!r}")


def parse_filters(pairs: tuple[str, ...]) -> ScopeFilter:
    """Turn repeated ``--filter key=value`` options into a ScopeFilter."""
    fields: dict = {"authors": set(), "keywords": set()}
    for pair in pairs:
        key, separator, value = pair.partition("=")
        key = key.strip().lower().replace("_", "-")
        if not separator or key not in _FILTER_KEYS:
            raise click.UsageError(
                f"filters look like key=value with key one of "
                f"{', '.join(_FILTER_KEYS)}; got {pair!r}")
        if key in ("date-from", "date-to"):
            fields[key.replace("-", "_")] = _parse_date(value)
        elif key in ("index-from", "index-to"):
            fields[key.replace("-", "_")] = _parse_int(value, key)
        elif key == "author":
            fields["authors"].add(value)
        elif key == "keyword":
            fields["keywords"].add(value)
        else:
            fields[key.replace("-", "_")] = value
    fields["authors"] = frozenset(fields["authors"])
    fields["keywords"] = frozenset(fields["keywords"])
    try:
        return ScopeFilter(**fields)
    except FragexError as exc:
        raise click.UsageError(str(exc))


def _parse_fragment_option(spec: str) -> Fragment:
    try:
        return Fragment.parse(spec)
    except FragexError as exc:
        raise click.UsageError(str(exc))


def _parse_dims_option(dims: str | None) -> tuple[Dimension, ...] | None:
    if not dims:
        return None
    try:
        return tuple(Dimension.parse(part) for part in dims.split(","))
    except FragexError as exc:
        raise click.UsageError(str(exc))


def _materialize(source: str, filters: tuple[str, ...], granularity: float) -> Scope:
    flt = parse_filters(filters)
    snapshot = load_source(source)
    stem = annotate_releases(build_stem(snapshot))
    return resolve_scope(stem, flt, granularity)


def _echo_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, ensure_ascii=False))


@click.group()
@click.option("--data-dir", type=click.Path(), default=None,
              help="Directory for durable state such as pin boards "
                   "(default: FRAGEX_DATA or ~/.fragex).")
@click.pass_context
def cli(ctx, data_dir):
    """Explore information fragments scattered across git history."""
    ctx.obj = {"data_dir": data_dir}


@cli.command()
@click.argument("repo_path", type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(allow_dash=True),
              help="Dump file to write; use - for stdout.")
def ingest(repo_path, output):
    """Read a live git repository and write its canonical dump."""
    snapshot = extract_live(repo_path)
    if output == "-":
        dump_snapshot(snapshot, sys.stdout)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fp:
            dump_snapshot(snapshot, fp)
        click.echo(f"wrote {len(snapshot)} commits to {output}", err=True)


_granularity_option = click.option(
    "-g", "--granularity", type=click.FloatRange(0.0, 1.0), default=0.5,
    show_default=True, help="Cluster granularity; 0 is one cluster, 1 is "
                            "one cluster per stem node.")
_filter_option = click.option(
    "--filter", "filters", multiple=True, metavar="KEY=VALUE",
    help="Scope filter, repeatable. Keys: " + ", ".join(_FILTER_KEYS) + ".")


@cli.command()
@click.argument("source", type=click.Path(exists=True))
@_granularity_option
@_filter_option
@click.option("--dims", default=None,
              help="Comma-separated dimensions to keep (author,keyword,file,directory).")
@click.option("-k", "top", type=click.IntRange(min=1), default=5,
              show_default=True, help="Values per column and dimension.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
def table(source, granularity, filters, dims, top, fmt):
    """Print the dimension value table for a scope of SOURCE."""
    scope = _materialize(source, filters, granularity)
    result = build_table(scope, k=top, dims=_parse_dims_option(dims))
    if fmt == "csv":
        click.echo(table_to_csv(result, scope), nl=False)
    else:
        _echo_json(table_payload(result, scope))


@cli.command()
@click.argument("source", type=click.Path(exists=True))
@click.option("-f", "--fragment", "fragment_specs", multiple=True, required=True,
              metavar="DIM=VALUE", help="Fragment to inspect, repeatable.")
@click.option("--scope", "filters", multiple=True, metavar="KEY=VALUE",
              help="Scope filter, same syntax as table --filter.")
@_granularity_option
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def inspect(source, fragment_specs, filters, granularity, fmt):
    """Check which clusters contain each fragment."""
    from .api import inspection_response

    fragments = [_parse_fragment_option(spec) for spec in fragment_specs]
    scope = _materialize(source, filters, granularity)
    matrix = inspect_scope(fragments, scope)
    if fmt == "json":
        _echo_json(inspection_response(scope, matrix))
        return
    labels = [f"{f.dimension.value}={f.value}" for f in matrix.fragments]
    label_width = max(len("matched-sum"), *(len(label) for label in labels))
    widths = [max(len(cid), 1) for cid in matrix.cluster_ids]
    header = " | ".join(["fragment".ljust(label_width),
                         *[cid.ljust(w) for cid, w in zip(matrix.cluster_ids, widths)]])
    click.echo(header)
    click.echo("-" * len(header))
    for label, row in zip(labels, matrix.grid):
        cells = ["x" if hit else "." for hit in row]
        click.echo(" | ".join([label.ljust(label_width),
                               *[c.ljust(w) for c, w in zip(cells, widths)]]))
    click.echo(" | ".join(["matched-sum".ljust(label_width),
                           *[str(s).ljust(w)
                             for s, w in zip(matrix.matched_sum, widths)]]))


@cli.command()
@click.argument("source", type=click.Path(exists=True))
@click.option("-f", "--fragment", "fragment_spec", required=True,
              metavar="DIM=VALUE")
@click.option("--scope", "filters", multiple=True, metavar="KEY=VALUE",
              help="Optional scope used only to flag in-scope occurrences.")
@_granularity_option
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def history(source, fragment_spec, filters, granularity, fmt):
    """Print every commit on the stem carrying the fragment."""
    from .api import history_response

    fragment = _parse_fragment_option(fragment_spec)
    snapshot = load_source(source)
    stem = annotate_releases(build_stem(snapshot))
    scope = resolve_scope(stem, parse_filters(filters), granularity) \
        if filters else None
    result = fragment_history(stem, fragment, scope)
    if fmt == "json":
        _echo_json(history_response(result))
        return
    click.echo(f"{fragment.dimension.value}={fragment.value}: "
               f"{len(result.occurrences)} occurrence(s)")
    for occurrence in result.occurrences:
        when = datetime.fromtimestamp(occurrence.timestamp, tz=timezone.utc)
        marker = " [in scope]" if occurrence.in_scope else ""
        click.echo(f"  node {occurrence.stem_index:>4}  "
                   f"{occurrence.hash[:12]}  "
                   f"{when.strftime('%Y-%m-%d %H:%M')}{marker}")


@cli.command()
@click.argument("source", type=click.Path(exists=True))
@click.option("-o", "--out-dir", required=True, type=click.Path(file_okay=False),
              help="Directory receiving table.csv, table.json and the figures.")
@_granularity_option
@_filter_option
@click.option("--dims", default=None)
@click.option("-k", "top", type=click.IntRange(min=1), default=5, show_default=True)
def report(source, out_dir, granularity, filters, dims, top):
    """Export a scope as CSV + JSON plus rendered figures."""
    import os

    from .api import scope_response
    from .report import render_report

    scope = _materialize(source, filters, granularity)
    result = build_table(scope, k=top, dims=_parse_dims_option(dims))
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "table.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fp:
        fp.write(table_to_csv(result, scope))
    json_path = os.path.join(out_dir, "table.json")
    payload = table_payload(result, scope)
    with open(json_path, "w", encoding="utf-8", newline="\n") as fp:
        json.dump(payload, fp, indent=2, ensure_ascii=False)
        fp.write("\n")
    figures = render_report(scope_response("local", scope), payload, out_dir)
    for path in [csv_path, json_path, *figures]:
        click.echo(path)


@cli.command()
@click.argument("source", type=click.Path(exists=True))
@click.option("--port", type=int, default=None,
              help="Port to bind (default: FRAGEX_PORT or 7845).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-origin", default="*", show_default=True,
              help="Origin allowed by CORS.")
@click.pass_context
def serve(ctx, source, port, host, ui_origin):
    """Load SOURCE and run the HTTP service until interrupted."""
    import uvicorn

    from .api import create_app, resolve_port

    app = create_app(data_dir=ctx.obj.get("data_dir"), ui_origin=ui_origin)
    snapshot = load_source(source)
    entry = app.state.registry.add_repo(snapshot)
    bound_port = resolve_port(port)
    click.echo(f"serving {snapshot.name!r} as repo {entry.repo_id} "
               f"on http://{host}:{bound_port}", err=True)
    uvicorn.run(app, host=host, port=bound_port, log_level="warning")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except FragexError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error [IO]: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
