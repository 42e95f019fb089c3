"""Command-line front door for librarians and scripted use.

Exit codes: 0 ok, 1 user error, 2 data/validation error.  ``--format
structured`` emits the same JSON shapes as the HTTP API.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import heuristics, ingest, jsonio, navigate, query, store
from .errors import (
    InvalidLibraryError,
    MethLibError,
    StoreFormatError,
    UnsupportedVersionError,
)
from .model import Library


def _die(exc: MethLibError) -> None:
    click.echo(f"error [{exc.code}]: {exc.message}", err=True)
    if isinstance(exc, (InvalidLibraryError, StoreFormatError, UnsupportedVersionError)):
        sys.exit(2)
    sys.exit(1)


def _load(file: str) -> Library:
    try:
        lib, violations = store.load(file)
    except MethLibError as exc:
        _die(exc)
    if violations:
        for v in violations:
            click.echo(f"violation [{v.code}] {v.subject}: {v.message}", err=True)
        sys.exit(2)
    return lib


def _emit(fmt: str, structured, text_lines) -> None:
    if fmt == "structured":
        click.echo(json.dumps(structured, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        for line in text_lines:
            click.echo(line)


format_option = click.option(
    "--format", "fmt", type=click.Choice(["text", "structured"]), default="text"
)


@click.group()
def main() -> None:
    """Architecture method library toolkit."""


@main.command("validate")
@click.argument("file", type=click.Path(exists=True))
def validate_cmd(file: str) -> None:
    """Check a library file for referential and domain violations."""
    try:
        lib, violations = store.load(file)
    except MethLibError as exc:
        _die(exc)
    click.echo(f"{len(violations)} violations")
    for v in violations:
        click.echo(f"[{v.code}] {v.subject}: {v.message}")
    if violations:
        sys.exit(2)


@main.command("query")
@click.argument("file", type=click.Path(exists=True))
@click.argument("dsl")
@format_option
def query_cmd(file: str, dsl: str, fmt: str) -> None:
    """Run an exact query against the library."""
    lib = _load(file)
    try:
        ast = query.parse_query(dsl, lib)
        ids = query.eval_query(lib, ast)
    except MethLibError as exc:
        _die(exc)
    comps = [lib.components[cid] for cid in ids]
    _emit(
        fmt,
        [jsonio.component_to_json(c) for c in comps],
        (f"{c.name}\t{c.kind.value}\t{c.id}" for c in comps),
    )


@main.command("recommend")
@click.argument("file", type=click.Path(exists=True))
@click.option("--factor", "factors", multiple=True, metavar="NAME=VALUE")
@click.option("--selected", "selected", multiple=True, metavar="COMPONENT_ID")
@format_option
def recommend_cmd(file: str, factors, selected, fmt: str) -> None:
    """Recommend components for a situation given as --factor name=value."""
    lib = _load(file)
    assignments = {}
    for item in factors:
        name, sep, value = item.partition("=")
        if not sep:
            click.echo(f"error [bad_flag]: --factor needs NAME=VALUE, got {item!r}", err=True)
            sys.exit(1)
        assignments[name] = value
    try:
        situation = jsonio.situation_from_slugs(lib, assignments)
        ctx = heuristics.TruthContext(situation=situation, selection=set(selected))
        recs = heuristics.recommend(lib, ctx)
    except MethLibError as exc:
        _die(exc)
    _emit(
        fmt,
        [jsonio.recommendation_to_json(r) for r in recs],
        (
            f"{r.component_name}\t{','.join(r.firing)}\t"
            f"recommends={r.recommends} discourages={r.discourages}"
            for r in recs
        ),
    )


@main.command("import")
@click.argument("file", type=click.Path(exists=True))
@click.argument("batch", type=click.Path(exists=True))
@click.option("--threshold", type=float, default=ingest.DUPLICATE_REVIEW_THRESHOLD)
@format_option
def import_cmd(file: str, batch: str, threshold: float, fmt: str) -> None:
    """Import a screened draft batch into the library file."""
    lib = _load(file)
    try:
        batch_doc = json.loads(Path(batch).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _die(StoreFormatError(f"malformed batch file: {exc}", position=exc.pos))
    try:
        report = ingest.import_batch(lib, batch_doc, threshold=threshold)
        store.save(lib, file)
    except MethLibError as exc:
        _die(exc)
    structured = {
        "document_id": report.document_id,
        "created": report.created,
        "duplicate_warnings": report.duplicate_warnings,
        "rejected": report.rejected,
    }
    lines = [f"created {report.created_count} record(s) from document {report.document_id}"]
    lines += [
        f"warning: draft {w['draft']!r} resembles {w['component_id']} (score {w['score']:.2f})"
        for w in report.duplicate_warnings
    ]
    lines += [f"rejected: {r['draft']!r}: {r['reason']}" for r in report.rejected]
    _emit(fmt, structured, lines)


@main.command("screen")
@click.argument("file", type=click.Path(exists=True))
@click.argument("doc_id")
@click.option("--structured", "structured_", is_flag=True)
@click.option("--novel", is_flag=True)
@click.option("--in-domain", "in_domain", is_flag=True)
@click.option("--reusable", is_flag=True)
@click.option("--screener", default="")
@click.option("--policy", type=click.Choice(["strict", "relaxed"]), default="strict")
def screen_cmd(file, doc_id, structured_, novel, in_domain, reusable, screener, policy):
    """Record a screening verdict for a source document."""
    lib = _load(file)
    try:
        verdict = ingest.screen(
            lib,
            doc_id,
            answers={
                "structured": structured_,
                "novel": novel,
                "in_domain": in_domain,
                "reusable": reusable,
            },
            screener=screener,
            policy=policy,
        )
        store.save(lib, file)
    except MethLibError as exc:
        _die(exc)
    click.echo(f"{doc_id}: {verdict.decision}")


@main.command("export-dot")
@click.argument("file", type=click.Path(exists=True))
@click.option("--session", "session_id", default=None)
def export_dot_cmd(file: str, session_id: str | None) -> None:
    """Write the component network (or a session's selection) as DOT text."""
    lib = _load(file)
    try:
        session = navigate.get_session(lib, session_id) if session_id else None
    except MethLibError as exc:
        _die(exc)
    click.echo(navigate.to_dot(lib, session), nl=False)


@main.command("stats")
@click.argument("file", type=click.Path(exists=True))
@format_option
def stats_cmd(file: str, fmt: str) -> None:
    """Collection sizes of a library file."""
    lib = _load(file)
    counts = lib.stats()
    _emit(fmt, counts, (f"{k}\t{v}" for k, v in sorted(counts.items())))


@main.command("serve")
@click.argument("file", type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8000", metavar="HOST:PORT")
def serve_cmd(file: str, bind: str) -> None:
    """Serve the HTTP API over the library file."""
    from . import service

    try:
        service.serve(file, bind)
    except MethLibError as exc:
        _die(exc)


if __name__ == "__main__":
    main()
