"""Canonical JSON persistence for the library.

The file is UTF-8 JSON with a ``"format": "methlib/1"`` tag, two-space
indentation and sorted keys, so equal libraries serialize byte-for-byte
identically and diffs stay readable.  Heuristic conditions are stored as
DSL source text, keeping files human-authorable.  Unknown fields survive
a round-trip untouched.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from . import dectree, heuristics, ingest, navigate
from .errors import StoreFormatError, UnsupportedVersionError
from .model import (
    ComponentKind,
    Library,
    MethodComponent,
    PropertyDefinition,
    Relation,
    Situation,
    SituationalFactorDef,
    SourceRef,
    Violation,
    require_valid,
    validate,
)

FORMAT_TAG = "methlib/1"

_TOP_KEYS = (
    "format",
    "counters",
    "property_definitions",
    "situational_factors",
    "components",
    "relations",
    "heuristics",
    "decision_trees",
    "source_documents",
    "feedback",
    "sessions",
)


def _split(data: dict, known: tuple[str, ...]) -> dict:
    return {k: v for k, v in data.items() if k not in known}


# ---------------------------------------------------------------------------
# Record serializers


def _src_to(src: SourceRef) -> dict:
    out: dict = {}
    if src.citation:
        out["citation"] = src.citation
    if src.pages is not None:
        out["pages"] = src.pages
    if src.extra:
        out["extra"] = dict(src.extra)
    return out


def _src_from(data: dict) -> SourceRef:
    return SourceRef(
        citation=data.get("citation", ""),
        pages=data.get("pages"),
        extra=dict(data.get("extra", {})),
    )


def _component_to(c: MethodComponent) -> dict:
    out = {"kind": c.kind.value, "name": c.name}
    if c.description:
        out["description"] = c.description
    src = _src_to(c.source)
    if src:
        out["source"] = src
    if c.properties:
        out["properties"] = {k: list(v) for k, v in sorted(c.properties.items())}
    out.update(c.extra_fields)
    return out


_COMPONENT_KEYS = ("kind", "name", "description", "source", "properties")


def _component_from(cid: str, data: dict) -> MethodComponent:
    return MethodComponent(
        id=cid,
        kind=ComponentKind(data["kind"]),
        name=data["name"],
        description=data.get("description", ""),
        source=_src_from(data.get("source", {})),
        properties={k: list(v) for k, v in data.get("properties", {}).items()},
        extra_fields=_split(data, _COMPONENT_KEYS),
    )


def _propdef_to(p: PropertyDefinition) -> dict:
    out: dict = {"name": p.name, "values": p.value_domain}
    if p.description:
        out["description"] = p.description
    out.update(p.extra_fields)
    return out


def _propdef_from(pid: str, data: dict) -> PropertyDefinition:
    values = data.get("values")
    return PropertyDefinition(
        id=pid,
        name=data["name"],
        value_domain=list(values) if values is not None else None,
        description=data.get("description", ""),
        extra_fields=_split(data, ("name", "values", "description")),
    )


def _factordef_to(f: SituationalFactorDef) -> dict:
    out: dict = {"name": f.name, "values": list(f.value_domain)}
    if f.description:
        out["description"] = f.description
    out.update(f.extra_fields)
    return out


def _factordef_from(fid: str, data: dict) -> SituationalFactorDef:
    return SituationalFactorDef(
        id=fid,
        name=data["name"],
        value_domain=list(data.get("values", [])),
        description=data.get("description", ""),
        extra_fields=_split(data, ("name", "values", "description")),
    )


def _relation_to(r: Relation) -> dict:
    out = {"from": r.from_id, "to": r.to_id, "label": r.label}
    prov = _src_to(r.provenance)
    if prov:
        out["provenance"] = prov
    out.update(r.extra_fields)
    return out


def _relation_from(rid: str, data: dict) -> Relation:
    return Relation(
        id=rid,
        from_id=data["from"],
        to_id=data["to"],
        label=data.get("label", ""),
        provenance=_src_from(data.get("provenance", {})),
        extra_fields=_split(data, ("from", "to", "label", "provenance")),
    )


def _heuristic_to(h) -> dict:
    out = {
        "condition": heuristics.print_condition(h.condition),
        "recommends": h.consequent,
        "strength": h.strength,
    }
    if h.rationale:
        out["rationale"] = h.rationale
    prov = _src_to(h.provenance)
    if prov:
        out["provenance"] = prov
    out.update(h.extra_fields)
    return out


def _heuristic_from(hid: str, data: dict):
    return heuristics.Heuristic(
        id=hid,
        condition=heuristics.parse_condition(data["condition"]),
        consequent=data["recommends"],
        strength=data.get("strength", "recommend"),
        rationale=data.get("rationale", ""),
        provenance=_src_from(data.get("provenance", {})),
        extra_fields=_split(
            data, ("condition", "recommends", "strength", "rationale", "provenance")
        ),
    )


def _node_from_stored(data: dict) -> dectree.TreeNode:
    if "premark" in data:
        return dectree.Leaf(
            premarked=tuple(data["premark"]), note=data.get("note", "")
        )
    return dectree.Question(
        factor=data["question"],
        branches={
            v: _node_from_stored(child)
            for v, child in data.get("branches", {}).items()
        },
        default=(
            _node_from_stored(data["default"])
            if data.get("default") is not None
            else None
        ),
    )


def _tree_to(t) -> dict:
    out = {"name": t.name, "root": dectree.node_to_dict(t.root)}
    out.update(t.extra_fields)
    return out


def _tree_from(tid: str, data: dict):
    return dectree.DecisionTree(
        id=tid,
        name=data["name"],
        root=_node_from_stored(data["root"]),
        extra_fields=_split(data, ("name", "root")),
    )


def _document_to(d) -> dict:
    out: dict = {"title": d.title, "kind": d.kind, "citation": d.citation}
    if d.screening is not None:
        s = d.screening
        out["screening"] = {
            "answers": dict(s.answers),
            "notes": dict(s.notes),
            "decision": s.decision,
            "screener": s.screener,
        }
    out.update(d.extra_fields)
    return out


def _document_from(did: str, data: dict):
    screening = None
    if data.get("screening") is not None:
        s = data["screening"]
        screening = ingest.ScreeningVerdict(
            answers=dict(s.get("answers", {})),
            notes=dict(s.get("notes", {})),
            decision=s.get("decision", "reject"),
            screener=s.get("screener", ""),
        )
    return ingest.SourceDocument(
        id=did,
        title=data["title"],
        kind=data.get("kind", "other"),
        citation=data.get("citation", ""),
        screening=screening,
        extra_fields=_split(data, ("title", "kind", "citation", "screening")),
    )


def _feedback_to(f) -> dict:
    out = {
        "component": f.component_id,
        "verdict": f.verdict,
        "note": f.note,
        "project": f.project,
        "timestamp": f.timestamp,
    }
    out.update(f.extra_fields)
    return out


def _feedback_from(fid: str, data: dict):
    return ingest.FeedbackRecord(
        id=fid,
        component_id=data["component"],
        verdict=data["verdict"],
        note=data.get("note", ""),
        project=data.get("project", ""),
        timestamp=data.get("timestamp", ""),
        extra_fields=_split(
            data, ("component", "verdict", "note", "project", "timestamp")
        ),
    )


def _session_to(s) -> dict:
    out = {
        "situation": dict(s.situation.assignments),
        "marked": list(s.marked),
        "premarked": list(s.premarked),
        "history": list(s.history),
        "walks": {k: [list(p) for p in v] for k, v in s.walks.items()},
        "created": s.created,
        "updated": s.updated,
    }
    out.update(s.extra_fields)
    return out


_SESSION_KEYS = (
    "situation",
    "marked",
    "premarked",
    "history",
    "walks",
    "created",
    "updated",
)


def _session_from(sid: str, data: dict):
    return navigate.Session(
        id=sid,
        situation=Situation(dict(data.get("situation", {}))),
        marked=list(data.get("marked", [])),
        premarked=list(data.get("premarked", [])),
        history=list(data.get("history", [])),
        walks={k: [list(p) for p in v] for k, v in data.get("walks", {}).items()},
        created=data.get("created", ""),
        updated=data.get("updated", ""),
        extra_fields=_split(data, _SESSION_KEYS),
    )


# ---------------------------------------------------------------------------
# save / load


def library_to_dict(lib: Library, include_sessions: bool = True) -> dict:
    doc: dict = {"format": FORMAT_TAG}
    if lib.counters:
        doc["counters"] = dict(lib.counters)
    if lib.property_defs:
        doc["property_definitions"] = {
            pid: _propdef_to(p) for pid, p in lib.property_defs.items()
        }
    if lib.factor_defs:
        doc["situational_factors"] = {
            fid: _factordef_to(f) for fid, f in lib.factor_defs.items()
        }
    if lib.components:
        doc["components"] = {cid: _component_to(c) for cid, c in lib.components.items()}
    if lib.relations:
        doc["relations"] = {rid: _relation_to(r) for rid, r in lib.relations.items()}
    if lib.heuristics:
        doc["heuristics"] = {hid: _heuristic_to(h) for hid, h in lib.heuristics.items()}
    if lib.trees:
        doc["decision_trees"] = {tid: _tree_to(t) for tid, t in lib.trees.items()}
    if lib.documents:
        doc["source_documents"] = {
            did: _document_to(d) for did, d in lib.documents.items()
        }
    if lib.feedback:
        doc["feedback"] = {fid: _feedback_to(f) for fid, f in lib.feedback.items()}
    if include_sessions and lib.sessions:
        doc["sessions"] = {sid: _session_to(s) for sid, s in lib.sessions.items()}
    doc.update(lib.extra_fields)
    return doc


def dumps(lib: Library, include_sessions: bool = True) -> bytes:
    text = json.dumps(
        library_to_dict(lib, include_sessions),
        indent=2,
        sort_keys=True,
        ensure_ascii=False,
    )
    return (text + "\n").encode("utf-8")


def save(
    lib: Library,
    destination: str | Path | None = None,
    include_sessions: bool = True,
) -> bytes:
    """Serialize canonically; requires a violation-free library."""
    require_valid(lib)
    data = dumps(lib, include_sessions)
    if destination is not None:
        Path(destination).write_bytes(data)
    return data


_ID_RE = re.compile(r"^([a-z]+)(\d+)$")


def _restore_counters(lib: Library) -> None:
    """Make sure fresh ids never collide with loaded ones."""
    for collection in (
        lib.components,
        lib.property_defs,
        lib.factor_defs,
        lib.relations,
        lib.heuristics,
        lib.trees,
        lib.documents,
        lib.feedback,
        lib.sessions,
    ):
        for key in collection:
            m = _ID_RE.match(key)
            if m:
                prefix, n = m.group(1), int(m.group(2))
                if lib.counters.get(prefix, 0) < n:
                    lib.counters[prefix] = n


def library_from_dict(doc: dict) -> Library:
    fmt = doc.get("format")
    if not isinstance(fmt, str) or not fmt.startswith("methlib/"):
        raise StoreFormatError("missing or malformed format tag")
    try:
        version = int(fmt.split("/", 1)[1])
    except ValueError:
        raise StoreFormatError(f"malformed format tag {fmt!r}") from None
    if version > 1:
        raise UnsupportedVersionError(f"file format {fmt!r} is newer than supported")

    lib = Library()
    lib.counters = {k: int(v) for k, v in doc.get("counters", {}).items()}
    for pid, data in doc.get("property_definitions", {}).items():
        lib.property_defs[pid] = _propdef_from(pid, data)
    for fid, data in doc.get("situational_factors", {}).items():
        lib.factor_defs[fid] = _factordef_from(fid, data)
    for cid, data in doc.get("components", {}).items():
        lib.components[cid] = _component_from(cid, data)
    for rid, data in doc.get("relations", {}).items():
        lib.relations[rid] = _relation_from(rid, data)
    for hid, data in doc.get("heuristics", {}).items():
        lib.heuristics[hid] = _heuristic_from(hid, data)
    for tid, data in doc.get("decision_trees", {}).items():
        lib.trees[tid] = _tree_from(tid, data)
    for did, data in doc.get("source_documents", {}).items():
        lib.documents[did] = _document_from(did, data)
    for fid, data in doc.get("feedback", {}).items():
        lib.feedback[fid] = _feedback_from(fid, data)
    for sid, data in doc.get("sessions", {}).items():
        lib.sessions[sid] = _session_from(sid, data)
    lib.extra_fields = _split(doc, _TOP_KEYS)
    _restore_counters(lib)
    return lib


def load(source: str | Path | bytes) -> tuple[Library, list[Violation]]:
    """Parse a library file; returns the library plus any violations found
    on re-validation (the caller decides what to do with them)."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreFormatError(f"cannot read {source}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreFormatError(
            f"malformed library file at line {exc.lineno}, column {exc.colno} "
            f"(offset {exc.pos})",
            position=exc.pos,
        ) from exc
    if not isinstance(doc, dict):
        raise StoreFormatError("library file must hold a JSON object")
    lib = library_from_dict(doc)
    return lib, validate(lib)
