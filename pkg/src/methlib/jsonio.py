"""JSON shapes shared by the HTTP service and the CLI's structured output.

Keeping one set of result serializers is what makes the cross-interface
equivalence guarantee cheap: both front ends render the same dicts.
"""

from __future__ import annotations

from .errors import UnknownFactorError
from .heuristics import Recommendation
from .model import Library, MethodComponent, Relation, Situation, slugify
from .navigate import SelectionReport, Session


def situation_from_slugs(lib: Library, assignments: dict) -> Situation:
    """External situations key factors by name slug; resolve to factor ids.
    A None value is kept (it means: clear this factor)."""
    resolved = {}
    for ref, value in (assignments or {}).items():
        fd = lib.resolve_factor(str(ref))
        if fd is None:
            raise UnknownFactorError(f"unknown situational factor {ref!r}")
        resolved[fd.id] = value
    return Situation(resolved)


def situation_to_slugs(lib: Library, assignments: dict[str, str]) -> dict[str, str]:
    out = {}
    for fid, value in assignments.items():
        fd = lib.factor_defs.get(fid)
        out[slugify(fd.name) if fd else fid] = value
    return out


def component_to_json(c: MethodComponent) -> dict:
    return {
        "id": c.id,
        "kind": c.kind.value,
        "name": c.name,
        "description": c.description,
        "source": {
            "citation": c.source.citation,
            "pages": c.source.pages,
            "extra": dict(c.source.extra),
        },
        "properties": {k: list(v) for k, v in sorted(c.properties.items())},
    }


def relation_to_json(r: Relation) -> dict:
    return {"id": r.id, "from": r.from_id, "to": r.to_id, "label": r.label}


def recommendation_to_json(r: Recommendation) -> dict:
    return {
        "component_id": r.component_id,
        "component_name": r.component_name,
        "firing": list(r.firing),
        "recommends": r.recommends,
        "discourages": r.discourages,
        "discouraged_only": r.discouraged_only,
    }


def factor_to_json(lib: Library, fid: str) -> dict:
    fd = lib.factor_defs[fid]
    return {
        "id": fd.id,
        "slug": slugify(fd.name),
        "name": fd.name,
        "values": list(fd.value_domain),
        "description": fd.description,
    }


def property_to_json(lib: Library, pid: str) -> dict:
    pd = lib.property_defs[pid]
    return {
        "id": pd.id,
        "slug": slugify(pd.name),
        "name": pd.name,
        "values": list(pd.value_domain) if pd.value_domain is not None else None,
        "description": pd.description,
    }


def session_to_json(lib: Library, s: Session) -> dict:
    return {
        "id": s.id,
        "situation": situation_to_slugs(lib, s.situation.assignments),
        "marked": list(s.marked),
        "premarked": list(s.premarked),
        "created": s.created,
        "updated": s.updated,
    }


def report_to_json(lib: Library, rep: SelectionReport) -> dict:
    return {
        "session_id": rep.session_id,
        "situation": situation_to_slugs(lib, rep.situation),
        "components": [component_to_json(c) for c in rep.components],
        "induced_relations": [relation_to_json(r) for r in rep.induced_relations],
        "firing_heuristics": [
            {
                "heuristic_id": f.heuristic_id,
                "component_id": f.component_id,
                "strength": f.strength,
            }
            for f in rep.firing_heuristics
        ],
        "dropped_marks": list(rep.dropped_marks),
    }
