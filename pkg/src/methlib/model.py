"""Domain types, the in-memory library store and the component network.

The library holds every curated collection (components, schema
definitions, relations, rules, trees, documents, feedback, sessions)
indexed by engine-assigned ids.  Names are display labels; ids are
identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DeleteBlockedError,
    DuplicateRelationError,
    EmptyNameError,
    InvalidLibraryError,
    OutOfDomainError,
    SelfLoopError,
    UnknownIdError,
    UnknownPropertyError,
)

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(name: str) -> str:
    """Identifier form of a display name, used by the DSLs (``data complexity``
    -> ``data_complexity``)."""
    return _SLUG_RE.sub("_", name.lower()).strip("_")


def normalize_name(name: str) -> str:
    """Lowercased, whitespace-collapsed form used for name matching."""
    return " ".join(name.lower().split())


class ComponentKind(str, Enum):
    PRODUCT = "Product"
    ACTIVITY = "Activity"
    ACTOR = "Actor"
    TOOL = "Tool"
    PRINCIPLE = "Principle"

    @classmethod
    def parse(cls, text: str) -> "ComponentKind":
        for kind in cls:
            if kind.value.lower() == text.strip().lower():
                return kind
        raise OutOfDomainError(f"unknown component kind {text!r}")


@dataclass
class SourceRef:
    citation: str = ""
    pages: str | None = None
    extra: dict[str, str] = field(default_factory=dict)


@dataclass
class PropertyDefinition:
    id: str
    name: str
    value_domain: list[str] | None = None  # None means open text
    description: str = ""
    extra_fields: dict = field(default_factory=dict)


@dataclass
class SituationalFactorDef:
    id: str
    name: str
    value_domain: list[str] = field(default_factory=list)
    description: str = ""
    extra_fields: dict = field(default_factory=dict)


@dataclass
class Situation:
    """Partial assignment of values to situational factors (by factor id)."""

    assignments: dict[str, str] = field(default_factory=dict)

    def copy(self) -> "Situation":
        return Situation(dict(self.assignments))


@dataclass
class MethodComponent:
    id: str
    kind: ComponentKind
    name: str
    description: str = ""
    source: SourceRef = field(default_factory=SourceRef)
    properties: dict[str, list[str]] = field(default_factory=dict)
    extra_fields: dict = field(default_factory=dict)


@dataclass
class Relation:
    id: str
    from_id: str
    to_id: str
    label: str
    provenance: SourceRef = field(default_factory=SourceRef)
    extra_fields: dict = field(default_factory=dict)


@dataclass
class Violation:
    code: str
    subject: str
    message: str


@dataclass
class Library:
    components: dict[str, MethodComponent] = field(default_factory=dict)
    property_defs: dict[str, PropertyDefinition] = field(default_factory=dict)
    factor_defs: dict[str, SituationalFactorDef] = field(default_factory=dict)
    relations: dict[str, Relation] = field(default_factory=dict)
    heuristics: dict = field(default_factory=dict)  # id -> heuristics.Heuristic
    trees: dict = field(default_factory=dict)  # id -> dectree.DecisionTree
    documents: dict = field(default_factory=dict)  # id -> ingest.SourceDocument
    feedback: dict = field(default_factory=dict)  # id -> ingest.FeedbackRecord
    sessions: dict = field(default_factory=dict)  # id -> navigate.Session
    counters: dict[str, int] = field(default_factory=dict)
    extra_fields: dict = field(default_factory=dict)

    # -- id management -------------------------------------------------
    def new_id(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0) + 1
        self.counters[prefix] = n
        return f"{prefix}{n}"

    # -- lookups -------------------------------------------------------
    def component(self, cid: str) -> MethodComponent:
        try:
            return self.components[cid]
        except KeyError:
            raise UnknownIdError(f"unknown component {cid!r}") from None

    def resolve_factor(self, ref: str) -> SituationalFactorDef | None:
        """Resolve a factor by id or by the slug of its name."""
        if ref in self.factor_defs:
            return self.factor_defs[ref]
        for fd in self.factor_defs.values():
            if slugify(fd.name) == ref:
                return fd
        return None

    def resolve_property(self, ref: str) -> PropertyDefinition | None:
        if ref in self.property_defs:
            return self.property_defs[ref]
        for pd in self.property_defs.values():
            if slugify(pd.name) == ref:
                return pd
        return None

    def components_named(self, name: str) -> list[MethodComponent]:
        wanted = normalize_name(name)
        return [c for c in self.components.values() if normalize_name(c.name) == wanted]

    # -- convenience ---------------------------------------------------
    def stats(self) -> dict[str, int]:
        return {
            "components": len(self.components),
            "property_definitions": len(self.property_defs),
            "situational_factors": len(self.factor_defs),
            "relations": len(self.relations),
            "heuristics": len(self.heuristics),
            "decision_trees": len(self.trees),
            "source_documents": len(self.documents),
            "feedback": len(self.feedback),
            "sessions": len(self.sessions),
        }


# ---------------------------------------------------------------------------
# Mutations


def _check_properties(lib: Library, properties: dict[str, list[str]]) -> None:
    for pid, values in properties.items():
        pd = lib.property_defs.get(pid)
        if pd is None:
            raise UnknownPropertyError(f"unknown property {pid!r}")
        if pd.value_domain is not None:
            for v in values:
                if v not in pd.value_domain:
                    raise OutOfDomainError(
                        f"value {v!r} not in domain of property {pd.name!r}"
                    )


def add_component(
    lib: Library,
    kind: ComponentKind,
    name: str,
    description: str = "",
    source: SourceRef | None = None,
    properties: dict[str, list[str]] | None = None,
) -> str:
    if not name.strip():
        raise EmptyNameError("component name must be non-empty")
    properties = {k: list(v) for k, v in (properties or {}).items()}
    _check_properties(lib, properties)
    cid = lib.new_id("c")
    lib.components[cid] = MethodComponent(
        id=cid,
        kind=kind,
        name=name,
        description=description,
        source=source or SourceRef(),
        properties=properties,
    )
    return cid


def add_relation(
    lib: Library,
    from_id: str,
    to_id: str,
    label: str,
    provenance: SourceRef | None = None,
) -> str:
    if from_id not in lib.components:
        raise UnknownIdError(f"unknown component {from_id!r}")
    if to_id not in lib.components:
        raise UnknownIdError(f"unknown component {to_id!r}")
    if from_id == to_id:
        raise SelfLoopError(f"self-loop on {from_id!r} rejected")
    for rel in lib.relations.values():
        if (rel.from_id, rel.to_id, rel.label) == (from_id, to_id, label):
            raise DuplicateRelationError(
                f"relation ({from_id}, {to_id}, {label!r}) already present"
            )
    rid = lib.new_id("r")
    lib.relations[rid] = Relation(
        id=rid,
        from_id=from_id,
        to_id=to_id,
        label=label,
        provenance=provenance or SourceRef(),
    )
    return rid


def add_property_definition(
    lib: Library,
    name: str,
    value_domain: list[str] | None = None,
    description: str = "",
) -> str:
    if not name.strip():
        raise EmptyNameError("property name must be non-empty")
    if value_domain is not None:
        if not value_domain:
            raise OutOfDomainError(f"closed domain of {name!r} must be non-empty")
        if len(set(value_domain)) != len(value_domain):
            raise OutOfDomainError(f"domain of {name!r} has duplicate values")
    pid = lib.new_id("p")
    lib.property_defs[pid] = PropertyDefinition(
        id=pid, name=name, value_domain=value_domain, description=description
    )
    return pid


def add_factor_definition(
    lib: Library, name: str, value_domain: list[str], description: str = ""
) -> str:
    if not name.strip():
        raise EmptyNameError("factor name must be non-empty")
    if not value_domain:
        raise OutOfDomainError(f"domain of factor {name!r} must be non-empty")
    if len(set(value_domain)) != len(value_domain):
        raise OutOfDomainError(f"domain of factor {name!r} has duplicate values")
    fid = lib.new_id("f")
    lib.factor_defs[fid] = SituationalFactorDef(
        id=fid, name=name, value_domain=list(value_domain), description=description
    )
    return fid


def delete_component(lib: Library, cid: str, force: bool = False) -> None:
    """Remove a component; without ``force`` any incident relation or
    heuristic reference blocks the delete, with ``force`` they cascade."""
    if cid not in lib.components:
        raise UnknownIdError(f"unknown component {cid!r}")
    incident = [
        r.id for r in lib.relations.values() if cid in (r.from_id, r.to_id)
    ]
    referencing = [h.id for h in lib.heuristics.values() if h.consequent == cid]
    if (incident or referencing) and not force:
        raise DeleteBlockedError(
            f"component {cid!r} has {len(incident)} relation(s) and "
            f"{len(referencing)} heuristic(s); use force to cascade"
        )
    for rid in incident:
        del lib.relations[rid]
    for hid in referencing:
        del lib.heuristics[hid]
    for fid in [f.id for f in lib.feedback.values() if f.component_id == cid]:
        del lib.feedback[fid]
    del lib.components[cid]


def check_situation(lib: Library, situation: Situation) -> None:
    for fid, value in situation.assignments.items():
        fd = lib.factor_defs.get(fid)
        if fd is None:
            raise UnknownIdError(f"unknown situational factor {fid!r}")
        if value not in fd.value_domain:
            raise OutOfDomainError(
                f"value {value!r} not in domain of factor {fd.name!r}"
            )


# ---------------------------------------------------------------------------
# Validation


def validate(lib: Library) -> list[Violation]:
    """Full referential / domain scan; violations are data, not errors.

    Session marks are deliberately excluded: the navigation contract drops
    dangling marks at report time instead.
    """
    out: list[Violation] = []

    for pd in lib.property_defs.values():
        if pd.value_domain is not None:
            if not pd.value_domain:
                out.append(Violation("empty_domain", pd.id, f"property {pd.name!r} has an empty domain"))
            if len(set(pd.value_domain)) != len(pd.value_domain):
                out.append(Violation("duplicate_domain_value", pd.id, f"property {pd.name!r} has duplicate domain values"))

    for fd in lib.factor_defs.values():
        if not fd.value_domain:
            out.append(Violation("empty_domain", fd.id, f"factor {fd.name!r} has an empty domain"))
        if len(set(fd.value_domain)) != len(fd.value_domain):
            out.append(Violation("duplicate_domain_value", fd.id, f"factor {fd.name!r} has duplicate domain values"))

    for comp in lib.components.values():
        if not comp.name.strip():
            out.append(Violation("empty_name", comp.id, "component has an empty name"))
        for pid, values in comp.properties.items():
            pd = lib.property_defs.get(pid)
            if pd is None:
                out.append(Violation("dangling_property", comp.id, f"component {comp.name!r} references unknown property {pid!r}"))
                continue
            if pd.value_domain is not None:
                for v in values:
                    if v not in pd.value_domain:
                        out.append(Violation("out_of_domain", comp.id, f"component {comp.name!r} holds {v!r} outside domain of {pd.name!r}"))

    seen_triples: dict[tuple, str] = {}
    for rel in lib.relations.values():
        for endpoint in (rel.from_id, rel.to_id):
            if endpoint not in lib.components:
                out.append(Violation("dangling_endpoint", rel.id, f"relation {rel.id} references missing component {endpoint!r}"))
        if rel.from_id == rel.to_id:
            out.append(Violation("self_loop", rel.id, f"relation {rel.id} is a self-loop"))
        triple = (rel.from_id, rel.to_id, rel.label)
        if triple in seen_triples:
            out.append(Violation("duplicate_relation", rel.id, f"relation {rel.id} duplicates {seen_triples[triple]}"))
        else:
            seen_triples[triple] = rel.id

    from . import dectree, heuristics  # local import: those modules stay model-free

    for h in lib.heuristics.values():
        if h.consequent not in lib.components:
            out.append(Violation("dangling_consequent", h.id, f"heuristic {h.id} recommends missing component {h.consequent!r}"))
        for problem in heuristics.check_condition(h.condition, lib):
            out.append(Violation("bad_condition", h.id, f"heuristic {h.id}: {problem}"))

    for tree in lib.trees.values():
        for problem in dectree.check_tree(tree, lib):
            out.append(Violation("bad_tree", tree.id, f"tree {tree.id}: {problem}"))

    for rec in lib.feedback.values():
        if rec.component_id not in lib.components:
            out.append(Violation("dangling_feedback", rec.id, f"feedback {rec.id} targets missing component {rec.component_id!r}"))

    for session in lib.sessions.values():
        for fid in session.situation.assignments:
            if fid not in lib.factor_defs:
                out.append(Violation("dangling_factor", session.id, f"session {session.id} assigns unknown factor {fid!r}"))

    return out


def require_valid(lib: Library) -> None:
    violations = validate(lib)
    if violations:
        raise InvalidLibraryError(
            f"library has {len(violations)} violation(s)", violations
        )


# ---------------------------------------------------------------------------
# Network


@dataclass
class Network:
    nodes: list[str]
    out_edges: dict[str, list[str]]  # component id -> relation ids
    in_edges: dict[str, list[str]]


def build_network(lib: Library) -> Network:
    """Derive the navigable component network.  Deterministic: adjacency is
    ordered by (label, neighbor name, relation id)."""
    require_valid(lib)
    nodes = sorted(lib.components)
    out_edges: dict[str, list[str]] = {cid: [] for cid in nodes}
    in_edges: dict[str, list[str]] = {cid: [] for cid in nodes}

    def out_key(rid: str):
        rel = lib.relations[rid]
        return (rel.label, lib.components[rel.to_id].name, rid)

    def in_key(rid: str):
        rel = lib.relations[rid]
        return (rel.label, lib.components[rel.from_id].name, rid)

    for rel in lib.relations.values():
        out_edges[rel.from_id].append(rel.id)
        in_edges[rel.to_id].append(rel.id)
    for cid in nodes:
        out_edges[cid].sort(key=out_key)
        in_edges[cid].sort(key=in_key)
    return Network(nodes=nodes, out_edges=out_edges, in_edges=in_edges)
