"""Curation pipeline: screening, batch import, duplicate detection, feedback.

Raw source documents pass a four-question quality screen before their
extracted drafts may enter the library.  Duplicate detection is advisory
(warn, never merge) and batch import resolves cross-references by name,
because raw extractions talk about components by name, not id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import (
    EmptyNameError,
    MissingAnswerError,
    ScreeningRequiredError,
    UnknownIdError,
)
from .model import (
    ComponentKind,
    Library,
    SourceRef,
    add_component,
    add_factor_definition,
    add_property_definition,
    add_relation,
    normalize_name,
)

DOCUMENT_KINDS = (
    "book",
    "project deliverable",
    "project archive",
    "case description",
    "method description",
    "other",
)

FEEDBACK_VERDICTS = ("useful", "not-useful", "incorrect", "needs-refinement")

SCREENING_QUESTIONS = ("structured", "novel", "in_domain", "reusable")

DUPLICATE_REVIEW_THRESHOLD = 0.8


@dataclass
class ScreeningVerdict:
    answers: dict[str, bool]  # all four SCREENING_QUESTIONS
    notes: dict[str, str]
    decision: str  # "accept" | "reject"
    screener: str = ""
    extra_fields: dict = field(default_factory=dict)


@dataclass
class SourceDocument:
    id: str
    title: str
    kind: str = "other"
    citation: str = ""
    screening: ScreeningVerdict | None = None
    extra_fields: dict = field(default_factory=dict)


@dataclass
class FeedbackRecord:
    id: str
    component_id: str
    verdict: str
    note: str = ""
    project: str = ""
    timestamp: str = ""
    extra_fields: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Screening


def add_document(lib: Library, title: str, kind: str = "other", citation: str = "") -> str:
    if not title.strip() or not citation.strip():
        raise EmptyNameError("document title and citation must be non-empty")
    if kind not in DOCUMENT_KINDS:
        raise MissingAnswerError(f"unknown document kind {kind!r}")
    did = lib.new_id("d")
    lib.documents[did] = SourceDocument(id=did, title=title, kind=kind, citation=citation)
    return did


def screen(
    lib: Library,
    doc_id: str,
    answers: dict[str, bool],
    notes: dict[str, str] | None = None,
    screener: str = "",
    policy: str = "strict",
) -> ScreeningVerdict:
    """Apply the four-question quality screen to a source document.

    ``strict`` accepts only when all four answers are true; ``relaxed``
    accepts three of four provided the in-domain answer is true.
    """
    doc = lib.documents.get(doc_id)
    if doc is None:
        raise UnknownIdError(f"unknown source document {doc_id!r}")
    missing = [q for q in SCREENING_QUESTIONS if q not in answers]
    if missing:
        raise MissingAnswerError(f"missing screening answer(s): {', '.join(missing)}")
    answers = {q: bool(answers[q]) for q in SCREENING_QUESTIONS}
    if policy == "strict":
        accept = all(answers.values())
    elif policy == "relaxed":
        accept = answers["in_domain"] and sum(answers.values()) >= 3
    else:
        raise MissingAnswerError(f"unknown screening policy {policy!r}")
    verdict = ScreeningVerdict(
        answers=answers,
        notes={q: (notes or {}).get(q, "") for q in SCREENING_QUESTIONS},
        decision="accept" if accept else "reject",
        screener=screener,
    )
    doc.screening = verdict
    return verdict


# ---------------------------------------------------------------------------
# Duplicate detection


def _canonical(name: str) -> str:
    return normalize_name(name)


def edit_distance(a: str, b: str) -> int:
    """Plain Wagner-Fischer levenshtein distance."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """1 - normalized edit distance over canonicalized names, in [0, 1]."""
    a, b = _canonical(a), _canonical(b)
    if not a and not b:
        return 1.0
    longest = max(len(a), len(b))
    return 1.0 - edit_distance(a, b) / longest


@dataclass
class DuplicateMatch:
    component_id: str
    component_name: str
    score: float
    needs_review: bool


def detect_duplicates(
    lib: Library,
    name: str,
    kind: ComponentKind | None = None,
    threshold: float = DUPLICATE_REVIEW_THRESHOLD,
) -> list[DuplicateMatch]:
    """Score every stored component against a draft name.  Matches across a
    different kind are halved.  Never merges anything."""
    matches = []
    for comp in lib.components.values():
        score = name_similarity(name, comp.name)
        if kind is not None and comp.kind is not kind:
            score *= 0.5
        if score <= 0.0:
            continue
        matches.append(
            DuplicateMatch(comp.id, comp.name, score, score >= threshold)
        )
    matches.sort(key=lambda m: (-m.score, m.component_name, m.component_id))
    return matches


# ---------------------------------------------------------------------------
# Batch import


@dataclass
class ImportReport:
    document_id: str
    created: dict[str, list[str]]  # collection -> new ids
    duplicate_warnings: list[dict]  # {draft, component_id, score}
    rejected: list[dict]  # {draft, reason}

    @property
    def created_count(self) -> int:
        return sum(len(v) for v in self.created.values())


def _resolve_component_ref(lib: Library, local: dict[str, str], ref: str) -> str | None:
    key = normalize_name(ref)
    if key in local:
        return local[key]
    if ref in lib.components:
        return ref
    found = lib.components_named(ref)
    return found[0].id if found else None


def import_batch(
    lib: Library,
    batch: dict,
    threshold: float = DUPLICATE_REVIEW_THRESHOLD,
) -> ImportReport:
    """Import a draft batch extracted from one screened source document.

    Per-draft all-or-nothing: a failing draft lands in ``rejected`` without
    aborting the rest.  Relations and heuristic consequents resolve by
    name, batch-local drafts first, then the library.
    """
    from . import dectree, heuristics

    doc_info = batch.get("source_document")
    if not doc_info:
        raise ScreeningRequiredError("batch carries no source document")
    existing = [
        d
        for d in lib.documents.values()
        if normalize_name(d.title) == normalize_name(doc_info.get("title", ""))
    ]
    if existing:
        doc = existing[0]
    else:
        did = add_document(
            lib,
            title=doc_info.get("title", ""),
            kind=doc_info.get("kind", "other"),
            citation=doc_info.get("citation", ""),
        )
        doc = lib.documents[did]
    if doc.screening is None and "screening" in batch:
        s = batch["screening"]
        screen(
            lib,
            doc.id,
            answers={q: s.get(q, False) for q in SCREENING_QUESTIONS},
            notes=s.get("notes"),
            screener=s.get("screener", ""),
            policy=s.get("policy", "strict"),
        )
    if doc.screening is None:
        raise ScreeningRequiredError(f"document {doc.id!r} has not been screened")
    if doc.screening.decision != "accept":
        raise ScreeningRequiredError(f"document {doc.id!r} was rejected at screening")

    created: dict[str, list[str]] = {
        "situational_factors": [],
        "property_definitions": [],
        "components": [],
        "relations": [],
        "heuristics": [],
        "decision_trees": [],
    }
    warnings: list[dict] = []
    rejected: list[dict] = []
    local_components: dict[str, str] = {}  # normalized draft name -> id
    source = SourceRef(citation=doc.citation)

    for draft in batch.get("situational_factors", []):
        try:
            fid = add_factor_definition(
                lib,
                name=draft["name"],
                value_domain=list(draft.get("values", [])),
                description=draft.get("description", ""),
            )
            created["situational_factors"].append(fid)
        except Exception as exc:  # noqa: BLE001 - per-draft isolation
            rejected.append({"draft": draft.get("name", "?"), "reason": str(exc)})

    for draft in batch.get("property_definitions", []):
        try:
            values = draft.get("values")
            pid = add_property_definition(
                lib,
                name=draft["name"],
                value_domain=list(values) if values is not None else None,
                description=draft.get("description", ""),
            )
            created["property_definitions"].append(pid)
        except Exception as exc:  # noqa: BLE001
            rejected.append({"draft": draft.get("name", "?"), "reason": str(exc)})

    for draft in batch.get("components", []):
        name = draft.get("name", "")
        try:
            kind = ComponentKind.parse(draft.get("kind", ""))
            for match in detect_duplicates(lib, name, kind, threshold):
                if match.needs_review:
                    warnings.append(
                        {
                            "draft": name,
                            "component_id": match.component_id,
                            "score": match.score,
                        }
                    )
            properties: dict[str, list[str]] = {}
            for pname, values in draft.get("properties", {}).items():
                pd = lib.resolve_property(pname)
                if pd is None:
                    raise UnknownIdError(f"unknown property {pname!r}")
                properties[pd.id] = list(values)
            comp_source = SourceRef(citation=doc.citation, pages=draft.get("pages"))
            cid = add_component(
                lib,
                kind=kind,
                name=name,
                description=draft.get("description", ""),
                source=comp_source,
                properties=properties,
            )
            created["components"].append(cid)
            local_components[normalize_name(name)] = cid
        except Exception as exc:  # noqa: BLE001
            rejected.append({"draft": name or "?", "reason": str(exc)})

    for draft in batch.get("relations", []):
        label = draft.get("label", "")
        try:
            from_id = _resolve_component_ref(lib, local_components, draft["from"])
            to_id = _resolve_component_ref(lib, local_components, draft["to"])
            if from_id is None or to_id is None:
                missing = draft["from"] if from_id is None else draft["to"]
                raise UnknownIdError(f"relation endpoint {missing!r} not found")
            rid = add_relation(lib, from_id, to_id, label, provenance=source)
            created["relations"].append(rid)
        except Exception as exc:  # noqa: BLE001
            rejected.append(
                {"draft": f"{draft.get('from', '?')} -> {draft.get('to', '?')}", "reason": str(exc)}
            )

    for draft in batch.get("heuristics", []):
        try:
            target = _resolve_component_ref(lib, local_components, draft["recommends"])
            if target is None:
                raise UnknownIdError(
                    f"recommended component {draft['recommends']!r} not found"
                )
            hid = heuristics.add_heuristic(
                lib,
                condition_text=draft["condition"],
                consequent=target,
                strength=draft.get("strength", "recommend"),
                rationale=draft.get("rationale", ""),
                provenance=source,
            )
            created["heuristics"].append(hid)
        except Exception as exc:  # noqa: BLE001
            rejected.append({"draft": draft.get("condition", "?"), "reason": str(exc)})

    for draft in batch.get("decision_trees", []):
        try:
            tid = dectree.load_tree(lib, draft)
            created["decision_trees"].append(tid)
        except Exception as exc:  # noqa: BLE001
            rejected.append({"draft": draft.get("name", "?"), "reason": str(exc)})

    return ImportReport(
        document_id=doc.id,
        created=created,
        duplicate_warnings=warnings,
        rejected=rejected,
    )


# ---------------------------------------------------------------------------
# Feedback


def submit_feedback(
    lib: Library,
    component_id: str,
    verdict: str,
    note: str = "",
    project: str = "",
) -> str:
    lib.component(component_id)
    if verdict not in FEEDBACK_VERDICTS:
        raise MissingAnswerError(f"unknown feedback verdict {verdict!r}")
    fid = lib.new_id("fb")
    lib.feedback[fid] = FeedbackRecord(
        id=fid,
        component_id=component_id,
        verdict=verdict,
        note=note,
        project=project,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    return fid


def feedback_summary(lib: Library, component_id: str) -> dict:
    lib.component(component_id)
    counts = {v: 0 for v in FEEDBACK_VERDICTS}
    notes = []
    for rec in sorted(lib.feedback.values(), key=lambda r: r.id):
        if rec.component_id != component_id:
            continue
        counts[rec.verdict] += 1
        if rec.note:
            notes.append(rec.note)
    return {"component_id": component_id, "counts": counts, "notes": notes}
