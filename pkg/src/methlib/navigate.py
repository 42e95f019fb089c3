"""Query-by-navigation sessions: walk the network, mark components, report.

A session is a persistent record (shared by CLI, API and web UI) holding
the situation under analysis, the ordered set of marked components, any
decision-tree walk state and an append-only action history that replays
to the same state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import UnknownIdError
from .heuristics import Truth, TruthContext, eval_condition
from .model import (
    Library,
    MethodComponent,
    Relation,
    Situation,
    check_situation,
)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class Session:
    id: str
    situation: Situation = field(default_factory=Situation)
    marked: list[str] = field(default_factory=list)  # ordered, no duplicates
    premarked: list[str] = field(default_factory=list)  # from decision trees
    history: list[dict] = field(default_factory=list)
    walks: dict[str, list] = field(default_factory=dict)  # tree id -> path
    created: str = ""
    updated: str = ""
    extra_fields: dict = field(default_factory=dict)

    def touch(self) -> None:
        self.updated = _now()

    def record_answer(self, factor_id: str, value: str, tree_id: str) -> None:
        self.situation.assignments[factor_id] = value
        self.walks.setdefault(tree_id, []).append([factor_id, value])
        self.history.append(
            {"action": "answer", "tree": tree_id, "factor": factor_id, "value": value}
        )
        self.touch()

    def set_premarked(self, component_ids) -> None:
        self.premarked = list(component_ids)
        self.touch()


@dataclass
class FiringHeuristic:
    heuristic_id: str
    component_id: str  # consequent
    strength: str


@dataclass
class SelectionReport:
    session_id: str
    situation: dict[str, str]
    components: list[MethodComponent]
    induced_relations: list[Relation]
    firing_heuristics: list[FiringHeuristic]
    dropped_marks: list[str]  # marks whose component no longer exists


# ---------------------------------------------------------------------------
# Session operations


def start_session(lib: Library, situation: Situation | None = None) -> Session:
    situation = situation.copy() if situation else Situation()
    check_situation(lib, situation)
    sid = lib.new_id("s")
    now = _now()
    session = Session(
        id=sid,
        situation=situation,
        history=[{"action": "start", "situation": dict(situation.assignments)}],
        created=now,
        updated=now,
    )
    lib.sessions[sid] = session
    return session


def get_session(lib: Library, sid: str) -> Session:
    try:
        return lib.sessions[sid]
    except KeyError:
        raise UnknownIdError(f"unknown session {sid!r}") from None


def mark(lib: Library, session: Session, cid: str) -> bool:
    """Mark a component; idempotent.  Returns whether the set changed."""
    lib.component(cid)
    changed = cid not in session.marked
    if changed:
        session.marked.append(cid)
    session.history.append({"action": "mark", "component": cid})
    session.touch()
    return changed


def unmark(lib: Library, session: Session, cid: str) -> bool:
    """Unmark a component; a no-op (flagged False) when it was not marked."""
    lib.component(cid)
    changed = cid in session.marked
    if changed:
        session.marked.remove(cid)
    session.history.append({"action": "unmark", "component": cid})
    session.touch()
    return changed


def update_situation(lib: Library, session: Session, assignments: dict[str, str]) -> None:
    """Merge factor assignments into the session situation; a None value
    clears the factor.  Marks are kept; firing heuristics simply re-evaluate."""
    merged = dict(session.situation.assignments)
    for fid, value in assignments.items():
        if value is None:
            merged.pop(fid, None)
        else:
            merged[fid] = value
    check_situation(lib, Situation(merged))
    session.situation.assignments = merged
    session.history.append({"action": "situation", "assignments": dict(assignments)})
    session.touch()


def replay(lib: Library, history: list[dict]) -> tuple[Situation, list[str]]:
    """Re-derive (situation, marked) from an action history."""
    situation = Situation()
    marked: list[str] = []
    for entry in history:
        action = entry["action"]
        if action == "start":
            situation = Situation(dict(entry["situation"]))
        elif action == "mark":
            if entry["component"] not in marked:
                marked.append(entry["component"])
        elif action == "unmark":
            if entry["component"] in marked:
                marked.remove(entry["component"])
        elif action == "answer":
            situation.assignments[entry["factor"]] = entry["value"]
        elif action == "situation":
            for fid, value in entry["assignments"].items():
                if value is None:
                    situation.assignments.pop(fid, None)
                else:
                    situation.assignments[fid] = value
    return situation, marked


def neighbors(
    lib: Library,
    cid: str,
    direction: str = "both",
    label_filter: str | None = None,
) -> list[tuple[Relation, MethodComponent]]:
    """Adjacent (relation, component) rows, ordered by label then name."""
    lib.component(cid)
    if direction not in ("in", "out", "both"):
        raise UnknownIdError(f"unknown direction {direction!r}")
    rows: list[tuple[Relation, MethodComponent]] = []
    for rel in lib.relations.values():
        if label_filter is not None and rel.label != label_filter:
            continue
        if direction in ("out", "both") and rel.from_id == cid:
            other = lib.components.get(rel.to_id)
            if other is not None:
                rows.append((rel, other))
        if direction in ("in", "both") and rel.to_id == cid:
            other = lib.components.get(rel.from_id)
            if other is not None:
                rows.append((rel, other))
    rows.sort(key=lambda pair: (pair[0].label, pair[1].name, pair[0].id))
    return rows


def report(lib: Library, session: Session) -> SelectionReport:
    """The selection report: marked components, the subgraph they induce and
    the heuristics firing for (situation, marks)."""
    alive = [cid for cid in session.marked if cid in lib.components]
    dropped = [cid for cid in session.marked if cid not in lib.components]
    marked_set = set(alive)
    induced = sorted(
        (
            rel
            for rel in lib.relations.values()
            if rel.from_id in marked_set and rel.to_id in marked_set
        ),
        key=lambda r: r.id,
    )
    ctx = TruthContext(situation=session.situation, selection=marked_set)
    firing = []
    for hid in sorted(lib.heuristics):
        h = lib.heuristics[hid]
        comp = lib.components.get(h.consequent)
        if comp is None:
            continue
        if eval_condition(h.condition, ctx, lib, candidate=comp) is Truth.TRUE:
            firing.append(FiringHeuristic(hid, h.consequent, h.strength))
    return SelectionReport(
        session_id=session.id,
        situation=dict(session.situation.assignments),
        components=[lib.components[cid] for cid in alive],
        induced_relations=induced,
        firing_heuristics=firing,
        dropped_marks=dropped,
    )


# ---------------------------------------------------------------------------
# DOT export


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(lib: Library, session: Session | None = None) -> str:
    """Graph description of the whole network, or of a session's selection."""
    if session is None:
        comps = sorted(lib.components.values(), key=lambda c: c.id)
        rels = sorted(lib.relations.values(), key=lambda r: r.id)
        marked: set[str] = set()
    else:
        rep = report(lib, session)
        comps = rep.components
        rels = rep.induced_relations
        marked = {c.id for c in comps}
    lines = ["digraph methlib {", "  rankdir=LR;"]
    for comp in comps:
        attrs = f'label="{_dot_escape(comp.name)}" shape=box'
        if comp.id in marked:
            attrs += " style=filled"
        lines.append(f'  "{comp.id}" [{attrs}];')
    for rel in rels:
        lines.append(
            f'  "{rel.from_id}" -> "{rel.to_id}" [label="{_dot_escape(rel.label)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
