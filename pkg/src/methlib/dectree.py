"""Decision trees: situational-factor questions leading to pre-marked leaves.

Trees are data, authored in the library file, so librarians can add them
without code changes.  Walking a tree answers factor questions; each
answer is also recorded into the active session's situation, which keeps
all three access mechanisms feeding the same analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import BadAnswerError, TreeDefinitionError, WalkStateError
from .model import Library


@dataclass
class Leaf:
    premarked: tuple[str, ...] = ()  # component ids
    note: str = ""


@dataclass
class Question:
    factor: str  # situational factor id
    branches: dict[str, "TreeNode"] = field(default_factory=dict)
    default: Union["TreeNode", None] = None


TreeNode = Union[Leaf, Question]


@dataclass
class DecisionTree:
    id: str
    name: str
    root: TreeNode
    extra_fields: dict = field(default_factory=dict)


@dataclass
class Walk:
    tree_id: str
    path: list[tuple[str, str]] = field(default_factory=list)  # (factor id, value)
    cursor: TreeNode = field(default_factory=Leaf)


# ---------------------------------------------------------------------------
# Definition loading


def node_from_dict(data: dict, lib: Library, *, _seen: set[int] | None = None) -> TreeNode:
    """Build a tree node from its dict form.  Factors may be referenced by
    id or name slug, components by id or name."""
    if not isinstance(data, dict):
        raise TreeDefinitionError(f"tree node must be an object, got {data!r}")
    seen = _seen if _seen is not None else set()
    if id(data) in seen:
        raise TreeDefinitionError("cycle in tree definition")
    seen.add(id(data))
    try:
        if "question" in data:
            fd = lib.resolve_factor(str(data["question"]))
            if fd is None:
                raise TreeDefinitionError(
                    f"unknown situational factor {data['question']!r}"
                )
            branches = {}
            for value, child in data.get("branches", {}).items():
                if value not in fd.value_domain:
                    raise TreeDefinitionError(
                        f"branch value {value!r} not in domain of {fd.name!r}"
                    )
                branches[value] = node_from_dict(child, lib, _seen=seen)
            default = None
            if data.get("default") is not None:
                default = node_from_dict(data["default"], lib, _seen=seen)
            return Question(factor=fd.id, branches=branches, default=default)
        if "premark" in data:
            ids = []
            for ref in data["premark"]:
                if ref in lib.components:
                    ids.append(ref)
                    continue
                found = lib.components_named(str(ref))
                if not found:
                    raise TreeDefinitionError(f"unknown premarked component {ref!r}")
                ids.append(found[0].id)
            return Leaf(premarked=tuple(ids), note=data.get("note", ""))
        raise TreeDefinitionError("tree node needs either 'question' or 'premark'")
    finally:
        seen.discard(id(data))


def node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        out: dict = {"premark": list(node.premarked)}
        if node.note:
            out["note"] = node.note
        return out
    out = {
        "question": node.factor,
        "branches": {v: node_to_dict(c) for v, c in node.branches.items()},
    }
    if node.default is not None:
        out["default"] = node_to_dict(node.default)
    return out


def check_tree(tree: DecisionTree, lib: Library) -> list[str]:
    problems: list[str] = []

    def walk(node: TreeNode) -> None:
        if isinstance(node, Leaf):
            for cid in node.premarked:
                if cid not in lib.components:
                    problems.append(f"premarked component {cid!r} missing")
            return
        fd = lib.factor_defs.get(node.factor)
        if fd is None:
            problems.append(f"unknown situational factor {node.factor!r}")
        for value, child in node.branches.items():
            if fd is not None and value not in fd.value_domain:
                problems.append(
                    f"branch value {value!r} not in domain of {fd.name!r}"
                )
            walk(child)
        if node.default is not None:
            walk(node.default)

    walk(tree.root)
    return problems


def load_tree(lib: Library, definition: dict) -> str:
    """Validate and register a decision tree from its dict definition."""
    name = str(definition.get("name", "")).strip()
    if not name:
        raise TreeDefinitionError("tree needs a non-empty name")
    if "root" not in definition:
        raise TreeDefinitionError("tree needs a root node")
    root = node_from_dict(definition["root"], lib)
    tid = lib.new_id("t")
    lib.trees[tid] = DecisionTree(id=tid, name=name, root=root)
    return tid


# ---------------------------------------------------------------------------
# Walking


def start_walk(lib: Library, tree_id: str) -> Walk:
    if tree_id not in lib.trees:
        raise WalkStateError(f"unknown decision tree {tree_id!r}")
    tree = lib.trees[tree_id]
    return Walk(tree_id=tree_id, path=[], cursor=tree.root)


def replay_walk(lib: Library, tree_id: str, path: list[tuple[str, str]]) -> Walk:
    walk = start_walk(lib, tree_id)
    for _, value in path:
        step(lib, walk, value)
    return walk


def current_question(walk: Walk, lib: Library):
    """The pending (factor def, allowed answers), or None at a leaf."""
    if isinstance(walk.cursor, Leaf):
        return None
    fd = lib.factor_defs[walk.cursor.factor]
    return fd, list(fd.value_domain)


def step(lib: Library, walk: Walk, answer: str, session=None) -> Walk:
    node = walk.cursor
    if not isinstance(node, Question):
        raise WalkStateError("walk is already at a leaf")
    fd = lib.factor_defs[node.factor]
    if answer in node.branches:
        nxt = node.branches[answer]
    elif node.default is not None:
        nxt = node.default
    else:
        raise BadAnswerError(
            f"answer {answer!r} has no branch in question on {fd.name!r}"
        )
    walk.path.append((node.factor, answer))
    walk.cursor = nxt
    if session is not None:
        session.record_answer(node.factor, answer, walk.tree_id)
        if isinstance(nxt, Leaf):
            session.set_premarked(nxt.premarked)
    return walk


def result(walk: Walk) -> tuple[str, ...]:
    if not isinstance(walk.cursor, Leaf):
        raise WalkStateError("walk has not reached a leaf")
    return walk.cursor.premarked


def iter_paths(tree: DecisionTree):
    """Yield every (answer path, leaf) pair of a tree."""

    def rec(node: TreeNode, path: tuple):
        if isinstance(node, Leaf):
            yield list(path), node
            return
        for value, child in node.branches.items():
            yield from rec(child, path + ((node.factor, value),))
        if node.default is not None:
            yield from rec(node.default, path + ((node.factor, None),))

    yield from rec(tree.root, ())


def coherence_report(lib: Library, tree_id: str) -> list[dict]:
    """Diagnostic: for each leaf, premarks not backed by a firing heuristic
    for the situation implied by the path.  Deviations are reported only."""
    from .heuristics import TruthContext, recommend
    from .model import Situation

    tree = lib.trees[tree_id]
    out = []
    for path, leaf in iter_paths(tree):
        situation = Situation(
            {fid: value for fid, value in path if value is not None}
        )
        recommended = {
            r.component_id
            for r in recommend(lib, TruthContext(situation=situation))
        }
        unbacked = [cid for cid in leaf.premarked if cid not in recommended]
        if unbacked:
            out.append({"path": path, "unbacked": unbacked})
    return out
