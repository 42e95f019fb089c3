"""IF-THEN heuristics: condition language, three-valued evaluator, recommender.

Conditions are boolean expressions over the project situation
(``factor(...)``), the current selection (``selected(...)``) and the
candidate component's properties (``prop(...)``).  Situations may be
partial, so evaluation is three-valued (strong Kleene): a heuristic only
fires on a definite ``true``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from . import dsl
from .dsl import And, BoolParser, Not, Or, quote
from .errors import (
    OutOfDomainError,
    UnknownFactorError,
    UnknownPropertyError,
)
from .model import (
    Library,
    MethodComponent,
    Situation,
    SourceRef,
    normalize_name,
    require_valid,
)

# ---------------------------------------------------------------------------
# AST atoms


@dataclass(frozen=True)
class TrueConst:
    pass


@dataclass(frozen=True)
class FactorEquals:
    factor: str  # factor id or name slug, as written
    value: str


@dataclass(frozen=True)
class FactorIn:
    factor: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class SelectedAtom:
    target: str  # component id or (case-insensitive) name


@dataclass(frozen=True)
class PropEquals:
    prop: str  # property id or name slug
    value: str


@dataclass
class TruthContext:
    situation: Situation = field(default_factory=Situation)
    selection: set[str] = field(default_factory=set)


@dataclass
class Heuristic:
    id: str
    condition: object  # condition AST
    consequent: str  # recommended component id
    strength: str = "recommend"  # or "discourage"
    rationale: str = ""
    provenance: SourceRef = field(default_factory=SourceRef)
    extra_fields: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Parsing / printing


class _ConditionParser(BoolParser):
    def parse_atom(self):
        if self.at_keyword("true"):
            self.advance()
            return TrueConst()
        if self.at_keyword("factor"):
            self.advance()
            self.expect_punct("(")
            ident = self.expect_ident()
            self.expect_punct(")")
            if self.at_keyword("in"):
                self.advance()
                self.expect_punct("{")
                values = [self.expect_string()]
                while self.at_punct(","):
                    self.advance()
                    values.append(self.expect_string())
                self.expect_punct("}")
                return FactorIn(ident, tuple(values))
            self.expect_punct("=")
            return FactorEquals(ident, self.expect_string())
        if self.at_keyword("selected"):
            self.advance()
            self.expect_punct("(")
            target = self.expect_string()
            self.expect_punct(")")
            return SelectedAtom(target)
        if self.at_keyword("prop"):
            self.advance()
            self.expect_punct("(")
            ident = self.expect_ident()
            self.expect_punct(")")
            self.expect_punct("=")
            return PropEquals(ident, self.expect_string())
        raise self.fail("a condition atom")


def _print_atom(atom) -> str:
    if isinstance(atom, TrueConst):
        return "true"
    if isinstance(atom, FactorEquals):
        return f"factor({atom.factor}) = {quote(atom.value)}"
    if isinstance(atom, FactorIn):
        inner = ", ".join(quote(v) for v in atom.values)
        return f"factor({atom.factor}) in {{{inner}}}"
    if isinstance(atom, SelectedAtom):
        return f"selected({quote(atom.target)})"
    if isinstance(atom, PropEquals):
        return f"prop({atom.prop}) = {quote(atom.value)}"
    raise TypeError(f"not a condition atom: {atom!r}")


def print_condition(ast) -> str:
    return dsl.print_expr(ast, _print_atom)


def parse_condition(text: str, lib: Library | None = None):
    """Parse condition text; with a library, also check references/domains."""
    ast = _ConditionParser(text).parse()
    if lib is not None:
        raise_condition_problems(ast, lib)
    return ast


def _condition_problems(ast, lib: Library) -> Iterable[tuple[str, str]]:
    for atom in iter_atoms(ast):
        if isinstance(atom, (FactorEquals, FactorIn)):
            fd = lib.resolve_factor(atom.factor)
            if fd is None:
                yield "unknown_factor", f"unknown situational factor {atom.factor!r}"
                continue
            values = (atom.value,) if isinstance(atom, FactorEquals) else atom.values
            for v in values:
                if v not in fd.value_domain:
                    yield (
                        "out_of_domain",
                        f"value {v!r} not in domain of factor {fd.name!r}",
                    )
        elif isinstance(atom, PropEquals):
            pd = lib.resolve_property(atom.prop)
            if pd is None:
                yield "unknown_property", f"unknown property {atom.prop!r}"
            elif pd.value_domain is not None and atom.value not in pd.value_domain:
                yield (
                    "out_of_domain",
                    f"value {atom.value!r} not in domain of property {pd.name!r}",
                )


def check_condition(ast, lib: Library) -> list[str]:
    return [msg for _, msg in _condition_problems(ast, lib)]


_PROBLEM_ERRORS = {
    "unknown_factor": UnknownFactorError,
    "unknown_property": UnknownPropertyError,
    "out_of_domain": OutOfDomainError,
}


def raise_condition_problems(ast, lib: Library) -> None:
    for code, msg in _condition_problems(ast, lib):
        raise _PROBLEM_ERRORS[code](msg)


def iter_atoms(ast):
    if isinstance(ast, (And, Or)):
        for item in ast.items:
            yield from iter_atoms(item)
    elif isinstance(ast, Not):
        yield from iter_atoms(ast.child)
    else:
        yield ast


# ---------------------------------------------------------------------------
# Three-valued evaluation


class Truth(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


def _t_not(a: Truth) -> Truth:
    if a is Truth.TRUE:
        return Truth.FALSE
    if a is Truth.FALSE:
        return Truth.TRUE
    return Truth.UNKNOWN


def _t_and(values: Iterable[Truth]) -> Truth:
    out = Truth.TRUE
    for v in values:
        if v is Truth.FALSE:
            return Truth.FALSE
        if v is Truth.UNKNOWN:
            out = Truth.UNKNOWN
    return out


def _t_or(values: Iterable[Truth]) -> Truth:
    out = Truth.FALSE
    for v in values:
        if v is Truth.TRUE:
            return Truth.TRUE
        if v is Truth.UNKNOWN:
            out = Truth.UNKNOWN
    return out


def eval_condition(
    ast,
    ctx: TruthContext,
    lib: Library,
    candidate: MethodComponent | None = None,
) -> Truth:
    """Strong-Kleene evaluation; an unassigned factor yields ``unknown``."""
    if isinstance(ast, And):
        return _t_and(eval_condition(x, ctx, lib, candidate) for x in ast.items)
    if isinstance(ast, Or):
        return _t_or(eval_condition(x, ctx, lib, candidate) for x in ast.items)
    if isinstance(ast, Not):
        return _t_not(eval_condition(ast.child, ctx, lib, candidate))
    if isinstance(ast, TrueConst):
        return Truth.TRUE
    if isinstance(ast, (FactorEquals, FactorIn)):
        fd = lib.resolve_factor(ast.factor)
        if fd is None:
            raise UnknownFactorError(f"unknown situational factor {ast.factor!r}")
        assigned = ctx.situation.assignments.get(fd.id)
        if assigned is None:
            return Truth.UNKNOWN
        if isinstance(ast, FactorEquals):
            return Truth.TRUE if assigned == ast.value else Truth.FALSE
        return Truth.TRUE if assigned in ast.values else Truth.FALSE
    if isinstance(ast, SelectedAtom):
        wanted = normalize_name(ast.target)
        for cid in ctx.selection:
            comp = lib.components.get(cid)
            if comp is None:
                continue
            if cid == ast.target or normalize_name(comp.name) == wanted:
                return Truth.TRUE
        return Truth.FALSE
    if isinstance(ast, PropEquals):
        pd = lib.resolve_property(ast.prop)
        if pd is None:
            raise UnknownPropertyError(f"unknown property {ast.prop!r}")
        if candidate is None:
            return Truth.UNKNOWN
        values = candidate.properties.get(pd.id)
        if values is None:
            return Truth.UNKNOWN
        return Truth.TRUE if ast.value in values else Truth.FALSE
    raise TypeError(f"not a condition node: {ast!r}")


# ---------------------------------------------------------------------------
# Recommendation


@dataclass
class Recommendation:
    component_id: str
    component_name: str
    firing: list[str]  # heuristic ids whose condition is true
    recommends: int
    discourages: int

    @property
    def discouraged_only(self) -> bool:
        return self.recommends == 0


def add_heuristic(
    lib: Library,
    condition_text: str,
    consequent: str,
    strength: str = "recommend",
    rationale: str = "",
    provenance: SourceRef | None = None,
) -> str:
    if strength not in ("recommend", "discourage"):
        raise OutOfDomainError(f"unknown heuristic strength {strength!r}")
    lib.component(consequent)
    ast = parse_condition(condition_text, lib)
    hid = lib.new_id("h")
    lib.heuristics[hid] = Heuristic(
        id=hid,
        condition=ast,
        consequent=consequent,
        strength=strength,
        rationale=rationale,
        provenance=provenance or SourceRef(),
    )
    return hid


def recommend(lib: Library, ctx: TruthContext) -> list[Recommendation]:
    """Fire every heuristic against the context and group per component.

    Only a definite ``true`` fires.  Ordering: number of firing
    recommend-heuristics descending, ties by component name ascending.
    """
    require_valid(lib)
    per_component: dict[str, Recommendation] = {}
    for hid in sorted(lib.heuristics):
        h = lib.heuristics[hid]
        comp = lib.components[h.consequent]
        if eval_condition(h.condition, ctx, lib, candidate=comp) is not Truth.TRUE:
            continue
        rec = per_component.get(h.consequent)
        if rec is None:
            rec = Recommendation(comp.id, comp.name, [], 0, 0)
            per_component[h.consequent] = rec
        rec.firing.append(hid)
        if h.strength == "recommend":
            rec.recommends += 1
        else:
            rec.discourages += 1
    return sorted(
        per_component.values(),
        key=lambda r: (-r.recommends, r.component_name, r.component_id),
    )


# ---------------------------------------------------------------------------
# Rule analysis (librarian tooling)


@dataclass
class RuleReport:
    never_firing: list[str]
    conflicts: list[tuple[str, str, str]]  # (recommend id, discourage id, component)
    inconclusive: bool = False
    cases_checked: int = 0


def _analysis_pool(lib: Library) -> tuple[list, list[str]]:
    """Factors referenced by any condition and the candidate selection pool
    (consequents plus selected() targets)."""
    factors: dict[str, object] = {}
    pool: set[str] = set()
    for h in lib.heuristics.values():
        pool.add(h.consequent)
        for atom in iter_atoms(h.condition):
            if isinstance(atom, (FactorEquals, FactorIn)):
                fd = lib.resolve_factor(atom.factor)
                if fd is not None:
                    factors[fd.id] = fd
            elif isinstance(atom, SelectedAtom):
                for comp in lib.components_named(atom.target):
                    pool.add(comp.id)
                if atom.target in lib.components:
                    pool.add(atom.target)
    return list(factors.values()), sorted(pool)


def analyze_rules(lib: Library, max_cases: int = 50000) -> RuleReport:
    """Exhaustively enumerate full situations and candidate selections.

    Never gives a wrong answer: when the case count exceeds ``max_cases``
    the report is marked inconclusive instead.
    """
    require_valid(lib)
    factors, pool = _analysis_pool(lib)

    n_situations = 1
    for fd in factors:
        n_situations *= len(fd.value_domain)
    total = n_situations * (2 ** len(pool))
    if total > max_cases:
        return RuleReport([], [], inconclusive=True, cases_checked=0)

    fired: dict[str, bool] = {hid: False for hid in lib.heuristics}
    both_fired: set[tuple[str, str]] = set()
    hids = sorted(lib.heuristics)
    cases = 0
    domains = [fd.value_domain for fd in factors]
    for values in itertools.product(*domains) if factors else [()]:
        situation = Situation({fd.id: v for fd, v in zip(factors, values)})
        for mask in range(2 ** len(pool)):
            selection = {pool[i] for i in range(len(pool)) if mask >> i & 1}
            ctx = TruthContext(situation=situation, selection=selection)
            cases += 1
            true_now = []
            for hid in hids:
                h = lib.heuristics[hid]
                comp = lib.components[h.consequent]
                if eval_condition(h.condition, ctx, lib, candidate=comp) is Truth.TRUE:
                    fired[hid] = True
                    true_now.append(hid)
            for a, b in itertools.combinations(true_now, 2):
                ha, hb = lib.heuristics[a], lib.heuristics[b]
                if ha.consequent != hb.consequent:
                    continue
                if {ha.strength, hb.strength} == {"recommend", "discourage"}:
                    pair = (a, b) if ha.strength == "recommend" else (b, a)
                    both_fired.add(pair + (ha.consequent,))
    return RuleReport(
        never_firing=[hid for hid in hids if not fired[hid]],
        conflicts=sorted(both_fired),
        inconclusive=False,
        cases_checked=cases,
    )
