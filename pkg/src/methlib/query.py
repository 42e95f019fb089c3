"""Exact-query access: a small boolean DSL over component metadata.

Atoms: ``kind = Principle``, ``name ~ "model"``, ``source ~ "..."``,
``prop(aspect)`` (has the property), ``prop(aspect) = "what"`` and
``all``.  Results are exact sets with deterministic ordering, no
relevance ranking.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import dsl
from .dsl import And, BoolParser, Not, Or, quote
from .errors import OutOfDomainError, UnknownPropertyError
from .model import ComponentKind, Library, MethodComponent, require_valid

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class All:
    pass


@dataclass(frozen=True)
class KindIs:
    kind: ComponentKind


@dataclass(frozen=True)
class NameContains:
    text: str


@dataclass(frozen=True)
class SourceContains:
    text: str


@dataclass(frozen=True)
class HasProperty:
    prop: str  # property id or name slug


@dataclass(frozen=True)
class PropertyEquals:
    prop: str
    value: str


# ---------------------------------------------------------------------------
# Parsing / printing


class _QueryParser(BoolParser):
    def parse_atom(self):
        if self.at_keyword("all"):
            self.advance()
            return All()
        if self.at_keyword("kind"):
            self.advance()
            self.expect_punct("=")
            return KindIs(ComponentKind.parse(self.expect_ident()))
        if self.at_keyword("name"):
            self.advance()
            self.expect_punct("~")
            return NameContains(self.expect_string())
        if self.at_keyword("source"):
            self.advance()
            self.expect_punct("~")
            return SourceContains(self.expect_string())
        if self.at_keyword("prop"):
            self.advance()
            self.expect_punct("(")
            ident = self.expect_ident()
            self.expect_punct(")")
            if self.at_punct("="):
                self.advance()
                return PropertyEquals(ident, self.expect_string())
            return HasProperty(ident)
        raise self.fail("a query atom")


def _print_atom(atom) -> str:
    if isinstance(atom, All):
        return "all"
    if isinstance(atom, KindIs):
        return f"kind = {atom.kind.value}"
    if isinstance(atom, NameContains):
        return f"name ~ {quote(atom.text)}"
    if isinstance(atom, SourceContains):
        return f"source ~ {quote(atom.text)}"
    if isinstance(atom, HasProperty):
        return f"prop({atom.prop})"
    if isinstance(atom, PropertyEquals):
        return f"prop({atom.prop}) = {quote(atom.value)}"
    raise TypeError(f"not a query atom: {atom!r}")


def print_query(ast) -> str:
    return dsl.print_expr(ast, _print_atom)


def parse_query(text: str, lib: Library | None = None):
    ast = _QueryParser(text).parse()
    if lib is not None:
        check_query(ast, lib)
    return ast


def check_query(ast, lib: Library) -> None:
    for atom in _iter_atoms(ast):
        if isinstance(atom, (HasProperty, PropertyEquals)):
            pd = lib.resolve_property(atom.prop)
            if pd is None:
                raise UnknownPropertyError(f"unknown property {atom.prop!r}")
            if (
                isinstance(atom, PropertyEquals)
                and pd.value_domain is not None
                and atom.value not in pd.value_domain
            ):
                raise OutOfDomainError(
                    f"value {atom.value!r} not in domain of property {pd.name!r}"
                )


def _iter_atoms(ast):
    if isinstance(ast, (And, Or)):
        for item in ast.items:
            yield from _iter_atoms(item)
    elif isinstance(ast, Not):
        yield from _iter_atoms(ast.child)
    else:
        yield ast


# ---------------------------------------------------------------------------
# Evaluation


def matches(component: MethodComponent, ast, lib: Library) -> bool:
    """Denotation of a query at a single component."""
    if isinstance(ast, And):
        return all(matches(component, x, lib) for x in ast.items)
    if isinstance(ast, Or):
        return any(matches(component, x, lib) for x in ast.items)
    if isinstance(ast, Not):
        return not matches(component, ast.child, lib)
    if isinstance(ast, All):
        return True
    if isinstance(ast, KindIs):
        return component.kind is ast.kind
    if isinstance(ast, NameContains):
        return ast.text.lower() in component.name.lower()
    if isinstance(ast, SourceContains):
        return ast.text.lower() in component.source.citation.lower()
    if isinstance(ast, (HasProperty, PropertyEquals)):
        pd = lib.resolve_property(ast.prop)
        if pd is None:
            raise UnknownPropertyError(f"unknown property {ast.prop!r}")
        values = component.properties.get(pd.id)
        if values is None:
            return False
        if isinstance(ast, HasProperty):
            return True
        return ast.value in values
    raise TypeError(f"not a query node: {ast!r}")


def eval_query(lib: Library, ast) -> list[str]:
    """Component ids satisfying the query, ordered by name then id."""
    require_valid(lib)
    hits = [c for c in lib.components.values() if matches(c, ast, lib)]
    hits.sort(key=lambda c: (c.name, c.id))
    return [c.id for c in hits]
