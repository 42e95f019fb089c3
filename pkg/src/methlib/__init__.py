"""methlib: an architecture method library engine.

Typed method components coupled by relations form a navigable network;
IF-THEN heuristics over situational factors recommend components; exact
queries, interactive navigation sessions and decision trees provide three
access paths; a screened ingestion pipeline keeps the corpus curated.
"""

from .model import (
    ComponentKind,
    Library,
    MethodComponent,
    PropertyDefinition,
    Relation,
    Situation,
    SituationalFactorDef,
    SourceRef,
    add_component,
    add_relation,
    build_network,
    validate,
)

__all__ = [
    "ComponentKind",
    "Library",
    "MethodComponent",
    "PropertyDefinition",
    "Relation",
    "Situation",
    "SituationalFactorDef",
    "SourceRef",
    "add_component",
    "add_relation",
    "build_network",
    "validate",
]

__version__ = "1.0.0"
