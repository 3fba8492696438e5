"""Abstract syntax for the ontology-typed expression language.

First-order: named definitions with typed parameters (mutual recursion
allowed), an expression body each, and one ``main`` expression.  Types are
concept expressions, lists, tuples and booleans.  Terms cover IRI
literals, calls, embedded queries (strict or not), role projections,
concept-guarded match, if/let, tuple indexing and the three list
builtins.

Term nodes compare by identity so the type checker can annotate them in a
side table; every node carries its source position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union as TUnion

from ..model import Concept, Iri, Role
from ..query import SelectQuery

Pos = tuple[int, int]


# --- types ------------------------------------------------------------------


@dataclass(frozen=True)
class ConceptType:
    concept: Concept


@dataclass(frozen=True)
class ListType:
    elem: "LangType"


@dataclass(frozen=True)
class TupleType:
    items: tuple["LangType", ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise ValueError("tuple types have arity >= 2")


@dataclass(frozen=True)
class BoolType:
    pass


LangType = TUnion[ConceptType, ListType, TupleType, BoolType]
BOOL = BoolType()


# --- terms ------------------------------------------------------------------


@dataclass(eq=False)
class Term:
    pos: Pos = field(init=False, default=(0, 0))

    def at(self, pos: Pos):
        self.pos = pos
        return self


@dataclass(eq=False)
class Ref(Term):
    name: str


@dataclass(eq=False)
class IriLit(Term):
    iri: Iri
    ascription: Concept | None = None


@dataclass(eq=False)
class Call(Term):
    name: str
    args: tuple[Term, ...]


@dataclass(eq=False)
class QueryTerm(Term):
    query: SelectQuery
    strict: bool


@dataclass(eq=False)
class RoleProj(Term):
    subject: Term
    role: Role


@dataclass(eq=False)
class MatchCase:
    binder: str
    concept: Concept
    body: Term


@dataclass(eq=False)
class Match(Term):
    subject: Term
    cases: tuple[MatchCase, ...]
    default: Term


@dataclass(eq=False)
class If(Term):
    cond: Term
    then: Term
    orelse: Term


@dataclass(eq=False)
class Let(Term):
    name: str
    value: Term
    body: Term


@dataclass(eq=False)
class TupleIndex(Term):
    subject: Term
    index: int  # 1-based


@dataclass(eq=False)
class NonEmpty(Term):
    arg: Term


@dataclass(eq=False)
class Head(Term):
    arg: Term


@dataclass(eq=False)
class Nil(Term):
    elem_type: LangType


# --- programs ---------------------------------------------------------------


@dataclass(eq=False)
class Definition:
    name: str
    params: tuple[tuple[str, LangType], ...]
    return_type: LangType
    body: Term
    pos: Pos


@dataclass(eq=False)
class Program:
    prefixes: Mapping[str, str]
    definitions: Mapping[str, Definition]
    main: Term


# --- values -----------------------------------------------------------------


@dataclass(frozen=True)
class IriVal:
    iri: Iri


@dataclass(frozen=True)
class BoolVal:
    value: bool


@dataclass(frozen=True)
class ListVal:
    items: tuple["Value", ...]


@dataclass(frozen=True)
class TupleVal:
    items: tuple["Value", ...]


Value = TUnion[IriVal, BoolVal, ListVal, TupleVal]
