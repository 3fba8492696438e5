"""The ontology-typed expression language: syntax, parser, checker, evaluator."""

from .syntax import (
    BOOL,
    BoolType,
    BoolVal,
    Call,
    ConceptType,
    Definition,
    Head,
    If,
    IriLit,
    IriVal,
    LangType,
    Let,
    ListType,
    ListVal,
    Match,
    MatchCase,
    Nil,
    NonEmpty,
    Program,
    QueryTerm,
    Ref,
    RoleProj,
    Term,
    TupleIndex,
    TupleType,
    TupleVal,
    Value,
)
from .parser import parse_program
from .typecheck import LangTypeError, lub, subtype, typecheck, type_name
from .interp import EvalError, evaluate

__all__ = [
    "BOOL", "BoolType", "BoolVal", "Call", "ConceptType", "Definition",
    "Head", "If", "IriLit", "IriVal", "LangType", "Let", "ListType",
    "ListVal", "Match", "MatchCase", "Nil", "NonEmpty", "Program",
    "QueryTerm", "Ref", "RoleProj", "Term", "TupleIndex", "TupleType",
    "TupleVal", "Value",
    "parse_program", "LangTypeError", "lub", "subtype", "typecheck",
    "type_name", "EvalError", "evaluate",
]
