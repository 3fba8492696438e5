"""Textual format for knowledge bases and concept expressions.

One statement per line, ``#`` comments, prefix declarations up front::

    prefix : <http://example.org/uni#>
    :Person and :Organization SubClassOf Nothing
    :Employee SubClassOf :Person and :worksFor some :Organization
    :alice Type :Chair
    :bob Fact :worksFor :softlang

Concept syntax, tightest binding first: ``not``, then ``some``/``only``
(role on the left, as in ``:worksFor some :Organization``), then ``and``,
then ``or``; parentheses override.  ``Thing``/``Nothing`` are top/bottom,
``{:alice}`` is a nominal, ``inv(:headOf)`` an inverted role.  Printing is
canonical: ``parse_concept(print_concept(c)) == c`` structurally.
"""

from __future__ import annotations

import re
from typing import Mapping

from .lexing import ParseError, Token, TokenStream, tokenize
from .model import (
    And,
    Atomic,
    BOTTOM,
    Bottom,
    Concept,
    ConceptAssertion,
    Equivalent,
    Exists,
    Forall,
    Iri,
    KnowledgeBase,
    Nominal,
    Not,
    Or,
    Role,
    RoleAssertion,
    SubClass,
    TOP,
    Top,
)

__all__ = [
    "ParseError",
    "parse_kb",
    "parse_concept",
    "parse_role",
    "print_concept",
    "print_role",
    "print_kb",
]

def expand_name(tok: Token, prefixes: Mapping[str, str]) -> Iri:
    """Resolve an IRIREF or PNAME token to an absolute IRI."""
    if tok.kind == "IRIREF":
        value = tok.text[1:-1]
        if not value:
            raise ParseError(tok.line, tok.column, "empty IRI")
        return Iri(value)
    if tok.kind == "PNAME":
        alias, _, local = tok.text.partition(":")
        if alias not in prefixes:
            raise ParseError(tok.line, tok.column, f"unknown prefix {alias + ':'!r}")
        return Iri(prefixes[alias] + local)
    raise ParseError(tok.line, tok.column, f"expected a name, found {tok.text!r}")


def _at_name(ts: TokenStream) -> bool:
    return ts.peek().kind in ("IRIREF", "PNAME")


def read_name(ts: TokenStream, prefixes: Mapping[str, str]) -> Iri:
    if not _at_name(ts):
        raise ts.error("expected an IRI or prefixed name")
    return expand_name(ts.next(), prefixes)


def read_role(ts: TokenStream, prefixes: Mapping[str, str]) -> Role:
    """``inv(:r)`` or a plain role name."""
    if ts.at_word("inv"):
        ts.next()
        ts.take_punct("(")
        iri = read_name(ts, prefixes)
        ts.take_punct(")")
        return Role(iri, inverse=True)
    return Role(read_name(ts, prefixes))


def read_concept(ts: TokenStream, prefixes: Mapping[str, str]) -> Concept:
    """Parse one concept expression from the stream (stops at foreign tokens)."""
    return _or_expr(ts, prefixes)


def _or_expr(ts: TokenStream, prefixes: Mapping[str, str]) -> Concept:
    c = _and_expr(ts, prefixes)
    while ts.at_word("or"):
        ts.next()
        c = Or(c, _and_expr(ts, prefixes))
    return c


def _and_expr(ts: TokenStream, prefixes: Mapping[str, str]) -> Concept:
    c = _qual_expr(ts, prefixes)
    while ts.at_word("and"):
        ts.next()
        c = And(c, _qual_expr(ts, prefixes))
    return c


def _qual_expr(ts: TokenStream, prefixes: Mapping[str, str]) -> Concept:
    # A name followed by a quantifier keyword is a role; otherwise fall
    # through to the unary level, where the same name is an atomic concept.
    if ts.at_word("inv") or (_at_name(ts) and ts.peek(1).kind == "WORD"
                             and ts.peek(1).text in ("some", "only")):
        role = read_role(ts, prefixes)
        quant = ts.next()
        filler = _qual_expr(ts, prefixes)
        if quant.text == "some":
            return Exists(role, filler)
        if quant.text == "only":
            return Forall(role, filler)
        raise ParseError(quant.line, quant.column, "expected 'some' or 'only'")
    return _unary(ts, prefixes)


def _unary(ts: TokenStream, prefixes: Mapping[str, str]) -> Concept:
    if ts.at_word("not"):
        ts.next()
        return Not(_unary(ts, prefixes))
    return _atom(ts, prefixes)


def _atom(ts: TokenStream, prefixes: Mapping[str, str]) -> Concept:
    if ts.at_word("Thing"):
        ts.next()
        return TOP
    if ts.at_word("Nothing"):
        ts.next()
        return BOTTOM
    if ts.at_punct("{"):
        ts.next()
        obj = read_name(ts, prefixes)
        ts.take_punct("}")
        return Nominal(obj)
    if ts.at_punct("("):
        ts.next()
        c = _or_expr(ts, prefixes)
        ts.take_punct(")")
        return c
    if _at_name(ts):
        return Atomic(expand_name(ts.next(), prefixes))
    raise ts.error("expected a concept expression")


def parse_concept(text: str, prefixes: Mapping[str, str]) -> Concept:
    """Parse a standalone concept expression (newlines treated as spaces)."""
    tokens = [t for t in tokenize(text) if t.kind != "NL"]
    ts = TokenStream(tokens)
    c = read_concept(ts, prefixes)
    if ts.peek().kind != "EOF":
        raise ts.error("trailing input after concept")
    return c


def parse_role(text: str, prefixes: Mapping[str, str]) -> Role:
    """Parse a standalone role expression (a name or ``inv(name)``)."""
    tokens = [t for t in tokenize(text) if t.kind != "NL"]
    ts = TokenStream(tokens)
    role = read_role(ts, prefixes)
    if ts.peek().kind != "EOF":
        raise ts.error("trailing input after role")
    return role


def parse_kb(text: str) -> KnowledgeBase:
    """Parse a knowledge-base document into an IRI-expanded KnowledgeBase."""
    ts = TokenStream(tokenize(text))
    prefixes: dict[str, str] = {}
    tbox: list[SubClass | Equivalent] = []
    abox: list[ConceptAssertion | RoleAssertion] = []

    def end_statement() -> None:
        tok = ts.peek()
        if tok.kind not in ("NL", "EOF"):
            raise ts.error("expected end of statement")
        ts.skip_newlines()

    ts.skip_newlines()
    while ts.peek().kind != "EOF":
        if ts.at_word("prefix"):
            ts.next()
            tok = ts.peek()
            if tok.kind != "PNAME" or tok.text.partition(":")[2]:
                raise ts.error("expected a prefix alias ending in ':'")
            ts.next()
            alias = tok.text[:-1]
            if alias in prefixes:
                raise ParseError(tok.line, tok.column, f"duplicate prefix {tok.text!r}")
            iri_tok = ts.peek()
            if iri_tok.kind != "IRIREF":
                raise ts.error("expected <iri> after prefix alias")
            ts.next()
            prefixes[alias] = iri_tok.text[1:-1]
            end_statement()
            continue

        start = ts.peek()
        left = read_concept(ts, prefixes)
        if ts.at_word("SubClassOf"):
            ts.next()
            tbox.append(SubClass(left, read_concept(ts, prefixes)))
        elif ts.at_word("EquivalentTo"):
            ts.next()
            tbox.append(Equivalent(left, read_concept(ts, prefixes)))
        elif ts.at_word("Type"):
            if not isinstance(left, Atomic):
                raise ParseError(start.line, start.column,
                                 "left side of 'Type' must be an object name")
            ts.next()
            abox.append(ConceptAssertion(left.iri, read_concept(ts, prefixes)))
        elif ts.at_word("Fact"):
            if not isinstance(left, Atomic):
                raise ParseError(start.line, start.column,
                                 "left side of 'Fact' must be an object name")
            ts.next()
            role = read_role(ts, prefixes)
            obj = read_name(ts, prefixes)
            abox.append(RoleAssertion(left.iri, role, obj))
        else:
            raise ts.error("expected SubClassOf, EquivalentTo, Type or Fact")
        end_statement()

    return KnowledgeBase(tuple(tbox), tuple(abox), prefixes)


_LOCAL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*$")


def shorten(iri: Iri, prefixes: Mapping[str, str] | None) -> str:
    """Prefixed form of an IRI when some declared prefix covers it, else ``<iri>``."""
    if prefixes:
        best: tuple[int, str] | None = None
        for alias, base in prefixes.items():
            if iri.value.startswith(base) and _LOCAL_RE.match(iri.value[len(base):]):
                key = (-len(base), alias)
                if best is None or key < best:
                    best = key
        if best is not None:
            alias = best[1]
            return f"{alias}:{iri.value[len(prefixes[alias]):]}"
    return f"<{iri.value}>"


def print_role(role: Role, prefixes: Mapping[str, str] | None = None) -> str:
    name = shorten(role.iri, prefixes)
    return f"inv({name})" if role.inverse else name


# Precedence levels used by the printer; a child is parenthesised whenever
# its own level is below what its context requires.
_LEVEL_OR, _LEVEL_AND, _LEVEL_QUAL, _LEVEL_UNARY, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(c: Concept) -> int:
    if isinstance(c, Or):
        return _LEVEL_OR
    if isinstance(c, And):
        return _LEVEL_AND
    if isinstance(c, (Exists, Forall)):
        return _LEVEL_QUAL
    if isinstance(c, Not):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def _render(c: Concept, require: int, prefixes: Mapping[str, str] | None) -> str:
    text: str
    if isinstance(c, Top):
        text = "Thing"
    elif isinstance(c, Bottom):
        text = "Nothing"
    elif isinstance(c, Atomic):
        text = shorten(c.iri, prefixes)
    elif isinstance(c, Nominal):
        text = "{" + shorten(c.obj, prefixes) + "}"
    elif isinstance(c, Not):
        text = "not " + _render(c.operand, _LEVEL_UNARY, prefixes)
    elif isinstance(c, And):
        text = (_render(c.left, _LEVEL_AND, prefixes) + " and "
                + _render(c.right, _LEVEL_QUAL, prefixes))
    elif isinstance(c, Or):
        text = (_render(c.left, _LEVEL_OR, prefixes) + " or "
                + _render(c.right, _LEVEL_AND, prefixes))
    elif isinstance(c, Exists):
        text = (print_role(c.role, prefixes) + " some "
                + _render(c.filler, _LEVEL_QUAL, prefixes))
    elif isinstance(c, Forall):
        text = (print_role(c.role, prefixes) + " only "
                + _render(c.filler, _LEVEL_QUAL, prefixes))
    else:
        raise TypeError(f"not a concept: {c!r}")
    if _level(c) < require:
        return "(" + text + ")"
    return text


def print_concept(c: Concept, prefixes: Mapping[str, str] | None = None) -> str:
    """Canonical text for a concept; reparsing yields a structurally equal tree."""
    return _render(c, _LEVEL_OR, prefixes)


def print_kb(kb: KnowledgeBase) -> str:
    """Serialise a knowledge base; ``parse_kb`` recovers equal axiom sequences."""
    lines: list[str] = []
    for alias in sorted(kb.prefixes):
        lines.append(f"prefix {alias}: <{kb.prefixes[alias]}>")
    if lines:
        lines.append("")
    p = kb.prefixes
    for axiom in kb.tbox:
        if isinstance(axiom, SubClass):
            lines.append(f"{print_concept(axiom.sub, p)} SubClassOf {print_concept(axiom.sup, p)}")
        else:
            lines.append(f"{print_concept(axiom.left, p)} EquivalentTo {print_concept(axiom.right, p)}")
    for assertion in kb.abox:
        if isinstance(assertion, ConceptAssertion):
            lines.append(f"{shorten(assertion.obj, p)} Type {print_concept(assertion.concept, p)}")
        else:
            lines.append(f"{shorten(assertion.subject, p)} Fact "
                         f"{print_role(assertion.role, p)} {shorten(assertion.obj, p)}")
    return "\n".join(lines) + "\n"
