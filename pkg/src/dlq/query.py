"""Query algebra over a knowledge base: abstract syntax, the surface
parser, and brute-force certain-answer semantics.

A query is a tree of concept/role patterns combined with join, UNION,
MINUS and OPTIONAL.  Answers are partial mappings from variables to named
objects that the knowledge base *entails* to match (certain answers under
the open world, not mere graph matches).

``denotational_eval`` is the executable definition: it enumerates every
candidate mapping over the query's variables and keeps those recognised
as solutions, consulting the reasoner for every atomic entailment.  It is
exponential by design and exists as the oracle for the bottom-up
evaluator; keep inputs desk-sized.

Surface form::

    SELECT ?x ?y WHERE { ?y :worksFor ?x . ?x a :ResearchGroup }

Group elements fold left to right: triples and ``{..} UNION {..}`` join
onto the accumulated query; ``MINUS {..}`` and ``OPTIONAL {..}`` attach
the group to it.  ``$name`` marks a splice position to be filled by an
embedding program; ``a [ ... ]`` admits a full concept expression in
knowledge-base concept syntax.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union as TUnion

from .kbtext import read_concept, expand_name
from .lexing import ParseError, TokenStream, tokenize
from .model import Atomic, Concept, Iri, KnowledgeBase, Role
from .reasoner import Reasoner

__all__ = [
    "Var", "VarElem", "IriElem", "SpliceElem", "PatternElem",
    "ConceptPattern", "RolePattern", "QueryPattern",
    "Pattern", "Join", "Union", "Minus", "Optional", "Query",
    "SelectQuery", "SolutionMapping", "SolutionSet",
    "query_vars", "splice_terms", "substitute_splices",
    "parse_query", "satisfies", "solves", "all_partial_mappings",
    "denotational_eval",
]


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class VarElem:
    var: Var


@dataclass(frozen=True, slots=True)
class IriElem:
    iri: Iri


@dataclass(frozen=True, slots=True)
class SpliceElem:
    splice: str


PatternElem = TUnion[VarElem, IriElem, SpliceElem]


@dataclass(frozen=True, slots=True)
class ConceptPattern:
    elem: PatternElem
    concept: Concept


@dataclass(frozen=True, slots=True)
class RolePattern:
    subject: PatternElem
    role: Role
    obj: PatternElem


QueryPattern = TUnion[ConceptPattern, RolePattern]


class Query:
    """Base class for query algebra nodes."""


@dataclass(frozen=True)
class Pattern(Query):
    pattern: QueryPattern


@dataclass(frozen=True)
class Join(Query):
    left: Query
    right: Query


@dataclass(frozen=True)
class Union(Query):
    left: Query
    right: Query


@dataclass(frozen=True)
class Minus(Query):
    left: Query
    right: Query


@dataclass(frozen=True)
class Optional(Query):
    left: Query
    right: Query


def _pattern_elems(p: QueryPattern) -> tuple[PatternElem, ...]:
    if isinstance(p, ConceptPattern):
        return (p.elem,)
    return (p.subject, p.obj)


def query_vars(q: Query) -> frozenset[Var]:
    """All variables occurring syntactically in the query."""
    if isinstance(q, Pattern):
        return frozenset(e.var for e in _pattern_elems(q.pattern)
                         if isinstance(e, VarElem))
    assert isinstance(q, (Join, Union, Minus, Optional))
    return query_vars(q.left) | query_vars(q.right)


def _splices_in(q: Query) -> Iterator[str]:
    if isinstance(q, Pattern):
        for e in _pattern_elems(q.pattern):
            if isinstance(e, SpliceElem):
                yield e.splice
    else:
        assert isinstance(q, (Join, Union, Minus, Optional))
        yield from _splices_in(q.left)
        yield from _splices_in(q.right)


def _map_elems(q: Query, f) -> Query:
    if isinstance(q, Pattern):
        p = q.pattern
        if isinstance(p, ConceptPattern):
            return Pattern(ConceptPattern(f(p.elem), p.concept))
        return Pattern(RolePattern(f(p.subject), p.role, f(p.obj)))
    return type(q)(_map_elems(q.left, f), _map_elems(q.right, f))


def substitute_splices(q: Query, values: Mapping[str, PatternElem]) -> Query:
    """Replace splice positions by the given elements (IRIs or variables)."""

    def subst(e: PatternElem) -> PatternElem:
        if isinstance(e, SpliceElem):
            if e.splice not in values:
                raise KeyError(f"no value for splice ${e.splice}")
            return values[e.splice]
        return e

    return _map_elems(q, subst)


@dataclass(frozen=True)
class SelectQuery:
    """A query body plus projection list and the splices it mentions."""

    select_vars: tuple[Var, ...]
    body: Query
    splices: tuple[str, ...]

    @classmethod
    def build(cls, select_vars: tuple[Var, ...], body: Query) -> "SelectQuery":
        return cls(select_vars, body, tuple(dict.fromkeys(_splices_in(body))))


def splice_terms(sq: SelectQuery) -> tuple[str, ...]:
    """Splice ids in first-occurrence order, one entry per id."""
    return sq.splices


# --- solution mappings ------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SolutionMapping:
    """A partial map from variables to objects, canonically ordered."""

    bindings: tuple[tuple[Var, Iri], ...]

    @classmethod
    def of(cls, mapping: Mapping[Var, Iri]) -> "SolutionMapping":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: kv[0].name)))

    def get(self, var: Var) -> Iri | None:
        for v, obj in self.bindings:
            if v == var:
                return obj
        return None

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(v for v, _ in self.bindings)

    def as_dict(self) -> dict[Var, Iri]:
        return dict(self.bindings)

    def restrict(self, to: frozenset[Var]) -> "SolutionMapping":
        return SolutionMapping(tuple((v, o) for v, o in self.bindings if v in to))

    def merge(self, other: "SolutionMapping") -> "SolutionMapping | None":
        """Union of two mappings, or None when they disagree on a variable."""
        combined = self.as_dict()
        for v, o in other.bindings:
            if combined.setdefault(v, o) != o:
                return None
        return SolutionMapping.of(combined)


SolutionSet = frozenset


# --- surface parser ---------------------------------------------------------

_QUERY_KEYWORDS = ("SELECT", "WHERE", "UNION", "MINUS", "OPTIONAL")


class _QueryParser:
    def __init__(self, ts: TokenStream, prefixes: Mapping[str, str]) -> None:
        self.ts = ts
        self.prefixes = prefixes

    def parse(self) -> SelectQuery:
        ts = self.ts
        ts.take_word("SELECT")
        select: list[Var] = []
        positions: list[tuple[int, int]] = []
        while ts.peek().kind == "VAR":
            tok = ts.next()
            var = Var(tok.text[1:])
            if var in select:
                raise ParseError(tok.line, tok.column,
                                 f"duplicate SELECT variable ?{var.name}")
            select.append(var)
            positions.append((tok.line, tok.column))
        if not select:
            raise ts.error("expected at least one ?variable after SELECT")
        ts.take_word("WHERE")
        ts.take_punct("{")
        body = self.group()
        ts.take_punct("}")
        if ts.peek().kind != "EOF":
            raise ts.error("trailing input after query")
        in_body = query_vars(body)
        for var, (line, column) in zip(select, positions):
            if var not in in_body:
                raise ParseError(line, column,
                                 f"SELECT variable ?{var.name} not used in body")
        return SelectQuery.build(tuple(select), body)

    def group(self) -> Query:
        ts = self.ts
        acc: Query | None = None
        while True:
            if ts.at_punct("."):
                ts.next()
                continue
            if ts.at_punct("}") or ts.peek().kind == "EOF":
                break
            tok = ts.peek()
            if ts.at_word("MINUS") or ts.at_word("OPTIONAL"):
                keyword = ts.next().text
                ts.take_punct("{")
                sub = self.group()
                ts.take_punct("}")
                if acc is None:
                    raise ParseError(tok.line, tok.column,
                                     f"{keyword} cannot start a group")
                acc = Minus(acc, sub) if keyword == "MINUS" else Optional(acc, sub)
                continue
            if ts.at_punct("{"):
                ts.next()
                left = self.group()
                ts.take_punct("}")
                ts.take_word("UNION")
                ts.take_punct("{")
                right = self.group()
                ts.take_punct("}")
                element: Query = Union(left, right)
            else:
                element = self.triple()
            acc = element if acc is None else Join(acc, element)
        if acc is None:
            raise ts.error("empty group")
        return acc

    def triple(self) -> Query:
        ts = self.ts
        start = ts.peek()
        subject = self.node()
        if ts.at_word("a"):
            ts.next()
            concept = self.concept_ref()
            pattern: QueryPattern = ConceptPattern(subject, concept)
        else:
            if not (ts.peek().kind in ("IRIREF", "PNAME")):
                raise ts.error("expected 'a' or a role IRI")
            role = Role(expand_name(ts.next(), self.prefixes))
            obj = self.node()
            pattern = RolePattern(subject, role, obj)
        if all(isinstance(e, IriElem) for e in _pattern_elems(pattern)):
            raise ParseError(start.line, start.column,
                             "pattern needs at least one variable or splice")
        return Pattern(pattern)

    def node(self) -> PatternElem:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "VAR":
            ts.next()
            return VarElem(Var(tok.text[1:]))
        if tok.kind == "SPLICE":
            ts.next()
            return SpliceElem(tok.text[1:])
        if tok.kind in ("IRIREF", "PNAME"):
            return IriElem(expand_name(ts.next(), self.prefixes))
        raise ts.error("expected ?variable, $splice or IRI")

    def concept_ref(self) -> Concept:
        ts = self.ts
        if ts.at_punct("["):
            ts.next()
            concept = read_concept(ts, self.prefixes)
            ts.take_punct("]")
            return concept
        if ts.peek().kind in ("IRIREF", "PNAME"):
            return Atomic(expand_name(ts.next(), self.prefixes))
        raise ts.error("expected a concept IRI or [ concept expression ]")


def parse_query(text: str, prefixes: Mapping[str, str],
                line: int = 1, column: int = 1) -> SelectQuery:
    """Parse a SELECT query; ``line``/``column`` offset positions when the
    query text is embedded in a larger source file."""
    tokens = [t for t in tokenize(text, line, column) if t.kind != "NL"]
    return _QueryParser(TokenStream(tokens), prefixes).parse()


# --- semantics --------------------------------------------------------------


def _elem_value(e: PatternElem, mu: SolutionMapping) -> Iri | None:
    if isinstance(e, IriElem):
        return e.iri
    if isinstance(e, VarElem):
        return mu.get(e.var)
    raise ValueError(f"unresolved splice ${e.splice} during evaluation")


def _pattern_holds(r: Reasoner, p: QueryPattern, mu: SolutionMapping) -> bool:
    if isinstance(p, ConceptPattern):
        value = _elem_value(p.elem, mu)
        return value is not None and r.entails_instance(value, p.concept)
    subject = _elem_value(p.subject, mu)
    obj = _elem_value(p.obj, mu)
    return subject is not None and obj is not None \
        and r.entails_role(subject, p.role, obj)


def satisfies(r: Reasoner, q: Query, mu: SolutionMapping) -> bool:
    """The per-mapping truth condition; patterns over unbound variables are
    false, so extra bindings elsewhere in ``mu`` are simply ignored."""
    if isinstance(q, Pattern):
        return _pattern_holds(r, q.pattern, mu)
    if isinstance(q, Join):
        return satisfies(r, q.left, mu) and satisfies(r, q.right, mu)
    if isinstance(q, Union):
        return satisfies(r, q.left, mu) or satisfies(r, q.right, mu)
    if isinstance(q, Minus):
        return satisfies(r, q.left, mu) and not satisfies(r, q.right, mu)
    if isinstance(q, Optional):
        if (query_vars(q.right) - query_vars(q.left)) & mu.domain:
            return satisfies(r, q.left, mu) and satisfies(r, q.right, mu)
        return satisfies(r, q.left, mu)
    raise TypeError(f"not a query: {q!r}")


def solves(r: Reasoner, q: Query, mu: SolutionMapping) -> bool:
    """Whether ``mu`` is a solution of ``q``: bindings arise only from the
    parts of the query that actually matched (patterns bind exactly their
    variables, each UNION branch answers for itself, MINUS binds nothing on
    the right)."""
    if isinstance(q, Pattern):
        pattern_vars = frozenset(e.var for e in _pattern_elems(q.pattern)
                                 if isinstance(e, VarElem))
        return mu.domain == pattern_vars and _pattern_holds(r, q.pattern, mu)
    if isinstance(q, Join):
        items = mu.bindings
        n = len(items)
        subsets = [SolutionMapping(tuple(items[i] for i in range(n) if mask >> i & 1))
                   for mask in range(1 << n)]
        for left in subsets:
            if not solves(r, q.left, left):
                continue
            for right in subsets:
                if left.domain | right.domain == mu.domain \
                        and solves(r, q.right, right):
                    return True
        return False
    if isinstance(q, Union):
        return solves(r, q.left, mu) or solves(r, q.right, mu)
    if isinstance(q, Minus):
        return solves(r, q.left, mu) and not satisfies(r, q.right, mu)
    if isinstance(q, Optional):
        if (query_vars(q.right) - query_vars(q.left)) & mu.domain:
            return solves(r, Join(q.left, q.right), mu)
        return solves(r, q.left, mu)
    raise TypeError(f"not a query: {q!r}")


def all_partial_mappings(variables: frozenset[Var], objects: list[Iri]) -> Iterator[SolutionMapping]:
    """Every partial map from the variables into the given objects."""
    ordered = sorted(variables, key=lambda v: v.name)

    def rec(index: int, acc: dict[Var, Iri]) -> Iterator[SolutionMapping]:
        if index == len(ordered):
            yield SolutionMapping.of(acc)
            return
        yield from rec(index + 1, acc)
        for obj in objects:
            acc[ordered[index]] = obj
            yield from rec(index + 1, acc)
            del acc[ordered[index]]

    return rec(0, {})


def denotational_eval(kb: KnowledgeBase | Reasoner, q: Query) -> frozenset[SolutionMapping]:
    """Brute-force certain answers: test every candidate mapping over the
    query's variables against :func:`solves`.  The oracle for the
    algebraic evaluator."""
    r = Reasoner.ensure(kb)
    return frozenset(
        mu for mu in all_partial_mappings(query_vars(q), r.objects)
        if solves(r, q, mu)
    )
