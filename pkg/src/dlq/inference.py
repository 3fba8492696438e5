"""Concept inference for queries, and strict/non-strict validation.

Each query variable gets a concept expression over-approximating the
objects it can be bound to.  Patterns contribute the base constraints
(``?x a C`` gives C; a role triple against a constant gives a
quantification over a nominal; a role triple between two variables gives
mutual *references*, placeholders resolved after the walk).  Joins
intersect the constraints of shared variables, unions and optionals
weaken them, MINUS contributes nothing from its right side.

Validation replaces every splice by a fresh variable, infers and resolves
the typing, requires every variable's concept to be satisfiable, and then
checks the declared splice types: non-strict demands a satisfiable
intersection with the inferred constraint, strict demands subsumption and
then narrows the typing by substituting the declared type into every
reference to the splice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union as TUnion

from .model import (
    And,
    Concept,
    Exists,
    Forall,
    KnowledgeBase,
    Nominal,
    Not,
    Or,
    Role,
    TOP,
)
from .query import (
    ConceptPattern,
    Join,
    Minus,
    Optional,
    Pattern,
    Query,
    QueryPattern,
    RolePattern,
    SelectQuery,
    SpliceElem,
    Union,
    Var,
    VarElem,
    query_vars,
    substitute_splices,
)
from .reasoner import Reasoner

__all__ = [
    "VarRef", "InfConcept", "VariableTyping",
    "infer_pattern", "combine", "infer_query", "resolve_references",
    "Valid", "Unsatisfiable", "SpliceMismatch", "UntypedSelectVar",
    "ValidationOutcome", "validate_query", "type_role_projection",
]


@dataclass(frozen=True)
class VarRef:
    """A reference concept: "whatever stands in ``role`` to ``var``".

    Appears only during inference; resolution replaces it by an existential
    quantification over the referenced variable's own concept.
    """

    role: Role
    var: Var


InfConcept = TUnion[Concept, VarRef]


@dataclass(frozen=True)
class VariableTyping:
    """The inferred map from query variables to concept expressions."""

    bindings: Mapping[Var, InfConcept]

    def __contains__(self, var: Var) -> bool:
        return var in self.bindings

    def __getitem__(self, var: Var) -> InfConcept:
        return self.bindings[var]

    def get(self, var: Var, default=None):
        return self.bindings.get(var, default)

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(self.bindings)

    def items(self):
        return self.bindings.items()


def infer_pattern(p: QueryPattern) -> VariableTyping:
    """Base constraints of a single pattern (splices already freshened)."""
    if isinstance(p, ConceptPattern):
        if isinstance(p.elem, SpliceElem):
            raise ValueError("splices must be replaced by variables before typing")
        if isinstance(p.elem, VarElem):
            return VariableTyping({p.elem.var: p.concept})
        return VariableTyping({})

    subject, obj = p.subject, p.obj
    if isinstance(subject, SpliceElem) or isinstance(obj, SpliceElem):
        raise ValueError("splices must be replaced by variables before typing")
    role = p.role
    if isinstance(subject, VarElem) and isinstance(obj, VarElem):
        if subject.var == obj.var:
            # Both endpoints constrain the same variable; conjoin.
            return VariableTyping({subject.var: And(
                VarRef(role, obj.var), VarRef(role.inverted(), subject.var))})
        return VariableTyping({
            subject.var: VarRef(role, obj.var),
            obj.var: VarRef(role.inverted(), subject.var),
        })
    if isinstance(subject, VarElem):
        return VariableTyping({subject.var: Exists(role, Nominal(obj.iri))})
    if isinstance(obj, VarElem):
        return VariableTyping({obj.var: Exists(role.inverted(), Nominal(subject.iri))})
    return VariableTyping({})


def combine(p1: VariableTyping, p2: VariableTyping, connective: str) -> VariableTyping:
    """Pointwise combination: shared variables get the connective, one-sided
    variables carry over unchanged.  ``connective`` is "and" or "or"."""
    ctor = {"and": And, "or": Or}[connective]
    out: dict[Var, InfConcept] = {}
    for var, c in p1.items():
        other = p2.get(var)
        out[var] = c if other is None else ctor(c, other)
    for var, c in p2.items():
        if var not in p1:
            out[var] = c
    return VariableTyping(out)


def infer_query(q: Query) -> VariableTyping:
    """Structural inference over the algebra (references unresolved)."""
    if isinstance(q, Pattern):
        return infer_pattern(q.pattern)
    if isinstance(q, Join):
        return combine(infer_query(q.left), infer_query(q.right), "and")
    if isinstance(q, Union):
        return combine(infer_query(q.left), infer_query(q.right), "or")
    if isinstance(q, Optional):
        left = infer_query(q.left)
        return combine(left, combine(left, infer_query(q.right), "and"), "or")
    if isinstance(q, Minus):
        return infer_query(q.left)
    raise TypeError(f"not a query: {q!r}")


def resolve_references(
    phi: VariableTyping,
    substitutions: Mapping[Var, Concept] | None = None,
) -> VariableTyping:
    """Expand every reference, per variable, against the original typing.

    A reference back to a variable already on the current expansion path
    widens to the top concept, so resolution always terminates, including
    on mutual-reference cycles.  ``substitutions`` short-circuits chosen
    variables to a fixed concept (strict-mode narrowing) and replaces
    their own entries.
    """
    subs = dict(substitutions or {})

    def expand(c: InfConcept, path: frozenset[Var]) -> Concept:
        if isinstance(c, VarRef):
            if c.var in subs:
                return Exists(c.role, subs[c.var])
            if c.var in path or c.var not in phi:
                return Exists(c.role, TOP)
            return Exists(c.role, expand(phi[c.var], path | {c.var}))
        if isinstance(c, Not):
            return Not(expand(c.operand, path))
        if isinstance(c, And):
            return And(expand(c.left, path), expand(c.right, path))
        if isinstance(c, Or):
            return Or(expand(c.left, path), expand(c.right, path))
        if isinstance(c, Exists):
            return Exists(c.role, expand(c.filler, path))
        if isinstance(c, Forall):
            return Forall(c.role, expand(c.filler, path))
        return c

    resolved = {
        var: subs[var] if var in subs else expand(c, frozenset([var]))
        for var, c in phi.items()
    }
    return VariableTyping(resolved)


# --- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Valid:
    """Validation succeeded; carries the final (resolved, and in strict mode
    narrowed) concepts per variable and per splice."""

    variable_concepts: Mapping[Var, Concept]
    splice_concepts: Mapping[str, Concept]
    splice_vars: Mapping[str, Var]


@dataclass(frozen=True)
class Unsatisfiable:
    """Some variable's inferred concept (or a declared splice type) has no
    possible members: the query can never return anything."""

    var: Var
    concept: Concept


@dataclass(frozen=True)
class SpliceMismatch:
    """A declared splice type failed the mode check against the inferred
    constraint."""

    splice: str
    mode: str
    declared: Concept
    inferred: Concept


@dataclass(frozen=True)
class UntypedSelectVar:
    """A selected variable has no inferred concept (it occurs only under the
    right-hand side of MINUS)."""

    var: Var


ValidationOutcome = TUnion[Valid, Unsatisfiable, SpliceMismatch, UntypedSelectVar]


def fresh_splice_vars(sq: SelectQuery) -> dict[str, Var]:
    """One fresh variable per splice id, avoiding the query's own variables."""
    used = {v.name for v in query_vars(sq.body)}
    fresh: dict[str, Var] = {}
    for splice in sq.splices:
        name = splice
        while name in used:
            name += "_"
        used.add(name)
        fresh[splice] = Var(name)
    return fresh


def validate_query(
    kb: KnowledgeBase | Reasoner,
    sq: SelectQuery,
    splice_types: Mapping[str, Concept],
    mode: str,
) -> ValidationOutcome:
    """Type a query and check it, in "strict" or "nonstrict" mode.

    Splices become fresh variables; the resolved concept of every variable
    must be satisfiable; declared splice types must themselves be
    satisfiable, then pass the mode check.  Strict validation additionally
    substitutes the declared types into the final typing.
    """
    if mode not in ("strict", "nonstrict"):
        raise ValueError(f"unknown validation mode {mode!r}")
    missing = [s for s in sq.splices if s not in splice_types]
    if missing:
        raise ValueError(f"no declared type for splice(s): {', '.join(missing)}")
    r = Reasoner.ensure(kb)

    fresh = fresh_splice_vars(sq)
    body = substitute_splices(sq.body, {s: VarElem(v) for s, v in fresh.items()})
    unresolved = infer_query(body)
    phi = resolve_references(unresolved)

    for var in sq.select_vars:
        if var not in phi:
            return UntypedSelectVar(var)
    for var in sorted(phi.domain, key=lambda v: v.name):
        concept = phi[var]
        if not r.is_satisfiable(concept).satisfiable:
            return Unsatisfiable(var, concept)
    for splice in sq.splices:
        declared = splice_types[splice]
        if not r.is_satisfiable(declared).satisfiable:
            return Unsatisfiable(fresh[splice], declared)

    for splice in sq.splices:
        declared = splice_types[splice]
        inferred = phi.get(fresh[splice], TOP)
        if mode == "nonstrict":
            if not r.is_satisfiable(And(inferred, declared)).satisfiable:
                return SpliceMismatch(splice, mode, declared, inferred)
        else:
            if not r.entails_subsumption(declared, inferred):
                return SpliceMismatch(splice, mode, declared, inferred)

    if mode == "strict" and fresh:
        final = resolve_references(
            unresolved, {fresh[s]: splice_types[s] for s in sq.splices}
        )
    else:
        final = phi
    return Valid(
        variable_concepts=dict(final.items()),
        splice_concepts={s: final.get(fresh[s], splice_types[s]) for s in sq.splices},
        splice_vars=fresh,
    )


def type_role_projection(
    kb: KnowledgeBase | Reasoner, subject_type: Concept, role: Role
) -> TUnion[Concept, Unsatisfiable, SpliceMismatch]:
    """The result concept of projecting ``role`` from a subject of the given
    type: strict validation of the one-pattern query (subject, ?x) : role.

    Succeeds exactly when the subject type provably has the role, and then
    yields an inverse quantification over the subject type."""
    out_var = Var("x")
    body = Pattern(RolePattern(SpliceElem("subject"), role, VarElem(out_var)))
    sq = SelectQuery.build((out_var,), body)
    outcome = validate_query(kb, sq, {"subject": subject_type}, "strict")
    if isinstance(outcome, Valid):
        return outcome.variable_concepts[out_var]
    assert isinstance(outcome, (Unsatisfiable, SpliceMismatch))
    return outcome
