"""Core data model for description-logic knowledge bases.

Concept expressions are built from atomic concepts, single-object nominals,
top/bottom, boolean connectives and qualified existential/universal
quantification over (possibly inverted) roles.  A knowledge base pairs a
T-Box of inclusion/equivalence axioms with an A-Box of concept and role
assertions, plus the prefix table used by the textual format.

All nodes are immutable and hashable so trees can live in sets, serve as
cache keys and be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union


@dataclass(frozen=True, slots=True)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("IRI must be non-empty")
        if any(ch.isspace() for ch in self.value):
            raise ValueError(f"IRI may not contain whitespace: {self.value!r}")

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class Role:
    """A role expression: an atomic role name or its inverse."""

    iri: Iri
    inverse: bool = False

    def inverted(self) -> Role:
        return Role(self.iri, not self.inverse)


class Concept:
    """Base class for concept expressions."""


def _concept_node(cls):
    """Frozen dataclass whose structural hash is computed once per instance.

    Concept trees are used as set members and cache keys constantly; the
    generated recursive hash would dominate the reasoner's runtime.
    """
    cls = dataclass(frozen=True)(cls)
    generated = cls.__hash__

    def cached_hash(self):
        try:
            return self._hash
        except AttributeError:
            value = generated(self)
            object.__setattr__(self, "_hash", value)
            return value

    cls.__hash__ = cached_hash
    return cls


@_concept_node
class Top(Concept):
    pass


@_concept_node
class Bottom(Concept):
    pass


@_concept_node
class Atomic(Concept):
    iri: Iri


@_concept_node
class Nominal(Concept):
    """The concept containing exactly one named object."""

    obj: Iri


@_concept_node
class Not(Concept):
    operand: Concept


@_concept_node
class And(Concept):
    left: Concept
    right: Concept


@_concept_node
class Or(Concept):
    left: Concept
    right: Concept


@_concept_node
class Exists(Concept):
    role: Role
    filler: Concept


@_concept_node
class Forall(Concept):
    role: Role
    filler: Concept


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True, slots=True)
class SubClass:
    sub: Concept
    sup: Concept


@dataclass(frozen=True, slots=True)
class Equivalent:
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class ConceptAssertion:
    obj: Iri
    concept: Concept


@dataclass(frozen=True, slots=True)
class RoleAssertion:
    """A role edge between two named objects.

    The stored role is always atomic; asserting an inverse role swaps the
    operands at construction.
    """

    subject: Iri
    role: Role
    obj: Iri

    def __post_init__(self) -> None:
        if self.role.inverse:
            subject, obj = self.obj, self.subject
            object.__setattr__(self, "subject", subject)
            object.__setattr__(self, "obj", obj)
            object.__setattr__(self, "role", Role(self.role.iri))


TBoxAxiom = Union[SubClass, Equivalent]
ABoxAxiom = Union[ConceptAssertion, RoleAssertion]
Axiom = Union[TBoxAxiom, ABoxAxiom]


@dataclass(frozen=True, eq=False)
class KnowledgeBase:
    """A T-Box, an A-Box and the prefix table they were written with.

    Equality is identity: reasoner sessions key their caches on the KB
    object.  Axiom-sequence equality is available through the ``tbox`` and
    ``abox`` tuples directly.
    """

    tbox: tuple[TBoxAxiom, ...] = ()
    abox: tuple[ABoxAxiom, ...] = ()
    prefixes: Mapping[str, str] = field(default_factory=dict)

    def gcis(self) -> Iterator[SubClass]:
        """All T-Box content as plain inclusions (equivalences split in two)."""
        for axiom in self.tbox:
            if isinstance(axiom, SubClass):
                yield axiom
            else:
                yield SubClass(axiom.left, axiom.right)
                yield SubClass(axiom.right, axiom.left)

    def extended(self, *axioms: Axiom) -> KnowledgeBase:
        """A new KB with extra axioms appended (prefixes shared)."""
        tbox = self.tbox + tuple(a for a in axioms if isinstance(a, (SubClass, Equivalent)))
        abox = self.abox + tuple(
            a for a in axioms if isinstance(a, (ConceptAssertion, RoleAssertion))
        )
        return KnowledgeBase(tbox, abox, self.prefixes)


@dataclass(frozen=True, slots=True)
class Signature:
    """The atomic names occurring syntactically in a knowledge base."""

    atomic_concepts: frozenset[Iri]
    atomic_roles: frozenset[Iri]
    objects: frozenset[Iri]


def _collect(c: Concept, concepts: set[Iri], roles: set[Iri], objects: set[Iri]) -> None:
    if isinstance(c, Atomic):
        concepts.add(c.iri)
    elif isinstance(c, Nominal):
        objects.add(c.obj)
    elif isinstance(c, Not):
        _collect(c.operand, concepts, roles, objects)
    elif isinstance(c, (And, Or)):
        _collect(c.left, concepts, roles, objects)
        _collect(c.right, concepts, roles, objects)
    elif isinstance(c, (Exists, Forall)):
        roles.add(c.role.iri)
        _collect(c.filler, concepts, roles, objects)


def concept_signature(c: Concept) -> Signature:
    """The atomic names occurring in a single concept expression."""
    concepts: set[Iri] = set()
    roles: set[Iri] = set()
    objects: set[Iri] = set()
    _collect(c, concepts, roles, objects)
    return Signature(frozenset(concepts), frozenset(roles), frozenset(objects))


def signature(kb: KnowledgeBase) -> Signature:
    """Exactly the atomic concept, role and object names used in ``kb``."""
    concepts: set[Iri] = set()
    roles: set[Iri] = set()
    objects: set[Iri] = set()
    for axiom in kb.tbox:
        if isinstance(axiom, SubClass):
            _collect(axiom.sub, concepts, roles, objects)
            _collect(axiom.sup, concepts, roles, objects)
        else:
            _collect(axiom.left, concepts, roles, objects)
            _collect(axiom.right, concepts, roles, objects)
    for assertion in kb.abox:
        if isinstance(assertion, ConceptAssertion):
            objects.add(assertion.obj)
            _collect(assertion.concept, concepts, roles, objects)
        else:
            objects.add(assertion.subject)
            objects.add(assertion.obj)
            roles.add(assertion.role.iri)
    return Signature(frozenset(concepts), frozenset(roles), frozenset(objects))


def nnf(c: Concept) -> Concept:
    """Negation normal form: negation pushed onto atomic concepts and nominals."""
    if isinstance(c, (Top, Bottom, Atomic, Nominal)):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, nnf(c.filler))
    if isinstance(c, Not):
        inner = c.operand
        if isinstance(inner, Top):
            return BOTTOM
        if isinstance(inner, Bottom):
            return TOP
        if isinstance(inner, (Atomic, Nominal)):
            return c
        if isinstance(inner, Not):
            return nnf(inner.operand)
        if isinstance(inner, And):
            return Or(nnf(Not(inner.left)), nnf(Not(inner.right)))
        if isinstance(inner, Or):
            return And(nnf(Not(inner.left)), nnf(Not(inner.right)))
        if isinstance(inner, Exists):
            return Forall(inner.role, nnf(Not(inner.filler)))
        if isinstance(inner, Forall):
            return Exists(inner.role, nnf(Not(inner.filler)))
    raise TypeError(f"not a concept: {c!r}")


def negated(c: Concept) -> Concept:
    """nnf(¬c), the form used for clash detection and refutation probes."""
    return nnf(Not(c))


def structurally_equal(c1: Concept, c2: Concept) -> bool:
    """Tree identity: no commutativity or associativity normalisation."""
    return c1 == c2
