"""Decision procedures over one knowledge base: consistency, concept
satisfiability (with model witnesses), subsumption, instance and role
entailment.

A :class:`Reasoner` is a session around one immutable knowledge base.  It
memoises every answer, so repeated checks (the query evaluator asks the
same instance/role questions over and over) cost one dictionary lookup.
Sessions are single-caller; run independent sessions for parallel work.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .interpretation import Interpretation, bounded_model_search, verify_model
from .model import (
    And,
    Concept,
    Forall,
    Iri,
    KnowledgeBase,
    Nominal,
    Not,
    Role,
    signature,
)
from .tableau import Tableau

__all__ = [
    "SatResult",
    "Reasoner",
    "is_consistent",
    "is_satisfiable",
    "entails_subsumption",
    "entails_instance",
    "entails_role",
    "named_instances",
    "bounded_model_search",
    "verify_model",
]


@dataclass(frozen=True, eq=False)
class SatResult:
    """Outcome of a satisfiability check; a witness model when satisfiable."""

    satisfiable: bool
    witness: Optional[Interpretation] = None


class Reasoner:
    """Memoising reasoning session over one knowledge base."""

    def __init__(self, kb: KnowledgeBase) -> None:
        self.kb = kb
        self._tableau = Tableau(kb)
        self._sat: dict[Concept, SatResult] = {}
        self._instance: dict[tuple[Iri, Concept], bool] = {}
        self._role: dict[tuple[Iri, Role, Iri], bool] = {}
        self._consistent: Optional[bool] = None

    @classmethod
    def ensure(cls, kb: Union[KnowledgeBase, "Reasoner"]) -> "Reasoner":
        return kb if isinstance(kb, Reasoner) else cls(kb)

    @property
    def objects(self) -> list[Iri]:
        return sorted(signature(self.kb).objects, key=lambda i: i.value)

    def is_consistent(self) -> bool:
        if self._consistent is None:
            self._consistent = self._tableau.run() is not None
        return self._consistent

    def is_satisfiable(self, c: Concept) -> SatResult:
        cached = self._sat.get(c)
        if cached is None:
            graph = self._tableau.run(probe=c)
            if graph is None:
                cached = SatResult(False)
            else:
                cached = SatResult(True, self._tableau.model_of(graph))
            self._sat[c] = cached
        return cached

    def entails_subsumption(self, c: Concept, d: Concept) -> bool:
        return not self.is_satisfiable(And(c, Not(d))).satisfiable

    def entails_instance(self, obj: Iri, c: Concept) -> bool:
        key = (obj, c)
        cached = self._instance.get(key)
        if cached is None:
            graph = self._tableau.run(extra_assertions=((obj, Not(c)),))
            cached = graph is None
            self._instance[key] = cached
        return cached

    def entails_role(self, subject: Iri, role: Role, obj: Iri) -> bool:
        key = (subject, role, obj)
        cached = self._role.get(key)
        if cached is None:
            probe = Forall(role, Not(Nominal(obj)))
            graph = self._tableau.run(extra_assertions=((subject, probe),))
            cached = graph is None
            self._role[key] = cached
        return cached

    def named_instances(self, c: Concept) -> frozenset[Iri]:
        return frozenset(o for o in self.objects if self.entails_instance(o, c))


def is_consistent(kb: KnowledgeBase) -> bool:
    """True iff ``kb`` has at least one model."""
    return Reasoner.ensure(kb).is_consistent()


def is_satisfiable(kb: Union[KnowledgeBase, Reasoner], c: Concept) -> SatResult:
    """Satisfiability of ``c`` w.r.t. ``kb``, with a verified-model witness."""
    return Reasoner.ensure(kb).is_satisfiable(c)


def entails_subsumption(kb: Union[KnowledgeBase, Reasoner], c: Concept, d: Concept) -> bool:
    """True iff every model of ``kb`` makes ext(c) a subset of ext(d)."""
    return Reasoner.ensure(kb).entails_subsumption(c, d)


def entails_instance(kb: Union[KnowledgeBase, Reasoner], obj: Iri, c: Concept) -> bool:
    """True iff ``kb`` entails that ``obj`` belongs to ``c``."""
    return Reasoner.ensure(kb).entails_instance(obj, c)


def entails_role(kb: Union[KnowledgeBase, Reasoner], subject: Iri, role: Role, obj: Iri) -> bool:
    """True iff ``kb`` entails the role edge (subject, obj)."""
    return Reasoner.ensure(kb).entails_role(subject, role, obj)


def named_instances(kb: Union[KnowledgeBase, Reasoner], c: Concept) -> frozenset[Iri]:
    """The named objects provably belonging to ``c``."""
    return Reasoner.ensure(kb).named_instances(c)
