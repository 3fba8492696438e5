"""dlq: description-logic knowledge bases, a tableau reasoner, certain-answer
query evaluation with type inference, and a small ontology-typed expression
language, behind one command-line tool."""

from .model import (
    And,
    Atomic,
    Axiom,
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
    Signature,
    SubClass,
    TOP,
    Top,
    nnf,
    signature,
    structurally_equal,
)
from .kbtext import ParseError, parse_concept, parse_kb, print_concept, print_kb
from .interpretation import Interpretation, bounded_model_search, verify_model
from .reasoner import (
    Reasoner,
    SatResult,
    entails_instance,
    entails_role,
    entails_subsumption,
    is_consistent,
    is_satisfiable,
    named_instances,
)

__version__ = "0.1.0"
