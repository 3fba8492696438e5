"""Bottom-up query evaluation and projection to result tables.

Computes the same certain-answer sets as the brute-force definition in
:mod:`dlq.query`, but compositionally: patterns enumerate named objects
through the reasoner, joins merge compatible mappings, UNION unions
branch answers, MINUS filters left answers through the per-mapping truth
condition of its right side, OPTIONAL keeps join answers that actually
bound an optional-only variable plus all left answers.

Projection produces a deterministic table: one row per distinct projected
binding, rows ordered lexicographically by cell text with absent cells
first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import Iri, KnowledgeBase
from .query import (
    ConceptPattern,
    IriElem,
    Join,
    Minus,
    Optional,
    Pattern,
    Query,
    QueryPattern,
    SolutionMapping,
    SpliceElem,
    Union,
    Var,
    VarElem,
    query_vars,
    satisfies,
)
from .reasoner import Reasoner

__all__ = ["ResultTable", "eval_algebraic", "project", "table_to_json"]

_EMPTY = SolutionMapping(())


def _eval_pattern(r: Reasoner, p: QueryPattern) -> frozenset[SolutionMapping]:
    if isinstance(p, ConceptPattern):
        if isinstance(p.elem, IriElem):
            entailed = r.entails_instance(p.elem.iri, p.concept)
            return frozenset([_EMPTY]) if entailed else frozenset()
        assert isinstance(p.elem, VarElem), "splices must be resolved before evaluation"
        var = p.elem.var
        return frozenset(
            SolutionMapping.of({var: obj}) for obj in r.named_instances(p.concept)
        )

    subject, role, obj = p.subject, p.role, p.obj
    if role.inverse:
        subject, obj, role = obj, subject, role.inverted()
    assert not isinstance(subject, SpliceElem) and not isinstance(obj, SpliceElem), \
        "splices must be resolved before evaluation"
    if isinstance(subject, IriElem) and isinstance(obj, IriElem):
        entailed = r.entails_role(subject.iri, role, obj.iri)
        return frozenset([_EMPTY]) if entailed else frozenset()
    if isinstance(subject, IriElem):
        var = obj.var
        return frozenset(
            SolutionMapping.of({var: b}) for b in r.objects
            if r.entails_role(subject.iri, role, b)
        )
    if isinstance(obj, IriElem):
        var = subject.var
        return frozenset(
            SolutionMapping.of({var: a}) for a in r.objects
            if r.entails_role(a, role, obj.iri)
        )
    if subject.var == obj.var:
        return frozenset(
            SolutionMapping.of({subject.var: a}) for a in r.objects
            if r.entails_role(a, role, a)
        )
    return frozenset(
        SolutionMapping.of({subject.var: a, obj.var: b})
        for a in r.objects for b in r.objects
        if r.entails_role(a, role, b)
    )


def _merge_all(
    left: frozenset[SolutionMapping], right: frozenset[SolutionMapping]
) -> frozenset[SolutionMapping]:
    out = set()
    for mu1 in left:
        for mu2 in right:
            merged = mu1.merge(mu2)
            if merged is not None:
                out.add(merged)
    return frozenset(out)


def eval_algebraic(kb: KnowledgeBase | Reasoner, q: Query) -> frozenset[SolutionMapping]:
    """Certain answers of ``q``, equal to ``denotational_eval`` on every query."""
    r = Reasoner.ensure(kb)
    return _eval(r, q)


def _eval(r: Reasoner, q: Query) -> frozenset[SolutionMapping]:
    if isinstance(q, Pattern):
        return _eval_pattern(r, q.pattern)
    if isinstance(q, Join):
        return _merge_all(_eval(r, q.left), _eval(r, q.right))
    if isinstance(q, Union):
        return _eval(r, q.left) | _eval(r, q.right)
    if isinstance(q, Minus):
        return frozenset(
            mu for mu in _eval(r, q.left) if not satisfies(r, q.right, mu)
        )
    if isinstance(q, Optional):
        left = _eval(r, q.left)
        joined = _merge_all(left, _eval(r, q.right))
        private = query_vars(q.right) - query_vars(q.left)
        return frozenset(mu for mu in joined if mu.domain & private) | left
    raise TypeError(f"not a query: {q!r}")


@dataclass(frozen=True)
class ResultTable:
    """Projected solutions in a fixed row order; absent cells are None."""

    columns: tuple[Var, ...]
    rows: tuple[tuple[Iri | None, ...], ...]


def _row_key(row: tuple[Iri | None, ...]) -> tuple:
    return tuple((cell is not None, cell.value if cell is not None else "")
                 for cell in row)


def project(solutions: frozenset[SolutionMapping],
            select_vars: tuple[Var, ...]) -> ResultTable:
    """Project solutions onto the selected variables, collapsing duplicates."""
    rows = {tuple(mu.get(v) for v in select_vars) for mu in solutions}
    return ResultTable(tuple(select_vars), tuple(sorted(rows, key=_row_key)))


def table_to_json(table: ResultTable) -> str:
    """The wire shape: ``{"vars": [...], "solutions": [{...}]}`` with unbound
    variables omitted per solution, rows in table order."""
    payload = {
        "vars": [v.name for v in table.columns],
        "solutions": [
            {
                var.name: cell.value
                for var, cell in zip(table.columns, row)
                if cell is not None
            }
            for row in table.rows
        ],
    }
    return json.dumps(payload)
