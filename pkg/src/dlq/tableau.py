"""Completion-graph tableau for the supported concept constructor set.

The calculus handles boolean connectives, qualified quantifiers, inverse
roles and single-object nominals:

* every concept is kept in negation normal form;
* each inclusion C ⊑ D is internalised as the disjunction nnf(¬C ⊔ D),
  part of every node's label from the moment the node is created;
* universal restrictions propagate across edges in both directions, so
  inverse roles need no special casing beyond the neighbour relation;
* two nodes sharing a nominal are merged (newer into older), which is the
  only way equality between individuals can be forced here;
* termination comes from anywhere pairwise blocking: an anonymous node is
  blocked when its (label, parent label, connecting edge labels) triple
  duplicates that of an earlier unblocked anonymous node.  Nodes holding a
  nominal are never blocked.  Only successor generation is gated on
  blocking; label-filling rules are harmless on blocked nodes and keep
  the block condition honest.

Rule priority is fixed (merge, then ⊓, ⊔, ∃, ∀; lowest node id first;
within a label, insertion order), disjunctions with exactly one
non-clashing side are applied without a choice point, and real choice
points are explored by depth-first backtracking.  Runs are reproducible.

From a clash-free completed graph a finite model is read off directly:
blocked nodes are dropped and edges into them are redirected to their
blockers, which the pairwise blocking condition makes safe.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .interpretation import Interpretation
from .model import (
    And,
    Atomic,
    Bottom,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    Iri,
    KnowledgeBase,
    Nominal,
    Not,
    Or,
    Role,
    RoleAssertion,
    negated,
    nnf,
    signature,
)

_NEGATIONS: dict[Concept, Concept] = {}


def _neg(c: Concept) -> Concept:
    cached = _NEGATIONS.get(c)
    if cached is None:
        cached = negated(c)
        _NEGATIONS[c] = cached
    return cached


class _Graph:
    """Mutable completion graph; copied at disjunction choice points.

    Labels are insertion-ordered concept sets (dicts with None values), so
    every iteration order below is deterministic without sorting.
    """

    __slots__ = ("labels", "parent", "out", "inc", "pruned", "merged_into",
                 "clashed", "next_id")

    def __init__(self) -> None:
        self.labels: dict[int, dict[Concept, None]] = {}
        self.parent: dict[int, Optional[int]] = {}
        self.out: dict[int, dict[int, set[Iri]]] = {}
        self.inc: dict[int, dict[int, set[Iri]]] = {}
        self.pruned: set[int] = set()
        self.merged_into: dict[int, int] = {}
        self.clashed = False
        self.next_id = 0

    def copy(self) -> "_Graph":
        g = _Graph.__new__(_Graph)
        g.labels = {n: dict(lbl) for n, lbl in self.labels.items()}
        g.parent = dict(self.parent)
        g.out = {n: {d: set(r) for d, r in adj.items()} for n, adj in self.out.items()}
        g.inc = {n: {d: set(r) for d, r in adj.items()} for n, adj in self.inc.items()}
        g.pruned = set(self.pruned)
        g.merged_into = dict(self.merged_into)
        g.clashed = self.clashed
        g.next_id = self.next_id
        return g

    def new_node(self, parent: Optional[int], label: Iterable[Concept]) -> int:
        node = self.next_id
        self.next_id += 1
        self.labels[node] = {}
        self.parent[node] = parent
        self.out[node] = {}
        self.inc[node] = {}
        for c in label:
            self.add(node, c)
        return node

    def alive(self) -> list[int]:
        return [n for n in self.labels if n not in self.pruned]

    def resolve(self, node: int) -> int:
        while node in self.merged_into:
            node = self.merged_into[node]
        return node

    def add(self, node: int, c: Concept) -> bool:
        """Add a concept to a label; returns False if already present.
        Flags a clash on bottom or on a complementary literal pair."""
        label = self.labels[node]
        if c in label:
            return False
        label[c] = None
        if isinstance(c, Bottom):
            self.clashed = True
        elif isinstance(c, Not):
            if c.operand in label:
                self.clashed = True
        elif isinstance(c, (Atomic, Nominal)):
            if Not(c) in label:
                self.clashed = True
        return True

    def add_edge(self, src: int, dst: int, role_iri: Iri) -> None:
        self.out[src].setdefault(dst, set()).add(role_iri)
        self.inc[dst].setdefault(src, set()).add(role_iri)

    def neighbors(self, node: int, role: Role) -> Iterator[int]:
        adj = self.inc[node] if role.inverse else self.out[node]
        for other, roles in adj.items():
            if role.iri in roles and other not in self.pruned:
                yield other

    def connection(self, a: int, b: int) -> tuple[frozenset[Iri], frozenset[Iri]]:
        return (frozenset(self.out[a].get(b, ())), frozenset(self.out[b].get(a, ())))

    def has_nominal(self, node: int) -> bool:
        return any(isinstance(c, Nominal) for c in self.labels[node])

    def merge(self, target: int, source: int) -> None:
        """Fold ``source`` into ``target``: union labels, reroute edges,
        re-parent children, retire the source node."""
        for c in self.labels[source]:
            self.add(target, c)
        for dst, roles in list(self.out[source].items()):
            dst2 = target if dst == source else dst
            for r in roles:
                self.add_edge(target, dst2, r)
            self.inc[dst].pop(source, None)
        for src, roles in list(self.inc[source].items()):
            if src == source:
                continue
            for r in roles:
                self.add_edge(src, target, r)
            self.out[src].pop(source, None)
        self.out[source] = {}
        self.inc[source] = {}
        for node, par in self.parent.items():
            if par == source:
                self.parent[node] = target
        self.pruned.add(source)
        self.merged_into[source] = target

    def blocking(self) -> tuple[dict[int, int], set[int]]:
        """(directly-blocked -> blocker, all blocked nodes), by ascending id;
        a parent always has a smaller id than its children."""
        direct: dict[int, int] = {}
        blocked: set[int] = set()
        candidates: list[int] = []
        for node in self.alive():
            par = self.parent[node]
            if par is not None and par in blocked:
                blocked.add(node)
                continue
            if par is None or self.has_nominal(node):
                continue
            lbl = self.labels[node].keys()
            plbl = self.labels[par].keys()
            conn = self.connection(par, node)
            for other in candidates:
                opar = self.parent[other]
                if (self.labels[other].keys() == lbl
                        and self.labels[opar].keys() == plbl
                        and self.connection(opar, other) == conn):
                    direct[node] = other
                    blocked.add(node)
                    break
            if node not in blocked:
                candidates.append(node)
        return direct, blocked


class Tableau:
    """Deterministic satisfiability runs over one knowledge base."""

    def __init__(self, kb: KnowledgeBase) -> None:
        self.kb = kb
        self.internalized: tuple[Concept, ...] = tuple(
            dict.fromkeys(nnf(Or(Not(g.sub), g.sup)) for g in kb.gcis())
        )
        self.named = sorted(signature(kb).objects, key=lambda i: i.value)

    def _initial_graph(
        self,
        probe: Optional[Concept],
        extra_assertions: tuple[tuple[Iri, Concept], ...],
    ) -> _Graph:
        graph = _Graph()
        named = list(self.named)
        for obj, _ in extra_assertions:
            if obj not in named:
                named.append(obj)
        node_of = {
            obj: graph.new_node(None, (Nominal(obj),) + self.internalized)
            for obj in named
        }
        for assertion in self.kb.abox:
            if isinstance(assertion, ConceptAssertion):
                graph.add(node_of[assertion.obj], nnf(assertion.concept))
            elif isinstance(assertion, RoleAssertion):
                graph.add_edge(node_of[assertion.subject], node_of[assertion.obj],
                               assertion.role.iri)
        for obj, concept in extra_assertions:
            graph.add(node_of[obj], nnf(concept))
        if probe is not None:
            graph.new_node(None, (nnf(probe),) + self.internalized)
        if not graph.labels:
            graph.new_node(None, self.internalized)
        return graph

    def run(
        self,
        probe: Optional[Concept] = None,
        extra_assertions: tuple[tuple[Iri, Concept], ...] = (),
    ) -> Optional[_Graph]:
        """Expand to a clash-free completed graph, or None if none exists."""
        return self._expand(self._initial_graph(probe, extra_assertions))

    def _expand(self, graph: _Graph) -> Optional[_Graph]:
        # Deterministic rules run to quiescence before any choice point, and
        # successors are generated before branching, so every branch starts
        # from a fully propagated graph.  Disjunctions with at most one
        # non-clashing side never branch.
        while True:
            if graph.clashed:
                return None
            alive = graph.alive()

            action = self._merge_action(graph, alive)
            if action is not None:
                graph.merge(*action)
                continue

            if self._apply_conjunctions(graph, alive):
                continue

            if self._apply_foralls(graph, alive):
                continue

            branch = self._disjunction_action(graph, alive)
            if branch is not None and len(branch[1]) <= 1:
                node, choices = branch
                if not choices:
                    return None
                graph.add(node, choices[0])
                continue

            if self._apply_exists(graph, alive):
                continue

            if branch is not None:
                node, choices = branch
                for choice in choices:
                    attempt = graph.copy()
                    attempt.add(node, choice)
                    result = self._expand(attempt)
                    if result is not None:
                        return result
                return None

            return graph

    def _merge_action(self, graph: _Graph, alive: list[int]) -> Optional[tuple[int, int]]:
        seen: dict[Iri, int] = {}
        for node in alive:
            for c in graph.labels[node]:
                if isinstance(c, Nominal):
                    first = seen.get(c.obj)
                    if first is None:
                        seen[c.obj] = node
                    elif first != node:
                        return (first, node)
        return None

    def _apply_conjunctions(self, graph: _Graph, alive: list[int]) -> bool:
        changed = False
        for node in alive:
            label = graph.labels[node]
            # Snapshot: decompositions may enqueue further conjunctions,
            # which the next sweep picks up.
            for c in list(label):
                if isinstance(c, And):
                    changed |= graph.add(node, c.left)
                    changed |= graph.add(node, c.right)
                    if graph.clashed:
                        return True
        return changed

    def _disjunction_action(
        self, graph: _Graph, alive: list[int]
    ) -> Optional[tuple[int, list[Concept]]]:
        """The next disjunction to apply: prefer ones decided by the current
        label (zero or one viable side) over genuine choice points."""
        first_choice: Optional[tuple[int, list[Concept]]] = None
        for node in alive:
            label = graph.labels[node]
            for c in label:
                if not isinstance(c, Or):
                    continue
                if c.left in label or c.right in label:
                    continue
                viable = [
                    d for d in (c.left, c.right)
                    if not isinstance(d, Bottom) and _neg(d) not in label
                ]
                if len(viable) <= 1:
                    return (node, viable)
                if first_choice is None:
                    first_choice = (node, viable)
        return first_choice

    def _apply_exists(self, graph: _Graph, alive: list[int]) -> bool:
        direct, blocked = graph.blocking()
        indirect = blocked - direct.keys()
        for node in alive:
            if node in blocked:
                continue
            for c in graph.labels[node]:
                if isinstance(c, Exists):
                    # A directly blocked witness is fine (its blocker stands
                    # in for it in the extracted model); an indirectly
                    # blocked one disappears entirely, so it does not count.
                    if any(c.filler in graph.labels[y]
                           for y in graph.neighbors(node, c.role)
                           if y not in indirect):
                        continue
                    child = graph.new_node(node, (c.filler,) + self.internalized)
                    if c.role.inverse:
                        graph.add_edge(child, node, c.role.iri)
                    else:
                        graph.add_edge(node, child, c.role.iri)
                    return True
        return False

    def _apply_foralls(self, graph: _Graph, alive: list[int]) -> bool:
        changed = False
        for node in alive:
            for c in list(graph.labels[node]):
                if isinstance(c, Forall):
                    for y in graph.neighbors(node, c.role):
                        changed |= graph.add(y, c.filler)
                        if graph.clashed:
                            return True
        return changed

    # -- model extraction --------------------------------------------------

    def model_of(self, graph: _Graph) -> Interpretation:
        """Read a finite interpretation off a clash-free completed graph.

        Blocked nodes are dropped; every edge endpoint at a directly blocked
        node is replaced by its blocker (pairwise blocking makes the tree
        edge safe; label-filling rules run on blocked nodes too, which makes
        the rerouted non-tree edges safe as well).  Edges touching an
        indirectly blocked node vanish with their subtree.
        """
        direct, blocked = graph.blocking()
        surviving = [n for n in graph.alive() if n not in blocked]
        domain = frozenset(surviving)

        concept_ext: dict[Iri, set[int]] = {}
        object_map: dict[Iri, int] = {}
        for node in surviving:
            for c in graph.labels[node]:
                if isinstance(c, Atomic):
                    concept_ext.setdefault(c.iri, set()).add(node)
                elif isinstance(c, Nominal):
                    object_map[c.obj] = node

        def land(node: int) -> Optional[int]:
            return node if node in domain else direct.get(node)

        role_ext: dict[Iri, set[tuple[int, int]]] = {}
        for src in graph.alive():
            for dst, roles in graph.out[src].items():
                if dst in graph.pruned:
                    continue
                source, target = land(src), land(dst)
                if source is None or target is None:
                    continue
                for role_iri in roles:
                    role_ext.setdefault(role_iri, set()).add((source, target))

        return Interpretation(
            domain=domain,
            concept_ext={k: frozenset(v) for k, v in concept_ext.items()},
            role_ext={k: frozenset(v) for k, v in role_ext.items()},
            object_map=object_map,
        )
