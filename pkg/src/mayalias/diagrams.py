"""Alias diagrams: rooted labeled multigraphs abstracting object structures.

A diagram holds in a state when the state's associated diagram embeds into it
by an injective morphism preserving the root and every labeled edge.  The
diagram's associated alias relation pairs the expressions of root paths that
share a terminal vertex, closed under suffix appending.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Iterable

from .lang import CURRENT, Expr
from .relation import AliasRelation
from .concrete import ObjectId, State

NodeId = int
Edge = tuple[NodeId, str, NodeId]


@dataclass(frozen=True)
class AliasDiagram:
    vertices: frozenset[NodeId]
    root: NodeId
    edges: frozenset[Edge]

    @staticmethod
    def make(
        vertices: Iterable[NodeId], root: NodeId, edges: Iterable[Edge]
    ) -> "AliasDiagram":
        vs = frozenset(vertices) | {root}
        es = frozenset(edges)
        for src, _tag, dst in es:
            if src not in vs or dst not in vs:
                raise ValueError("edge endpoints must be diagram vertices")
        return AliasDiagram(vs, root, es)

    def out_edges(self, v: NodeId) -> list[Edge]:
        return sorted(e for e in self.edges if e[0] == v)

    def targets_of(self, e: Expr) -> frozenset[NodeId]:
        """The set D(e): terminal vertices of root paths labeled e."""
        frontier = {self.root}
        for tag in e:
            frontier = {
                dst for src, t, dst in self.edges if t == tag and src in frontier
            }
            if not frontier:
                break
        return frozenset(frontier)


def canonicalize_diagram(d: AliasDiagram) -> AliasDiagram:
    """Iteratively drop vertices that are unreachable from the root, or
    unnecessary (not the root, fewer than two incoming edges, no outgoing
    edge), together with their incident edges, until a fixed point."""
    vertices = set(d.vertices)
    edges = set(d.edges)
    while True:
        reachable = {d.root}
        frontier = [d.root]
        while frontier:
            v = frontier.pop()
            for src, _tag, dst in edges:
                if src == v and dst not in reachable:
                    reachable.add(dst)
                    frontier.append(dst)
        keep = set()
        for v in vertices & reachable:
            if v == d.root:
                keep.add(v)
                continue
            incoming = sum(1 for e in edges if e[2] == v)
            outgoing = any(e[0] == v for e in edges)
            if incoming >= 2 or outgoing:
                keep.add(v)
        new_edges = {
            e for e in edges if e[0] in keep and e[2] in keep
        }
        if keep == vertices and new_edges == edges:
            return AliasDiagram(frozenset(vertices), d.root, frozenset(edges))
        vertices, edges = keep, new_edges


def associated_diagram(S: State, o: ObjectId) -> AliasDiagram:
    """The canonical diagram of root o with one edge per transition."""
    return canonicalize_diagram(
        AliasDiagram(frozenset(S.objects), o, frozenset(S.transitions))
    )


def holds(S: State, o: ObjectId, d: AliasDiagram) -> bool:
    """Is there an injective morphism from the state's associated diagram
    into d, preserving the root and every labeled edge?  Decided by
    backtracking search (oracle-scale diagrams are small)."""
    source = associated_diagram(S, o)
    succ: dict[NodeId, list[tuple[str, NodeId]]] = {
        v: [] for v in source.vertices
    }
    for src, tag, dst in sorted(source.edges):
        succ[src].append((tag, dst))
    order = sorted(source.vertices)
    target_vertices = sorted(d.vertices)

    def consistent(mapping: dict[NodeId, NodeId]) -> bool:
        for src, tag, dst in source.edges:
            if src in mapping and dst in mapping:
                if (mapping[src], tag, mapping[dst]) not in d.edges:
                    return False
        return True

    def backtrack(i: int, mapping: dict[NodeId, NodeId]) -> bool:
        if i == len(order):
            return True
        v = order[i]
        if v in mapping:
            return backtrack(i + 1, mapping)
        used = set(mapping.values())
        for candidate in target_vertices:
            if candidate in used:
                continue
            mapping[v] = candidate
            if consistent(mapping) and backtrack(i + 1, mapping):
                return True
            del mapping[v]
        return False

    if source.root not in source.vertices:
        return False
    initial = {source.root: d.root}
    return consistent(initial) and backtrack(0, initial)


def diagram_alias_relation(
    d: AliasDiagram, limit: int, attrs: Iterable[str] = ()
) -> AliasRelation:
    """Pairs of distinct root-path expressions sharing a terminal vertex,
    closed under suffix appending within the cutoff (overflow goes to top).
    Current participates: it is aliased to every path leading to the root."""
    # enumerate all root paths of length <= limit
    paths: list[tuple[Expr, NodeId]] = [(CURRENT, d.root)]
    frontier: list[tuple[Expr, NodeId]] = [(CURRENT, d.root)]
    for _ in range(limit):
        nxt: list[tuple[Expr, NodeId]] = []
        for expr, v in frontier:
            for src, tag, dst in sorted(d.edges):
                if src == v:
                    nxt.append((expr + (tag,), dst))
        paths.extend(nxt)
        frontier = nxt

    by_terminal: dict[NodeId, set[Expr]] = {}
    for expr, v in paths:
        by_terminal.setdefault(v, set()).add(expr)

    base_pairs: set[tuple[Expr, Expr]] = set()
    for exprs in by_terminal.values():
        group = sorted(exprs)
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                base_pairs.add((a, b))

    # suffix closure: [e, e'] implies [e.x, e'.x]; the closure alphabet is
    # every tag in use plus any extra attribute names supplied by the caller
    tags = sorted({tag for _, tag, _ in d.edges} | set(attrs))
    pairs: set[tuple[Expr, Expr]] = set()
    top: set[Expr] = set()
    work = list(base_pairs)
    while work:
        a, b = work.pop()
        if (a, b) in pairs or (b, a) in pairs:
            continue
        if len(a) > limit or len(b) > limit:
            for e in (a, b):
                if len(e) > limit:
                    top.add(e)
            continue
        pairs.add((a, b))
        for tag in tags:
            work.append((a + (tag,), b + (tag,)))
    return AliasRelation.make(pairs, limit, top)


def diagram_assign(d: AliasDiagram, t: str, e: Expr) -> AliasDiagram:
    """The diagram-level assignment rule for t := e: add a fresh path for e
    (with edges from every vertex matching each prefix of e to the next fresh
    vertex), remove the root's t-edges, then point t at every vertex the
    expression could already denote and at the end of the fresh path."""
    fresh = count(max(d.vertices, default=0) + 1)
    new_vertices = [next(fresh) for _ in e]
    vertices = set(d.vertices) | set(new_vertices)
    edges = set(d.edges)

    prefix_targets = [d.targets_of(e[:k]) for k in range(len(e) + 1)]
    for k in range(len(e)):
        tag = e[k]
        for o in prefix_targets[k]:
            edges.add((o, tag, new_vertices[k]))
        if k >= 1:
            edges.add((new_vertices[k - 1], tag, new_vertices[k]))

    edges = {edge for edge in edges if not (edge[0] == d.root and edge[1] == t)}
    for o in d.targets_of(e):
        edges.add((d.root, t, o))
    if new_vertices:
        edges.add((d.root, t, new_vertices[-1]))
    return AliasDiagram(frozenset(vertices), d.root, frozenset(edges))
