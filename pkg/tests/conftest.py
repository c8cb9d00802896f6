"""Shared helpers for the test suite."""

from __future__ import annotations

import importlib.resources

import pytest

from mayalias import AliasRelation, AnalysisContext, apply_full, parse_program

ATTRS = frozenset({"u", "v"})


def run_routine(source: str, routine: str = "demo", limit: int = 4):
    """Parse a program, analyze one routine's body from the empty relation and
    return (relation, change set, context)."""
    program = parse_program(source)
    target = program.find_routine(routine)
    ctx = AnalysisContext(program, limit, default_class=target.class_name)
    r, cs = apply_full(AliasRelation.empty(limit), target.body, ctx)
    return r, cs, ctx


def relation_of(pairs, limit: int = 4, top=()):
    return AliasRelation.make(pairs, limit, top)


def corpus_text(name: str) -> str:
    return (
        importlib.resources.files("mayalias") / "corpus" / name
    ).read_text()


@pytest.fixture
def demo_attrs():
    return ATTRS


DIAGRAM_TAGS = ["u", "v", "w"]


def random_state(rng, max_objects: int = 5):
    """A random heap state: a functional transition table over small tags."""
    from mayalias import State

    n = rng.randint(1, max_objects)
    objects = list(range(n))
    transitions = []
    for src in objects:
        for tag in DIAGRAM_TAGS:
            if rng.random() < 0.5:
                transitions.append((src, tag, rng.choice(objects)))
    return State.make(objects, transitions)


def random_diagram(rng, max_vertices: int = 6):
    """A random rooted labeled multigraph (parallel labels allowed)."""
    from mayalias import AliasDiagram

    n = rng.randint(1, max_vertices)
    vertices = list(range(n))
    root = rng.choice(vertices)
    edges = []
    for _ in range(rng.randint(0, 2 * n)):
        edges.append(
            (
                rng.choice(vertices),
                rng.choice(DIAGRAM_TAGS),
                rng.choice(vertices),
            )
        )
    return AliasDiagram.make(vertices, root, edges)


def random_expr(rng, max_len: int = 3):
    return tuple(
        rng.choice(DIAGRAM_TAGS) for _ in range(rng.randint(1, max_len))
    )
