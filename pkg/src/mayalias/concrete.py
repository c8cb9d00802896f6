"""Executable concrete semantics: heap states and a set-valued executor.

A state maps (object, tag) to an object.  The executor explores every branch
of a conditional and a bounded number of loop unrollings, so it
under-approximates program behavior -- the safe direction for testing an
over-approximating analysis.  Cut and bind never modify the state; they are
assertions, and execution paths on which the asserted (dis)equality fails are
discarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .lang import (
    Assign,
    Bind,
    Call,
    Choice,
    Create,
    Cut,
    Expr,
    Forget,
    Instruction,
    Loop,
    Program,
    QualifiedCall,
    Seq,
)

ObjectId = int


@dataclass(frozen=True)
class State:
    objects: frozenset[ObjectId]
    transitions: frozenset[tuple[ObjectId, str, ObjectId]]

    @staticmethod
    def make(
        objects: Iterable[ObjectId],
        transitions: Iterable[tuple[ObjectId, str, ObjectId]],
    ) -> "State":
        objs = frozenset(objects)
        trans = frozenset(transitions)
        for src, _tag, dst in trans:
            if src not in objs or dst not in objs:
                raise ValueError("transition endpoints must be known objects")
        return State(objs, trans)

    def lookup(self) -> dict[tuple[ObjectId, str], ObjectId]:
        return {(src, tag): dst for src, tag, dst in self.transitions}


def value(S: State, o: ObjectId, e: Expr) -> Optional[ObjectId]:
    """Evaluate a path expression; None means undefined."""
    table = S.lookup()
    cur: Optional[ObjectId] = o
    for tag in e:
        if cur is None:
            return None
        cur = table.get((cur, tag))
    return cur


@dataclass
class ExecutionLimits:
    unroll: int = 3
    max_call_depth: int = 16


@dataclass
class _World:
    """One execution path: the heap plus the local environment of the current
    activation (formals and locals are transient bindings, not heap edges)."""

    table: dict[tuple[ObjectId, str], ObjectId]
    objects: set[ObjectId]
    env: dict[str, Optional[ObjectId]]
    scoped: frozenset[str]  # names resolved through env, not the heap
    current: ObjectId

    def clone(self) -> "_World":
        return _World(
            dict(self.table),
            set(self.objects),
            dict(self.env),
            self.scoped,
            self.current,
        )

    def eval(self, e: Expr) -> Optional[ObjectId]:
        if not e:
            return self.current
        first = e[0]
        if first in self.scoped:
            cur = self.env.get(first)
        else:
            cur = self.table.get((self.current, first))
        for tag in e[1:]:
            if cur is None:
                return None
            cur = self.table.get((cur, tag))
        return cur

    def set_tag(self, tag: str, target: Optional[ObjectId]) -> None:
        if tag in self.scoped:
            self.env[tag] = target
        elif target is None:
            self.table.pop((self.current, tag), None)
        else:
            self.table[(self.current, tag)] = target

    def to_state(self) -> State:
        return State(
            frozenset(self.objects),
            frozenset((s, t, d) for (s, t), d in self.table.items()),
        )

    def key(self) -> tuple:
        return (
            frozenset(self.objects),
            frozenset(self.table.items()),
            frozenset(self.env.items()),
            self.current,
        )


class _Executor:
    def __init__(
        self, program: Optional[Program], limits: ExecutionLimits
    ) -> None:
        self.program = program
        self.limits = limits
        self.next_object = 0
        self.aborted_paths = 0

    def fresh(self) -> ObjectId:
        self.next_object += 1
        return self.next_object

    def run(
        self, w: _World, i: Instruction, depth: int, owner: Optional[str]
    ) -> list[_World]:
        if isinstance(i, Seq):
            worlds = [w]
            for item in i.items:
                worlds = self._dedupe(
                    [
                        w2
                        for w1 in worlds
                        for w2 in self.run(w1, item, depth, owner)
                    ]
                )
            return worlds
        if isinstance(i, Assign):
            w = w.clone()
            w.set_tag(i.target, w.eval(i.source))
            return [w]
        if isinstance(i, Create):
            w = w.clone()
            obj = self.fresh()
            w.objects.add(obj)
            w.set_tag(i.target, obj)
            return [w]
        if isinstance(i, Forget):
            w = w.clone()
            w.set_tag(i.target, None)
            return [w]
        if isinstance(i, Cut):
            va, vb = w.eval(i.a), w.eval(i.b)
            if va is not None and va == vb:
                self.aborted_paths += 1
                return []  # asserted disequality does not hold on this path
            return [w]
        if isinstance(i, Bind):
            va, vb = w.eval(i.a), w.eval(i.b)
            if va is None or va != vb:
                self.aborted_paths += 1
                return []  # asserted equality does not hold on this path
            return [w]
        if isinstance(i, Choice):
            return self._dedupe(
                self.run(w.clone(), i.then_body, depth, owner)
                + self.run(w.clone(), i.else_body, depth, owner)
            )
        if isinstance(i, Loop):
            worlds = [w]
            out = [w]
            for _ in range(self.limits.unroll):
                worlds = self._dedupe(
                    [
                        w2
                        for w1 in worlds
                        for w2 in self.run(w1.clone(), i.body, depth, owner)
                    ]
                )
                out.extend(worlds)
            return self._dedupe(out)
        if isinstance(i, Call):
            return self._call(w, None, i.routine, i.actuals, depth, owner)
        if isinstance(i, QualifiedCall):
            target = w.eval(i.target)
            if target is None:
                self.aborted_paths += 1
                return []  # call on an undefined target aborts this path
            return self._call(w, target, i.routine, i.actuals, depth, owner)
        raise TypeError(f"unknown instruction {i!r}")

    def _call(
        self,
        w: _World,
        target: Optional[ObjectId],
        name: str,
        actuals: tuple[Expr, ...],
        depth: int,
        owner: Optional[str],
    ) -> list[_World]:
        if self.program is None:
            raise ValueError("cannot execute calls without a routine table")
        if depth >= self.limits.max_call_depth:
            self.aborted_paths += 1
            return []  # bounded recursion: drop the path (under-approximation)
        routine = self.program.find_routine(
            name, owner if target is None else None
        )
        args = [w.eval(a) for a in actuals]
        from .lang import routine_locals  # local import avoids a cycle

        attrs = self.program.all_attributes()
        scoped = frozenset(routine.formals) | routine_locals(routine, attrs)
        inner = _World(
            dict(w.table),
            set(w.objects),
            dict(zip(routine.formals, args)),
            scoped,
            w.current if target is None else target,
        )
        results = self.run(inner, routine.body, depth + 1, routine.class_name)
        out = []
        for res in results:
            back = w.clone()
            back.table = res.table
            back.objects = res.objects
            out.append(back)
        return self._dedupe(out)

    @staticmethod
    def _dedupe(worlds: list[_World]) -> list[_World]:
        seen = set()
        out = []
        for w in worlds:
            k = w.key()
            if k not in seen:
                seen.add(k)
                out.append(w)
        return out


@dataclass
class ExecResult:
    states: list[State]
    aborted_paths: int


def exec_instruction(
    S: State,
    o: ObjectId,
    i: Instruction,
    program: Optional[Program] = None,
    limits: Optional[ExecutionLimits] = None,
    scoped: frozenset[str] = frozenset(),
    env: Optional[dict[str, Optional[ObjectId]]] = None,
    owner: Optional[str] = None,
) -> ExecResult:
    """All heap states reachable by executing an instruction from (S, o).

    Variables outside `scoped` are ordinary tags of the current object;
    scoped names (formals/locals of an enclosing activation) live in `env`.
    """
    limits = limits or ExecutionLimits()
    ex = _Executor(program, limits)
    ex.next_object = max(S.objects, default=0)
    world = _World(
        dict(S.lookup()), set(S.objects), dict(env or {}), scoped, o
    )
    results = ex.run(world, i, 0, owner)
    states = []
    seen = set()
    for w in results:
        st = w.to_state()
        if st not in seen:
            seen.add(st)
            states.append(st)
    return ExecResult(states, ex.aborted_paths)


def defined_expressions(
    S: State,
    o: ObjectId,
    first_tags: Iterable[str],
    rest_tags: Iterable[str],
    limit: int,
) -> dict[Expr, ObjectId]:
    """All defined path values up to the cutoff, by breadth-first extension of
    defined prefixes; includes Current -> o."""
    table = S.lookup()
    rest = sorted(rest_tags)
    out: dict[Expr, ObjectId] = {(): o}
    frontier: list[tuple[Expr, ObjectId]] = [((), o)]
    for depth in range(limit):
        nxt: list[tuple[Expr, ObjectId]] = []
        tags = sorted(first_tags) if depth == 0 else rest
        for prefix, obj in frontier:
            for tag in tags:
                dst = table.get((obj, tag))
                if dst is not None:
                    e = prefix + (tag,)
                    out[e] = dst
                    nxt.append((e, dst))
        frontier = nxt
    return out
