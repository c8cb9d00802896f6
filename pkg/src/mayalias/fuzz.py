"""Randomized soundness testing of the analysis against the executor.

Each trial generates a random program over a small vocabulary and runs it
both abstractly (alias relation and change set) and concretely (all branch
and bounded-loop outcomes from a fresh initial state).  For every final
state, every pair of defined expressions with equal values must be claimed
by the relation, and every expression whose value changed must be covered by
the change set.  A violation is reported with a minimized program, never
raised.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .concrete import ExecutionLimits, State, defined_expressions, exec_instruction
from .lang import (
    CURRENT,
    Assign,
    Bind,
    Choice,
    ClassDecl,
    Create,
    Cut,
    Expr,
    Forget,
    Instruction,
    Loop,
    Program,
    QualifiedCall,
    Routine,
    Seq,
    expr_str,
    pretty_print,
)
from .relation import AliasRelation
from .transfer import AnalysisContext, apply_full

MAIN_CLASS = "Main"
MAIN_ROUTINE = "main"


@dataclass(frozen=True)
class FuzzConfig:
    trials: int = 10_000
    seed: int = 0
    n_vars: int = 3
    n_attrs: int = 2
    max_instr: int = 6
    limit: int = 4
    unroll: int = 3

    def var_names(self) -> list[str]:
        base = ["x", "y", "z"]
        names = base[: self.n_vars]
        names += [f"x{i}" for i in range(len(names), self.n_vars)]
        return names

    def attr_names(self) -> list[str]:
        base = ["u", "v"]
        names = base[: self.n_attrs]
        names += [f"u{i}" for i in range(len(names), self.n_attrs)]
        return names

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "vocabVars": self.n_vars,
            "vocabAttrs": self.n_attrs,
            "maxInstructions": self.max_instr,
            "L": self.limit,
            "unroll": self.unroll,
        }


@dataclass(frozen=True)
class Violation:
    trial: int
    kind: str  # "alias" or "change"
    detail: str
    program: str
    initial_state: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "kind": self.kind,
            "detail": self.detail,
            "program": self.program,
            "initialState": list(self.initial_state),
        }


@dataclass
class FuzzReport:
    config: FuzzConfig
    trials_run: int = 0
    final_states_checked: int = 0
    aborted_paths: int = 0
    loop_iteration_peak: int = 0
    violations: list[Violation] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "trialsRun": self.trials_run,
            "finalStatesChecked": self.final_states_checked,
            "abortedPaths": self.aborted_paths,
            "loopIterationPeak": self.loop_iteration_peak,
            "violations": [v.to_dict() for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Program generation
# ---------------------------------------------------------------------------


def routine_pool(config: FuzzConfig) -> dict[str, Routine]:
    """A fixed pool of helper routines: one setter per attribute plus a
    two-step mixer when the vocabulary allows it."""
    attrs = config.attr_names()
    routines: dict[str, Routine] = {}
    for a in attrs:
        name = f"set_{a}"
        routines[name] = Routine(
            name, ("p",), Assign(a, ("p",)), None, MAIN_CLASS
        )
    if len(attrs) >= 2:
        a0, a1 = attrs[0], attrs[1]
        routines["mix"] = Routine(
            "mix",
            ("p",),
            Seq((Assign(a0, ("p",)), Assign(a1, (a0,)))),
            None,
            MAIN_CLASS,
        )
    return routines


def build_program(config: FuzzConfig, body: Instruction) -> Program:
    routines = dict(routine_pool(config))
    routines[MAIN_ROUTINE] = Routine(MAIN_ROUTINE, (), body, None, MAIN_CLASS)
    cls = ClassDecl(MAIN_CLASS, tuple(config.attr_names()), routines)
    return Program({MAIN_CLASS: cls})


class _Generator:
    def __init__(self, config: FuzzConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.vars = config.var_names()
        self.attrs = config.attr_names()
        self.callables = sorted(routine_pool(config))

    def expr(self, allow_current: bool = True) -> Expr:
        if allow_current and self.rng.random() < 0.12:
            return CURRENT
        first = self.rng.choice(self.vars + self.attrs)
        path = [first]
        while len(path) < 3 and self.attrs and self.rng.random() < 0.3:
            path.append(self.rng.choice(self.attrs))
        return tuple(path)

    def target(self) -> str:
        return self.rng.choice(self.vars + self.attrs)

    def instructions(self, budget: int, depth: int) -> list[Instruction]:
        out: list[Instruction] = []
        while budget > 0:
            instr, cost = self.one(budget, depth)
            out.append(instr)
            budget -= cost
        return out

    def one(self, budget: int, depth: int) -> tuple[Instruction, int]:
        choices = "aaaacfqqsbtl" if depth < 2 and budget >= 2 else "aaaacfqqsbt"
        k = self.rng.choice(choices)
        if k == "a":
            return Assign(self.target(), self.expr()), 1
        if k == "c":
            return Create(self.target()), 1
        if k == "f":
            return Forget(self.target()), 1
        if k == "q":
            name = self.rng.choice(self.callables)
            target = self.expr(allow_current=False)
            return QualifiedCall(target, name, (self.expr(),)), 1
        if k == "s":
            return Cut(self.expr(), self.expr()), 1
        if k == "b":
            return Bind(self.expr(), self.expr()), 1
        if k == "t" and budget >= 2 and depth < 2:
            inner = budget - 1
            take = self.rng.randint(1, min(2, inner))
            then_items = self.instructions(
                self.rng.randint(1, take), depth + 1
            )
            rest = take - len(then_items)
            else_items = (
                self.instructions(rest, depth + 1) if rest > 0 else []
            )
            return (
                Choice(Seq(tuple(then_items)), Seq(tuple(else_items))),
                1 + take,
            )
        if k == "l" and budget >= 2 and depth < 2:
            take = self.rng.randint(1, min(2, budget - 1))
            return Loop(Seq(tuple(self.instructions(take, depth + 1)))), 1 + take
        # fallback for structured kinds without budget
        return Assign(self.target(), self.expr()), 1

    def body(self) -> Instruction:
        n = self.rng.randint(1, self.config.max_instr)
        return Seq(tuple(self.instructions(n, 0)))


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


def initial_state(config: FuzzConfig) -> State:
    """Root plus one fresh, distinct object per variable and per attribute of
    the root: the empty initial relation is sound."""
    root = 0
    names = config.var_names() + config.attr_names()
    objects = [root]
    transitions = []
    for i, name in enumerate(names, start=1):
        objects.append(i)
        transitions.append((root, name, i))
    return State.make(objects, transitions)


def check_body(
    body: Instruction, config: FuzzConfig
) -> tuple[list[tuple[str, str]], int, int, int]:
    """Run one program abstractly and concretely.

    Returns (violations, final_states, aborted_paths, loop_peak); each
    violation is a (kind, detail) pair.
    """
    program = build_program(config, body)
    ctx = AnalysisContext(program, config.limit, default_class=MAIN_CLASS)
    r0 = AliasRelation.empty(config.limit)
    relation, changes = apply_full(r0, body, ctx)

    s0 = initial_state(config)
    result = exec_instruction(
        s0,
        0,
        body,
        program,
        ExecutionLimits(unroll=config.unroll),
        owner=MAIN_CLASS,
    )
    first_tags = config.var_names() + config.attr_names()
    rest_tags = config.attr_names()
    before = defined_expressions(s0, 0, first_tags, rest_tags, config.limit)

    violations: list[tuple[str, str]] = []
    for final in result.states:
        after = defined_expressions(
            final, 0, first_tags, rest_tags, config.limit
        )
        by_object: dict[int, list[Expr]] = {}
        for e, obj in after.items():
            by_object.setdefault(obj, []).append(e)
        for exprs in by_object.values():
            exprs.sort()
            for i, a in enumerate(exprs):
                for b in exprs[i + 1:]:
                    if not relation.related(a, b):
                        violations.append(
                            (
                                "alias",
                                f"expressions {expr_str(a)} and {expr_str(b)} "
                                f"share a value but are not claimed aliased",
                            )
                        )
        for e in sorted(set(before) | set(after)):
            if e == CURRENT:
                continue
            if before.get(e) != after.get(e) and not changes.covers(e):
                violations.append(
                    (
                        "change",
                        f"value of {expr_str(e)} changed but no prefix is in "
                        f"the change set",
                    )
                )
    return (
        violations,
        len(result.states),
        result.aborted_paths,
        ctx.loop_iteration_peak,
    )


def _minimize(
    body: Instruction, config: FuzzConfig
) -> Instruction:
    """Greedy shrink: repeatedly drop top-level instructions while the
    program still exhibits a violation."""
    items = list(body.items) if isinstance(body, Seq) else [body]
    changed = True
    while changed and len(items) > 1:
        changed = False
        for i in range(len(items)):
            candidate = Seq(tuple(items[:i] + items[i + 1:]))
            try:
                if check_body(candidate, config)[0]:
                    items = list(candidate.items)
                    changed = True
                    break
            except Exception:
                continue
    return Seq(tuple(items))


def _state_lines(S: State) -> tuple[str, ...]:
    return tuple(
        f"{src}.{tag} -> {dst}" for src, tag, dst in sorted(S.transitions)
    )


def run_fuzz(
    config: FuzzConfig, stop_on_first: bool = False
) -> FuzzReport:
    report = FuzzReport(config)
    for trial in range(config.trials):
        rng = random.Random(config.seed * 1_000_003 + trial)
        body = _Generator(config, rng).body()
        violations, n_states, aborted, loop_peak = check_body(body, config)
        report.trials_run += 1
        report.final_states_checked += n_states
        report.aborted_paths += aborted
        report.loop_iteration_peak = max(
            report.loop_iteration_peak, loop_peak
        )
        if violations:
            minimized = _minimize(body, config)
            min_violations = check_body(minimized, config)[0] or violations
            kind, detail = min_violations[0]
            program = build_program(config, minimized)
            report.violations.append(
                Violation(
                    trial=trial,
                    kind=kind,
                    detail=detail,
                    program=pretty_print(program),
                    initial_state=_state_lines(initial_state(config)),
                )
            )
            if stop_on_first:
                break
    return report
