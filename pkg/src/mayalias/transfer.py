"""Transfer functions: the effect of each instruction kind on the alias
relation, paired with the set of expressions the instruction may change.

The alias and change rules share all the interprocedural machinery (formal
binding, renaming, caching, recursion guard), so both are computed by one
engine; `apply` projects out the relation for callers that only need
aliasing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .lang import (
    CURRENT,
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
    Routine,
    Seq,
    concat,
    expr_str,
    has_negative,
    instruction_exprs,
    inverse_path,
    routine_locals,
)
from .relation import AliasRelation

# Fresh tag used by the assignment rule to remember the pre-assignment value
# of the target; the parser cannot produce names containing '$' or '#'.
OLD_TAG = "$ot"
RENAME_SEP = "#"


def _internal_tag(tag: str) -> bool:
    """Names the parser cannot produce: old-value tags and renamed bindings."""
    return tag == OLD_TAG or RENAME_SEP in tag


class AnalysisError(Exception):
    pass


@dataclass(frozen=True)
class ChangeSet:
    """Expressions whose value may change; includes_top records overflow into
    the unbounded class."""

    exprs: frozenset[Expr]
    includes_top: bool = False

    @staticmethod
    def empty() -> "ChangeSet":
        return ChangeSet(frozenset(), False)

    def union(self, other: "ChangeSet") -> "ChangeSet":
        return ChangeSet(
            self.exprs | other.exprs, self.includes_top or other.includes_top
        )

    def covers(self, e: Expr) -> bool:
        """True when some nonempty prefix of e is listed as changed (a changed
        prefix invalidates everything reached through it)."""
        if self.includes_top:
            return True
        for i in range(1, len(e) + 1):
            if e[:i] in self.exprs:
                return True
        return False

    def to_list(self) -> list[str]:
        out = sorted(expr_str(e) for e in self.exprs)
        if self.includes_top:
            out.append("...")
        return out


def _changeset(
    exprs: Iterable[Expr], limit: int, includes_top: bool = False
) -> ChangeSet:
    # Change expressions longer than the cutoff can only cover expressions
    # that are themselves longer than the cutoff, which are outside the
    # bounded domain; a within-cutoff cover (the assignment target rooted at
    # an alias of Current) always accompanies them, so they are dropped.
    # Negative-tagged expressions are callee-relative and shrink by up to the
    # cutoff when resolved at the qualified-call boundary.
    kept: set[Expr] = set()
    for e in exprs:
        if len(e) <= (2 * limit if has_negative(e) else limit):
            kept.add(e)
    return ChangeSet(frozenset(kept), includes_top)


@dataclass
class AnalysisContext:
    """Shared state of one analysis run over a fixed program and cutoff."""

    program: Program
    limit: int
    default_class: Optional[str] = None
    naive_assign: bool = False
    attrs: frozenset[str] = field(init=False)
    cache: dict = field(default_factory=dict)
    call_stack: list = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    loop_iteration_peak: int = 0
    _rename_counter: itertools.count = field(default_factory=itertools.count)

    def __post_init__(self) -> None:
        self.attrs = self.program.all_attributes()
        if self.limit < 1:
            raise AnalysisError("cutoff must be a positive integer")
        names: set[str] = set(self.attrs)
        for routine in self.program.routines():
            names.update(routine.formals)
            names.update(routine_locals(routine, self.attrs))
            for e in instruction_exprs(routine.body):
                names.update(e)
        self._tags = frozenset(names)
        tags = len(self._tags)
        universe = sum(max(tags, 1) ** k for k in range(self.limit + 1))
        self._loop_valve = universe * universe

    def is_attribute(self, tag: str) -> bool:
        return tag in self.attrs

    def diagnostic(self, message: str) -> None:
        if message not in self.diagnostics:
            self.diagnostics.append(message)

    def loop_valve(self) -> int:
        """Safety bound on loop iterations: the squared size of the bounded
        expression universe.  Tripping it signals an implementation bug."""
        return self._loop_valve

    def program_tags(self) -> frozenset[str]:
        return self._tags


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def apply_full(
    r: AliasRelation, i: Instruction, ctx: AnalysisContext
) -> tuple[AliasRelation, ChangeSet]:
    """r >> i together with the may-change set of i under r."""
    if isinstance(i, Seq):
        cs = ChangeSet.empty()
        for item in i.items:
            r, c = apply_full(r, item, ctx)
            cs = cs.union(c)
        return r, cs
    if isinstance(i, Assign):
        return _apply_assign(r, i.target, i.source, ctx)
    if isinstance(i, Create):
        return _apply_create_forget(r, i.target, ctx)
    if isinstance(i, Forget):
        return _apply_create_forget(r, i.target, ctx)
    if isinstance(i, Cut):
        return _apply_cut(r, i.a, i.b, ctx), ChangeSet.empty()
    if isinstance(i, Bind):
        return _apply_bind(r, i.a, i.b, ctx), ChangeSet.empty()
    if isinstance(i, Choice):
        rt, ct = apply_full(r, i.then_body, ctx)
        re_, ce = apply_full(r, i.else_body, ctx)
        return rt.union(re_), ct.union(ce)
    if isinstance(i, Loop):
        return _apply_loop(r, i.body, ctx)
    if isinstance(i, Call):
        routine = ctx.program.find_routine(i.routine, _owner_hint(ctx))
        return _apply_call(r, routine, list(i.actuals), ctx)
    if isinstance(i, QualifiedCall):
        routine = ctx.program.find_routine(i.routine)
        return _apply_qualified_call(r, i.target, routine, list(i.actuals), ctx)
    raise TypeError(f"unknown instruction {i!r}")


def apply(
    r: AliasRelation, i: Instruction, ctx: AnalysisContext
) -> AliasRelation:
    """The alias transfer function r >> i."""
    return apply_full(r, i, ctx)[0]


def _owner_hint(ctx: AnalysisContext) -> Optional[str]:
    if ctx.call_stack:
        return ctx.call_stack[-1][0]
    return ctx.default_class


# ---------------------------------------------------------------------------
# Per-kind rules
# ---------------------------------------------------------------------------


def _change_of_target(
    r: AliasRelation, t: str, ctx: AnalysisContext
) -> ChangeSet:
    """Assignment-shaped change: c.t for every c aliased to Current."""
    currents, topped = r.aliases_of(CURRENT)
    exprs = []
    includes_top = topped
    for c in currents:
        if len(c) > r.limit:
            # beyond the bounded domain; no within-cutoff expression can be
            # covered through it
            continue
        if r.is_topped(c):
            includes_top = True
        else:
            exprs.append(c + (t,))
    return _changeset(exprs, ctx.limit, includes_top)


def _apply_assign(
    r: AliasRelation, t: str, s: Expr, ctx: AnalysisContext
) -> tuple[AliasRelation, ChangeSet]:
    cs = _change_of_target(r, t, ctx)
    deep = not ctx.is_attribute(t)
    if ctx.naive_assign:
        return _apply_assign_naive(r, t, s, ctx, deep), cs
    ot: Expr = (OLD_TAG,)
    # r1 = r [ot = t], dot complete
    r1 = r.augment(ot, [(t,)], ctx.attrs)
    source_aliases, source_topped = r1.aliases_of(s)
    # the closure does not store partners beyond the cutoff; if the source
    # has one, the target may denote an untrackable object and folds into
    # the top class
    source_topped = source_topped or r1.has_untracked_partner(s, ctx.attrs)
    # the old-value tag stays in the source's alias set: re-aliasing the
    # target to it lets the closure re-derive pairs that survive the
    # assignment (for example [t.a, w] across t := t); it is scrubbed below
    u = r1.minus_exprs(source_aliases, t, deep)
    result = r1.minus_tag(t, deep)
    result = result.augment((t,), u, ctx.attrs)
    if source_topped:
        result = AliasRelation(
            result.pairs, result.top | {(t,)}, result.limit
        )
    result = result.drop_containing({OLD_TAG})
    return result.clamp(), cs


def _apply_assign_naive(
    r: AliasRelation, t: str, s: Expr, ctx: AnalysisContext, deep: bool
) -> AliasRelation:
    """The historic, unsound form of the rule: no fresh old-value tag, so
    aliases of the source reached through the target itself are lost.  Kept
    only so tests can demonstrate the corrected rule's discrimination power.
    """
    source_aliases, source_topped = r.aliases_of(s)
    u = {e for e in source_aliases if not (e and e[0] == t)}
    result = r.minus_tag(t, deep)
    result = result.augment((t,), u, ctx.attrs)
    if source_topped:
        result = AliasRelation(
            result.pairs, result.top | {(t,)}, result.limit
        )
    return result.clamp()


def _apply_create_forget(
    r: AliasRelation, t: str, ctx: AnalysisContext
) -> tuple[AliasRelation, ChangeSet]:
    cs = _change_of_target(r, t, ctx)
    deep = not ctx.is_attribute(t)
    # re-close after removal: a surviving pair such as [z, Current] must
    # re-derive the same-field pair [z.t, t] that the removal just dropped
    return r.minus_tag(t, deep).dot_complete(ctx.attrs).clamp(), cs


def _apply_cut(
    r: AliasRelation, a: Expr, b: Expr, ctx: AnalysisContext
) -> AliasRelation:
    if r.is_topped(a) or r.is_topped(b):
        ctx.diagnostic(
            f"cut {expr_str(a)}, {expr_str(b)}: one side is folded into the "
            f"top class; top membership is not removed"
        )
    return r.minus_pair(a, b)


def _apply_bind(
    r: AliasRelation, a: Expr, b: Expr, ctx: AnalysisContext
) -> AliasRelation:
    """After `bind a, b` the two paths are equal, so each acquires every
    alias of the other (pairwise augmentation alone would be too weak:
    alias relations are not transitive)."""
    result = r.augment(a, r.partners(b) | {b}, ctx.attrs)
    result = result.augment(b, result.partners(a) | {a}, ctx.attrs)
    for e, other in ((a, b), (b, a)):
        if result.is_topped(other) or result.has_untracked_partner(
            other, ctx.attrs
        ):
            result = AliasRelation(result.pairs, result.top | {e}, result.limit)
    return result.clamp()


def _apply_loop(
    r: AliasRelation, body: Instruction, ctx: AnalysisContext
) -> tuple[AliasRelation, ChangeSet]:
    valve = ctx.loop_valve()
    current = r
    cs = ChangeSet.empty()
    iterations = 0
    while True:
        iterations += 1
        if iterations > valve:
            raise AnalysisError(
                "loop fixpoint failed to converge within the finiteness bound; "
                "this indicates an implementation bug"
            )
        stepped, step_cs = apply_full(current, body, ctx)
        merged = current.union(stepped)
        merged_cs = cs.union(step_cs)
        if merged == current and merged_cs == cs:
            break
        current, cs = merged, merged_cs
    ctx.loop_iteration_peak = max(ctx.loop_iteration_peak, iterations)
    return current, cs


# ---------------------------------------------------------------------------
# Calls
# ---------------------------------------------------------------------------


def _rename_instruction(i: Instruction, table: dict[str, str]) -> Instruction:
    def rename_expr(e: Expr) -> Expr:
        if e and e[0] in table:
            return (table[e[0]],) + e[1:]
        return e

    if isinstance(i, Assign):
        return Assign(table.get(i.target, i.target), rename_expr(i.source))
    if isinstance(i, Create):
        return Create(table.get(i.target, i.target))
    if isinstance(i, Forget):
        return Forget(table.get(i.target, i.target))
    if isinstance(i, Cut):
        return Cut(rename_expr(i.a), rename_expr(i.b))
    if isinstance(i, Bind):
        return Bind(rename_expr(i.a), rename_expr(i.b))
    if isinstance(i, Seq):
        return Seq(tuple(_rename_instruction(x, table) for x in i.items))
    if isinstance(i, Choice):
        return Choice(
            _rename_instruction(i.then_body, table),
            _rename_instruction(i.else_body, table),
        )
    if isinstance(i, Loop):
        return Loop(_rename_instruction(i.body, table))
    if isinstance(i, Call):
        return Call(i.routine, tuple(rename_expr(a) for a in i.actuals))
    if isinstance(i, QualifiedCall):
        return QualifiedCall(
            rename_expr(i.target),
            i.routine,
            tuple(rename_expr(a) for a in i.actuals),
        )
    raise TypeError(f"unknown instruction {i!r}")


def _widened(r: AliasRelation, ctx: AnalysisContext) -> AliasRelation:
    """Recursion-guard fallback: fold every root tag of the program into the
    top class, so the callee may alias and change anything reachable."""
    extra = {(name,) for name in ctx.program_tags()}
    return AliasRelation(r.pairs, r.top | frozenset(extra), r.limit)


def _apply_call(
    r: AliasRelation,
    routine: Routine,
    actuals: list[Expr],
    ctx: AnalysisContext,
) -> tuple[AliasRelation, ChangeSet]:
    if len(actuals) != len(routine.formals):
        raise AnalysisError(
            f"arity mismatch calling '{routine.qualified_name()}'"
        )
    key = (routine.qualified_name(), tuple(actuals), r)
    if key in ctx.cache:
        return ctx.cache[key]
    if key in (frame[1] for frame in ctx.call_stack):
        ctx.diagnostic(
            f"recursion guard hit for '{routine.qualified_name()}'; applying "
            f"the conservative widening"
        )
        return _widened(r, ctx), ChangeSet(frozenset(), True)

    fresh = next(ctx._rename_counter)
    locals_ = routine_locals(routine, ctx.attrs)
    table = {
        name: f"{name}{RENAME_SEP}{fresh}"
        for name in (*routine.formals, *sorted(locals_))
    }
    body = _rename_instruction(routine.body, table)

    # a formal is a true copy of its actual, so it aliases everything the
    # actual aliases (adding just the [formal, actual] pair would lose the
    # rest: alias relations are not transitive)
    bound = r
    for formal, actual in zip(routine.formals, actuals):
        name: Expr = (table[formal],)
        partners = {
            e for e in bound.partners(actual) | {actual} if len(e) <= r.limit
        }
        bound = bound.augment(name, partners, ctx.attrs)
        if bound.is_topped(actual) or bound.has_untracked_partner(
            actual, ctx.attrs
        ):
            bound = AliasRelation(bound.pairs, bound.top | {name}, bound.limit)

    ctx.call_stack.append((routine.class_name, key))
    try:
        result, callee_cs = apply_full(bound, body, ctx)
    finally:
        ctx.call_stack.pop()

    # translate callee changes back into the caller's vocabulary
    caller_changes: list[Expr] = []
    includes_top = callee_cs.includes_top
    actual_of = {table[f]: a for f, a in zip(routine.formals, actuals)}
    local_names = {table[name] for name in locals_}
    for e in callee_cs.exprs:
        root = e[0] if e else None
        if root in local_names:
            continue  # locals are invisible to the caller
        if root in actual_of:
            e = concat(actual_of[root], e[1:])
        if any(_internal_tag(t) for t in e):
            # paths through a renamed binding are not expressible by the
            # caller and denote no heap path; their expressible consequences
            # were already closed into the relation
            continue
        caller_changes.append(e)
    cs = _changeset(caller_changes, ctx.limit, includes_top)

    result = result.drop_containing(table.values()).clamp()
    ctx.cache[key] = (result, cs)
    return result, cs


def _apply_qualified_call(
    r: AliasRelation,
    target: Expr,
    routine: Routine,
    actuals: list[Expr],
    ctx: AnalysisContext,
) -> tuple[AliasRelation, ChangeSet]:
    x = target
    neg = inverse_path(x)
    inner = r.transpose(x, into_callee=True)
    inner_actuals = [concat(neg, a) for a in actuals]
    inner_result, inner_cs = _apply_call(inner, routine, inner_actuals, ctx)
    # transposition shortens expressions (inverse tags cancel), so the result
    # must be re-closed under dot-completeness to regain suffix pairs
    result = (
        inner_result.transpose(x, into_callee=False)
        .dot_complete(ctx.attrs)
        .clamp()
    )

    # change rule: for every y aliased to x, the callee's changes show up
    # under y; a callee change through a transposed actual maps back to the
    # caller's own expression.
    ys, x_topped = r.aliases_of(x)
    caller_changes: list[Expr] = []
    includes_top = inner_cs.includes_top or x_topped
    for c in inner_cs.exprs:
        if has_negative(c):
            if len(c) >= len(neg) and c[: len(neg)] == neg:
                stripped = c[len(neg):]
                if not has_negative(stripped):
                    caller_changes.append(stripped)
            # other negative-tagged expressions traverse the call boundary
            # backwards along paths the caller cannot write down; they denote
            # no heap path and are dropped
        else:
            for y in ys:
                if len(y) > r.limit:
                    continue
                if r.is_topped(y):
                    includes_top = True
                else:
                    caller_changes.append(concat(y, c))
    return result, _changeset(caller_changes, ctx.limit, includes_top)
