"""Frame-clause inference and verification.

For each routine the may-change set of its body, analyzed from the empty
relation of a fresh activation, is projected onto the attributes of the
routine's class and compared with the declared modifies clause.  A sound
clause contains the inferred changes; extra declared attributes are reported
as advisory (either an over-wide specification or a change-then-restore the
calculus cannot see).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lang import Expr, Program, Routine, expr_str, has_negative
from .relation import AliasRelation
from .transfer import AnalysisContext, ChangeSet, apply_full

VERIFIED = "Verified"
MISSING = "MissingModifies"
UNNECESSARY = "UnnecessaryModifies"
NO_CLAUSE = "NoClause"


@dataclass(frozen=True)
class FrameFinding:
    routine: str  # qualified name Class.routine
    kind: str
    witnesses: tuple[str, ...]
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "routine": self.routine,
            "kind": self.kind,
            "witnesses": list(self.witnesses),
            "note": self.note,
        }


@dataclass(frozen=True)
class RoutineChanges:
    """Per-routine inference result, split by visibility."""

    routine: str
    attribute_exprs: tuple[str, ...]  # Current-rooted attribute paths
    attribute_roots: tuple[str, ...]  # their root attributes
    argument_exprs: tuple[str, ...]  # formal-rooted changes (side effects)
    includes_top: bool

    def to_dict(self) -> dict:
        return {
            "routine": self.routine,
            "attributeExprs": list(self.attribute_exprs),
            "attributeRoots": list(self.attribute_roots),
            "argumentExprs": list(self.argument_exprs),
            "includesTop": self.includes_top,
        }


def routine_change_set(
    routine: Routine, ctx: AnalysisContext
) -> tuple[ChangeSet, AliasRelation]:
    """Analyze a routine body from the empty relation of a fresh activation."""
    ctx.default_class = routine.class_name
    r0 = AliasRelation.empty(ctx.limit)
    result, cs = apply_full(r0, routine.body, ctx)
    return cs, result


def split_changes(
    routine: Routine, cs: ChangeSet, ctx: AnalysisContext
) -> RoutineChanges:
    attrs = ctx.attrs
    attribute_exprs: set[Expr] = set()
    argument_exprs: set[Expr] = set()
    for e in cs.exprs:
        if not e or has_negative(e):
            continue
        root = e[0]
        if root in attrs:
            attribute_exprs.add(e)
        elif root in routine.formals:
            argument_exprs.add(e)
        # locals and analysis-internal names are invisible to callers
    roots = sorted({e[0] for e in attribute_exprs})
    return RoutineChanges(
        routine=routine.qualified_name(),
        attribute_exprs=tuple(sorted(expr_str(e) for e in attribute_exprs)),
        attribute_roots=tuple(roots),
        argument_exprs=tuple(sorted(expr_str(e) for e in argument_exprs)),
        includes_top=cs.includes_top,
    )


def infer_frames(
    program: Program, limit: int
) -> tuple[dict[str, RoutineChanges], list[str]]:
    """Inferred change information for every routine, keyed by qualified
    name; second result is the list of analysis diagnostics."""
    ctx = AnalysisContext(program, limit)
    out: dict[str, RoutineChanges] = {}
    for routine in program.routines():
        cs, _ = routine_change_set(routine, ctx)
        out[routine.qualified_name()] = split_changes(routine, cs, ctx)
    return out, list(ctx.diagnostics)


def check_frames(
    program: Program,
    limit: int,
    inferred: Optional[dict[str, RoutineChanges]] = None,
) -> tuple[list[FrameFinding], list[str]]:
    """Compare inferred change sets against declared modifies clauses.

    Findings are ordered by class then routine name; a routine may yield both
    a MissingModifies and an UnnecessaryModifies finding.
    """
    diagnostics: list[str] = []
    if inferred is None:
        inferred, diagnostics = infer_frames(program, limit)
    findings: list[FrameFinding] = []
    for routine in program.routines():
        name = routine.qualified_name()
        changes = inferred[name]
        if changes.includes_top:
            owner = program.classes[routine.class_name]
            inferred_roots = set(owner.attributes)
            note = "change set overflowed; every attribute assumed changed"
        else:
            inferred_roots = set(changes.attribute_roots)
            note = ""
        if routine.modifies is None:
            findings.append(
                FrameFinding(
                    name,
                    NO_CLAUSE,
                    tuple(sorted(inferred_roots)),
                    "no modifies clause declared; inferred set shown",
                )
            )
            continue
        declared = set(routine.modifies)
        missing = sorted(inferred_roots - declared)
        unnecessary = sorted(declared - inferred_roots)
        if missing:
            findings.append(FrameFinding(name, MISSING, tuple(missing), note))
        if unnecessary:
            findings.append(
                FrameFinding(
                    name,
                    UNNECESSARY,
                    tuple(unnecessary),
                    "declared but never observed to change; either superfluous "
                    "or restored after a change",
                )
            )
        if not missing and not unnecessary:
            findings.append(FrameFinding(name, VERIFIED, ()))
    return findings, diagnostics
