"""May-alias and frame analysis for a small object-oriented language.

The library computes a bounded may-alias relation and a may-change set for
each instruction of a program, infers and verifies `modifies` clauses, and
validates its own rules by differential testing against an executable
concrete heap semantics.
"""

from .concrete import (
    ExecResult,
    ExecutionLimits,
    State,
    defined_expressions,
    exec_instruction,
    value,
)
from .diagrams import (
    AliasDiagram,
    associated_diagram,
    canonicalize_diagram,
    diagram_alias_relation,
    diagram_assign,
    holds,
)
from .frames import (
    FrameFinding,
    RoutineChanges,
    check_frames,
    infer_frames,
)
from .fuzz import FuzzConfig, FuzzReport, run_fuzz
from .lang import (
    CURRENT,
    Expr,
    ParseError,
    Program,
    ResolutionError,
    Routine,
    SourceError,
    compute_M,
    expr_str,
    parse_program,
    pretty_print,
)
from .relation import AliasRelation
from .report import build_report, render_csv, render_json, render_text
from .transfer import AnalysisContext, AnalysisError, ChangeSet, apply, apply_full

__version__ = "0.1.0"

__all__ = [
    "AliasDiagram",
    "AliasRelation",
    "AnalysisContext",
    "AnalysisError",
    "ChangeSet",
    "CURRENT",
    "ExecResult",
    "ExecutionLimits",
    "Expr",
    "FrameFinding",
    "FuzzConfig",
    "FuzzReport",
    "ParseError",
    "Program",
    "ResolutionError",
    "Routine",
    "RoutineChanges",
    "SourceError",
    "State",
    "apply",
    "apply_full",
    "associated_diagram",
    "build_report",
    "canonicalize_diagram",
    "check_frames",
    "compute_M",
    "defined_expressions",
    "diagram_alias_relation",
    "diagram_assign",
    "exec_instruction",
    "expr_str",
    "holds",
    "infer_frames",
    "parse_program",
    "pretty_print",
    "render_csv",
    "render_json",
    "render_text",
    "run_fuzz",
    "value",
]
