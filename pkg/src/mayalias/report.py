"""Analysis reports: a structured dictionary plus text/JSON/CSV renderers.

The JSON rendering is deterministic (sorted keys, fixed separators) so that
repeated runs over the same input are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from typing import Optional

from .frames import check_frames, infer_frames
from .lang import Program, expr_str, pretty_print
from .relation import AliasRelation
from .transfer import AnalysisContext, apply_full

REPORT_VERSION = 1


def _routine_entry(routine, program: Program, limit: int) -> dict:
    ctx = AnalysisContext(program, limit, default_class=routine.class_name)
    r0 = AliasRelation.empty(limit)
    relation, changes = apply_full(r0, routine.body, ctx)
    groups = [
        [expr_str(e) for e in group] for group in relation.canonical_groups()
    ]
    return {
        "routine": routine.qualified_name(),
        "aliasGroups": groups,
        "top": sorted(expr_str(e) for e in relation.top),
        "changeSet": changes.to_list(),
        "diagnostics": list(ctx.diagnostics),
    }


def build_report(
    program: Program, limit: int, entry: Optional[str] = None
) -> dict:
    """The full analysis of a program at cutoff `limit`.

    `entry` restricts per-routine detail to one routine, given by its plain or
    qualified name; frame findings always cover the whole program.
    """
    source = pretty_print(program)
    routines = list(program.routines())
    if entry is not None:
        routines = [
            r
            for r in routines
            if r.name == entry or r.qualified_name() == entry
        ]
        if not routines:
            raise KeyError(f"no routine named '{entry}'")
    entries = [_routine_entry(r, program, limit) for r in routines]

    inferred, diag = infer_frames(program, limit)
    findings, _ = check_frames(program, limit, inferred)
    if entry is not None:
        names = {r.qualified_name() for r in routines}
        findings = [f for f in findings if f.routine in names]

    diagnostics = list(diag)
    for e in entries:
        for message in e.pop("diagnostics"):
            if message not in diagnostics:
                diagnostics.append(message)

    return {
        "version": REPORT_VERSION,
        "programDigest": hashlib.sha256(source.encode()).hexdigest(),
        "L": limit,
        "routines": entries,
        "changeSets": {e["routine"]: e["changeSet"] for e in entries},
        "inferred": {
            name: rc.to_dict() for name, rc in sorted(inferred.items())
        },
        "findings": [f.to_dict() for f in findings],
        "diagnostics": diagnostics,
    }


def render_json(report: dict) -> str:
    return json.dumps(
        report, sort_keys=True, separators=(",", ": "), indent=2
    ) + "\n"


def render_text(report: dict) -> str:
    lines = [f"analysis report (L = {report['L']})"]
    for e in report["routines"]:
        lines.append("")
        lines.append(f"routine {e['routine']}")
        if e["aliasGroups"]:
            for group in e["aliasGroups"]:
                lines.append("  alias {" + ", ".join(group) + "}")
        else:
            lines.append("  alias (none)")
        if e["top"]:
            lines.append("  top {" + ", ".join(e["top"]) + "}")
        changes = ", ".join(e["changeSet"]) or "(none)"
        lines.append(f"  changes {changes}")
    if report["findings"]:
        lines.append("")
        lines.append("frame findings")
        for f in report["findings"]:
            witnesses = ", ".join(f["witnesses"])
            line = f"  {f['kind']}: {f['routine']}"
            if witnesses:
                line += f" [{witnesses}]"
            if f["note"]:
                line += f" -- {f['note']}"
            lines.append(line)
    if report["diagnostics"]:
        lines.append("")
        lines.append("diagnostics")
        for d in report["diagnostics"]:
            lines.append(f"  {d}")
    return "\n".join(lines) + "\n"


def render_csv(report: dict) -> str:
    """Frame findings as delimited rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["routine", "kind", "witnesses", "note"])
    for f in report["findings"]:
        writer.writerow(
            [f["routine"], f["kind"], " ".join(f["witnesses"]), f["note"]]
        )
    return buf.getvalue()
