"""Command-line interface.

Exit codes: 0 success, 1 missing-modifies findings, 2 input errors (parse,
resolution, or a cutoff below the program's longest expression), 3 soundness
violations found by fuzzing.
"""

from __future__ import annotations

import sys
from typing import Optional

import click

from .frames import MISSING
from .fuzz import FuzzConfig, run_fuzz
from .lang import Program, SourceError, compute_M, parse_program
from .report import build_report, render_csv, render_json, render_text

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_UNSOUND = 3

DEFAULT_MIN_L = 4


def _load(source_file: str) -> Program:
    try:
        with click.open_file(source_file) as f:
            return parse_program(f.read())
    except SourceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


def _cutoff(program: Program, limit: Optional[int]) -> int:
    m = compute_M(program)
    if limit is None:
        return max(m, DEFAULT_MIN_L)
    if limit < m:
        click.echo(
            f"error: cutoff L={limit} is below the longest expression in the "
            f"program (M={m})",
            err=True,
        )
        sys.exit(EXIT_INPUT)
    return limit


@click.group()
def main() -> None:
    """May-alias and frame analysis for a small object-oriented language."""


@main.command()
@click.argument("source_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--L", "limit", type=int, default=None, help="Expression length cutoff (default: max of the program's longest expression and 4).")
@click.option("--entry", default=None, help="Report a single routine, by plain or qualified name.")
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
@click.option("--figures", "figures_dir", type=click.Path(file_okay=False), default=None, help="Also render figures (PNG) into this directory.")
def analyze(source_file, limit, entry, fmt, figures_dir) -> None:
    """Analyze aliasing, change sets and frame clauses of a program."""
    program = _load(source_file)
    limit = _cutoff(program, limit)
    try:
        report = build_report(program, limit, entry=entry)
    except KeyError as exc:
        click.echo(f"error: {exc.args[0]}", err=True)
        sys.exit(EXIT_INPUT)
    if figures_dir is not None:
        from .figures import render_figures

        for path in render_figures(report, figures_dir):
            click.echo(f"wrote {path}", err=True)
    renderer = {"text": render_text, "json": render_json, "csv": render_csv}
    click.echo(renderer[fmt](report), nl=False)
    missing = any(f["kind"] == MISSING for f in report["findings"])
    sys.exit(EXIT_FINDINGS if missing else EXIT_OK)


@main.command("check-frames")
@click.argument("source_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--L", "limit", type=int, default=None, help="Expression length cutoff.")
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def check_frames_cmd(source_file, limit, fmt) -> None:
    """Verify declared modifies clauses against inferred change sets."""
    program = _load(source_file)
    limit = _cutoff(program, limit)
    report = build_report(program, limit)
    if fmt == "json":
        click.echo(render_json(report), nl=False)
    elif fmt == "csv":
        click.echo(render_csv(report), nl=False)
    else:
        for f in report["findings"]:
            witnesses = ", ".join(f["witnesses"])
            line = f"{f['kind']}: {f['routine']}"
            if witnesses:
                line += f" [{witnesses}]"
            click.echo(line)
    missing = any(f["kind"] == MISSING for f in report["findings"])
    sys.exit(EXIT_FINDINGS if missing else EXIT_OK)


@main.command()
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--L", "limit", type=int, default=4, show_default=True)
@click.option("--unroll", type=int, default=3, show_default=True)
@click.option("--vocab-vars", type=int, default=3, show_default=True)
@click.option("--vocab-attrs", type=int, default=2, show_default=True)
@click.option("--max-instructions", type=int, default=6, show_default=True)
@click.option("--stop-on-first", is_flag=True, help="Stop at the first violation.")
def fuzz(trials, seed, limit, unroll, vocab_vars, vocab_attrs, max_instructions, stop_on_first) -> None:
    """Differential-test the analysis against the concrete executor."""
    config = FuzzConfig(
        trials=trials,
        seed=seed,
        n_vars=vocab_vars,
        n_attrs=vocab_attrs,
        max_instr=max_instructions,
        limit=limit,
        unroll=unroll,
    )
    result = run_fuzz(config, stop_on_first=stop_on_first)
    click.echo(result.to_json(), nl=False)
    sys.exit(EXIT_UNSOUND if result.violations else EXIT_OK)


if __name__ == "__main__":
    main()
