"""Command-line interface: exit codes, formats, figures, determinism."""

import json

import pytest
from click.testing import CliRunner

from mayalias.cli import EXIT_FINDINGS, EXIT_INPUT, EXIT_OK, main

from conftest import corpus_text

CLEAN = """class C
  attributes u, v
  routine set_u (p) modifies u do
    u := p
  end
end
"""

BROKEN_CLAUSE = """class C
  attributes u, v
  routine set_both (p) modifies u do
    u := p
    v := p
  end
end
"""


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, text, name="prog.oo"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_analyze_clean_program_exits_ok(runner, tmp_path):
    result = runner.invoke(main, ["analyze", write(tmp_path, CLEAN)])
    assert result.exit_code == EXIT_OK
    assert "Verified: C.set_u" in result.output


def test_analyze_missing_clause_exits_findings(runner, tmp_path):
    result = runner.invoke(main, ["analyze", write(tmp_path, BROKEN_CLAUSE)])
    assert result.exit_code == EXIT_FINDINGS
    assert "MissingModifies" in result.output


def test_analyze_json_shape(runner, tmp_path):
    result = runner.invoke(
        main, ["analyze", write(tmp_path, CLEAN), "--format", "json"]
    )
    report = json.loads(result.output)
    assert report["version"] == 1
    assert report["L"] >= 4
    assert any(e["routine"] == "C.set_u" for e in report["routines"])


def test_analyze_csv_lists_findings(runner, tmp_path):
    result = runner.invoke(
        main, ["analyze", write(tmp_path, BROKEN_CLAUSE), "--format", "csv"]
    )
    lines = result.output.strip().splitlines()
    assert lines[0] == "routine,kind,witnesses,note"
    assert any("MissingModifies" in line for line in lines[1:])


def test_analyze_entry_restricts_report(runner, tmp_path):
    src = CLEAN.replace(
        "end\nend", "end\n  routine other modifies do t := u end\nend"
    )
    result = runner.invoke(
        main,
        ["analyze", write(tmp_path, src), "--entry", "set_u", "--format", "json"],
    )
    report = json.loads(result.output)
    assert [e["routine"] for e in report["routines"]] == ["C.set_u"]


def test_analyze_unknown_entry_is_input_error(runner, tmp_path):
    result = runner.invoke(
        main, ["analyze", write(tmp_path, CLEAN), "--entry", "nope"]
    )
    assert result.exit_code == EXIT_INPUT


def test_parse_error_is_input_error(runner, tmp_path):
    result = runner.invoke(
        main, ["analyze", write(tmp_path, "class C routine r do x. end end")]
    )
    assert result.exit_code == EXIT_INPUT


def test_cutoff_below_program_m_is_input_error(runner, tmp_path):
    src = "class C attributes u routine r do a := u.u.u end end"
    result = runner.invoke(main, ["analyze", write(tmp_path, src), "--L", "2"])
    assert result.exit_code == EXIT_INPUT
    assert "below the longest expression" in result.output


def test_check_frames_reports_kinds(runner, tmp_path):
    result = runner.invoke(
        main, ["check-frames", write(tmp_path, BROKEN_CLAUSE)]
    )
    assert result.exit_code == EXIT_FINDINGS
    assert "MissingModifies: C.set_both [v]" in result.output


def test_fuzz_command_small_run(runner):
    result = runner.invoke(main, ["fuzz", "--trials", "5", "--seed", "2"])
    assert result.exit_code == EXIT_OK
    report = json.loads(result.output)
    assert report["trialsRun"] == 5
    assert report["violations"] == []


def test_json_reports_are_byte_identical_across_runs(runner, tmp_path):
    for name in ("containers.oo", "registry.oo"):
        path = write(tmp_path, corpus_text(name), name)
        outputs = {
            runner.invoke(main, ["analyze", path, "--format", "json"]).output
            for _ in range(3)
        }
        assert len(outputs) == 1


def test_figures_are_rendered(runner, tmp_path):
    figdir = tmp_path / "figs"
    result = runner.invoke(
        main,
        [
            "analyze",
            write(tmp_path, CLEAN),
            "--figures",
            str(figdir),
            "--format",
            "json",
        ],
    )
    assert result.exit_code == EXIT_OK
    written = sorted(p.name for p in figdir.iterdir())
    assert "findings.png" in written
    assert any(name.startswith("alias_") for name in written)
    for p in figdir.iterdir():
        assert p.stat().st_size > 0
