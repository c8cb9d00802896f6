"""Structured report assembly and rendering."""

import json

from mayalias import build_report, parse_program, render_csv, render_json, render_text

SRC = """class C
  attributes u
  routine set_u (p) modifies u do
    u := p
  end
  routine noisy modifies do
    u := p
  end
end
"""


def report():
    return build_report(parse_program(SRC), 4)


def test_report_top_level_fields():
    rep = report()
    assert set(rep) == {
        "version",
        "programDigest",
        "L",
        "routines",
        "changeSets",
        "inferred",
        "findings",
        "diagnostics",
    }
    assert rep["changeSets"]["C.set_u"] == ["u"]


def test_digest_tracks_program_content():
    a = report()["programDigest"]
    b = build_report(parse_program(SRC.replace("noisy", "loud")), 4)[
        "programDigest"
    ]
    assert a != b
    assert len(a) == 64


def test_render_json_round_trips_and_ends_with_newline():
    text = render_json(report())
    assert text.endswith("\n")
    assert json.loads(text) == report()


def test_render_text_mentions_routines_and_findings():
    text = render_text(report())
    assert "routine C.set_u" in text
    assert "Verified: C.set_u" in text
    assert "MissingModifies: C.noisy [u]" in text


def test_render_csv_has_one_row_per_finding():
    rep = report()
    lines = render_csv(rep).strip().splitlines()
    assert len(lines) == 1 + len(rep["findings"])
