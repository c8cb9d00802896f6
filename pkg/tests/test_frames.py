"""Frame-clause inference and verification, including the bundled corpus."""

from mayalias import check_frames, compute_M, infer_frames, parse_program
from mayalias.frames import MISSING, NO_CLAUSE, UNNECESSARY, VERIFIED

from conftest import corpus_text

CORPUS_FILES = ("containers.oo", "registry.oo")

# the deliberately wrong clauses shipped with the corpus
SEEDED_MISSING = {
    "Cell.cell_wipe": ("next",),
    "Queue.queue_restart": ("back",),
    "Account.account_credit": ("last_entry",),
}
SEEDED_UNNECESSARY = {
    "LinkedList.list_touch_head": ("length",),
    "Customer.customer_glance": ("profile",),
}


def corpus_findings():
    out = []
    classes = routines = 0
    for name in CORPUS_FILES:
        program = parse_program(corpus_text(name))
        classes += len(program.classes)
        routines += sum(len(c.routines) for c in program.classes.values())
        findings, diagnostics = check_frames(
            program, max(compute_M(program), 4)
        )
        assert diagnostics == []
        out.extend(findings)
    return out, classes, routines


def test_corpus_size_meets_floor():
    _, classes, routines = corpus_findings()
    assert classes >= 10
    assert routines >= 40


def test_corpus_reports_exactly_the_seeded_findings():
    findings, _, _ = corpus_findings()
    missing = {
        f.routine: f.witnesses for f in findings if f.kind == MISSING
    }
    unnecessary = {
        f.routine: f.witnesses for f in findings if f.kind == UNNECESSARY
    }
    assert missing == SEEDED_MISSING
    assert unnecessary == SEEDED_UNNECESSARY
    flagged = set(SEEDED_MISSING) | set(SEEDED_UNNECESSARY)
    for f in findings:
        if f.routine not in flagged:
            assert f.kind == VERIFIED


def test_verified_routines_have_empty_witnesses():
    findings, _, _ = corpus_findings()
    for f in findings:
        if f.kind == VERIFIED:
            assert f.witnesses == ()


def test_missing_clause_reports_no_clause_with_inferred_set():
    src = """class C attributes u, v
    routine r do u := v end
    end"""
    findings, _ = check_frames(parse_program(src), 4)
    (finding,) = findings
    assert finding.kind == NO_CLAUSE
    assert finding.witnesses == ("u",)


def test_overflowing_change_set_assumes_all_attributes():
    src = """class C attributes u, v
    routine spin modifies u, v do spin () end
    end"""
    findings, _ = check_frames(parse_program(src), 4)
    (finding,) = findings
    assert finding.kind == VERIFIED  # clause lists every attribute


def test_infer_frames_splits_argument_side_effects():
    src = """class C attributes u
    routine set_u (p) do u := p end
    routine poke (c) modifies do c.set_u (c) end
    end"""
    inferred, _ = infer_frames(parse_program(src), 4)
    poke = inferred["C.poke"]
    assert poke.attribute_roots == ()
    assert "c.u" in poke.argument_exprs
