"""Concrete heap semantics: the executable oracle."""

from mayalias import (
    ExecutionLimits,
    State,
    defined_expressions,
    exec_instruction,
    parse_program,
    value,
)
from mayalias.lang import (
    Assign,
    Bind,
    Choice,
    Create,
    Cut,
    Forget,
    Loop,
    Seq,
)

S0 = State.make([0, 1, 2], [(0, "x", 1), (0, "y", 2), (1, "u", 2)])


def run(i, state=S0, program=None, **kw):
    return exec_instruction(state, 0, i, program, ExecutionLimits(), **kw)


def test_value_follows_paths():
    assert value(S0, 0, ()) == 0
    assert value(S0, 0, ("x", "u")) == 2
    assert value(S0, 0, ("x", "u", "u")) is None


def test_assign_rebinds_tag():
    (final,) = run(Assign("x", ("y",))).states
    assert value(final, 0, ("x",)) == 2


def test_assign_undefined_source_unbinds():
    (final,) = run(Assign("x", ("y", "u"))).states
    assert value(final, 0, ("x",)) is None


def test_create_allocates_fresh_object():
    (final,) = run(Create("x")).states
    created = value(final, 0, ("x",))
    assert created not in S0.objects
    assert created in final.objects


def test_forget_unbinds():
    (final,) = run(Forget("x")).states
    assert value(final, 0, ("x",)) is None


def test_choice_explores_both_branches():
    result = run(Choice(Assign("x", ("y",)), Assign("y", ("x",))))
    values = sorted(
        (value(s, 0, ("x",)), value(s, 0, ("y",))) for s in result.states
    )
    assert values == [(1, 1), (2, 2)]


def test_loop_unrolls_bounded_times():
    result = run(Loop(Create("x")))
    # zero through `unroll` creations, each a distinct final state
    assert len(result.states) == ExecutionLimits().unroll + 1


def test_cut_discards_equal_paths():
    body = Seq((Assign("x", ("y",)), Cut(("x",), ("y",))))
    result = run(body)
    assert result.states == []
    assert result.aborted_paths == 1


def test_cut_keeps_unequal_paths():
    result = run(Cut(("x",), ("y",)))
    assert len(result.states) == 1
    assert result.aborted_paths == 0


def test_bind_keeps_only_equal_paths():
    result = run(Bind(("x",), ("y",)))
    assert result.states == []
    body = Seq((Assign("x", ("y",)), Bind(("x",), ("y",))))
    assert len(run(body).states) == 1


def test_qualified_call_runs_in_target_frame():
    src = """class Main attributes u
    routine set_u (p) do u := p end
    routine demo do x.set_u (y) end
    end"""
    program = parse_program(src)
    body = program.find_routine("demo").body
    (final,) = run(body, program=program, owner="Main").states
    assert value(final, 0, ("x", "u")) == value(final, 0, ("y",)) == 2


def test_formals_are_scoped_not_heap_edges():
    src = """class Main attributes u
    routine set_u (p) do u := p end
    routine demo do set_u (y) end
    end"""
    program = parse_program(src)
    body = program.find_routine("demo").body
    (final,) = run(body, program=program, owner="Main").states
    assert value(final, 0, ("u",)) == 2
    assert value(final, 0, ("p",)) is None


def test_defined_expressions_groups_by_reachability():
    table = defined_expressions(S0, 0, ["x", "y"], ["u"], 3)
    assert table[()] == 0
    assert table[("x",)] == 1
    assert table[("x", "u")] == 2
    assert ("y", "u") not in table  # object 2 has no u edge
    assert max(len(e) for e in table) <= 3


def test_execution_is_deterministic():
    body = Choice(
        Seq((Create("x"), Assign("y", ("x",)))), Loop(Assign("x", ("x", "u")))
    )
    a = run(body)
    b = run(body)
    assert a.states == b.states
