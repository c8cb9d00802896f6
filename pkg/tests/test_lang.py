"""Parser, pretty-printer and source-level helpers."""

import pytest

from mayalias import (
    ParseError,
    compute_M,
    expr_str,
    parse_program,
    pretty_print,
)
from mayalias.lang import (
    Assign,
    QualifiedCall,
    Seq,
    concat,
    has_negative,
    inverse_path,
)

SMALL = """
class C
  attributes u, v
  routine demo do
    a := u.v
    a.set_u (a)
  end
  routine set_u (p) modifies u do
    u := p
  end
end
"""


def test_parse_shapes():
    p = parse_program(SMALL)
    c = p.classes["C"]
    assert c.attributes == ("u", "v")
    demo = c.routines["demo"]
    assert isinstance(demo.body, Seq)
    first, second = demo.body.items
    assert first == Assign("a", ("u", "v"))
    assert isinstance(second, QualifiedCall)
    assert second.target == ("a",)
    assert second.actuals == (("a",),)
    assert c.routines["set_u"].modifies == ("u",)
    assert demo.modifies is None


def test_pretty_print_round_trip():
    p = parse_program(SMALL)
    printed = pretty_print(p)
    again = parse_program(printed)
    assert pretty_print(again) == printed
    assert again == p


def test_comments_and_separators():
    src = "class C attributes u -- trailing words\nroutine r do u := u; u := u end end"
    p = parse_program(src)
    assert "r" in p.classes["C"].routines


def test_empty_modifies_clause():
    src = "class C attributes u routine r modifies do t := u end end"
    p = parse_program(src)
    assert p.classes["C"].routines["r"].modifies == ()


@pytest.mark.parametrize(
    "source, fragment",
    [
        ("", "empty program"),
        ("class C end class C end", "declared twice"),
        ("class C routine r do x.u := y end end", "remote field assignment"),
        ("class C routine r do x := ? end end", "unexpected character"),
        ("class C routine r do loop x := y end", "expected"),
    ],
)
def test_parse_errors(source, fragment):
    with pytest.raises(ParseError) as exc:
        parse_program(source)
    assert fragment in str(exc.value)


def test_compute_m_is_longest_source_path():
    src = "class C attributes u, v routine r do a := u.v.u\nb := a end end"
    assert compute_M(parse_program(src)) == 3


def test_expr_str():
    assert expr_str(()) == "Current"
    assert expr_str(("a", "u")) == "a.u"


def test_inverse_path_cancellation():
    x = ("a", "u")
    assert concat(inverse_path(x), x) == ()
    assert concat(x, inverse_path(x)) == ()
    shifted = concat(inverse_path(("a",)), ("a", "u", "v"))
    assert shifted == ("u", "v")
    assert has_negative(concat(inverse_path(("a",)), ("b",)))
    assert not has_negative(("a", "u"))
