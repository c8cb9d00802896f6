"""Mini-language front end: AST, parser, printer and program-wide constants.

The analyzed language is a stripped-down object-oriented language: classes
with reference attributes and routines, path expressions, and a small set of
instructions (assignment to a single tag, create/forget, cut/bind assertions,
guardless conditionals and loops, unqualified and qualified calls).  Remote
field assignment (``x.u := a``) is rejected; it must be written through a
setter routine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

# An expression is a path of tags; the empty tuple is Current.
Expr = tuple[str, ...]
CURRENT: Expr = ()

NEG_MARK = "'"


def negate_tag(tag: str) -> str:
    """Flip the polarity of a tag (negative tags only exist transiently)."""
    if tag.endswith(NEG_MARK):
        return tag[:-1]
    return tag + NEG_MARK


def is_negative_tag(tag: str) -> bool:
    return tag.endswith(NEG_MARK)


def has_negative(e: Expr) -> bool:
    return any(is_negative_tag(t) for t in e)


def inverse_path(e: Expr) -> Expr:
    """The formal inverse of a path: reversed, each tag negated."""
    return tuple(negate_tag(t) for t in reversed(e))


def reduce_path(e: Expr) -> Expr:
    """Cancel adjacent mutually inverse tags (t'.t and t.t' both vanish)."""
    out: list[str] = []
    for tag in e:
        if out and out[-1] == negate_tag(tag):
            out.pop()
        else:
            out.append(tag)
    return tuple(out)


def concat(a: Expr, b: Expr) -> Expr:
    """Concatenate paths, cancelling inverse tags at the junction."""
    out = list(a)
    for tag in b:
        if out and out[-1] == negate_tag(tag):
            out.pop()
        else:
            out.append(tag)
    return tuple(out)


def expr_str(e: Expr) -> str:
    return ".".join(e) if e else "Current"


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    source: Expr


@dataclass(frozen=True)
class Create:
    target: str


@dataclass(frozen=True)
class Forget:
    target: str


@dataclass(frozen=True)
class Cut:
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Bind:
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Seq:
    items: tuple["Instruction", ...]


@dataclass(frozen=True)
class Choice:
    then_body: "Instruction"
    else_body: "Instruction"


@dataclass(frozen=True)
class Loop:
    body: "Instruction"


@dataclass(frozen=True)
class Call:
    routine: str
    actuals: tuple[Expr, ...]


@dataclass(frozen=True)
class QualifiedCall:
    target: Expr
    routine: str
    actuals: tuple[Expr, ...]


Instruction = Union[
    Assign, Create, Forget, Cut, Bind, Seq, Choice, Loop, Call, QualifiedCall
]

SKIP = Seq(())


@dataclass(frozen=True)
class Routine:
    name: str
    formals: tuple[str, ...]
    body: Instruction
    modifies: Optional[tuple[str, ...]]
    class_name: str

    def qualified_name(self) -> str:
        return f"{self.class_name}.{self.name}"


@dataclass(frozen=True, eq=False)
class ClassDecl:
    name: str
    attributes: tuple[str, ...]
    routines: dict[str, Routine]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ClassDecl)
            and self.name == other.name
            and self.attributes == other.attributes
            and self.routines == other.routines
        )


@dataclass(frozen=True, eq=False)
class Program:
    classes: dict[str, ClassDecl]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Program) and self.classes == other.classes

    def all_attributes(self) -> frozenset[str]:
        out: set[str] = set()
        for c in self.classes.values():
            out.update(c.attributes)
        return frozenset(out)

    def routines(self) -> Iterator[Routine]:
        for cname in sorted(self.classes):
            cls = self.classes[cname]
            for rname in sorted(cls.routines):
                yield cls.routines[rname]

    def find_routine(self, name: str, class_name: Optional[str] = None) -> Routine:
        """Resolve a routine name; unqualified calls resolve within the class,
        qualified calls require a program-wide unique name."""
        if class_name is not None and class_name in self.classes:
            cls = self.classes[class_name]
            if name in cls.routines:
                return cls.routines[name]
        matches = [
            c.routines[name] for c in self.classes.values() if name in c.routines
        ]
        if not matches:
            raise ResolutionError(f"unresolved routine '{name}'")
        if len(matches) > 1:
            raise ResolutionError(
                f"routine '{name}' is declared in more than one class"
            )
        return matches[0]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class SourceError(Exception):
    """A diagnostic with a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class ParseError(SourceError):
    pass


class ResolutionError(SourceError):
    pass


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

KEYWORDS = {
    "class",
    "attributes",
    "routine",
    "modifies",
    "do",
    "end",
    "create",
    "forget",
    "cut",
    "bind",
    "then",
    "else",
    "loop",
    "Current",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<comment>--[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<assign>:=)
  | (?P<sym>[.,();])
  | (?P<ws>[ \t\r\n]+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "kw", "assign", "sym", "eof"
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(source):
        text = m.group(0)
        kind = m.lastgroup
        if kind == "bad":
            raise ParseError(f"unexpected character {text!r}", line, col)
        if kind == "name":
            tokens.append(
                Token("kw" if text in KEYWORDS else "name", text, line, col)
            )
        elif kind in ("assign", "sym"):
            tokens.append(Token(kind, text, line, col))
        # comments and whitespace are skipped
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect_kw(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind == "kw" and tok.text == word:
            return self.next()
        raise self.error(f"expected '{word}', found {tok.text!r}")

    def expect_sym(self, sym: str) -> Token:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == sym:
            return self.next()
        raise self.error(f"expected '{sym}', found {tok.text!r}")

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind == "name":
            return self.next()
        raise self.error(f"expected an identifier, found {tok.text!r}")

    def at_kw(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "kw" and tok.text == word

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == sym

    def skip_separators(self) -> None:
        while self.at_sym(";"):
            self.next()

    # -- grammar -----------------------------------------------------------

    def program(self) -> Program:
        classes: dict[str, ClassDecl] = {}
        self.skip_separators()
        while self.at_kw("class"):
            cls = self.class_decl()
            if cls.name in classes:
                raise self.error(f"class '{cls.name}' declared twice")
            classes[cls.name] = cls
            self.skip_separators()
        if self.peek().kind != "eof":
            raise self.error(f"expected 'class', found {self.peek().text!r}")
        if not classes:
            raise ParseError("empty program: no class declarations", 1, 1)
        return Program(classes)

    def class_decl(self) -> ClassDecl:
        self.expect_kw("class")
        name = self.expect_name().text
        attributes: tuple[str, ...] = ()
        self.skip_separators()
        if self.at_kw("attributes"):
            self.next()
            attributes = self.name_list()
        routines: dict[str, Routine] = {}
        self.skip_separators()
        while self.at_kw("routine"):
            r = self.routine(name)
            if r.name in routines:
                raise self.error(f"routine '{r.name}' declared twice in '{name}'")
            routines[r.name] = r
            self.skip_separators()
        self.expect_kw("end")
        return ClassDecl(name, attributes, routines)

    def routine(self, class_name: str) -> Routine:
        self.expect_kw("routine")
        tok = self.expect_name()
        formals: tuple[str, ...] = ()
        if self.at_sym("("):
            self.next()
            if not self.at_sym(")"):
                formals = self.name_list()
            self.expect_sym(")")
        if len(set(formals)) != len(formals):
            raise ParseError(
                f"duplicate formal argument in routine '{tok.text}'",
                tok.line,
                tok.col,
            )
        modifies: Optional[tuple[str, ...]] = None
        if self.at_kw("modifies"):
            self.next()
            # "modifies" directly followed by "do" declares an empty clause
            modifies = () if self.at_kw("do") else self.name_list()
        self.expect_kw("do")
        body = self.body(("end",))
        self.expect_kw("end")
        return Routine(tok.text, formals, body, modifies, class_name)

    def name_list(self) -> tuple[str, ...]:
        names = [self.expect_name().text]
        while self.at_sym(","):
            self.next()
            names.append(self.expect_name().text)
        return tuple(names)

    def body(self, stop: tuple[str, ...]) -> Instruction:
        items: list[Instruction] = []
        self.skip_separators()
        while True:
            tok = self.peek()
            if tok.kind == "eof" or (tok.kind == "kw" and tok.text in stop):
                break
            items.append(self.instruction())
            self.skip_separators()
        if len(items) == 1:
            return items[0]
        return Seq(tuple(items))

    def instruction(self) -> Instruction:
        tok = self.peek()
        if tok.kind == "kw":
            if tok.text in ("create", "forget"):
                self.next()
                target = self.expect_name().text
                return Create(target) if tok.text == "create" else Forget(target)
            if tok.text in ("cut", "bind"):
                self.next()
                a = self.expr()
                self.expect_sym(",")
                b = self.expr()
                return Cut(a, b) if tok.text == "cut" else Bind(a, b)
            if tok.text == "then":
                self.next()
                then_body = self.body(("else", "end"))
                else_body: Instruction = SKIP
                if self.at_kw("else"):
                    self.next()
                    else_body = self.body(("end",))
                self.expect_kw("end")
                return Choice(then_body, else_body)
            if tok.text == "loop":
                self.next()
                inner = self.body(("end",))
                self.expect_kw("end")
                return Loop(inner)
            raise self.error(f"unexpected keyword '{tok.text}'")
        if tok.kind != "name":
            raise self.error(f"expected an instruction, found {tok.text!r}")
        path = self.path()
        if self.peek().kind == "assign":
            assign_tok = self.next()
            source = self.expr()
            if len(path) != 1:
                raise ParseError(
                    f"remote field assignment '{expr_str(path)} := ...' is not "
                    f"allowed; use a setter routine instead",
                    assign_tok.line,
                    assign_tok.col,
                )
            return Assign(path[0], source)
        if self.at_sym("("):
            self.next()
            actuals: list[Expr] = []
            if not self.at_sym(")"):
                actuals.append(self.expr())
                while self.at_sym(","):
                    self.next()
                    actuals.append(self.expr())
            self.expect_sym(")")
            if len(path) == 1:
                return Call(path[0], tuple(actuals))
            return QualifiedCall(path[:-1], path[-1], tuple(actuals))
        raise self.error(
            f"expected ':=' or '(' after '{expr_str(path)}'"
        )

    def path(self) -> Expr:
        tags = [self.expect_name().text]
        while self.at_sym("."):
            self.next()
            tags.append(self.expect_name().text)
        return tuple(tags)

    def expr(self) -> Expr:
        if self.at_kw("Current"):
            self.next()
            return CURRENT
        return self.path()


def parse_program(source: str) -> Program:
    """Parse and resolve mini-language source text."""
    program = _Parser(tokenize(source)).program()
    _resolve(program)
    return program


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------


def instruction_exprs(i: Instruction) -> Iterator[Expr]:
    """All expressions syntactically occurring in an instruction."""
    if isinstance(i, Assign):
        yield (i.target,)
        yield i.source
    elif isinstance(i, (Create, Forget)):
        yield (i.target,)
    elif isinstance(i, (Cut, Bind)):
        yield i.a
        yield i.b
    elif isinstance(i, Seq):
        for item in i.items:
            yield from instruction_exprs(item)
    elif isinstance(i, Choice):
        yield from instruction_exprs(i.then_body)
        yield from instruction_exprs(i.else_body)
    elif isinstance(i, Loop):
        yield from instruction_exprs(i.body)
    elif isinstance(i, Call):
        yield from i.actuals
    elif isinstance(i, QualifiedCall):
        yield i.target
        yield from i.actuals


def _calls_of(i: Instruction) -> Iterator[Union[Call, QualifiedCall]]:
    if isinstance(i, (Call, QualifiedCall)):
        yield i
    elif isinstance(i, Seq):
        for item in i.items:
            yield from _calls_of(item)
    elif isinstance(i, Choice):
        yield from _calls_of(i.then_body)
        yield from _calls_of(i.else_body)
    elif isinstance(i, Loop):
        yield from _calls_of(i.body)


def routine_locals(routine: Routine, attrs: frozenset[str]) -> frozenset[str]:
    """First-position tags in the body that are neither formals nor attributes:
    the routine's implicitly declared locals."""
    names: set[str] = set()
    for e in instruction_exprs(routine.body):
        if e and e[0] not in attrs and e[0] not in routine.formals:
            names.add(e[0])
    return frozenset(names)


def _resolve(program: Program) -> None:
    attrs = program.all_attributes()
    for routine in program.routines():
        clash = set(routine.formals) & attrs
        if clash:
            raise ResolutionError(
                f"formal argument name(s) {sorted(clash)} of "
                f"'{routine.qualified_name()}' collide with attribute names"
            )
        if routine.modifies is not None:
            owner = program.classes[routine.class_name]
            unknown = set(routine.modifies) - set(owner.attributes)
            if unknown:
                raise ResolutionError(
                    f"modifies clause of '{routine.qualified_name()}' lists "
                    f"non-attribute name(s) {sorted(unknown)}"
                )
        for call in _calls_of(routine.body):
            if isinstance(call, Call):
                callee = program.find_routine(call.routine, routine.class_name)
            else:
                callee = program.find_routine(call.routine)
            if len(call.actuals) != len(callee.formals):
                raise ResolutionError(
                    f"call to '{callee.qualified_name()}' from "
                    f"'{routine.qualified_name()}' passes {len(call.actuals)} "
                    f"argument(s), expected {len(callee.formals)}"
                )


# ---------------------------------------------------------------------------
# Program-wide constants and printing
# ---------------------------------------------------------------------------


def compute_M(program: Program) -> int:
    """Maximum tag count over all expressions occurring in the program
    (routine bodies and declared modifies clauses)."""
    m = 0
    for routine in program.routines():
        for e in instruction_exprs(routine.body):
            m = max(m, len(e))
        if routine.modifies:
            m = max(m, 1)
    return m


def _format_body(i: Instruction, indent: str) -> list[str]:
    if isinstance(i, Seq):
        out: list[str] = []
        for item in i.items:
            out.extend(_format_body(item, indent))
        return out
    if isinstance(i, Assign):
        return [f"{indent}{i.target} := {expr_str(i.source)}"]
    if isinstance(i, Create):
        return [f"{indent}create {i.target}"]
    if isinstance(i, Forget):
        return [f"{indent}forget {i.target}"]
    if isinstance(i, Cut):
        return [f"{indent}cut {expr_str(i.a)}, {expr_str(i.b)}"]
    if isinstance(i, Bind):
        return [f"{indent}bind {expr_str(i.a)}, {expr_str(i.b)}"]
    if isinstance(i, Choice):
        out = [f"{indent}then"]
        out.extend(_format_body(i.then_body, indent + "  "))
        out.append(f"{indent}else")
        out.extend(_format_body(i.else_body, indent + "  "))
        out.append(f"{indent}end")
        return out
    if isinstance(i, Loop):
        out = [f"{indent}loop"]
        out.extend(_format_body(i.body, indent + "  "))
        out.append(f"{indent}end")
        return out
    if isinstance(i, Call):
        args = ", ".join(expr_str(a) for a in i.actuals)
        return [f"{indent}{i.routine}({args})"]
    if isinstance(i, QualifiedCall):
        args = ", ".join(expr_str(a) for a in i.actuals)
        return [f"{indent}{expr_str(i.target)}.{i.routine}({args})"]
    raise TypeError(f"unknown instruction {i!r}")


def pretty_print(program: Program) -> str:
    lines: list[str] = []
    for cname in sorted(program.classes):
        cls = program.classes[cname]
        lines.append(f"class {cls.name}")
        if cls.attributes:
            lines.append(f"  attributes {', '.join(cls.attributes)}")
        for rname in sorted(cls.routines):
            r = cls.routines[rname]
            head = f"  routine {r.name}"
            if r.formals:
                head += f"({', '.join(r.formals)})"
            if r.modifies is not None:
                head += " modifies"
                if r.modifies:
                    head += f" {', '.join(r.modifies)}"
            lines.append(head)
            lines.append("  do")
            lines.extend(_format_body(r.body, "    "))
            lines.append("  end")
        lines.append("end")
    return "\n".join(lines) + "\n"
