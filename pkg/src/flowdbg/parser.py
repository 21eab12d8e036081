"""Parser and renderer for the textual IR format.

Grammar (one file = one program):

    program   := methodDecl+
    methodDecl:= "method" NAME "(" paramList? ")" "{" stmt* "}"
    stmt      := (LABEL ":")? core NEWLINE
    core      := NAME "=" rhs            # assign
               | "if" NAME "goto" LABEL
               | "goto" LABEL
               | NAME "(" argList? ")"   # invoke (void)
               | "return" NAME?
               | "nop"
    rhs       := NAME "(" argList? ")"   # call with result
               | NAME | INT | NAME BINOP NAME | NAME BINOP INT
    BINOP     := "+" | "-" | "*" | "<" | "=="

"#" starts a comment running to end of line. Identifiers are
[a-zA-Z_][a-zA-Z0-9_]*. Statements are newline-terminated, so every
statement sits on its own source line; that line number is recorded on
the unit and is what line breakpoints address.

Plain variable copies (``x = y``) are classified as identity units: the
value passes through unchanged. An empty method body is normalized to a
single nop so every method has an entry unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ir import (
    BINOPS,
    BinExpr,
    CallExpr,
    Method,
    Program,
    Unit,
)

KEYWORDS = ("method", "if", "goto", "return", "nop")

_TOKEN_RE = re.compile(
    r"""
      (?P<comment>\#[^\n]*)
    | (?P<newline>\n)
    | (?P<ws>[ \t\r]+)
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<int>[0-9]+)
    | (?P<op>==|[+\-*<{}()=:,])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    """Syntax or consistency error, with 1-based line/column position."""

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected


@dataclass(frozen=True)
class Token:
    type: str  # name | int | op | newline | eof
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "newline":
            tokens.append(Token("newline", "\n", line, col))
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(value)
        else:
            tok_kind = "name" if kind == "name" else "int" if kind == "int" else "op"
            if tok_kind == "name" and value in KEYWORDS:
                tok_kind = "keyword"
            tokens.append(Token(tok_kind, value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class _RawStmt:
    label: str | None
    kind: str
    line: int
    lhs: str | None = None
    rhs: object = None
    call: CallExpr | None = None
    cond: str | None = None
    target_label: str | None = None
    retvar: str | None = None


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.cur
        if tok.type != "eof":
            self.pos += 1
        return tok

    def _skip_newlines(self):
        while self.cur.type == "newline":
            self._advance()

    def _peek(self, offset: int = 1) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def _fail(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.cur
        found = "end of input" if tok.type == "eof" else repr(tok.value)
        want = ", ".join(expected)
        return ParseError(f"expected {want}, found {found}", tok.line, tok.col, expected)

    def _expect(self, type_: str, value: str | None = None, what: str | None = None) -> Token:
        tok = self.cur
        if tok.type != type_ or (value is not None and tok.value != value):
            raise self._fail((what or value or type_,))
        return self._advance()

    def _expect_name(self, what: str = "identifier") -> Token:
        if self.cur.type != "name":
            raise self._fail((what,))
        return self._advance()

    def parse_program(self, entry: str | None) -> Program:
        methods: list[Method] = []
        seen: dict[str, int] = {}
        self._skip_newlines()
        if self.cur.type == "eof":
            raise self._fail(("method",))
        while self.cur.type != "eof":
            method = self._parse_method()
            if method.name in seen:
                raise ParseError(
                    f"duplicate method {method.name} (first declared on line "
                    f"{seen[method.name]})",
                    method.source_line,
                    1,
                )
            seen[method.name] = method.source_line
            methods.append(method)
            self._skip_newlines()
        if entry is None:
            entry = "main" if "main" in seen else methods[0].name
        elif entry not in seen:
            raise ParseError(f"entry method {entry} not defined", 1, 1)
        return Program(methods=tuple(methods), entry=entry)

    def _parse_method(self) -> Method:
        header = self._expect("keyword", "method")
        name_tok = self._expect_name("method name")
        self._expect("op", "(")
        params: list[str] = []
        if self.cur.type == "name":
            params.append(self._advance().value)
            while self.cur.type == "op" and self.cur.value == ",":
                self._advance()
                params.append(self._expect_name("parameter name").value)
        self._expect("op", ")")
        self._expect("op", "{")

        raw: list[_RawStmt] = []
        labels: dict[str, tuple[int, int]] = {}  # label -> (stmt index, line)
        while True:
            self._skip_newlines()
            if self.cur.type == "op" and self.cur.value == "}":
                self._advance()
                break
            if self.cur.type == "eof":
                raise self._fail(("}", "statement"))
            stmt = self._parse_stmt()
            if stmt.label is not None:
                if stmt.label in labels:
                    raise ParseError(
                        f"duplicate label {stmt.label} on line {stmt.line} "
                        f"(first defined on line {labels[stmt.label][1]})",
                        stmt.line,
                        1,
                    )
                labels[stmt.label] = (len(raw), stmt.line)
            raw.append(stmt)

        if not raw:
            # An empty body still needs an entry unit.
            raw.append(_RawStmt(label=None, kind="nop", line=header.line))

        units = []
        for ordinal, stmt in enumerate(raw):
            units.append(self._build_unit(name_tok.value, ordinal, stmt, labels))
        local_vars = frozenset(
            v for u in units for v in (u.defs | u.uses)
        ) - frozenset(params)
        return Method(
            name=name_tok.value,
            params=tuple(params),
            units=tuple(units),
            locals=local_vars,
            source_line=header.line,
        )

    def _parse_stmt(self) -> _RawStmt:
        label = None
        if (
            self.cur.type == "name"
            and self._peek().type == "op"
            and self._peek().value == ":"
        ):
            label = self._advance().value
            self._advance()  # ':'
        tok = self.cur
        if tok.type == "keyword" and tok.value == "if":
            self._advance()
            cond = self._expect_name("condition variable").value
            self._expect("keyword", "goto")
            target = self._expect_name("branch target label").value
            stmt = _RawStmt(label, "if", tok.line, cond=cond, target_label=target)
        elif tok.type == "keyword" and tok.value == "goto":
            self._advance()
            target = self._expect_name("branch target label").value
            stmt = _RawStmt(label, "goto", tok.line, target_label=target)
        elif tok.type == "keyword" and tok.value == "return":
            self._advance()
            retvar = None
            if self.cur.type == "name":
                retvar = self._advance().value
            stmt = _RawStmt(label, "return", tok.line, retvar=retvar)
        elif tok.type == "keyword" and tok.value == "nop":
            self._advance()
            stmt = _RawStmt(label, "nop", tok.line)
        elif tok.type == "name":
            name = self._advance().value
            if self.cur.type == "op" and self.cur.value == "=":
                self._advance()
                rhs = self._parse_rhs()
                kind = "identity" if isinstance(rhs, str) else "assign"
                stmt = _RawStmt(label, kind, tok.line, lhs=name, rhs=rhs)
            elif self.cur.type == "op" and self.cur.value == "(":
                args = self._parse_args()
                stmt = _RawStmt(label, "invoke", tok.line, call=CallExpr(name, args))
            else:
                raise self._fail(("=", "("))
        else:
            raise self._fail(("statement",))
        if self.cur.type not in ("newline", "eof") and not (
            self.cur.type == "op" and self.cur.value == "}"
        ):
            raise self._fail(("newline",))
        return stmt

    def _parse_args(self) -> tuple[str, ...]:
        self._expect("op", "(")
        args: list[str] = []
        if self.cur.type == "name":
            args.append(self._advance().value)
            while self.cur.type == "op" and self.cur.value == ",":
                self._advance()
                args.append(self._expect_name("argument name").value)
        self._expect("op", ")")
        return tuple(args)

    def _parse_rhs(self):
        tok = self.cur
        if tok.type == "int":
            self._advance()
            return int(tok.value)
        if tok.type != "name":
            raise self._fail(("variable", "integer", "call"))
        name = self._advance().value
        if self.cur.type == "op" and self.cur.value == "(":
            return CallExpr(name, self._parse_args())
        if self.cur.type == "op" and self.cur.value in BINOPS:
            op = self._advance().value
            right_tok = self.cur
            if right_tok.type == "int":
                self._advance()
                return BinExpr(op, name, int(right_tok.value))
            if right_tok.type == "name":
                self._advance()
                return BinExpr(op, name, right_tok.value)
            raise self._fail(("variable", "integer"))
        return name

    def _build_unit(
        self,
        method_name: str,
        ordinal: int,
        stmt: _RawStmt,
        labels: dict[str, tuple[int, int]],
    ) -> Unit:
        target = None
        if stmt.target_label is not None:
            if stmt.target_label not in labels:
                raise ParseError(
                    f"unknown branch target {stmt.target_label}", stmt.line, 1
                )
            target = labels[stmt.target_label][0]

        defs: frozenset[str] = frozenset()
        uses: frozenset[str] = frozenset()
        if stmt.kind in ("assign", "identity"):
            defs = frozenset({stmt.lhs})
            rhs = stmt.rhs
            if isinstance(rhs, CallExpr):
                uses = frozenset(rhs.args)
            elif isinstance(rhs, BinExpr):
                used = {rhs.left}
                if isinstance(rhs.right, str):
                    used.add(rhs.right)
                uses = frozenset(used)
            elif isinstance(rhs, str):
                uses = frozenset({rhs})
        elif stmt.kind == "if":
            uses = frozenset({stmt.cond})
        elif stmt.kind == "invoke":
            uses = frozenset(stmt.call.args)
        elif stmt.kind == "return" and stmt.retvar:
            uses = frozenset({stmt.retvar})

        return Unit(
            id=f"{method_name}#{ordinal}",
            ordinal=ordinal,
            kind=stmt.kind,
            source_line=stmt.line,
            label=stmt.label,
            defs=defs,
            uses=uses,
            lhs=stmt.lhs,
            rhs=stmt.rhs,
            call=stmt.call,
            cond=stmt.cond,
            target=target,
            target_label=stmt.target_label,
            retvar=stmt.retvar,
        )


def parse_program(text: str, entry: str | None = None) -> Program:
    """Parse IR source text into a Program.

    entry defaults to the method named "main", or the first method when
    no "main" exists. Raises ParseError with line/column positions for
    syntax errors, duplicate labels/methods, and unknown branch targets.
    """
    return _Parser(text).parse_program(entry)


def render_program(program: Program) -> str:
    """Render a Program back to parseable source, one statement per line."""
    out: list[str] = []
    for method in program.methods:
        out.append(f"method {method.name}({', '.join(method.params)}) {{")
        for unit in method.units:
            out.append(f"  {unit}")
        out.append("}")
    return "\n".join(out) + "\n"
