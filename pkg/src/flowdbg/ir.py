"""Three-address IR: programs, methods, units, and per-unit queries.

A Program is an ordered list of Methods; a Method is an ordered list of
Units (statements). Everything is immutable after construction, so IR
objects can be shared freely between sessions and threads.

Unit ids are "methodName#ordinal" with 0-based ordinals, stable for the
lifetime of a session and used verbatim in the wire protocol and the UI.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property


UNIT_KINDS = ("assign", "identity", "if", "goto", "invoke", "return", "nop")

BINOPS = ("+", "-", "*", "<", "==")

# Edge kinds, in successor emission order.
FALLTHROUGH = "fallthrough"
BRANCH_TRUE = "branch-true"
BRANCH_FALSE = "branch-false"


class IrError(Exception):
    """Base class for IR construction and lookup failures."""


class UnitNotFoundError(IrError):
    def __init__(self, unit_id: str):
        super().__init__(f"no such unit: {unit_id}")
        self.unit_id = unit_id


class MethodNotFoundError(IrError):
    def __init__(self, name: str):
        super().__init__(f"no such method: {name}")
        self.name = name


@dataclass(frozen=True)
class CallExpr:
    callee: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.callee}({', '.join(self.args)})"


@dataclass(frozen=True)
class BinExpr:
    op: str
    left: str
    right: str | int

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


# Right-hand side of an assignment: a call, a binary expression, a plain
# variable copy (str), or an integer literal.
Rvalue = CallExpr | BinExpr | str | int


@dataclass(frozen=True)
class Unit:
    """One IR statement.

    kind determines which payload fields are set:
      assign    lhs + rhs (call, binop, or literal)
      identity  lhs + rhs (plain variable copy; the value passes through)
      if        cond + target/target_label
      goto      target/target_label
      invoke    call (void call)
      return    retvar (optional)
      nop       nothing
    """

    id: str
    ordinal: int
    kind: str
    source_line: int
    label: str | None = None
    defs: frozenset[str] = frozenset()
    uses: frozenset[str] = frozenset()
    lhs: str | None = None
    rhs: Rvalue | None = None
    call: CallExpr | None = None
    cond: str | None = None
    target: int | None = None
    target_label: str | None = None
    retvar: str | None = None

    @property
    def callee(self) -> str | None:
        """Name of the called method/primitive, if this unit calls one."""
        if self.kind == "invoke":
            return self.call.callee if self.call else None
        if isinstance(self.rhs, CallExpr):
            return self.rhs.callee
        return None

    @property
    def call_args(self) -> tuple[str, ...]:
        if self.kind == "invoke" and self.call:
            return self.call.args
        if isinstance(self.rhs, CallExpr):
            return self.rhs.args
        return ()

    @property
    def text(self) -> str:
        """Statement rendering without the label prefix."""
        if self.kind in ("assign", "identity"):
            return f"{self.lhs} = {self.rhs}"
        if self.kind == "if":
            return f"if {self.cond} goto {self.target_label}"
        if self.kind == "goto":
            return f"goto {self.target_label}"
        if self.kind == "invoke":
            return str(self.call)
        if self.kind == "return":
            return f"return {self.retvar}" if self.retvar else "return"
        return "nop"

    def __str__(self) -> str:
        if self.label:
            return f"{self.label}: {self.text}"
        return self.text


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[str, ...]
    units: tuple[Unit, ...]
    locals: frozenset[str]
    source_line: int = 1

    @cached_property
    def unit_by_id(self) -> dict[str, Unit]:
        return {u.id: u for u in self.units}

    def unit(self, ordinal: int) -> Unit:
        return self.units[ordinal]


def unit_successors(method: Method, unit: Unit) -> list[tuple[int, str]]:
    """Successor (ordinal, edge kind) pairs implied by a unit's kind.

    A unit that can fall off the end of the method simply has no
    fallthrough successor; such units are method exits.
    """
    succs: list[tuple[int, str]] = []
    has_next = unit.ordinal + 1 < len(method.units)
    if unit.kind in ("assign", "identity", "invoke", "nop"):
        if has_next:
            succs.append((unit.ordinal + 1, FALLTHROUGH))
    elif unit.kind == "goto":
        succs.append((unit.target, FALLTHROUGH))
    elif unit.kind == "if":
        succs.append((unit.target, BRANCH_TRUE))
        if has_next:
            succs.append((unit.ordinal + 1, BRANCH_FALSE))
    # return: no successors
    return succs


@dataclass(frozen=True)
class Program:
    methods: tuple[Method, ...]
    entry: str

    @cached_property
    def method_by_name(self) -> dict[str, Method]:
        return {m.name: m for m in self.methods}

    @cached_property
    def line_table(self) -> dict[int, Unit]:
        """Source line -> unit. The grammar puts one statement per line."""
        return {u.source_line: u for m in self.methods for u in m.units}

    def method(self, name: str) -> Method:
        try:
            return self.method_by_name[name]
        except KeyError:
            raise MethodNotFoundError(name) from None

    def unit(self, unit_id: str) -> Unit:
        name, _, _ = unit_id.partition("#")
        method = self.method_by_name.get(name)
        if method is None:
            raise UnitNotFoundError(unit_id)
        unit = method.unit_by_id.get(unit_id)
        if unit is None:
            raise UnitNotFoundError(unit_id)
        return unit

    def unit_at_line(self, line: int) -> Unit | None:
        return self.line_table.get(line)

    @property
    def all_units(self) -> list[Unit]:
        return [u for m in self.methods for u in m.units]


@dataclass(frozen=True)
class UnitInfo:
    """Stable, renderable description of one statement for inspection views."""

    id: str
    kind: str
    text: str
    source_line: int
    defs: tuple[str, ...]
    uses: tuple[str, ...]
    callee: str | None
    operands: tuple[str, ...]
    successors: tuple[tuple[str, str], ...]  # (edge kind, dst unit id)

    def describe(self) -> str:
        lines = [
            f"{self.id} (line {self.source_line}): {self.text}",
            f"  kind: {self.kind}",
            f"  defs: {{{','.join(self.defs)}}}",
            f"  uses: {{{','.join(self.uses)}}}",
        ]
        if self.callee is not None:
            lines.append(f"  callee: {self.callee}")
        for op in self.operands:
            lines.append(f"  operand: {op}")
        for kind, dst in self.successors:
            lines.append(f"  succ: {dst} [{kind}]")
        return "\n".join(lines)


def _operand_descriptions(unit: Unit) -> tuple[str, ...]:
    ops: list[str] = []
    if unit.kind in ("assign", "identity"):
        ops.append(f"lhs {unit.lhs}")
        rhs = unit.rhs
        if isinstance(rhs, CallExpr):
            ops.append(f"call {rhs.callee}/{len(rhs.args)}")
            ops.extend(f"arg {a}" for a in rhs.args)
        elif isinstance(rhs, BinExpr):
            ops.append(f"op {rhs.op}")
            ops.append(f"left {rhs.left}")
            ops.append(f"right {rhs.right}")
        elif isinstance(rhs, str):
            ops.append(f"copy-of {rhs}")
        else:
            ops.append(f"const {rhs}")
    elif unit.kind == "if":
        ops.append(f"cond {unit.cond}")
        ops.append(f"target {unit.target_label}")
    elif unit.kind == "goto":
        ops.append(f"target {unit.target_label}")
    elif unit.kind == "invoke":
        call = unit.call
        ops.append(f"call {call.callee}/{len(call.args)}")
        ops.extend(f"arg {a}" for a in call.args)
    elif unit.kind == "return" and unit.retvar:
        ops.append(f"value {unit.retvar}")
    return tuple(ops)


def unit_info(program: Program, unit_id: str) -> UnitInfo:
    """Pure query describing a unit; raises UnitNotFoundError for bad ids."""
    unit = program.unit(unit_id)
    method = program.method(unit_id.partition("#")[0])
    succs = tuple(
        (kind, method.units[ordinal].id)
        for ordinal, kind in unit_successors(method, unit)
    )
    return UnitInfo(
        id=unit.id,
        kind=unit.kind,
        text=unit.text,
        source_line=unit.source_line,
        defs=tuple(sorted(unit.defs)),
        uses=tuple(sorted(unit.uses)),
        callee=unit.callee,
        operands=_operand_descriptions(unit),
        successors=succs,
    )
