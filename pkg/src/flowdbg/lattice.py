"""Lattices and fact sets for the monotone framework.

A lattice supplies bottom/join/leq/equals plus a canonical rendering of
fact sets: elements sorted lexicographically, comma-separated, wrapped
in braces. Value-equal fact sets always render to identical text; the
canonical element texts are also what gen/kill bookkeeping and event
predicates match against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

FactSet = Any  # analysis-specific payload; see concrete lattices below

# Flat-value top for the per-variable constants lattice; bottom is absence.
TOP = "top"


class Lattice:
    """Behavioral contract: join must be commutative, associative, and
    idempotent; leq must be the partial order induced by join."""

    def bottom(self) -> FactSet:
        raise NotImplementedError

    def join(self, a: FactSet, b: FactSet) -> FactSet:
        raise NotImplementedError

    def leq(self, a: FactSet, b: FactSet) -> bool:
        raise NotImplementedError

    def equals(self, a: FactSet, b: FactSet) -> bool:
        return self.leq(a, b) and self.leq(b, a)

    def elements(self, facts: FactSet) -> frozenset[str]:
        """Canonical element texts of a fact set."""
        raise NotImplementedError

    def render(self, facts: FactSet) -> str:
        return "{" + ",".join(sorted(self.elements(facts))) + "}"

    def join_all(self, parts: list[FactSet]) -> FactSet:
        if not parts:
            return self.bottom()
        acc = parts[0]
        for p in parts[1:]:
            acc = self.join(acc, p)
        return acc


class PowersetLattice(Lattice):
    """Finite powerset ordered by inclusion; facts are frozensets."""

    def __init__(self, element_text: Callable[[Any], str] = str):
        self.element_text = element_text

    def bottom(self) -> frozenset:
        return frozenset()

    def join(self, a: frozenset, b: frozenset) -> frozenset:
        return a | b

    def leq(self, a: frozenset, b: frozenset) -> bool:
        return a <= b

    def equals(self, a: frozenset, b: frozenset) -> bool:
        return a == b

    def elements(self, facts: frozenset) -> frozenset[str]:
        return frozenset(self.element_text(x) for x in facts)


@dataclass(frozen=True)
class ConstEnv:
    """Immutable variable -> constant environment.

    A missing variable is bottom (no value on any path); TOP marks
    conflicting values. entries stays sorted by variable name so equal
    environments are structurally equal.
    """

    entries: tuple[tuple[str, int | str], ...] = ()

    def get(self, var: str):
        for name, value in self.entries:
            if name == var:
                return value
        return None

    def set(self, var: str, value: int | str | None) -> "ConstEnv":
        items = {name: val for name, val in self.entries}
        if value is None:
            items.pop(var, None)
        else:
            items[var] = value
        return ConstEnv(tuple(sorted(items.items())))

    def items(self):
        return self.entries


class FlatEnvLattice(Lattice):
    """Pointwise lift of the flat lattice bottom < c < TOP over ConstEnv."""

    def bottom(self) -> ConstEnv:
        return ConstEnv()

    def join(self, a: ConstEnv, b: ConstEnv) -> ConstEnv:
        merged = {name: val for name, val in a.entries}
        for name, val in b.entries:
            if name not in merged:
                merged[name] = val
            elif merged[name] != val:
                merged[name] = TOP
        return ConstEnv(tuple(sorted(merged.items())))

    def leq(self, a: ConstEnv, b: ConstEnv) -> bool:
        for name, val in a.entries:
            other = b.get(name)
            if other is None:
                return False
            if other != val and other != TOP:
                return False
        return True

    def equals(self, a: ConstEnv, b: ConstEnv) -> bool:
        return a.entries == b.entries

    def elements(self, facts: ConstEnv) -> frozenset[str]:
        return frozenset(f"{name}={val}" for name, val in facts.entries)


@dataclass(frozen=True)
class TransferResult:
    """Outcome of one transfer application.

    gen/kill are canonical element texts: exactly the set differences
    between out and in, so out == (in - kill) | gen always holds under
    the canonical rendering. out_by_kind carries branch-sensitive outputs
    keyed by outgoing edge kind; when absent, out flows along every
    outgoing edge.
    """

    out: FactSet
    gen: tuple[str, ...]
    kill: tuple[str, ...]
    out_by_kind: tuple[tuple[str, FactSet], ...] | None = None

    def out_for(self, edge_kind: str) -> FactSet:
        if self.out_by_kind is None:
            return self.out
        for kind, facts in self.out_by_kind:
            if kind == edge_kind:
                return facts
        return self.out
