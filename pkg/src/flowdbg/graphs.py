"""Control-flow and call graphs over the IR.

Graph construction is deterministic: nodes follow unit ordinal order and
edges are ordered by (source ordinal, edge kind). Unreachable units stay
in the CFG and are flagged, so a debugger can show what an analysis
never visits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .ir import (
    BRANCH_FALSE,
    BRANCH_TRUE,
    FALLTHROUGH,
    IrError,
    Method,
    Program,
    Unit,
    unit_successors,
)

_KIND_ORDER = {FALLTHROUGH: 0, BRANCH_TRUE: 1, BRANCH_FALSE: 2}


class EdgeNotFoundError(IrError):
    def __init__(self, edge_id: str):
        super().__init__(f"no such edge: {edge_id}")
        self.edge_id = edge_id


@dataclass(frozen=True)
class CfgEdge:
    src: str
    dst: str
    kind: str


@dataclass(frozen=True)
class Cfg:
    method: str
    nodes: tuple[str, ...]
    edges: tuple[CfgEdge, ...]
    entry: str
    exits: frozenset[str]
    unreachable: frozenset[str]
    method_ref: Method

    @property
    def units(self) -> dict[str, Unit]:
        return self.method_ref.unit_by_id

    @cached_property
    def out_edges(self) -> dict[str, tuple[CfgEdge, ...]]:
        out: dict[str, list[CfgEdge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.src].append(e)
        return {n: tuple(es) for n, es in out.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[CfgEdge, ...]]:
        inc: dict[str, list[CfgEdge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            inc[e.dst].append(e)
        return {n: tuple(es) for n, es in inc.items()}

    @cached_property
    def edge_ids(self) -> dict[CfgEdge, str]:
        """Stable edge ids: "src->dst", with ":kind" only for parallel edges."""
        pairs: dict[tuple[str, str], int] = {}
        for e in self.edges:
            pairs[(e.src, e.dst)] = pairs.get((e.src, e.dst), 0) + 1
        ids = {}
        for e in self.edges:
            base = f"{e.src}->{e.dst}"
            ids[e] = base if pairs[(e.src, e.dst)] == 1 else f"{base}:{e.kind}"
        return ids

    @cached_property
    def edge_by_id(self) -> dict[str, CfgEdge]:
        return {eid: e for e, eid in self.edge_ids.items()}

    def edge(self, edge_id: str) -> CfgEdge:
        try:
            return self.edge_by_id[edge_id]
        except KeyError:
            raise EdgeNotFoundError(edge_id) from None


@dataclass(frozen=True)
class CallEdge:
    caller_unit: str  # unit id of the call site
    caller: str  # caller method name
    callee: str


@dataclass(frozen=True)
class CallGraph:
    nodes: tuple[str, ...]  # method names, in program order
    edges: tuple[CallEdge, ...]  # internal calls only
    externals: tuple[str, ...]  # primitive/unresolved callees, sorted

    @cached_property
    def edge_ids(self) -> dict[CallEdge, str]:
        return {e: f"{e.caller_unit}->{e.callee}" for e in self.edges}

    @cached_property
    def edge_by_id(self) -> dict[str, CallEdge]:
        return {eid: e for e, eid in self.edge_ids.items()}


def build_cfg(method: Method) -> Cfg:
    """Build the CFG for one method.

    Straight-line code becomes a path graph; `if` units get exactly one
    branch-true and one branch-false edge (unless they sit last in the
    method, where the false branch falls off the end); `return` units and
    fall-off-the-end units are exits.
    """
    nodes = tuple(u.id for u in method.units)
    edges: list[CfgEdge] = []
    exits: set[str] = set()
    for unit in method.units:
        succs = unit_successors(method, unit)
        for ordinal, kind in succs:
            edges.append(CfgEdge(unit.id, method.units[ordinal].id, kind))
        last = unit.ordinal + 1 >= len(method.units)
        if unit.kind == "return" or (last and unit.kind != "goto"):
            # return, fall off the end, or a trailing if whose false branch
            # leaves the method
            exits.add(unit.id)

    edges.sort(key=lambda e: (method.unit_by_id[e.src].ordinal, _KIND_ORDER[e.kind]))

    # Reachability from the entry unit; unreachable nodes are kept, flagged.
    entry = method.units[0].id
    succ_map: dict[str, list[str]] = {n: [] for n in nodes}
    for e in edges:
        succ_map[e.src].append(e.dst)
    seen = {entry}
    stack = [entry]
    while stack:
        for dst in succ_map[stack.pop()]:
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)

    return Cfg(
        method=method.name,
        nodes=nodes,
        edges=tuple(edges),
        entry=entry,
        exits=frozenset(exits),
        unreachable=frozenset(n for n in nodes if n not in seen),
        method_ref=method,
    )


def build_cfgs(program: Program) -> dict[str, Cfg]:
    return {m.name: build_cfg(m) for m in program.methods}


def build_call_graph(program: Program) -> CallGraph:
    """One edge per call unit; callees not defined in the program become
    external entries."""
    defined = {m.name for m in program.methods}
    edges: list[CallEdge] = []
    externals: set[str] = set()
    for method in program.methods:
        for unit in method.units:
            callee = unit.callee
            if callee is None:
                continue
            if callee in defined:
                edges.append(CallEdge(unit.id, method.name, callee))
            else:
                externals.add(callee)
    return CallGraph(
        nodes=tuple(m.name for m in program.methods),
        edges=tuple(edges),
        externals=tuple(sorted(externals)),
    )
