"""Worklist fixpoint solver and result queries.

The solver attaches facts to CFG edges: each edge carries the transfer
output of the unit the facts flow out of, branch-sensitively for `if`
units. The worklist is FIFO, seeded with all nodes in ordinal order,
which makes runs deterministic and therefore replayable; a LIFO policy
is available to demonstrate that the least fixpoint does not depend on
processing order. Backward analyses run on the reversed CFG: a unit
reads its outgoing edges and writes its incoming ones.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .analyses import AnalysisDef
from .graphs import Cfg, CfgEdge
from .ir import Method, Unit
from .lattice import FactSet, TransferResult

DEFAULT_BUDGET = 1_000_000


class SolverError(Exception):
    pass


class NonTerminationError(SolverError):
    """Transfer budget exhausted: the analysis is non-monotone or ascends
    an infinite chain."""

    def __init__(self, method: str, budget: int):
        super().__init__(
            f"analysis did not reach a fixpoint on method {method} "
            f"within {budget} transfer applications"
        )
        self.method = method
        self.budget = budget


class AnalysisMisuseError(SolverError):
    pass


def transfer_result(analysis: AnalysisDef, unit: Unit, in_facts: FactSet) -> TransferResult:
    """Apply a transfer and derive gen/kill bookkeeping canonically.

    flow may return a plain fact set or a dict keyed by edge kind; the
    uniform `out` is the join over branches, which gen/kill are computed
    against.
    """
    lat = analysis.lattice
    raw = analysis.flow(unit, in_facts)
    if isinstance(raw, dict):
        by_kind = tuple(sorted(raw.items()))
        out = lat.join_all([facts for _, facts in by_kind])
    else:
        by_kind = None
        out = raw
    in_elems = lat.elements(in_facts)
    out_elems = lat.elements(out)
    return TransferResult(
        out=out,
        gen=tuple(sorted(out_elems - in_elems)),
        kill=tuple(sorted(in_elems - out_elems)),
        out_by_kind=by_kind,
    )


@dataclass(frozen=True)
class DirectionView:
    """The CFG as seen by the solver for a given analysis direction.

    read_edges(u) are joined into u's in-fact, write_edges(u) receive the
    transfer output, and boundary units additionally merge the entry
    fact. For forward analyses these are the natural in/out edges; for
    backward analyses they swap and boundaries are the method exits.
    """

    cfg: Cfg
    read_edges: dict[str, tuple[CfgEdge, ...]]
    write_edges: dict[str, tuple[CfgEdge, ...]]
    boundary: frozenset[str]
    next_units: dict[str, tuple[str, ...]]

    def edge_kind_for(self, edge: CfgEdge) -> str:
        return edge.kind


def direction_view(analysis: AnalysisDef, cfg: Cfg) -> DirectionView:
    if analysis.direction == "forward":
        read, write = cfg.in_edges, cfg.out_edges
        boundary = frozenset({cfg.entry})
        next_units = {n: tuple(e.dst for e in cfg.out_edges[n]) for n in cfg.nodes}
    elif analysis.direction == "backward":
        read, write = cfg.out_edges, cfg.in_edges
        boundary = cfg.exits
        next_units = {n: tuple(e.src for e in cfg.in_edges[n]) for n in cfg.nodes}
    else:
        raise AnalysisMisuseError(f"unknown direction: {analysis.direction}")
    return DirectionView(cfg, dict(read), dict(write), boundary, next_units)


def merge_inputs(
    analysis: AnalysisDef,
    view: DirectionView,
    unit_id: str,
    edge_facts: dict[CfgEdge, FactSet],
) -> tuple[list[FactSet], FactSet]:
    """Incoming facts for a unit and their join.

    The entry fact is prepended at boundary units. A single input passes
    through without calling join, so join bugs surface only where paths
    actually meet.
    """
    inputs: list[FactSet] = []
    if unit_id in view.boundary:
        inputs.append(analysis.entry_fact(view.cfg.method_ref))
    inputs.extend(edge_facts[e] for e in view.read_edges[unit_id])
    if not inputs:
        return inputs, analysis.lattice.bottom()
    acc = inputs[0]
    for facts in inputs[1:]:
        acc = analysis.lattice.join(acc, facts)
    return inputs, acc


def _write_value(analysis: AnalysisDef, result: TransferResult, edge: CfgEdge) -> FactSet:
    # Backward flows write a unit's incoming edges; branch kinds belong to
    # the edge's source, so branch sensitivity only applies forward.
    if analysis.direction == "forward":
        return result.out_for(edge.kind)
    return result.out


@dataclass
class EdgeResults:
    """Fixpoint facts per CFG edge, plus the joined in-fact per unit."""

    method: str
    analysis: str
    edge_facts: dict[CfgEdge, FactSet]
    in_facts: dict[str, FactSet]
    iterations: int

    def fact(self, edge: CfgEdge) -> FactSet:
        return self.edge_facts[edge]


def solve(
    analysis: AnalysisDef,
    cfg: Cfg,
    budget: int = DEFAULT_BUDGET,
    policy: str = "fifo",
) -> EdgeResults:
    """Run the worklist solver to the least fixpoint.

    Raises NonTerminationError when the transfer budget is exhausted.
    """
    view = direction_view(analysis, cfg)
    lat = analysis.lattice
    edge_facts: dict[CfgEdge, FactSet] = {e: lat.bottom() for e in cfg.edges}

    worklist = deque(cfg.nodes)
    queued = set(cfg.nodes)
    iterations = 0
    while worklist:
        unit_id = worklist.popleft() if policy == "fifo" else worklist.pop()
        queued.discard(unit_id)
        unit = cfg.units[unit_id]
        _, in_fact = merge_inputs(analysis, view, unit_id, edge_facts)
        iterations += 1
        if iterations > budget:
            raise NonTerminationError(cfg.method, budget)
        result = transfer_result(analysis, unit, in_fact)
        for edge in view.write_edges[unit_id]:
            new = _write_value(analysis, result, edge)
            if not lat.equals(edge_facts[edge], new):
                edge_facts[edge] = new
                nxt = edge.dst if analysis.direction == "forward" else edge.src
                if nxt not in queued:
                    worklist.append(nxt)
                    queued.add(nxt)

    in_facts = {
        uid: merge_inputs(analysis, view, uid, edge_facts)[1]
        for uid in cfg.nodes
    }
    return EdgeResults(
        method=cfg.method,
        analysis=analysis.name,
        edge_facts=edge_facts,
        in_facts=in_facts,
        iterations=iterations,
    )


def solve_program(
    analysis: AnalysisDef,
    program,
    cfgs: dict[str, Cfg],
    budget: int = DEFAULT_BUDGET,
) -> dict[str, EdgeResults]:
    """Solve every method independently, in program order."""
    return {
        m.name: solve(analysis, cfgs[m.name], budget=budget)
        for m in program.methods
    }


def report_leaks(
    results: EdgeResults, analysis: AnalysisDef, cfg: Cfg
) -> list[tuple[str, str]]:
    """Sink calls receiving a tainted argument, ordered by unit.

    A leak is reported iff some argument of a sink call is in the joined
    in-fact of the sink unit.
    """
    if analysis.taint is None:
        raise AnalysisMisuseError(
            f"leak reporting needs a taint analysis, got {analysis.name}"
        )
    leaks: list[tuple[str, str]] = []
    for unit_id in cfg.nodes:
        unit = cfg.units[unit_id]
        if unit.callee not in analysis.taint.sinks:
            continue
        in_fact = results.in_facts[unit_id]
        for arg in unit.call_args:
            if arg in in_fact and (unit_id, arg) not in leaks:
                leaks.append((unit_id, arg))
    return leaks


@dataclass(frozen=True)
class MonotoneViolation:
    kind: str  # "flow-monotone" | "join-upper-bound"
    unit: str | None
    a: str
    b: str
    detail: str


@dataclass
class MonotoneReport:
    checked: int = 0
    violations: list[MonotoneViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_monotone(
    analysis: AnalysisDef,
    samples: list[tuple[Unit, FactSet, FactSet]],
) -> MonotoneReport:
    """Audit transfer monotonicity and join consistency on sample pairs.

    For each (unit, a, b): the join upper-bound laws a <= a|b and
    b <= a|b are verified, and when a <= b holds, so must
    flow(unit, a) <= flow(unit, b). Violations are report entries with
    witnesses, not failures, so a broken analysis can still be examined.
    """
    lat = analysis.lattice
    report = MonotoneReport()
    for unit, a, b in samples:
        report.checked += 1
        joined = lat.join(a, b)
        for name, side in (("a", a), ("b", b)):
            if not lat.leq(side, joined):
                report.violations.append(
                    MonotoneViolation(
                        kind="join-upper-bound",
                        unit=unit.id if unit is not None else None,
                        a=lat.render(a),
                        b=lat.render(b),
                        detail=(
                            f"{name}={lat.render(side)} is not <= "
                            f"join={lat.render(joined)}"
                        ),
                    )
                )
        if unit is None or not lat.leq(a, b):
            continue
        out_a = transfer_result(analysis, unit, a).out
        out_b = transfer_result(analysis, unit, b).out
        if not lat.leq(out_a, out_b):
            report.violations.append(
                MonotoneViolation(
                    kind="flow-monotone",
                    unit=unit.id,
                    a=lat.render(a),
                    b=lat.render(b),
                    detail=(
                        f"flow({unit.id}, {lat.render(a)})={lat.render(out_a)} "
                        f"is not <= flow({unit.id}, {lat.render(b)})={lat.render(out_b)}"
                    ),
                )
            )
    return report


def generate_monotone_samples(
    analysis: AnalysisDef,
    method: Method,
    count: int,
    rng,
) -> list[tuple[Unit, FactSet, FactSet]]:
    """Draw (unit, a, b) samples with a <= b under the correct ordering."""
    from .analyses import fact_sampler, raise_fact

    sampler = fact_sampler(analysis, method)
    samples = []
    units = method.units
    for i in range(count):
        unit = units[i % len(units)]
        a = sampler(rng)
        b = raise_fact(analysis, a, sampler(rng))
        samples.append((unit, a, b))
    return samples
