"""Instrumented, steppable, recordable solver execution.

The worklist run is a generator of events: pop, merge, transfer,
edge_update, fixpoint, budget_exceeded. A DebugSession drives that
generator and records every event in an append-only log, which makes the
whole execution inspectable and rewindable.

Suspension model: the session always stops *between* computing a
transfer and applying it. The pending transfer event is fully computed
(its in/out/gen/kill are visible and breakpoint predicates match against
them) but it is not yet in the log and no edge has been updated, so
every query answers from the committed prefix alone. Event seq numbers
are gapless from 0; a suspension "at seq k" means exactly k events have
been committed.

Rewind is deterministic re-execution from the start, never a snapshot
restore. The old log is retained read-only and every regenerated event
is checked against it byte-for-byte; a mismatch means the solver or an
analysis is nondeterministic and raises DeterminismError.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterator

from .analyses import AnalysisDef, TaintConfig
from .graphs import Cfg, EdgeNotFoundError, build_cfgs
from .ir import Program, UnitNotFoundError
from .lattice import FactSet, TransferResult
from .parser import render_program
from .registry import get_analysis
from .solver import (
    DEFAULT_BUDGET,
    DirectionView,
    direction_view,
    merge_inputs,
    transfer_result,
    _write_value,
)

GRANULARITIES = ("transfer", "unit", "iteration", "method", "to-fixpoint")

EVENT_BP_KINDS = ("fact-generated", "fact-killed", "edge-changed", "unit-kind")

IDLE = "idle"
RUNNING = "running"
SUSPENDED = "suspended"
FINISHED = "finished"


class DebugError(Exception):
    pass


class SessionFinishedError(DebugError):
    def __init__(self):
        super().__init__("session is finished; rewind to continue exploring")


class SeqRangeError(DebugError):
    def __init__(self, seq: int, last: int):
        super().__init__(f"seq {seq} out of range 0..{last}")
        self.seq = seq
        self.last = last


class IterationRangeError(DebugError):
    def __init__(self, at: int, current: int):
        super().__init__(f"iteration {at} out of range 0..{current}")


class BreakpointResolutionError(DebugError):
    def __init__(self, line: int, nearest: tuple[int | None, int | None]):
        hints = [str(n) for n in nearest if n is not None]
        msg = f"no statement on line {line}"
        if hints:
            msg += f"; nearest statement lines: {', '.join(hints)}"
        super().__init__(msg)
        self.line = line
        self.nearest = nearest


class BadBreakpointError(DebugError):
    pass


class DeterminismError(DebugError):
    pass


class SessionMisuseError(DebugError):
    pass


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DebugEvent:
    seq: int
    iteration: int


@dataclass(frozen=True)
class PopEvent(DebugEvent):
    unit: str

    kind = "pop"


@dataclass(frozen=True)
class MergeEvent(DebugEvent):
    unit: str
    inputs: tuple[FactSet, ...]
    result: FactSet

    kind = "merge"


@dataclass(frozen=True)
class TransferEvent(DebugEvent):
    unit: str
    in_facts: FactSet
    result: TransferResult

    kind = "transfer"


@dataclass(frozen=True)
class EdgeUpdateEvent(DebugEvent):
    edge: str
    old: FactSet
    new: FactSet

    kind = "edge_update"


@dataclass(frozen=True)
class FixpointEvent(DebugEvent):
    method: str

    kind = "fixpoint"


@dataclass(frozen=True)
class BudgetEvent(DebugEvent):
    method: str

    kind = "budget_exceeded"


def _render_out(result: TransferResult, lat) -> str:
    if result.out_by_kind:
        distinct = {lat.render(facts) for _, facts in result.out_by_kind}
        if len(distinct) > 1:
            return ";".join(
                f"{kind}:{lat.render(facts)}" for kind, facts in result.out_by_kind
            )
    return lat.render(result.out)


def _render_set(elems: tuple[str, ...]) -> str:
    return "{" + ",".join(elems) + "}"


def render_event(ev: DebugEvent, lat) -> str:
    """Canonical one-line rendering: seq|iteration|kind|unit-or-edge|in|out|gen|kill."""
    if isinstance(ev, PopEvent):
        mid = (ev.unit, "", "", "", "")
    elif isinstance(ev, MergeEvent):
        mid = (ev.unit, "+".join(lat.render(i) for i in ev.inputs),
               lat.render(ev.result), "", "")
    elif isinstance(ev, TransferEvent):
        mid = (ev.unit, lat.render(ev.in_facts), _render_out(ev.result, lat),
               _render_set(ev.result.gen), _render_set(ev.result.kill))
    elif isinstance(ev, EdgeUpdateEvent):
        mid = (ev.edge, lat.render(ev.old), lat.render(ev.new), "", "")
    else:  # fixpoint / budget_exceeded
        mid = (ev.method, "", "", "", "")
    return "|".join((str(ev.seq), str(ev.iteration), ev.kind) + mid)


class EventLog:
    """Append-only ordered record of solver events, with per-unit and
    per-edge seq indexes."""

    def __init__(self):
        self.events: list[DebugEvent] = []
        self.unit_index: dict[str, list[int]] = {}
        self.edge_index: dict[str, list[int]] = {}

    def append(self, ev: DebugEvent):
        assert ev.seq == len(self.events), "event seqs must be gapless"
        self.events.append(ev)
        key = getattr(ev, "unit", None)
        if key is not None:
            self.unit_index.setdefault(key, []).append(ev.seq)
        edge = getattr(ev, "edge", None)
        if edge is not None:
            self.edge_index.setdefault(edge, []).append(ev.seq)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]


class _Probe:
    """Worklist visibility for iteration-granularity stepping."""

    def __init__(self):
        self.method: str | None = None
        self.worklist: tuple[str, ...] = ()

    def update(self, method: str, worklist: tuple[str, ...]):
        self.method = method
        self.worklist = worklist


def solver_events(
    program: Program,
    analysis: AnalysisDef,
    cfgs: dict[str, Cfg],
    budget: int = DEFAULT_BUDGET,
    probe: _Probe | None = None,
) -> Iterator[DebugEvent]:
    """Instrumented worklist run over every method, in program order.

    Emits the exact solver semantics of solver.solve(): FIFO worklist
    seeded with nodes in ordinal order, backward analyses on the
    reversed CFG. The iteration counter is the per-method transfer
    count; all events of one processing step share it.
    """
    from collections import deque

    lat = analysis.lattice
    seq = 0
    for method in program.methods:
        cfg = cfgs[method.name]
        view = direction_view(analysis, cfg)
        edge_facts = {e: lat.bottom() for e in cfg.edges}
        worklist = deque(cfg.nodes)
        queued = set(cfg.nodes)
        iteration = 0
        while worklist:
            unit_id = worklist.popleft()
            queued.discard(unit_id)
            if probe is not None:
                probe.update(method.name, tuple(worklist))
            iteration += 1
            yield PopEvent(seq, iteration, unit_id)
            seq += 1
            inputs, in_fact = merge_inputs(analysis, view, unit_id, edge_facts)
            yield MergeEvent(seq, iteration, unit_id, tuple(inputs), in_fact)
            seq += 1
            if iteration > budget:
                yield BudgetEvent(seq, iteration, method.name)
                return
            result = transfer_result(analysis, cfg.units[unit_id], in_fact)
            yield TransferEvent(seq, iteration, unit_id, in_fact, result)
            seq += 1
            for edge in view.write_edges[unit_id]:
                new = _write_value(analysis, result, edge)
                if not lat.equals(edge_facts[edge], new):
                    old = edge_facts[edge]
                    edge_facts[edge] = new
                    yield EdgeUpdateEvent(seq, iteration, cfg.edge_ids[edge], old, new)
                    seq += 1
                    nxt = edge.dst if analysis.direction == "forward" else edge.src
                    if nxt not in queued:
                        worklist.append(nxt)
                        queued.add(nxt)
            if probe is not None:
                probe.update(method.name, tuple(worklist))
        yield FixpointEvent(seq, iteration, method.name)
        seq += 1


# ---------------------------------------------------------------------------
# Breakpoints
# ---------------------------------------------------------------------------


@dataclass
class Breakpoint:
    id: int
    kind: str  # "unit" | "line" | "event"
    unit: str | None = None  # resolved unit for unit/line breakpoints
    line: int | None = None
    event_kind: str | None = None  # one of EVENT_BP_KINDS
    arg: str | None = None  # pattern, edge id, or unit kind
    enabled: bool = True
    hit_count: int = 0

    def describe(self) -> str:
        if self.kind == "unit":
            return f"#{self.id} unit {self.unit}"
        if self.kind == "line":
            return f"#{self.id} line {self.line} ({self.unit})"
        return f"#{self.id} {self.event_kind}({self.arg})"


def _pattern_match(pattern: str, text: str) -> bool:
    if pattern.endswith("*"):
        return text.startswith(pattern[:-1])
    return text == pattern


# ---------------------------------------------------------------------------
# Session
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Suspension:
    """What the debugger reports every time control returns to the user."""

    state: str  # "suspended" | "finished" | "idle"
    reason: str  # step | breakpoint | fixpoint | budget-exceeded | rewind | start
    seq: int
    unit: str | None
    line: int | None
    method: str | None
    iteration: int
    in_text: str | None
    out_text: str | None
    gen: tuple[str, ...]
    kill: tuple[str, ...]
    breakpoint_ids: tuple[int, ...] = ()
    changed_edges: tuple[tuple[str, str, int], ...] = ()  # (edge id, facts, iteration)


@dataclass(frozen=True)
class Divergence:
    seq: int
    unit: str | None
    line_a: str | None
    line_b: str | None
    event_a: DebugEvent | None
    event_b: DebugEvent | None


class DebugSession:
    """One instrumented solver run: breakpoints, stepping, history, rewind.

    Commands are expected to arrive one at a time (callers serialize).
    Sessions share nothing, so independent sessions may run concurrently.
    """

    def __init__(
        self,
        program: Program,
        analysis: AnalysisDef,
        budget: int = DEFAULT_BUDGET,
    ):
        self.program = program
        self.analysis = analysis
        self.budget = budget
        self.cfgs = build_cfgs(program)
        self.views: dict[str, DirectionView] = {
            name: direction_view(analysis, cfg) for name, cfg in self.cfgs.items()
        }
        self.breakpoints: dict[int, Breakpoint] = {}
        self.focus: str | None = None
        self.log = EventLog()
        self.state = IDLE
        self._next_bp_id = 1
        self._probe = _Probe()
        self._gen: Iterator[DebugEvent] | None = None
        self._pending: TransferEvent | None = None
        self._retained: list[str] | None = None
        self._edge_owner: dict[str, tuple[str, object]] = {}
        for name, cfg in self.cfgs.items():
            for eid, edge in cfg.edge_by_id.items():
                self._edge_owner[eid] = (name, edge)
        self._reset_run_state()

    # -- plumbing -----------------------------------------------------------

    def _reset_run_state(self):
        lat = self.analysis.lattice
        self.log = EventLog()
        self._gen = None
        self._pending = None
        self._probe = _Probe()
        self.state = IDLE
        self._edge_facts: dict[str, FactSet] = {}
        self._edge_iteration: dict[str, int] = {}
        self._history: dict[str, list[tuple[int, FactSet]]] = {}
        for eid in self._edge_owner:
            self._edge_facts[eid] = lat.bottom()
            self._edge_iteration[eid] = 0
            self._history[eid] = [(0, lat.bottom())]
        self._method_iteration: dict[str, int] = {m.name: 0 for m in self.program.methods}
        self._current_method: str | None = None
        self._changed: dict[str, tuple[str, int]] = {}
        self._apply_observers: list[Callable[[DebugEvent], None]] = []

    def _ensure_gen(self):
        if self._gen is None:
            self._gen = solver_events(
                self.program, self.analysis, self.cfgs, self.budget, self._probe
            )

    def _pull(self) -> DebugEvent | None:
        self._ensure_gen()
        try:
            return next(self._gen)
        except StopIteration:
            return None

    def _apply(self, ev: DebugEvent):
        if self._retained is not None and ev.seq < len(self._retained):
            line = render_event(ev, self.analysis.lattice)
            if line != self._retained[ev.seq]:
                raise DeterminismError(
                    "internal determinism fault: replay diverged at seq "
                    f"{ev.seq}: {line!r} != retained {self._retained[ev.seq]!r}"
                )
        self.log.append(ev)
        if isinstance(ev, (PopEvent, MergeEvent, TransferEvent)):
            method = ev.unit.partition("#")[0]
            self._current_method = method
            self._method_iteration[method] = ev.iteration
        elif isinstance(ev, (FixpointEvent, BudgetEvent)):
            self._current_method = ev.method
            self._method_iteration[ev.method] = ev.iteration
        if isinstance(ev, EdgeUpdateEvent):
            self._edge_facts[ev.edge] = ev.new
            self._edge_iteration[ev.edge] = ev.iteration
            self._history[ev.edge].append((ev.iteration, ev.new))
            self._changed[ev.edge] = (
                self.analysis.lattice.render(ev.new),
                ev.iteration,
            )
        for observer in self._apply_observers:
            observer(ev)

    def _commit_pending(self):
        ev = self._pending
        self._pending = None
        self._apply(ev)

    def _advance_to_point(self) -> str:
        """Run the generator until the next transfer is computed (held as
        pending), the budget trips, or the run ends."""
        while True:
            ev = self._pull()
            if ev is None:
                self.state = FINISHED
                return "finished"
            if isinstance(ev, TransferEvent):
                self._pending = ev
                return "point"
            self._apply(ev)
            if isinstance(ev, BudgetEvent):
                return "budget"

    def _pending_changed_edges(self) -> list[str]:
        """Edge ids the pending transfer would change when applied."""
        assert self._pending is not None
        unit_id = self._pending.unit
        method = unit_id.partition("#")[0]
        view = self.views[method]
        cfg = self.cfgs[method]
        lat = self.analysis.lattice
        changed = []
        for edge in view.write_edges[unit_id]:
            eid = cfg.edge_ids[edge]
            new = _write_value(self.analysis, self._pending.result, edge)
            if not lat.equals(self._edge_facts[eid], new):
                changed.append(eid)
        return changed

    def _matching_breakpoints(self) -> list[Breakpoint]:
        pending = self._pending
        hits = []
        would_change: list[str] | None = None
        for bp in self.breakpoints.values():
            if not bp.enabled:
                continue
            if bp.kind in ("unit", "line"):
                if bp.unit == pending.unit:
                    hits.append(bp)
            elif bp.event_kind == "unit-kind":
                unit = self.program.unit(pending.unit)
                if unit.kind == bp.arg:
                    hits.append(bp)
            elif bp.event_kind == "fact-generated":
                if any(_pattern_match(bp.arg, g) for g in pending.result.gen):
                    hits.append(bp)
            elif bp.event_kind == "fact-killed":
                if any(_pattern_match(bp.arg, k) for k in pending.result.kill):
                    hits.append(bp)
            elif bp.event_kind == "edge-changed":
                if would_change is None:
                    would_change = self._pending_changed_edges()
                if bp.arg in would_change:
                    hits.append(bp)
        return hits

    def _drain_changes(self) -> tuple[tuple[str, str, int], ...]:
        changed = tuple(
            (eid, facts, iteration) for eid, (facts, iteration) in self._changed.items()
        )
        self._changed = {}
        return changed

    def _report(
        self,
        reason: str,
        state: str | None = None,
        bp_ids: tuple[int, ...] = (),
    ) -> Suspension:
        lat = self.analysis.lattice
        pending = self._pending
        if pending is not None:
            unit = self.program.unit(pending.unit)
            return Suspension(
                state=state or self.state,
                reason=reason,
                seq=len(self.log),
                unit=pending.unit,
                line=unit.source_line,
                method=pending.unit.partition("#")[0],
                iteration=pending.iteration,
                in_text=lat.render(pending.in_facts),
                out_text=_render_out(pending.result, lat),
                gen=pending.result.gen,
                kill=pending.result.kill,
                breakpoint_ids=bp_ids,
                changed_edges=self._drain_changes(),
            )
        last_unit = None
        line = None
        for ev in reversed(self.log.events):
            uid = getattr(ev, "unit", None)
            if uid is not None:
                last_unit = uid
                line = self.program.unit(uid).source_line
                break
        return Suspension(
            state=state or self.state,
            reason=reason,
            seq=len(self.log),
            unit=last_unit,
            line=line,
            method=self._current_method,
            iteration=self._method_iteration.get(self._current_method, 0)
            if self._current_method
            else 0,
            in_text=None,
            out_text=None,
            gen=(),
            kill=(),
            breakpoint_ids=bp_ids,
            changed_edges=self._drain_changes(),
        )

    # -- execution commands --------------------------------------------------

    def _advance(
        self,
        reason: str,
        stop: Callable[[], bool] | None,
        honor_breakpoints: bool = True,
        observer: Callable[[DebugEvent], None] | None = None,
    ) -> Suspension:
        if self.state == FINISHED:
            raise SessionFinishedError()
        if observer is not None:
            self._apply_observers.append(observer)
        try:
            while True:
                if self._pending is not None:
                    self._commit_pending()
                status = self._advance_to_point()
                if status == "finished":
                    return self._report("fixpoint", state=FINISHED)
                if status == "budget":
                    self.state = SUSPENDED
                    return self._report("budget-exceeded")
                hits = self._matching_breakpoints() if honor_breakpoints else []
                if hits:
                    for bp in hits:
                        bp.hit_count += 1
                    self.state = SUSPENDED
                    return self._report(
                        "breakpoint", bp_ids=tuple(bp.id for bp in hits)
                    )
                if stop is not None and stop():
                    self.state = SUSPENDED
                    return self._report(reason)
        finally:
            if observer is not None:
                self._apply_observers.remove(observer)

    def step(self, granularity: str = "transfer") -> Suspension:
        if granularity not in GRANULARITIES:
            raise DebugError(
                f"unknown granularity {granularity!r}; expected one of "
                + ", ".join(GRANULARITIES)
            )
        if granularity == "transfer":
            return self._advance("step", stop=lambda: True)
        if granularity == "unit":
            start_unit = self._pending.unit if self._pending else None
            return self._advance(
                "step", stop=lambda: self._pending.unit != start_unit
            )
        if granularity == "iteration":
            # every unit queued at this suspension must get its transfer
            # applied before we stop
            remaining = set(self._probe.worklist)

            def observer(ev: DebugEvent):
                if isinstance(ev, TransferEvent):
                    remaining.discard(ev.unit)

            return self._advance(
                "step", stop=lambda: not remaining, observer=observer
            )
        if granularity == "method":
            saw_fixpoint = [False]

            def observer(ev: DebugEvent):
                if isinstance(ev, (FixpointEvent, BudgetEvent)):
                    saw_fixpoint[0] = True

            return self._advance(
                "step", stop=lambda: saw_fixpoint[0], observer=observer
            )
        # to-fixpoint: run to the end, ignoring breakpoints
        return self._advance("fixpoint", stop=None, honor_breakpoints=False)

    def resume(self) -> Suspension:
        return self._advance("resume", stop=None)

    def run_to_fixpoint(self) -> Suspension:
        return self.step("to-fixpoint")

    # -- breakpoints ----------------------------------------------------------

    def set_breakpoint(
        self,
        unit: str | None = None,
        line: int | None = None,
        event: tuple[str, str] | None = None,
    ) -> Breakpoint:
        given = [x for x in (unit, line, event) if x is not None]
        if len(given) != 1:
            raise BadBreakpointError(
                "breakpoint spec needs exactly one of unit=, line=, event="
            )
        if unit is not None:
            self.program.unit(unit)  # raises UnitNotFoundError
            bp = Breakpoint(self._next_bp_id, "unit", unit=unit)
        elif line is not None:
            resolved = self.program.unit_at_line(line)
            if resolved is None:
                lines = sorted(self.program.line_table)
                below = max((l for l in lines if l < line), default=None)
                above = min((l for l in lines if l > line), default=None)
                raise BreakpointResolutionError(line, (below, above))
            bp = Breakpoint(
                self._next_bp_id, "line", unit=resolved.id, line=line
            )
        else:
            event_kind, arg = event
            if event_kind not in EVENT_BP_KINDS:
                raise BadBreakpointError(
                    f"unknown event predicate {event_kind!r}; expected one of "
                    + ", ".join(EVENT_BP_KINDS)
                )
            if event_kind == "edge-changed" and arg not in self._edge_owner:
                raise EdgeNotFoundError(arg)
            bp = Breakpoint(self._next_bp_id, "event", event_kind=event_kind, arg=arg)
        self.breakpoints[bp.id] = bp
        self._next_bp_id += 1
        return bp

    def remove_breakpoint(self, bp_id: int) -> bool:
        """Idempotent: removing an unknown id is a no-op returning False."""
        return self.breakpoints.pop(bp_id, None) is not None

    # -- queries --------------------------------------------------------------

    def inspect_edge(self, edge_id: str, at: int | None = None) -> FactSet:
        if edge_id not in self._edge_owner:
            raise EdgeNotFoundError(edge_id)
        if at is None:
            return self._edge_facts[edge_id]
        method = self._edge_owner[edge_id][0]
        current = self._method_iteration[method]
        if at < 0 or at > current:
            raise IterationRangeError(at, current)
        value = None
        for iteration, facts in self._history[edge_id]:
            if iteration <= at:
                value = facts
            else:
                break
        return value

    def history(self, target_id: str) -> dict[str, list[tuple[int, FactSet]]]:
        """Iteration-stamped value history of an edge, or of every edge a
        unit's transfer writes (outgoing edges forward, incoming backward)."""
        if target_id in self._edge_owner:
            return {target_id: list(self._history[target_id])}
        unit = self.program.unit(target_id)  # raises UnitNotFoundError
        method = target_id.partition("#")[0]
        cfg = self.cfgs[method]
        view = self.views[method]
        return {
            cfg.edge_ids[e]: list(self._history[cfg.edge_ids[e]])
            for e in view.write_edges[unit.id]
        }

    def edge_facts(self) -> dict[str, FactSet]:
        return dict(self._edge_facts)

    def in_facts(self, method: str) -> dict[str, FactSet]:
        """Joined in-fact per unit of one method, from committed state."""
        cfg = self.cfgs[method]
        view = self.views[method]
        raw = {cfg.edge_by_id[eid]: facts
               for eid, facts in self._edge_facts.items()
               if eid in cfg.edge_by_id}
        return {
            uid: merge_inputs(self.analysis, view, uid, raw)[1]
            for uid in cfg.nodes
        }

    def leaks(self) -> list[tuple[str, str]]:
        """Sink calls receiving tainted arguments, from committed state."""
        if self.analysis.taint is None:
            return []
        out = []
        for m in self.program.methods:
            cfg = self.cfgs[m.name]
            in_facts = self.in_facts(m.name)
            for uid in cfg.nodes:
                unit = cfg.units[uid]
                if unit.callee in self.analysis.taint.sinks:
                    for arg in unit.call_args:
                        if arg in in_facts[uid] and (uid, arg) not in out:
                            out.append((uid, arg))
        return out

    def canonical_lines(self) -> list[str]:
        lat = self.analysis.lattice
        return [render_event(ev, lat) for ev in self.log]

    @property
    def current_unit(self) -> str | None:
        return self._pending.unit if self._pending else None

    @property
    def seq(self) -> int:
        return len(self.log)

    # -- rewind ---------------------------------------------------------------

    def rewind(self, seq: int) -> Suspension:
        last = len(self.log) - 1
        if seq < 0 or seq > max(last, 0):
            raise SeqRangeError(seq, max(last, 0))
        retained = self.canonical_lines()
        self._reset_run_state()
        self._retained = retained
        while len(self.log) < seq:
            ev = self._pull()
            if ev is None:
                raise DeterminismError(
                    "internal determinism fault: replay ended before seq "
                    f"{seq} (log has {len(self.log)} events)"
                )
            self._apply(ev)
        self.state = SUSPENDED if seq > 0 else IDLE
        self._changed = {}
        report = self._report("rewind", state=self.state)
        # after a rewind every label may have moved backwards: report the
        # full current edge state so views can refresh
        lat = self.analysis.lattice
        all_edges = tuple(
            (eid, lat.render(self._edge_facts[eid]), self._edge_iteration[eid])
            for eid in sorted(self._edge_owner)
        )
        return replace(report, changed_edges=all_edges)

    # -- focus ----------------------------------------------------------------

    def set_focus(self, unit_id: str) -> bool:
        """Record the statement all views synchronize on. Returns True when
        the focus actually changed (idempotent otherwise)."""
        self.program.unit(unit_id)  # raises UnitNotFoundError
        if self.focus == unit_id:
            return False
        self.focus = unit_id
        return True

    # -- divergence -----------------------------------------------------------

    def diverge(self, other: "DebugSession") -> Divergence | None:
        """First event where two finished runs differ, by canonical line."""
        if self.state != FINISHED or other.state != FINISHED:
            raise SessionMisuseError("diverge needs two finished sessions")
        if render_program(self.program) != render_program(other.program):
            raise SessionMisuseError("diverge needs sessions on the same program")
        lines_a = self.canonical_lines()
        lines_b = other.canonical_lines()
        for i, (la, lb) in enumerate(zip(lines_a, lines_b)):
            if la != lb:
                return Divergence(
                    seq=i,
                    unit=_event_unit(self.log[i], self.cfgs)
                    or _event_unit(other.log[i], other.cfgs),
                    line_a=la,
                    line_b=lb,
                    event_a=self.log[i],
                    event_b=other.log[i],
                )
        if len(lines_a) != len(lines_b):
            i = min(len(lines_a), len(lines_b))
            ev_a = self.log[i] if i < len(lines_a) else None
            ev_b = other.log[i] if i < len(lines_b) else None
            return Divergence(
                seq=i,
                unit=(ev_a and _event_unit(ev_a, self.cfgs))
                or (ev_b and _event_unit(ev_b, other.cfgs)),
                line_a=lines_a[i] if i < len(lines_a) else None,
                line_b=lines_b[i] if i < len(lines_b) else None,
                event_a=ev_a,
                event_b=ev_b,
            )
        return None


def _event_unit(ev: DebugEvent, cfgs: dict[str, Cfg]) -> str | None:
    uid = getattr(ev, "unit", None)
    if uid is not None:
        return uid
    edge_id = getattr(ev, "edge", None)
    if edge_id is not None:
        for cfg in cfgs.values():
            edge = cfg.edge_by_id.get(edge_id)
            if edge is not None:
                return edge.src
    return None


def start(
    program: Program,
    analysis: AnalysisDef | str,
    taint_config: TaintConfig | None = None,
    budget: int = DEFAULT_BUDGET,
) -> DebugSession:
    """Create an idle session; raises UnknownAnalysisError for bad names."""
    if isinstance(analysis, str):
        analysis = get_analysis(analysis, taint_config)
    return DebugSession(program, analysis, budget=budget)
