"""Builtin data-flow analyses: taint, reaching definitions, live
variables, and constant propagation.

Each analysis is an AnalysisDef: a direction, a lattice, an entry fact,
and a pure transfer function mapping (unit, incoming facts) to outgoing
facts. Calls are modeled by primitive summaries; there is no
interprocedural propagation. For taint:

  x = source(...)     the result is tainted
  x = sanitize(...)   the result is clean (argument taint is untouched)
  sink(...)           facts pass through; leaks are read off the in-fact
  x = other(...)      the result is tainted iff some argument is
                      (calls to methods defined in the program included)

The primitive names are configurable; the defaults are source, sink,
and sanitize.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .ir import BinExpr, CallExpr, Method, Unit
from .lattice import TOP, ConstEnv, FactSet, FlatEnvLattice, Lattice, PowersetLattice


@dataclass(frozen=True)
class TaintConfig:
    sources: frozenset[str] = frozenset({"source"})
    sinks: frozenset[str] = frozenset({"sink"})
    sanitizers: frozenset[str] = frozenset({"sanitize"})


class TaintConfigError(Exception):
    pass


def parse_taint_config(text: str) -> TaintConfig:
    """Parse the key-value taint configuration format.

    Lines are "source <name>", "sink <name>", or "sanitizer <name>";
    blank lines and # comments are ignored.
    """
    roles = {"source": set(), "sink": set(), "sanitizer": set()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in roles:
            raise TaintConfigError(
                f"line {lineno}: expected 'source|sink|sanitizer <name>', got {raw!r}"
            )
        roles[parts[0]].add(parts[1])
    return TaintConfig(
        sources=frozenset(roles["source"] or {"source"}),
        sinks=frozenset(roles["sink"] or {"sink"}),
        sanitizers=frozenset(roles["sanitizer"] or {"sanitize"}),
    )


@dataclass
class AnalysisDef:
    """A pluggable analysis for the worklist solver.

    flow must be deterministic, pure, and monotone with respect to
    lattice.leq (the monotonicity auditor checks this, it is not
    assumed). flow may return either a plain fact set or a dict keyed by
    outgoing edge kind for branch-sensitive transfers.
    """

    name: str
    direction: str  # "forward" | "backward"
    lattice: Lattice
    entry_fact: Callable[[Method], FactSet]
    flow: Callable[[Unit, FactSet], FactSet]
    taint: TaintConfig | None = None
    description: str = ""


def _rhs_operands(rhs) -> set[str]:
    if isinstance(rhs, CallExpr):
        return set(rhs.args)
    if isinstance(rhs, BinExpr):
        ops = {rhs.left}
        if isinstance(rhs.right, str):
            ops.add(rhs.right)
        return ops
    if isinstance(rhs, str):
        return {rhs}
    return set()


def make_taint(config: TaintConfig | None = None) -> AnalysisDef:
    config = config or TaintConfig()

    def flow(unit: Unit, facts: frozenset) -> frozenset:
        if unit.kind not in ("assign", "identity"):
            return facts
        rhs = unit.rhs
        if isinstance(rhs, CallExpr):
            if rhs.callee in config.sources:
                tainted = True
            elif rhs.callee in config.sanitizers:
                tainted = False
            else:
                tainted = any(a in facts for a in rhs.args)
        else:
            tainted = any(v in facts for v in _rhs_operands(rhs))
        if tainted:
            return facts | {unit.lhs}
        return facts - {unit.lhs}

    return AnalysisDef(
        name="taint",
        direction="forward",
        lattice=PowersetLattice(),
        entry_fact=lambda method: frozenset(),
        flow=flow,
        taint=config,
        description="tracks values from sources to sinks unless sanitized",
    )


def make_reaching_defs() -> AnalysisDef:
    def flow(unit: Unit, facts: frozenset) -> frozenset:
        if not unit.defs:
            return facts
        surviving = frozenset(d for d in facts if d[0] not in unit.defs)
        return surviving | {(v, unit.id) for v in unit.defs}

    return AnalysisDef(
        name="reaching-defs",
        direction="forward",
        lattice=PowersetLattice(element_text=lambda d: f"{d[0]}@{d[1]}"),
        entry_fact=lambda method: frozenset(),
        flow=flow,
        description="which definitions may reach each point",
    )


def make_liveness() -> AnalysisDef:
    def flow(unit: Unit, facts: frozenset) -> frozenset:
        return (facts - unit.defs) | unit.uses

    return AnalysisDef(
        name="liveness",
        direction="backward",
        lattice=PowersetLattice(),
        entry_fact=lambda method: frozenset(),
        flow=flow,
        description="variables whose value may still be read",
    )


def _eval_rhs(rhs, env: ConstEnv):
    if isinstance(rhs, int):
        return rhs
    if isinstance(rhs, str):
        return env.get(rhs)
    if isinstance(rhs, CallExpr):
        return TOP  # call results are unknown
    left = env.get(rhs.left)
    right = rhs.right if isinstance(rhs.right, int) else env.get(rhs.right)
    if left is None or right is None:
        return None
    if left == TOP or right == TOP:
        return TOP
    if rhs.op == "+":
        return left + right
    if rhs.op == "-":
        return left - right
    if rhs.op == "*":
        return left * right
    if rhs.op == "<":
        return int(left < right)
    return int(left == right)  # ==


def make_constants() -> AnalysisDef:
    def flow(unit: Unit, env: ConstEnv) -> ConstEnv:
        if unit.kind not in ("assign", "identity"):
            return env
        return env.set(unit.lhs, _eval_rhs(unit.rhs, env))

    return AnalysisDef(
        name="constants",
        direction="forward",
        lattice=FlatEnvLattice(),
        entry_fact=lambda method: ConstEnv(
            tuple(sorted((p, TOP) for p in method.params))
        ),
        flow=flow,
        description="per-variable constant values (flat lattice)",
    )


def builtin_analyses(taint_config: TaintConfig | None = None) -> list[AnalysisDef]:
    return [
        make_taint(taint_config),
        make_reaching_defs(),
        make_liveness(),
        make_constants(),
    ]


def fact_sampler(analysis: AnalysisDef, method: Method) -> Callable[[random.Random], FactSet]:
    """Random fact generator over a method's variable universe, used to
    draw samples for the monotonicity auditor."""
    variables = sorted(set(method.params) | method.locals)
    if analysis.name == "reaching-defs":
        universe = sorted(
            (v, u.id) for u in method.units for v in u.defs
        )

        def sample_defs(rng: random.Random) -> frozenset:
            return frozenset(d for d in universe if rng.random() < 0.5)

        return sample_defs
    if isinstance(analysis.lattice, FlatEnvLattice):

        def sample_env(rng: random.Random) -> ConstEnv:
            entries = []
            for v in variables:
                roll = rng.random()
                if roll < 1 / 3:
                    continue  # bottom
                entries.append((v, TOP if roll < 2 / 3 else rng.randrange(-3, 4)))
            return ConstEnv(tuple(entries))

        return sample_env

    def sample_vars(rng: random.Random) -> frozenset:
        return frozenset(v for v in variables if rng.random() < 0.5)

    return sample_vars


def raise_fact(analysis: AnalysisDef, facts: FactSet, extra: FactSet) -> FactSet:
    """A fact set that dominates `facts` under the correct ordering,
    built structurally (independent of the analysis's own join)."""
    if isinstance(facts, ConstEnv):
        merged = {name: val for name, val in facts.entries}
        for name, val in extra.entries:
            if name not in merged:
                merged[name] = val
            elif merged[name] != val:
                merged[name] = TOP
        return ConstEnv(tuple(sorted(merged.items())))
    return facts | extra
