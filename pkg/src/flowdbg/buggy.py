"""Deliberately broken taint analyses for debugging practice.

Two variants, each seeded with three defects drawn from classic analysis
bug species: a mishandled corner case (copy/identity statements), a
wrong merge (the lattice join loses facts), and a wrong sanitizer rule.
The defects are documented with their expected fault-localization
outcomes in corpus/README.md; `flowdbg localize` pins each one by
diffing event logs against the correct taint analysis.

taint-bug1 over-taints and over-drops:
  1. sanitizer ignored: sanitize() is treated like any other call, so
     its result is tainted whenever an argument is
  2. wrong merge: join is set intersection, so facts vanish where
     paths meet
  3. identity drops facts: a copy always kills its target and never
     propagates taint into it

taint-bug2 under-taints:
  1. sanitizer kills everything: a sanitize() call clears the whole
     fact set, not just its result
  2. wrong merge: join returns its left operand, ignoring the other path
  3. identity is a no-op: a copy neither taints nor cleans its target
"""

from __future__ import annotations

from .analyses import AnalysisDef, TaintConfig
from .ir import CallExpr, Unit
from .lattice import PowersetLattice


class IntersectJoinLattice(PowersetLattice):
    def join(self, a: frozenset, b: frozenset) -> frozenset:
        return a & b  # seeded defect: drops facts on merge


class LeftJoinLattice(PowersetLattice):
    def join(self, a: frozenset, b: frozenset) -> frozenset:
        return a  # seeded defect: second path ignored


def _variant_flow(config: TaintConfig, sanitizer_rule: str, copy_rule: str):
    def flow(unit: Unit, facts: frozenset) -> frozenset:
        if unit.kind == "identity":
            if copy_rule == "drop":
                return facts - {unit.lhs}
            if copy_rule == "noop":
                return facts
        if unit.kind not in ("assign", "identity"):
            return facts
        rhs = unit.rhs
        if isinstance(rhs, CallExpr):
            if rhs.callee in config.sanitizers:
                if sanitizer_rule == "ignored":
                    tainted = any(a in facts for a in rhs.args)
                else:  # "kills-everything"
                    return frozenset()
            elif rhs.callee in config.sources:
                tainted = True
            else:
                tainted = any(a in facts for a in rhs.args)
        elif isinstance(rhs, str):
            tainted = rhs in facts
        elif isinstance(rhs, int):
            tainted = False
        else:
            operands = {rhs.left}
            if isinstance(rhs.right, str):
                operands.add(rhs.right)
            tainted = any(v in facts for v in operands)
        if tainted:
            return facts | {unit.lhs}
        return facts - {unit.lhs}

    return flow


def make_taint_bug1(config: TaintConfig | None = None) -> AnalysisDef:
    config = config or TaintConfig()
    return AnalysisDef(
        name="taint-bug1",
        direction="forward",
        lattice=IntersectJoinLattice(),
        entry_fact=lambda method: frozenset(),
        flow=_variant_flow(config, sanitizer_rule="ignored", copy_rule="drop"),
        taint=config,
        description="taint with seeded defects: sanitizer ignored, "
        "intersection join, copies drop taint",
    )


def make_taint_bug2(config: TaintConfig | None = None) -> AnalysisDef:
    config = config or TaintConfig()
    return AnalysisDef(
        name="taint-bug2",
        direction="forward",
        lattice=LeftJoinLattice(),
        entry_fact=lambda method: frozenset(),
        flow=_variant_flow(config, sanitizer_rule="kills-everything", copy_rule="noop"),
        taint=config,
        description="taint with seeded defects: sanitizer kills everything, "
        "left-biased join, copies are no-ops",
    )
