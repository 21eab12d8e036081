"""Graphviz DOT export for CFGs and call graphs.

Output is byte-identical for identical inputs: node and edge statements
follow the graph's own deterministic ordering. Edge decorations (fact
renderings, typically) go into the `label` attribute verbatim.
"""

from __future__ import annotations

from collections.abc import Mapping

from .graphs import BRANCH_FALSE, BRANCH_TRUE, CallGraph, Cfg, EdgeNotFoundError

_EDGE_COLORS = {BRANCH_TRUE: "darkgreen", BRANCH_FALSE: "crimson"}


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    graph: Cfg | CallGraph,
    decorations: Mapping[str, str] | None = None,
) -> str:
    """Render a Cfg or CallGraph as DOT text.

    decorations maps edge ids to label text; an unknown edge id raises
    EdgeNotFoundError naming it.
    """
    decorations = dict(decorations or {})
    if isinstance(graph, Cfg):
        return _export_cfg(graph, decorations)
    return _export_call_graph(graph, decorations)


def _check_decorations(decorations: Mapping[str, str], known: set[str]):
    for edge_id in decorations:
        if edge_id not in known:
            raise EdgeNotFoundError(edge_id)


def _export_cfg(cfg: Cfg, decorations: Mapping[str, str]) -> str:
    _check_decorations(decorations, set(cfg.edge_by_id))
    lines = [f"digraph {_quote('cfg ' + cfg.method)} {{", "  node [shape=box];"]
    for node in cfg.nodes:
        unit = cfg.units[node]
        attrs = [f"label={_quote(f'{node}: {unit.text}')}"]
        if node in cfg.unreachable:
            attrs.append("style=dashed")
        lines.append(f"  {_quote(node)} [{', '.join(attrs)}];")
    for edge in cfg.edges:
        attrs = []
        eid = cfg.edge_ids[edge]
        if eid in decorations:
            attrs.append(f"label={_quote(decorations[eid])}")
        if edge.kind in _EDGE_COLORS:
            attrs.append(f"color={_EDGE_COLORS[edge.kind]}")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(edge.src)} -> {_quote(edge.dst)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _export_call_graph(cg: CallGraph, decorations: Mapping[str, str]) -> str:
    _check_decorations(decorations, set(cg.edge_by_id))
    lines = ["digraph callgraph {", "  node [shape=box];"]
    for name in cg.nodes:
        lines.append(f"  {_quote(name)};")
    for name in cg.externals:
        lines.append(f"  {_quote(name)} [style=dashed];")
    for edge in cg.edges:
        eid = cg.edge_ids[edge]
        label = decorations.get(eid, edge.caller_unit)
        lines.append(f"  {_quote(edge.caller)} -> {_quote(edge.callee)} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_program_cfgs(cfgs: Mapping[str, Cfg], decorations: Mapping[str, str] | None = None) -> str:
    """All CFGs of a program in one digraph, one cluster per method."""
    decorations = dict(decorations or {})
    known = {eid for cfg in cfgs.values() for eid in cfg.edge_by_id}
    _check_decorations(decorations, known)
    lines = ["digraph cfgs {", "  node [shape=box];"]
    for i, (name, cfg) in enumerate(cfgs.items()):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_quote(name)};")
        for node in cfg.nodes:
            unit = cfg.units[node]
            attrs = [f"label={_quote(f'{node}: {unit.text}')}"]
            if node in cfg.unreachable:
                attrs.append("style=dashed")
            lines.append(f"    {_quote(node)} [{', '.join(attrs)}];")
        lines.append("  }")
    for cfg in cfgs.values():
        for edge in cfg.edges:
            attrs = []
            eid = cfg.edge_ids[edge]
            if eid in decorations:
                attrs.append(f"label={_quote(decorations[eid])}")
            if edge.kind in _EDGE_COLORS:
                attrs.append(f"color={_EDGE_COLORS[edge.kind]}")
            suffix = f" [{', '.join(attrs)}]" if attrs else ""
            lines.append(f"  {_quote(edge.src)} -> {_quote(edge.dst)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"
