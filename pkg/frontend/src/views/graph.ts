/**
 * Graph View: the CFG as SVG with fact-labeled edges. Labels render the
 * server's strings verbatim (truncated for display; the full string is
 * the hover tooltip). The pending/current unit and the focused unit get
 * highlight outlines.
 */

import { UiController } from "../controller.js";
import { layoutGraph, NODE_H, NODE_W, nodeColor } from "../layout.js";
import { truncateLabel, ViewState } from "../state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

export class GraphView {
  constructor(
    private root: HTMLElement,
    private controller: UiController,
  ) {}

  render(state: ViewState) {
    this.root.textContent = "";
    if (!state.graph) {
      this.root.textContent = "no graph loaded";
      return;
    }
    const layout = layoutGraph(state.graph);
    const svg = svgEl("svg", {
      width: String(layout.width),
      height: String(layout.height + 40),
      class: "graph-svg",
    });
    const defs = svgEl("defs", {});
    const marker = svgEl("marker", {
      id: "arrow",
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    marker.appendChild(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#5f6368" }));
    defs.appendChild(marker);
    svg.appendChild(defs);

    for (const placed of layout.edges) {
      if (placed.points.length < 2) continue;
      const label = state.edgeLabels.get(placed.edge.id)?.label ?? placed.edge.label;
      const path = svgEl("polyline", {
        points: placed.points.map((p) => `${p.x},${p.y}`).join(" "),
        fill: "none",
        stroke:
          placed.edge.kind === "branch-true"
            ? "#188038"
            : placed.edge.kind === "branch-false"
              ? "#d93025"
              : "#5f6368",
        "stroke-width": "1.5",
        "marker-end": "url(#arrow)",
        class: "graph-edge",
        "data-edge": placed.edge.id,
      });
      svg.appendChild(path);

      const mid = placed.points[Math.floor(placed.points.length / 2) - 1];
      const end = placed.points[Math.floor(placed.points.length / 2)];
      if (mid && end) {
        const text = svgEl("text", {
          x: String((mid.x + end.x) / 2 + 6),
          y: String((mid.y + end.y) / 2 - 4),
          class: "edge-label",
          "data-edge": placed.edge.id,
        });
        text.textContent = truncateLabel(label);
        const title = svgEl("title", {});
        title.textContent = label; // full server string on hover
        text.appendChild(title);
        text.addEventListener("click", () => {
          void this.controller.selectEdge(placed.edge.id);
        });
        svg.appendChild(text);
      }
    }

    for (const placed of layout.nodes) {
      const group = svgEl("g", { class: "graph-node", "data-unit": placed.node.id });
      const highlighted =
        placed.node.id === state.currentUnit || placed.node.id === state.focused;
      const rect = svgEl("rect", {
        x: String(placed.x),
        y: String(placed.y),
        width: String(NODE_W),
        height: String(NODE_H),
        rx: "4",
        fill: nodeColor(placed.node.kind, placed.node.id, state.nodeColorOverrides),
        stroke: highlighted ? "#1a73e8" : "#5f6368",
        "stroke-width": highlighted ? "3" : "1",
      });
      group.appendChild(rect);
      const label = svgEl("text", {
        x: String(placed.x + 8),
        y: String(placed.y + 21),
        class: "node-label",
      });
      label.textContent = `${placed.node.id}: ${placed.node.text}`.slice(0, 26);
      const title = svgEl("title", {});
      title.textContent = `${placed.node.id} [${placed.node.kind}] line ${placed.node.line}\n${placed.node.text}`;
      group.appendChild(title);
      group.appendChild(label);
      group.addEventListener("click", () => {
        void this.controller.focusUnit(placed.node.id);
      });
      svg.appendChild(group);
    }

    this.root.appendChild(svg);
  }
}
