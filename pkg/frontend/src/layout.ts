/**
 * Layered layout for small CFGs: longest-path layering over the acyclic
 * skeleton (back edges found by DFS are excluded from layering and drawn
 * as side arcs). Deterministic for a given payload.
 */

import { GraphEdge, GraphNode, GraphPayload } from "./protocol.js";

export interface PlacedNode {
  node: GraphNode;
  x: number;
  y: number;
  layer: number;
}

export interface PlacedEdge {
  edge: GraphEdge;
  back: boolean;
  points: { x: number; y: number }[];
}

export interface Layout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  width: number;
  height: number;
}

export const NODE_W = 170;
export const NODE_H = 34;
const H_GAP = 60;
const V_GAP = 56;

export function findBackEdges(payload: GraphPayload): Set<string> {
  const out = new Map<string, GraphEdge[]>();
  for (const node of payload.nodes) out.set(node.id, []);
  for (const edge of payload.edges) out.get(edge.src)?.push(edge);
  const back = new Set<string>();
  const state = new Map<string, "active" | "done">();

  const visit = (id: string) => {
    state.set(id, "active");
    for (const edge of out.get(id) ?? []) {
      const dstState = state.get(edge.dst);
      if (dstState === "active") {
        back.add(edge.id);
      } else if (dstState === undefined) {
        visit(edge.dst);
      }
    }
    state.set(id, "done");
  };

  for (const node of payload.nodes) {
    if (!state.has(node.id)) visit(node.id);
  }
  return back;
}

export function layoutGraph(payload: GraphPayload): Layout {
  const back = findBackEdges(payload);
  const layer = new Map<string, number>();
  for (const node of payload.nodes) layer.set(node.id, 0);
  // longest path layering; node order is already topological-ish
  // (ordinal order), so a few sweeps settle it
  for (let sweep = 0; sweep < payload.nodes.length + 1; sweep++) {
    let changed = false;
    for (const edge of payload.edges) {
      if (back.has(edge.id)) continue;
      const want = (layer.get(edge.src) ?? 0) + 1;
      if ((layer.get(edge.dst) ?? 0) < want) {
        layer.set(edge.dst, want);
        changed = true;
      }
    }
    if (!changed) break;
  }

  const byLayer = new Map<number, GraphNode[]>();
  for (const node of payload.nodes) {
    const l = layer.get(node.id) ?? 0;
    const bucket = byLayer.get(l) ?? [];
    bucket.push(node);
    byLayer.set(l, bucket);
  }

  const placed = new Map<string, PlacedNode>();
  const nodes: PlacedNode[] = [];
  let maxRowWidth = 0;
  for (const [l, bucket] of [...byLayer.entries()].sort((a, b) => a[0] - b[0])) {
    bucket.forEach((node, i) => {
      const placedNode: PlacedNode = {
        node,
        layer: l,
        x: 40 + i * (NODE_W + H_GAP),
        y: 20 + l * (NODE_H + V_GAP),
      };
      placed.set(node.id, placedNode);
      nodes.push(placedNode);
    });
    maxRowWidth = Math.max(maxRowWidth, bucket.length * (NODE_W + H_GAP));
  }

  const edges: PlacedEdge[] = payload.edges.map((edge) => {
    const src = placed.get(edge.src);
    const dst = placed.get(edge.dst);
    const isBack = back.has(edge.id);
    if (!src || !dst) return { edge, back: isBack, points: [] };
    const from = { x: src.x + NODE_W / 2, y: src.y + NODE_H };
    const to = { x: dst.x + NODE_W / 2, y: dst.y };
    if (!isBack) {
      return { edge, back: false, points: [from, to] };
    }
    // back edge: exit the side, arc around, enter the target's side
    const sideX = Math.max(src.x, dst.x) + NODE_W + 24;
    return {
      edge,
      back: true,
      points: [
        { x: src.x + NODE_W, y: src.y + NODE_H / 2 },
        { x: sideX, y: src.y + NODE_H / 2 },
        { x: sideX, y: dst.y + NODE_H / 2 },
        { x: dst.x + NODE_W, y: dst.y + NODE_H / 2 },
      ],
    };
  });

  const height = 20 + (Math.max(...[...byLayer.keys()], 0) + 1) * (NODE_H + V_GAP);
  return { nodes, edges, width: Math.max(maxRowWidth + 120, 400), height };
}

/** Default node coloring per statement kind; user overrides win. */
export const KIND_COLORS: Record<string, string> = {
  assign: "#e8f0fe",
  identity: "#e6f4ea",
  if: "#fef7e0",
  goto: "#fef7e0",
  invoke: "#fce8e6",
  return: "#f3e8fd",
  nop: "#f1f3f4",
  method: "#e8f0fe",
  external: "#f1f3f4",
};

export function nodeColor(
  kind: string,
  nodeId: string,
  overrides: Map<string, string>,
): string {
  return overrides.get(nodeId) ?? overrides.get(`kind:${kind}`) ?? KIND_COLORS[kind] ?? "#ffffff";
}
