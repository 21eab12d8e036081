/**
 * DOM smoke tests for the panels: rendering happens from ViewState
 * alone, gutter and node clicks go through the controller, and fact
 * strings land in the DOM verbatim.
 *
 * @vitest-environment happy-dom
 */

import { describe, expect, it } from "vitest";

import { DebugClient } from "../src/client.js";
import { UiController } from "../src/controller.js";
import { Store } from "../src/state.js";
import { GraphView } from "../src/views/graph.js";
import { IrView } from "../src/views/irview.js";
import { BannerView, ResultsView, UnitInfoView } from "../src/views/panels.js";
import { FakeTransport } from "./helpers.js";

const LEAK_TEXT = `method main() { x = source()
  y = sanitize(x)
  sink(x)
  sink(y)
}
`;

function leakGraph() {
  const nodes = [
    { id: "main#0", kind: "assign", text: "x = source()", line: 1 },
    { id: "main#1", kind: "assign", text: "y = sanitize(x)", line: 2 },
    { id: "main#2", kind: "invoke", text: "sink(x)", line: 3 },
    { id: "main#3", kind: "invoke", text: "sink(y)", line: 4 },
  ];
  const mkEdge = (a: number, b: number, label: string) => ({
    id: `main#${a}->main#${b}`,
    src: `main#${a}`,
    dst: `main#${b}`,
    kind: "fallthrough",
    label,
    iteration: 1,
  });
  return {
    seq: 16,
    method: "main",
    nodes,
    edges: [mkEdge(0, 1, "{x}"), mkEdge(1, 2, "{x}"), mkEdge(2, 3, "{x}")],
  };
}

function setup() {
  const transport = new FakeTransport();
  const store = new Store();
  const controller = new UiController(new DebugClient(transport), store);
  return { transport, store, controller };
}

describe("GraphView", () => {
  it("renders nodes and verbatim edge labels", () => {
    const { store, controller } = setup();
    store.applyGraph(leakGraph(), "main");
    const host = document.createElement("div");
    new GraphView(host, controller).render(store.state);
    const texts = [...host.querySelectorAll("text.edge-label")].map(
      (el) => el.childNodes[0]?.textContent,
    );
    expect(texts).toEqual(["{x}", "{x}", "{x}"]);
    expect(host.querySelectorAll("g.graph-node")).toHaveLength(4);
  });

  it("highlights the current unit", () => {
    const { store, controller } = setup();
    store.applyGraph(leakGraph(), "main");
    store.update((state) => {
      state.currentUnit = "main#2";
    });
    const host = document.createElement("div");
    new GraphView(host, controller).render(store.state);
    const current = host.querySelector('g[data-unit="main#2"] rect');
    expect(current?.getAttribute("stroke")).toBe("#1a73e8");
    const other = host.querySelector('g[data-unit="main#0"] rect');
    expect(other?.getAttribute("stroke")).toBe("#5f6368");
  });

  it("node click focuses the unit through the controller", async () => {
    const { transport, store, controller } = setup();
    transport.respond("setFocus", (args) => ({ focus: args.unit, changed: false }));
    store.applyGraph(leakGraph(), "main");
    const host = document.createElement("div");
    new GraphView(host, controller).render(store.state);
    (host.querySelector('g[data-unit="main#1"]') as SVGGElement).dispatchEvent(
      new MouseEvent("click", { bubbles: true }),
    );
    await new Promise((r) => setTimeout(r, 0));
    expect(transport.sent.some((r) => r.op === "setFocus")).toBe(true);
    expect(store.state.focused).toBe("main#1");
  });
});

describe("IrView", () => {
  it("marks breakpointed lines and highlights the suspension line", () => {
    const { store, controller } = setup();
    store.update((state) => {
      state.programText = LEAK_TEXT;
      state.graph = leakGraph();
      state.breakpoints = [{ id: 1, unit: "main#2", line: 3 }];
      state.banner = {
        seq: 10,
        state: "suspended",
        reason: "breakpoint",
        unit: "main#2",
        line: 3,
        iteration: 3,
        inFacts: "{x}",
        outFacts: "{x}",
        gen: [],
        kill: [],
      };
    });
    const host = document.createElement("div");
    new IrView(host, controller).render(store.state);
    const rows = [...host.querySelectorAll(".ir-line")];
    expect(rows).toHaveLength(LEAK_TEXT.split("\n").length);
    expect(rows[2]?.querySelector(".ir-gutter")?.textContent).toBe("●");
    expect(rows[0]?.querySelector(".ir-gutter")?.textContent?.trim()).toBe("");
    expect(rows[2]?.classList.contains("ir-current")).toBe(true);
  });

  it("gutter click round-trips through the controller", async () => {
    const { transport, store, controller } = setup();
    transport.respond("setBreakpoint", (args) => ({
      id: 5,
      kind: "line",
      unit: "main#0",
      line: args.line,
    }));
    store.update((state) => {
      state.programText = LEAK_TEXT;
      state.graph = leakGraph();
    });
    const host = document.createElement("div");
    new IrView(host, controller).render(store.state);
    (host.querySelector('.ir-gutter[data-line="1"]') as HTMLElement).click();
    await new Promise((r) => setTimeout(r, 0));
    expect(store.state.breakpoints).toEqual([{ id: 5, unit: "main#0", line: 1 }]);
  });
});

describe("BannerView and ResultsView", () => {
  it("renders the suspension banner fields", () => {
    const { store } = setup();
    store.update((state) => {
      state.connection = "connected";
      state.seq = 10;
      state.banner = {
        seq: 10,
        state: "suspended",
        reason: "breakpoint",
        unit: "main#2",
        line: 3,
        iteration: 3,
        inFacts: "{x}",
        outFacts: "{x}",
        gen: [],
        kill: [],
      };
    });
    const host = document.createElement("div");
    new BannerView(host).render(store.state);
    expect(host.textContent).toContain("at main#2");
    expect(host.textContent).toContain("in {x}");
    expect(host.textContent).toContain("seq 10");
  });

  it("shows the disconnected banner", () => {
    const { store } = setup();
    const host = document.createElement("div");
    new BannerView(host).render(store.state);
    expect(host.textContent).toBe("disconnected");
  });

  it("renders edge facts verbatim plus leaks", () => {
    const { store, controller } = setup();
    store.update((state) => {
      state.analysis = "taint";
      state.edgeLabels.set("main#1->main#2", { label: "{x}", iteration: 2 });
      state.leaks = [{ unit: "main#2", var: "x" }];
    });
    const host = document.createElement("div");
    new ResultsView(host, controller).render(store.state);
    expect(host.textContent).toContain("main#1->main#2");
    expect(host.textContent).toContain("{x}");
    expect(host.textContent).toContain("main#2 receives {x}");
  });

  it("renders unit inspection details", () => {
    const { store } = setup();
    store.update((state) => {
      state.unitInfo = {
        id: "main#1",
        kind: "assign",
        text: "y = sanitize(x)",
        line: 2,
        defs: ["y"],
        uses: ["x"],
        callee: "sanitize",
        operands: ["lhs y", "call sanitize/1", "arg x"],
        successors: [{ kind: "fallthrough", dst: "main#2" }],
      };
    });
    const host = document.createElement("div");
    new UnitInfoView(host).render(store.state);
    expect(host.textContent).toContain("sanitize");
    expect(host.textContent).toContain("main#2 [fallthrough]");
  });
});
