/**
 * The smaller panels: suspension banner, results (edge facts + leaks),
 * unit inspection, edge history, toasts, and the step/rewind controls.
 */

import { UiController } from "../controller.js";
import { ViewState } from "../state.js";

export class BannerView {
  constructor(private root: HTMLElement) {}

  render(state: ViewState) {
    this.root.textContent = "";
    if (state.connection === "disconnected") {
      this.root.className = "banner banner-error";
      this.root.textContent = "disconnected";
      return;
    }
    const banner = state.banner;
    if (!banner) {
      this.root.className = "banner";
      this.root.textContent =
        state.connection === "connected" ? `loaded (seq ${state.seq})` : "idle";
      return;
    }
    if (banner.state === "finished") {
      this.root.className = "banner banner-done";
      this.root.textContent = `finished: ${banner.reason} (seq ${state.seq})`;
      return;
    }
    this.root.className = "banner banner-live";
    const parts = [
      `${banner.state} (${banner.reason})`,
      banner.unit ? `at ${banner.unit}` : "at start",
      banner.line !== null ? `line ${banner.line}` : "",
      `seq ${state.seq}`,
      `iteration ${banner.iteration}`,
      banner.inFacts !== null ? `in ${banner.inFacts}` : "",
      banner.outFacts !== null ? `out ${banner.outFacts}` : "",
      banner.gen.length ? `gen {${banner.gen.join(",")}}` : "",
      banner.kill.length ? `kill {${banner.kill.join(",")}}` : "",
    ].filter(Boolean);
    this.root.textContent = parts.join("  ");
  }
}

export class ResultsView {
  constructor(
    private root: HTMLElement,
    private controller: UiController,
  ) {}

  render(state: ViewState) {
    this.root.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "Results";
    this.root.appendChild(heading);

    const table = document.createElement("table");
    table.className = "results-table";
    for (const [edgeId, entry] of [...state.edgeLabels.entries()].sort()) {
      const row = document.createElement("tr");
      const edgeCell = document.createElement("td");
      edgeCell.textContent = edgeId;
      edgeCell.className = "results-edge";
      edgeCell.addEventListener("click", () => {
        void this.controller.selectEdge(edgeId);
      });
      const factsCell = document.createElement("td");
      factsCell.textContent = entry.label; // server string, verbatim
      const iterCell = document.createElement("td");
      iterCell.textContent = `it${entry.iteration}`;
      row.append(edgeCell, factsCell, iterCell);
      table.appendChild(row);
    }
    this.root.appendChild(table);

    const leaks = document.createElement("div");
    leaks.className = "leaks";
    if (state.leaks.length) {
      leaks.textContent =
        "leaks: " + state.leaks.map((l) => `${l.unit} receives {${l.var}}`).join("; ");
    } else if (state.analysis === "taint" || state.analysis?.startsWith("taint-")) {
      leaks.textContent = "leaks: none";
    }
    this.root.appendChild(leaks);

    if (state.selectedHistory) {
      const hist = document.createElement("div");
      hist.className = "history";
      const title = document.createElement("h4");
      title.textContent = `History of ${state.selectedHistory.id}`;
      hist.appendChild(title);
      for (const entry of state.selectedHistory.histories) {
        const line = document.createElement("div");
        line.textContent =
          entry.edge +
          ": " +
          entry.entries.map(([it, facts]) => `it${it} ${facts}`).join(" → ");
        hist.appendChild(line);
      }
      this.root.appendChild(hist);
    }
  }
}

export class UnitInfoView {
  constructor(private root: HTMLElement) {}

  render(state: ViewState) {
    this.root.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "Unit inspection";
    this.root.appendChild(heading);
    const info = state.unitInfo;
    if (!info) {
      const hint = document.createElement("div");
      hint.textContent = "select a statement in any panel";
      this.root.appendChild(hint);
      return;
    }
    const rows: [string, string][] = [
      ["unit", info.id],
      ["kind", info.kind],
      ["text", info.text],
      ["line", String(info.line)],
      ["defs", `{${info.defs.join(",")}}`],
      ["uses", `{${info.uses.join(",")}}`],
    ];
    if (info.callee) rows.push(["callee", info.callee]);
    for (const operand of info.operands) rows.push(["operand", operand]);
    for (const succ of info.successors) rows.push(["succ", `${succ.dst} [${succ.kind}]`]);
    const table = document.createElement("table");
    for (const [key, value] of rows) {
      const row = document.createElement("tr");
      const keyCell = document.createElement("td");
      keyCell.textContent = key;
      const valueCell = document.createElement("td");
      valueCell.textContent = value;
      row.append(keyCell, valueCell);
      table.appendChild(row);
    }
    this.root.appendChild(table);
  }
}

export class ToastView {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private root: HTMLElement,
    private onExpire: () => void,
  ) {}

  render(state: ViewState) {
    if (!state.toast) {
      this.root.classList.remove("toast-visible");
      return;
    }
    this.root.textContent = state.toast;
    this.root.classList.add("toast-visible");
    if (this.timer) clearTimeout(this.timer);
    this.timer = setTimeout(() => this.onExpire(), 4000);
  }
}

export class ControlsView {
  constructor(
    private root: HTMLElement,
    private controller: UiController,
  ) {
    const mkButton = (label: string, onClick: () => void) => {
      const button = document.createElement("button");
      button.textContent = label;
      button.addEventListener("click", onClick);
      this.root.appendChild(button);
      return button;
    };
    this.buttons = [
      mkButton("step", () => void this.act(() => controller.step("transfer"))),
      mkButton("step unit", () => void this.act(() => controller.step("unit"))),
      mkButton("step iteration", () => void this.act(() => controller.step("iteration"))),
      mkButton("step method", () => void this.act(() => controller.step("method"))),
      mkButton("continue", () => void this.act(() => controller.resume())),
      mkButton("to fixpoint", () => void this.act(() => controller.step("to-fixpoint"))),
    ];
    this.slider = document.createElement("input");
    this.slider.type = "range";
    this.slider.min = "0";
    this.slider.value = "0";
    this.slider.title = "rewind to event seq";
    this.slider.addEventListener("change", () => {
      void this.act(() => controller.rewind(Number(this.slider.value)));
    });
    this.sliderLabel = document.createElement("span");
    this.sliderLabel.className = "slider-label";
    this.root.append(this.slider, this.sliderLabel);
  }

  private buttons: HTMLButtonElement[];
  private slider: HTMLInputElement;
  private sliderLabel: HTMLSpanElement;

  private async act(fn: () => Promise<unknown>) {
    try {
      await fn();
      await this.controller.refreshResults();
    } catch {
      // errors surface through the toast / banner paths
    }
  }

  render(state: ViewState) {
    for (const button of this.buttons) {
      // a finished session cannot step further; rewind stays available
      button.disabled = state.finished || state.connection !== "connected";
      button.title = state.finished ? "finished; use the slider to rewind" : "";
    }
    this.slider.max = String(Math.max(state.seq, Number(this.slider.max)));
    this.slider.value = String(state.seq);
    this.sliderLabel.textContent = `seq ${state.seq}`;
  }
}
