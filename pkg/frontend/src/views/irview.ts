/**
 * Read-only IR listing with a breakpoint gutter. A gutter click is a
 * server round-trip; the marker reflects the server's breakpoint list
 * only. Clicking a statement focuses its unit in every panel.
 */

import { UiController } from "../controller.js";
import { ViewState } from "../state.js";

export class IrView {
  constructor(
    private root: HTMLElement,
    private controller: UiController,
  ) {}

  private unitAtLine(state: ViewState, line: number): string | null {
    for (const node of state.graph?.nodes ?? []) {
      if (node.line === line) return node.id;
    }
    return null;
  }

  render(state: ViewState) {
    this.root.textContent = "";
    const lines = state.programText.split("\n");
    const markedLines = new Set(
      state.breakpoints.filter((bp) => bp.line !== null).map((bp) => bp.line),
    );
    const currentLine = state.banner?.line ?? null;
    const focusedLine =
      state.focused !== null
        ? (state.graph?.nodes ?? []).find((n) => n.id === state.focused)?.line ?? null
        : null;

    lines.forEach((text, index) => {
      const lineno = index + 1;
      const row = document.createElement("div");
      row.className = "ir-line";
      if (lineno === currentLine) row.classList.add("ir-current");
      if (lineno === focusedLine) row.classList.add("ir-focused");

      const gutter = document.createElement("span");
      gutter.className = "ir-gutter";
      gutter.dataset.line = String(lineno);
      gutter.textContent = markedLines.has(lineno) ? "●" : " ";
      gutter.title = `toggle breakpoint on line ${lineno}`;
      gutter.addEventListener("click", () => {
        void this.controller.toggleBreakpoint(lineno);
      });

      const number = document.createElement("span");
      number.className = "ir-lineno";
      number.textContent = String(lineno).padStart(3, " ");

      const code = document.createElement("span");
      code.className = "ir-code";
      code.textContent = text;
      const unit = this.unitAtLine(state, lineno);
      if (unit) {
        code.classList.add("ir-statement");
        code.addEventListener("click", () => {
          void this.controller.focusUnit(unit);
        });
      }

      row.append(gutter, number, code);
      this.root.appendChild(row);
    });
  }
}
