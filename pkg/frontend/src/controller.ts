/**
 * Glue between the protocol client and the view state: every user
 * action is a server round-trip, and state changes only on the server's
 * answer (optimistic updates are forbidden; the server is the source of
 * truth for breakpoints, facts, and focus).
 */

import { DebugClient, RequestFailed } from "./client.js";
import {
  FactsUpdatedBody,
  GraphPayload,
  ResultsBody,
  SuspendedBody,
  UnitInfoBody,
} from "./protocol.js";
import { Store } from "./state.js";

export class UiController {
  constructor(
    readonly client: DebugClient,
    readonly store: Store,
  ) {
    client.onEvent("suspended", (event) =>
      store.applySuspended(event.body as unknown as SuspendedBody),
    );
    client.onEvent("factsUpdated", (event) =>
      store.applyFactsUpdated(event.body as unknown as FactsUpdatedBody),
    );
    client.onEvent("fixpoint", (event) =>
      store.applyFixpoint(event.body as unknown as { seq: number; reason: string }),
    );
    client.onEvent("focusChanged", (event) =>
      store.applyFocusChanged(String(event.body.unit)),
    );
    client.onEvent("log", (event) =>
      store.applyLogLines((event.body.lines as string[]) ?? []),
    );
    client.onClose(() =>
      store.update((state) => {
        state.connection = "disconnected";
      }),
    );
  }

  async load(programText: string, analysis: string, taintConfig?: string) {
    const body = await this.client.request("load", {
      program: programText,
      analysis,
      ...(taintConfig ? { taintConfig } : {}),
    });
    this.store.update((state) => {
      state.connection = "connected";
      state.programText = programText;
      state.methods = body.methods as string[];
      state.analysis = String(body.analysis);
      state.seq = 0;
      state.focused = null;
      state.currentUnit = null;
      state.finished = false;
      state.breakpoints = [];
      state.edgeLabels = new Map();
      state.banner = null;
      state.leaks = [];
      state.eventLog = [];
    });
    await this.client.request("subscribe");
    await this.refreshGraph();
    return body;
  }

  async refreshGraph(method?: string) {
    const args: Record<string, unknown> = { target: "cfg" };
    if (method) args.method = method;
    const payload = (await this.client.request(
      "graph",
      args,
    )) as unknown as GraphPayload;
    this.store.applyGraph(payload, method ?? payload.method ?? null);
    return payload;
  }

  async refreshResults() {
    const body = (await this.client.request("results")) as unknown as ResultsBody;
    this.store.applyResults(body);
    return body;
  }

  async step(granularity: string) {
    return this.client.request("step", { granularity });
  }

  async resume() {
    return this.client.request("resume");
  }

  async rewind(seq: number) {
    this.store.armRewind();
    try {
      return await this.client.request("rewind", { seq });
    } catch (err) {
      this.store.disarmRewind(); // rejected rewind must not admit stale seqs
      throw err;
    }
  }

  /**
   * Breakpoint gutter click: toggles via a server round-trip; the
   * marker list changes only on an ok response. Unresolvable lines
   * surface the server's nearest-lines hint as a toast.
   */
  async toggleBreakpoint(line: number): Promise<boolean> {
    const existing = this.store.state.breakpoints.find((bp) => bp.line === line);
    if (existing) {
      await this.client.request("removeBreakpoint", { id: existing.id });
      this.store.update((state) => {
        state.breakpoints = state.breakpoints.filter((bp) => bp.id !== existing.id);
      });
      return false;
    }
    try {
      const body = await this.client.request("setBreakpoint", { line });
      this.store.update((state) => {
        state.breakpoints.push({
          id: body.id as number,
          unit: (body.unit as string) ?? null,
          line: (body.line as number) ?? null,
        });
      });
      return true;
    } catch (err) {
      if (err instanceof RequestFailed) {
        const nearest = err.error.nearest ?? [];
        const hint = nearest.length
          ? `; nearest statement lines: ${nearest.join(", ")}`
          : "";
        this.store.showToast(`no statement on line ${line}${hint}`);
        return false;
      }
      throw err;
    }
  }

  async setUnitBreakpoint(unit: string) {
    const body = await this.client.request("setBreakpoint", { unit });
    this.store.update((state) => {
      state.breakpoints.push({
        id: body.id as number,
        unit: (body.unit as string) ?? null,
        line: (body.line as number) ?? null,
      });
    });
    return body;
  }

  /** Selecting a unit in any panel focuses it everywhere (and tells the
   * server, so sibling views follow). */
  async focusUnit(unit: string) {
    const body = await this.client.request("setFocus", { unit });
    this.store.update((state) => {
      state.focused = unit;
    });
    if (body.changed) {
      await this.inspectUnit(unit);
    }
    return body;
  }

  async inspectUnit(unit: string) {
    const info = (await this.client.request("unitInfo", {
      unit,
    })) as unknown as UnitInfoBody;
    this.store.update((state) => {
      state.unitInfo = info;
    });
    return info;
  }

  async selectEdge(edgeId: string) {
    const body = await this.client.request("history", { id: edgeId });
    this.store.update((state) => {
      state.selectedHistory = body as unknown as {
        id: string;
        histories: { edge: string; entries: [number, string][] }[];
      };
    });
    return body;
  }

  async inspectEdge(edgeId: string): Promise<string> {
    const body = await this.client.request("inspectEdge", { edge: edgeId });
    return String(body.facts);
  }
}
