/**
 * The single view state every panel renders from.
 *
 * Two hard rules, both load-bearing for trustworthy debugging:
 *  - the UI never computes facts; every displayed fact string arrived
 *    verbatim from the server (edge labels, banner in/out, histories)
 *  - the session seq never moves backwards except through an explicit
 *    rewind action; stale pushes that would regress it are dropped
 */

import {
  FactsUpdatedBody,
  GraphPayload,
  ResultsBody,
  SuspendedBody,
  UnitInfoBody,
} from "./protocol.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

export interface BreakpointMark {
  id: number;
  unit: string | null;
  line: number | null;
}

export interface EdgeLabel {
  label: string;
  iteration: number;
}

export interface Banner {
  seq: number;
  state: string;
  reason: string;
  unit: string | null;
  line: number | null;
  iteration: number;
  inFacts: string | null;
  outFacts: string | null;
  gen: string[];
  kill: string[];
}

export interface HistorySelection {
  id: string;
  histories: { edge: string; entries: [number, string][] }[];
}

export interface ViewState {
  connection: ConnectionStatus;
  programText: string;
  methods: string[];
  analysis: string | null;
  seq: number;
  focused: string | null;
  currentUnit: string | null;
  graph: GraphPayload | null;
  graphMethod: string | null;
  edgeLabels: Map<string, EdgeLabel>;
  breakpoints: BreakpointMark[];
  selectedHistory: HistorySelection | null;
  unitInfo: UnitInfoBody | null;
  banner: Banner | null;
  finished: boolean;
  leaks: { unit: string; var: string }[];
  toast: string | null;
  eventLog: string[];
  nodeColorOverrides: Map<string, string>;
}

export function initialState(): ViewState {
  return {
    connection: "disconnected",
    programText: "",
    methods: [],
    analysis: null,
    seq: 0,
    focused: null,
    currentUnit: null,
    graph: null,
    graphMethod: null,
    edgeLabels: new Map(),
    breakpoints: [],
    selectedHistory: null,
    unitInfo: null,
    banner: null,
    finished: false,
    leaks: [],
    toast: null,
    eventLog: [],
    nodeColorOverrides: new Map(),
  };
}

type Listener = (state: ViewState) => void;

export class Store {
  state: ViewState = initialState();
  private listeners: Listener[] = [];
  private rewindArmed = false;

  subscribe(listener: Listener) {
    this.listeners.push(listener);
  }

  private notify() {
    for (const listener of this.listeners) listener(this.state);
  }

  update(mutate: (state: ViewState) => void) {
    mutate(this.state);
    this.notify();
  }

  /** Rewind is the one legal way for seq to decrease. */
  armRewind() {
    this.rewindArmed = true;
  }

  disarmRewind() {
    this.rewindArmed = false;
  }

  private acceptSeq(seq: number): boolean {
    if (seq >= this.state.seq) {
      this.state.seq = seq;
      return true;
    }
    if (this.rewindArmed) {
      this.state.seq = seq;
      return true;
    }
    return false; // stale push from before the current state
  }

  applySuspended(body: SuspendedBody) {
    this.update((state) => {
      if (!this.acceptSeq(body.seq)) return;
      this.rewindArmed = false;
      state.currentUnit = body.unit;
      state.finished = false;
      state.banner = {
        seq: body.seq,
        state: body.state,
        reason: body.reason,
        unit: body.unit,
        line: body.line,
        iteration: body.iteration,
        inFacts: body.in,
        outFacts: body.out,
        gen: body.gen ?? [],
        kill: body.kill ?? [],
      };
    });
  }

  applyFactsUpdated(body: FactsUpdatedBody) {
    this.update((state) => {
      if (!this.acceptSeq(body.seq)) return;
      // refresh only the changed labels; untouched edges keep their strings
      for (const entry of body.edges) {
        state.edgeLabels.set(entry.edge, {
          label: entry.facts,
          iteration: entry.iteration,
        });
      }
    });
  }

  applyFixpoint(body: { seq: number; reason: string }) {
    this.update((state) => {
      if (!this.acceptSeq(body.seq)) return;
      this.rewindArmed = false;
      state.finished = true;
      state.currentUnit = null;
      state.banner = {
        seq: body.seq,
        state: "finished",
        reason: body.reason,
        unit: null,
        line: null,
        iteration: 0,
        inFacts: null,
        outFacts: null,
        gen: [],
        kill: [],
      };
    });
  }

  applyFocusChanged(unit: string) {
    this.update((state) => {
      state.focused = unit;
    });
  }

  applyLogLines(lines: string[]) {
    this.update((state) => {
      state.eventLog.push(...lines);
    });
  }

  applyGraph(payload: GraphPayload, method: string | null) {
    this.update((state) => {
      this.acceptSeq(payload.seq);
      state.graph = payload;
      state.graphMethod = method;
      for (const edge of payload.edges) {
        state.edgeLabels.set(edge.id, {
          label: edge.label,
          iteration: edge.iteration,
        });
      }
    });
  }

  applyResults(body: ResultsBody) {
    this.update((state) => {
      this.acceptSeq(body.seq);
      state.leaks = body.leaks;
      for (const method of body.methods) {
        for (const entry of method.edges) {
          state.edgeLabels.set(entry.edge, {
            label: entry.facts,
            iteration: entry.iteration,
          });
        }
      }
    });
  }

  showToast(message: string) {
    this.update((state) => {
      state.toast = message;
    });
  }

  clearToast() {
    this.update((state) => {
      state.toast = null;
    });
  }
}

/** Edge labels longer than this are truncated in the graph; the full
 * server string stays available on hover. */
export const LABEL_LIMIT = 40;

export function truncateLabel(label: string): string {
  if (label.length <= LABEL_LIMIT) return label;
  return label.slice(0, LABEL_LIMIT - 1) + "…";
}
