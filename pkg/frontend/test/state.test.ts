import { describe, expect, it } from "vitest";

import { LABEL_LIMIT, Store, truncateLabel } from "../src/state.js";
import { SuspendedBody } from "../src/protocol.js";

function suspended(seq: number, unit: string | null): SuspendedBody {
  return {
    seq,
    reason: "step",
    state: "suspended",
    unit,
    line: unit ? 1 : null,
    method: "main",
    iteration: 1,
    in: "{}",
    out: "{x}",
    gen: ["x"],
    kill: [],
    breakpoints: [],
  };
}

describe("ViewState store", () => {
  it("applies suspensions to banner, seq, and current unit", () => {
    const store = new Store();
    store.applySuspended(suspended(2, "main#0"));
    expect(store.state.seq).toBe(2);
    expect(store.state.currentUnit).toBe("main#0");
    expect(store.state.banner?.inFacts).toBe("{}");
    expect(store.state.banner?.outFacts).toBe("{x}");
  });

  it("never lets seq decrease without a rewind", () => {
    const store = new Store();
    store.applySuspended(suspended(10, "main#2"));
    store.applySuspended(suspended(2, "main#0")); // stale push
    expect(store.state.seq).toBe(10);
    expect(store.state.currentUnit).toBe("main#2");
  });

  it("accepts a lower seq once a rewind is armed", () => {
    const store = new Store();
    store.applySuspended(suspended(10, "main#2"));
    store.armRewind();
    store.applySuspended(suspended(0, null));
    expect(store.state.seq).toBe(0);
    // the arm is consumed: further stale pushes are dropped again
    store.applySuspended(suspended(5, "main#1"));
    store.applySuspended(suspended(1, "main#0"));
    expect(store.state.seq).toBe(5);
  });

  it("disarmRewind cancels a failed rewind", () => {
    const store = new Store();
    store.applySuspended(suspended(10, "main#2"));
    store.armRewind();
    store.disarmRewind();
    store.applySuspended(suspended(0, null));
    expect(store.state.seq).toBe(10);
  });

  it("factsUpdated patches only the listed edges", () => {
    const store = new Store();
    store.applyFactsUpdated({
      seq: 4,
      edges: [
        { edge: "main#0->main#1", facts: "{x}", iteration: 1 },
        { edge: "main#1->main#2", facts: "{x}", iteration: 2 },
      ],
    });
    store.applyFactsUpdated({
      seq: 8,
      edges: [{ edge: "main#1->main#2", facts: "{x,y}", iteration: 3 }],
    });
    expect(store.state.edgeLabels.get("main#0->main#1")?.label).toBe("{x}");
    expect(store.state.edgeLabels.get("main#1->main#2")?.label).toBe("{x,y}");
    expect(store.state.edgeLabels.get("main#1->main#2")?.iteration).toBe(3);
  });

  it("fixpoint marks the session finished", () => {
    const store = new Store();
    store.applySuspended(suspended(2, "main#0"));
    store.applyFixpoint({ seq: 16, reason: "fixpoint" });
    expect(store.state.finished).toBe(true);
    expect(store.state.seq).toBe(16);
    expect(store.state.banner?.state).toBe("finished");
    expect(store.state.currentUnit).toBeNull();
  });

  it("focusChanged moves the shared focus", () => {
    const store = new Store();
    store.applyFocusChanged("main#2");
    expect(store.state.focused).toBe("main#2");
  });

  it("notifies subscribers on every change", () => {
    const store = new Store();
    let calls = 0;
    store.subscribe(() => calls++);
    store.applySuspended(suspended(2, "main#0"));
    store.showToast("oops");
    store.clearToast();
    expect(calls).toBe(3);
  });
});

describe("label truncation", () => {
  it("passes short labels through verbatim", () => {
    expect(truncateLabel("{x,y}")).toBe("{x,y}");
  });

  it("truncates past the limit with an ellipsis", () => {
    const long = "{" + "a".repeat(60) + "}";
    const shown = truncateLabel(long);
    expect(shown.length).toBe(LABEL_LIMIT);
    expect(shown.endsWith("…")).toBe(true);
    expect(long.startsWith(shown.slice(0, -1))).toBe(true);
  });
});
