/**
 * UI parity acceptance: driving step/continue from the browser-side
 * controller against the real server reproduces the suspension sequence
 * (unit ids, seqs) of the committed REPL transcript, and every fact
 * string the UI would display is byte-equal to a server rendering.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DebugClient } from "../src/client.js";
import { UiController } from "../src/controller.js";
import { PushEvent } from "../src/protocol.js";
import { Store } from "../src/state.js";
import { REPO_ROOT, spawnServer, SpawnedServer, TcpTransport } from "./helpers.js";

const GOLDEN = path.join(REPO_ROOT, "tests", "golden", "repl_leak_session.txt");
const LEAK = path.join(REPO_ROOT, "corpus", "leak.ir");

interface SuspensionObs {
  unit: string;
  seq: number;
  inFacts: string;
}

function goldenSuspensions(): SuspensionObs[] {
  const text = fs.readFileSync(GOLDEN, "utf-8");
  const out: SuspensionObs[] = [];
  const pattern = /suspended at (\S+) \(line \d+\) seq (\d+) reason \S+.*? in=(\S+)/g;
  let match;
  while ((match = pattern.exec(text)) !== null) {
    out.push({ unit: match[1]!, seq: Number(match[2]), inFacts: match[3]! });
  }
  return out;
}

function onceEvent(client: DebugClient, names: string[]): Promise<PushEvent> {
  return new Promise((resolve) => {
    let done = false;
    for (const name of names) {
      client.onEvent(name, (event) => {
        if (!done) {
          done = true;
          resolve(event);
        }
      });
    }
  });
}

describe("UI parity with the REPL golden transcript", () => {
  let server: SpawnedServer;

  beforeAll(async () => {
    server = await spawnServer();
  }, 30_000);

  afterAll(() => {
    server.proc.kill();
  });

  it("reproduces the suspension sequence and server fact strings", async () => {
    const golden = goldenSuspensions();
    expect(golden).toEqual([
      { unit: "main#0", seq: 2, inFacts: "{}" },
      { unit: "main#2", seq: 10, inFacts: "{x}" },
      { unit: "main#2", seq: 10, inFacts: "{x}" },
    ]);

    const transport = await TcpTransport.connect("127.0.0.1", server.port);
    const store = new Store();
    const client = new DebugClient(transport);
    const controller = new UiController(client, store);

    const observed: SuspensionObs[] = [];
    let lastBanner: unknown = null;
    store.subscribe((state) => {
      const banner = state.banner;
      if (
        banner &&
        banner !== lastBanner &&
        banner.state === "suspended" &&
        banner.unit !== null &&
        banner.inFacts !== null
      ) {
        observed.push({
          unit: banner.unit,
          seq: banner.seq,
          inFacts: banner.inFacts,
        });
      }
      lastBanner = banner;
    });

    await controller.load(fs.readFileSync(LEAK, "utf-8"), "taint");

    // the same walk as the golden REPL script: s / b 3 / c / rw 0 / c
    let suspended = onceEvent(client, ["suspended", "fixpoint"]);
    await controller.step("transfer");
    await suspended;

    await controller.toggleBreakpoint(3);

    suspended = onceEvent(client, ["suspended", "fixpoint"]);
    await controller.resume();
    await suspended;

    suspended = onceEvent(client, ["suspended", "fixpoint"]);
    await controller.rewind(0);
    await suspended;

    suspended = onceEvent(client, ["suspended", "fixpoint"]);
    await controller.resume();
    await suspended;

    expect(observed).toEqual(golden);

    // every fact string the panels would show is byte-equal to the
    // server's rendering of the same edge
    await controller.refreshGraph("main");
    await controller.refreshResults();
    expect(store.state.edgeLabels.size).toBeGreaterThan(0);
    for (const [edgeId, entry] of store.state.edgeLabels) {
      const serverFacts = await controller.inspectEdge(edgeId);
      expect(entry.label).toBe(serverFacts);
    }
    // the graph payload's own labels agree as well
    for (const edge of store.state.graph?.edges ?? []) {
      const serverFacts = await controller.inspectEdge(edge.id);
      expect(store.state.edgeLabels.get(edge.id)?.label).toBe(serverFacts);
    }

    client.close();
  }, 30_000);

  it("rewind resets every displayed label to the bottom rendering", async () => {
    const transport = await TcpTransport.connect("127.0.0.1", server.port);
    const store = new Store();
    const client = new DebugClient(transport);
    const controller = new UiController(client, store);
    await controller.load(fs.readFileSync(LEAK, "utf-8"), "taint");

    let settle = onceEvent(client, ["fixpoint"]);
    await controller.step("to-fixpoint");
    await settle;
    expect(store.state.finished).toBe(true);
    expect([...store.state.edgeLabels.values()].some((e) => e.label !== "{}")).toBe(
      true,
    );

    settle = onceEvent(client, ["suspended"]);
    await controller.rewind(0);
    await settle;
    expect(store.state.seq).toBe(0);
    for (const entry of store.state.edgeLabels.values()) {
      expect(entry.label).toBe("{}");
    }
    client.close();
  }, 30_000);
});
