/** Test doubles and node-side plumbing shared by the frontend tests. */

import { spawn, ChildProcess } from "node:child_process";
import * as net from "node:net";
import * as path from "node:path";
import { Transport } from "../src/client.js";

/** Scripted transport: ops are answered by canned handlers; pushed
 * events are injected manually. */
export class FakeTransport implements Transport {
  lineHandlers: ((line: string) => void)[] = [];
  closeHandlers: (() => void)[] = [];
  sent: { id: string; op: string; args: Record<string, unknown> }[] = [];
  handlers = new Map<
    string,
    (args: Record<string, unknown>) =>
      | { ok: true; body: Record<string, unknown> }
      | { ok: false; error: Record<string, unknown> }
  >();

  respond(op: string, handler: (args: Record<string, unknown>) => Record<string, unknown>) {
    this.handlers.set(op, (args) => ({ ok: true, body: handler(args) }));
  }

  fail(op: string, error: Record<string, unknown>) {
    this.handlers.set(op, () => ({ ok: false, error }));
  }

  send(line: string) {
    const request = JSON.parse(line);
    this.sent.push(request);
    const handler = this.handlers.get(request.op);
    if (!handler) return; // leave the request pending
    const outcome = handler(request.args ?? {});
    const response =
      outcome.ok === true
        ? { id: request.id, ok: true, body: outcome.body }
        : { id: request.id, ok: false, error: outcome.error };
    queueMicrotask(() => this.deliver(JSON.stringify(response)));
  }

  deliver(line: string) {
    for (const cb of this.lineHandlers) cb(line);
  }

  pushEvent(event: string, body: Record<string, unknown>) {
    this.deliver(JSON.stringify({ event, body }));
  }

  onLine(cb: (line: string) => void) {
    this.lineHandlers.push(cb);
  }

  onClose(cb: () => void) {
    this.closeHandlers.push(cb);
  }

  close() {
    for (const cb of this.closeHandlers) cb();
  }
}

/** Raw TCP transport for node-side integration tests. */
export class TcpTransport implements Transport {
  private lineHandlers: ((line: string) => void)[] = [];
  private closeHandlers: (() => void)[] = [];
  private buffer = "";

  private constructor(private socket: net.Socket) {
    socket.on("data", (chunk) => {
      this.buffer += chunk.toString("utf-8");
      let newline;
      while ((newline = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, newline);
        this.buffer = this.buffer.slice(newline + 1);
        for (const cb of this.lineHandlers) cb(line);
      }
    });
    socket.on("close", () => {
      for (const cb of this.closeHandlers) cb();
    });
  }

  static connect(host: string, port: number): Promise<TcpTransport> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () =>
        resolve(new TcpTransport(socket)),
      );
      socket.on("error", reject);
    });
  }

  send(line: string) {
    this.socket.write(line + "\n");
  }

  onLine(cb: (line: string) => void) {
    this.lineHandlers.push(cb);
  }

  onClose(cb: () => void) {
    this.closeHandlers.push(cb);
  }

  close() {
    this.socket.destroy();
  }
}

export const REPO_ROOT = path.resolve(__dirname, "..", "..");

export interface SpawnedServer {
  proc: ChildProcess;
  port: number;
}

/** Start the debug server on an ephemeral port; resolves once it
 * announces the bound address. */
export function spawnServer(): Promise<SpawnedServer> {
  return new Promise((resolve, reject) => {
    const proc = spawn(
      "python3",
      ["-m", "flowdbg.cli", "serve", "--port", "0"],
      { cwd: REPO_ROOT },
    );
    let stderr = "";
    const onData = (chunk: Buffer) => {
      stderr += chunk.toString();
      const match = stderr.match(/listening on [\d.]+:(\d+)/);
      if (match) {
        proc.stderr!.off("data", onData);
        resolve({ proc, port: Number(match[1]) });
      }
    };
    proc.stderr!.on("data", onData);
    proc.on("error", reject);
    proc.on("exit", (code) => {
      if (!stderr.includes("listening")) {
        reject(new Error(`server exited early (code ${code}): ${stderr}`));
      }
    });
    setTimeout(() => reject(new Error(`server did not start: ${stderr}`)), 15_000);
  });
}
