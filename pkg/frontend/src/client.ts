/**
 * Protocol client: request/response correlation over any line transport.
 *
 * The transport is deliberately tiny so the same client runs in the
 * browser (WebSocket bridge) and under node (raw TCP in tests).
 */

import {
  decodeMessage,
  encodeRequest,
  ErrorBody,
  isEvent,
  PushEvent,
  ServerMessage,
} from "./protocol.js";

export interface Transport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class RequestFailed extends Error {
  readonly error: ErrorBody;

  constructor(op: string, error: ErrorBody) {
    super(`${op}: ${error.kind}: ${error.message}`);
    this.error = error;
  }
}

type EventHandler = (event: PushEvent) => void;

export class DebugClient {
  private nextId = 1;
  private pending = new Map<string, { op: string; resolve: (body: Record<string, unknown>) => void; reject: (err: Error) => void }>();
  private eventHandlers = new Map<string, EventHandler[]>();
  private closeHandlers: (() => void)[] = [];

  constructor(private transport: Transport) {
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => {
      for (const { reject, op } of this.pending.values()) {
        reject(new RequestFailed(op, { kind: "disconnected", message: "connection closed" }));
      }
      this.pending.clear();
      for (const cb of this.closeHandlers) cb();
    });
  }

  private handleLine(line: string) {
    if (!line.trim()) return;
    let msg: ServerMessage;
    try {
      msg = decodeMessage(line);
    } catch {
      return; // not ours to crash the view over
    }
    if (isEvent(msg)) {
      for (const handler of this.eventHandlers.get(msg.event) ?? []) handler(msg);
      for (const handler of this.eventHandlers.get("*") ?? []) handler(msg);
      return;
    }
    const waiter = this.pending.get(msg.id);
    if (!waiter) return;
    this.pending.delete(msg.id);
    if (msg.ok) waiter.resolve(msg.body);
    else waiter.reject(new RequestFailed(waiter.op, msg.error));
  }

  /** Send one request; resolves with the response body, rejects with
   * RequestFailed carrying the server's error object. */
  request(op: string, args: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    const id = String(this.nextId++);
    const line = encodeRequest({ id, op, args });
    return new Promise((resolve, reject) => {
      this.pending.set(id, { op, resolve, reject });
      this.transport.send(line);
    });
  }

  onEvent(name: string, handler: EventHandler) {
    const handlers = this.eventHandlers.get(name) ?? [];
    handlers.push(handler);
    this.eventHandlers.set(name, handlers);
  }

  onClose(cb: () => void) {
    this.closeHandlers.push(cb);
  }

  close() {
    this.transport.close();
  }
}

/** Browser transport: a WebSocket whose messages are protocol lines
 * (the bridge relays them to the TCP server verbatim). */
export class WebSocketTransport implements Transport {
  private lineHandlers: ((line: string) => void)[] = [];
  private closeHandlers: (() => void)[] = [];

  private constructor(private socket: WebSocket) {
    socket.onmessage = (msg) => {
      for (const part of String(msg.data).split("\n")) {
        if (!part) continue;
        for (const cb of this.lineHandlers) cb(part);
      }
    };
    socket.onclose = () => {
      for (const cb of this.closeHandlers) cb();
    };
  }

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const socket = new WebSocket(url);
      socket.onopen = () => resolve(new WebSocketTransport(socket));
      socket.onerror = () => reject(new Error(`cannot connect to ${url}`));
    });
  }

  send(line: string) {
    this.socket.send(line + "\n");
  }

  onLine(cb: (line: string) => void) {
    this.lineHandlers.push(cb);
  }

  onClose(cb: () => void) {
    this.closeHandlers.push(cb);
  }

  close() {
    this.socket.close();
  }
}
