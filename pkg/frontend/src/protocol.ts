/**
 * Wire types for the flowdbg session protocol: newline-delimited JSON,
 * requests answered by exactly one response, plus server-push events.
 * Field names match the server exactly.
 */

export interface Request {
  id: string;
  op: string;
  args: Record<string, unknown>;
}

export interface OkResponse {
  id: string;
  ok: true;
  body: Record<string, unknown>;
}

export interface ErrorBody {
  kind: string;
  message: string;
  nearest?: number[];
  offset?: number;
  [key: string]: unknown;
}

export interface ErrResponse {
  id: string;
  ok: false;
  error: ErrorBody;
}

export type Response = OkResponse | ErrResponse;

export interface PushEvent {
  event: string;
  body: Record<string, unknown>;
}

export type ServerMessage = Response | PushEvent;

export interface GraphNode {
  id: string;
  kind: string;
  text: string;
  line: number;
}

export interface GraphEdge {
  id: string;
  src: string;
  dst: string;
  kind: string;
  label: string;
  iteration: number;
}

export interface GraphPayload {
  seq: number;
  method?: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface SuspendedBody {
  seq: number;
  reason: string;
  state: string;
  unit: string | null;
  line: number | null;
  method: string | null;
  iteration: number;
  in: string | null;
  out: string | null;
  gen: string[];
  kill: string[];
  breakpoints: number[];
}

export interface FactsUpdatedBody {
  seq: number;
  edges: { edge: string; facts: string; iteration: number }[];
}

export interface ResultsBody {
  seq: number;
  state: string;
  methods: {
    method: string;
    edges: { edge: string; facts: string; iteration: number }[];
  }[];
  leaks: { unit: string; var: string }[];
}

export interface UnitInfoBody {
  id: string;
  kind: string;
  text: string;
  line: number;
  defs: string[];
  uses: string[];
  callee: string | null;
  operands: string[];
  successors: { kind: string; dst: string }[];
}

export function encodeRequest(request: Request): string {
  return JSON.stringify(request);
}

export function decodeMessage(line: string): ServerMessage {
  const raw = JSON.parse(line) as Record<string, unknown>;
  if (typeof raw === "object" && raw !== null && "event" in raw) {
    return { event: String(raw.event), body: (raw.body ?? {}) as Record<string, unknown> };
  }
  return raw as unknown as Response;
}

export function isEvent(msg: ServerMessage): msg is PushEvent {
  return "event" in msg;
}
