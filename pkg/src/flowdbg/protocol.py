"""Line-delimited JSON protocol exposing debug sessions to clients.

Wire format: UTF-8, one JSON object per line. Clients send Requests
{"id", "op", "args"}; the server answers each with exactly one Response
{"id", "ok", "body"|"error"} and pushes Events {"event", "body"}. A
Response to a state-changing request is written before any event that
request caused, and events seen by one client are ordered by session
seq.

One connection owns one session (created by the load op). factsUpdated
pushes are batched per suspension: one event lists every edge changed
since the previous suspension. A connection that issues `subscribe`
additionally receives events from other connections' sessions;
focusChanged goes to subscribers only, never back to the originator.

Transports: TCP (default port 7737) and stdio for editor embedding.
"""

from __future__ import annotations

import json
import socketserver
import threading
from dataclasses import dataclass

from . import debug
from .analyses import TaintConfigError, parse_taint_config
from .graphs import EdgeNotFoundError, build_call_graph
from .ir import MethodNotFoundError, UnitNotFoundError, unit_info
from .parser import ParseError, parse_program
from .registry import UnknownAnalysisError
from .solver import AnalysisMisuseError

DEFAULT_PORT = 7737

OPS = (
    "load",
    "setBreakpoint",
    "removeBreakpoint",
    "step",
    "resume",
    "rewind",
    "inspectEdge",
    "history",
    "unitInfo",
    "graph",
    "results",
    "setFocus",
    "subscribe",
)


@dataclass(frozen=True)
class Request:
    id: str
    op: str
    args: dict


@dataclass(frozen=True)
class Response:
    id: str | None
    ok: bool
    body: dict | None = None
    error: dict | None = None

    def to_wire(self) -> dict:
        out = {"id": self.id, "ok": self.ok}
        if self.ok:
            out["body"] = self.body or {}
        else:
            out["error"] = self.error or {}
        return out


@dataclass(frozen=True)
class Event:
    event: str
    body: dict

    def to_wire(self) -> dict:
        return {"event": self.event, "body": self.body}


def encode(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class ProtocolError(Exception):
    def __init__(self, kind: str, message: str, **details):
        super().__init__(message)
        self.kind = kind
        self.details = {"kind": kind, "message": message, **details}


def decode_request(line: str) -> Request:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError("parse", f"malformed message: {exc.msg}", offset=exc.pos)
    if not isinstance(raw, dict):
        raise ProtocolError("parse", "message must be an object", offset=0)
    op = raw.get("op")
    if not isinstance(op, str):
        raise ProtocolError("bad-args", "missing op")
    args = raw.get("args") or {}
    if not isinstance(args, dict):
        raise ProtocolError("bad-args", "args must be an object")
    return Request(id=raw.get("id"), op=op, args=args)


def request_wire(request: Request) -> dict:
    return {"id": request.id, "op": request.op, "args": request.args}


_ERROR_KINDS = [
    (ParseError, "parse-program"),
    (UnknownAnalysisError, "unknown-analysis"),
    (UnitNotFoundError, "not-found"),
    (EdgeNotFoundError, "not-found"),
    (MethodNotFoundError, "not-found"),
    (debug.SeqRangeError, "range"),
    (debug.IterationRangeError, "range"),
    (debug.SessionFinishedError, "finished"),
    (debug.BreakpointResolutionError, "bad-line"),
    (debug.BadBreakpointError, "bad-breakpoint"),
    (debug.DeterminismError, "internal-determinism"),
    (debug.SessionMisuseError, "misuse"),
    (AnalysisMisuseError, "misuse"),
    (TaintConfigError, "bad-args"),
    (debug.DebugError, "debug"),
    (ValueError, "bad-args"),
]


def _error_details(exc: Exception) -> dict:
    for klass, kind in _ERROR_KINDS:
        if isinstance(exc, klass):
            details = {"kind": kind, "message": str(exc)}
            if isinstance(exc, debug.BreakpointResolutionError):
                details["nearest"] = [n for n in exc.nearest if n is not None]
            if isinstance(exc, ParseError):
                details["line"] = exc.line
                details["col"] = exc.col
            return details
    return {"kind": "internal", "message": str(exc)}


class Connection:
    """One client connection: request dispatch plus event delivery.

    write_line must be safe to call from other threads (broadcasts); the
    TCP transport wraps it in a lock.
    """

    def __init__(self, hub: "Hub", write_line):
        self.hub = hub
        self.write_line = write_line
        self.session: debug.DebugSession | None = None
        self.subscribed = False
        self._log_cursor = 0

    # -- outgoing ------------------------------------------------------------

    def send(self, payload: dict):
        self.write_line(encode(payload))

    def send_event(self, event: Event):
        self.send(event.to_wire())

    # -- incoming ------------------------------------------------------------

    def handle_line(self, line: str):
        line = line.strip()
        if not line:
            return
        events: list[Event] = []
        try:
            request = decode_request(line)
        except ProtocolError as exc:
            self.send(Response(None, False, error=exc.details).to_wire())
            return
        try:
            handler = getattr(self, "_op_" + request.op, None)
            if handler is None or request.op not in OPS:
                raise ProtocolError("unknown-op", f"unknown op: {request.op}")
            body = handler(request.args, events)
            response = Response(request.id, True, body=body)
        except ProtocolError as exc:
            response = Response(request.id, False, error=exc.details)
            events = []
        except Exception as exc:  # mapped domain errors
            response = Response(request.id, False, error=_error_details(exc))
            events = []
        self.send(response.to_wire())
        for event in events:
            if event.event == "focusChanged":
                self.hub.broadcast(self, event, include_origin=False)
            else:
                self.send_event(event)
                self.hub.broadcast(self, event, include_origin=False, subscribers_only=True)

    # -- op helpers ------------------------------------------------------------

    def _require_session(self) -> debug.DebugSession:
        if self.session is None:
            raise ProtocolError("no-session", "no program loaded; send load first")
        return self.session

    def _suspension_events(self, report: debug.Suspension, events: list[Event]):
        session = self.session
        new_lines = session.canonical_lines()[self._log_cursor:]
        if new_lines:
            events.append(
                Event("log", {"from": self._log_cursor, "lines": new_lines})
            )
        self._log_cursor = len(session.log)
        events.append(
            Event(
                "factsUpdated",
                {
                    "seq": report.seq,
                    "edges": [
                        {"edge": eid, "facts": facts, "iteration": iteration}
                        for eid, facts, iteration in report.changed_edges
                    ],
                },
            )
        )
        if report.state == debug.FINISHED:
            events.append(
                Event("fixpoint", {"seq": report.seq, "reason": report.reason})
            )
        else:
            events.append(
                Event(
                    "suspended",
                    {
                        "seq": report.seq,
                        "reason": report.reason,
                        "state": report.state,
                        "unit": report.unit,
                        "line": report.line,
                        "method": report.method,
                        "iteration": report.iteration,
                        "in": report.in_text,
                        "out": report.out_text,
                        "gen": list(report.gen),
                        "kill": list(report.kill),
                        "breakpoints": list(report.breakpoint_ids),
                    },
                )
            )

    def _suspension_body(self, report: debug.Suspension) -> dict:
        return {"state": report.state, "seq": report.seq, "reason": report.reason}

    # -- ops ---------------------------------------------------------------

    def _op_load(self, args: dict, events: list[Event]) -> dict:
        text = args.get("program")
        if not isinstance(text, str):
            raise ProtocolError("bad-args", "load needs args.program (IR text)")
        analysis = args.get("analysis", "taint")
        taint_config = None
        if args.get("taintConfig"):
            taint_config = parse_taint_config(args["taintConfig"])
        program = parse_program(text, entry=args.get("entry"))
        budget = args.get("budget") or debug.DEFAULT_BUDGET
        self.session = debug.start(
            program, analysis, taint_config=taint_config, budget=budget
        )
        self._log_cursor = 0
        return {
            "methods": [m.name for m in program.methods],
            "units": sum(len(m.units) for m in program.methods),
            "analysis": self.session.analysis.name,
            "entry": program.entry,
        }

    def _op_setBreakpoint(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        event = None
        if args.get("event") is not None:
            spec = args["event"]
            if not isinstance(spec, dict) or "kind" not in spec:
                raise ProtocolError("bad-args", "event breakpoint needs {kind, arg}")
            event = (spec.get("kind"), spec.get("arg"))
        bp = session.set_breakpoint(
            unit=args.get("unit"), line=args.get("line"), event=event
        )
        return {"id": bp.id, "kind": bp.kind, "unit": bp.unit, "line": bp.line}

    def _op_removeBreakpoint(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        if "id" not in args:
            raise ProtocolError("bad-args", "removeBreakpoint needs args.id")
        return {"removed": session.remove_breakpoint(args["id"])}

    def _op_step(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        report = session.step(args.get("granularity", "transfer"))
        self._suspension_events(report, events)
        return self._suspension_body(report)

    def _op_resume(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        report = session.resume()
        self._suspension_events(report, events)
        return self._suspension_body(report)

    def _op_rewind(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        if "seq" not in args:
            raise ProtocolError("bad-args", "rewind needs args.seq")
        report = session.rewind(int(args["seq"]))
        self._log_cursor = 0
        events.append(
            Event(
                "factsUpdated",
                {
                    "seq": report.seq,
                    "edges": [
                        {"edge": eid, "facts": facts, "iteration": iteration}
                        for eid, facts, iteration in report.changed_edges
                    ],
                },
            )
        )
        events.append(
            Event(
                "suspended",
                {
                    "seq": report.seq,
                    "reason": report.reason,
                    "state": report.state,
                    "unit": report.unit,
                    "line": report.line,
                    "method": report.method,
                    "iteration": report.iteration,
                    "in": report.in_text,
                    "out": report.out_text,
                    "gen": [],
                    "kill": [],
                    "breakpoints": [],
                },
            )
        )
        self._log_cursor = len(session.log)
        return self._suspension_body(report)

    def _op_inspectEdge(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        edge = args.get("edge")
        if not isinstance(edge, str):
            raise ProtocolError("bad-args", "inspectEdge needs args.edge")
        at = args.get("at")
        facts = session.inspect_edge(edge, at=at)
        return {"edge": edge, "facts": session.analysis.lattice.render(facts)}

    def _op_history(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        target = args.get("id")
        if not isinstance(target, str):
            raise ProtocolError("bad-args", "history needs args.id (edge or unit)")
        lat = session.analysis.lattice
        histories = session.history(target)
        return {
            "id": target,
            "histories": [
                {
                    "edge": eid,
                    "entries": [[it, lat.render(facts)] for it, facts in entries],
                }
                for eid, entries in sorted(histories.items())
            ],
        }

    def _op_unitInfo(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        uid = args.get("unit")
        if not isinstance(uid, str):
            raise ProtocolError("bad-args", "unitInfo needs args.unit")
        info = unit_info(session.program, uid)
        return {
            "id": info.id,
            "kind": info.kind,
            "text": info.text,
            "line": info.source_line,
            "defs": list(info.defs),
            "uses": list(info.uses),
            "callee": info.callee,
            "operands": list(info.operands),
            "successors": [
                {"kind": kind, "dst": dst} for kind, dst in info.successors
            ],
        }

    def _op_graph(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        target = args.get("target", "cfg")
        if target == "callgraph":
            return self._callgraph_payload(session)
        if target != "cfg":
            raise ProtocolError("bad-args", "graph target must be cfg or callgraph")
        method = args.get("method") or session.program.entry
        if method not in session.cfgs:
            raise MethodNotFoundError(method)
        return self._cfg_payload(session, method)

    def _cfg_payload(self, session: debug.DebugSession, method: str) -> dict:
        cfg = session.cfgs[method]
        lat = session.analysis.lattice
        nodes = [
            {
                "id": uid,
                "kind": cfg.units[uid].kind,
                "text": cfg.units[uid].text,
                "line": cfg.units[uid].source_line,
            }
            for uid in cfg.nodes
        ]
        edges = [
            {
                "src": e.src,
                "dst": e.dst,
                "kind": e.kind,
                "label": lat.render(session.edge_facts()[cfg.edge_ids[e]]),
                "iteration": session._edge_iteration[cfg.edge_ids[e]],
                "id": cfg.edge_ids[e],
            }
            for e in cfg.edges
        ]
        return {"seq": session.seq, "method": method, "nodes": nodes, "edges": edges}

    def _callgraph_payload(self, session: debug.DebugSession) -> dict:
        cg = build_call_graph(session.program)
        nodes = [
            {
                "id": name,
                "kind": "method",
                "text": f"{name}({', '.join(session.program.method(name).params)})",
                "line": session.program.method(name).source_line,
            }
            for name in cg.nodes
        ]
        nodes.extend(
            {"id": name, "kind": "external", "text": name, "line": 0}
            for name in cg.externals
        )
        edges = [
            {
                "src": e.caller,
                "dst": e.callee,
                "kind": "call",
                "label": e.caller_unit,
                "iteration": 0,
                "id": cg.edge_ids[e],
            }
            for e in cg.edges
        ]
        return {"seq": session.seq, "nodes": nodes, "edges": edges}

    def _op_results(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        lat = session.analysis.lattice
        methods = []
        for m in session.program.methods:
            cfg = session.cfgs[m.name]
            methods.append(
                {
                    "method": m.name,
                    "edges": [
                        {
                            "edge": cfg.edge_ids[e],
                            "facts": lat.render(session.edge_facts()[cfg.edge_ids[e]]),
                            "iteration": session._edge_iteration[cfg.edge_ids[e]],
                        }
                        for e in cfg.edges
                    ],
                }
            )
        leaks = [{"unit": uid, "var": var} for uid, var in session.leaks()]
        return {
            "seq": session.seq,
            "state": session.state,
            "methods": methods,
            "leaks": leaks,
        }

    def _op_setFocus(self, args: dict, events: list[Event]) -> dict:
        session = self._require_session()
        uid = args.get("unit")
        if not isinstance(uid, str):
            raise ProtocolError("bad-args", "setFocus needs args.unit")
        changed = session.set_focus(uid)
        if changed:
            events.append(
                Event("focusChanged", {"unit": uid, "seq": session.seq})
            )
        return {"focus": uid, "changed": changed}

    def _op_subscribe(self, args: dict, events: list[Event]) -> dict:
        self.subscribed = True
        return {"subscribed": True}


class Hub:
    """Connection registry for cross-connection event delivery."""

    def __init__(self):
        self._connections: list[Connection] = []
        self._lock = threading.Lock()

    def register(self, conn: Connection):
        with self._lock:
            self._connections.append(conn)

    def unregister(self, conn: Connection):
        with self._lock:
            if conn in self._connections:
                self._connections.remove(conn)

    def broadcast(
        self,
        origin: Connection,
        event: Event,
        include_origin: bool = False,
        subscribers_only: bool = True,
    ):
        with self._lock:
            targets = list(self._connections)
        for conn in targets:
            if conn is origin and not include_origin:
                continue
            if subscribers_only and not conn.subscribed:
                continue
            try:
                conn.send_event(event)
            except Exception:
                self.unregister(conn)  # dead subscribers are pruned silently


class _TcpHandler(socketserver.StreamRequestHandler):
    def handle(self):
        hub: Hub = self.server.hub
        write_lock = threading.Lock()

        def write_line(line: str):
            with write_lock:
                self.wfile.write(line.encode("utf-8") + b"\n")
                self.wfile.flush()

        conn = Connection(hub, write_line)
        hub.register(conn)
        try:
            for raw in self.rfile:
                try:
                    conn.handle_line(raw.decode("utf-8"))
                except (BrokenPipeError, ConnectionResetError):
                    break
        finally:
            hub.unregister(conn)


class DebugServer(socketserver.ThreadingTCPServer):
    """TCP transport; one thread and one session per connection."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        super().__init__((host, port), _TcpHandler)
        self.hub = Hub()

    @property
    def port(self) -> int:
        return self.server_address[1]

    def serve_in_thread(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def serve_stdio(stdin=None, stdout=None):
    """Single-connection transport over stdio, for editor embedding."""
    import sys

    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    hub = Hub()

    def write_line(line: str):
        stdout.write(line + "\n")
        stdout.flush()

    conn = Connection(hub, write_line)
    hub.register(conn)
    for raw in stdin:
        conn.handle_line(raw)
    hub.unregister(conn)


def run_script(lines: list[str]) -> list[str]:
    """Feed request lines through a fresh single connection; returns every
    line the server would write. Drives golden-transcript tests."""
    out: list[str] = []
    hub = Hub()
    conn = Connection(hub, out.append)
    hub.register(conn)
    for line in lines:
        conn.handle_line(line)
    return out
