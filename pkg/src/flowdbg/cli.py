"""Command-line entry point.

Subcommands: run (batch solve + leak report), debug (interactive REPL),
export (DOT), serve (protocol server), localize (diff a buggy analysis
against a correct one). `flowdbg --init DIR` drops a template taint
config and a sample IR file to start from.

Exit codes: 0 clean, 1 findings (leaks or a divergence), 2 error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import debug as debug_mod
from .analyses import TaintConfig, parse_taint_config
from .dot import export_dot, export_program_cfgs
from .graphs import build_call_graph, build_cfgs
from .ir import Program
from .parser import ParseError, parse_program
from .registry import analysis_names, get_analysis
from .solver import report_leaks, solve_program

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

_INIT_SAMPLE_IR = """\
method main() { x = source()
  y = sanitize(x)
  sink(x)
  sink(y)
}
"""

_INIT_TAINT_CFG = """\
# taint analysis configuration: one primitive per line
source source
sink sink
sanitizer sanitize
"""


class CliError(Exception):
    pass


def _load_program(args) -> Program:
    path = Path(args.program)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}")
    return parse_program(text, entry=getattr(args, "entry", None))


def _taint_config(args) -> TaintConfig | None:
    path = getattr(args, "taint_config", None)
    if not path:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}")
    return parse_taint_config(text)


def _write_out(args, text: str):
    out = getattr(args, "out", None)
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc.strerror or exc}")
    else:
        sys.stdout.write(text)


# -- run ----------------------------------------------------------------------


def cmd_run(args) -> int:
    program = _load_program(args)
    analysis = get_analysis(args.analysis, _taint_config(args))
    cfgs = build_cfgs(program)
    results = solve_program(analysis, program, cfgs)
    lat = analysis.lattice

    lines: list[str] = []
    leaks: list[tuple[str, str]] = []
    if args.format == "lines":
        for name, res in results.items():
            cfg = cfgs[name]
            for edge in cfg.edges:
                lines.append(
                    f"{name}|{cfg.edge_ids[edge]}|{lat.render(res.edge_facts[edge])}"
                )
    else:
        for name, res in results.items():
            cfg = cfgs[name]
            lines.append(f"method {name} ({analysis.name}, {res.iterations} transfers)")
            for uid in cfg.nodes:
                unit = cfg.units[uid]
                lines.append(f"  {uid} [line {unit.source_line}] {unit.text}")
                lines.append(f"    in  {lat.render(res.in_facts[uid])}")
                for edge in cfg.out_edges[uid]:
                    lines.append(
                        f"    -> {edge.dst} [{edge.kind}] {lat.render(res.edge_facts[edge])}"
                    )
    if analysis.taint is not None:
        for name, res in results.items():
            leaks.extend(report_leaks(res, analysis, cfgs[name]))
        if args.format == "lines":
            lines.extend(f"leak|{uid}|{var}" for uid, var in leaks)
        else:
            if leaks:
                lines.append("leaks:")
                for uid, var in leaks:
                    unit = program.unit(uid)
                    lines.append(f"  {uid}: {unit.text} receives tainted {{{var}}}")
            else:
                lines.append("leaks: none")
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_FINDINGS if leaks else EXIT_CLEAN


# -- export -------------------------------------------------------------------


def cmd_export(args) -> int:
    program = _load_program(args)
    cfgs = build_cfgs(program)
    decorations = None
    if args.decorate:
        analysis = get_analysis(args.analysis, _taint_config(args))
        results = solve_program(analysis, program, cfgs)
        decorations = {}
        for name, res in results.items():
            cfg = cfgs[name]
            for edge, facts in res.edge_facts.items():
                decorations[cfg.edge_ids[edge]] = analysis.lattice.render(facts)
    if args.target == "callgraph":
        text = export_dot(build_call_graph(program))
    elif args.method:
        if args.method not in cfgs:
            raise CliError(f"no such method: {args.method}")
        cfg = cfgs[args.method]
        local = None
        if decorations is not None:
            local = {
                eid: label
                for eid, label in decorations.items()
                if eid in cfg.edge_by_id
            }
        text = export_dot(cfg, local)
    else:
        text = export_program_cfgs(cfgs, decorations)
    _write_out(args, text)
    return EXIT_CLEAN


# -- localize -----------------------------------------------------------------


def cmd_localize(args) -> int:
    program = _load_program(args)
    config = _taint_config(args)
    session_good = debug_mod.start(program, get_analysis(args.good, config))
    session_bad = debug_mod.start(program, get_analysis(args.bad, config))
    session_good.run_to_fixpoint()
    session_bad.run_to_fixpoint()
    divergence = session_good.diverge(session_bad)
    if divergence is None:
        print("no divergence")
        return EXIT_CLEAN
    if args.format == "lines":
        print(f"diverge|{divergence.seq}|{divergence.unit}")
        print(f"a|{divergence.line_a}")
        print(f"b|{divergence.line_b}")
    else:
        unit_desc = ""
        if divergence.unit is not None:
            unit = program.unit(divergence.unit)
            unit_desc = f" at {divergence.unit} (line {unit.source_line}): {unit.text}"
        print(f"first divergence at seq {divergence.seq}{unit_desc}")
        print(f"  {args.good}: {divergence.line_a}")
        print(f"  {args.bad}: {divergence.line_b}")
    return EXIT_FINDINGS


# -- serve --------------------------------------------------------------------


def cmd_serve(args) -> int:
    from .protocol import DebugServer, serve_stdio

    if args.stdio:
        serve_stdio()
        return EXIT_CLEAN
    server = DebugServer(host=args.host, port=args.port)
    print(f"listening on {args.host}:{server.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_CLEAN


# -- interactive REPL -----------------------------------------------------------


_REPL_HELP = """\
commands:
  b <line|unit|pred>   set breakpoint; pred is gen:<pat> kill:<pat> edge:<id> kind:<k>
  bl                   list breakpoints
  d <id>               remove breakpoint
  s [granularity]      step: transfer (default), unit, iteration, method, to-fixpoint
  c                    resume until breakpoint or fixpoint
  rw <seq>             rewind to event seq
  p <edge|unit>        print facts on an edge, or in-fact and out-edges of a unit
  hist <edge|unit>     iteration-stamped fact history
  leaks                current taint leaks
  diverge <analysis>   run this program under another analysis and diff event logs
  info <unit>          statement details
  focus <unit>         set the focused statement
  q                    quit
"""


def _format_suspension(report: debug_mod.Suspension) -> str:
    if report.state == debug_mod.FINISHED:
        return f"finished (seq {report.seq}, reason {report.reason})"
    if report.state == debug_mod.IDLE:
        return f"at start (seq {report.seq})"
    parts = [f"suspended at {report.unit}"]
    if report.line is not None:
        parts.append(f"(line {report.line})")
    parts.append(f"seq {report.seq}")
    parts.append(f"reason {report.reason}")
    if report.breakpoint_ids:
        parts.append(f"bp {','.join(str(i) for i in report.breakpoint_ids)}")
    if report.in_text is not None:
        parts.append(f"in={report.in_text}")
    if report.out_text is not None:
        parts.append(f"out={report.out_text}")
    return " ".join(parts)


class Repl:
    """Maps debugger commands 1:1 onto DebugSession operations."""

    def __init__(self, program: Program, analysis_name: str, config, out=sys.stdout):
        self.program = program
        self.analysis_name = analysis_name
        self.config = config
        self.session = debug_mod.start(program, analysis_name, taint_config=config)
        self.out = out

    def emit(self, text: str):
        print(text, file=self.out)

    def prompt(self) -> str:
        session = self.session
        unit = session.current_unit or "-"
        if session.state == debug_mod.FINISHED:
            unit = "end"
        iteration = session._pending.iteration if session._pending else 0
        return f"[{unit} it{iteration}] dbg> "

    def dispatch(self, line: str) -> bool:
        """Execute one command; returns False on quit."""
        parts = line.split()
        if not parts:
            return True
        cmd, *rest = parts
        try:
            return self._dispatch(cmd, rest)
        except debug_mod.DebugError as exc:
            self.emit(f"error: {exc}")
        except Exception as exc:
            self.emit(f"error: {exc}")
        return True

    def _dispatch(self, cmd: str, rest: list[str]) -> bool:
        session = self.session
        if cmd == "q":
            return False
        if cmd == "b" and rest:
            self.emit(session.set_breakpoint(**_parse_bp_spec(rest[0])).describe())
        elif cmd == "bl":
            for bp in session.breakpoints.values():
                self.emit(f"{bp.describe()} hits={bp.hit_count}")
        elif cmd == "d" and rest:
            removed = session.remove_breakpoint(int(rest[0]))
            self.emit("removed" if removed else "no such breakpoint (no-op)")
        elif cmd == "s":
            granularity = rest[0] if rest else "transfer"
            if granularity == "fixpoint":
                granularity = "to-fixpoint"
            self.emit(_format_suspension(session.step(granularity)))
        elif cmd == "c":
            self.emit(_format_suspension(session.resume()))
        elif cmd == "rw" and rest:
            self.emit(_format_suspension(session.rewind(int(rest[0]))))
        elif cmd == "p" and rest:
            self._print_facts(rest[0])
        elif cmd == "hist" and rest:
            lat = session.analysis.lattice
            for eid, entries in sorted(session.history(rest[0]).items()):
                rendered = ", ".join(f"it{it}: {lat.render(f)}" for it, f in entries)
                self.emit(f"{eid}: {rendered}")
        elif cmd == "leaks":
            leaks = session.leaks()
            if not leaks:
                self.emit("no leaks")
            for uid, var in leaks:
                self.emit(f"{uid}: {self.program.unit(uid).text} receives tainted {{{var}}}")
        elif cmd == "diverge" and rest:
            self._diverge(rest[0])
        elif cmd == "info" and rest:
            from .ir import unit_info

            self.emit(unit_info(self.program, rest[0]).describe())
        elif cmd == "focus" and rest:
            changed = session.set_focus(rest[0])
            self.emit(f"focus {rest[0]}" + ("" if changed else " (unchanged)"))
        else:
            self.emit(_REPL_HELP)
        return True

    def _print_facts(self, target: str):
        session = self.session
        lat = session.analysis.lattice
        if "->" in target:
            self.emit(lat.render(session.inspect_edge(target)))
            return
        unit = self.program.unit(target)
        method = target.partition("#")[0]
        in_facts = session.in_facts(method)
        self.emit(f"in  {lat.render(in_facts[target])}")
        cfg = session.cfgs[method]
        for edge in cfg.out_edges[unit.id]:
            eid = cfg.edge_ids[edge]
            self.emit(f"-> {edge.dst} [{edge.kind}] {lat.render(session.inspect_edge(eid))}")

    def _diverge(self, other_name: str):
        mine = debug_mod.start(self.program, self.analysis_name, taint_config=self.config)
        other = debug_mod.start(self.program, other_name, taint_config=self.config)
        mine.run_to_fixpoint()
        other.run_to_fixpoint()
        divergence = mine.diverge(other)
        if divergence is None:
            self.emit("no divergence")
            return
        self.emit(f"first divergence at seq {divergence.seq} (unit {divergence.unit})")
        self.emit(f"  {self.analysis_name}: {divergence.line_a}")
        self.emit(f"  {other_name}: {divergence.line_b}")

    def loop(self, stdin=sys.stdin):
        self.emit(
            f"debugging {self.analysis_name} on {len(self.program.methods)} method(s); "
            "h for help"
        )
        while True:
            self.out.write(self.prompt())
            self.out.flush()
            line = stdin.readline()
            if not line:
                self.emit("")
                return
            if not self.dispatch(line.strip()):
                return


def _parse_bp_spec(spec: str) -> dict:
    if ":" in spec:
        kind, _, arg = spec.partition(":")
        kinds = {
            "gen": "fact-generated",
            "kill": "fact-killed",
            "edge": "edge-changed",
            "kind": "unit-kind",
        }
        if kind not in kinds:
            raise debug_mod.BadBreakpointError(
                f"unknown predicate {kind!r}; expected gen:, kill:, edge:, kind:"
            )
        return {"event": (kinds[kind], arg)}
    if "#" in spec:
        return {"unit": spec}
    try:
        return {"line": int(spec)}
    except ValueError:
        raise debug_mod.BadBreakpointError(
            f"breakpoint spec {spec!r} is not a line, unit id, or predicate"
        )


def cmd_debug(args) -> int:
    program = _load_program(args)
    repl = Repl(program, args.analysis, _taint_config(args))
    repl.loop()
    return EXIT_CLEAN


# -- init ---------------------------------------------------------------------


def cmd_init(target: str) -> int:
    directory = Path(target)
    directory.mkdir(parents=True, exist_ok=True)
    for name, content in (("sample.ir", _INIT_SAMPLE_IR), ("taint.cfg", _INIT_TAINT_CFG)):
        path = directory / name
        if path.exists():
            print(f"refusing to overwrite {path}", file=sys.stderr)
            return EXIT_ERROR
        path.write_text(content, encoding="utf-8")
        print(f"wrote {path}")
    return EXIT_CLEAN


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowdbg",
        description="interactive debugger for data-flow analyses",
    )
    parser.add_argument(
        "--init",
        metavar="DIR",
        help="write a template taint config and sample IR file into DIR",
    )
    sub = parser.add_subparsers(dest="command")

    def add_common(p, with_analysis=True):
        p.add_argument("program", help="IR source file")
        if with_analysis:
            p.add_argument(
                "--analysis",
                default="taint",
                choices=analysis_names(),
                help="analysis to run (default: taint)",
            )
        p.add_argument("--taint-config", help="taint primitives file")
        p.add_argument("--entry", help="entry method (default: main or first)")

    p_run = sub.add_parser("run", help="solve to fixpoint and print results")
    add_common(p_run)
    p_run.add_argument("--format", choices=["human", "lines"], default="human")
    p_run.add_argument("--out", help="write results to a file instead of stdout")

    p_debug = sub.add_parser("debug", help="interactive debugger REPL")
    add_common(p_debug)

    p_export = sub.add_parser("export", help="export CFG or call graph as DOT")
    add_common(p_export)
    p_export.add_argument(
        "target", choices=["cfg", "callgraph"], help="which graph to export"
    )
    p_export.add_argument("--method", help="restrict cfg export to one method")
    p_export.add_argument(
        "--decorate",
        action="store_true",
        help="label edges with fixpoint facts of --analysis",
    )
    p_export.add_argument("--out", help="output file (default stdout)")

    p_serve = sub.add_parser("serve", help="run the protocol server")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=7737)
    p_serve.add_argument(
        "--stdio", action="store_true", help="serve one session over stdio"
    )

    p_loc = sub.add_parser(
        "localize", help="first divergent event between two analyses"
    )
    p_loc.add_argument("program", help="IR source file")
    p_loc.add_argument("good", choices=analysis_names(), help="reference analysis")
    p_loc.add_argument("bad", choices=analysis_names(), help="suspect analysis")
    p_loc.add_argument("--taint-config", help="taint primitives file")
    p_loc.add_argument("--entry", help="entry method")
    p_loc.add_argument("--format", choices=["human", "lines"], default="human")

    return parser


_COMMANDS = {
    "run": cmd_run,
    "debug": cmd_debug,
    "export": cmd_export,
    "serve": cmd_serve,
    "localize": cmd_localize,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.init:
        return cmd_init(args.init)
    if not args.command:
        parser.print_help()
        return EXIT_ERROR
    try:
        return _COMMANDS[args.command](args)
    except (CliError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
