"""flowdbg: an interactive debugger for data-flow analyses.

The pieces, bottom to top: a three-address IR with CFG and call-graph
construction (ir, parser, graphs, dot); a monotone worklist solver with
four builtin analyses (lattice, analyses, solver); an instrumented,
steppable, rewindable execution of that solver (debug); a line-delimited
JSON protocol exposing sessions to clients (protocol); and a CLI (cli).
"""

__version__ = "0.1.0"
