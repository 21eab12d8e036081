import pytest

from flowdbg.analyses import (
    TaintConfig,
    TaintConfigError,
    builtin_analyses,
    make_constants,
    make_liveness,
    make_reaching_defs,
    make_taint,
    parse_taint_config,
)
from flowdbg.lattice import TOP, ConstEnv
from flowdbg.parser import parse_program

from conftest import corpus_program


def unit_of(text: str, ordinal: int = 0):
    return parse_program(text).methods[0].units[ordinal]


def test_default_taint_config():
    taint = make_taint()
    assert taint.taint.sources == {"source"}
    assert taint.taint.sinks == {"sink"}
    assert taint.taint.sanitizers == {"sanitize"}
    assert taint.direction == "forward"


def test_parse_taint_config():
    cfg = parse_taint_config(
        "# roles\nsource getInput\nsource source\nsink leak\nsanitizer clean\n"
    )
    assert cfg.sources == {"getInput", "source"}
    assert cfg.sinks == {"leak"}
    assert cfg.sanitizers == {"clean"}


def test_parse_taint_config_defaults_and_errors():
    assert parse_taint_config("").sources == {"source"}
    with pytest.raises(TaintConfigError, match="line 1"):
        parse_taint_config("wat is this")


def test_taint_source_gens_result():
    taint = make_taint()
    unit = unit_of("method main() { x = source()\n}")
    assert taint.flow(unit, frozenset()) == {"x"}


def test_taint_sanitizer_cleans_result_only():
    taint = make_taint()
    unit = unit_of("method main() { y = sanitize(x)\n}")
    assert taint.flow(unit, frozenset({"x"})) == {"x"}
    # sanitizing into the same variable kills its taint
    unit2 = unit_of("method main() { x = sanitize(x)\n}")
    assert taint.flow(unit2, frozenset({"x"})) == frozenset()


def test_taint_unknown_call_joins_argument_taint():
    taint = make_taint()
    unit = unit_of("method main() { r = f(a, b)\n}")
    assert taint.flow(unit, frozenset({"a"})) == {"a", "r"}
    assert taint.flow(unit, frozenset()) == frozenset()
    # strong update: previously tainted result becomes clean
    assert taint.flow(unit, frozenset({"r"})) == frozenset()


def test_taint_copy_and_binop():
    taint = make_taint()
    copy = unit_of("method main() { y = x\n}")
    assert copy.kind == "identity"
    assert taint.flow(copy, frozenset({"x"})) == {"x", "y"}
    assert taint.flow(copy, frozenset()) == frozenset()
    binop = unit_of("method main() { z = a + b\n}")
    assert taint.flow(binop, frozenset({"b"})) == {"b", "z"}
    const = unit_of("method main() { x = 5\n}")
    assert taint.flow(const, frozenset({"x"})) == frozenset()


def test_taint_custom_config():
    taint = make_taint(
        TaintConfig(
            sources=frozenset({"read"}),
            sinks=frozenset({"write"}),
            sanitizers=frozenset({"escape"}),
        )
    )
    unit = unit_of("method main() { x = read()\n}")
    assert taint.flow(unit, frozenset()) == {"x"}
    std = unit_of("method main() { x = source()\n}")
    assert taint.flow(std, frozenset()) == frozenset()  # not a source anymore


def test_reaching_defs_kill_semantics():
    rd = make_reaching_defs()
    program = parse_program("method main() { x = 1\n  x = 2\n}")
    u0, u1 = program.methods[0].units
    after0 = rd.flow(u0, frozenset())
    assert after0 == {("x", "main#0")}
    after1 = rd.flow(u1, after0)
    assert after1 == {("x", "main#1")}
    assert rd.lattice.render(after1) == "{x@main#1}"


def test_liveness_gen_kill():
    lv = make_liveness()
    ret = unit_of("method main() { return x\n}")
    assert lv.flow(ret, frozenset()) == {"x"}
    asg = unit_of("method main() { x = a + b\n}")
    assert lv.flow(asg, frozenset({"x", "q"})) == {"a", "b", "q"}


def test_constants_arithmetic():
    const = make_constants()
    program = parse_program("method main() { x = 1\n  y = x + 1\n  return y\n}")
    u0, u1, _ = program.methods[0].units
    env = const.flow(u0, ConstEnv())
    assert env.get("x") == 1
    env = const.flow(u1, env)
    assert env.get("y") == 2
    assert const.lattice.render(env) == "{x=1,y=2}"


def test_constants_top_and_bottom_propagation():
    const = make_constants()
    u = unit_of("method main() { y = x + 1\n}")
    assert const.flow(u, ConstEnv()).get("y") is None  # bottom operand
    env_top = ConstEnv((("x", TOP),))
    assert const.flow(u, env_top).get("y") == TOP
    call = unit_of("method main() { r = f(a)\n}")
    assert const.flow(call, ConstEnv()).get("r") == TOP


def test_constants_comparison_ops():
    const = make_constants()
    program = parse_program("method main() { a = 1\n  b = a < 2\n  c = a == 2\n}")
    units = program.methods[0].units
    env = ConstEnv()
    for u in units:
        env = const.flow(u, env)
    assert env.get("b") == 1
    assert env.get("c") == 0


def test_constants_entry_fact_params_unknown():
    const = make_constants()
    method = corpus_program("branch").methods[0]
    entry = const.entry_fact(method)
    assert entry.get("c") == TOP


def test_builtin_analyses_roster():
    names = [a.name for a in builtin_analyses()]
    assert names == ["taint", "reaching-defs", "liveness", "constants"]
    directions = {a.name: a.direction for a in builtin_analyses()}
    assert directions["liveness"] == "backward"
    for analysis in builtin_analyses():
        assert analysis.description
