import pytest

from flowdbg.analyses import AnalysisDef, builtin_analyses, make_constants, make_taint
from flowdbg.buggy import make_taint_bug1, make_taint_bug2
from flowdbg.graphs import build_cfg, build_cfgs
from flowdbg.lattice import TOP, PowersetLattice
from flowdbg.parser import parse_program
from flowdbg.solver import (
    AnalysisMisuseError,
    NonTerminationError,
    report_leaks,
    solve,
    solve_program,
    transfer_result,
)

from conftest import CORPUS_NAMES, corpus_program
from roundrobin import round_robin_solve


def taint_edge_map(program_name="leak"):
    program = corpus_program(program_name)
    taint = make_taint()
    cfg = build_cfg(program.methods[0])
    res = solve(taint, cfg)
    return cfg, taint, res


def test_taint_on_leak_matches_hand_simulation():
    cfg, taint, res = taint_edge_map("leak")
    rendered = {cfg.edge_ids[e]: taint.lattice.render(f) for e, f in res.edge_facts.items()}
    assert rendered == {
        "main#0->main#1": "{x}",
        "main#1->main#2": "{x}",  # y stays clean after sanitize
        "main#2->main#3": "{x}",
    }
    assert "x" in res.in_facts["main#2"]


def test_constants_straight_line():
    program = parse_program("method main() { x = 1\n  y = x + 1\n  return y\n}")
    const = make_constants()
    cfg = build_cfg(program.methods[0])
    res = solve(const, cfg)
    at_return = res.in_facts["main#2"]
    assert at_return.get("x") == 1
    assert at_return.get("y") == 2


def test_liveness_backward_two_units():
    program = parse_program("method main() { x = 1\n  return\n}")
    lv = [a for a in builtin_analyses() if a.name == "liveness"][0]
    cfg = build_cfg(program.methods[0])
    res = solve(lv, cfg)
    # nothing is live into the method: x is defined then never used
    assert res.in_facts["main#1"] == frozenset()
    (edge,) = cfg.edges
    assert res.edge_facts[edge] == frozenset()


def test_constants_merge_goes_top():
    program = corpus_program("branch")
    const = make_constants()
    cfg = build_cfg(program.methods[0])
    res = solve(const, cfg)
    merge_in = res.in_facts["main#6"]
    assert merge_in.get("x") == TOP


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("analysis_name", ["taint", "reaching-defs", "liveness", "constants"])
def test_oracle_equivalence(name, analysis_name):
    program = corpus_program(name)
    analysis = {a.name: a for a in builtin_analyses()}[analysis_name]
    for method in program.methods:
        cfg = build_cfg(method)
        res = solve(analysis, cfg)
        oracle_edges, oracle_in = round_robin_solve(analysis, cfg)
        lat = analysis.lattice
        for edge in cfg.edges:
            assert lat.equals(res.edge_facts[edge], oracle_edges[edge]), (
                name,
                analysis_name,
                cfg.edge_ids[edge],
            )
        for uid in cfg.nodes:
            assert lat.equals(res.in_facts[uid], oracle_in[uid])


@pytest.mark.parametrize("name", CORPUS_NAMES)
@pytest.mark.parametrize("analysis_name", ["taint", "reaching-defs", "liveness", "constants"])
def test_lifo_order_independence(name, analysis_name):
    program = corpus_program(name)
    analysis = {a.name: a for a in builtin_analyses()}[analysis_name]
    for method in program.methods:
        cfg = build_cfg(method)
        fifo = solve(analysis, cfg, policy="fifo")
        lifo = solve(analysis, cfg, policy="lifo")
        for edge in cfg.edges:
            assert analysis.lattice.equals(fifo.edge_facts[edge], lifo.edge_facts[edge])


def test_fixpoint_local_consistency():
    """At fixpoint, every edge holds the transfer output of the unit the
    facts flow out of: the edge's source for forward analyses, its
    destination for backward ones."""
    for name in CORPUS_NAMES:
        program = corpus_program(name)
        for analysis in builtin_analyses():
            for method in program.methods:
                cfg = build_cfg(method)
                res = solve(analysis, cfg)
                for uid in cfg.nodes:
                    result = transfer_result(analysis, cfg.units[uid], res.in_facts[uid])
                    written = (
                        cfg.out_edges[uid]
                        if analysis.direction == "forward"
                        else cfg.in_edges[uid]
                    )
                    for edge in written:
                        expected = (
                            result.out_for(edge.kind)
                            if analysis.direction == "forward"
                            else result.out
                        )
                        assert analysis.lattice.equals(
                            res.edge_facts[edge], expected
                        ), (name, analysis.name, uid)


def test_gen_kill_bookkeeping():
    for name in CORPUS_NAMES:
        program = corpus_program(name)
        for analysis in builtin_analyses():
            for method in program.methods:
                cfg = build_cfg(method)
                res = solve(analysis, cfg)
                lat = analysis.lattice
                for uid in cfg.nodes:
                    in_facts = res.in_facts[uid]
                    result = transfer_result(analysis, cfg.units[uid], in_facts)
                    in_elems = lat.elements(in_facts)
                    out_elems = lat.elements(result.out)
                    assert out_elems == (in_elems - set(result.kill)) | set(result.gen)


def test_budget_exhaustion_raises():
    # an ascending flow that never stabilizes: gens a fresh fact per visit
    class CountingLattice(PowersetLattice):
        pass

    counter = [0]

    def evil_flow(unit, facts):
        counter[0] += 1
        return facts | {f"f{counter[0]}"}

    evil = AnalysisDef(
        name="evil",
        direction="forward",
        lattice=CountingLattice(),
        entry_fact=lambda m: frozenset(),
        flow=evil_flow,
    )
    program = corpus_program("loop")
    cfg = build_cfg(program.methods[0])
    with pytest.raises(NonTerminationError) as exc:
        solve(evil, cfg, budget=50)
    assert exc.value.method == "main"
    assert "main" in str(exc.value)


def test_report_leaks_examples():
    cfg, taint, res = taint_edge_map("leak")
    assert report_leaks(res, taint, cfg) == [("main#2", "x")]

    program = corpus_program("leak")
    bug1 = make_taint_bug1()
    cfg1 = build_cfg(program.methods[0])
    res1 = solve(bug1, cfg1)
    assert report_leaks(res1, bug1, cfg1) == [("main#2", "x"), ("main#3", "y")]

    cfg_clean, taint2, res_clean = taint_edge_map("clean")
    assert report_leaks(res_clean, taint2, cfg_clean) == []


def test_report_leaks_requires_taint_analysis():
    program = corpus_program("leak")
    const = make_constants()
    cfg = build_cfg(program.methods[0])
    res = solve(const, cfg)
    with pytest.raises(AnalysisMisuseError):
        report_leaks(res, const, cfg)


def test_buggy_variants_change_leak_reports():
    program = corpus_program("scrub")
    cfg = build_cfg(program.methods[0])
    correct = make_taint()
    assert report_leaks(solve(correct, cfg), correct, cfg) == []
    bug1 = make_taint_bug1()  # ignores the sanitizer: scrub now leaks
    assert report_leaks(solve(bug1, cfg), bug1, cfg) == [("main#2", "x")]

    passthrough = corpus_program("passthrough")
    cfg_p = build_cfg(passthrough.methods[0])
    assert report_leaks(solve(correct, cfg_p), correct, cfg_p) == [("main#3", "z")]
    bug2 = make_taint_bug2()  # copies are no-ops: the leak disappears
    assert report_leaks(solve(bug2, cfg_p), bug2, cfg_p) == []


def test_solve_program_covers_methods_in_order():
    program = corpus_program("twomethod")
    results = solve_program(make_taint(), program, build_cfgs(program))
    assert list(results) == ["main", "helper"]


def test_branch_sensitive_flow_supported():
    # a custom analysis returning per-edge-kind outputs
    lattice = PowersetLattice()

    def flow(unit, facts):
        if unit.kind == "if":
            return {
                "branch-true": facts | {f"{unit.cond}!"},
                "branch-false": facts,
            }
        return facts

    branchy = AnalysisDef(
        name="branch-marks",
        direction="forward",
        lattice=lattice,
        entry_fact=lambda m: frozenset(),
        flow=flow,
    )
    program = corpus_program("branch")
    cfg = build_cfg(program.methods[0])
    res = solve(branchy, cfg)
    true_edge = cfg.edge_by_id["main#0->main#4"]
    false_edge = cfg.edge_by_id["main#0->main#1"]
    assert res.edge_facts[true_edge] == {"c!"}
    assert res.edge_facts[false_edge] == frozenset()
    # the uniform out of the transfer is the join over branches
    result = transfer_result(branchy, cfg.units["main#0"], frozenset())
    assert result.out == {"c!"}
    assert result.gen == ("c!",)
