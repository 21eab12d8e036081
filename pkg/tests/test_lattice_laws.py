"""Property tests for the lattice contracts and transfer monotonicity.

The solver's least-fixpoint guarantee rests on these laws, so they are
checked, not assumed: join commutativity/associativity/idempotence, leq
consistency with join, and flow monotonicity for every builtin analysis.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowdbg.analyses import builtin_analyses, fact_sampler, make_taint
from flowdbg.buggy import make_taint_bug1, make_taint_bug2
from flowdbg.lattice import TOP, ConstEnv, FlatEnvLattice, PowersetLattice
from flowdbg.solver import check_monotone, generate_monotone_samples

from conftest import corpus_program

VARS = ["a", "b", "c", "x"]


def set_lattice():
    return PowersetLattice()


@st.composite
def var_sets(draw):
    return frozenset(v for v in VARS if draw(st.booleans()))


@st.composite
def const_envs(draw):
    entries = []
    for v in VARS:
        roll = draw(st.sampled_from(["bot", "top", "c1", "c2"]))
        if roll == "bot":
            continue
        entries.append((v, TOP if roll == "top" else (1 if roll == "c1" else 2)))
    return ConstEnv(tuple(entries))


LATTICE_CASES = [
    (PowersetLattice(), var_sets()),
    (FlatEnvLattice(), const_envs()),
]


@pytest.mark.parametrize("lat,strategy", LATTICE_CASES, ids=["powerset", "flat-env"])
class TestLatticeLaws:
    @given(data=st.data())
    @settings(max_examples=200)
    def test_join_commutative(self, lat, strategy, data):
        a, b = data.draw(strategy), data.draw(strategy)
        assert lat.equals(lat.join(a, b), lat.join(b, a))

    @given(data=st.data())
    @settings(max_examples=200)
    def test_join_associative(self, lat, strategy, data):
        a, b, c = data.draw(strategy), data.draw(strategy), data.draw(strategy)
        assert lat.equals(lat.join(lat.join(a, b), c), lat.join(a, lat.join(b, c)))

    @given(data=st.data())
    @settings(max_examples=200)
    def test_join_idempotent(self, lat, strategy, data):
        a = data.draw(strategy)
        assert lat.equals(lat.join(a, a), a)

    @given(data=st.data())
    @settings(max_examples=200)
    def test_join_upper_bound(self, lat, strategy, data):
        a, b = data.draw(strategy), data.draw(strategy)
        joined = lat.join(a, b)
        assert lat.leq(a, joined)
        assert lat.leq(b, joined)

    @given(data=st.data())
    @settings(max_examples=200)
    def test_leq_reflexive_and_bottom(self, lat, strategy, data):
        a = data.draw(strategy)
        assert lat.leq(a, a)
        assert lat.leq(lat.bottom(), a)

    @given(data=st.data())
    @settings(max_examples=200)
    def test_leq_antisymmetric(self, lat, strategy, data):
        a, b = data.draw(strategy), data.draw(strategy)
        if lat.leq(a, b) and lat.leq(b, a):
            assert lat.equals(a, b)

    @given(data=st.data())
    @settings(max_examples=200)
    def test_leq_transitive(self, lat, strategy, data):
        a, b = data.draw(strategy), data.draw(strategy)
        joined = lat.join(a, b)
        top_ish = lat.join(joined, data.draw(strategy))
        assert lat.leq(a, joined) and lat.leq(joined, top_ish)
        assert lat.leq(a, top_ish)

    @given(data=st.data())
    @settings(max_examples=200)
    def test_canonical_rendering_stable(self, lat, strategy, data):
        a, b = data.draw(strategy), data.draw(strategy)
        if lat.equals(a, b):
            assert lat.render(a) == lat.render(b)
        assert lat.render(a).startswith("{") and lat.render(a).endswith("}")


@pytest.mark.parametrize("analysis", builtin_analyses(), ids=lambda a: a.name)
@pytest.mark.parametrize("corpus_name", ["branch", "loop", "twomethod"])
def test_builtin_flows_monotone(analysis, corpus_name):
    program = corpus_program(corpus_name)
    rng = random.Random(7)
    for method in program.methods:
        samples = generate_monotone_samples(analysis, method, 200, rng)
        report = check_monotone(analysis, samples)
        assert report.checked == 200
        assert report.ok, report.violations[:3]


def test_check_monotone_flags_join_dropping_bug():
    program = corpus_program("branch")
    bug = make_taint_bug1()  # intersection join
    rng = random.Random(7)
    samples = generate_monotone_samples(bug, program.methods[0], 200, rng)
    report = check_monotone(bug, samples)
    assert any(v.kind == "join-upper-bound" for v in report.violations)
    witness = [v for v in report.violations if v.kind == "join-upper-bound"][0]
    assert witness.a.startswith("{") and witness.detail


def test_check_monotone_flags_left_join_bug():
    program = corpus_program("branch")
    bug = make_taint_bug2()  # left-biased join
    rng = random.Random(11)
    samples = generate_monotone_samples(bug, program.methods[0], 200, rng)
    report = check_monotone(bug, samples)
    assert any(v.kind == "join-upper-bound" for v in report.violations)


def test_check_monotone_flags_nonmonotone_flow():
    from flowdbg.analyses import AnalysisDef

    # inverted sanitizer check: gens the result when the argument is
    # clean, kills it when tainted
    def inverted(unit, facts):
        if unit.kind == "identity":
            if unit.rhs in facts:
                return facts - {unit.lhs}
            return facts | {unit.lhs}
        return facts

    analysis = AnalysisDef(
        name="inverted",
        direction="forward",
        lattice=PowersetLattice(),
        entry_fact=lambda m: frozenset(),
        flow=inverted,
    )
    program = corpus_program("passthrough")
    rng = random.Random(3)
    samples = generate_monotone_samples(analysis, program.methods[0], 300, rng)
    report = check_monotone(analysis, samples)
    assert any(v.kind == "flow-monotone" for v in report.violations)
    witness = [v for v in report.violations if v.kind == "flow-monotone"][0]
    assert witness.unit is not None


def test_check_monotone_empty_samples():
    report = check_monotone(make_taint(), [])
    assert report.checked == 0
    assert report.violations == []
    assert report.ok


def test_fact_sampler_produces_comparable_pairs():
    program = corpus_program("branch")
    rng = random.Random(1)
    for analysis in builtin_analyses():
        samples = generate_monotone_samples(analysis, program.methods[0], 50, rng)
        for _, a, b in samples:
            assert analysis.lattice.leq(a, b)
