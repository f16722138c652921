import pytest
from hypothesis import given, settings, strategies as st

from spineless.acm import (Acm, AcmError, Config, ConfigGraph, Fuel, Instruction, accepts, admissibility_probe,
                           ambient_config_steps, ambient_successors, format_acm, format_id, make_id, parse_acm,
                           parse_id, register_monomials, successors)

from cases import M_EVEN
from oracles import id_bfs


@pytest.fixture(scope="module")
def m_even():
    return parse_acm(M_EVEN)


# ---------------------------------------------------------------- parsing

def test_parse_m_even(m_even):
    assert m_even.registers == 1
    assert m_even.states == ("q0", "q1", "qf") and m_even.final == "qf"
    assert [str(p) for p in m_even.instructions] == ["dec q0 r1 -> q1", "dec q1 r1 -> q0", "fork q0 -> qf qf"]


def test_format_round_trip(m_even):
    assert parse_acm(format_acm(m_even)) == m_even


def test_parse_comments_and_inc():
    M = parse_acm("# counter\nregisters 2\nstates a b\nfinal b\ninc a -> b r2  # bump\n")
    assert M.instructions == (Instruction("inc", "a", "b", reg=2),)


def test_empty_instruction_list():
    M = parse_acm("registers 1\nstates q qf\nfinal qf\n")
    assert accepts(M, parse_id(M, "qf")).accepted
    assert accepts(M, parse_id(M, "q")).exhausted


@pytest.mark.parametrize("text, msg", [
    (M_EVEN + "dec qf r1 -> q0\n", "final"),
    (M_EVEN + "dec q0 r2 -> q1\n", "r2"),
    (M_EVEN + "dec q0 r1 -> q7\n", "q7"),
    (M_EVEN + "jump q0 -> q1\n", "line 7"),
    ("states a\nfinal a\n", "registers"),
])
def test_parse_errors(text, msg):
    with pytest.raises(AcmError) as e:
        parse_acm(text)
    assert msg in str(e.value)


def test_parse_id(m_even):
    u = parse_id(m_even, "q0 r1^2 | qf")
    assert u == (Config("q0", (2,)), Config("qf", (0,)))
    assert parse_id(m_even, "qf | qf | qf") == (Config("qf", (0,)),) * 3
    with pytest.raises(ValueError):
        parse_id(m_even, "r1")
    with pytest.raises(ValueError):
        parse_id(m_even, "q0 q1")
    with pytest.raises(ValueError):
        parse_id(m_even, "q9")


def test_id_is_multiset_sorted():
    a, b = Config("q1", (0,)), Config("q0", (3,))
    assert make_id([a, b, a]) == (b, a, a)
    assert format_id(make_id([a, b])) == "q0 r1^3 | q1"


# ---------------------------------------------------------------- one step

def test_successors_example(m_even):
    out = [format_id(v) for v in successors(m_even, parse_id(m_even, "q0 r1^2"))]
    assert out == ["q1 r1", "qf r1^2 | qf r1^2"]


def test_successors_none(m_even):
    assert successors(m_even, parse_id(m_even, "q1")) == []
    assert successors(m_even, parse_id(m_even, "qf")) == []


def test_successors_each_occurrence(m_even):
    out = successors(m_even, parse_id(m_even, "q1 r1 | q1 r1^2"))
    assert [format_id(v) for v in out] == ["q0 | q1 r1^2", "q0 r1 | q1 r1"]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["q0", "q1", "qf"]), st.integers(0, 4)), min_size=1, max_size=3))
def test_successor_width_conservation(cfgs):
    M = parse_acm(M_EVEN)
    u = make_id([Config(q, (n,)) for q, n in cfgs])
    for v in successors(M, u):
        assert len(v) in (len(u), len(u) + 1)
        assert v == make_id(v)


# ---------------------------------------------------------------- acceptance

def test_accepts_two(m_even):
    r = accepts(m_even, parse_id(m_even, "q0 r1^2"), Fuel(10, 10, 8))
    assert r.accepted and len(r.trace) == 3
    assert [format_id(v) for _, v in r.trace] == ["q1 r1", "q0", "qf | qf"]
    assert m_even.is_final_id(r.trace[-1][1])


def test_accepts_one_exhausted(m_even):
    r = accepts(m_even, parse_id(m_even, "q0 r1"), Fuel(10, 10, 8))
    assert not r.accepted and r.exhausted


def test_accepts_final_id(m_even):
    r = accepts(m_even, parse_id(m_even, "qf | qf | qf"), Fuel(10, 10, 8))
    assert r.accepted and r.trace == []


@pytest.mark.parametrize("n", range(0, 21))
def test_parity(m_even, n):
    r = accepts(m_even, (Config("q0", (n,)),), Fuel(n + 2, max(n, 1)))
    assert r.accepted == (n % 2 == 0)
    if not r.accepted:
        assert r.exhausted


def test_depth_fuel_limits(m_even):
    r = accepts(m_even, parse_id(m_even, "q0 r1^4"), Fuel(4, 10))
    assert not r.accepted and not r.exhausted
    assert accepts(m_even, parse_id(m_even, "q0 r1^4"), Fuel(5, 10)).accepted


def test_width_fuel(m_even):
    u = parse_id(m_even, "q0 | q0")
    assert accepts(m_even, u, Fuel(10, 4, 4)).accepted
    r = accepts(m_even, u, Fuel(10, 4, 3))
    assert not r.accepted and not r.exhausted


def test_register_cap_not_exhausted():
    M = parse_acm("registers 1\nstates a b qf\nfinal qf\ninc a -> a r1\ndec a r1 -> b\n")
    r = accepts(M, parse_id(M, "a"), Fuel(None, 5))
    assert not r.accepted and not r.exhausted


machine_st = st.lists(st.one_of(
    st.tuples(st.just("inc"), st.sampled_from("ab"), st.sampled_from("abf"), st.integers(1, 2)),
    st.tuples(st.just("dec"), st.sampled_from("ab"), st.sampled_from("abf"), st.integers(1, 2)),
    st.tuples(st.just("fork"), st.sampled_from("ab"), st.sampled_from("abf"), st.sampled_from("abf"))),
    min_size=1, max_size=5)


def build(rules):
    ins = []
    for kind, src, dst, extra in rules:
        if kind == "fork":
            ins.append(Instruction("fork", src, dst, dst2=extra))
        else:
            ins.append(Instruction(kind, src, dst, reg=extra))
    return Acm(2, ("a", "b", "f"), "f", tuple(ins))


@settings(max_examples=150, deadline=None)
@given(machine_st, st.sampled_from("abf"), st.integers(0, 2), st.integers(0, 2))
def test_shortest_matches_id_bfs(rules, q, n1, n2):
    M = build(rules)
    u = (Config(q, (n1, n2)),)
    expected = id_bfs(M, u, max_depth=8, max_reg=3, max_width=None)
    r = accepts(M, u, Fuel(8, 3))
    if expected is None:
        assert not r.accepted
    else:
        assert r.accepted and len(r.trace) == expected


@settings(max_examples=100, deadline=None)
@given(machine_st, st.tuples(st.sampled_from("abf"), st.integers(0, 2), st.integers(0, 2)),
       st.tuples(st.sampled_from("abf"), st.integers(0, 2), st.integers(0, 2)))
def test_join_splitting(rules, c1, c2):
    M = build(rules)
    u, v = Config(c1[0], c1[1:]), Config(c2[0], c2[1:])
    fuel = Fuel(None, 4)
    ru, rv, ruv = accepts(M, (u,), fuel), accepts(M, (v,), fuel), accepts(M, (u, v), fuel)
    assert ruv.accepted == (ru.accepted and rv.accepted)
    if ruv.accepted:
        assert len(ruv.trace) == len(ru.trace) + len(rv.trace)


def test_shared_graph_reuse(m_even):
    g = ConfigGraph(m_even, 10)
    assert accepts(m_even, parse_id(m_even, "q0 r1^6"), graph=g).accepted
    assert not accepts(m_even, parse_id(m_even, "q0 r1^5"), graph=g).accepted


# ---------------------------------------------------------------- ambient steps

def test_register_monomials():
    assert list(register_monomials(1, 2)) == [(0,), (1,), (2,)]
    assert len(register_monomials(2, 2)) == 6


def test_ambient_schema_iii():
    steps = ambient_config_steps([(2,), (4,)], Config("q0", (3,)), 3)
    got = {format_id(make_id(ch)) for _, ch in steps}
    # q r1^(n+2m) v q r1^(n+4m) for n + m = 3, m >= 1
    assert got == {"q0 r1^4 | q0 r1^6", "q0 r1^5 | q0 r1^9", "q0 r1^6 | q0 r1^12"}


def test_ambient_successors_ds(m_even):
    got = [format_id(v) for v in ambient_successors(m_even, [(0,), (2,)], parse_id(m_even, "q0 r1^3"), 3)]
    assert got == ["q0 r1^2 | q0 r1^4", "q0 r1 | q0 r1^5", "q0 | q0 r1^6"]


def test_ambient_degree_cap(m_even):
    got = ambient_successors(m_even, [(2,), (4,)], parse_id(m_even, "q0 r1^3"), 1)
    assert [format_id(v) for v in got] == ["q0 r1^4 | q0 r1^6"]


def test_ambient_needs_room():
    assert ambient_config_steps([(2,), (4,)], Config("q0", (0,)), 3) == []


def test_ambient_two_variables():
    steps = ambient_config_steps([(1, 0), (0, 1)], Config("q", (1, 1)), 1)
    got = {format_id(make_id(ch)) for _, ch in steps}
    assert "q r2 | q r1" in got


# ---------------------------------------------------------------- probe

def test_probe_iii(m_even):
    rep = admissibility_probe(m_even, [(2,), (4,)], max_reg=12, degree_cap=3, states=["q0"], domain_caps=(3,))
    w = {str(c): (lbl, format_id(ch)) for c, lbl, ch in rep.witnesses}
    assert w["q0 r1^3"] == ("ambient x1:=r1", "q0 r1^4 | q0 r1^6")
    assert all(c.regs[0] % 2 for c, _, _ in rep.witnesses)


def test_probe_ds(m_even):
    rep = admissibility_probe(m_even, [(0,), (2,)], max_reg=12, degree_cap=3, states=["q0"], domain_caps=(3,))
    w = {str(c): format_id(ch) for c, _, ch in rep.witnesses}
    assert w["q0 r1^3"] == "q0 r1^2 | q0 r1^4"
    assert "q0 r1" in w


def test_probe_message_when_empty(m_even):
    rep = admissibility_probe(m_even, [(1,)], max_reg=6, degree_cap=2)
    assert rep.witnesses == [] and rep.message == "no violation found within bounds"
    assert rep.to_dict()["domainSize"] == 3 * 7
