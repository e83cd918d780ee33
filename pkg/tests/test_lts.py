import pytest

from queueproc.core import QueueAutomaton
from queueproc.harness import corpus, visible
from queueproc.lts import (ExplorationBound, ExplorationError, accepts, completed_traces, explicit_lts, explore,
                           is_deterministic, qa_system, to_dot)


def test_ww_depth2_fragment():
    lts = explore(qa_system(corpus("ww")), ExplorationBound(max_depth=2))
    assert sorted(lts.states) == sorted(["(s0, ε)", "(s0, a)", "(s0, b)", "(s1, ε)", "(s2, ε)", "(s0, a.a)",
                                         "(s0, b.a)", "(s0, a.b)", "(s0, b.b)"])
    assert {lts.states[s] for s in lts.frontier} == {"(s0, a.a)", "(s0, b.a)", "(s0, a.b)", "(s0, b.b)"}


def test_explore_is_reproducible():
    a = explore(qa_system(corpus("abc")), ExplorationBound(max_depth=5))
    b = explore(qa_system(corpus("abc")), ExplorationBound(max_depth=5))
    assert a.states == b.states and a.edges == b.edges and a.frontier == b.frontier


def test_empty_automaton_single_state():
    qa = QueueAutomaton(("s",), ("a",), ("d",), (), "s", ())
    lts = explore(qa_system(qa), ExplorationBound(max_depth=5))
    assert len(lts) == 1 and lts.edges == [] and not lts.frontier


def test_arun_queue_cap_marks_frontier():
    qa = corpus("arun")
    lts = explore(qa_system(qa), ExplorationBound(max_queue_len=3))
    for s in range(len(lts)):
        cfg = lts.configs[s]
        if len(cfg.queue) == 3 and cfg.state == "s0":
            assert s in lts.frontier


def test_visible_levels_are_uniform_frontier():
    lts = explore(qa_system(corpus("fifo")), visible(3))
    for s in range(len(lts)):
        assert (lts.levels[s] == 3) == (s in lts.frontier)


def test_root_unexpandable():
    with pytest.raises(ExplorationError):
        explore(qa_system(corpus("ww")), ExplorationBound(max_depth=3, max_states=1))


@pytest.mark.parametrize("word,ok", [("abab", True), ("aa", True), ("", True), ("aba", False), ("ab", False)])
def test_ww_accepts(word, ok):
    v = accepts(corpus("ww"), tuple(word), ExplorationBound(max_depth=12, max_queue_len=4))
    assert bool(v) == ok
    if not ok:
        assert not v.bound_hit


def test_abc_accepts():
    bound = ExplorationBound(max_depth=40, max_queue_len=8)
    assert accepts(corpus("abc"), tuple("aabbcc"), bound)
    assert not accepts(corpus("abc"), tuple("aabbc"), bound)


def test_accepts_unknown_action():
    with pytest.raises(ValueError):
        accepts(corpus("ww"), ("z",))


def test_completed_traces_single_state_queue():
    qa = corpus("fifo")
    lts = explore(qa_system(qa), ExplorationBound(max_depth=3))
    traces = completed_traces(lts, 2)
    assert {("i?d", "o!d"), ("i?d", "i?d"), ("o!eps", "o!eps")} <= traces


def test_completed_traces_unreachable_finals():
    lts = explicit_lts(2, [], 0, {1})
    assert completed_traces(lts, 3) == set()


def test_double_deterministic():
    lts = explore(qa_system(corpus("double")), ExplorationBound(max_depth=6))
    assert is_deterministic(lts).deterministic


def test_ww_nondeterministic_at_a():
    lts = explore(qa_system(corpus("ww")), ExplorationBound(max_depth=3))
    v = is_deterministic(lts)
    assert not v.deterministic
    assert "(s0, a)" in {lts.states[s] for s, _ in v.violations}


def test_trivial_lts_deterministic():
    assert is_deterministic(explicit_lts(1, [])).deterministic


def test_dot_single_node():
    dot = to_dot(explicit_lts(1, []))
    assert dot.startswith("digraph") and dot.count("label=") == 2


def test_dot_counts_match_explore():
    lts = explore(qa_system(corpus("abc")), ExplorationBound(max_depth=3))
    dot = to_dot(lts)
    assert dot.count("->") == len(lts.edges) + 1
    assert dot.count("shape=") == len(lts) + 1


def test_dump_load_roundtrip():
    lts = explore(qa_system(corpus("abc")), ExplorationBound(max_depth=4))
    back = type(lts).load(lts.dump())
    assert back.states == lts.states and back.edges == lts.edges
    assert back.finals == lts.finals and back.frontier == lts.frontier
