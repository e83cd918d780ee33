import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queueproc.core import (ANY, EPS, AutomatonError, QConfiguration, QConfiguration2, QTransition, QTransition2,
                            QueueAutomaton, TwoQueueAutomaton, is_final, step, step2, validate)
from queueproc.harness import corpus


def test_ww_is_valid():
    qa = corpus("ww")
    assert validate(qa) == []
    assert len(qa.states) == 3
    # one transition per label: five from s0, three from s1
    assert len(qa.transitions) == 8


def test_zero_states_reported():
    qa = QueueAutomaton((), ("a",), ("a",), (), "s", ())
    assert "states empty" in validate(qa)


def test_unknown_enqueue_symbol_reported():
    qa = QueueAutomaton(("s",), ("a",), ("a", "b"), [QTransition("s", "a", ANY, ("c",), "s")], "s", ())
    assert any("'c' not in data alphabet" in p for p in validate(qa))


def test_unknown_trigger_reported():
    qa = QueueAutomaton(("s",), ("a",), ("a",), [QTransition("s", "a", "z", (), "s")], "s", ())
    assert any("trigger 'z'" in p for p in validate(qa))


def test_step_unknown_state():
    with pytest.raises(AutomatonError):
        step(corpus("ww"), QConfiguration("nowhere", ()))


def test_step_dead_state_is_empty():
    qa = QueueAutomaton(("s", "t"), ("a",), ("a",), [QTransition("s", "a", ANY, (), "t")], "s", ())
    assert step(qa, QConfiguration("t", ("a",))) == set()


def test_step_ww_from_a():
    qa = corpus("ww")
    succ = step(qa, QConfiguration("s0", ("a",)))
    assert succ == {("a", QConfiguration("s0", ("a", "a"))), ("b", QConfiguration("s0", ("b", "a"))),
                    ("a", QConfiguration("s1", ()))}


def test_enqueue_prepends_and_head_is_rightmost():
    qa = QueueAutomaton(("s",), ("a",), ("x", "y", "z"), [QTransition("s", "a", ANY, ("x", "y"), "s")], "s", ())
    assert step(qa, QConfiguration("s", ("z",))) == {("a", QConfiguration("s", ("x", "y", "z")))}


def test_is_final_ww():
    qa = corpus("ww")
    assert is_final(qa, QConfiguration("s2", ()))
    assert is_final(qa, QConfiguration("s2", ("a",)))
    assert not is_final(qa, QConfiguration("s0", ()))


# -- two queues ----------------------------------------------------------------


def _qa2(trans, data=("d", "e", "x", "y")):
    return TwoQueueAutomaton(("s", "t"), ("a",), data, trans, "s", ())


def test_step2_any_any():
    qa2 = _qa2([QTransition2("s", "a", (ANY, ANY), (("d",), ("e",)), "t")])
    assert step2(qa2, QConfiguration2("s", ("x",), ("y",))) == {("a", QConfiguration2("t", ("d", "x"), ("e", "y")))}


def test_step2_symbol_empty_gating():
    qa2 = _qa2([QTransition2("s", "a", ("d", EPS), ((), ()), "t")])
    assert step2(qa2, QConfiguration2("s", ("d",), ())) == {("a", QConfiguration2("t", (), ()))}
    assert step2(qa2, QConfiguration2("s", ("d",), ("y",))) == set()


def _naive_step2(qa2, cfg):
    """Clause-by-clause evaluation of the nine trigger combinations."""
    out = set()
    q1, q2 = cfg.queue1, cfg.queue2
    for t in qa2.outgoing(cfg.state):
        (t1, t2), (w1, w2) = t.triggers, t.enqueues
        kinds = tuple("eps" if x == EPS else "any" if x == ANY else "sym" for x in (t1, t2))
        if kinds == ("eps", "eps") and not q1 and not q2:
            out.add((t.action, QConfiguration2(t.dst, w1, w2)))
        elif kinds == ("eps", "any") and not q1:
            out.add((t.action, QConfiguration2(t.dst, w1, w2 + q2)))
        elif kinds == ("any", "eps") and not q2:
            out.add((t.action, QConfiguration2(t.dst, w1 + q1, w2)))
        elif kinds == ("any", "any"):
            out.add((t.action, QConfiguration2(t.dst, w1 + q1, w2 + q2)))
        elif kinds == ("sym", "eps") and q1[-1:] == (t1,) and not q2:
            out.add((t.action, QConfiguration2(t.dst, w1 + q1[:-1], w2)))
        elif kinds == ("eps", "sym") and not q1 and q2[-1:] == (t2,):
            out.add((t.action, QConfiguration2(t.dst, w1, w2 + q2[:-1])))
        elif kinds == ("sym", "any") and q1[-1:] == (t1,):
            out.add((t.action, QConfiguration2(t.dst, w1 + q1[:-1], w2 + q2)))
        elif kinds == ("any", "sym") and q2[-1:] == (t2,):
            out.add((t.action, QConfiguration2(t.dst, w1 + q1, w2 + q2[:-1])))
        elif kinds == ("sym", "sym") and q1[-1:] == (t1,) and q2[-1:] == (t2,):
            out.add((t.action, QConfiguration2(t.dst, w1 + q1[:-1], w2 + q2[:-1])))
    return out


SYM = st.sampled_from(["x", "y"])
TRIG = st.sampled_from(["x", "y", EPS, ANY])
WORD = st.lists(SYM, max_size=2).map(tuple)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(TRIG, TRIG, WORD, WORD), min_size=1, max_size=4), WORD, WORD)
def test_step2_matches_clause_oracle(trans, q1, q2):
    qa2 = _qa2([QTransition2("s", "a", (a, b), (u, v), "t") for a, b, u, v in trans], data=("x", "y"))
    cfg = QConfiguration2("s", q1, q2)
    assert step2(qa2, cfg) == _naive_step2(qa2, cfg)


def test_step2_shuttle_matches_oracle():
    qa2 = corpus("shuttle")
    for state in qa2.states:
        for q1 in [(), ("x",), ("y", "x")]:
            for q2 in [(), ("y",), ("x", "y")]:
                cfg = QConfiguration2(state, q1, q2)
                assert step2(qa2, cfg) == _naive_step2(qa2, cfg)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["d", "e"]), max_size=6))
def test_queue_is_fifo(word):
    qa = corpus("fifo")
    cfg = qa.initial_configuration()
    for d in word:
        (cfg,) = [c for a, c in step(qa, cfg) if a == f"i?{d}"]
    out = []
    while cfg.queue:
        (a, cfg), = [(a, c) for a, c in step(qa, cfg) if a.startswith("o!")]
        out.append(a[2:])
    assert out == word
