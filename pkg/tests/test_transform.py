import pytest

from queueproc import transform as T
from queueproc.bisim import branching_bisim, inert_taus
from queueproc.core import (ANY, BOOKMARK, EPS, SEPARATOR, TAU, QConfiguration, QTransition, QTransition2,
                            QueueAutomaton, TwoQueueAutomaton, step)
from queueproc.harness import corpus, system_of, visible
from queueproc.lts import accepts, explore, qa_system
from queueproc.rtm import BLANK, Rtm


def related(x, y, depth, **kw):
    a = explore(system_of(x), visible(depth, **kw))
    b = explore(system_of(y), visible(depth, **kw))
    return branching_bisim(a, b)


# -- any-trigger elimination ------------------------------------------------


def test_star_elim_ww_shape():
    qa = corpus("ww")
    out = T.eliminate_any_triggers(qa)
    assert not any(t.trigger == ANY for t in out.transitions)
    assert set(out.data) == {"a", "b", BOOKMARK}
    assert set(qa.states) < set(out.states)
    # one rotation helper per any-trigger transition
    assert set(out.states) - set(qa.states) == {"s0__p0__1", "s0__p1__1"}


def test_star_elim_identity_without_any():
    qa = QueueAutomaton(("s", "t"), ("a",), ("d",), [QTransition("s", "a", "d", (), "t")], "s", {"t"})
    out = T.eliminate_any_triggers(qa)
    assert out.transitions == qa.transitions and out.states == qa.states
    assert out.data == ("d", BOOKMARK)


@pytest.mark.parametrize("name", ["ww", "abc", "double"])
def test_star_elim_preserves_process(name):
    qa = corpus(name)
    assert related(qa, T.eliminate_any_triggers(qa), 6).related


def test_reserved_symbol_clash():
    qa = QueueAutomaton(("s",), ("a",), ("$",), [QTransition("s", "a", ANY, ("$",), "s")], "s", ())
    with pytest.raises(T.PassError):
        T.eliminate_any_triggers(qa)


# -- normal form --------------------------------------------------------------


def test_normalize_abc_shape():
    report = T.run_pass(T.NORMALIZE, corpus("abc"))
    assert T.normal_form_violations(report.output) == []
    assert "a[*/d]" in report.certificate


def test_normalize_identity_on_normal_input():
    qa = corpus("fifo")
    out = T.normalize(qa)
    assert out.transitions == qa.transitions and out.data == qa.data


def test_normalize_abc_bisimilar_and_inert():
    qa = corpus("abc")
    out = T.normalize(qa)
    lts = explore(qa_system(out), visible(6))
    assert branching_bisim(explore(qa_system(qa), visible(6)), lts).related
    added = {(s, a, t) for s, a, t in lts.edges
             if a == TAU and (lts.configs[s].state not in qa.states or lts.configs[t].state not in qa.states)}
    assert added <= inert_taus(lts)


def test_normalize_empty_enqueue_any_uses_bookmark():
    qa = QueueAutomaton(("s", "t"), ("a", "b"), ("d",),
                        [QTransition("s", "a", ANY, ("d",), "s"), QTransition("s", "b", ANY, (), "t")], "s", {"t"})
    out = T.normalize(qa)
    assert BOOKMARK in out.data and T.normal_form_violations(out) == []
    assert related(qa, out, 5).related


# -- two queues ------------------------------------------------------------------


def test_merge_empty_automaton():
    qa2 = TwoQueueAutomaton(("s",), ("a",), ("d",), (), "s", ())
    out = T.merge_two_queues(qa2)
    assert out.transitions == (QTransition("s__pinit", TAU, EPS, (SEPARATOR,), "s"),)


def test_merge_shuttle():
    qa2 = corpus("shuttle")
    assert related(qa2, T.merge_two_queues(qa2), 6).related


def test_merge_eps_eps_gadget_by_steps():
    qa2 = TwoQueueAutomaton(("s", "t"), ("a",), ("d",), [QTransition2("s", "a", (EPS, EPS), ((), ()), "t")],
                            "s", ())
    qa = T.merge_two_queues(qa2)
    # both queues empty: tau, tau, then a
    cfg = QConfiguration("s", (SEPARATOR,))
    (a1, c1), = step(qa, cfg)
    (a2, c2), = step(qa, c1)
    (a3, c3), = step(qa, c2)
    assert (a1, a2, a3) == (TAU, TAU, "a") and c3 == QConfiguration("t", (SEPARATOR,))
    # first queue non-empty: the taus lead back to s with the queue restored
    cfg = QConfiguration("s", ("d", SEPARATOR))
    seen, todo = {cfg}, [cfg]
    while todo:
        for act, c in step(qa, todo.pop()):
            assert act == TAU
            if c not in seen:
                seen.add(c)
                todo.append(c)
    assert cfg in {c for x in seen for _, c in step(qa, x)}
    assert all(c.state != "t" for c in seen)


CLAUSES = [(a, b) for a in ("x", EPS, ANY) for b in ("x", EPS, ANY)]
ENQUEUES = [((), ()), (("y",), ()), ((), ("x", "y"))]


def _clause_harness(trig, enq):
    """Fill both queues, take the clause under test once, then drain queue 1 and queue 2 visibly.

    The clause sits alone in state s: gadgets that start with a committing tau
    are only inert when no other transition of their source is enabled.
    """
    T2 = QTransition2
    trans = [T2("p", "f1" + d, (ANY, ANY), ((d,), ()), "p") for d in "xy"]
    trans += [T2("p", "f2" + d, (ANY, ANY), ((), (d,)), "p") for d in "xy"]
    trans.append(T2("p", "ready", (ANY, ANY), ((), ()), "s"))
    trans.append(T2("s", "go", trig, enq, "t"))
    trans += [T2("t", "o1" + d, (d, ANY), ((), ()), "t") for d in "xy"]
    trans.append(T2("t", "next", (EPS, ANY), ((), ()), "u"))
    trans += [T2("u", "o2" + d, (ANY, d), ((), ()), "u") for d in "xy"]
    trans.append(T2("u", "done", (ANY, EPS), ((), ()), "v"))
    actions = sorted({t.action for t in trans})
    return TwoQueueAutomaton(("p", "s", "t", "u", "v"), actions, ("x", "y"), trans, "p", {"v"})


@pytest.mark.parametrize("enq", ENQUEUES, ids=lambda e: f"{'.'.join(e[0]) or '-'},{'.'.join(e[1]) or '-'}")
@pytest.mark.parametrize("trig", CLAUSES, ids=lambda t: ",".join(t))
def test_merge_each_clause(trig, enq):
    qa2 = _clause_harness(trig, enq)
    out = T.merge_two_queues(qa2)
    v = related(qa2, out, 6)
    assert v.related, str(v)


def test_merge_commit_gadget_not_inert_beside_other_moves():
    # (ε,ε) tests start with a tau that gives up the fill moves of the same state
    T2 = QTransition2
    trans = [T2("p", "fill", (ANY, ANY), (("x",), ()), "p"), T2("p", "go", (EPS, EPS), ((), ()), "t")]
    qa2 = TwoQueueAutomaton(("p", "t"), ("fill", "go"), ("x",), trans, "p", {"t"})
    v = related(qa2, T.merge_two_queues(qa2), 3)
    assert not v.related and v.definitive


# -- RTM <-> queue automaton --------------------------------------------------------


def test_rtm_to_qa_blank_loop():
    m = corpus("blankloop")
    assert related(m, T.rtm_to_qa(m), 8).related


def test_rtm_to_qa_writeback():
    m = corpus("writeback")
    assert related(m, T.rtm_to_qa(m), 10).related


def test_rtm_without_transitions_accepts_empty():
    m = Rtm(("up",), ("a",), ("x",), (), "up", {"up"})
    qa = T.rtm_to_qa(m)
    assert accepts(qa, ())
    assert qa.initial == "up__pinit"


def test_qa_to_rtm_eps_only():
    qa = QueueAutomaton(("s", "t"), ("a",), ("d",), [QTransition("s", "a", EPS, (), "t")], "s", {"t"})
    rtm = T.qa_to_rtm(qa)
    assert len(rtm.transitions) == 1
    (t,) = rtm.transitions
    assert (t.read, t.write) == (BLANK, BLANK)


def test_qa_to_rtm_fifo():
    qa = corpus("fifo")
    assert related(qa, T.qa_to_rtm(qa), 6).related


def test_round_trip_abc():
    qa = corpus("abc")
    back = T.rtm_to_qa(T.qa_to_rtm(qa))
    assert related(qa, back, 6).related


def test_round_trip_helper_names_disjoint():
    qa = corpus("abc")
    rtm = T.qa_to_rtm(qa)
    back = T.rtm_to_qa(rtm)
    assert len(set(back.states)) == len(back.states)
    assert any("__pp" in s for s in back.states)


# -- reports ---------------------------------------------------------------------


@pytest.mark.parametrize("name,src", [(T.STAR_ELIM, "ww"), (T.NORMALIZE, "abc"), (T.MERGE, "shuttle"),
                                      (T.TO_RTM, "fifo"), (T.FROM_RTM, "writeback")])
def test_reports_declare_fresh_alphabet(name, src):
    m = corpus(src)
    report = T.run_pass(name, m)
    assert set(report.output.data) == set(m.data) | set(report.fresh_symbols)
    assert set(report.fresh_symbols) <= {BOOKMARK, SEPARATOR, BLANK}
    assert set(report.output.states) == set(m.states) | set(report.fresh_states)
    assert report.name in report.summary()


def test_run_pass_rejects_wrong_kind():
    with pytest.raises(T.PassError):
        T.run_pass(T.MERGE, corpus("ww"))
    with pytest.raises(T.PassError):
        T.run_pass("nonsense", corpus("ww"))
