import random

from hypothesis import given, settings
from hypothesis import strategies as st

from queueproc import transform as T
from queueproc.bisim import (branching_bisim, branching_partition, inert_taus, naive_bisim, naive_relation,
                             quotient, strong_bisim, strong_partition)
from queueproc.core import TAU
from queueproc.harness import corpus, random_lts, visible
from queueproc.lts import explicit_lts, explore, qa_system


def chain(*labels, final_last=True):
    n = len(labels) + 1
    return explicit_lts(n, [(i, a, i + 1) for i, a in enumerate(labels)], 0, {n - 1} if final_last else ())


def test_self_related():
    lts = explore(qa_system(corpus("abc")), visible(4))
    assert strong_bisim(lts, lts).related
    assert branching_bisim(lts, lts).related


def test_finality_distinguishes():
    v = strong_bisim(explicit_lts(1, [], 0, {0}), explicit_lts(1, []))
    assert not v.related and v.definitive


def test_aa_vs_a():
    assert not strong_bisim(chain("a", "a"), chain("a")).related
    assert not naive_bisim(chain("a", "a"), chain("a"), branching=False)


def test_inert_tau_absorbed():
    assert branching_bisim(chain(TAU, "a"), chain("a")).related
    assert not strong_bisim(chain(TAU, "a"), chain("a")).related


def test_non_inert_tau():
    # 0 --tau--> 1, 0 --b--> 2, 1 --a--> 2: the tau loses the b option
    lts = explicit_lts(3, [(0, TAU, 1), (0, "b", 2), (1, "a", 2)], 0, {2})
    assert inert_taus(lts) == set()


def test_tau_self_loop_inert():
    lts = explicit_lts(2, [(0, TAU, 0), (0, "a", 1)], 0, {1})
    assert inert_taus(lts) == {(0, TAU, 0)}


def test_frontier_witness_not_definitive():
    a = explicit_lts(2, [(0, "a", 1)], 0, (), frontier={1})
    b = explicit_lts(2, [(0, "a", 1)], 0, {1})
    v = branching_bisim(a, b)
    assert not v.related and v.witness_touches_frontier and not v.definitive


def test_star_elimination_preserves_ww():
    qa = corpus("ww")
    a = explore(qa_system(qa), visible(6))
    b = explore(qa_system(T.eliminate_any_triggers(qa)), visible(6))
    assert branching_bisim(a, b).related


def test_normalize_adds_only_inert_taus():
    qa = corpus("abc")
    out = T.normalize(qa)
    lts = explore(qa_system(out), visible(6))
    added = {(s, a, t) for s, a, t in lts.edges
             if a == TAU and (lts.configs[s].state not in qa.states or lts.configs[t].state not in qa.states)}
    assert added and added <= inert_taus(lts)


def test_quotient_is_minimal():
    lts = chain(TAU, TAU, "a")
    q = quotient(lts)
    assert len(q) == 2 and q.edges == [(q.root, "a", 1 - q.root)]


def _agree(lts):
    n = len(lts)
    for branching, part in ((False, strong_partition), (True, branching_partition)):
        rel = naive_relation(lts, branching=branching)
        p = part(lts)
        assert all(rel[i][j] == p.same(i, j) for i in range(n) for j in range(n))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_refinement_matches_naive_oracle(seed):
    _agree(random_lts(random.Random(seed), max_states=10))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verdict_symmetric(seed):
    rng = random.Random(seed)
    a, b = random_lts(rng, max_states=8), random_lts(rng, max_states=8)
    assert branching_bisim(a, b).related == branching_bisim(b, a).related == naive_bisim(a, b)
    assert strong_bisim(a, b).related == naive_bisim(a, b, branching=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_strong_implies_branching(seed):
    rng = random.Random(seed)
    a, b = random_lts(rng, max_states=8), random_lts(rng, max_states=8)
    if strong_bisim(a, b).related:
        assert branching_bisim(a, b).related
