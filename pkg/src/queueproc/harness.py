"""Reproducibility harness: re-runs every acceptance check against the corpus."""

import itertools
import random
import time
from dataclasses import dataclass
from importlib import resources

from . import transform as T
from .algebra import Var, compose_with_queue, communication_edges, control_of, queue_automaton, queue_spec, term_lts
from .bisim import branching_bisim, inert_taus, naive_relation, branching_partition, strong_partition
from .compute import COMPLETED, run_function
from .core import TAU, QueueAutomaton, TwoQueueAutomaton, step
from .formats import parse_any
from .lts import (VISIBLE, ExplorationBound, accepts, explicit_lts, explore, qa2_system, qa_system)
from .rtm import rtm_system

CORPUS = {
    "ww": ("ww.qa", "language { ww | w in {a,b}* }"),
    "abc": ("abc.qa", "language { a^n b^n c^n | n > 0 }"),
    "fifo": ("fifo.qa", "queue that can always terminate"),
    "fifo_strict": ("fifo_strict.qa", "queue that terminates only when empty"),
    "double": ("double.qa", "computes f(w) = ww"),
    "compare": ("compare.qa", "binary comparator x>y"),
    "arun": ("arun.qa", "bounded branching, infinitely branching quotient"),
    "shuttle": ("shuttle.qa2", "two-queue shuttle"),
    "blankloop": ("blankloop.rtm", "RTM looping on a blank tape"),
    "writeback": ("writeback.rtm", "RTM writing x and reading it back"),
}


def corpus_text(name):
    return resources.files("queueproc").joinpath("corpus", CORPUS[name][0]).read_text(encoding="utf-8")


def corpus(name):
    return parse_any(corpus_text(name))[1]


def system_of(m):
    if isinstance(m, QueueAutomaton):
        return qa_system(m)
    if isinstance(m, TwoQueueAutomaton):
        return qa2_system(m)
    return rtm_system(m)


def visible(depth, **kw):
    return ExplorationBound(max_depth=depth, count=VISIBLE, **kw)


@dataclass
class Outcome:
    ok: bool
    detail: str


# -- helpers --------------------------------------------------------------------


def _added_taus(lts, fresh):
    fresh = set(fresh)
    return {(s, a, t) for s, a, t in lts.edges
            if a == TAU and (lts.configs[s].state in fresh or lts.configs[t].state in fresh)}


def _pass_check(name, pass_name, depth, check_shape=False):
    src = corpus(name)
    rep = T.run_pass(pass_name, src)
    a = explore(system_of(src), visible(depth))
    b = explore(system_of(rep.output), visible(depth))
    verdict = branching_bisim(a, b)
    added = _added_taus(b, rep.fresh_states) if not isinstance(rep.output, T.Rtm) else set()
    not_inert = added - inert_taus(b)
    ok = verdict.related and not not_inert
    detail = f"{name}: {len(a)} vs {len(b)} states, {'related' if verdict.related else 'DISTINGUISHED'}"
    if added:
        detail += f", {len(added) - len(not_inert)}/{len(added)} added tau inert"
    if check_shape:
        detail += f", shape: {rep.certificate}"
    return ok, detail


def _collect(results):
    ok = all(r[0] for r in results)
    return Outcome(ok, "; ".join(r[1] for r in results))


def _words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# -- the criteria ---------------------------------------------------------------


def c1_ww_language():
    qa = corpus("ww")
    bound = ExplorationBound(max_depth=20, max_queue_len=6)
    wrong, n = [], 0
    for w in _words("ab", 6):
        n += 1
        expected = len(w) % 2 == 0 and w[: len(w) // 2] == w[len(w) // 2:]
        if bool(accepts(qa, w, bound)) != expected:
            wrong.append("".join(w))
    return Outcome(not wrong and n == 127, f"{n} words, {len(wrong)} misclassified {wrong[:5]}")


def c2_abc_language():
    qa = corpus("abc")
    bound = ExplorationBound(max_depth=30, max_queue_len=9)
    accepted = {"".join(w) for w in _words("abc", 9) if accepts(qa, w, bound)}
    expected = {"abc", "aabbcc", "aaabbbccc"}
    return Outcome(accepted == expected, f"accepted {sorted(accepted, key=len)}")


def _dequeue_orders(qa, cfg, limit=12):
    """All maximal sequences of o!d outputs (tau allowed, o!eps ignored) from cfg."""
    orders, todo, seen = set(), [(cfg, ())], set()
    while todo:
        c, out = todo.pop()
        if (c, out) in seen:
            continue
        seen.add((c, out))
        nxt = [(a, c2) for a, c2 in step(qa, c) if a == TAU or (a.startswith("o!") and a != "o!eps")]
        nxt = [(a, c2) for a, c2 in nxt if (c2, out) != (c, out)]
        if not nxt or len(out) >= limit:
            orders.add(out)
        for a, c2 in nxt:
            todo.append((c2, out if a == TAU else out + (a[2:],)))
    # keep only maximal ones
    return {o for o in orders if not any(len(p) > len(o) and p[: len(o)] == o for p in orders)}


def c3_fifo():
    problems = []
    for name in ("fifo", "fifo_strict"):
        qa = corpus(name)
        for u in _words("de", 3):
            cfg = qa.initial_configuration()
            for d in u:
                succ = [c for a, c in step(qa, cfg) if a == f"i?{d}"]
                if len(succ) != 1:
                    problems.append(f"{name}: i?{d} not unique")
                    break
                cfg = succ[0]
            orders = _dequeue_orders(qa, cfg)
            if orders != {tuple(u)}:
                problems.append(f"{name} {''.join(u) or 'ε'}: {orders}")
    right = corpus("fifo_strict")
    lts = explore(qa_system(right), ExplorationBound(max_depth=8))
    bad_final = [lts.states[s] for s in lts.finals if lts.configs[s].queue]
    if bad_final:
        problems.append(f"fifo_strict final with non-empty queue: {bad_final[:3]}")
    return Outcome(not problems, f"15 enqueue words x 2 queues; {len(lts.finals)} final states all empty-queued"
                   if not problems else "; ".join(problems[:5]))


SINGLE = ("ww", "abc", "fifo", "double", "compare")


def c4_star_elim():
    return _collect([_pass_check(n, T.STAR_ELIM, 8) for n in SINGLE])


def c5_normalize():
    return _collect([_pass_check(n, T.NORMALIZE, 10, check_shape=True) for n in SINGLE])


def c6_merge():
    src = corpus("shuttle")
    out = T.merge_two_queues(src)
    a = explore(qa2_system(src), visible(8))
    b = explore(qa_system(out), visible(8))
    v = branching_bisim(a, b)
    detail = f"{len(a)} vs {len(b)} states, " + ("related" if v.related else str(v).splitlines()[0])
    return Outcome(v.related, detail)


def _related(x, y, depth, label, max_states=200_000):
    a = explore(system_of(x), visible(depth, max_states=max_states))
    b = explore(system_of(y), visible(depth, max_states=max_states))
    v = branching_bisim(a, b)
    return v.related, f"{label} @{depth}: {len(a)} vs {len(b)} {'related' if v.related else 'DISTINGUISHED'}"


RTM_DEPTHS = {"blankloop": 12, "writeback": 14}
QA_DEPTHS = {"abc": 8, "fifo": 8}
# the round trip leaves one blank per left move on the tape, so its graph is large
ROUND_TRIP_STATES = 2_000_000


def c7_rtm_qa():
    results = []
    for name, depth in RTM_DEPTHS.items():
        m = corpus(name)
        results.append(_related(m, T.rtm_to_qa(m), depth, f"{name} rtm->qa"))
    for name, depth in QA_DEPTHS.items():
        q = corpus(name)
        rtm = T.qa_to_rtm(q)
        results.append(_related(q, rtm, depth, f"{name} qa->rtm"))
        results.append(_related(q, T.rtm_to_qa(rtm), 8, f"{name} round trip", ROUND_TRIP_STATES))
    return _collect(results)


def c8_negative():
    a = explore(qa_system(corpus("ww")), visible(8))
    b = explore(qa_system(corpus("abc")), visible(8))
    v = branching_bisim(a, b)
    return Outcome(not v.related and v.definitive, str(v).splitlines()[0] + (
        f"; witness: {v.witness[0]}" if v.witness else ""))


def c9_compute():
    problems = []
    doubler = corpus("double")
    words = list(_words("ab", 3))
    for w in words:
        r = run_function(doubler, w)
        if r.status != COMPLETED or r.output != w + w:
            problems.append(f"double {''.join(w)} -> {r.output_word} ({r.status})")
    comparator = corpus("compare")
    pairs = [(x, y) for n in range(1, 4) for x in _words("01", n) if len(x) == n for y in _words("01", n)
             if len(y) == n]
    early = 0
    for x, y in pairs:
        r = run_function(comparator, x + (">",) + y)
        want = ("yes",) if int("".join(x), 2) > int("".join(y), 2) else ("no",)
        if r.status != COMPLETED or r.output != want:
            problems.append(f"compare {''.join(x)}>{''.join(y)} -> {r.output} ({r.status})")
        if x[0] != y[0]:
            if r.unread != len(y) - 1:
                problems.append(f"compare {''.join(x)}>{''.join(y)}: {r.unread} unread, expected {len(y) - 1}")
            early += 1
    return Outcome(not problems, f"{len(words)} doubling inputs, {len(pairs)} comparison pairs ({early} decided early)"
                   if not problems else "; ".join(problems[:5]))


def c10_queue_spec():
    spec = queue_spec(["d"])
    a = term_lts(Var("Qio"), spec, visible(6))
    b = explore(qa_system(queue_automaton(["d"])), visible(6))
    v = branching_bisim(a, b)
    detail = f"{len(a)} vs {len(b)} states, " + str(v).splitlines()[0]
    if not v.related:
        detail += "; " + " / ".join(line.strip() for line in v.witness[-2:])
    return Outcome(v.related, detail)


def c11_decomposition():
    results = []
    for name in ("abc", "fifo"):
        q = T.normalize(corpus(name))
        control = control_of(q)
        p = compose_with_queue(control, q.data, visible(8))
        ref = explore(qa_system(q), visible(8))
        v = branching_bisim(p, ref)
        comm = communication_edges(p, control)
        not_inert = comm - inert_taus(p)
        ok = v.related and not not_inert
        results.append((ok, f"{name}: {len(p)} vs {len(ref)} {'related' if v.related else 'DISTINGUISHED'}, "
                            f"{len(comm) - len(not_inert)}/{len(comm)} communication tau inert"))
    return _collect(results)


def random_lts(rng, max_states=20, max_actions=3, tau_density=0.3):
    n = rng.randint(1, max_states)
    acts = ["a", "b", "c"][: rng.randint(1, max_actions)]
    edges = set()
    for _ in range(rng.randint(0, 2 * n)):
        a = TAU if rng.random() < tau_density else rng.choice(acts)
        edges.add((rng.randrange(n), a, rng.randrange(n)))
    finals = {i for i in range(n) if rng.random() < 0.3}
    return explicit_lts(n, edges, 0, finals)


def c12_bisim_self_check(count=200, seed=2024):
    rng = random.Random(seed)
    bad = 0
    for _ in range(count):
        lts = random_lts(rng)
        n = len(lts.states)
        for branching, part in ((False, strong_partition), (True, branching_partition)):
            rel = naive_relation(lts, branching=branching)
            p = part(lts)
            if any(rel[i][j] != p.same(i, j) for i in range(n) for j in range(n)):
                bad += 1
    return Outcome(bad == 0, f"{count} random graphs (seed {seed}), {bad} disagreements over strong+branching")


def c13_arun():
    qa = corpus("arun")
    sizes, runs, problems = {}, {}, []
    for k in range(2, 7):
        lts = explore(qa_system(qa), ExplorationBound(max_queue_len=k))
        sizes[k] = len(lts)
        bound = ExplorationBound(max_depth=4 * k + 10, max_queue_len=k)
        best = max((m for m in range(0, k + 3) if accepts(qa, ("a",) * m, bound)), default=0)
        runs[k] = best
        if best < k:
            problems.append(f"k={k}: longest accepted a-run {best}")
    diffs = {sizes[k + 1] - sizes[k] for k in range(2, 6)}
    if len(diffs) != 1 or diffs == {0}:
        problems.append(f"configuration counts not linear: {sizes}")
    return Outcome(not problems, f"configurations {sizes}, longest a-run {runs}" if not problems
                   else "; ".join(problems))


@dataclass(frozen=True)
class Criterion:
    number: int
    tags: tuple
    title: str
    run: object


CRITERIA = [
    Criterion(1, ("language",), "language of the ww automaton", c1_ww_language),
    Criterion(2, ("language",), "language of the a^n b^n c^n automaton", c2_abc_language),
    Criterion(3, ("language", "queue"), "queue automata are FIFO", c3_fifo),
    Criterion(4, ("transform", "bisim"), "any-trigger elimination preserves the process", c4_star_elim),
    Criterion(5, ("transform", "bisim"), "normalization shape and process", c5_normalize),
    Criterion(6, ("transform", "bisim"), "two-queue merge", c6_merge),
    Criterion(7, ("transform", "bisim", "rtm"), "RTM <-> queue automaton", c7_rtm_qa),
    Criterion(8, ("bisim",), "negative control ww vs a^n b^n c^n", c8_negative),
    Criterion(9, ("compute",), "function computation", c9_compute),
    Criterion(10, ("algebra", "queue"), "six-variable queue specification", c10_queue_spec),
    Criterion(11, ("algebra", "bisim"), "control plus queue decomposition", c11_decomposition),
    Criterion(12, ("bisim",), "partition refinement vs naive oracle", c12_bisim_self_check),
    Criterion(13, ("sanity",), "unbounded branching of the a-run automaton", c13_arun),
]

DEFAULTS = ("defaults: language bounds depth 20/30 with queue <= 6/9; star-elim depth 8, normalize depth 10, "
            "merge depth 8, RTM depths 12/14, QA->RTM depth 8, "
            "round trip depth 8 with up to 2e6 states (visible actions); random seed 2024")


def select(only=None):
    if not only:
        return list(CRITERIA)
    keys = {k.strip() for k in only.split(",") if k.strip()}
    return [c for c in CRITERIA if str(c.number) in keys or keys & set(c.tags)]


def run_criterion(c):
    t0 = time.perf_counter()
    try:
        out = c.run()
    except Exception as exc:  # a crash is a failure, reported rather than raised
        out = Outcome(False, f"error: {type(exc).__name__}: {exc}")
    return out, time.perf_counter() - t0


def run(only=None, echo=print):
    chosen = select(only)
    if not chosen:
        echo(f"no criterion matches {only!r}")
        return False
    echo(DEFAULTS)
    all_ok = True
    for c in chosen:
        out, secs = run_criterion(c)
        all_ok &= out.ok
        echo(f"{'PASS' if out.ok else 'FAIL'} {c.number:2d} {c.title} ({secs:.1f}s): {out.detail}")
    return all_ok
