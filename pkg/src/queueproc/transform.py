"""Machine-to-machine passes: any-trigger elimination, normalization,
two-queue merging and the RTM <-> queue automaton translations.

Helper states are named ``<src>__p<k>__<n>`` where k is the index of the
transition that created them, so gadgets never share states.  If the input
already contains ``__p`` in a state name the marker becomes ``pp`` (and so
on), which keeps chained passes collision-free.
"""

from dataclasses import dataclass

from .core import (ANY, BOOKMARK, EPS, SEPARATOR, TAU, AutomatonError, QTransition, QueueAutomaton,
                   TwoQueueAutomaton, uses_symbol, validate)
from .rtm import BLANK, LEFT, RIGHT, Rtm, RtmTransition, validate_rtm

STAR_ELIM = "star-elim"
NORMALIZE = "normalize"
MERGE = "merge-queues"
TO_RTM = "to-rtm"
FROM_RTM = "from-rtm"
PASSES = (STAR_ELIM, NORMALIZE, MERGE, TO_RTM, FROM_RTM)


class PassError(AutomatonError):
    pass


@dataclass(frozen=True)
class PassReport:
    name: str
    fresh_symbols: tuple
    fresh_states: tuple
    output: object
    certificate: str

    def summary(self):
        return (f"{self.name}: +{len(self.fresh_states)} states, fresh symbols "
                f"{' '.join(self.fresh_symbols) or '-'}; certificate: {self.certificate}")


def _require_fresh(m, *symbols):
    for sym in symbols:
        used = sym in m.data if isinstance(m, Rtm) else uses_symbol(m, sym)
        if used:
            raise PassError(f"reserved symbol {sym!r} already used by the input")


def _tag(states):
    """Helper-name marker not occurring in any input state (``p``, ``pp``, ...)."""
    tag = "p"
    while any(f"__{tag}" in s for s in states):
        tag += "p"
    return tag


class _Builder:
    def __init__(self, states):
        self.states = list(states)
        self.taken = set(states)
        self.trans = []
        self.tag = _tag(states)

    def fresh(self, name):
        if name not in self.taken:
            self.taken.add(name)
            self.states.append(name)
        elif name not in self._fresh_names:
            raise PassError(f"helper state {name!r} collides with an input state")
        self._fresh_names.add(name)
        return name

    _fresh_names = None

    def __enter__(self):
        self._fresh_names = set()
        return self

    def __exit__(self, *exc):
        return False

    def add(self, src, action, trigger, enqueue, dst):
        self.trans.append(QTransition(src, action, trigger, tuple(enqueue), dst))

    def rotate(self, state, symbols):
        for f in symbols:
            self.add(state, TAU, f, (f,), state)


def _qa(b, m, data, initial=None):
    return QueueAutomaton(b.states, m.actions, data, b.trans, initial or m.initial, m.finals)


# -- any-trigger elimination -----------------------------------------------


def eliminate_any_triggers(qa):
    """Replace every a[*/δ] by an empty-queue copy and a $-bookmarked rotation.

    Each such transition gets its own rotation state; a single shared one
    per source state would mix up the enqueue words of different transitions.
    """
    _require_fresh(qa, BOOKMARK)
    data = tuple(qa.data)
    with _Builder(qa.states) as b:
        for k, t in enumerate(qa.transitions):
            if t.trigger != ANY:
                b.trans.append(t)
                continue
            b.add(t.src, t.action, EPS, t.enqueue, t.dst)
            h = b.fresh(f"{t.src}__{b.tag}{k}__1")
            for d in data:
                b.add(t.src, t.action, d, (d, BOOKMARK), h)
            b.rotate(h, data)
            b.add(h, TAU, BOOKMARK, t.enqueue, t.dst)
    return _qa(b, qa, data + (BOOKMARK,))


# -- normal form --------------------------------------------------------------


def is_normal(qa):
    for t in qa.transitions:
        if t.trigger == ANY and len(t.enqueue) == 1:
            continue
        if t.trigger != ANY and not t.enqueue:
            continue
        return False
    return True


def normalize(qa):
    """Rewrite to singleton enqueues a[*/d] and separate dequeues a[d/ε], a[ε/ε].

    ``$`` joins the data alphabet only if some a[*/ε] transition needs it.
    """
    _require_fresh(qa, BOOKMARK)
    data = tuple(qa.data)
    needs_bookmark = False
    with _Builder(qa.states) as b:
        for k, t in enumerate(qa.transitions):
            word = t.enqueue
            if (t.trigger == ANY and len(word) == 1) or (t.trigger != ANY and not word):
                b.trans.append(t)
                continue
            if t.trigger == ANY and not word:
                needs_bookmark = True
                h = b.fresh(f"{t.src}__{b.tag}{k}__1")
                b.add(t.src, t.action, ANY, (BOOKMARK,), h)
                b.add(h, TAU, BOOKMARK, (), t.dst)
                for d in data:
                    hd = b.fresh(f"{t.src}__{b.tag}{k}__1_{d}")
                    b.add(h, TAU, d, (), hd)
                    b.add(hd, TAU, ANY, (d,), h)
                continue
            # enqueue d_n first: it must end up closest to the head
            if t.trigger == ANY:
                first = (ANY, word[-1])
                rest = word[:-1]
            else:
                first = (t.trigger, ())
                rest = word
            chain = [b.fresh(f"{t.src}__{b.tag}{k}__{n}") for n in range(1, len(rest) + 1)]
            stops = [t.src] + chain + [t.dst]
            b.add(stops[0], t.action, first[0], first[1], stops[1])
            for n, d in enumerate(reversed(rest), 1):
                b.add(stops[n], TAU, ANY, (d,), stops[n + 1])
    return _qa(b, qa, data + ((BOOKMARK,) if needs_bookmark else ()))


def normal_form_violations(qa):
    return [t.label() for t in qa.transitions
            if not ((t.trigger == ANY and len(t.enqueue) == 1) or (t.trigger != ANY and not t.enqueue))]


# -- two queues into one ------------------------------------------------------


def merge_two_queues(qa2):
    """Encode queue contents (δ, ζ) as the single word δ≬ζ.

    Gadgets that test a queue before the visible step start with τ and, on
    failure, restore the queue and return to the source state.
    """
    _require_fresh(qa2, BOOKMARK)
    _require_fresh(qa2, SEPARATOR)
    D = tuple(qa2.data)
    S, B = SEPARATOR, BOOKMARK
    with _Builder(qa2.states) as b:
        start = f"{qa2.initial}__{b.tag}init"
        b.fresh(start)
        b.add(start, TAU, EPS, (S,), qa2.initial)
        for k, t in enumerate(qa2.transitions):
            s, a, dst = t.src, t.action, t.dst
            (t1, t2), (w1, w2) = t.triggers, t.enqueues
            h = lambda n: b.fresh(f"{s}__{b.tag}{k}__{n}")
            if (t1, t2) == (ANY, ANY):
                h1, h2 = h(1), h(2)
                b.add(s, a, ANY, (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, S, (S,) + w2, h2)
                b.rotate(h2, D)
                b.add(h2, TAU, B, w1, dst)
            elif (t1, t2) == (ANY, EPS):
                h1 = h(1)
                b.add(s, a, S, (S,) + w2 + (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, B, w1, dst)
            elif (t1, t2) == (EPS, EPS):
                h1, h2, h3 = h(1), h(2), h(3)
                b.add(s, TAU, S, (S, B), h1)
                b.add(h1, TAU, B, (), h2)
                b.add(h2, a, S, w1 + (S,) + w2, dst)
                for d in D:
                    b.add(h1, TAU, d, (d,), h3)
                b.rotate(h3, D)
                b.add(h3, TAU, B, (), s)
            elif (t1, t2) == (EPS, ANY):
                h1, h2, h3 = h(1), h(2), h(3)
                b.add(s, TAU, ANY, (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, S, (), h2)
                b.add(h2, a, B, w1 + (S,) + w2, dst)
                for d in D:
                    b.add(h2, TAU, d, (d, S), h3)
                b.rotate(h3, D)
                b.add(h3, TAU, B, (), s)
            elif t1 == ANY:  # (*, d)
                h1, h2 = h(1), h(2)
                b.add(s, a, t2, (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, S, (S,) + w2, h2)
                b.rotate(h2, D)
                b.add(h2, TAU, B, w1, dst)
            elif t1 == EPS:  # (ε, d)
                d = t2
                h1, h2, h3, h5 = h(1), h(2), h(3), h(5)
                b.add(s, TAU, d, (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, S, (), h2)
                b.add(h2, a, B, w1 + (S,) + w2, dst)
                for f in D:
                    b.add(h2, TAU, f, (f, S), h3)
                b.rotate(h3, D)
                # put the dequeued d back before returning
                b.add(h3, TAU, B, (d, B), h5)
                b.rotate(h5, D + (S,))
                b.add(h5, TAU, B, (), s)
            elif t2 == ANY:  # (d, *)
                d = t1
                h1, h2, h3, h4 = h(1), h(2), h(3), h(4)
                b.add(s, TAU, ANY, (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, S, (), h2)
                b.add(h2, a, d, (S,) + w2, h3)
                b.rotate(h3, D)
                b.add(h3, TAU, B, w1, dst)
                b.add(h1, TAU, B, (), s)
                b.add(h4, TAU, B, (), s)
                b.add(h2, TAU, B, (S,), s)
                for e in D:
                    if e != d:
                        b.add(h2, TAU, e, (e, S), h4)
                b.rotate(h4, D)
            elif t2 == EPS:  # (d, ε)
                d = t1
                h1, h2, h3 = h(1), h(2), h(3)
                b.add(s, TAU, S, (B,), h1)
                b.add(h1, a, d, (S,) + w2, h2)
                b.rotate(h2, D)
                b.add(h2, TAU, B, w1, dst)
                b.add(h1, TAU, B, (S,), s)
                b.add(h3, TAU, B, (), s)
                for e in D:
                    if e != d:
                        b.add(h1, TAU, e, (e, S), h3)
                b.rotate(h3, D)
            else:  # (d, e)
                d, e = t1, t2
                h1, h2, h3, h4, h5 = h(1), h(2), h(3), h(4), h(5)
                b.add(s, TAU, e, (B,), h1)
                b.rotate(h1, D)
                b.add(h1, TAU, S, (), h2)
                b.add(h2, a, d, (S,) + w2, h3)
                b.rotate(h3, D)
                b.add(h3, TAU, B, w1, dst)
                for g in D:
                    if g != d:
                        b.add(h2, TAU, g, (g, S), h4)
                b.rotate(h4, D)
                # failure: re-enqueue e behind the bookmark and rotate home
                b.add(h4, TAU, B, (e, B), h5)
                b.add(h2, TAU, B, (e, B, S), h5)
                b.rotate(h5, D + (S,))
                b.add(h5, TAU, B, (), s)
    return QueueAutomaton(b.states, qa2.actions, D + (S, B), b.trans, start, qa2.finals)


# -- RTM <-> queue automaton ----------------------------------------------------


def rtm_to_qa(m):
    """Queue automaton whose configuration (s, ζ^R ≬ δ d) mirrors tape δ ď ζ."""
    _require_fresh(m, BOOKMARK)
    _require_fresh(m, SEPARATOR)
    S, B = SEPARATOR, BOOKMARK
    cells = tuple(m.data) + (BLANK,)
    with _Builder(m.states) as b:
        start = f"{m.initial}__{b.tag}init"
        b.fresh(start)
        b.add(start, TAU, EPS, (S, BLANK), m.initial)
        for k, t in enumerate(m.transitions):
            s, a, d, e, dst = t.src, t.action, t.read, t.write, t.dst
            h = lambda n: b.fresh(f"{s}__{b.tag}{k}__{n}")
            if t.move == LEFT:
                h1, h2 = h(1), h(2)
                b.add(s, a, d, (B,), h1)
                b.rotate(h1, cells)
                b.add(h1, TAU, S, (e, S, BLANK), h2)
                b.rotate(h2, cells)
                b.add(h2, TAU, B, (), dst)
            else:
                h1, h2, h4 = h(1), h(2), h(4)
                b.add(s, a, d, (e, B), h1)
                b.rotate(h1, cells)
                b.add(h1, TAU, S, (S,), h2)
                for g in cells:
                    h3 = b.fresh(f"{s}__{b.tag}{k}__3_{g}")
                    b.add(h2, TAU, g, (), h3)
                    b.rotate(h3, cells)
                    b.add(h3, TAU, B, (g, B), h4)
                b.add(h2, TAU, B, (BLANK, B), h4)
                b.rotate(h4, cells + (S,))
                b.add(h4, TAU, B, (), dst)
    data = tuple(m.data) + (BLANK, S, B)
    return QueueAutomaton(b.states, m.actions, data, b.trans, start, m.finals)


def qa_to_rtm(qa):
    """RTM whose configuration (s, □δď□) mirrors queue δd (normalizes first)."""
    if BLANK in qa.data:
        raise PassError(f"blank {BLANK!r} cannot be a queue symbol here")
    if not is_normal(qa):
        qa = normalize(qa)
    states = list(qa.states)
    taken = set(states)
    trans = []
    tag = _tag(states)

    def fresh(name):
        if name in taken:
            raise PassError(f"helper state {name!r} collides with an input state")
        taken.add(name)
        states.append(name)
        return name

    for k, t in enumerate(qa.transitions):
        if t.trigger == EPS:
            trans.append(RtmTransition(t.src, t.action, BLANK, BLANK, LEFT, t.dst))
        elif t.trigger != ANY:
            trans.append(RtmTransition(t.src, t.action, t.trigger, BLANK, LEFT, t.dst))
        else:
            (d,) = t.enqueue
            back, walk = fresh(f"{t.src}__{tag}{k}__1"), fresh(f"{t.src}__{tag}{k}__2")
            trans.append(RtmTransition(t.src, t.action, BLANK, d, RIGHT, back))
            trans.append(RtmTransition(back, TAU, BLANK, BLANK, LEFT, t.dst))
            trans.append(RtmTransition(walk, TAU, BLANK, d, RIGHT, back))
            for e in qa.data:
                trans.append(RtmTransition(t.src, t.action, e, e, LEFT, walk))
                trans.append(RtmTransition(walk, TAU, e, e, LEFT, walk))
                trans.append(RtmTransition(back, TAU, e, e, RIGHT, back))
    return Rtm(states, qa.actions, qa.data, trans, qa.initial, qa.finals)


# -- reports ----------------------------------------------------------------


_FUNCS = {STAR_ELIM: eliminate_any_triggers, NORMALIZE: normalize, MERGE: merge_two_queues,
          TO_RTM: qa_to_rtm, FROM_RTM: rtm_to_qa}

_INPUT_KIND = {STAR_ELIM: QueueAutomaton, NORMALIZE: QueueAutomaton, MERGE: TwoQueueAutomaton,
               TO_RTM: QueueAutomaton, FROM_RTM: Rtm}


def _certify(name, out):
    if name == TO_RTM:
        problems = validate_rtm(out)
        cert = "well-formed RTM"
    else:
        problems = validate(out)
        cert = "well-formed one-queue automaton"
    if problems:
        raise PassError(f"{name}: output ill-formed: {problems[0]}")
    if name == STAR_ELIM:
        if any(t.trigger == ANY for t in out.transitions):
            raise PassError("star-elim: output still has any-triggers")
        cert = "no any-trigger transitions"
    elif name == NORMALIZE:
        bad = normal_form_violations(out)
        if bad:
            raise PassError(f"normalize: transition {bad[0]} is not a[*/d], a[d/ε] or a[ε/ε]")
        cert = "only a[*/d], a[d/ε], a[ε/ε] transitions"
    return cert


def run_pass(name, m):
    if name not in _FUNCS:
        raise PassError(f"unknown pass {name!r} (choose from {', '.join(PASSES)})")
    if not isinstance(m, _INPUT_KIND[name]):
        raise PassError(f"{name} expects a {_INPUT_KIND[name].__name__}, got {type(m).__name__}")
    out = _FUNCS[name](m)
    cert = _certify(name, out)
    fresh_syms = tuple(d for d in out.data if d not in m.data)
    if not set(m.data) <= set(out.data) and name != TO_RTM:
        raise PassError(f"{name}: data alphabet shrank")
    fresh_states = tuple(s for s in out.states if s not in set(m.states))
    return PassReport(name, fresh_syms, fresh_states, out, cert)
