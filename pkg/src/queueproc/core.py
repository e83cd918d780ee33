"""Queue automata with one or two FIFO queues.

Queue words are tuples of symbols.  The head of a queue is the LAST element
of the tuple and an enqueued block is prepended, so a step
``(s, zeta + (d,)) --a--> (t, delta + zeta)`` is literally tuple arithmetic.
"""

import re
from dataclasses import dataclass
from typing import NamedTuple

TAU = "tau"
EPS = "eps"
ANY = "any"
BOOKMARK = "$"
SEPARATOR = "≬"

RESERVED_TOKENS = frozenset({EPS, ANY, TAU, "-"})
_SYMBOL_RE = re.compile(r"^[^\s.,#]+$")


class AutomatonError(ValueError):
    """Raised for ill-formed automata or configurations."""


def is_symbol(token):
    return isinstance(token, str) and bool(_SYMBOL_RE.match(token)) and token not in RESERVED_TOKENS


def is_action(token):
    return isinstance(token, str) and bool(token) and not any(c.isspace() for c in token)


def format_word(word):
    return ".".join(word) if word else "ε"


class QTransition(NamedTuple):
    src: str
    action: str
    trigger: str
    enqueue: tuple
    dst: str

    def label(self):
        trig = {EPS: "ε", ANY: "*"}.get(self.trigger, self.trigger)
        return f"{self.action}[{trig}/{format_word(self.enqueue)}]"


class QTransition2(NamedTuple):
    src: str
    action: str
    triggers: tuple
    enqueues: tuple
    dst: str

    def label(self):
        trig = ",".join({EPS: "ε", ANY: "*"}.get(t, t) for t in self.triggers)
        enq = ",".join(format_word(e) for e in self.enqueues)
        return f"{self.action}[({trig})/({enq})]"


class QConfiguration(NamedTuple):
    state: str
    queue: tuple = ()

    def __str__(self):
        return f"({self.state}, {format_word(self.queue)})"


class QConfiguration2(NamedTuple):
    state: str
    queue1: tuple = ()
    queue2: tuple = ()

    def __str__(self):
        return f"({self.state}, {format_word(self.queue1)}, {format_word(self.queue2)})"


def _check_trigger(trigger, data, where, problems):
    if trigger not in (EPS, ANY) and trigger not in data:
        problems.append(f"{where}: trigger {trigger!r} not in data alphabet")


def _check_enqueue(word, data, where, problems):
    for sym in word:
        if sym not in data:
            problems.append(f"{where}: symbol {sym!r} not in data alphabet")


def _validate_common(m, problems):
    if not m.states:
        problems.append("states empty")
    if not m.actions:
        problems.append("actions empty")
    if not m.data:
        problems.append("data empty")
    for sym in m.data:
        if not is_symbol(sym):
            problems.append(f"invalid data symbol {sym!r}")
    for act in m.actions:
        if not is_action(act) or act == TAU:
            problems.append(f"invalid action {act!r}")
    if len(set(m.states)) != len(m.states):
        problems.append("duplicate state names")
    if m.initial not in m.states:
        problems.append(f"initial state {m.initial!r} unknown")
    for f in m.finals:
        if f not in m.states:
            problems.append(f"final state {f!r} unknown")


def _validate_transition_ends(t, k, m, problems):
    where = f"transition {k}"
    if t.src not in m.states:
        problems.append(f"{where}: unknown state {t.src!r}")
    if t.dst not in m.states:
        problems.append(f"{where}: unknown state {t.dst!r}")
    if t.action != TAU and t.action not in m.actions:
        problems.append(f"{where}: action {t.action!r} not in action alphabet")
    return where


@dataclass(frozen=True)
class QueueAutomaton:
    states: tuple
    actions: tuple
    data: tuple
    transitions: tuple
    initial: str
    finals: frozenset

    def __post_init__(self):
        for name in ("states", "actions", "data", "transitions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "finals", frozenset(self.finals))
        by_src = {}
        for t in self.transitions:
            by_src.setdefault(t.src, []).append(t)
        object.__setattr__(self, "_by_src", by_src)
        object.__setattr__(self, "_state_set", frozenset(self.states))

    def outgoing(self, state):
        return self._by_src.get(state, ())

    def initial_configuration(self):
        return QConfiguration(self.initial, ())


@dataclass(frozen=True)
class TwoQueueAutomaton:
    states: tuple
    actions: tuple
    data: tuple
    transitions: tuple
    initial: str
    finals: frozenset

    def __post_init__(self):
        for name in ("states", "actions", "data", "transitions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "finals", frozenset(self.finals))
        by_src = {}
        for t in self.transitions:
            by_src.setdefault(t.src, []).append(t)
        object.__setattr__(self, "_by_src", by_src)
        object.__setattr__(self, "_state_set", frozenset(self.states))

    def outgoing(self, state):
        return self._by_src.get(state, ())

    def initial_configuration(self):
        return QConfiguration2(self.initial, (), ())


def validate(qa):
    """Return a list of violated well-formedness conditions (empty if fine)."""
    problems = []
    _validate_common(qa, problems)
    data = set(qa.data)
    for k, t in enumerate(qa.transitions):
        where = _validate_transition_ends(t, k, qa, problems)
        if isinstance(qa, TwoQueueAutomaton):
            if len(t.triggers) != 2 or len(t.enqueues) != 2:
                problems.append(f"{where}: expected a trigger pair and an enqueue pair")
                continue
            for trig in t.triggers:
                _check_trigger(trig, data, where, problems)
            for word in t.enqueues:
                _check_enqueue(word, data, where, problems)
        else:
            _check_trigger(t.trigger, data, where, problems)
            _check_enqueue(t.enqueue, data, where, problems)
    return problems


def _require_state(m, state):
    if state not in m._state_set:
        raise AutomatonError(f"unknown state {state!r}")


def _fire(trigger, queue):
    """Remaining queue after testing ``trigger``, or None if it is not enabled."""
    if trigger == ANY:
        return queue
    if trigger == EPS:
        return queue if not queue else None
    if queue and queue[-1] == trigger:
        return queue[:-1]
    return None


def step(qa, cfg):
    """All (action, successor) pairs of a configuration of a one-queue automaton."""
    _require_state(qa, cfg.state)
    out = set()
    for t in qa.outgoing(cfg.state):
        rest = _fire(t.trigger, cfg.queue)
        if rest is not None:
            out.add((t.action, QConfiguration(t.dst, t.enqueue + rest)))
    return out


def step2(qa2, cfg):
    """All (action, successor) pairs of a configuration of a two-queue automaton."""
    _require_state(qa2, cfg.state)
    out = set()
    for t in qa2.outgoing(cfg.state):
        rest1 = _fire(t.triggers[0], cfg.queue1)
        if rest1 is None:
            continue
        rest2 = _fire(t.triggers[1], cfg.queue2)
        if rest2 is None:
            continue
        out.add((t.action, QConfiguration2(t.dst, t.enqueues[0] + rest1, t.enqueues[1] + rest2)))
    return out


def is_final(qa, cfg):
    return cfg.state in qa.finals


def queue_length(cfg):
    if isinstance(cfg, QConfiguration2):
        return len(cfg.queue1) + len(cfg.queue2)
    return len(cfg.queue)


def uses_symbol(m, symbol):
    if symbol in m.data:
        return True
    for t in m.transitions:
        words = t.enqueues if isinstance(t, QTransition2) else (t.enqueue,)
        trigs = t.triggers if isinstance(t, QTransition2) else (t.trigger,)
        if symbol in trigs or any(symbol in w for w in words):
            return True
    return False
