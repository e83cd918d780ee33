"""Basic communicating processes with abstraction (BCP_tau).

Terms are immutable and hashable; their printed form doubles as the state
identity when a term is explored into a process graph.  Actions carry a kind
(send ``c!d``, receive ``c?d``, communication ``c(d)``, plain token, tau).
The payload ``eps`` is the empty-queue probe: it communicates like a datum
but is never a member of the data alphabet.
"""

from dataclasses import dataclass
from typing import NamedTuple

from .core import ANY, BOOKMARK, EPS, TAU, QConfiguration, QTransition, QueueAutomaton, step
from .lts import ExplorationBound, FiniteLts, StepSystem, explore

EMPTY_PROBE = "eps"
SEND, RECV, COMM, PLAIN, SILENT = "send", "recv", "comm", "plain", "tau"


class AlgebraError(ValueError):
    pass


class Act(NamedTuple):
    kind: str
    port: str = ""
    payload: str = ""
    name: str = ""

    def __str__(self):
        if self.kind == SEND:
            return f"{self.port}!{self.payload}"
        if self.kind == RECV:
            return f"{self.port}?{self.payload}"
        if self.kind == COMM:
            return f"{self.port}({self.payload})"
        if self.kind == SILENT:
            return TAU
        return self.name


TAU_ACT = Act(SILENT)


def parse_action(token):
    if token == TAU:
        return TAU_ACT
    for sep, kind in (("!", SEND), ("?", RECV)):
        port, found, payload = token.partition(sep)
        if found and port and payload:
            return Act(kind, port, payload)
    if token.endswith(")") and "(" in token:
        port, _, rest = token.partition("(")
        if port and rest[:-1]:
            return Act(COMM, port, rest[:-1])
    if not token or any(c.isspace() for c in token):
        raise AlgebraError(f"bad action token {token!r}")
    return Act(PLAIN, name=token)


# -- terms -------------------------------------------------------------------


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Deadlock(Term):
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Accept(Term):
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Prefix(Term):
    action: Act
    body: Term

    def __str__(self):
        return f"{self.action}.{_atom(self.body)}"


@dataclass(frozen=True)
class Choice(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Merge(Term):
    left: Term
    right: Term

    def __str__(self):
        return f"({self.left} || {self.right})"


@dataclass(frozen=True)
class Encap(Term):
    ports: frozenset
    body: Term

    def __str__(self):
        return f"encap({{{','.join(sorted(self.ports))}}}, {self.body})"


@dataclass(frozen=True)
class Hide(Term):
    ports: frozenset
    body: Term

    def __str__(self):
        return f"hide({{{','.join(sorted(self.ports))}}}, {self.body})"


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self):
        return self.name


def _atom(t):
    return str(t) if isinstance(t, (Deadlock, Accept, Var, Choice, Merge, Prefix)) else f"({t})"


DEADLOCK = Deadlock()
ACCEPT = Accept()


def prefix(action, body):
    return Prefix(parse_action(action) if isinstance(action, str) else action, body)


def choice(*terms):
    if not terms:
        return DEADLOCK
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Choice(t, out)
    return out


def encap(ports, body):
    return Encap(frozenset([ports] if isinstance(ports, str) else ports), body)


def hide(ports, body):
    return Hide(frozenset([ports] if isinstance(ports, str) else ports), body)


class RecursiveSpec(dict):
    """Defining equations ``X = p`` (identifier -> term)."""

    def check_closed(self, extra=()):
        missing = set()
        for t in list(self.values()) + list(extra):
            missing |= free_vars(t) - set(self)
        if missing:
            raise AlgebraError(f"unbound variable(s): {', '.join(sorted(missing))}")

    def __hash__(self):
        return id(self)


def free_vars(t):
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (Prefix, Encap, Hide)):
        return free_vars(t.body)
    if isinstance(t, (Choice, Merge)):
        return free_vars(t.left) | free_vars(t.right)
    return set()


# -- operational semantics ---------------------------------------------------


class Semantics:
    """Structural operational semantics of terms under one recursive specification."""

    def __init__(self, spec):
        self.spec = spec
        self._steps = {}
        self._term = {}
        self._busy = set()

    def _lookup(self, name):
        try:
            return self.spec[name]
        except KeyError:
            raise AlgebraError(f"unbound variable {name!r}") from None

    def terminates(self, t):
        if t in self._term:
            return self._term[t]
        if isinstance(t, Accept):
            r = True
        elif isinstance(t, (Deadlock, Prefix)):
            r = False
        elif isinstance(t, Choice):
            r = self.terminates(t.left) or self.terminates(t.right)
        elif isinstance(t, Merge):
            r = self.terminates(t.left) and self.terminates(t.right)
        elif isinstance(t, (Encap, Hide)):
            r = self.terminates(t.body)
        elif isinstance(t, Var):
            if ("term", t) in self._busy:
                raise AlgebraError(f"unguarded recursion through {t.name}")
            self._busy.add(("term", t))
            try:
                r = self.terminates(self._lookup(t.name))
            finally:
                self._busy.discard(("term", t))
        else:
            raise TypeError(f"not a term: {t!r}")
        self._term[t] = r
        return r

    def steps(self, t):
        if t in self._steps:
            return self._steps[t]
        if isinstance(t, (Accept, Deadlock)):
            r = frozenset()
        elif isinstance(t, Prefix):
            r = frozenset({(t.action, t.body)})
        elif isinstance(t, Choice):
            r = self.steps(t.left) | self.steps(t.right)
        elif isinstance(t, Merge):
            left, right = self.steps(t.left), self.steps(t.right)
            out = {(a, Merge(p, t.right)) for a, p in left}
            out |= {(a, Merge(t.left, q)) for a, q in right}
            for a, p in left:
                if a.kind not in (SEND, RECV):
                    continue
                dual = RECV if a.kind == SEND else SEND
                for b, q in right:
                    if b.kind == dual and b.port == a.port and b.payload == a.payload:
                        out.add((Act(COMM, a.port, a.payload), Merge(p, q)))
            r = frozenset(out)
        elif isinstance(t, Encap):
            r = frozenset((a, Encap(t.ports, p)) for a, p in self.steps(t.body)
                          if not (a.kind in (SEND, RECV) and a.port in t.ports))
        elif isinstance(t, Hide):
            r = frozenset((TAU_ACT if a.kind == COMM and a.port in t.ports else a, Hide(t.ports, p))
                          for a, p in self.steps(t.body))
        elif isinstance(t, Var):
            if ("step", t) in self._busy:
                raise AlgebraError(f"unguarded recursion through {t.name}")
            self._busy.add(("step", t))
            try:
                r = self.steps(self._lookup(t.name))
            finally:
                self._busy.discard(("step", t))
        else:
            raise TypeError(f"not a term: {t!r}")
        self._steps[t] = r
        return r


def sos_step(t, spec=None):
    return set(Semantics(spec or RecursiveSpec()).steps(t))


def terminates(t, spec=None):
    return Semantics(spec or RecursiveSpec()).terminates(t)


def term_system(t, spec=None):
    spec = spec if spec is not None else RecursiveSpec()
    spec.check_closed([t])
    sem = Semantics(spec)
    return StepSystem(t, lambda p: {(str(a), q) for a, q in sem.steps(p)}, sem.terminates)


def term_lts(t, spec=None, bound=ExplorationBound(max_depth=6)):
    return explore(term_system(t, spec), bound)


# -- the queue ----------------------------------------------------------------


def queue_spec(data, inp="i", out="o", mid="l"):
    """Six-variable specification of the FIFO queue between ports ``inp`` and ``out``.

    ``Q<x><y>`` inputs at port x and outputs at port y; each input spawns a
    cell holding the datum in parallel with a fresh queue over the third port.
    """
    data = list(data)
    if not data:
        raise AlgebraError("queue data alphabet must be non-empty")
    ports = (inp, out, mid)
    spec = RecursiveSpec()
    for x in ports:
        for y in ports:
            if x == y:
                continue
            z = next(p for p in ports if p not in (x, y))
            me = Var(f"Q{x}{y}")
            branches = [ACCEPT, prefix(Act(SEND, y, EMPTY_PROBE), me)]
            for d in data:
                cell = choice(ACCEPT, prefix(Act(SEND, y, d), Var(f"Q{z}{y}")))
                branches.append(prefix(Act(RECV, x, d), hide(ports, encap(z, Merge(Var(f"Q{x}{z}"), cell)))))
            spec[me.name] = choice(*branches)
    return spec


def queue_automaton(data, inp="i", out="o"):
    """The one-state queue automaton that can always terminate."""
    trans = []
    for d in data:
        trans.append(QTransition("q", f"{inp}?{d}", ANY, (d,), "q"))
        trans.append(QTransition("q", f"{out}!{d}", d, (), "q"))
    trans.append(QTransition("q", f"{out}!{EMPTY_PROBE}", EPS, (), "q"))
    actions = sorted({t.action for t in trans})
    return QueueAutomaton(("q",), actions, tuple(data), trans, "q", {"q"})


# -- regular control talking to a queue ----------------------------------------


def is_normal(qa):
    for t in qa.transitions:
        if t.trigger == ANY and len(t.enqueue) == 1:
            continue
        if t.trigger != ANY and not t.enqueue:
            continue
        return False
    return True


def pick_ports(qa):
    """Queue ports not already used by the automaton's own actions."""
    inp, out = "i", "o"
    used = set()
    for a in qa.actions:
        act = parse_action(a)
        if act.kind != PLAIN and act.kind != SILENT:
            used.add(act.port)
    while inp in used or out in used:
        inp, out = "q" + inp, "q" + out
    return inp, out


def control_automaton(qa, ports=None):
    """Finite control of a normalized queue automaton as an edge list.

    Returns (initial, finals, edges) with control states named ``<s>_<d>`` for
    a cached queue head d (``ε`` for the empty queue) and helper states keyed
    by the index of the transition that created them.
    """
    if BOOKMARK in qa.data:
        raise AlgebraError(f"{BOOKMARK!r} already used as a data symbol")
    if not is_normal(qa):
        raise AlgebraError("control_of needs singleton enqueues and separate dequeues (run normalize first)")
    inp, out = ports or pick_ports(qa)
    heads = list(qa.data)
    name = lambda s, d: f"{s}_{d}"
    edges = set()
    send = lambda d: f"{inp}!{d}"
    recv = lambda d: f"{out}?{d}"
    for k, t in enumerate(qa.transitions):
        s, a, dst = t.src, t.action, t.dst
        if t.trigger == EPS:
            edges.add((name(s, "ε"), a, name(dst, "ε")))
        elif t.trigger == ANY:
            (d,) = t.enqueue
            for e in heads:
                h = f"{dst}_{e}__p{k}__1"
                edges.add((name(s, e), a, h))
                edges.add((h, send(d), name(dst, e)))
            h = f"{dst}_{d}__p{k}__1"
            edges.add((name(s, "ε"), a, h))
            edges.add((h, send(d), name(dst, d)))
        else:
            d = t.trigger
            h1, h2 = f"{s}_{d}__p{k}__1", f"{s}_{d}__p{k}__2"
            edges.add((name(s, d), a, h1))
            edges.add((h1, recv(d), h2))
            edges.add((h2, recv(EMPTY_PROBE), name(dst, "ε")))
            for e in heads:
                h3, h4, h5 = (f"{dst}_{e}__p{k}__{n}" for n in (3, 4, 5))
                edges.add((h2, recv(e), h3))
                edges.add((h3, send(BOOKMARK), h4))
                edges.add((h4, send(e), h5))
                edges.add((h5, recv(BOOKMARK), name(dst, e)))
                for f in heads:
                    h6 = f"{dst}_{e}_{f}__p{k}__6"
                    edges.add((h5, recv(f), h6))
                    edges.add((h6, send(f), h5))
    finals = {name(s, d) for s in qa.finals for d in heads + ["ε"]}
    return name(qa.initial, "ε"), finals, sorted(edges)


def _graph_system(initial, finals, edges):
    succ = {}
    for s, a, t in edges:
        succ.setdefault(s, set()).add((a, t))
    return StepSystem(initial, lambda s: succ.get(s, set()), lambda s: s in finals)


@dataclass
class ControlProcess(FiniteLts):
    """Finite control plus the names of the ports it uses to reach its queue."""

    ports: tuple = ("i", "o")


def control_of(qa, ports=None):
    """The reachable part of the regular control process."""
    ports = ports or pick_ports(qa)
    initial, finals, edges = control_automaton(qa, ports)
    lts = explore(_graph_system(initial, finals, edges), ExplorationBound())
    assert not lts.frontier
    return ControlProcess(lts.states, lts.edges, lts.root, lts.finals, lts.frontier, lts.configs, lts.levels,
                          tuple(ports))


def _split_port_label(label):
    try:
        return parse_action(label)
    except AlgebraError:
        return Act(PLAIN, name=label)


def _ports_of(control, ports):
    return tuple(ports or getattr(control, "ports", ("i", "o")))


def compose_system(control, data, ports=None):
    """Control and queue in parallel, port actions forced to synchronise and hidden."""
    inp, out = _ports_of(control, ports)
    queue = queue_automaton(list(data) + [BOOKMARK], inp, out)
    out_edges = control.out_edges()

    def successors(state):
        c, qcfg = state
        qsteps = step(queue, qcfg)
        result = set()
        for label, c2 in out_edges[c]:
            act = _split_port_label(label)
            if act.kind in (SEND, RECV) and act.port in (inp, out):
                dual = f"{act.port}{'?' if act.kind == SEND else '!'}{act.payload}"
                for qlabel, q2 in qsteps:
                    if qlabel == dual:
                        result.add((TAU, (c2, q2)))
            elif act.kind in (SEND, RECV, COMM) and act.port in (inp, out):
                raise AlgebraError(f"alphabet violation: {label}")
            else:
                result.add((label, (c2, qcfg)))
        return result

    def describe(state):
        c, qcfg = state
        return f"{control.states[c]} || {qcfg}"

    return StepSystem((control.root, QConfiguration("q", ())), successors,
                      lambda s: s[0] in control.finals, lambda s: len(s[1].queue), describe)


def compose_with_queue(control, data, bound=ExplorationBound(max_depth=8, count="visible"), ports=None):
    return explore(compose_system(control, data, ports), bound)


def control_spec(control, prefix_name="X"):
    """Recursive specification with one variable per control state."""
    spec = RecursiveSpec()
    out = control.out_edges()
    for i in range(len(control.states)):
        branches = [prefix(a, Var(f"{prefix_name}{t}")) for a, t in sorted(out[i])]
        if i in control.finals:
            branches.append(ACCEPT)
        spec[f"{prefix_name}{i}"] = choice(*branches)
    return spec, Var(f"{prefix_name}{control.root}")


def decomposition_term(control, data, ports=None, mid="l"):
    """``hide(C, encap({i,o}, X || Q^io))`` as a term over a combined specification."""
    inp, out = _ports_of(control, ports)
    while mid in (inp, out):
        mid += "l"
    spec, root = control_spec(control)
    spec.update(queue_spec(list(data) + [BOOKMARK], inp, out, mid))
    term = hide({inp, out, mid}, encap({inp, out}, Merge(root, Var(f"Q{inp}{out}"))))
    return term, spec


def communication_edges(composed, control, ports=None):
    """Tau edges of a composed graph that stem from a control/queue synchronisation."""
    inp, out = _ports_of(control, ports)
    port_moves = set()
    for s, a, t in control.edges:
        act = _split_port_label(a)
        if act.kind in (SEND, RECV) and act.port in (inp, out):
            port_moves.add((s, t))
    result = set()
    for s, a, t in composed.edges:
        if a != TAU:
            continue
        cs, ct = composed.configs[s][0], composed.configs[t][0]
        if (cs, ct) in port_moves:
            result.add((s, a, t))
    return result
