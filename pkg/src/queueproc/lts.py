"""Bounded process graphs.

Every machine kind (queue automata, RTMs, process terms) is explored through
a :class:`StepSystem`: a root configuration, a successor function returning
``(label, configuration)`` pairs and a finality predicate.  Configurations are
identified by their printed form.
"""

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import TAU, is_final, queue_length, step, step2

STEPS = "steps"
VISIBLE = "visible"


class ExplorationError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepSystem:
    root: object
    successors: Callable
    is_final: Callable
    size: Optional[Callable] = None
    describe: Callable = str


@dataclass(frozen=True)
class ExplorationBound:
    """Limits for :func:`explore` and :func:`accepts`.

    ``count`` selects what ``max_depth`` measures: ``"steps"`` counts every
    transition, ``"visible"`` counts only non-tau actions.  In visible mode the
    graph is unfolded by level (a state is a configuration together with the
    number of visible actions on the path that reached it), which keeps
    branching-bisimilar systems bisimilar after truncation.
    """

    max_depth: Optional[int] = None
    max_states: int = 200_000
    max_queue_len: Optional[int] = None
    count: str = STEPS

    def __post_init__(self):
        for name in ("max_depth", "max_queue_len"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.max_states <= 0:
            raise ValueError("max_states must be positive")
        if self.count not in (STEPS, VISIBLE):
            raise ValueError(f"unknown depth measure {self.count!r}")


@dataclass
class FiniteLts:
    states: list
    edges: list
    root: int = 0
    finals: frozenset = frozenset()
    frontier: frozenset = frozenset()
    configs: list = field(default=None, repr=False, compare=False)
    levels: list = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.states)

    def out_edges(self):
        out = [[] for _ in self.states]
        for s, a, t in self.edges:
            out[s].append((a, t))
        return out

    def labels(self):
        return sorted({a for _, a, _ in self.edges})

    def index_of(self, desc):
        return self.states.index(desc)

    def dump(self):
        lines = [f"root: {self.root}"]
        for i, desc in enumerate(self.states):
            flags = ""
            if i in self.finals:
                flags += " final"
            if i in self.frontier:
                flags += " frontier"
            lines.append(f"state: {i} {json.dumps(desc, ensure_ascii=False)}{flags}")
        for s, a, t in self.edges:
            lines.append(f"edge: {s} {a} {t}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text):
        states, edges, finals, frontier, root = {}, [], set(), set(), 0
        dec = json.JSONDecoder()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(":")
            rest = rest.strip()
            if key == "root":
                root = int(rest)
            elif key == "state":
                idx, _, tail = rest.partition(" ")
                desc, end = dec.raw_decode(tail)
                flags = tail[end:].split()
                states[int(idx)] = desc
                if "final" in flags:
                    finals.add(int(idx))
                if "frontier" in flags:
                    frontier.add(int(idx))
            elif key == "edge":
                s, a, t = rest.split()
                edges.append((int(s), a, int(t)))
            else:
                raise ValueError(f"line {lineno}: unknown record {key!r}")
        ordered = [states[i] for i in range(len(states))]
        return cls(ordered, sorted(edges), root, frozenset(finals), frozenset(frontier))


def explicit_lts(n, edges, root=0, finals=(), frontier=(), names=None):
    """Build a FiniteLts directly from an edge list (handy in tests)."""
    names = names or [str(i) for i in range(n)]
    return FiniteLts(list(names), sorted(set(edges)), root, frozenset(finals), frozenset(frontier))


def qa_system(qa):
    return StepSystem(qa.initial_configuration(), lambda c: step(qa, c), lambda c: is_final(qa, c), queue_length)


def qa2_system(qa2):
    return StepSystem(qa2.initial_configuration(), lambda c: step2(qa2, c), lambda c: is_final(qa2, c),
                      queue_length)


def _sorted_successors(system, cfg):
    succ = [(a, c, system.describe(c)) for a, c in system.successors(cfg)]
    succ.sort(key=lambda x: (x[0], x[2]))
    return succ


def explore(system, bound=ExplorationBound()):
    """Breadth-first truncation of the process graph of ``system``.

    A state is either fully expanded or, when a bound trips, left without
    outgoing edges and marked as frontier.
    """
    visible = bound.count == VISIBLE

    def key_of(desc, level):
        return f"{desc}@{level}" if visible else desc

    root_desc = system.describe(system.root)
    index = {key_of(root_desc, 0): 0}
    states, configs, levels = [key_of(root_desc, 0)], [system.root], [0]
    finals, frontier, edges = set(), set(), []
    todo = deque([0])
    saturated = False
    while todo:
        i = todo.popleft()
        cfg, level = configs[i], levels[i]
        if system.is_final(cfg):
            finals.add(i)
        if saturated:
            frontier.add(i)
            continue
        if visible and bound.max_depth is not None and level >= bound.max_depth:
            frontier.add(i)
            continue
        succ = _sorted_successors(system, cfg)
        if not succ:
            continue
        if not visible and bound.max_depth is not None and level >= bound.max_depth:
            frontier.add(i)
            continue
        if bound.max_queue_len is not None and system.size is not None:
            if any(system.size(c) > bound.max_queue_len for _, c, _ in succ):
                frontier.add(i)
                continue
        fresh = []
        for a, c, desc in succ:
            nl = level + (1 if (not visible or a != TAU) else 0)
            k = key_of(desc, nl)
            if k not in index and all(k != f[0] for f in fresh):
                fresh.append((k, c, nl))
        if len(states) + len(fresh) > bound.max_states:
            if i == 0:
                raise ExplorationError("root unexpandable: max_states exceeded before depth 1")
            saturated = True
            frontier.add(i)
            continue
        for k, c, nl in fresh:
            index[k] = len(states)
            states.append(k)
            configs.append(c)
            levels.append(nl)
            todo.append(index[k])
        for a, c, desc in succ:
            nl = level + (1 if (not visible or a != TAU) else 0)
            edges.append((i, a, index[key_of(desc, nl)]))
    return FiniteLts(states, sorted(set(edges)), 0, frozenset(finals), frozenset(frontier), configs, levels)


@dataclass
class AcceptVerdict:
    accepted: bool
    witness: list = field(default_factory=list)
    bound_hit: bool = False

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return "Accepted: " + " ".join(f"--{a}--> {c}" for a, c in self.witness)
        return "Exhausted (bound hit)" if self.bound_hit else "Exhausted (search space finite, word rejected)"


def accepts_system(system, word, bound=ExplorationBound(max_depth=50)):
    """Search for a path spelling ``word`` (tau erased) that ends in a final state.

    ``Exhausted`` with ``bound_hit=False`` means the whole reachable search
    space was covered, so the word is genuinely rejected.
    """
    word = tuple(word)
    start = (system.root, 0)
    parent = {start: None}
    todo = deque([(start, 0)])
    bound_hit = False
    while todo:
        node, depth = todo.popleft()
        cfg, pos = node
        if pos == len(word) and system.is_final(cfg):
            witness = []
            while parent[node] is not None:
                prev, a = parent[node]
                witness.append((a, node[0]))
                node = prev
            return AcceptVerdict(True, witness[::-1])
        if bound.max_depth is not None and depth >= bound.max_depth:
            bound_hit = True
            continue
        for a, c in _sorted_successors_plain(system, cfg):
            if a == TAU:
                nxt = (c, pos)
            elif pos < len(word) and a == word[pos]:
                nxt = (c, pos + 1)
            else:
                continue
            if bound.max_queue_len is not None and system.size is not None and system.size(c) > bound.max_queue_len:
                bound_hit = True
                continue
            if nxt in parent:
                continue
            if len(parent) >= bound.max_states:
                bound_hit = True
                continue
            parent[nxt] = (node, a)
            todo.append((nxt, depth + 1))
    return AcceptVerdict(False, [], bound_hit)


def _sorted_successors_plain(system, cfg):
    return [(a, c) for a, c, _ in _sorted_successors(system, cfg)]


def accepts(qa, word, bound=ExplorationBound(max_depth=50)):
    unknown = [a for a in word if a not in qa.actions]
    if unknown:
        raise ValueError(f"word uses unknown action(s): {', '.join(unknown)}")
    return accepts_system(qa_system(qa), word, bound)


def completed_traces(lts, max_len):
    """Tau-erased words (length <= max_len) from the root to a final, non-frontier state."""
    out_edges = lts.out_edges()
    seen = {(lts.root, ())}
    todo = deque(seen)
    result = set()
    while todo:
        s, w = todo.popleft()
        if s in lts.finals and s not in lts.frontier:
            result.add(w)
        for a, t in out_edges[s]:
            nw = w if a == TAU else w + (a,)
            if len(nw) > max_len or (t, nw) in seen:
                continue
            seen.add((t, nw))
            todo.append((t, nw))
    return result


@dataclass
class DeterminismVerdict:
    deterministic: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.deterministic

    @property
    def state(self):
        return self.violations[0][0] if self.violations else None


def is_deterministic(lts):
    """Check both determinism clauses on every non-frontier state."""
    violations = []
    for s, edges in enumerate(lts.out_edges()):
        if s in lts.frontier:
            continue
        targets = {}
        for a, t in edges:
            targets.setdefault(a, set()).add(t)
        for a, ts in sorted(targets.items()):
            if len(ts) > 1:
                violations.append((s, f"{len(ts)} distinct {a}-successors"))
        if TAU in targets and len(targets) > 1:
            violations.append((s, "tau-step alongside a visible action"))
    return DeterminismVerdict(not violations, violations)


def _dot_quote(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(lts, name="lts"):
    lines = [f"digraph {_dot_quote(name)} {{", "  rankdir=LR;", '  __root [shape=point, label=""];']
    for i, desc in enumerate(lts.states):
        attrs = [f"label={_dot_quote(desc)}"]
        attrs.append("shape=doublecircle" if i in lts.finals else "shape=circle")
        if i in lts.frontier:
            attrs.append("style=dashed")
        lines.append(f"  s{i} [{', '.join(attrs)}];")
    lines.append(f"  __root -> s{lts.root};")
    for s, a, t in lts.edges:
        lines.append(f"  s{s} -> s{t} [label={_dot_quote(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

