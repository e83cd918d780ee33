"""Reactive Turing machines and tape instances with a marked head cell."""

from dataclasses import dataclass
from typing import NamedTuple

from .core import TAU, AutomatonError, is_action, is_symbol
from .lts import StepSystem

BLANK = "□"
LEFT, RIGHT = "L", "R"


class RtmTransition(NamedTuple):
    src: str
    action: str
    read: str
    write: str
    move: str
    dst: str

    def label(self):
        return f"{self.action}[{self.read}/{self.write}]{self.move}"


class TapeInstance(NamedTuple):
    """Tape contents ``left + [head] + right`` modulo blanks at either end."""

    left: tuple = ()
    head: str = BLANK
    right: tuple = ()

    def canonical(self):
        left, right = list(self.left), list(self.right)
        i = 0
        while i < len(left) and left[i] == BLANK:
            i += 1
        j = len(right)
        while j > 0 and right[j - 1] == BLANK:
            j -= 1
        return TapeInstance(tuple(left[i:]), self.head, tuple(right[:j]))

    def __str__(self):
        cells = list(self.left) + [f"[{self.head}]"] + list(self.right)
        return "".join(cells) if all(len(c) == 1 for c in self.left + self.right) else " ".join(cells)


class RtmConfiguration(NamedTuple):
    state: str
    tape: TapeInstance = TapeInstance()

    def __str__(self):
        return f"({self.state}, {self.tape})"


@dataclass(frozen=True)
class Rtm:
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

    def outgoing(self, state):
        return self._by_src.get(state, ())


def validate_rtm(m):
    problems = []
    if not m.states:
        problems.append("states empty")
    if not m.actions:
        problems.append("actions empty")
    if not m.data:
        problems.append("data empty")
    for d in m.data:
        if not is_symbol(d) or d == BLANK:
            problems.append(f"invalid data symbol {d!r}")
    for a in m.actions:
        if not is_action(a) or a == TAU:
            problems.append(f"invalid action {a!r}")
    if m.initial not in m.states:
        problems.append(f"initial state {m.initial!r} unknown")
    for f in m.finals:
        if f not in m.states:
            problems.append(f"final state {f!r} unknown")
    cells = set(m.data) | {BLANK}
    for k, t in enumerate(m.transitions):
        where = f"transition {k}"
        for s in (t.src, t.dst):
            if s not in m.states:
                problems.append(f"{where}: unknown state {s!r}")
        if t.action != TAU and t.action not in m.actions:
            problems.append(f"{where}: action {t.action!r} not in action alphabet")
        for c in (t.read, t.write):
            if c not in cells:
                problems.append(f"{where}: tape symbol {c!r} not in data alphabet")
        if t.move not in (LEFT, RIGHT):
            problems.append(f"{where}: move must be L or R")
    return problems


def rtm_initial(m):
    return RtmConfiguration(m.initial, TapeInstance())


def move(tape, write, direction):
    """Overwrite the marked cell and shift the mark one cell (adding a blank if needed)."""
    if direction == LEFT:
        head = tape.left[-1] if tape.left else BLANK
        new = TapeInstance(tape.left[:-1], head, (write,) + tape.right)
    else:
        head = tape.right[0] if tape.right else BLANK
        new = TapeInstance(tape.left + (write,), head, tape.right[1:])
    return new.canonical()


def rtm_step(m, cfg):
    if cfg.state not in m.states:
        raise AutomatonError(f"unknown state {cfg.state!r}")
    tape = cfg.tape.canonical()
    out = set()
    for t in m.outgoing(cfg.state):
        if t.read == tape.head:
            out.add((t.action, RtmConfiguration(t.dst, move(tape, t.write, t.move))))
    return out


def rtm_is_final(m, cfg):
    return cfg.state in m.finals


def rtm_system(m):
    return StepSystem(rtm_initial(m), lambda c: rtm_step(m, c), lambda c: rtm_is_final(m, c),
                      lambda c: len(c.tape.left) + 1 + len(c.tape.right))
