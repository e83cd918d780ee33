"""Queue automata as input/output transducers.

Inputs are actions ``i?d``, outputs ``o!d``; ``o!eps`` signals an empty queue
and contributes nothing to the output word.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

from .core import TAU, step
from .lts import ExplorationBound, completed_traces, explore, is_deterministic, qa_system

INPUT, OUTPUT, EMPTY_SIGNAL = "input", "output", "empty"
COMPLETED, STUCK, BUDGET_EXHAUSTED = "Completed", "Stuck", "BudgetExhausted"


class ComputeError(ValueError):
    pass


class IoAction(NamedTuple):
    kind: str
    symbol: str = ""

    def __str__(self):
        if self.kind == INPUT:
            return f"i?{self.symbol}"
        return "o!eps" if self.kind == EMPTY_SIGNAL else f"o!{self.symbol}"


def parse_io(token, data=None):
    """IoAction for ``token``; None for tau."""
    if token == TAU:
        return None
    if token == "o!eps":
        return IoAction(EMPTY_SIGNAL)
    if len(token) > 2 and token[:2] in ("i?", "o!"):
        act = IoAction(INPUT if token[0] == "i" else OUTPUT, token[2:])
        if data is not None and act.symbol not in data:
            raise ComputeError(f"action {token!r}: {act.symbol!r} is not a data symbol")
        return act
    raise ComputeError(f"action {token!r} is not an input i?d, output o!d or o!eps")


@dataclass
class ComputationVerdict:
    ok: bool
    deterministic: bool
    violations: list = field(default_factory=list)
    bad_traces: list = field(default_factory=list)
    bound: ExplorationBound = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        head = "computation (up to bound)" if self.ok else "not a computation"
        lines = [head]
        for s, why in self.violations[:5]:
            lines.append(f"  nondeterministic at state {s}: {why}")
        for t in self.bad_traces[:5]:
            lines.append(f"  badly shaped trace: {' '.join(t)}")
        return "\n".join(lines)


def check_computation(qa, bound=ExplorationBound(max_depth=8)):
    """Determinism of the truncated graph plus the input/output shape of completed traces."""
    for a in qa.actions:
        parse_io(a, qa.data)
    lts = explore(qa_system(qa), bound)
    det = is_deterministic(lts)
    bad = []
    for trace in sorted(completed_traces(lts, bound.max_depth or 8)):
        try:
            for a in trace:
                parse_io(a, qa.data)
        except ComputeError:
            bad.append(trace)
    named = [(lts.states[s], why) for s, why in det.violations]
    return ComputationVerdict(det.deterministic and not bad, det.deterministic, named, bad, bound)


@dataclass
class RunResult:
    output: tuple
    trace: list
    status: str
    configuration: object = None
    unread: int = 0

    @property
    def output_word(self):
        return "".join(self.output)

    def __str__(self):
        out = ".".join(self.output) if self.output else "ε"
        extra = f" at {self.configuration}" if self.status == STUCK else ""
        unread = f" ({self.unread} input symbol(s) unread)" if self.unread else ""
        return f"output: {out}\nstatus: {self.status}{extra}{unread}\ntrace: {' '.join(self.trace) or '-'}"


def _pick(moves, tier, cfg):
    targets = {(a, c) for a, c in moves}
    if len(targets) > 1:
        labels = ", ".join(sorted(f"{a}->{c}" for a, c in targets))
        raise ComputeError(f"nondeterminism among {tier} moves at {cfg}: {labels}")
    return next(iter(targets))


def run_function(qa, word, budget=10_000):
    """Run ``qa`` on input ``word`` with the policy input > tau > output.

    The run stops in a final configuration once no move is selectable; input
    left unread at that point means the machine decided early.
    """
    word = tuple(word)
    for d in word:
        if d not in qa.data:
            raise ComputeError(f"input symbol {d!r} is not a data symbol")
    cfg = qa.initial_configuration()
    pos, trace, output = 0, [], []
    for _ in range(budget):
        moves = [(a, c, parse_io(a, qa.data)) for a, c in step(qa, cfg)]
        inputs = [(a, c) for a, c, io in moves
                  if io and io.kind == INPUT and pos < len(word) and io.symbol == word[pos]]
        taus = [(a, c) for a, c, io in moves if io is None]
        outputs = [(a, c) for a, c, io in moves if io and io.kind != INPUT]
        if inputs:
            a, cfg = _pick(inputs, "input", cfg)
            pos += 1
        elif taus:
            a, cfg = _pick(taus, "tau", cfg)
        elif outputs:
            a, cfg = _pick(outputs, "output", cfg)
            io = parse_io(a)
            if io.kind == OUTPUT:
                output.append(io.symbol)
        else:
            status = COMPLETED if cfg.state in qa.finals else STUCK
            return RunResult(tuple(output), trace, status, cfg, len(word) - pos)
        trace.append(a)
    return RunResult(tuple(output), trace, BUDGET_EXHAUSTED, cfg, len(word) - pos)
