"""Strong and branching bisimilarity on finite (truncated) process graphs.

Both checks are partition refinements over the disjoint union of the two
graphs.  Before refining, frontier states are sealed: they get a single
self-loop labelled :data:`CUT` and lose finality, so two cut-off states are
related to each other but never to a genuine deadlock or final state.

Branching bisimilarity is computed with signatures: after collapsing tau-cycles,
the signature of a state collects ``(a, block)`` for every step that is not an
inert tau, inherited along inert tau-steps, plus a finality marker.  Blocks are
split by signature until stable.
"""

from dataclasses import dataclass, field

from .core import TAU
from .lts import FiniteLts

CUT = "‹cut›"
_FINAL = ("↓",)


@dataclass
class Union:
    """Sealed disjoint union of one or more FiniteLts."""

    n: int
    succ: list
    final: list
    frontier: list
    names: list
    offsets: list

    @classmethod
    def of(cls, *ltss):
        succ, final, frontier, names, offsets = [], [], [], [], []
        for k, lts in enumerate(ltss):
            off = len(succ)
            offsets.append(off)
            local = [[] for _ in lts.states]
            for s, a, t in lts.edges:
                local[s].append((a, t + off))
            for i, desc in enumerate(lts.states):
                cut = i in lts.frontier
                succ.append([(CUT, i + off)] if cut else sorted(set(local[i])))
                final.append(i in lts.finals and not cut)
                frontier.append(cut)
                names.append(desc if len(ltss) == 1 else f"{'AB'[k] if k < 2 else k}:{desc}")
        return cls(len(succ), succ, final, frontier, names, offsets)


def _tau_sccs(u):
    """Tarjan's algorithm on the tau-subgraph; returns scc id per state (reverse topological ids)."""
    index, low, on_stack, comp = [-1] * u.n, [0] * u.n, [False] * u.n, [-1] * u.n
    stack, counter, ncomp = [], 0, 0
    tau_succ = [[t for a, t in u.succ[s] if a == TAU] for s in range(u.n)]
    for root in range(u.n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(tau_succ[v]):
                work[-1] = (v, i + 1)
                w = tau_succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return comp, ncomp


@dataclass
class _Quotient:
    """A union with tau-cycles collapsed; tau-steps form a DAG.

    SCC ids from Tarjan are reverse-topological: every tau-edge goes from a
    higher id to a lower (or equal, dropped) id, so iterating ids upwards
    visits tau-successors first.
    """

    n: int
    succ: list
    final: list
    of_state: list


def _collapse(u):
    comp, ncomp = _tau_sccs(u)
    succ = [set() for _ in range(ncomp)]
    final = [False] * ncomp
    for s in range(u.n):
        c = comp[s]
        final[c] = final[c] or u.final[s]
        for a, t in u.succ[s]:
            if a == TAU and comp[t] == c:
                continue
            succ[c].add((a, comp[t]))
    return _Quotient(ncomp, [sorted(x) for x in succ], final, comp)


def _renumber(keys):
    ids, out = {}, []
    for k in keys:
        out.append(ids.setdefault(k, len(ids)))
    return out, len(ids)


def _branching_signatures(q, block):
    sig = [None] * q.n
    for s in range(q.n):
        own = set()
        if q.final[s]:
            own.add(_FINAL)
        for a, t in q.succ[s]:
            if a == TAU and block[t] == block[s]:
                own |= sig[t]
            else:
                own.add((a, block[t]))
        sig[s] = frozenset(own)
    return sig


def _strong_signatures(q, block):
    sig = []
    for s in range(q.n):
        own = {(a, block[t]) for a, t in q.succ[s]}
        if q.final[s]:
            own.add(_FINAL)
        sig.append(frozenset(own))
    return sig


def _refine(q, signatures):
    history = [[0] * q.n]
    count = 1
    while True:
        block = history[-1]
        sig = signatures(q, block)
        new, new_count = _renumber((block[s], sig[s]) for s in range(q.n))
        if new_count == count:
            return history
        history.append(new)
        count = new_count


@dataclass
class Partition:
    blocks: list
    block_of: list
    names: list

    def same(self, s, t):
        return self.block_of[s] == self.block_of[t]

    def dump(self):
        return "\n".join(f"block {i}: " + ", ".join(self.names[s] for s in b) for i, b in enumerate(self.blocks))


@dataclass
class _Refinement:
    union: Union
    quotient: _Quotient
    history: list
    signatures: object
    branching: bool

    def partition(self):
        final = self.history[-1]
        block_of, _ = _renumber(final[self.quotient.of_state[s]] for s in range(self.union.n))
        blocks = [[] for _ in range(max(block_of, default=-1) + 1)]
        for s, b in enumerate(block_of):
            blocks[b].append(s)
        return Partition(blocks, block_of, self.union.names)


def _run(ltss, branching):
    u = Union.of(*ltss)
    if branching:
        q = _collapse(u)
        sigf = _branching_signatures
    else:
        q = _Quotient(u.n, u.succ, u.final, list(range(u.n)))
        sigf = _strong_signatures
    return _Refinement(u, q, _refine(q, sigf), sigf, branching)


def strong_partition(*ltss):
    return _run(ltss, False).partition()


def branching_partition(*ltss):
    return _run(ltss, True).partition()


@dataclass
class BisimVerdict:
    related: bool
    witness: list = field(default_factory=list)
    witness_touches_frontier: bool = False
    partition: Partition = None

    def __bool__(self):
        return self.related

    @property
    def definitive(self):
        return not self.related and not self.witness_touches_frontier

    def __str__(self):
        if self.related:
            return "RelatedUpToBound"
        head = "Distinguished" + (" (witness touches the frontier)" if self.witness_touches_frontier else " (definitive)")
        return head + "\n" + "\n".join(self.witness)


class _Witness:
    """Explains why two states of a refinement ended in different blocks."""

    def __init__(self, ref):
        self.ref = ref
        q, u = ref.quotient, ref.union
        self.members = [[] for _ in range(q.n)]
        for s in range(u.n):
            self.members[q.of_state[s]].append(s)
        self.sig_cache = {}
        self.memo = {}

    def round_separated(self, x, y):
        for r, block in enumerate(self.ref.history):
            if block[x] != block[y]:
                return r
        return None

    def sig(self, r):
        if r not in self.sig_cache:
            self.sig_cache[r] = self.ref.signatures(self.ref.quotient, self.ref.history[r - 1])
        return self.sig_cache[r]

    def name(self, c):
        return self.ref.union.names[self.members[c][0]]

    def touches(self, c):
        return any(self.ref.union.frontier[s] for s in self.members[c])

    def inert_closure(self, c, block):
        """States reachable from c by tau-steps that stay inside c's block, with predecessor links."""
        q = self.ref.quotient
        seen, todo = {c: None}, [c]
        while todo:
            s = todo.pop()
            for a, t in q.succ[s]:
                if a == TAU and block[t] == block[c] and t not in seen:
                    seen[t] = s
                    todo.append(t)
        return seen

    def full_tau_closure(self, c):
        q = self.ref.quotient
        seen, todo = {c}, [c]
        while todo:
            s = todo.pop()
            for a, t in q.succ[s]:
                if a == TAU and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    def explain(self, x, y, depth=0):
        """Return (lines, touches_frontier) for states x, y in different final blocks."""
        key = (x, y)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = ([f"{self.name(x)} vs {self.name(y)}: (cyclic argument)"], True)
        r = self.round_separated(x, y)
        sig = self.sig(r)
        best = None
        for first, second in ((x, y), (y, x)):
            for e in sorted(sig[first] - sig[second], key=repr):
                res = self._explain_element(first, second, e, r, depth)
                if best is None or (best[1] and not res[1]):
                    best = res
                if not res[1]:
                    break
            if best is not None and not best[1]:
                break
        self.memo[key] = best
        return best

    def _path_to(self, c, e, block):
        """A path c => c'' that stays in c's block and ends in a state owning element e."""
        q = self.ref.quotient
        closure = self.inert_closure(c, block) if self.ref.branching else {c: None}
        for s in sorted(closure):
            owns = (e == _FINAL and q.final[s]) or any((a, block[t]) == e for a, t in q.succ[s])
            if owns:
                path = [s]
                while closure[path[-1]] is not None:
                    path.append(closure[path[-1]])
                return path[::-1]
        return [c]

    def _explain_element(self, x, y, e, r, depth):
        q = self.ref.quotient
        prev = self.ref.history[r - 1]
        path = self._path_to(x, e, prev)
        lines = []
        indent = "  " * depth
        trace = self.name(path[0])
        for s in path[1:]:
            trace += f" --{TAU}--> {self.name(s)}"
        ycl = self.full_tau_closure(y) if self.ref.branching else {y}
        touches = any(self.touches(s) for s in path) or any(self.touches(s) for s in ycl)
        if e == _FINAL:
            lines.append(f"{indent}{trace} is final; {self.name(y)} cannot reach a final state silently")
            touches = touches or any(q.final[s] for s in ycl)
            return lines, touches
        a, target_block = e
        last = path[-1]
        xs = [t for b, t in q.succ[last] if b == a and prev[t] == target_block]
        x2 = xs[0]
        trace += f" --{a}--> {self.name(x2)}"
        touches = touches or a == CUT
        lines.append(f"{indent}{trace}")
        ys = sorted({t for s in ycl for b, t in q.succ[s] if b == a})
        if a == TAU:
            ys = sorted(set(ys) | ycl)
        if not ys:
            lines.append(f"{indent}  {self.name(y)} has no matching {a}-step")
            return lines, touches
        final_block = self.ref.history[-1]
        lines.append(f"{indent}  every {a}-answer of {self.name(y)} is distinguished:")
        for y2 in ys:
            if final_block[y2] == final_block[x2]:
                lines.append(f"{indent}    {self.name(y2)} matches but only via stuttering")
                touches = True
                continue
            sub, sub_touch = self.explain(x2, y2, depth + 2)
            lines.extend(sub)
            touches = touches or sub_touch
            if len(lines) > 200:
                lines.append(f"{indent}    ...")
                touches = True
                break
        return lines, touches


def _verdict(ltss, branching):
    ref = _run(ltss, branching)
    part = ref.partition()
    a, b = ltss
    ra, rb = a.root, b.root + len(a.states)
    if part.same(ra, rb):
        return BisimVerdict(True, partition=part)
    q = ref.quotient
    lines, touches = _Witness(ref).explain(q.of_state[ra], q.of_state[rb])
    return BisimVerdict(False, lines, touches, part)


def strong_bisim(a, b):
    return _verdict((a, b), False)


def branching_bisim(a, b):
    return _verdict((a, b), True)


def inert_taus(lts):
    """Tau edges whose endpoints are branching bisimilar (frontier states sealed)."""
    part = branching_partition(lts)
    return {(s, a, t) for s, a, t in lts.edges if a == TAU and part.same(s, t)}


def quotient(lts, branching=True):
    """Minimal graph obtained by identifying related states (tau-self-loops dropped)."""
    part = branching_partition(lts) if branching else strong_partition(lts)
    edges = set()
    for s, a, t in lts.edges:
        bs, bt = part.block_of[s], part.block_of[t]
        if branching and a == TAU and bs == bt:
            continue
        edges.add((bs, a, bt))
    names = [lts.states[b[0]] for b in part.blocks]
    return FiniteLts(names, sorted(edges), part.block_of[lts.root],
                     frozenset(part.block_of[s] for s in lts.finals),
                     frozenset(part.block_of[s] for s in lts.frontier))


# ---------------------------------------------------------------------------
# Naive fixpoint oracles, straight from the relational definitions.  Only
# meant for small graphs (tests cross-check the refinement against them).


def _naive(u, branching):
    n = u.n
    tau_reach = []
    for s in range(n):
        seen, todo = {s}, [s]
        while todo:
            v = todo.pop()
            for a, t in u.succ[v]:
                if a == TAU and t not in seen:
                    seen.add(t)
                    todo.append(t)
        tau_reach.append(seen)
    rel = [[True] * n for _ in range(n)]

    def transfer(s, t):
        if branching:
            if u.final[s] and not any(u.final[v] and rel[s][v] for v in tau_reach[t]):
                return False
            for a, s2 in u.succ[s]:
                ok = False
                for t2 in tau_reach[t]:
                    if not rel[s][t2]:
                        continue
                    if a == TAU and rel[s2][t2]:
                        ok = True
                        break
                    if any(b == a and rel[s2][t3] for b, t3 in u.succ[t2]):
                        ok = True
                        break
                if not ok:
                    return False
            return True
        if u.final[s] and not u.final[t]:
            return False
        return all(any(b == a and rel[s2][t2] for b, t2 in u.succ[t]) for a, s2 in u.succ[s])

    changed = True
    while changed:
        changed = False
        for s in range(n):
            for t in range(n):
                if rel[s][t] and not (transfer(s, t) and transfer(t, s)):
                    rel[s][t] = rel[t][s] = False
                    changed = True
    return rel


def naive_relation(*ltss, branching=True):
    """Largest (strong or branching) bisimulation as a boolean matrix over the sealed union."""
    return _naive(Union.of(*ltss), branching)


def naive_bisim(a, b, branching=True):
    rel = naive_relation(a, b, branching=branching)
    return rel[a.root][len(a.states) + b.root]
