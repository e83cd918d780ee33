"""Line-oriented text formats: .qa, .qa2, .rtm and .bcp."""

import re

from .algebra import (ACCEPT, DEADLOCK, AlgebraError, Choice, Encap, Hide, Merge, Prefix, RecursiveSpec, Var,
                      parse_action)
from .core import (ANY, EPS, TAU, QTransition, QTransition2, QueueAutomaton, TwoQueueAutomaton, format_word,
                   validate)
from .rtm import BLANK, LEFT, RIGHT, Rtm, RtmTransition, validate_rtm


class FormatError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.message, self.line, self.column = message, line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


_HEADER_KEYS = ("data", "actions", "states", "initial", "finals")


def _records(text, kind):
    """Yield (lineno, key, fields, raw) for each non-comment line after the header."""
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if not seen_header:
            if line.strip() != kind:
                raise FormatError(f"expected header {kind!r}", lineno, 1)
            seen_header = True
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise FormatError("expected '<key>: ...'", lineno, 1)
        yield lineno, key.strip(), rest.split(), raw
    if not seen_header:
        raise FormatError(f"empty file (expected header {kind!r})", 1, 1)


def _column(raw, token, nth=0):
    pos = -1
    for _ in range(nth + 1):
        pos = raw.find(token, pos + 1)
    return pos + 1 if pos >= 0 else None


def _parse_headers(text, kind, trans_arity, optional=()):
    header = {}
    trans = []
    for lineno, key, fields, raw in _records(text, kind):
        if key in _HEADER_KEYS:
            if key in header:
                raise FormatError(f"duplicate {key!r} line", lineno, 1)
            if key == "initial" and len(fields) != 1:
                raise FormatError("initial: expects exactly one state", lineno, 1)
            header[key] = (fields, lineno)
        elif key == "trans":
            if len(fields) != trans_arity:
                raise FormatError(f"trans: expects {trans_arity} fields, got {len(fields)}", lineno,
                                  _column(raw, "trans"))
            trans.append((fields, lineno, raw))
        else:
            raise FormatError(f"unknown key {key!r}", lineno, 1)
    for key in _HEADER_KEYS:
        if key not in header and key not in optional:
            raise FormatError(f"missing {key!r} line")
    return header, trans


def _trigger(tok, lineno, raw):
    if tok == "any":
        return ANY
    if tok == "eps":
        return EPS
    if not tok or tok in ("-", TAU):
        raise FormatError(f"bad trigger {tok!r}", lineno, _column(raw, tok))
    return tok


def _word(tok, lineno, raw):
    if tok == "-":
        return ()
    parts = tuple(tok.split("."))
    if any(not p for p in parts):
        raise FormatError(f"bad enqueue word {tok!r}", lineno, _column(raw, tok))
    return parts


def _check(problems, lines):
    if problems:
        msg = problems[0]
        m = re.match(r"transition (\d+):", msg)
        line = lines[int(m.group(1))] if m else None
        raise FormatError(f"invalid: {msg}", line)


def _automaton(cls, header, transitions, lines):
    m = cls(header["states"][0], header["actions"][0], header["data"][0], transitions,
            header["initial"][0][0], header["finals"][0])
    _check(validate(m), lines)
    return m


def parse_qa(text):
    header, raw_trans = _parse_headers(text, "qa", 5)
    transitions, lines = [], []
    for (src, act, trig, enq, dst), lineno, raw in raw_trans:
        transitions.append(QTransition(src, act, _trigger(trig, lineno, raw), _word(enq, lineno, raw), dst))
        lines.append(lineno)
    return _automaton(QueueAutomaton, header, transitions, lines)


def parse_qa2(text):
    header, raw_trans = _parse_headers(text, "qa2", 5)
    transitions, lines = [], []
    for (src, act, trig, enq, dst), lineno, raw in raw_trans:
        trigs, enqs = trig.split(","), enq.split(",")
        if len(trigs) != 2 or len(enqs) != 2:
            raise FormatError("qa2 transitions need '<t1>,<t2> <w1>,<w2>'", lineno, _column(raw, trig))
        transitions.append(QTransition2(src, act, tuple(_trigger(t, lineno, raw) for t in trigs),
                                        tuple(_word(w, lineno, raw) for w in enqs), dst))
        lines.append(lineno)
    return _automaton(TwoQueueAutomaton, header, transitions, lines)


def _cell(tok):
    return BLANK if tok == "_" else tok


def parse_rtm(text):
    header, raw_trans = _parse_headers(text, "rtm", 6, optional=("actions",))
    transitions, lines = [], []
    for (src, act, rd, wr, mv, dst), lineno, raw in raw_trans:
        if mv not in (LEFT, RIGHT):
            raise FormatError(f"move must be L or R, got {mv!r}", lineno, _column(raw, mv, 0))
        transitions.append(RtmTransition(src, act, _cell(rd), _cell(wr), mv, dst))
        lines.append(lineno)
    if "actions" in header:
        actions = header["actions"][0]
    else:
        actions = list(dict.fromkeys(t.action for t in transitions if t.action != TAU))
    m = Rtm(header["states"][0], actions, header["data"][0], transitions,
            header["initial"][0][0], header["finals"][0])
    _check(validate_rtm(m), lines)
    return m


def _trig_text(t):
    return {ANY: "any", EPS: "eps"}.get(t, t)


def _word_text(w):
    return ".".join(w) if w else "-"


def _header_text(kind, m):
    return [kind, f"data: {' '.join(m.data)}", f"actions: {' '.join(m.actions)}",
            f"states: {' '.join(m.states)}", f"initial: {m.initial}",
            f"finals: {' '.join(s for s in m.states if s in m.finals)}"]


def print_qa(qa):
    lines = _header_text("qa", qa)
    for t in qa.transitions:
        lines.append(f"trans: {t.src} {t.action} {_trig_text(t.trigger)} {_word_text(t.enqueue)} {t.dst}")
    return "\n".join(lines) + "\n"


def print_qa2(qa2):
    lines = _header_text("qa2", qa2)
    for t in qa2.transitions:
        trig = ",".join(_trig_text(x) for x in t.triggers)
        enq = ",".join(_word_text(w) for w in t.enqueues)
        lines.append(f"trans: {t.src} {t.action} {trig} {enq} {t.dst}")
    return "\n".join(lines) + "\n"


def print_rtm(m):
    lines = _header_text("rtm", m)
    cell = lambda c: "_" if c == BLANK else c
    for t in m.transitions:
        lines.append(f"trans: {t.src} {t.action} {cell(t.read)} {cell(t.write)} {t.move} {t.dst}")
    return "\n".join(lines) + "\n"


# -- process terms -------------------------------------------------------------

_PUNCT = frozenset("(){},.+=:") | {"||"}
_TOKEN_RE = re.compile(r"\s*(?:(\|\|)|([(){},.+=:])|([^\s(){},.+|=:]+))")


def _tokenize(text, lineno):
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise FormatError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.end() - len(tok) + 1))
        pos = m.end()
    return tokens


class _TermParser:
    def __init__(self, tokens, lineno):
        self.toks, self.i, self.lineno = tokens, 0, lineno

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    def error(self, msg):
        col = self.toks[self.i][1] if self.i < len(self.toks) else (self.toks[-1][1] if self.toks else 1)
        raise FormatError(msg, self.lineno, col)

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            self.error(f"expected {expected or 'a token'}, got {tok or 'end of line'}")
        self.i += 1
        return tok

    def term(self):
        t = self.merge()
        while self.peek() == "+":
            self.take()
            t = Choice(t, self.merge())
        return t

    def merge(self):
        t = self.prefixed()
        while self.peek() == "||":
            self.take()
            t = Merge(t, self.prefixed())
        return t

    def _comm_action(self):
        # word '(' payload ')' written without spaces, e.g. c(d)
        if self.peek(1) == "(" and self.peek(3) == ")" and self.peek(4) == ".":
            port, payload = self.toks[self.i][0], self.toks[self.i + 2][0]
            return f"{port}({payload})"
        return None

    def prefixed(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a term")
        if tok in ("encap", "hide") and self.peek(1) == "(":
            return self.operator(tok)
        comm = self._comm_action() if tok not in _PUNCT else None
        if comm:
            self.i += 4
            self.take(".")
            return Prefix(parse_action(comm), self.prefixed())
        if self.peek(1) == "." and tok not in _PUNCT:
            self.take()
            self.take(".")
            try:
                act = parse_action(tok)
            except AlgebraError as exc:
                self.error(str(exc))
            return Prefix(act, self.prefixed())
        return self.atom()

    def operator(self, name):
        self.take(name)
        self.take("(")
        ports = []
        if self.peek() == "{":
            self.take("{")
            while self.peek() != "}":
                ports.append(self.take())
                if self.peek() == ",":
                    self.take(",")
            self.take("}")
        else:
            ports.append(self.take())
        self.take(",")
        body = self.term()
        self.take(")")
        return (Encap if name == "encap" else Hide)(frozenset(ports), body)

    def atom(self):
        tok = self.take()
        if tok == "(":
            t = self.term()
            self.take(")")
            return t
        if tok == "0":
            return DEADLOCK
        if tok == "1":
            return ACCEPT
        if tok in _PUNCT:
            self.i -= 1
            self.error(f"unexpected {tok!r}")
        return Var(tok)


def parse_term(text, lineno=1):
    p = _TermParser(_tokenize(text, lineno), lineno)
    t = p.term()
    if p.peek() is not None:
        p.error(f"trailing input {p.peek()!r}")
    return t


def parse_bcp(text):
    """Parse ``X = term`` equations and an optional ``init: term`` line.

    Returns (spec, root); without an init line the root is the first variable.
    """
    spec, root, first = RecursiveSpec(), None, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip() or line.strip() == "bcp":
            continue
        m = re.match(r"\s*init\s*:(.*)$", line)
        if m:
            root = parse_term(m.group(1), lineno)
            continue
        m = re.match(r"\s*([^\s=]+)\s*=(.*)$", line)
        if not m:
            raise FormatError("expected 'X = term' or 'init: term'", lineno, 1)
        name = m.group(1)
        if name in spec:
            raise FormatError(f"variable {name!r} defined twice", lineno, 1)
        spec[name] = parse_term(m.group(2), lineno)
        first = first or name
    if root is None:
        if first is None:
            raise FormatError("no equations and no init term")
        root = Var(first)
    try:
        spec.check_closed([root])
    except AlgebraError as exc:
        raise FormatError(str(exc)) from None
    return spec, root


def print_bcp(spec, root=None):
    lines = ["bcp"] + [f"{name} = {t}" for name, t in spec.items()]
    if root is not None:
        lines.append(f"init: {root}")
    return "\n".join(lines) + "\n"


# -- dispatch -------------------------------------------------------------------

PARSERS = {"qa": parse_qa, "qa2": parse_qa2, "rtm": parse_rtm, "bcp": parse_bcp}


def sniff(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return line if line in PARSERS else "bcp"
    raise FormatError("empty file", 1, 1)


def parse_any(text):
    kind = sniff(text)
    return kind, PARSERS[kind](text)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_any(fh.read())


def print_any(m):
    if isinstance(m, QueueAutomaton):
        return print_qa(m)
    if isinstance(m, TwoQueueAutomaton):
        return print_qa2(m)
    if isinstance(m, Rtm):
        return print_rtm(m)
    raise TypeError(f"cannot print {type(m).__name__}")


__all__ = ["FormatError", "parse_qa", "parse_qa2", "parse_rtm", "parse_bcp", "parse_term", "print_qa",
           "print_qa2", "print_rtm", "print_bcp", "parse_any", "load", "print_any", "format_word"]
