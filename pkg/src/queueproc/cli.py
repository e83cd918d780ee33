"""Command-line front end for queue automata, two-queue automata, RTMs and terms.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage,
parse or validation error.
"""

import argparse
import sys

from . import harness
from . import transform as T
from .algebra import AlgebraError, Var, compose_with_queue, control_of, queue_spec, term_system
from .bisim import branching_bisim, strong_bisim
from .compute import COMPLETED, ComputeError, check_computation, run_function
from .core import AutomatonError, QueueAutomaton
from .formats import FormatError, load, print_any, print_bcp
from .lts import STEPS, VISIBLE, ExplorationBound, ExplorationError, accepts, explore, to_dot

OK, NEGATIVE, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _word(text):
    if text in ("", "-", "ε"):
        return ()
    return tuple(text.split("."))


def _bound(args, depth=None):
    return ExplorationBound(max_depth=args.depth if depth is None else depth, max_states=args.max_states,
                            max_queue_len=args.max_queue, count=args.count)


def _add_bounds(p, depth=8, count=VISIBLE):
    p.add_argument("--depth", type=int, default=depth, help=f"depth bound (default {depth})")
    p.add_argument("--count", choices=(STEPS, VISIBLE), default=count,
                   help=f"what the depth counts: every step or visible actions only (default {count})")
    p.add_argument("--max-queue", type=int, default=None, help="cap on queue or tape length")
    p.add_argument("--max-states", type=int, default=200_000, help="hard cap on explored states")


def _system(path):
    kind, m = load(path)
    if kind == "bcp":
        spec, root = m
        return term_system(root, spec)
    return harness.system_of(m)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _qa(path):
    kind, m = load(path)
    if not isinstance(m, QueueAutomaton):
        raise UsageError(f"{path}: expected a one-queue automaton (.qa), got {kind}")
    return m


# -- subcommands --------------------------------------------------------------


def cmd_accept(args):
    qa = _qa(args.input)
    verdict = accepts(qa, _word(args.word), _bound(args))
    print(verdict)
    return OK if verdict.accepted else NEGATIVE


def cmd_explore(args):
    lts = explore(_system(args.input), _bound(args))
    _write(lts.dump(), args.out)
    return OK


def cmd_dot(args):
    lts = explore(_system(args.input), _bound(args))
    _write(to_dot(lts), args.out)
    return OK


def cmd_bisim(args):
    a = explore(_system(args.left), _bound(args))
    b = explore(_system(args.right), _bound(args))
    verdict = (strong_bisim if args.strong else branching_bisim)(a, b)
    print(f"{len(a)} vs {len(b)} states")
    print(verdict)
    return OK if verdict.related else NEGATIVE


def cmd_transform(args):
    _, m = load(args.input)
    report = T.run_pass(args.pass_name, m)
    _write(print_any(report.output), args.out)
    print(report.summary(), file=sys.stderr)
    if args.check_depth is None:
        return OK
    bound = ExplorationBound(max_depth=args.check_depth, count=VISIBLE, max_states=args.max_states)
    a = explore(harness.system_of(m), bound)
    b = explore(harness.system_of(report.output), bound)
    verdict = branching_bisim(a, b)
    print(f"check at depth {args.check_depth}: {verdict}", file=sys.stderr)
    return NEGATIVE if verdict.definitive else OK


def cmd_compute(args):
    qa = _qa(args.input)
    if args.check:
        verdict = check_computation(qa, ExplorationBound(max_depth=args.check))
        print(verdict)
        if not verdict.ok:
            return NEGATIVE
    result = run_function(qa, _word(args.word), args.budget)
    print(result)
    return OK if result.status == COMPLETED else NEGATIVE


def cmd_algebra(args):
    if args.op == "spec":
        spec = queue_spec(args.data, args.inp, args.outp, args.mid)
        _write(print_bcp(spec, Var(f"Q{args.inp}{args.outp}")), args.out)
        return OK
    if args.input is None:
        raise UsageError(f"algebra {args.op} needs --in")
    if args.op == "lts":
        lts = explore(_system(args.input), _bound(args))
        _write(lts.dump(), args.out)
        return OK
    qa = _qa(args.input)
    if not T.is_normal(qa):
        qa = T.normalize(qa)
    control = control_of(qa)
    if args.op == "control":
        _write(control.dump(), args.out)
        return OK
    composed = compose_with_queue(control, qa.data, _bound(args))
    if not args.check:
        _write(composed.dump(), args.out)
        return OK
    reference = explore(harness.system_of(qa), _bound(args))
    verdict = branching_bisim(composed, reference)
    print(f"{len(composed)} vs {len(reference)} states")
    print(verdict)
    return OK if verdict.related else NEGATIVE


def cmd_harness(args):
    return OK if harness.run(args.only) else NEGATIVE


def build_parser():
    parser = argparse.ArgumentParser(prog="queueproc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("accept", help="bounded word acceptance for a .qa file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--word", required=True, help="dot-separated actions, '' or - for the empty word")
    _add_bounds(p, depth=50, count=STEPS)
    p.set_defaults(func=cmd_accept)

    for name, func, help_ in (("explore", cmd_explore, "write the truncated process graph (.lts dump)"),
                              ("dot", cmd_dot, "write the truncated process graph as DOT")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--out", default=None)
        _add_bounds(p, count=STEPS)
        p.set_defaults(func=func)

    p = sub.add_parser("bisim", help="compare two machines up to a bound")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--strong", action="store_true", help="strong instead of branching bisimilarity")
    _add_bounds(p)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("transform", help="run a construction pass")
    p.add_argument("--pass", dest="pass_name", required=True, choices=T.PASSES)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--check-depth", type=int, default=None,
                   help="compare input and output up to this visible depth")
    p.add_argument("--max-states", type=int, default=200_000)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("compute", help="run a .qa file as an input/output function")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--input", dest="word", required=True, help="dot-separated input symbols")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--check", type=int, default=None, metavar="DEPTH",
                   help="first check determinism and trace shape up to DEPTH")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("algebra", help="process-algebra views: spec, lts, control, compose")
    p.add_argument("op", choices=("spec", "lts", "control", "compose"))
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--data", nargs="+", default=["d"], help="data symbols for 'spec'")
    p.add_argument("--inp", default="i")
    p.add_argument("--outp", default="o")
    p.add_argument("--mid", default="l")
    p.add_argument("--check", action="store_true", help="compose: compare against the automaton itself")
    _add_bounds(p)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("harness", help="re-run the acceptance checks")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers or tags")
    p.set_defaults(func=cmd_harness)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, AutomatonError, AlgebraError, ComputeError, ExplorationError, UsageError, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
