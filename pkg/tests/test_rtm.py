from hypothesis import given, settings
from hypothesis import strategies as st

from queueproc.rtm import (BLANK, LEFT, RIGHT, Rtm, RtmConfiguration, RtmTransition, TapeInstance, move,
                           rtm_initial, rtm_is_final, rtm_step, validate_rtm)


def one(trans, finals=("up",), states=("up", "t")):
    return Rtm(states, ("a",), ("x", "d"), trans, "up", finals)


def test_blank_loop():
    m = one([RtmTransition("up", "a", BLANK, BLANK, RIGHT, "up")])
    assert rtm_step(m, rtm_initial(m)) == {("a", rtm_initial(m))}


def test_write_then_move_right():
    m = one([RtmTransition("up", "a", BLANK, "x", RIGHT, "t")])
    assert rtm_step(m, rtm_initial(m)) == {("a", RtmConfiguration("t", TapeInstance(("x",), BLANK, ())))}


def test_read_mismatch_disabled():
    m = one([RtmTransition("up", "a", "d", "x", RIGHT, "t")])
    assert rtm_step(m, rtm_initial(m)) == set()


def test_initial_and_finality():
    m = one([], finals=("up",))
    cfg = rtm_initial(m)
    assert cfg.tape == TapeInstance((), BLANK, ()) and rtm_is_final(m, cfg)
    assert not rtm_is_final(one([], finals=()), cfg)
    assert validate_rtm(m) == []


def test_validate_reports_bad_cell():
    m = one([RtmTransition("up", "a", "q", "x", RIGHT, "t")])
    assert any("'q'" in p for p in validate_rtm(m))


CELL = st.sampled_from(["x", "d", BLANK])
TAPE = st.builds(TapeInstance, st.lists(CELL, max_size=4).map(tuple), CELL, st.lists(CELL, max_size=4).map(tuple))


@settings(max_examples=200)
@given(TAPE)
def test_canonical_idempotent(tape):
    assert tape.canonical().canonical() == tape.canonical()


@settings(max_examples=200)
@given(TAPE, CELL, st.sampled_from([LEFT, RIGHT]))
def test_move_commutes_with_canonical(tape, write, direction):
    assert move(tape, write, direction) == move(tape.canonical(), write, direction)


@settings(max_examples=200)
@given(TAPE, CELL, st.sampled_from([LEFT, RIGHT]))
def test_length_changes_by_at_most_one(tape, write, direction):
    size = lambda t: len(t.left) + 1 + len(t.right)
    assert abs(size(move(tape.canonical(), write, direction)) - size(tape.canonical())) <= 1


def _two_step(tape, write, first, back):
    """Oracle: explicit cell list with an index, padded with blanks as needed."""
    cells = list(tape.left) + [tape.head] + list(tape.right)
    i = len(tape.left)
    cells[i] = write
    i += -1 if first == LEFT else 1
    if i < 0:
        cells.insert(0, BLANK)
        i = 0
    if i == len(cells):
        cells.append(BLANK)
    i += -1 if back == LEFT else 1
    return TapeInstance(tuple(cells[:i]), cells[i], tuple(cells[i + 1:])).canonical()


@settings(max_examples=200)
@given(TAPE, CELL, st.sampled_from([LEFT, RIGHT]))
def test_move_and_back_restores_untouched_cell(tape, write, first):
    back = RIGHT if first == LEFT else LEFT
    once = move(tape.canonical(), write, first)
    twice = move(once, once.head, back)
    assert twice == _two_step(tape.canonical(), write, first, back)
    assert twice == TapeInstance(tape.left, write, tape.right).canonical()
