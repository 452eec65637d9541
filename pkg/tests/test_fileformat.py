import pytest
from hypothesis import given, settings

from openshop.fileformat import (ParseError, parse_schedule, parse_state, parse_system,
                                 serialize_schedule, serialize_state, serialize_system)
from openshop.reachability import complete_schedule
from openshop.safety import is_safe
from openshop.shop_model import IN, OUT, Move, initial_state

from oracles import system_and_state

SYSTEM = """\
# three unit machines
machine M1 1
machine M2 1
machine M3 1
job J1 M1 M2 M3
job J2 M1 M2 M3
job J3 M1 M2 M3
"""

STATE = """\
job J1 at M1 todo M2 M3
job J2 at M2 todo M1 M3
job J3 at M3 todo M1 M2
"""


def test_parse_three_by_three(sys33, blocked33):
    system = parse_system(SYSTEM)
    assert system == sys33
    assert parse_state(system, STATE) == blocked33


def test_serialize_is_canonical(sys33, blocked33):
    assert serialize_system(sys33) == SYSTEM.split("\n", 1)[1]
    assert serialize_state(sys33, blocked33) == STATE


def test_schedule_round_trip(sys33):
    schedule = [Move(0, IN, 0), Move(0, 0, 1), Move(0, 1, 2), Move(0, 2, OUT)]
    text = serialize_schedule(sys33, schedule)
    assert text.splitlines()[0] == "move J1 IN M1"
    assert text.splitlines()[-1] == "move J1 M3 OUT"
    assert parse_schedule(sys33, text) == schedule


def test_empty_schedule_serializes_to_nothing(sys33):
    assert serialize_schedule(sys33, []) == ""
    assert parse_schedule(sys33, "") == []


@pytest.mark.parametrize("text, fragment", [
    ("machine A 0\n", "capacity 0"),
    ("machine A x\n", "not an integer"),
    ("machine A 1\nmachine A 1\n", "duplicate machine"),
    ("machine IN 1\n", "reserved"),
    ("machine A 1\njob J B\n", "unknown machine"),
    ("machine A 1\njob J A A\n", "repeated"),
    ("machine A 1\njob J A\njob J A\n", "duplicate job"),
    ("widget A\n", "unknown declaration"),
    ("machine A\n", "expected"),
])
def test_system_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_system(text)


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as info:
        parse_system("machine A 1\n\nmachine A 2\n")
    assert info.value.line == 3


@pytest.mark.parametrize("text, fragment", [
    ("job J1 at M1 todo M2 M3\n", "missing"),
    (STATE + "job J1 at OUT todo\n", "duplicate job"),
    ("job J9 at M1 todo\n", "unknown job"),
    ("job J1 on M1 todo\n", "expected"),
    (STATE.replace("todo M2 M3", "todo M2 M2"), "repeated"),
    (STATE.replace("todo M2 M3", "todo IN"), "cannot be a remaining"),
    (STATE.replace("J2 at M2 todo M1 M3", "J2 at M1 todo M2 M3"), "exceed capacity"),
])
def test_state_parse_errors(sys33, text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_state(sys33, text)


def test_schedule_parse_errors(sys33):
    with pytest.raises(ParseError, match="unknown job"):
        parse_schedule(sys33, "move J7 IN M1\n")
    with pytest.raises(ParseError, match="expected"):
        parse_schedule(sys33, "move J1 IN\n")


@given(system_and_state(max_machines=5, max_jobs=5, max_cap=3))
@settings(max_examples=200, deadline=None)
def test_round_trip_random(pair):
    system, state = pair
    again = parse_system(serialize_system(system))
    assert again == system
    assert parse_state(again, serialize_state(system, state)) == state
    start = state if is_safe(system, state) else initial_state(system)
    schedule = complete_schedule(system, start)
    assert parse_schedule(system, serialize_schedule(system, schedule)) == schedule
