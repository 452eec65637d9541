"""Line-oriented text formats for systems, states and schedules.

System file::

    machine <name> <capacity>
    job <name> [<machine> ...]

State file (one line per job of the system)::

    job <name> at <machine|IN|OUT> todo [<machine> ...]

Schedule file::

    move <job> <from> <to>

``#`` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

from .shop_model import (IN, OUT, InvalidStateError, InvalidSystemError, Job, Machine,
                         Move, OpenShopSystem, ShopState, location_label, validate_state)


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].split()
        if content:
            yield number, content


def parse_system(text: str) -> OpenShopSystem:
    machines = []
    machine_ids = {}
    jobs = []
    job_names = set()
    for number, words in _lines(text):
        kind = words[0]
        if kind == "machine":
            if len(words) != 3:
                raise ParseError("expected 'machine <name> <capacity>'", number)
            name, cap = words[1], words[2]
            if name in machine_ids:
                raise ParseError(f"duplicate machine {name!r}", number)
            if name in ("IN", "OUT"):
                raise ParseError(f"reserved machine name {name!r}", number)
            try:
                capacity = int(cap)
            except ValueError:
                raise ParseError(f"capacity {cap!r} is not an integer", number) from None
            if capacity < 1:
                raise ParseError(f"machine {name!r} has capacity {capacity} < 1", number)
            machine_ids[name] = len(machines)
            machines.append(Machine(name, capacity))
        elif kind == "job":
            if len(words) < 2:
                raise ParseError("expected 'job <name> [<machine> ...]'", number)
            name = words[1]
            if name in job_names:
                raise ParseError(f"duplicate job {name!r}", number)
            required = set()
            for mname in words[2:]:
                if mname not in machine_ids:
                    raise ParseError(f"unknown machine {mname!r}", number)
                if machine_ids[mname] in required:
                    raise ParseError(f"machine {mname!r} repeated for job {name!r}", number)
                required.add(machine_ids[mname])
            job_names.add(name)
            jobs.append(Job(name, frozenset(required)))
        else:
            raise ParseError(f"unknown declaration {kind!r}", number)
    try:
        return OpenShopSystem(tuple(machines), tuple(jobs))
    except InvalidSystemError as exc:
        raise ParseError(str(exc)) from None


def serialize_system(system: OpenShopSystem) -> str:
    out = [f"machine {m.name} {m.capacity}" for m in system.machines]
    for job in system.jobs:
        names = " ".join(system.machines[i].name for i in sorted(job.required))
        out.append(f"job {job.name} {names}".rstrip())
    return "\n".join(out) + "\n"


def _resolve_location(system, word, number):
    if word == "IN":
        return IN
    if word == "OUT":
        return OUT
    try:
        return system.machine_index(word)
    except KeyError:
        raise ParseError(f"unknown machine {word!r}", number) from None


def parse_state(system: OpenShopSystem, text: str) -> ShopState:
    n = system.n_jobs
    locations = [None] * n
    remaining = [None] * n
    for number, words in _lines(text):
        if len(words) < 5 or words[0] != "job" or words[2] != "at" or words[4] != "todo":
            raise ParseError("expected 'job <name> at <machine> todo [<machine> ...]'",
                             number)
        try:
            j = system.job_index(words[1])
        except KeyError:
            raise ParseError(f"unknown job {words[1]!r}", number) from None
        if locations[j] is not None:
            raise ParseError(f"duplicate job {words[1]!r}", number)
        locations[j] = _resolve_location(system, words[3], number)
        todo = set()
        for word in words[5:]:
            idx = _resolve_location(system, word, number)
            if idx < 0:
                raise ParseError(f"{word} cannot be a remaining machine", number)
            if idx in todo:
                raise ParseError(f"machine {word!r} repeated", number)
            todo.add(idx)
        remaining[j] = frozenset(todo)
    missing = [system.jobs[j].name for j in range(n) if locations[j] is None]
    if missing:
        raise ParseError(f"job {missing[0]!r} missing from state")
    state = ShopState(tuple(locations), tuple(remaining))
    try:
        validate_state(system, state)
    except InvalidStateError as exc:
        raise ParseError(str(exc)) from None
    return state


def serialize_state(system: OpenShopSystem, state: ShopState) -> str:
    out = []
    for j, (loc, rem) in enumerate(zip(state.locations, state.remaining)):
        todo = " ".join(system.machines[i].name for i in sorted(rem))
        out.append(f"job {system.jobs[j].name} at {location_label(system, loc)} "
                   f"todo {todo}".rstrip())
    return "\n".join(out) + "\n"


def parse_schedule(system: OpenShopSystem, text: str) -> list:
    moves = []
    for number, words in _lines(text):
        if len(words) != 4 or words[0] != "move":
            raise ParseError("expected 'move <job> <from> <to>'", number)
        try:
            j = system.job_index(words[1])
        except KeyError:
            raise ParseError(f"unknown job {words[1]!r}", number) from None
        moves.append(Move(j, _resolve_location(system, words[2], number),
                          _resolve_location(system, words[3], number)))
    return moves


def serialize_schedule(system: OpenShopSystem, schedule) -> str:
    lines = [f"move {system.jobs[mv.job].name} {location_label(system, mv.source)} "
             f"{location_label(system, mv.target)}" for mv in schedule]
    return "".join(line + "\n" for line in lines)
