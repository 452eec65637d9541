"""Open shop systems, states, and the move relation between states.

Machines are referred to by 0-based index.  The two artificial machines
(the waiting area before entry and the exit after completion) are the
sentinels :data:`IN` and :data:`OUT`; they never appear in capacity checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

IN = -1
OUT = -2


class InvalidSystemError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


class IllegalMoveError(ValueError):
    pass


def location_label(system: "OpenShopSystem", loc: int) -> str:
    if loc == IN:
        return "IN"
    if loc == OUT:
        return "OUT"
    return system.machines[loc].name


@dataclass(frozen=True)
class Machine:
    name: str
    capacity: int


@dataclass(frozen=True)
class Job:
    name: str
    required: frozenset


@dataclass(frozen=True)
class OpenShopSystem:
    machines: tuple
    jobs: tuple

    def __post_init__(self):
        names = set()
        for mach in self.machines:
            if not mach.name:
                raise InvalidSystemError("machine name must be non-empty")
            if mach.name in names:
                raise InvalidSystemError(f"duplicate machine {mach.name!r}")
            if not isinstance(mach.capacity, int) or mach.capacity < 1:
                raise InvalidSystemError(
                    f"machine {mach.name!r} has capacity {mach.capacity!r} < 1")
            names.add(mach.name)
        names = set()
        m = len(self.machines)
        for job in self.jobs:
            if not job.name:
                raise InvalidSystemError("job name must be non-empty")
            if job.name in names:
                raise InvalidSystemError(f"duplicate job {job.name!r}")
            names.add(job.name)
            bad = [i for i in job.required if not 0 <= i < m]
            if bad:
                raise InvalidSystemError(
                    f"job {job.name!r} requires undeclared machine index {bad[0]}")

    @classmethod
    def build(cls, capacities: Sequence[int], requirements: Iterable[Iterable[int]],
              machine_names=None, job_names=None) -> "OpenShopSystem":
        """Shorthand constructor; default names are M1.. and J1.."""
        requirements = [frozenset(r) for r in requirements]
        if machine_names is None:
            machine_names = [f"M{i + 1}" for i in range(len(capacities))]
        if job_names is None:
            job_names = [f"J{j + 1}" for j in range(len(requirements))]
        machines = tuple(Machine(n, c) for n, c in zip(machine_names, capacities))
        jobs = tuple(Job(n, r) for n, r in zip(job_names, requirements))
        return cls(machines, jobs)

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    @property
    def n_jobs(self) -> int:
        return len(self.jobs)

    def capacity(self, machine: int) -> int:
        return self.machines[machine].capacity

    def required(self, job: int) -> frozenset:
        return self.jobs[job].required

    def machine_index(self, name: str) -> int:
        for i, mach in enumerate(self.machines):
            if mach.name == name:
                return i
        raise KeyError(name)

    def job_index(self, name: str) -> int:
        for j, job in enumerate(self.jobs):
            if job.name == name:
                return j
        raise KeyError(name)

    def max_moves(self) -> int:
        """Upper bound on the length of any move sequence starting at the initial state."""
        return sum(len(job.required) + 1 for job in self.jobs)


@dataclass(frozen=True)
class ShopState:
    """Location and set of still-to-visit machines for every job.

    Immutable and hashable; two states are equal iff they agree job by job.
    """

    locations: tuple
    remaining: tuple

    def occupants(self, machine: int) -> list:
        return [j for j, loc in enumerate(self.locations) if loc == machine]

    def occupancy(self, n_machines: int) -> list:
        occ = [0] * n_machines
        for loc in self.locations:
            if loc >= 0:
                occ[loc] += 1
        return occ

    def potential(self) -> int:
        return sum(len(rem) + 1
                   for loc, rem in zip(self.locations, self.remaining) if loc != OUT)

    def key(self) -> tuple:
        """Canonical encoding: (location, sorted remaining) per job in declaration order."""
        return tuple((loc, tuple(sorted(rem)))
                     for loc, rem in zip(self.locations, self.remaining))

    def with_job(self, job: int, location: int, remaining: frozenset) -> "ShopState":
        locs = list(self.locations)
        rems = list(self.remaining)
        locs[job] = location
        rems[job] = remaining
        return ShopState(tuple(locs), tuple(rems))


def make_state(locations: Iterable[int], remaining: Iterable[Iterable[int]]) -> ShopState:
    return ShopState(tuple(locations), tuple(frozenset(r) for r in remaining))


@dataclass(frozen=True)
class Move:
    job: int
    source: int
    target: int

    def reversed(self) -> "Move":
        """The same relocation run backward in time, with IN and OUT swapping roles."""
        return Move(self.job, _swap_sentinel(self.target), _swap_sentinel(self.source))


def _swap_sentinel(loc: int) -> int:
    if loc == IN:
        return OUT
    if loc == OUT:
        return IN
    return loc


def validate_state(system: OpenShopSystem, state: ShopState) -> None:
    """Raise InvalidStateError naming the first violated state invariant."""
    n, m = system.n_jobs, system.n_machines
    if len(state.locations) != n or len(state.remaining) != n:
        raise InvalidStateError(
            f"state describes {len(state.locations)} jobs, system has {n}")
    for j, (loc, rem) in enumerate(zip(state.locations, state.remaining)):
        name = system.jobs[j].name
        req = system.jobs[j].required
        if loc not in (IN, OUT) and not 0 <= loc < m:
            raise InvalidStateError(f"job {name}: unknown location {loc!r}")
        if not rem <= req:
            raise InvalidStateError(f"job {name}: remaining machines not all required")
        if loc in rem:
            raise InvalidStateError(f"job {name}: current machine listed as remaining")
        if loc == OUT and rem:
            raise InvalidStateError(f"job {name}: at OUT with remaining work")
        if loc == IN and rem != req:
            raise InvalidStateError(f"job {name}: at IN but part of its work is done")
    for i, count in enumerate(state.occupancy(m)):
        if count > system.capacity(i):
            raise InvalidStateError(
                f"machine {system.machines[i].name}: {count} jobs exceed capacity "
                f"{system.capacity(i)}")


def initial_state(system: OpenShopSystem) -> ShopState:
    return ShopState(tuple(IN for _ in system.jobs),
                     tuple(job.required for job in system.jobs))


def final_state(system: OpenShopSystem) -> ShopState:
    return ShopState(tuple(OUT for _ in system.jobs),
                     tuple(frozenset() for _ in system.jobs))


def is_final(state: ShopState) -> bool:
    return all(loc == OUT for loc in state.locations)


def legal_moves(system: OpenShopSystem, state: ShopState) -> list:
    """All moves leading to a successor state, ordered by job, then target (OUT last)."""
    validate_state(system, state)
    occ = state.occupancy(system.n_machines)
    moves = []
    for j, (loc, rem) in enumerate(zip(state.locations, state.remaining)):
        if rem:
            for target in sorted(rem):
                if occ[target] < system.capacity(target):
                    moves.append(Move(j, loc, target))
        elif loc != OUT:
            moves.append(Move(j, loc, OUT))
    return moves


def apply_move(system: OpenShopSystem, state: ShopState, move: Move) -> ShopState:
    """Return the successor produced by ``move``; the input state is left untouched."""
    j = move.job
    if not 0 <= j < system.n_jobs:
        raise IllegalMoveError(f"no job with index {j}")
    name = system.jobs[j].name
    loc, rem = state.locations[j], state.remaining[j]
    if move.source != loc:
        raise IllegalMoveError(
            f"job {name} is at {location_label(system, loc)}, "
            f"not {location_label(system, move.source)}")
    if move.target == OUT:
        if loc == OUT:
            raise IllegalMoveError(f"job {name} has already left the system")
        if rem:
            raise IllegalMoveError(f"job {name} cannot leave: work remains")
        return state.with_job(j, OUT, frozenset())
    if move.target == IN:
        raise IllegalMoveError("no job may move back to IN")
    if move.target not in rem:
        raise IllegalMoveError(
            f"job {name}: target {location_label(system, move.target)} "
            "is not in its remaining set")
    load = sum(1 for other in state.locations if other == move.target)
    if load >= system.capacity(move.target):
        raise IllegalMoveError(
            f"job {name}: target {system.machines[move.target].name} is full")
    return state.with_job(j, move.target, rem - {move.target})


def replay(system: OpenShopSystem, start: ShopState, schedule: Iterable[Move]) -> ShopState:
    """Apply every move in order, raising IllegalMoveError at the first bad one."""
    state = start
    for step, move in enumerate(schedule):
        try:
            state = apply_move(system, state, move)
        except IllegalMoveError as exc:
            raise IllegalMoveError(f"move {step + 1}: {exc}") from None
    return state


def is_deadlock(system: OpenShopSystem, state: ShopState) -> bool:
    return not is_final(state) and not legal_moves(system, state)


def is_subset_reachable(system: OpenShopSystem, s: ShopState, t: ShopState) -> bool:
    """Per-job necessary condition for ``t`` to be reachable from ``s``."""
    for ls, rs, lt, rt in zip(s.locations, s.remaining, t.locations, t.remaining):
        if lt == ls and rt == rs:
            continue
        if lt in rs and rt <= rs - {lt}:
            continue
        if lt == OUT and not rt:
            continue
        return False
    return True
