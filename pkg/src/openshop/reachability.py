"""Recognising states reachable from the empty system, with entry schedules.

Running the system backward in time turns a state into its *reversal*: each
job keeps its machine, the work already done becomes the work to do, and
the waiting area and the exit swap roles.  A state is reachable exactly
when its reversal is safe.
"""

from __future__ import annotations

from .safety import is_safe
from .shop_model import (IN, OUT, Move, OpenShopSystem, ShopState, apply_move,
                         initial_state, is_final, is_subset_reachable, legal_moves,
                         validate_state)


class NotSubsetReachable(ValueError):
    """The state fails the per-job test, so it is unreachable without further analysis."""


class UnsafeStateError(ValueError):
    pass


class UnreachableStateError(ValueError):
    pass


def reverse_state(system: OpenShopSystem, state: ShopState) -> ShopState:
    validate_state(system, state)
    if not is_subset_reachable(system, initial_state(system), state):
        raise NotSubsetReachable("state is not subset-reachable from the initial state")
    locations = []
    remaining = []
    for job, loc, rem in zip(system.jobs, state.locations, state.remaining):
        if loc == IN:
            locations.append(OUT)
            remaining.append(frozenset())
        elif loc == OUT:
            locations.append(IN)
            remaining.append(job.required)
        else:
            locations.append(loc)
            remaining.append(job.required - rem - {loc})
    return ShopState(tuple(locations), tuple(remaining))


def is_reachable(system: OpenShopSystem, state: ShopState) -> bool:
    try:
        reversed_state = reverse_state(system, state)
    except NotSubsetReachable:
        return False
    return is_safe(system, reversed_state)


def complete_schedule(system: OpenShopSystem, state: ShopState) -> list:
    """Moves leading from a safe ``state`` to the final state.

    Greedy: always take the first legal move whose successor is still safe.
    """
    if not is_safe(system, state):
        raise UnsafeStateError("state is unsafe")
    schedule = []
    while not is_final(state):
        for move in legal_moves(system, state):
            nxt = apply_move(system, state, move)
            if is_safe(system, nxt):
                break
        else:
            raise AssertionError("safe non-final state without a safe successor")
        schedule.append(move)
        state = nxt
    return schedule


def reverse_schedule(schedule) -> list:
    return [move.reversed() for move in reversed(schedule)]


def entry_schedule(system: OpenShopSystem, state: ShopState) -> list:
    """Moves leading from the initial state to ``state``."""
    if not is_reachable(system, state):
        raise UnreachableStateError("state is not reachable from the initial state")
    return reverse_schedule(complete_schedule(system, reverse_state(system, state)))


def kkk_witness(system: OpenShopSystem, state: ShopState, machines):
    """Entry schedule for states meeting a simple sufficient condition, else None.

    The condition: every job not yet at OUT sits on a machine of ``machines``
    and its current plus remaining machines are exactly its required machines
    inside ``machines``.  Jobs are then sent in one at a time, finished jobs
    first, each visiting its required machines outside the set and parking
    on its current machine.
    """
    machines = frozenset(machines)
    validate_state(system, state)
    for job, loc, rem in zip(system.jobs, state.locations, state.remaining):
        if loc == OUT:
            continue
        if loc not in machines or rem | {loc} != machines & job.required:
            return None
    done = [j for j, loc in enumerate(state.locations) if loc == OUT]
    parked = [j for j, loc in enumerate(state.locations) if loc != OUT]
    schedule = []
    for j in done + parked:
        loc = state.locations[j]
        here = IN
        for target in sorted(system.jobs[j].required - state.remaining[j] - {loc}):
            schedule.append(Move(j, here, target))
            here = target
        schedule.append(Move(j, here, loc))
    return schedule
