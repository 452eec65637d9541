"""Reachable-deadlock test for systems in which no job needs more than two machines.

Every two-machine job splits one unit of load between its machines.  The
load assignment minimising total overflow beyond capacity is found as an
integral min-cost flow and then shifted, job by job, until no job keeps load
on a saturated machine while its other machine still has room.  A deadlock
is reachable exactly when some machine then carries at least its capacity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .shop_model import IN, OUT, Move, OpenShopSystem, initial_state, replay


class NotApplicableError(ValueError):
    pass


@dataclass
class FractionalAssignment:
    x: dict  # (job, machine) -> Fraction
    y: dict  # machine -> Fraction


@dataclass(frozen=True)
class CriticalSet:
    machines: frozenset
    jobs: frozenset


def check_applicable(system: OpenShopSystem) -> bool:
    return all(len(job.required) <= 2 for job in system.jobs)


def _require(system):
    if not check_applicable(system):
        raise NotApplicableError(
            "some job needs more than two machines; use exact search instead")


def pair_jobs(system: OpenShopSystem) -> list:
    """Indices of the jobs that matter for deadlocks: those needing exactly two machines."""
    return [j for j, job in enumerate(system.jobs) if len(job.required) == 2]


def loads(system: OpenShopSystem, x: dict) -> dict:
    y = {i: Fraction(0) for i in range(system.n_machines)}
    for (_, i), value in x.items():
        y[i] += value
    return y


def objective(system: OpenShopSystem, assignment: FractionalAssignment) -> Fraction:
    return sum((max(assignment.y[i], Fraction(system.capacity(i)))
                for i in range(system.n_machines)), Fraction(0))


def is_feasible(system: OpenShopSystem, assignment: FractionalAssignment) -> bool:
    jobs = pair_jobs(system)
    keys = {(j, i) for j in jobs for i in system.required(j)}
    if set(assignment.x) != keys:
        return False
    if any(v < 0 for v in assignment.x.values()):
        return False
    for j in jobs:
        if sum(assignment.x[j, i] for i in system.required(j)) != 1:
            return False
    return assignment.y == loads(system, assignment.x)


def solve_lp(system: OpenShopSystem) -> FractionalAssignment:
    """Optimal load assignment, integral, via min-cost flow.

    Each job sends one unit to one of its machines.  A machine forwards up
    to its capacity for free and any excess at unit cost, so the flow cost
    is the total overflow; the LP objective differs from it by a constant.
    """
    _require(system)
    jobs = pair_jobs(system)
    total = len(jobs)
    graph = nx.DiGraph()
    graph.add_node("sink", demand=total)
    for j in jobs:
        graph.add_node(("job", j), demand=-1)
        for i in sorted(system.required(j)):
            graph.add_edge(("job", j), ("machine", i), capacity=1, weight=0)
    for i in range(system.n_machines):
        graph.add_edge(("machine", i), "sink", capacity=system.capacity(i), weight=0)
        graph.add_edge(("machine", i), ("excess", i), capacity=total, weight=1)
        graph.add_edge(("excess", i), "sink", capacity=total, weight=0)
    flow = nx.min_cost_flow(graph) if total else {}
    x = {}
    for j in jobs:
        for i in system.required(j):
            x[j, i] = Fraction(flow[("job", j)][("machine", i)])
    assignment = FractionalAssignment(x, loads(system, x))
    assert is_feasible(system, assignment)
    return assignment


def violations(system: OpenShopSystem, assignment: FractionalAssignment) -> list:
    """(job, saturated machine, other machine) triples breaking the shifting rule."""
    found = []
    x, y = assignment.x, assignment.y
    for j in pair_jobs(system):
        a, b = sorted(system.required(j))
        for src, dst in ((a, b), (b, a)):
            if y[src] >= system.capacity(src) and x[j, src] > 0 and y[dst] < system.capacity(dst):
                found.append((j, src, dst))
    return found


def postprocess(system: OpenShopSystem, assignment: FractionalAssignment) -> FractionalAssignment:
    """Shift load until no job keeps load on a saturated machine while its other machine has room.

    Each step moves load off a machine sitting exactly at capacity onto a
    machine strictly below it and keeps the receiving machine strictly
    below capacity, so the set of saturated machines only shrinks.
    """
    _require(system)
    x = dict(assignment.x)
    y = dict(assignment.y)
    before = objective(system, FractionalAssignment(x, y))
    steps = 0
    while True:
        found = violations(system, FractionalAssignment(x, y))
        if not found:
            break
        j, src, dst = found[0]
        if y[src] > system.capacity(src):
            raise AssertionError(
                f"shifting job {j} off overloaded machine {src} lowers the objective; "
                "input assignment is not optimal")
        room = system.capacity(dst) - y[dst]
        eps = x[j, src] if x[j, src] < room else room / 2
        x[j, src] -= eps
        x[j, dst] += eps
        y[src] -= eps
        y[dst] += eps
        steps += 1
        assert steps <= system.n_machines
    result = FractionalAssignment(x, y)
    assert objective(system, result) == before
    return result


def critical_set(system: OpenShopSystem, assignment: FractionalAssignment) -> CriticalSet:
    machines = frozenset(i for i in range(system.n_machines)
                         if assignment.y[i] >= system.capacity(i))
    jobs = frozenset(j for (j, i), v in assignment.x.items() if v > 0 and i in machines)
    return CriticalSet(machines, jobs)


def has_reachable_deadlock_2m(system: OpenShopSystem):
    """Return (answer, critical set or None)."""
    _require(system)
    assignment = postprocess(system, solve_lp(system))
    critical = critical_set(system, assignment)
    if critical.machines:
        return True, critical
    return False, None


def saturating_assignment(system: OpenShopSystem, critical: CriticalSet) -> dict:
    """Map job -> machine giving every critical machine exactly its capacity in distinct jobs."""
    graph = nx.DiGraph()
    graph.add_node("source")
    for j in sorted(critical.jobs):
        graph.add_edge("source", ("job", j), capacity=1)
        for i in sorted(system.required(j) & critical.machines):
            graph.add_edge(("job", j), ("machine", i), capacity=1)
    for i in sorted(critical.machines):
        graph.add_edge(("machine", i), "sink", capacity=system.capacity(i))
    need = sum(system.capacity(i) for i in critical.machines)
    value, flow = nx.maximum_flow(graph, "source", "sink")
    if value != need:
        raise AssertionError(f"critical machines cannot be saturated ({value} < {need})")
    chosen = {}
    for j in sorted(critical.jobs):
        for (_, i), units in flow[("job", j)].items():
            if units:
                chosen[j] = i
    return chosen


def construct_deadlock_witness(system: OpenShopSystem, critical: CriticalSet):
    """Return (deadlock state, schedule from the initial state)."""
    chosen = saturating_assignment(system, critical)
    schedule = []
    for j, job in enumerate(system.jobs):
        if j in chosen:
            continue
        here = IN
        for i in sorted(job.required):
            schedule.append(Move(j, here, i))
            here = i
        schedule.append(Move(j, here, OUT))
    for j in sorted(chosen):
        schedule.append(Move(j, IN, chosen[j]))
    return replay(system, initial_state(system), schedule), schedule
