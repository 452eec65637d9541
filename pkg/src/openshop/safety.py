"""Safe-state recognition through blocking sets of machines.

A state is unsafe exactly when some non-empty set of machines is blocking:
every machine in it is full and every job sitting on it still needs work,
but only on machines of the same set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .shop_model import OpenShopSystem, ShopState


@dataclass(frozen=True)
class BlockingSet:
    machines: frozenset
    witness_jobs: frozenset

    def names(self, system: OpenShopSystem) -> list:
        return [system.machines[i].name for i in sorted(self.machines)]


def _blocking(state, machines):
    jobs = frozenset(j for j, loc in enumerate(state.locations) if loc in machines)
    return BlockingSet(frozenset(machines), jobs)


def is_full(system: OpenShopSystem, state: ShopState, machine: int) -> bool:
    return sum(1 for loc in state.locations if loc == machine) == system.capacity(machine)


def verify_blocking_set(system: OpenShopSystem, state: ShopState, machines) -> bool:
    machines = frozenset(machines)
    if not machines:
        return False
    if any(not 0 <= i < system.n_machines for i in machines):
        return False
    occ = state.occupancy(system.n_machines)
    if any(occ[i] != system.capacity(i) for i in machines):
        return False
    for loc, rem in zip(state.locations, state.remaining):
        if loc in machines and not (rem and rem <= machines):
            return False
    return True


def closure_chain(system: OpenShopSystem, state: ShopState, machine: int) -> list:
    """The non-decreasing sequence of machine sets grown from ``{machine}``.

    Each step adds the remaining machines of every job on the current set.
    The last element is the fixpoint.
    """
    current = frozenset([machine])
    chain = [current]
    while True:
        grown = set(current)
        for loc, rem in zip(state.locations, state.remaining):
            if loc in current:
                grown |= rem
        grown = frozenset(grown)
        if grown == current:
            return chain
        chain.append(grown)
        current = grown


def canonical_blocking_set(system: OpenShopSystem, state: ShopState, machine: int):
    """Smallest blocking set containing ``machine``, or None if no blocking set contains it."""
    fixpoint = closure_chain(system, state, machine)[-1]
    if verify_blocking_set(system, state, fixpoint):
        return _blocking(state, fixpoint)
    return None


def auxiliary_digraph(system: OpenShopSystem, state: ShopState) -> dict:
    """Adjacency sets: an arc from a job's machine to each machine it still needs."""
    arcs = {i: set() for i in range(system.n_machines)}
    for loc, rem in zip(state.locations, state.remaining):
        if loc >= 0:
            arcs[loc] |= rem
    return arcs


def strongly_connected_components(vertices, arcs) -> list:
    """Tarjan's algorithm, iterative.  Components come out in reverse topological order."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    components = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(sorted(arcs[root])))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, children = work[-1]
            advanced = False
            for w in children:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(arcs[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                components.append(frozenset(comp))
    return components


def find_blocking_set(system: OpenShopSystem, state: ShopState):
    """Some blocking set of ``state`` or None.

    A qualifying set is a strongly connected component of the auxiliary
    digraph that has no leaving arcs, consists of full machines and whose
    resident jobs all still need work.  Among several, the one holding the
    smallest machine index is returned.
    """
    arcs = auxiliary_digraph(system, state)
    occ = state.occupancy(system.n_machines)
    waiting = [False] * system.n_machines
    idle = [False] * system.n_machines
    for loc, rem in zip(state.locations, state.remaining):
        if loc >= 0:
            if rem:
                waiting[loc] = True
            else:
                idle[loc] = True
    best = None
    for comp in strongly_connected_components(range(system.n_machines), arcs):
        if any(occ[i] != system.capacity(i) or idle[i] or not waiting[i] for i in comp):
            continue
        if any(not arcs[i] <= comp for i in comp):
            continue
        if best is None or min(comp) < min(best):
            best = comp
    if best is None:
        return None
    found = _blocking(state, best)
    assert verify_blocking_set(system, state, found.machines)
    return found


def is_safe(system: OpenShopSystem, state: ShopState) -> bool:
    return find_blocking_set(system, state) is None
