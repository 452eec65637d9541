"""Reachable-deadlock test for systems whose machines all have capacity one.

Machines are the vertices of an edge-coloured multigraph in which every
job contributes a clique on its machines in its own colour.  A deadlock is
reachable iff some biconnected component carries two colours, iff there is
a simple cycle with pairwise distinct colours (a *rainbow* cycle).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .shop_model import IN, OUT, Move, OpenShopSystem, initial_state, replay
from .two_machine import NotApplicableError


@dataclass(frozen=True)
class ColoredMultigraph:
    n_vertices: int
    edges: tuple  # (u, v, color) with u < v

    def colors_between(self, u, v) -> list:
        a, b = min(u, v), max(u, v)
        return sorted(c for x, y, c in self.edges if (x, y) == (a, b))


@dataclass(frozen=True)
class RainbowCycle:
    """Vertices in cyclic order; ``colors[p]`` labels the edge vertices[p] -> vertices[p+1]."""

    vertices: tuple
    colors: tuple

    def edges(self) -> list:
        k = len(self.vertices)
        return [(self.vertices[p], self.vertices[(p + 1) % k], self.colors[p])
                for p in range(k)]


class InvalidCycleError(ValueError):
    pass


def check_applicable(system: OpenShopSystem) -> bool:
    return all(m.capacity == 1 for m in system.machines)


def build_multigraph(system: OpenShopSystem) -> ColoredMultigraph:
    edges = []
    for color, job in enumerate(system.jobs):
        for u, v in combinations(sorted(job.required), 2):
            edges.append((u, v, color))
    return ColoredMultigraph(system.n_machines, tuple(edges))


def blocks(graph: ColoredMultigraph) -> list:
    """Biconnected components as lists of coloured edges.

    Parallel edges share the component of their vertex pair, so two
    parallel edges alone form a component of their own.
    """
    simple = nx.Graph()
    simple.add_nodes_from(range(graph.n_vertices))
    simple.add_edges_from((u, v) for u, v, _ in graph.edges)
    block_of = {}
    for number, comp in enumerate(nx.biconnected_component_edges(simple)):
        for u, v in comp:
            block_of[min(u, v), max(u, v)] = number
    grouped = {}
    for u, v, c in graph.edges:
        grouped.setdefault(block_of[u, v], []).append((u, v, c))
    return sorted(grouped.values(), key=lambda es: min((u, v) for u, v, _ in es))


def _multicolored_blocks(graph):
    return [b for b in blocks(graph) if len({c for _, _, c in b}) >= 2]


def has_reachable_deadlock_unit(system: OpenShopSystem) -> bool:
    if not check_applicable(system):
        raise NotApplicableError(
            "some machine has capacity above one; use exact search instead")
    return bool(_multicolored_blocks(build_multigraph(system)))


def _initial_cycle(block):
    """A simple cycle inside a biconnected block through two edges of different colours.

    Prefers two non-parallel edges at the chosen vertex and, along the
    connecting path, colours not used yet, so that the first cycle is often
    rainbow already.
    """
    incident = {}
    for u, v, c in block:
        incident.setdefault(u, []).append((c, v))
        incident.setdefault(v, []).append((c, u))
    for v in sorted(incident):
        around = sorted(incident[v])
        first = around[0]
        others = [e for e in around if e[0] != first[0]]
        if others:
            apart = [e for e in others if e[1] != first[1]]
            second = apart[-1] if apart else others[0]
            break
    else:
        raise AssertionError("multicoloured block without a vertex seeing two colours")
    (c1, a), (c2, b) = first, second
    if a == b:
        return [v, a], [c1, c2]
    # path from a to b avoiding v; exists because the block stays connected without v
    adj = {}
    for x, y, c in block:
        if v not in (x, y):
            adj.setdefault(x, {}).setdefault(y, []).append(c)
            adj.setdefault(y, {}).setdefault(x, []).append(c)
    parent = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in sorted(adj.get(x, ())):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    if b not in parent:
        raise AssertionError("block is not biconnected")
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    used = {c1, c2}
    middle = []
    for x, y in zip(path, path[1:]):
        choices = sorted(adj[x][y])
        fresh = [c for c in choices if c not in used]
        pick = fresh[0] if fresh else choices[0]
        used.add(pick)
        middle.append(pick)
    return [v] + path, [c1] + middle + [c2]


def _shorten(vertices, colors):
    """Use a same-coloured clique chord to cut a strictly shorter cycle that keeps two colours."""
    k = len(vertices)
    i, j = next((i, j) for i in range(k) for j in range(i + 1, k) if colors[i] == colors[j])
    c = colors[i]
    inner = colors[i + 1:j]
    if any(x != c for x in inner):
        return vertices[i + 1:j + 1], inner + [c]
    outer = colors[j + 1:] + colors[:i]
    assert any(x != c for x in outer)
    return vertices[j + 1:] + vertices[:i + 1], outer + [c]


def find_rainbow_cycle(graph: ColoredMultigraph):
    candidates = _multicolored_blocks(graph)
    if not candidates:
        return None
    vertices, colors = _initial_cycle(candidates[0])
    while len(set(colors)) < len(colors):
        shorter = _shorten(vertices, colors)
        assert len(shorter[0]) < len(vertices)
        vertices, colors = shorter
    cycle = RainbowCycle(tuple(vertices), tuple(colors))
    check_cycle(graph, cycle)
    return cycle


def check_cycle(graph: ColoredMultigraph, cycle: RainbowCycle) -> None:
    k = len(cycle.vertices)
    if k < 2 or len(cycle.colors) != k:
        raise InvalidCycleError("a cycle needs at least two edges")
    if len(set(cycle.vertices)) != k:
        raise InvalidCycleError("cycle repeats a vertex")
    if len(set(cycle.colors)) != k:
        raise InvalidCycleError("cycle repeats a colour")
    for u, v, c in cycle.edges():
        if c not in graph.colors_between(u, v):
            raise InvalidCycleError(f"no edge of colour {c} between {u} and {v}")


def construct_deadlock_schedule(system: OpenShopSystem, cycle: RainbowCycle):
    """Return (deadlock state, schedule from the initial state) parking jobs around ``cycle``.

    Jobs off the cycle run to completion one at a time.  Then the job
    colouring the edge leaving each cycle vertex finishes its work off the
    cycle and parks on that vertex.
    """
    if not check_applicable(system):
        raise NotApplicableError("all machine capacities must be one")
    check_cycle(build_multigraph(system), cycle)
    on_cycle = frozenset(cycle.vertices)
    cycle_jobs = set(cycle.colors)
    schedule = []
    for j, job in enumerate(system.jobs):
        if j in cycle_jobs:
            continue
        here = IN
        for i in sorted(job.required):
            schedule.append(Move(j, here, i))
            here = i
        schedule.append(Move(j, here, OUT))
    for vertex, j in zip(cycle.vertices, cycle.colors):
        here = IN
        for i in sorted(system.jobs[j].required - on_cycle):
            schedule.append(Move(j, here, i))
            here = i
        schedule.append(Move(j, here, vertex))
    return replay(system, initial_state(system), schedule), schedule
