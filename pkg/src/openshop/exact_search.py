"""Exhaustive breadth-first exploration of the state graph.

The move relation is acyclic (every move lowers the potential by one), so a
plain BFS with a visited set terminates.  Searches are bounded by
:class:`SearchLimits`; running out of budget yields a LIMIT verdict, which
is never confused with NO.

Internally each job is compiled to a small table of its own local states
(location, remaining set) reachable in isolation, so a global state is a
tuple of small ints.
"""

from __future__ import annotations

import enum
import math
import time
from collections import deque
from dataclasses import dataclass, field

from .shop_model import (OUT, Move, OpenShopSystem, ShopState, final_state, initial_state,
                         validate_state)


class Answer(enum.Enum):
    YES = "YES"
    NO = "NO"
    LIMIT = "LIMIT"


@dataclass(frozen=True)
class SearchLimits:
    max_states: int = 1_000_000
    max_millis: int | None = None

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")


@dataclass
class SearchVerdict:
    answer: Answer
    witness: list | None = None
    states_explored: int = 0
    final: ShopState | None = field(default=None, repr=False)


class SearchLimitExceeded(RuntimeError):
    def __init__(self, states_explored):
        self.states_explored = states_explored
        super().__init__(f"search budget exhausted after {states_explored} states")


def _target_order(loc):
    return (1, 0) if loc == OUT else (0, loc)


def _local_successors(here, rem):
    if rem:
        return [(m, rem - {m}) for m in rem]
    if here != OUT:
        return [(OUT, frozenset())]
    return []


class _Compiled:
    """Per-job local transition tables for a system and a start state."""

    def __init__(self, system: OpenShopSystem, start: ShopState, goal: ShopState = None):
        self.system = system
        self.caps = [m.capacity for m in system.machines]
        self.loc = []
        self.rem = []
        self.trans = []
        self.start = []
        self.goal = None if goal is None else []
        for j in range(system.n_jobs):
            locs, rems, index = [], [], {}
            first = (start.locations[j], start.remaining[j])
            todo = [first]
            index[first] = 0
            locs.append(first[0])
            rems.append(first[1])
            while todo:
                for nxt in _local_successors(*todo.pop()):
                    if nxt not in index:
                        index[nxt] = len(locs)
                        locs.append(nxt[0])
                        rems.append(nxt[1])
                        todo.append(nxt)
            trans = [None] * len(locs)
            for key, i in index.items():
                succ = sorted(_local_successors(*key), key=lambda s: _target_order(s[0]))
                trans[i] = [(t, index[(t, r)]) for t, r in succ]
            self.loc.append(locs)
            self.rem.append(rems)
            self.trans.append(trans)
            self.start.append(0)
            if goal is not None:
                self.goal.append(index.get((goal.locations[j], goal.remaining[j])))
        if goal is not None and None not in self.goal:
            self._prune_towards_goal()
        self.may_enter = [self._entries(trans) for trans in self.trans]

    @staticmethod
    def _entries(trans):
        # machines a job may still move into from each local state
        done = {}

        def visit(i):
            if i not in done:
                acc = set()
                for t, n in trans[i]:
                    if t >= 0:
                        acc.add(t)
                    acc |= visit(n)
                done[i] = frozenset(acc)
            return done[i]

        return [visit(i) for i in range(len(trans))]

    def _prune_towards_goal(self):
        # drop local transitions after which the job can no longer reach its goal
        for j, trans in enumerate(self.trans):
            can = {self.goal[j]}
            changed = True
            while changed:
                changed = False
                for i, succ in enumerate(trans):
                    if i not in can and any(n in can for _, n in succ):
                        can.add(i)
                        changed = True
            self.trans[j] = [[(t, n) for t, n in succ if n in can] for succ in trans]

    def successors(self, code):
        occ = [0] * len(self.caps)
        loc = self.loc
        for j, lid in enumerate(code):
            where = loc[j][lid]
            if where >= 0:
                occ[where] += 1
        caps = self.caps
        for j, lid in enumerate(code):
            for target, nid in self.trans[j][lid]:
                if target == OUT or occ[target] < caps[target]:
                    yield Move(j, loc[j][lid], target), code[:j] + (nid,) + code[j + 1:]

    def stubborn_successors(self, code):
        """Successors along the moves of one closed group of jobs only.

        A group is closed when, for every machine a member wants to move
        into, it contains every job that may still enter that machine (if
        it has room) or every job sitting on it (if it is full).  Jobs
        outside the group then cannot take a slot a member's move needs, nor
        free one a blocked member waits for, so every deadlock stays
        reachable (the stubborn set method).  Among the closed groups grown
        from single jobs with an enabled move, the one with the fewest
        enabled moves wins; ties go to the smaller first job.
        """
        loc, trans, caps = self.loc, self.trans, self.caps
        occ = [0] * len(caps)
        sitting = [[] for _ in caps]
        entering = [[] for _ in caps]
        for j, lid in enumerate(code):
            where = loc[j][lid]
            if where >= 0:
                occ[where] += 1
                sitting[where].append(j)
            for i in self.may_enter[j][lid]:
                entering[i].append(j)
        depends = [sitting[i] if occ[i] >= caps[i] else entering[i] for i in range(len(caps))]
        enabled = [[(t, n) for t, n in trans[j][lid] if t == OUT or occ[t] < caps[t]]
                   for j, lid in enumerate(code)]
        best = None
        for first in range(len(code)):
            if not enabled[first]:
                continue
            group = {first}
            stack = [first]
            while stack:
                j = stack.pop()
                for t, _ in trans[j][code[j]]:
                    if t >= 0:
                        for k in depends[t]:
                            if k not in group:
                                group.add(k)
                                stack.append(k)
            size = sum(len(enabled[j]) for j in group)
            if best is None or size < best[0]:
                best = (size, group)
                if size == 1:
                    break
        if best is None:
            return
        for j in sorted(best[1]):
            lid = code[j]
            for t, n in enabled[j]:
                yield Move(j, loc[j][lid], t), code[:j] + (n,) + code[j + 1:]

    def decode(self, code) -> ShopState:
        return ShopState(tuple(self.loc[j][i] for j, i in enumerate(code)),
                         tuple(self.rem[j][i] for j, i in enumerate(code)))

    def is_final(self, code):
        return all(self.loc[j][i] == OUT for j, i in enumerate(code))


def _bfs(compiled, start_code, stop, limits, reduce=False):
    """Generic BFS; returns (hit_code or None, parents, exhausted_budget)."""
    expand = compiled.stubborn_successors if reduce else compiled.successors
    deadline = None
    if limits.max_millis is not None:
        deadline = time.monotonic() + limits.max_millis / 1000.0
    parents = {start_code: None}
    if stop(start_code, compiled):
        return start_code, parents, False
    frontier = deque([start_code])
    while frontier:
        code = frontier.popleft()
        for move, nxt in expand(code):
            if nxt in parents:
                continue
            parents[nxt] = (code, move)
            if stop(nxt, compiled):
                return nxt, parents, False
            if len(parents) >= limits.max_states:
                return None, parents, True
            frontier.append(nxt)
        if deadline is not None and time.monotonic() > deadline:
            return None, parents, True
    return None, parents, False


def _path(parents, code):
    moves = []
    while parents[code] is not None:
        code, move = parents[code]
        moves.append(move)
    moves.reverse()
    return moves


def enumerate_reachable(system: OpenShopSystem, start: ShopState,
                        limits: SearchLimits = SearchLimits()) -> set:
    """All states reachable from ``start``; raises SearchLimitExceeded past the budget."""
    validate_state(system, start)
    compiled = _Compiled(system, start)
    code = tuple(compiled.start)
    _, parents, exhausted = _bfs(compiled, code, lambda c, _: False, limits)
    if exhausted:
        raise SearchLimitExceeded(len(parents))
    return {compiled.decode(c) for c in parents}


def reachable_graph(system: OpenShopSystem, start: ShopState,
                    limits: SearchLimits = SearchLimits()) -> dict:
    """Successor lists of every state reachable from ``start``."""
    validate_state(system, start)
    compiled = _Compiled(system, start)
    code = tuple(compiled.start)
    _, parents, exhausted = _bfs(compiled, code, lambda c, _: False, limits)
    if exhausted:
        raise SearchLimitExceeded(len(parents))
    decoded = {c: compiled.decode(c) for c in parents}
    return {decoded[c]: [decoded[n] for _, n in compiled.successors(c)] for c in parents}


def state_to_state(system: OpenShopSystem, s: ShopState, t: ShopState,
                   limits: SearchLimits = SearchLimits(), reduce: bool = True) -> SearchVerdict:
    """Decide whether ``t`` is reachable from ``s``; YES carries a shortest schedule.

    Local moves after which a job can no longer end in its target local
    state are pruned.  That turns ``t`` into a deadlock of the pruned
    system, so with ``reduce`` only stubborn successors are expanded.
    Every schedule from ``s`` to ``t`` has the same length (one potential
    unit per move), so the witness stays shortest either way.
    """
    validate_state(system, s)
    validate_state(system, t)
    compiled = _Compiled(system, s, goal=t)
    if None in compiled.goal:
        return SearchVerdict(Answer.NO, states_explored=1)
    goal = tuple(compiled.goal)
    start = tuple(compiled.start)
    hit, parents, exhausted = _bfs(compiled, start, lambda c, _: c == goal, limits, reduce)
    if hit is not None:
        return SearchVerdict(Answer.YES, _path(parents, hit), len(parents),
                             compiled.decode(hit))
    if exhausted:
        return SearchVerdict(Answer.LIMIT, states_explored=len(parents))
    return SearchVerdict(Answer.NO, states_explored=len(parents))


def _is_dead(code, compiled):
    if compiled.is_final(code):
        return False
    for _ in compiled.successors(code):
        return False
    return True


def reachable_deadlock_exact(system: OpenShopSystem, limits: SearchLimits = SearchLimits(),
                             reduce: bool = True) -> SearchVerdict:
    """BFS from the initial state until the first deadlock.

    With ``reduce`` the search expands stubborn successors only; every
    reachable deadlock keeps its depth, so the first one found is still a
    nearest one.
    """
    start_state = initial_state(system)
    compiled = _Compiled(system, start_state)
    start = tuple(compiled.start)
    hit, parents, exhausted = _bfs(compiled, start, _is_dead, limits, reduce)
    if hit is not None:
        return SearchVerdict(Answer.YES, _path(parents, hit), len(parents),
                             compiled.decode(hit))
    if exhausted:
        return SearchVerdict(Answer.LIMIT, states_explored=len(parents))
    return SearchVerdict(Answer.NO, states_explored=len(parents))


def can_reach_final(system: OpenShopSystem, graph: dict) -> dict:
    """For every state of an explored graph, whether the final state is reachable from it."""
    target = final_state(system)
    result = {}
    for root in graph:
        if root in result:
            continue
        stack = [(root, iter(graph[root]))]
        while stack:
            node, children = stack[-1]
            for child in children:
                if child not in result:
                    stack.append((child, iter(graph[child])))
                    break
            else:
                stack.pop()
                result[node] = node == target or any(result[c] for c in graph[node])
    return result


def state_space_bound(system: OpenShopSystem) -> int:
    """Coarse upper bound on the number of distinct states, for budget pre-checks."""
    return math.prod((len(job.required) + 2) * 2 ** len(job.required)
                     for job in system.jobs)
