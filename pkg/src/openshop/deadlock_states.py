"""Reachable-deadlock decision by enumerating deadlock states instead of schedules.

A state is reachable iff it is subset-reachable and its reversal is safe,
which costs polynomial time.  So instead of exploring every reachable state
one can list the deadlock states themselves and test each.  Two facts keep
the list short:

* a job waiting at IN can be traded for one that ran to completion before
  anybody else moved (at that time all its machines were empty), so it is
  enough to list deadlocks in which every job is at OUT or on a machine;
* a job on a machine is blocked only if everything it still needs is full,
  and every full machine is filled exactly to capacity.

The listing is exhaustive, so the verdict is exact, and it does not depend
on how many interleavings lead to a deadlock.
"""

from __future__ import annotations

import time
from itertools import combinations

from .exact_search import Answer, SearchLimits, SearchVerdict
from .reachability import entry_schedule, is_reachable
from .shop_model import OUT, OpenShopSystem, ShopState


def _options(system, full):
    # per job: (location, remaining) choices compatible with the full set
    options = []
    for j in range(system.n_jobs):
        req = system.required(j)
        choices = [(OUT, frozenset())]
        for i in sorted(req):
            waits = sorted((req - {i}) & full)
            for k in range(1, len(waits) + 1):
                for rem in combinations(waits, k):
                    choices.append((i, frozenset(rem)))
        options.append(choices)
    return options


def deadlock_candidates(system: OpenShopSystem):
    """Yield every deadlock state in which no job waits at IN.

    States come grouped by their set of full machines, smaller sets first.
    """
    m, n = system.n_machines, system.n_jobs
    caps = [system.capacity(i) for i in range(m)]
    for size in range(1, m + 1):
        for chosen in combinations(range(m), size):
            full = frozenset(chosen)
            options = _options(system, full)
            # supply[j][i]: jobs from j on that could sit on full machine i
            supply = [[0] * m for _ in range(n + 1)]
            for j in range(n - 1, -1, -1):
                supply[j] = list(supply[j + 1])
                for i in {where for where, _ in options[j][1:]}:
                    supply[j][i] += 1
            if any(supply[0][i] < caps[i] for i in full):
                continue
            yield from _fill(options, full, caps, supply)


def _fill(options, full, caps, supply):
    n = len(options)
    occ = [0] * len(caps)
    picks = [None] * n

    def extend(j):
        if any(caps[i] - occ[i] > supply[j][i] for i in full):
            return
        if j == n:
            yield ShopState(tuple(p[0] for p in picks), tuple(p[1] for p in picks))
            return
        for where, rem in options[j]:
            if where != OUT:
                limit = caps[where] if where in full else caps[where] - 1
                if occ[where] >= limit:
                    continue
                occ[where] += 1
            picks[j] = (where, rem)
            yield from extend(j + 1)
            if where != OUT:
                occ[where] -= 1

    yield from extend(0)


def reachable_deadlock_by_states(system: OpenShopSystem,
                                 limits: SearchLimits = SearchLimits()) -> SearchVerdict:
    """Decide Reachable Deadlock by testing each listed deadlock state for reachability.

    ``states_explored`` counts candidates; more than ``limits.max_states``
    of them, or running past ``limits.max_millis``, gives LIMIT.  A YES carries the entry schedule of the first
    reachable deadlock found.
    """
    deadline = None
    if limits.max_millis is not None:
        deadline = time.monotonic() + limits.max_millis / 1000.0
    seen = 0
    for state in deadlock_candidates(system):
        seen += 1
        if is_reachable(system, state):
            return SearchVerdict(Answer.YES, entry_schedule(system, state), seen, state)
        if seen >= limits.max_states or (deadline is not None and time.monotonic() > deadline):
            return SearchVerdict(Answer.LIMIT, states_explored=seen)
    return SearchVerdict(Answer.NO, states_explored=seen)
