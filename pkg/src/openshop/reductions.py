"""Instance generators for the two hardness constructions, with their witness schedules.

* 3-SAT -> state-to-state reachability: a formula becomes a system with two
  states ``s`` and ``t`` such that ``t`` is reachable from ``s`` iff the
  formula is satisfiable.
* 3-dimensional matching -> reachable deadlock: a triple system becomes an
  open shop system that can deadlock iff a perfect matching exists.

Generated names: ``S_x1``/``S_not_x1`` (likewise ``T_``), ``U_1``, ``V_c1``
for machines and ``J_x1``, ``Jp_x1``, ``K_c1_not_x2``, ``Kp_c1_x3`` for jobs
in the SAT construction; ``S0``..``S{n+1}``, ``T_a1_b2_c1`` and ``Jp_a1``,
``Jm_a1``, ``J_b1``, ``J_c1``, ``D0``, ``D{n+1}`` in the matching one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .reachability import kkk_witness
from .safety import BlockingSet, verify_blocking_set
from .shop_model import (IN, OUT, Job, Machine, Move, OpenShopSystem, ShopState,
                         initial_state, is_deadlock, replay, validate_state)


class ReductionError(ValueError):
    pass


# ---------------------------------------------------------------- 3-SAT

@dataclass(frozen=True)
class CnfFormula:
    """Clauses are triples of non-zero ints: +i for x_i, -i for its negation (1-based)."""

    n_variables: int
    clauses: tuple

    def __post_init__(self):
        for number, clause in enumerate(self.clauses, start=1):
            if len(clause) != 3:
                raise ReductionError(f"clause {number} does not have three literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_variables:
                    raise ReductionError(f"clause {number}: literal {lit} out of range")
            if len({abs(lit) for lit in clause}) != 3:
                raise ReductionError(
                    f"clause {number}: literals must use three distinct variables")

    def satisfied_by(self, assignment) -> bool:
        return all(any(_lit_true(lit, assignment) for lit in c) for c in self.clauses)

    def is_satisfiable(self) -> bool:
        return any(self.satisfied_by(a)
                   for a in product((False, True), repeat=self.n_variables))


def _lit_true(lit, assignment):
    value = assignment[abs(lit) - 1]
    return value if lit > 0 else not value


def _lit_name(lit):
    return f"x{lit}" if lit > 0 else f"not_x{-lit}"


def parse_dimacs(text: str) -> CnfFormula:
    n_vars = None
    numbers = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            words = line.split()
            if len(words) != 4 or words[1] != "cnf":
                raise ReductionError(f"bad problem line {line!r}")
            n_vars = int(words[2])
            n_clauses = int(words[3])
            continue
        numbers.extend(int(w) for w in line.split())
    if n_vars is None:
        raise ReductionError("missing 'p cnf' header")
    clauses = []
    current = []
    for lit in numbers:
        if lit == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(lit)
    if current:
        raise ReductionError("last clause is not terminated by 0")
    if len(clauses) != n_clauses:
        raise ReductionError(f"header announces {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def format_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.n_variables} {len(formula.clauses)}"]
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"


@dataclass
class SatReductionOutput:
    formula: CnfFormula
    system: OpenShopSystem
    s: ShopState
    t: ShopState
    machines: dict  # label -> machine index, e.g. ("S", lit), ("U", i), ("V", c)
    jobs: dict  # label -> job index, e.g. ("J", lit), ("Jp", lit), ("K", c, lit)


def sat_to_state_to_state(formula: CnfFormula) -> SatReductionOutput:
    machines = []
    mid = {}

    def machine(label, name, cap):
        mid[label] = len(machines)
        machines.append(Machine(name, cap))

    n = formula.n_variables
    for i in range(1, n + 1):
        for lit in (i, -i):
            machine(("S", lit), f"S_{_lit_name(lit)}", 1)
            machine(("T", lit), f"T_{_lit_name(lit)}", 1)
        machine(("U", i), f"U_{i}", 2)
    for c in range(len(formula.clauses)):
        machine(("V", c), f"V_c{c + 1}", 3)

    def U(lit):
        return mid["U", abs(lit)]

    jobs = []
    jid = {}
    s_loc, s_rem, t_loc, t_rem = [], [], [], []

    def job(label, name, required, s_at, s_todo, t_at, t_todo):
        jid[label] = len(jobs)
        jobs.append(Job(name, frozenset(required)))
        s_loc.append(s_at)
        s_rem.append(frozenset(s_todo))
        t_loc.append(t_at)
        t_rem.append(frozenset(t_todo))

    for i in range(1, n + 1):
        for lit in (i, -i):
            S, T = mid["S", lit], mid["T", lit]
            job(("J", lit), f"J_{_lit_name(lit)}", {S, U(lit)}, S, {U(lit)}, U(lit), ())
            req = {S, T, U(lit)}
            job(("Jp", lit), f"Jp_{_lit_name(lit)}", req, IN, req, OUT, ())
    for c, clause in enumerate(formula.clauses):
        V = mid["V", c]
        for lit in clause:
            S, T = mid["S", lit], mid["T", lit]
            job(("K", c, lit), f"K_c{c + 1}_{_lit_name(lit)}", {V, S, T}, V, {S, T}, OUT, ())
        for lit in clause:
            req = {U(lit), V}
            job(("Kp", c, lit), f"Kp_c{c + 1}_{_lit_name(lit)}", req, IN, req, OUT, ())

    system = OpenShopSystem(tuple(machines), tuple(jobs))
    s = ShopState(tuple(s_loc), tuple(s_rem))
    t = ShopState(tuple(t_loc), tuple(t_rem))
    validate_state(system, s)
    validate_state(system, t)
    return SatReductionOutput(formula, system, s, t, mid, jid)


def sat_witness_schedule(output: SatReductionOutput, assignment) -> list:
    """Four-phase schedule from ``s`` to ``t`` driven by a satisfying assignment."""
    formula = output.formula
    assignment = tuple(bool(v) for v in assignment)
    if len(assignment) != formula.n_variables:
        raise ReductionError("assignment length differs from the variable count")
    for number, clause in enumerate(formula.clauses, start=1):
        if not any(_lit_true(lit, assignment) for lit in clause):
            raise ReductionError(f"assignment violates clause {number}")
    M, J = output.machines, output.jobs
    moves = []

    def route(job, *stops):
        for a, b in zip(stops, stops[1:]):
            moves.append(Move(job, a, b))

    def true_lit(i):
        return i if assignment[i - 1] else -i

    # phase 1: free S and T of every true literal, park J' of the false one on T
    for i in range(1, formula.n_variables + 1):
        lit = true_lit(i)
        U = M["U", i]
        route(J["J", lit], M["S", lit], U)
        route(J["Jp", lit], IN, U, M["T", lit], M["S", lit], OUT)
        route(J["Jp", -lit], IN, U, M["T", -lit])
    # phase 2: per clause, one K job of a true literal leaves V, then all K' jobs pass
    picked = []
    for c, clause in enumerate(formula.clauses):
        lit = next(x for x in clause if _lit_true(x, assignment))
        picked.append(lit)
        V = M["V", c]
        route(J["K", c, lit], V, M["S", lit], M["T", lit], OUT)
        for x in clause:
            route(J["Kp", c, x], IN, M["U", abs(x)], V, OUT)
    # phase 3: deactivate each variable and release the parked J' job
    for i in range(1, formula.n_variables + 1):
        lit = -true_lit(i)
        route(J["J", lit], M["S", lit], M["U", i])
        route(J["Jp", lit], M["T", lit], M["S", lit], OUT)
    # phase 4: remaining K jobs
    for c, clause in enumerate(formula.clauses):
        V = M["V", c]
        for x in clause:
            if x != picked[c]:
                route(J["K", c, x], V, M["S", x], M["T", x], OUT)
    return moves


# ---------------------------------------------------------------- 3DM

@dataclass(frozen=True)
class TdmInstance:
    """Triples are 1-based index triples (a, b, c) into A, B, C of size n."""

    n: int
    triples: tuple

    def __post_init__(self):
        seen = set()
        count = {}
        for t in self.triples:
            if len(t) != 3 or any(not 1 <= x <= self.n for x in t):
                raise ReductionError(f"triple {t} out of range")
            if t in seen:
                raise ReductionError(f"triple {t} listed twice")
            seen.add(t)
            for kind, x in zip("abc", t):
                count[kind, x] = count.get((kind, x), 0) + 1
                if count[kind, x] > 3:
                    raise ReductionError(f"element {kind}{x} occurs in more than three triples")

    def perfect_matchings(self) -> list:
        """All perfect matchings, by brute force over n-subsets."""
        found = []
        for chosen in combinations(self.triples, self.n):
            if all(len({t[k] for t in chosen}) == self.n for k in range(3)):
                found.append(chosen)
        return found


def _triple_name(t):
    return f"T_a{t[0]}_b{t[1]}_c{t[2]}"


def parse_triples(text: str) -> TdmInstance:
    """Lines ``a<i> b<j> c<k>``; an optional ``n <size>`` line fixes the element count."""
    triples = []
    declared = None
    for number, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        if words[0] == "n" and len(words) == 2 and words[1].isdigit():
            declared = int(words[1])
            continue
        if len(words) != 3 or [w[:1] for w in words] != ["a", "b", "c"]:
            raise ReductionError(f"line {number}: expected 'a<i> b<j> c<k>'")
        try:
            triples.append(tuple(int(w[1:]) for w in words))
        except ValueError:
            raise ReductionError(f"line {number}: bad element index") from None
    n = max((max(t) for t in triples), default=0)
    if declared is not None:
        if declared < n:
            raise ReductionError(f"element index {n} exceeds declared size {declared}")
        n = declared
    return TdmInstance(n, tuple(triples))


def format_triples(triples, n=None) -> str:
    head = f"n {n}\n" if n is not None else ""
    return head + "".join(f"a{a} b{b} c{c}\n" for a, b, c in triples)


@dataclass
class TdmReductionOutput:
    instance: TdmInstance
    system: OpenShopSystem
    machines: dict  # ("S", i) or ("T", triple) -> index
    jobs: dict  # ("A+", i), ("A-", i), ("B", i), ("C", i), ("D", 0), ("D", n+1) -> index


def tdm_to_deadlock(instance: TdmInstance) -> TdmReductionOutput:
    n = instance.n
    machines = []
    mid = {}
    for i in range(n + 2):
        mid["S", i] = len(machines)
        machines.append(Machine(f"S{i}", 1))
    for t in instance.triples:
        mid["T", t] = len(machines)
        machines.append(Machine(_triple_name(t), 3))

    def triples_with(pos, x):
        return {mid["T", t] for t in instance.triples if t[pos] == x}

    jobs = []
    jid = {}

    def job(label, name, required):
        jid[label] = len(jobs)
        jobs.append(Job(name, frozenset(required)))

    top = mid["S", n + 1]
    for i in range(1, n + 1):
        job(("A+", i), f"Jp_a{i}", {mid["S", i]} | triples_with(0, i))
        job(("A-", i), f"Jm_a{i}", {mid["S", i - 1]} | triples_with(0, i))
    for i in range(1, n + 1):
        job(("B", i), f"J_b{i}", {top} | triples_with(1, i))
    for i in range(1, n + 1):
        job(("C", i), f"J_c{i}", {top} | triples_with(2, i))
    job(("D", 0), "D0", {mid["S", 0], top})
    job(("D", n + 1), f"D{n + 1}", {mid["S", n], top})
    system = OpenShopSystem(tuple(machines), tuple(jobs))
    output = TdmReductionOutput(instance, system, mid, jid)
    audit_tdm(output)
    return output


def audit_tdm(output: TdmReductionOutput) -> None:
    """Check machine/job counts, capacities and the per-machine job lists."""
    inst, system = output.instance, output.system
    n = inst.n
    assert system.n_machines == n + 2 + len(inst.triples)
    assert system.n_jobs == 4 * n + 2
    assert all(m.capacity <= 3 for m in system.machines)
    assert all(len(j.required) <= 4 for j in system.jobs)
    users = {i: set() for i in range(system.n_machines)}
    for j, job in enumerate(system.jobs):
        for i in job.required:
            users[i].add(j)
    J, M = output.jobs, output.machines
    for t in inst.triples:
        a, b, c = t
        assert users[M["T", t]] == {J["A+", a], J["A-", a], J["B", b], J["C", c]}
    for i in range(1, n):
        assert users[M["S", i]] == {J["A+", i], J["A-", i + 1]}
    if n >= 1:
        assert users[M["S", 0]] == {J["A-", 1], J["D", 0]}
        assert users[M["S", n]] == {J["A+", n], J["D", n + 1]}
    top = {J["D", 0], J["D", n + 1]} | {J["B", i] for i in range(1, n + 1)} \
        | {J["C", i] for i in range(1, n + 1)}
    assert users[M["S", n + 1]] == top and len(top) == 2 * n + 2


def tdm_witness_deadlock(output: TdmReductionOutput, matching):
    """Return (deadlock state, entry schedule, blocking set) for a perfect matching."""
    inst, system = output.instance, output.system
    n = inst.n
    matching = [tuple(t) for t in matching]
    for t in matching:
        if t not in inst.triples:
            raise ReductionError(f"triple {t} is not part of the instance")
    for pos, kind in enumerate("abc"):
        for x in range(1, n + 1):
            hits = sum(1 for t in matching if t[pos] == x)
            if hits != 1:
                raise ReductionError(f"element {kind}{x} is covered {hits} times")
    M, J = output.machines, output.jobs
    park = {J["D", 0]: M["S", 0], J["D", n + 1]: M["S", n + 1]}
    for t in matching:
        a, b, c = t
        for label in (("A-", a), ("B", b), ("C", c)):
            park[J[label]] = M["T", t]
        park[J["A+", a]] = M["S", a]
    kset = frozenset(M["T", t] for t in matching) | frozenset(M["S", i] for i in range(n + 2))
    locations = []
    remaining = []
    for j, job in enumerate(system.jobs):
        locations.append(park[j])
        remaining.append((job.required & kset) - {park[j]})
    state = ShopState(tuple(locations), tuple(remaining))
    validate_state(system, state)
    schedule = kkk_witness(system, state, kset)
    if schedule is None:
        raise AssertionError("witness state violates the sufficient reachability condition")
    assert replay(system, initial_state(system), schedule) == state
    assert is_deadlock(system, state) and verify_blocking_set(system, state, kset)
    jobs = frozenset(j for j, loc in enumerate(state.locations) if loc in kset)
    return state, schedule, BlockingSet(kset, jobs)
