from itertools import product

import pytest

from openshop.exact_search import Answer, reachable_deadlock_exact, state_to_state
from openshop.fileformat import parse_system, serialize_system
from openshop.reductions import (CnfFormula, ReductionError, TdmInstance, audit_tdm,
                                 format_dimacs, format_triples, parse_dimacs, parse_triples,
                                 sat_to_state_to_state, sat_witness_schedule, tdm_to_deadlock,
                                 tdm_witness_deadlock)
from openshop.safety import verify_blocking_set
from openshop.shop_model import (IN, OUT, initial_state, is_deadlock, is_subset_reachable,
                                 replay)

from oracles import small_formulas, small_tdm_instances


def one_clause():
    return CnfFormula(3, ((1, 2, 3),))


# ---------------------------------------------------------------- 3-SAT side

def test_one_clause_counts():
    red = sat_to_state_to_state(one_clause())
    assert red.system.n_machines == 16
    assert red.system.n_jobs == 18


@pytest.mark.parametrize("formula", list(small_formulas()), ids=str)
def test_generator_counts_and_capacities(formula):
    n, m = formula.n_variables, len(formula.clauses)
    red = sat_to_state_to_state(formula)
    system = red.system
    assert system.n_machines == 5 * n + m
    assert system.n_jobs == 4 * n + 6 * m
    for (kind, *_), i in red.machines.items():
        assert system.capacity(i) == {"S": 1, "T": 1, "U": 2, "V": 3}[kind]
    for c in range(m):
        assert red.s.locations.count(red.machines["V", c]) == 3
    assert is_subset_reachable(system, red.s, red.t)


def test_job_requirements_follow_the_gadgets():
    red = sat_to_state_to_state(one_clause())
    M, J, system = red.machines, red.jobs, red.system
    assert system.required(J["J", 1]) == {M["S", 1], M["U", 1]}
    assert system.required(J["Jp", -2]) == {M["S", -2], M["T", -2], M["U", 2]}
    assert system.required(J["K", 0, 3]) == {M["V", 0], M["S", 3], M["T", 3]}
    assert system.required(J["Kp", 0, 2]) == {M["U", 2], M["V", 0]}
    assert red.s.locations[J["J", -1]] == M["S", -1]
    assert red.t.locations[J["J", -1]] == M["U", 1]
    assert red.s.locations[J["Kp", 0, 1]] == IN
    assert red.t.locations[J["K", 0, 1]] == OUT


def test_naming_scheme():
    red = sat_to_state_to_state(one_clause())
    names = [m.name for m in red.system.machines]
    assert names[:5] == ["S_x1", "T_x1", "S_not_x1", "T_not_x1", "U_1"]
    assert names[-1] == "V_c1"
    assert red.system.jobs[red.jobs["Kp", 0, 3]].name == "Kp_c1_x3"


def test_all_true_witness_replays():
    red = sat_to_state_to_state(one_clause())
    schedule = sat_witness_schedule(red, [True, True, True])
    assert replay(red.system, red.s, schedule) == red.t
    assert len(schedule) == red.s.potential() - red.t.potential()


def test_unsatisfying_assignment_names_the_clause():
    red = sat_to_state_to_state(CnfFormula(3, ((1, 2, 3), (-1, 2, 3))))
    with pytest.raises(ReductionError, match="clause 1"):
        sat_witness_schedule(red, [False, False, False])
    with pytest.raises(ReductionError, match="clause 2"):
        sat_witness_schedule(red, [True, False, False])
    with pytest.raises(ReductionError, match="length"):
        sat_witness_schedule(red, [True])


@pytest.mark.parametrize("formula", list(small_formulas()), ids=str)
def test_every_satisfying_assignment_replays(formula):
    red = sat_to_state_to_state(formula)
    hits = 0
    for assignment in product((False, True), repeat=formula.n_variables):
        if formula.satisfied_by(assignment):
            hits += 1
            assert replay(red.system, red.s, sat_witness_schedule(red, assignment)) == red.t
    assert hits > 0


def test_clause_formulas_are_validated():
    with pytest.raises(ReductionError, match="distinct"):
        CnfFormula(3, ((1, -1, 2),))
    with pytest.raises(ReductionError, match="out of range"):
        CnfFormula(2, ((1, 2, 3),))
    with pytest.raises(ReductionError, match="three literals"):
        CnfFormula(3, ((1, 2),))


def test_satisfiability_by_truth_table():
    formula = CnfFormula(3, tuple((a, b, c) for a, b, c in product((1, -1), (2, -2), (3, -3))))
    assert not formula.is_satisfiable()
    assert CnfFormula(3, formula.clauses[:7]).is_satisfiable()


def test_dimacs_round_trip_and_errors():
    text = "c comment\np cnf 3 2\n1 -2 3 0\n-1 2\n-3 0\n"
    formula = parse_dimacs(text)
    assert formula == CnfFormula(3, ((1, -2, 3), (-1, 2, -3)))
    assert parse_dimacs(format_dimacs(formula)) == formula
    with pytest.raises(ReductionError, match="header"):
        parse_dimacs("1 2 3 0\n")
    with pytest.raises(ReductionError, match="announces"):
        parse_dimacs("p cnf 3 2\n1 2 3 0\n")
    with pytest.raises(ReductionError, match="terminated"):
        parse_dimacs("p cnf 3 1\n1 2 3\n")


@pytest.mark.parametrize("n", [1, 2])
def test_exact_search_reaches_t_without_clauses(n):
    red = sat_to_state_to_state(CnfFormula(n, ()))
    verdict = state_to_state(red.system, red.s, red.t)
    assert verdict.answer is Answer.YES
    assert replay(red.system, red.s, verdict.witness) == red.t


# ---------------------------------------------------------------- 3DM side

def test_single_triple_instance_counts():
    red = tdm_to_deadlock(TdmInstance(1, ((1, 1, 1),)))
    caps = [m.capacity for m in red.system.machines]
    assert caps == [1, 1, 1, 3]
    assert red.system.n_jobs == 6
    assert [j.name for j in red.system.jobs] == ["Jp_a1", "Jm_a1", "J_b1", "J_c1", "D0", "D2"]


@pytest.mark.parametrize("instance", list(small_tdm_instances()), ids=str)
def test_audit_and_round_trip(instance):
    red = tdm_to_deadlock(instance)
    audit_tdm(red)
    system = red.system
    assert max(m.capacity for m in system.machines) <= 3
    assert max(len(j.required) for j in system.jobs) <= 4
    assert system.n_jobs == 4 * instance.n + 2
    assert parse_system(serialize_system(system)) == system


def test_single_triple_witness_structure():
    red = tdm_to_deadlock(TdmInstance(1, ((1, 1, 1),)))
    state, schedule, blocking = tdm_witness_deadlock(red, [(1, 1, 1)])
    M, J = red.machines, red.jobs
    assert state.locations[J["D", 0]] == M["S", 0]
    assert state.locations[J["D", 2]] == M["S", 2]
    assert state.locations[J["A+", 1]] == M["S", 1]
    for label in (("A-", 1), ("B", 1), ("C", 1)):
        assert state.locations[J[label]] == M["T", (1, 1, 1)]
    assert is_deadlock(red.system, state)
    assert replay(red.system, initial_state(red.system), schedule) == state
    assert verify_blocking_set(red.system, state, blocking.machines)
    assert len(blocking.machines) == 4


def test_every_perfect_matching_gives_a_deadlock():
    checked = 0
    for instance in small_tdm_instances():
        red = tdm_to_deadlock(instance)
        for matching in instance.perfect_matchings():
            state, schedule, blocking = tdm_witness_deadlock(red, matching)
            assert replay(red.system, initial_state(red.system), schedule) == state
            assert is_deadlock(red.system, state)
            assert verify_blocking_set(red.system, state, blocking.machines)
            checked += 1
    assert checked > 20


def test_non_matchings_are_rejected():
    instance = TdmInstance(2, ((1, 1, 1), (2, 2, 2), (1, 2, 2)))
    red = tdm_to_deadlock(instance)
    with pytest.raises(ReductionError, match="b1 is covered 0 times"):
        tdm_witness_deadlock(red, [(1, 2, 2), (2, 2, 2)])
    with pytest.raises(ReductionError, match="not part"):
        tdm_witness_deadlock(red, [(2, 1, 1), (1, 2, 2)])


def test_element_in_four_triples_is_rejected():
    with pytest.raises(ReductionError, match="a1 occurs in more than three"):
        TdmInstance(2, ((1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2)))
    with pytest.raises(ReductionError, match="out of range"):
        TdmInstance(1, ((1, 2, 1),))


def test_triples_file_format():
    text = "# two triples\nn 2\na1 b2 c1\na2 b1 c2\n"
    instance = parse_triples(text)
    assert instance == TdmInstance(2, ((1, 2, 1), (2, 1, 2)))
    assert parse_triples(format_triples(instance.triples, 2)) == instance
    with pytest.raises(ReductionError, match="line 1"):
        parse_triples("a1 c1 b1\n")
    with pytest.raises(ReductionError, match="exceeds"):
        parse_triples("n 1\na2 b1 c1\n")


@pytest.mark.parametrize("instance", [TdmInstance(1, ()), TdmInstance(1, ((1, 1, 1),))],
                         ids=str)
def test_exact_search_on_single_element_instances(instance):
    red = tdm_to_deadlock(instance)
    verdict = reachable_deadlock_exact(red.system)
    assert (verdict.answer is Answer.YES) == bool(instance.perfect_matchings())
