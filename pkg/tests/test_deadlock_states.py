from hypothesis import given, settings

from openshop.deadlock_states import deadlock_candidates, reachable_deadlock_by_states
from openshop.exact_search import Answer, SearchLimits, reachable_deadlock_exact
from openshop.reductions import TdmInstance, tdm_to_deadlock
from openshop.shop_model import IN, OUT, initial_state, is_deadlock, replay

from oracles import all_states, has_deadlock_dfs, systems


def test_three_by_three(sys33):
    # two machines fill up first: one job finishes, the other two wait on each other
    verdict = reachable_deadlock_by_states(sys33)
    assert verdict.answer is Answer.YES
    assert verdict.final.locations.count(OUT) == 1
    assert is_deadlock(sys33, verdict.final)
    assert replay(sys33, initial_state(sys33), verdict.witness) == verdict.final


def test_candidate_limit(sys33):
    verdict = reachable_deadlock_by_states(sys33, SearchLimits(max_states=1))
    assert verdict.answer in (Answer.YES, Answer.LIMIT)
    assert verdict.states_explored == 1


def test_unmatchable_instance_has_no_deadlock():
    # b2 and c2 appear in no triple
    red = tdm_to_deadlock(TdmInstance(2, ((1, 1, 1), (2, 1, 1))))
    assert reachable_deadlock_by_states(red.system).answer is Answer.NO


def test_matchable_instance_has_a_deadlock():
    red = tdm_to_deadlock(TdmInstance(2, ((1, 1, 2), (2, 2, 1), (1, 2, 2))))
    verdict = reachable_deadlock_by_states(red.system)
    assert verdict.answer is Answer.YES
    assert is_deadlock(red.system, replay(red.system, initial_state(red.system),
                                          verdict.witness))


@given(systems(max_machines=3, max_jobs=3, max_cap=2))
@settings(max_examples=100, deadline=None)
def test_candidates_are_exactly_the_deadlocks_without_waiting_jobs(system):
    listed = list(deadlock_candidates(system))
    assert len(listed) == len(set(listed))
    expected = {s for s in all_states(system)
                if IN not in s.locations and any(loc != OUT for loc in s.locations)
                and is_deadlock(system, s)}
    assert set(listed) == expected


@given(systems(max_machines=4, max_jobs=4, max_cap=2))
@settings(max_examples=150, deadline=None)
def test_agrees_with_recursive_enumeration(system):
    by_states = reachable_deadlock_by_states(system)
    assert (by_states.answer is Answer.YES) == has_deadlock_dfs(system, initial_state(system))
    if by_states.answer is Answer.YES:
        assert replay(system, initial_state(system), by_states.witness) == by_states.final
        assert is_deadlock(system, by_states.final)


@given(systems(max_machines=5, max_jobs=6, max_cap=2))
@settings(max_examples=150, deadline=None)
def test_agrees_with_reduced_search(system):
    assert reachable_deadlock_by_states(system).answer == reachable_deadlock_exact(system).answer
