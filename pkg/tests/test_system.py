import pytest
from conftest import chain, op

from valencereach.models import monoid
from valencereach.models.monoid import BudgetExceededError, StorageGraph
from valencereach.models.system import (Configuration, NotEnabledError,
                                        Transition, UnknownStateError,
                                        ValenceSystem, Verdict,
                                        brute_force_bcsreach, epsilon_closure,
                                        reachable_states, replay, restrict,
                                        step, trim)

COUNTER = StorageGraph(['p'])
BLIND = StorageGraph(['p'], loops=['p'])


def test_system_rejects_unknown_references():
    with pytest.raises(UnknownStateError):
        ValenceSystem(COUNTER, ['q0'], [('q0', op('+p'), 'q1')])
    with pytest.raises(monoid.InvalidSymbolError):
        ValenceSystem(COUNTER, ['q0'], [('q0', op('+z'), 'q0')])
    with pytest.raises(ValueError):
        ValenceSystem(COUNTER, ['q0', 'q0'], [])


def test_system_drops_duplicate_transitions():
    system = ValenceSystem(COUNTER, ['q0'], [('q0', op('+p'), 'q0')] * 2)
    assert system.size == 1
    assert system.operations() == frozenset([op('+p')])


def test_step_blocks_negative_counter():
    system = ValenceSystem(COUNTER, ['q0', 'q1'],
                           [('q0', op('-p'), 'q1'), ('q0', op('+p'), 'q1')])
    start = Configuration('q0', ())
    with pytest.raises(NotEnabledError):
        step(system, start, Transition('q0', op('-p'), 'q1'))
    assert step(system, start, Transition('q0', op('+p'), 'q1')) == ('q1', (op('+p'),))


def test_step_on_blind_counter():
    system = ValenceSystem(BLIND, ['q0', 'q1'], [('q0', op('-p'), 'q1')])
    moved = step(system, Configuration('q0', ()), Transition('q0', op('-p'), 'q1'))
    assert moved == Configuration('q1', (op('-p'),))


def test_step_checks_source_and_membership():
    system = ValenceSystem(COUNTER, ['q0', 'q1'], [('q0', op('+p'), 'q1')])
    with pytest.raises(NotEnabledError):
        step(system, Configuration('q1', ()), Transition('q0', op('+p'), 'q1'))
    with pytest.raises(NotEnabledError):
        step(system, Configuration('q0', ()), Transition('q0', None, 'q1'))


def test_replay_keeps_storage_as_raw_word(stack_chain):
    configuration = replay(stack_chain, 'q0', stack_chain.transitions)
    assert configuration.state == 'q2'
    assert monoid.is_identity(stack_chain.graph, configuration.storage)


def test_restrict(bipartite):
    system = ValenceSystem(bipartite, ['q0', 'q1'],
                           [('q0', op('+a1'), 'q1'), ('q0', op('+b1'), 'q1'),
                            ('q0', None, 'q1')])
    restricted = restrict(system, [op('+a1')])
    assert set(restricted.transitions) == {Transition('q0', op('+a1'), 'q1'),
                                           Transition('q0', None, 'q1')}
    assert restricted.states == system.states


def test_reachability_helpers(stack):
    system = ValenceSystem(stack, ['q0', 'q1', 'q2', 'q3'],
                           [('q0', None, 'q1'), ('q1', op('+a'), 'q2'),
                            ('q3', None, 'q0')])
    assert reachable_states(system, ['q0']) == {'q0', 'q1', 'q2'}
    assert reachable_states(system, ['q0'], reverse=True) == {'q0', 'q3'}
    assert epsilon_closure(system, ['q3']) == {'q3', 'q0', 'q1'}
    trimmed = trim(system, 'q0', 'q2')
    assert set(trimmed.states) == {'q0', 'q1', 'q2'}
    assert trim(system, 'q2', 'q0') is None


def test_oracle_stack_chain(stack_chain):
    result = brute_force_bcsreach(stack_chain, 'q0', 'q2', 0)
    assert result.verdict is Verdict.YES
    assert result.witness.word == (op('+a'), op('-a'))
    assert result.witness.switches == 0


def test_oracle_bipartite_chain(bipartite_chain):
    assert brute_force_bcsreach(bipartite_chain, 'q0', 'q4', 3).verdict is Verdict.YES
    assert brute_force_bcsreach(bipartite_chain, 'q0', 'q4', 2).verdict is Verdict.NO


def test_oracle_empty_run():
    system = ValenceSystem(COUNTER, ['q0'], [])
    result = brute_force_bcsreach(system, 'q0', 'q0', 0)
    assert result.verdict is Verdict.YES
    assert result.witness.switches == -1


def test_oracle_inconclusive_when_truncated():
    system = ValenceSystem(COUNTER, ['q0', 'q1'], [('q0', op('+p'), 'q0')])
    result = brute_force_bcsreach(system, 'q0', 'q1', 1, max_len=3)
    assert result.verdict is Verdict.INCONCLUSIVE
    assert result.truncated


def test_oracle_budget():
    system = ValenceSystem(COUNTER, ['q0', 'q1'], [('q0', op('+p'), 'q0')])
    with pytest.raises(BudgetExceededError):
        brute_force_bcsreach(system, 'q0', 'q1', 0, max_states=3)


def test_oracle_rejects_bad_arguments(stack_chain):
    with pytest.raises(ValueError):
        brute_force_bcsreach(stack_chain, 'q0', 'q2', -1)
    with pytest.raises(UnknownStateError):
        brute_force_bcsreach(stack_chain, 'q0', 'nowhere', 0)


def test_oracle_witness_replays(bipartite):
    system = chain(bipartite, ['+a1', None, '+b1', '-b1', '-a1'])
    result = brute_force_bcsreach(system, 'q0', 'q5', 2)
    assert result.verdict is Verdict.YES
    configuration = replay(system, 'q0', result.witness.transitions)
    assert configuration.state == 'q5'
    assert monoid.is_identity(bipartite, configuration.storage)
