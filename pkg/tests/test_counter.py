import pytest
from conftest import op

from valencereach.models.counter import (ACCEPT, ZERO_ACCEPT, CounterEffect,
                                         ValenceAutomaton, bounded_counter_nfa,
                                         builtin_counter, counter_bound,
                                         to_one_counter)
from valencereach.models.monoid import StorageGraph
from valencereach.models.system import UnknownStateError


def balanced(graph, up, down):
    """x を読むたびに up, y を読むたびに down を行う x^n y^n のオートマトン"""

    return ValenceAutomaton(graph, [0, 1], 0, 1,
                            [(0, 'x', op(up), 0), (0, None, None, 1), (1, 'y', op(down), 1)])


def test_automaton_rejects_unknown_states():
    g = StorageGraph(['p'])
    with pytest.raises(UnknownStateError):
        ValenceAutomaton(g, [0], 0, 1, [])
    with pytest.raises(UnknownStateError):
        ValenceAutomaton(g, [0], 0, 0, [(0, 'x', op('+p'), 1)])


def test_alphabet_skips_silent_letters():
    automaton = balanced(StorageGraph(['p']), '+p', '-p')
    assert automaton.alphabet == {'x', 'y'}


def test_partially_blind_counter():
    counter = to_one_counter(balanced(StorageGraph(['p']), '+p', '-p'))
    assert counter.final == ZERO_ACCEPT
    effects = {t.letter: t.effect for t in counter.transitions}
    assert effects['x'] is CounterEffect.INC
    assert effects['y'] is CounterEffect.DEC

    finite = bounded_counter_nfa(counter, bound=5, m=6)
    assert finite.accepts(['x', 'x', 'y', 'y'])
    assert finite.accepts([])
    assert not finite.accepts(['x', 'y', 'y'])
    assert not finite.accepts(['x', 'x', 'y'])


def test_blind_counter_switches_sign_at_zero():
    looped = StorageGraph(['p'], loops=['p'])
    counter = to_one_counter(balanced(looped, '-p', '+p'))
    finite = bounded_counter_nfa(counter, bound=5, m=6)
    assert finite.accepts(['x', 'y'])
    assert finite.accepts(['x', 'x', 'x', 'y', 'y', 'y'])
    assert not finite.accepts(['x', 'x', 'y'])


def test_counter_bound_limits_reading():
    counter = to_one_counter(balanced(StorageGraph(['p']), '+p', '-p'))
    finite = bounded_counter_nfa(counter, bound=1, m=6)
    assert finite.accepts(['x', 'y'])
    assert not finite.accepts(['x', 'x', 'y', 'y'])
    short = bounded_counter_nfa(counter, bound=5, m=2)
    assert not short.accepts(['x', 'x', 'y', 'y'])


def test_one_counter_needs_single_vertex():
    g = StorageGraph(['p', 'r'])
    automaton = ValenceAutomaton(g, [0], 0, 0, [])
    with pytest.raises(ValueError):
        to_one_counter(automaton)


def test_builtin_counter_cuts_long_runs():
    g = StorageGraph(['a', 'b'], [('a', 'b')])
    automaton = ValenceAutomaton(g, [0, 1, 2, 3], 0, 3,
                                 [(0, 'x', op('+a'), 1), (1, None, op('+b'), 2),
                                  (2, 'y', op('-a'), 3)])

    def accepting(bounded):
        return any(t.target == ACCEPT for t in bounded.transitions)

    assert accepting(builtin_counter(automaton, 2))
    assert not accepting(builtin_counter(automaton, 1))
    assert builtin_counter(automaton, 2).alphabet == {'x', 'y'}


def test_counter_bound_formula():
    assert counter_bound(1, 1) == 6
    assert counter_bound(2, 3) == 56
