import pytest

from valencereach.models import generators
from valencereach.models.monoid import StorageGraph, parse_operation
from valencereach.models.system import ValenceSystem

SAMPLE = """\
# two stacks sharing a clock
graph {
  vertices: a1 a2 b1 b2
  edges: a1-b1 a1-b2 a2-b1 a2-b2
}
system {
  states: q0 q1 q2 q3 q4
  initial: q0
  final: q4
  trans: q0 +a1 q1
  trans: q1 +b1 q2
  trans: q2 -a1 q3
  trans: q3 -b1 q4   # last pop
}
k: 3
word: +a1 +b1 -a1 -b1
"""


def op(token):
    return parse_operation(token.replace('−', '-'))


def chain(graph, labels, prefix='q'):
    """q0 -l0-> q1 -l1-> ... の一本道の系"""

    states = [f'{prefix}{i}' for i in range(len(labels) + 1)]
    transitions = [(states[i], None if label is None else op(label), states[i + 1])
                   for i, label in enumerate(labels)]
    return ValenceSystem(graph, states, transitions)


@pytest.fixture
def stack():
    return generators.pushdown(1)


@pytest.fixture
def bipartite():
    return StorageGraph(['a1', 'a2', 'b1', 'b2'],
                        [('a1', 'b1'), ('a1', 'b2'), ('a2', 'b1'), ('a2', 'b2')])


@pytest.fixture
def looped_pair():
    return StorageGraph(['c', 'd'], [('c', 'd')], ['c', 'd'])


@pytest.fixture
def edgeless_ab():
    return StorageGraph(['a', 'b'])


@pytest.fixture
def bipartite_chain(bipartite):
    return chain(bipartite, ['+a1', '+b1', '-a1', '-b1'])


@pytest.fixture
def stack_chain(stack):
    return chain(stack, ['+a', '-a'])


def bounded_language(nfa, length):
    """nfa が受理する長さ length 以下の語の集合 (部分集合構成でたどる)"""

    words = set()
    frontier = [((), nfa.epsilon_closure([nfa.initial]))]
    for _ in range(length + 1):
        following = []
        for word, states in frontier:
            if nfa.final in states:
                words.add(word)
            if len(word) == length:
                continue
            for label in nfa.alphabet:
                targets = [target for q in states for target in nfa.successors(q, label)]
                if targets:
                    following.append((word + (label,), nfa.epsilon_closure(targets)))
        frontier = following
    return words
