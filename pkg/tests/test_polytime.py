import networkx as nx
import numpy as np
import pytest
from conftest import chain, op

from valencereach.config import Budget
from valencereach.models import generators, monoid, polytime
from valencereach.models.counter import ACCEPT
from valencereach.models.monoid import StorageGraph
from valencereach.models.polytime import (BoundedSystem, NodeKind,
                                          NotDisjointUnionError,
                                          NotUniversalError,
                                          UnsupportedGraphError)
from valencereach.models.system import (ValenceSystem, Verdict,
                                        brute_force_bcsreach, epsilon_closure)

P4 = StorageGraph(['a', 'b', 'c', 'd'], [('a', 'b'), ('b', 'c'), ('c', 'd')])
C4 = generators.c4_graph()
EDGE = StorageGraph(['a', 'b'], [('a', 'b')])


def path_words(system, start, length):
    """start から長さ length 以下の経路のラベル列 (ε を除く)"""

    frontier = [(start, ())]
    for _ in range(length):
        following = []
        for state, word in frontier:
            for t in system.outgoing(state):
                extended = word if t.label is None else word + (t.label,)
                following.append((t.target, extended))
        yield from (word for _, word in following)
        frontier = following


@pytest.mark.parametrize('graph, expected', [
    (P4, False),
    (C4, False),
    (generators.petri(4), True),
    (generators.pushdown(3), True),
    (generators.blind(3), True),
    (generators.multipushdown(2, 2), False),
    (StorageGraph(['a', 'b', 'c'], [('a', 'b'), ('a', 'c')]), True),
])
def test_is_transitive_forest(graph, expected):
    assert polytime.is_transitive_forest(graph) is expected
    assert (polytime.decompose(graph) is not None) is expected
    assert polytime.has_forbidden_induced_subgraph(graph) is not expected


def test_random_graphs_checks_agree():
    rng = np.random.default_rng(7)
    for _ in range(200):
        vertices = [f'v{i}' for i in range(int(rng.integers(1, 7)))]
        graph = nx.gnp_random_graph(len(vertices), 0.5, seed=int(rng.integers(10 ** 6)))
        g = StorageGraph(vertices, [(vertices[a], vertices[b]) for a, b in graph.edges])
        assert (polytime.decompose(g) is None) == polytime.has_forbidden_induced_subgraph(g)


def test_decompose_shapes():
    tree = polytime.decompose(generators.pushdown(3))
    assert tree.kind is NodeKind.UNION
    assert len(tree.children) == 3

    tree = polytime.decompose(generators.petri(3))
    chain_of = []
    while tree.kind is NodeKind.VERTEX:
        chain_of.append(tree.vertex)
        tree = tree.children[0]
    assert tree.kind is NodeKind.LEAF
    assert sorted(chain_of) == ['p1', 'p2', 'p3']


def test_to_promise_bounds_context_switches():
    system = ValenceSystem(EDGE, ['q0', 'q1'],
                           [('q0', op('+a'), 'q1'), ('q1', op('+b'), 'q0'),
                            ('q1', op('-a'), 'q1')])
    for k in range(3):
        bounded, initial, final = polytime.to_promise(system, 'q0', 'q1', k)
        assert final == ACCEPT
        for word in path_words(bounded.system, initial, 7):
            assert monoid.context_switches(EDGE, word) <= k


def test_to_promise_preserves_answers():
    limits = generators.Limits(vertices=2, states=3, transitions=5, k=2)
    for seed in range(25):
        instance = generators.random_instance(seed, limits)
        args = (instance.system, instance.initial, instance.final, instance.k)
        expected = brute_force_bcsreach(*args, max_len=8)
        if expected.verdict is Verdict.INCONCLUSIVE:
            continue
        bounded, initial, final = polytime.to_promise(*args)
        found = brute_force_bcsreach(bounded.system, initial, final, 2 * instance.k + 2,
                                     max_len=8)
        if found.verdict is Verdict.INCONCLUSIVE:
            continue
        assert found.verdict is expected.verdict, seed


def test_split_needs_universal_vertex():
    system = chain(P4, ['+a'])
    with pytest.raises(NotUniversalError):
        polytime.split_at_universal_vertex(system, 'q0', 'q1', 1, 'a')


def test_split_at_universal_vertex_letters():
    system = chain(EDGE, ['+b', '+a', '-a', '-b'])
    automaton_a, automaton_b, m = polytime.split_at_universal_vertex(
        system, 'q0', 'q4', 2, 'a')
    assert m == 2
    assert automaton_a.graph == StorageGraph(['b'])
    assert ('q1', 0, 'q3') in automaton_a.alphabet
    assert automaton_b.graph == StorageGraph(['a'])
    assert automaton_b.alphabet <= automaton_a.alphabet


def test_eliminate_universal_vertex_keeps_answer():
    system = chain(EDGE, ['+b', '+a', '-a', '-b'])
    bounded, initial, final = polytime.to_promise(system, 'q0', 'q4', 2)
    elimination = polytime.eliminate_universal_vertex(bounded.system, initial, final, 2, 'a')
    assert elimination.system.graph == StorageGraph(['b'])
    reduced = brute_force_bcsreach(elimination.system, elimination.initial,
                                   elimination.final, 2)
    assert reduced.verdict is Verdict.YES


def test_eliminate_universal_vertex_reports_cap():
    system = chain(EDGE, ['+b', '+a', '-a', '-b'])
    bounded, initial, final = polytime.to_promise(system, 'q0', 'q4', 2)
    elimination = polytime.eliminate_universal_vertex(bounded.system, initial, final, 2, 'a',
                                                      budget=Budget(counter_cap=1))
    assert elimination.capped
    assert elimination.bound == 1


def test_union_saturate_without_transitions():
    system = ValenceSystem(generators.pushdown(2), ['q0', 'q1'], [])
    saturated = polytime.union_saturate(BoundedSystem(system, 0), [{'a'}, {'b'}],
                                        lambda *args: True)
    assert saturated.added == ()


def test_union_saturate_nests_sides():
    g = generators.pushdown(2)
    system = chain(g, ['+a', '+b', '-b', '-a'])

    def side(restricted, index, p, q):
        return brute_force_bcsreach(restricted, p, q, 0).verdict is Verdict.YES

    saturated = polytime.union_saturate(BoundedSystem(system, 0), [{'a'}, {'b'}], side)
    assert 'q4' in epsilon_closure(saturated.system, ['q0'])
    assert len(saturated.added) <= len(system.states) ** 2


@pytest.mark.parametrize('sides', [
    [{'a'}, {'a', 'b'}],
    [{'a'}],
])
def test_union_saturate_rejects_bad_sides(sides):
    system = ValenceSystem(generators.pushdown(2), ['q0'], [])
    with pytest.raises(NotDisjointUnionError):
        polytime.union_saturate(BoundedSystem(system, 0), sides, lambda *args: True)


def test_union_saturate_rejects_crossing_edge():
    system = ValenceSystem(EDGE, ['q0'], [])
    with pytest.raises(NotDisjointUnionError):
        polytime.union_saturate(BoundedSystem(system, 0), [{'a'}, {'b'}], lambda *args: True)


def test_solve_poly_small_systems(stack_chain):
    assert polytime.solve_poly(stack_chain, 'q0', 'q2', 0).verdict is Verdict.YES
    system = chain(EDGE, ['+a', '+b', '-a', '-b'])
    assert polytime.solve_poly(system, 'q0', 'q4', 3).verdict is Verdict.YES
    assert polytime.solve_poly(system, 'q0', 'q4', 2).verdict is Verdict.NO
    empty = ValenceSystem(EDGE, ['q0'], [])
    assert polytime.solve_poly(empty, 'q0', 'q0', 0).verdict is Verdict.YES


def test_solve_poly_rejects_c4(bipartite_chain):
    with pytest.raises(UnsupportedGraphError):
        polytime.solve_poly(bipartite_chain, 'q0', 'q4', 3)


def test_poly_agrees_with_oracle():
    limits = generators.Limits(vertices=2, states=3, transitions=4, k=1)
    for seed in range(30):
        instance = generators.random_instance(seed, limits)
        args = (instance.system, instance.initial, instance.final, instance.k)
        oracle = brute_force_bcsreach(*args, max_len=10)
        result = polytime.solve_poly(*args)
        if result.verdict is Verdict.YES:
            assert oracle.verdict is not Verdict.NO, seed
        if result.capped:
            assert result.verdict is not Verdict.NO, seed
        elif oracle.verdict is not Verdict.INCONCLUSIVE:
            assert result.verdict is oracle.verdict, seed


@pytest.mark.slow
def test_poly_agrees_with_np_on_transitive_forests():
    from valencereach.models import bcs
    for seed in range(200):
        instance = generators.random_instance(seed)
        if not polytime.is_transitive_forest(instance.graph):
            continue
        args = (instance.system, instance.initial, instance.final, instance.k)
        result = polytime.solve_poly(*args)
        expected = bcs.solve_np(*args)
        if result.capped:
            assert result.verdict is not Verdict.NO, seed
        if Verdict.INCONCLUSIVE in (result.verdict, expected.verdict):
            continue
        assert result.verdict is expected.verdict, seed


def deep_stack(height):
    return chain(StorageGraph(['p']), ['+p'] * height + ['-p'] * height)


def test_capped_no_is_inconclusive():
    system = deep_stack(10)
    capped = polytime.solve_poly(system, 'q0', 'q20', 0, Budget(counter_cap=8))
    assert capped.capped
    assert capped.verdict is Verdict.INCONCLUSIVE
    assert brute_force_bcsreach(system, 'q0', 'q20', 0, max_len=24).verdict is Verdict.YES

    enough = polytime.solve_poly(system, 'q0', 'q20', 0, Budget(counter_cap=16))
    assert enough.verdict is Verdict.YES


def test_capped_yes_is_kept(stack_chain):
    result = polytime.solve_poly(stack_chain, 'q0', 'q2', 0, Budget(counter_cap=1))
    assert result.verdict is Verdict.YES


def test_doubling_counter_bound_keeps_answer():
    limits = generators.Limits(vertices=2, states=3, transitions=4, k=1)
    for seed in range(30):
        instance = generators.random_instance(seed, limits)
        if not polytime.is_transitive_forest(instance.graph):
            continue
        args = (instance.system, instance.initial, instance.final, instance.k)
        single = polytime.solve_poly(*args, bound=16)
        double = polytime.solve_poly(*args, bound=32)
        assert single.verdict is double.verdict, seed
