import pytest

from valencereach.models import bcs, generators, monoid
from valencereach.models.generators import CnfFormula, Limits
from valencereach.models.instance import serialize_instance
from valencereach.models.system import (Configuration, NotEnabledError,
                                        Verdict, brute_force_bcsreach, step)


def oracle_verdict(instance, cnf):
    length = 2 * len(cnf.clauses) * (cnf.variables + 1)
    return brute_force_bcsreach(instance.system, instance.initial, instance.final,
                                instance.k, max_len=2 * length).verdict


def test_presets():
    stack = generators.pushdown(3)
    assert (len(stack), stack.edges, stack.loops) == (3, (), ())

    places = generators.petri(4)
    assert len(places.edges) == 6
    assert places.loops == ()

    counters = generators.blind(3)
    assert len(counters.edges) == 3
    assert counters.loops == ('c1', 'c2', 'c3')

    stacks = generators.multipushdown(2, 2)
    assert stacks.vertices == ('a1', 'a2', 'b1', 'b2')
    assert len(stacks.edges) == 4
    assert not stacks.adjacent('a1', 'a2')


def test_preset_by_name():
    assert generators.preset('blind', 2) == generators.blind(2)
    assert generators.preset('multipushdown', 1, 3) == generators.multipushdown(1, 3)
    with pytest.raises(ValueError):
        generators.preset('queue', 2)
    with pytest.raises(ValueError):
        generators.preset('petri', 2, 3)
    with pytest.raises(ValueError):
        generators.pushdown(0)


def test_pushdown_answer_ignores_k():
    system = generators.random_instance(5, graph=generators.pushdown(2)).system
    for source in system.states[:2]:
        for target in system.states:
            verdicts = {brute_force_bcsreach(system, source, target, k, max_len=8).verdict
                        for k in range(3)}
            assert len(verdicts) == 1


def test_random_instance_is_deterministic():
    first = serialize_instance(generators.random_instance(11))
    second = serialize_instance(generators.random_instance(11))
    assert first == second


def test_random_instance_respects_limits():
    limits = Limits(vertices=2, states=4, transitions=5, k=1)
    for seed in range(50):
        instance = generators.random_instance(seed, limits)
        assert len(instance.graph) <= 2
        assert len(instance.system.states) <= 4
        assert instance.system.size <= 5
        assert 0 <= instance.k <= 1
        assert instance.initial == 'q0'


def test_random_instance_rejects_bad_limits():
    with pytest.raises(ValueError):
        generators.random_instance(0, Limits(states=0))
    with pytest.raises(ValueError):
        generators.random_instance(0, Limits(k=-1))


def test_cnf_formula_validation():
    with pytest.raises(ValueError):
        CnfFormula(1, [])
    with pytest.raises(ValueError):
        CnfFormula(1, [[2]])
    with pytest.raises(ValueError):
        CnfFormula(1, [[0]])
    with pytest.raises(ValueError):
        CnfFormula(1, [[]])


def test_parse_dimacs():
    cnf = generators.parse_dimacs('c comment\np cnf 3 2\n1 -2 3 0\n-1 2\n3 0\n')
    assert cnf == CnfFormula(3, [[1, -2, 3], [-1, 2, 3]])
    with pytest.raises(ValueError):
        generators.parse_dimacs('1 2 0\n')
    with pytest.raises(ValueError):
        generators.parse_dimacs('p cnf 2 2\n1 2 0\n')
    with pytest.raises(ValueError):
        generators.parse_dimacs('p dnf 2 1\n1 2 0\n')


def test_parse_clauses():
    assert generators.parse_clauses('1 2 -3; -1 2 3', 3) == CnfFormula(3, [[1, 2, -3], [-1, 2, 3]])


@pytest.mark.parametrize('clauses, variables, expected', [
    ([[1, 1, 1]], 1, True),
    ([[1, 1, 1], [-1, -1, -1]], 1, False),
    ([[1, 2], [-1], [-2, 1]], 2, False),
    ([[1, -2, 3], [-1, 2, -3], [2, 3, 3]], 3, True),
])
def test_is_satisfiable(clauses, variables, expected):
    assert generators.is_satisfiable(CnfFormula(variables, clauses)) is expected


def test_random_cnf_shape():
    cnf = generators.random_cnf(4, 3, 5)
    assert cnf == generators.random_cnf(4, 3, 5)
    assert len(cnf.clauses) == 5
    assert all(len(clause) == 3 for clause in cnf.clauses)


def test_sat_to_c4_shape():
    cnf = CnfFormula(1, [[1, 1, 1]])
    instance = generators.sat_to_c4(cnf)
    assert instance.graph == generators.c4_graph()
    assert instance.k == 2 * 2 * 1 * 2
    assert instance.initial == 's0'
    assert all(isinstance(q, str) for q in instance.system.states)
    assert not monoid.is_dependent_set(instance.graph, ['x0', 'y0'])


@pytest.mark.parametrize('clauses, expected', [
    ([[1, 1, 1]], Verdict.YES),
    ([[1, 1, 1], [-1, -1, -1]], Verdict.NO),
])
def test_sat_to_c4_matches_truth_table(clauses, expected):
    cnf = CnfFormula(1, clauses)
    assert oracle_verdict(generators.sat_to_c4(cnf), cnf) is expected


def test_sat_to_c4_random_formulas():
    for seed in range(6):
        cnf = generators.random_cnf(seed, 2, 2)
        verdict = oracle_verdict(generators.sat_to_c4(cnf), cnf)
        assert (verdict is Verdict.YES) == generators.is_satisfiable(cnf), cnf


@pytest.mark.slow
def test_sat_to_c4_with_np_solver():
    cnf = CnfFormula(1, [[1, 1, 1]])
    instance = generators.sat_to_c4(cnf)
    result = bcs.solve_np(instance.system, instance.initial, instance.final, instance.k)
    assert result.verdict is Verdict.YES


UNSATISFIABLE = [
    CnfFormula(1, [[1, 1, 1], [-1, -1, -1]]),
    CnfFormula(2, [[2, 2, 2], [-2, -2, -2]]),
    CnfFormula(2, [[1, 1, 1], [-1, -1, -1]]),
    CnfFormula(3, [[3, 3, 3], [-3, -3, -3]]),
]


@pytest.mark.slow
def test_sat_to_c4_np_matches_truth_table_on_twenty_formulas():
    formulas = list(UNSATISFIABLE)
    seed = 0
    while len(formulas) < 20:
        formulas.append(generators.random_cnf(seed, seed % 3 + 1, seed % 2 + 1))
        seed += 1
    assert not all(generators.is_satisfiable(cnf) for cnf in formulas)
    for cnf in formulas:
        instance = generators.sat_to_c4(cnf)
        result = bcs.solve_np(instance.system, instance.initial, instance.final, instance.k)
        assert result.verdict is not Verdict.INCONCLUSIVE, cnf
        assert (result.verdict is Verdict.YES) == generators.is_satisfiable(cnf), cnf


def test_pushdown_answer_ignores_k_across_instances():
    limits = Limits(vertices=1, states=4, transitions=6, k=0)
    for seed in range(50):
        instance = generators.random_instance(seed, limits, graph=generators.pushdown(1))
        args = (instance.system, instance.initial, instance.final)
        verdicts = {bcs.solve_np(*args, k).verdict for k in range(3)}
        verdicts.discard(Verdict.INCONCLUSIVE)
        assert len(verdicts) <= 1, seed


def test_petri_counters_never_go_negative():
    places = generators.petri(3)
    for seed in range(60):
        instance = generators.random_instance(seed, graph=places)
        system = instance.system
        for t in system.transitions:
            if t.label is not None and not t.label.positive:
                with pytest.raises(NotEnabledError):
                    step(system, Configuration(t.source, ()), t)
        result = brute_force_bcsreach(system, instance.initial, instance.final, instance.k,
                                      max_len=10)
        if result.witness is None:
            continue
        counters = dict.fromkeys(places.vertices, 0)
        for o in result.witness.word:
            counters[o.symbol] += 1 if o.positive else -1
            assert counters[o.symbol] >= 0, seed
