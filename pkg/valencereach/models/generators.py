"""インスタンスの生成

記憶機構の典型的なグラフ, 乱数によるインスタンス, 3CNF 充足可能性からの帰着.
"""
import logging as log
import string
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from valencereach.models import monoid
from valencereach.models.counter import (LabelledTransition, ValenceAutomaton,
                                         explore_reachable)
from valencereach.models.instance import Instance, relabel_states
from valencereach.models.monoid import StorageGraph
from valencereach.models.system import Transition, ValenceSystem


def _check_size(name: str, value: int) -> None:
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f'{name} must be a positive integer, got {value!r}')


def _letter_names(count: int) -> List[str]:
    letters = string.ascii_lowercase
    if count <= len(letters):
        return list(letters[:count])
    return [f'v{i}' for i in range(1, count + 1)]


def pushdown(n: int) -> StorageGraph:
    """スタック記号 n 個のプッシュダウン: 辺のないグラフ"""

    _check_size('n', n)
    return StorageGraph(_letter_names(n))


def multipushdown(*sizes: int) -> StorageGraph:
    """スタックごとの記号数を与えた複数スタック: ループのない完全多部グラフ

    スタック i の記号は a1, a2, ... (i = 1), b1, b2, ... (i = 2) のように名付ける.
    """

    if not sizes:
        raise ValueError('at least one stack is needed')
    for size in sizes:
        _check_size('stack size', size)
    prefixes = _letter_names(len(sizes))
    parts = [[f'{prefix}{j}' for j in range(1, size + 1)]
             for prefix, size in zip(prefixes, sizes)]
    vertices = [v for part in parts for v in part]
    edges = [(a, b) for first, second in combinations(parts, 2)
             for a in first for b in second]
    return StorageGraph(vertices, edges)


def petri(n: int) -> StorageGraph:
    """n 個の部分盲目カウンタ (ペトリネットの場所): ループのない完全グラフ"""

    _check_size('n', n)
    vertices = [f'p{i}' for i in range(1, n + 1)]
    return StorageGraph(vertices, list(combinations(vertices, 2)))


def blind(n: int) -> StorageGraph:
    """n 個の盲目カウンタ: すべての頂点にループのある完全グラフ"""

    _check_size('n', n)
    vertices = [f'c{i}' for i in range(1, n + 1)]
    return StorageGraph(vertices, list(combinations(vertices, 2)), vertices)


PRESETS: Dict[str, Callable[..., StorageGraph]] = {
    'pushdown': pushdown,
    'multipushdown': multipushdown,
    'petri': petri,
    'blind': blind,
}


def preset(name: str, *params: int) -> StorageGraph:
    """名前で典型的なグラフを作る

    Raises
    ------
    ValueError
        名前が不明な時, またはパラメータが正の整数でない時
    """

    if name not in PRESETS:
        raise ValueError(f'unknown preset {name!r}, expected one of {sorted(PRESETS)}')
    if name != 'multipushdown' and len(params) != 1:
        raise ValueError(f'{name} takes exactly one size')
    return PRESETS[name](*params)


@dataclass(frozen=True)
class Limits:
    """乱数インスタンスの大きさの上限

    Attributes
    ----------
    vertices: int
        頂点数の上限
    states: int
        状態数の上限
    transitions: int
        遷移数の上限
    k: int
        文脈切替回数の上限の最大値
    edge_probability: float
        2頂点の間に辺を置く確率
    loop_probability: float
        頂点にループを置く確率
    epsilon_probability: float
        遷移が ε 遷移になる確率
    """

    vertices: int = 3
    states: int = 4
    transitions: int = 6
    k: int = 2
    edge_probability: float = 0.5
    loop_probability: float = 0.5
    epsilon_probability: float = 0.2


ORACLE_LIMITS = Limits()


def random_graph(rng: np.random.Generator, limits: Limits) -> StorageGraph:
    count = int(rng.integers(1, limits.vertices + 1))
    vertices = _letter_names(count)
    edges = [pair for pair in combinations(vertices, 2)
             if rng.random() < limits.edge_probability]
    loops = [v for v in vertices if rng.random() < limits.loop_probability]
    return StorageGraph(vertices, edges, loops)


def random_instance(seed: int, limits: Limits = ORACLE_LIMITS,
                    graph: Optional[StorageGraph] = None) -> Instance:
    """seed から決まる乱数インスタンス

    Parameters
    ----------
    seed: int
        乱数の種. 同じ種からは同じインスタンスができる
    limits: Limits
        大きさの上限
    graph: Optional[StorageGraph]
        記憶グラフを固定する時に与える. 省略時は乱数で作る
    """

    for name in ('vertices', 'states', 'transitions'):
        _check_size(name, getattr(limits, name))
    if limits.k < 0:
        raise ValueError(f'k must be non-negative, got {limits.k}')
    rng = np.random.default_rng(seed)
    g = graph if graph is not None else random_graph(rng, limits)

    states = [f'q{i}' for i in range(int(rng.integers(1, limits.states + 1)))]
    ops = g.operations
    transitions = []
    for _ in range(int(rng.integers(1, limits.transitions + 1))):
        source = states[int(rng.integers(len(states)))]
        target = states[int(rng.integers(len(states)))]
        label = None
        if rng.random() >= limits.epsilon_probability:
            label = ops[int(rng.integers(len(ops)))]
        transitions.append(Transition(source, label, target))
    system = ValenceSystem(g, states, transitions)
    final = states[int(rng.integers(len(states)))]
    k = int(rng.integers(0, limits.k + 1))
    return Instance(g, system, states[0], final, k)


class CnfFormula:
    """連言標準形の論理式

    Attributes
    ----------
    variables: int
        変数の数 n. 変数は 1..n
    clauses: Tuple[Tuple[int, ...], ...]
        節. 負のリテラルは否定
    """

    def __init__(self, variables: int, clauses: Sequence[Sequence[int]]) -> None:
        _check_size('variables', variables)
        if not clauses:
            raise ValueError('at least one clause is needed')
        normalized = []
        for clause in clauses:
            clause = tuple(int(literal) for literal in clause)
            if not clause:
                raise ValueError('empty clause')
            for literal in clause:
                if literal == 0 or abs(literal) > variables:
                    raise ValueError(f'literal {literal} out of range 1..{variables}')
            normalized.append(clause)
        self.variables = int(variables)
        self.clauses = tuple(normalized)

    def __repr__(self) -> str:
        return f'CnfFormula(variables={self.variables}, clauses={self.clauses})'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return self.variables == other.variables and self.clauses == other.clauses

    def __hash__(self) -> int:
        return hash((self.variables, self.clauses))


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS 形式 (p cnf 行と 0 で終わる節) を読む

    Raises
    ------
    ValueError
        p cnf 行がない, 節の数が合わない, または数値でない語がある時
    """

    variables = None
    expected = None
    clauses: List[List[int]] = []
    current: List[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith('c') or line.startswith('%'):
            continue
        if line.startswith('p'):
            fields = line.split()
            if len(fields) != 4 or fields[1] != 'cnf':
                raise ValueError(f'invalid problem line {line!r}')
            variables, expected = int(fields[2]), int(fields[3])
            continue
        if variables is None:
            raise ValueError('clause before the p cnf line')
        for field in line.split():
            literal = int(field)
            if literal == 0:
                clauses.append(current)
                current = []
            else:
                current.append(literal)
    if current:
        clauses.append(current)
    if variables is None:
        raise ValueError('missing p cnf line')
    if len(clauses) != expected:
        raise ValueError(f'expected {expected} clauses, found {len(clauses)}')
    return CnfFormula(variables, clauses)


def parse_clauses(text: str, variables: int) -> CnfFormula:
    """'1 2 -3; -1 2 3' のようにセミコロンで区切った節を読む"""

    clauses = [[int(field) for field in part.split()]
               for part in text.split(';') if part.strip()]
    return CnfFormula(variables, clauses)


def is_satisfiable(cnf: CnfFormula) -> bool:
    """真理値表をすべて調べる"""

    n = cnf.variables
    table = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    satisfied = np.ones(len(table), dtype=bool)
    for clause in cnf.clauses:
        hit = np.zeros(len(table), dtype=bool)
        for literal in clause:
            column = table[:, abs(literal) - 1]
            hit |= column == (1 if literal > 0 else 0)
        satisfied &= hit
    return bool(satisfied.any())


def random_cnf(seed: int, variables: int, clauses: int, width: int = 3) -> CnfFormula:
    """変数 variables 個, 節 clauses 個, 各節 width リテラルの乱数論理式"""

    _check_size('clauses', clauses)
    rng = np.random.default_rng(seed)
    literals = rng.integers(1, variables + 1, size=(clauses, width))
    signs = np.where(rng.random((clauses, width)) < 0.5, -1, 1)
    return CnfFormula(variables, (literals * signs).tolist())


SEPARATOR = '#'
BITS = ('0', '1')


def _stack_ops(prefix: str):
    return [monoid.plus(f'{prefix}{bit}') for bit in BITS], \
        [monoid.minus(f'{prefix}{bit}') for bit in BITS]


def clause_checker_automaton(cnf: CnfFormula) -> ValenceAutomaton:
    """w1 # rev(w1) # ... wm # rev(wm) # を受理するオートマトン (wj は節 j を満たす)

    {x0, x1} 上のスタックで wj を積み, 逆順に取り出して照合する.
    状態は (ブロック, 位置, 節を満たしたか).
    """

    n = cnf.variables
    m = len(cnf.clauses)
    pushes, pops = _stack_ops('x')
    g = StorageGraph(['x0', 'x1'])
    final = (2 * m, 0, False)

    def expand(state):
        block, position, satisfied = state
        if block == 2 * m:
            return
        clause, popping = divmod(block, 2)
        if position == n:
            if popping or satisfied:
                target = (block + 1, 0, False)
                yield LabelledTransition(state, SEPARATOR, None, target), target
            return
        for bit, letter in enumerate(BITS):
            if popping:
                target = (block, position + 1, False)
                op = pops[bit]
            else:
                hit = any(abs(literal) == position + 1 and (literal > 0) == bool(bit)
                          for literal in cnf.clauses[clause])
                target = (block, position + 1, satisfied or hit)
                op = pushes[bit]
            yield LabelledTransition(state, letter, op, target), target

    start = (0, 0, False)
    states, transitions = explore_reachable(start, expand)
    if final not in states:
        states.append(final)
    return ValenceAutomaton(g, states, start, final, transitions)


def copy_checker_automaton(cnf: CnfFormula) -> ValenceAutomaton:
    """w0 # w1 # rev(w1) # ... w(m-1) # rev(w(m-1)) # wm # を受理するオートマトン

    {y0, y1} 上のスタックで照合する. 先頭と末尾のブロックは自由.
    状態は (ブロック, 位置).
    """

    n = cnf.variables
    m = len(cnf.clauses)
    pushes, pops = _stack_ops('y')
    g = StorageGraph(['y0', 'y1'])
    last = 2 * m - 1
    final = (2 * m, 0)

    def expand(state):
        block, position = state
        if block == 2 * m:
            return
        if position == n:
            target = (block + 1, 0)
            yield LabelledTransition(state, SEPARATOR, None, target), target
            return
        for bit, letter in enumerate(BITS):
            if block == 0 or block == last:
                op = None
            elif block % 2 == 1:
                op = pushes[bit]
            else:
                op = pops[bit]
            target = (block, position + 1)
            yield LabelledTransition(state, letter, op, target), target

    start = (0, 0)
    states, transitions = explore_reachable(start, expand)
    return ValenceAutomaton(g, states, start, final, transitions)


def c4_graph() -> StorageGraph:
    """{x0, x1} と {y0, y1} の直積: 独立関係は閉路 x0-y0-x1-y1"""

    return StorageGraph(['x0', 'x1', 'y0', 'y1'],
                        [('x0', 'y0'), ('x0', 'y1'), ('x1', 'y0'), ('x1', 'y1')])


def intersect_automata(first: ValenceAutomaton, second: ValenceAutomaton,
                       graph: StorageGraph) -> Tuple[ValenceSystem, tuple, tuple]:
    """文字ごとに first の経路, 続いて second の経路をたどる積の系

    first と second の遷移はどちらも文字をちょうど1つ読むか ε 遷移であること.
    状態 (a, b) で first が文字 σ を読むと中間状態 (a', b, σ) に移り,
    second が σ を読んで (a', b') に戻る.
    """

    def expand(state):
        if len(state) == 3:
            a, b, letter = state
            for t in second.outgoing(b):
                if t.letter == letter:
                    target = (a, t.target)
                    yield Transition(state, t.op, target), target
            return
        a, b = state
        for t in first.outgoing(a):
            target = (t.target, b) if t.letter is None else (t.target, b, t.letter)
            yield Transition(state, t.op, target), target
        for t in second.outgoing(b):
            if t.letter is None:
                target = (a, t.target)
                yield Transition(state, t.op, target), target

    start = (first.initial, second.initial)
    final = (first.final, second.final)
    states, transitions = explore_reachable(start, expand)
    if final not in states:
        states.append(final)
    return ValenceSystem(graph, states, transitions), start, final


def sat_to_c4(cnf: CnfFormula) -> Instance:
    """cnf が充足可能な時に限り答えが YES になる C4 上のインスタンス

    2つのスタック言語の共通部分の非空性に帰着する. 語長は 2m(n + 1) で固定され,
    文字ごとに x と y の操作が交互に現れるので k = 2 * 2m(n + 1) とする.
    """

    first = clause_checker_automaton(cnf)
    second = copy_checker_automaton(cnf)
    length = 2 * len(cnf.clauses) * (cnf.variables + 1)
    system, start, final = intersect_automata(first, second, c4_graph())
    system, initial, final = relabel_states(system, start, final)
    log.debug(f'[GEN] sat_to_c4: {len(system.states)} states, '
              f'{len(system.transitions)} transitions, word length {length}')
    return Instance(system.graph, system, initial, final, 2 * length)
