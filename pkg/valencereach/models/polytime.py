"""独立関係の補グラフが推移的森のときの多項式時間の手続き

約束付きの系に変換したのち, 推移的森の分解木に沿って
全域頂点の消去と非交和の飽和化を繰り返す.
"""
import enum
import logging as log
from dataclasses import dataclass
from typing import (Callable, Dict, FrozenSet, Iterable, List, Optional,
                    Sequence, Tuple)

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from valencereach.config import DEFAULT_BUDGET, Budget
from valencereach.models import monoid
from valencereach.models.counter import (ACCEPT, LabelledTransition,
                                         ValenceAutomaton, builtin_counter,
                                         bounded_counter_nfa, counter_bound,
                                         explore_reachable, to_one_counter)
from valencereach.models.monoid import StorageGraph
from valencereach.models.nfa import Nfa
from valencereach.models.system import (State, Transition, ValenceSystem,
                                        Verdict, epsilon_closure, restrict,
                                        trim)


class UnsupportedGraphError(ValueError):
    """独立関係が推移的森でない時の例外"""


class NotUniversalError(ValueError):
    """消去する頂点が全域頂点でない時の例外"""


class NotDisjointUnionError(ValueError):
    """分割が非交和になっていない時の例外"""


@dataclass(frozen=True)
class BoundedSystem:
    """文脈切替 k 回以下の実行しか受理に至らない系

    Attributes
    ----------
    system: ValenceSystem
        系
    k: int
        文脈切替回数の上限
    added: Tuple[Transition, ...]
        非交和の飽和化で加えた ε 遷移
    """

    system: ValenceSystem
    k: int
    added: Tuple[Transition, ...] = ()


def to_promise(system: ValenceSystem, q_init: State, q_fin: State,
               k: int) -> Tuple[BoundedSystem, State, State]:
    """状態に (現在の文脈の操作集合, 切替回数) を持たせて k 回を超える実行を切る

    Returns
    -------
    Tuple[BoundedSystem, State, State]
        系, 初期状態 (q_init, ∅, 0), 受理状態 ACCEPT
    """

    system.check_state(q_init)
    system.check_state(q_fin)
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    g = system.graph
    start = (q_init, frozenset(), 0)

    def expand(state):
        if state == ACCEPT:
            return
        q, context, level = state
        for t in system.outgoing(q):
            if t.label is None:
                target = (t.target, context, level)
            elif monoid.is_dependent(g, context | {t.label}):
                target = (t.target, context | {t.label}, level)
            elif level < k:
                target = (t.target, frozenset((t.label,)), level + 1)
            else:
                continue
            yield Transition(state, t.label, target), target
        if q == q_fin:
            yield Transition(state, None, ACCEPT), ACCEPT

    states, transitions = explore_reachable(start, expand)
    if ACCEPT not in states:
        states.append(ACCEPT)
    promise = ValenceSystem(g, states, transitions)
    return BoundedSystem(promise, k), start, ACCEPT


class NodeKind(enum.Enum):
    """分解木の節の種類"""

    LEAF = 'leaf'
    UNION = 'union'
    VERTEX = 'vertex'


@dataclass(frozen=True)
class DecompositionNode:
    """推移的森の分解木の節

    UNION は連結成分への分割, VERTEX は全域頂点 vertex の除去を表す.
    """

    kind: NodeKind
    vertices: FrozenSet[str]
    children: Tuple['DecompositionNode', ...] = ()
    vertex: Optional[str] = None


def _decompose(names: Sequence[str], matrix: np.ndarray,
               members: List[int]) -> Optional[DecompositionNode]:
    if not members:
        return DecompositionNode(NodeKind.LEAF, frozenset())
    vertices = frozenset(names[i] for i in members)
    sub = matrix[np.ix_(members, members)]
    count, labels = connected_components(csr_matrix(sub), directed=False)
    if count > 1:
        children = []
        for label in range(count):
            part = [members[i] for i in np.flatnonzero(labels == label)]
            child = _decompose(names, matrix, part)
            if child is None:
                return None
            children.append(child)
        return DecompositionNode(NodeKind.UNION, vertices, tuple(children))

    degrees = sub.sum(axis=1)
    universal = np.flatnonzero(degrees == len(members) - 1)
    if universal.size == 0:
        return None
    chosen = members[int(universal[0])]
    child = _decompose(names, matrix, [i for i in members if i != chosen])
    if child is None:
        return None
    return DecompositionNode(NodeKind.VERTEX, vertices, (child,), names[chosen])


def decompose(g: StorageGraph) -> Optional[DecompositionNode]:
    """自己ループを除いた独立関係を連結成分と全域頂点で分解する.
    推移的森でなければ None"""

    matrix = np.array(g.matrix, dtype=np.int8)
    np.fill_diagonal(matrix, 0)
    return _decompose(g.vertices, matrix, list(range(len(g))))


def has_forbidden_induced_subgraph(g: StorageGraph) -> bool:
    """自己ループを除いた独立関係が P4 か C4 を誘導部分グラフに持つか"""

    graph = nx.Graph()
    graph.add_nodes_from(g.vertices)
    graph.add_edges_from(g.edges)
    for pattern in (nx.path_graph(4), nx.cycle_graph(4)):
        if isomorphism.GraphMatcher(graph, pattern).subgraph_is_isomorphic():
            return True
    return False


def is_transitive_forest(g: StorageGraph) -> bool:
    """分解による判定と禁止誘導部分グラフによる判定の両方で調べる

    Raises
    ------
    RuntimeError
        2つの判定が食い違った時
    """

    constructive = decompose(g) is not None
    forbidden = has_forbidden_induced_subgraph(g)
    if constructive == forbidden:
        raise RuntimeError(f'transitive forest checks disagree on {g!r}')
    return constructive


def _check_universal(g: StorageGraph, vertex: str) -> None:
    g.index(vertex)
    for other in g.vertices:
        if other != vertex and not g.adjacent(vertex, other):
            raise NotUniversalError(
                f'{vertex} is not adjacent to {other} in the independence relation')


def _segment_ends(system: ValenceSystem, vertex: str) -> Dict[State, List[State]]:
    """v の操作で始まり v の操作と ε だけを使う経路の始点ごとの終点"""

    rank = {q: i for i, q in enumerate(system.states)}
    ends: Dict[State, List[State]] = {}
    for p in system.states:
        starts = [t.target for t in system.outgoing(p)
                  if t.label is not None and t.label.symbol == vertex]
        if not starts:
            continue
        seen = set(starts)
        stack = list(starts)
        while stack:
            q = stack.pop()
            for t in system.outgoing(q):
                if t.label is not None and t.label.symbol != vertex:
                    continue
                if t.target not in seen:
                    seen.add(t.target)
                    stack.append(t.target)
        ends[p] = sorted(seen, key=rank.__getitem__)
    return ends


def split_at_universal_vertex(system: ValenceSystem, q_init: State, q_fin: State,
                              k: int, vertex: str
                              ) -> Tuple[ValenceAutomaton, ValenceAutomaton, int]:
    """実行を v 以外の操作の区間と v の操作の区間に分ける

    A は G \\ v 上で v の区間を文字 (p, s, q) に置き換えて読み,
    B は {v} 上で文字ごとに p から q への v の区間を読んで ACCEPT に戻る.
    1頂点の区間は文脈を切り替えないので s は常に 0.

    Returns
    -------
    Tuple[ValenceAutomaton, ValenceAutomaton, int]
        A, B, 実行に現れる v の区間の数の上限 m

    Raises
    ------
    NotUniversalError
        v が独立関係で他のすべての頂点と隣接していない時
    """

    g = system.graph
    _check_universal(g, vertex)
    rest = g.without(vertex)
    single = g.induced([vertex])
    segment_ends = _segment_ends(system, vertex)
    rank = {q: i for i, q in enumerate(system.states)}

    def expand_rest(state):
        if state == ACCEPT:
            return
        q, context, level = state
        for t in system.outgoing(q):
            if t.label is None:
                target = (t.target, context, level)
            elif t.label.symbol == vertex:
                continue
            elif context is None or level < 0:
                target = (t.target, frozenset((t.label,)), level + 1)
            elif monoid.is_dependent(rest, context | {t.label}):
                target = (t.target, context | {t.label}, level)
            else:
                target = (t.target, frozenset((t.label,)), level + 1)
            if target[2] > k:
                continue
            yield LabelledTransition(state, None, t.label, target), target
        following = level + 1 if level >= 0 else 0
        if context is not None and following <= k:
            for end in segment_ends.get(q, ()):
                target = (end, None, following)
                yield LabelledTransition(state, (q, 0, end), None, target), target
        if q == q_fin:
            yield LabelledTransition(state, None, None, ACCEPT), ACCEPT

    start = (q_init, frozenset(), -1)
    states, transitions = explore_reachable(start, expand_rest)
    if ACCEPT not in states:
        states.append(ACCEPT)
    automaton_a = ValenceAutomaton(rest, states, start, ACCEPT, transitions)

    letters = sorted(automaton_a.alphabet,
                     key=lambda letter: (rank[letter[0]], letter[1], rank[letter[2]]))

    def expand_vertex(state):
        if state == ACCEPT:
            for letter in letters:
                p, switches, end = letter
                for t in system.outgoing(p):
                    if t.label is not None and t.label.symbol == vertex:
                        target = (t.target, end, frozenset((t.label,)), switches)
                        yield LabelledTransition(ACCEPT, letter, t.label, target), target
            return
        q, end, context, budget = state
        for t in system.outgoing(q):
            if t.label is None:
                target = (t.target, end, context, budget)
            elif t.label.symbol != vertex:
                continue
            elif monoid.is_dependent(single, context | {t.label}):
                target = (t.target, end, context | {t.label}, budget)
            elif budget > 0:
                target = (t.target, end, frozenset((t.label,)), budget - 1)
            else:
                continue
            yield LabelledTransition(state, None, t.label, target), target
        if q == end and budget == 0:
            yield LabelledTransition(state, None, None, ACCEPT), ACCEPT

    states, transitions = explore_reachable(ACCEPT, expand_vertex)
    automaton_b = ValenceAutomaton(single, states, ACCEPT, ACCEPT, transitions)
    return automaton_a, automaton_b, k // 2 + 1


def synchronize(automaton: ValenceAutomaton,
                finite: Nfa) -> Tuple[ValenceSystem, State, State]:
    """A と文字上の有限オートマトン D を文字で同期させた G \\ v 上の系

    D の ε 遷移は文字を読む直前にまとめてたどる.
    """

    closures: Dict[State, Tuple[State, ...]] = {}

    def closure_of(d: State) -> Tuple[State, ...]:
        if d not in closures:
            order = [d]
            seen = {d}
            for state in order:
                for t in finite.outgoing(state):
                    if t.label is None and t.target not in seen:
                        seen.add(t.target)
                        order.append(t.target)
            closures[d] = tuple(order)
        return closures[d]

    def expand(state):
        if state == ACCEPT:
            return
        a, d = state
        for t in automaton.outgoing(a):
            if t.letter is None:
                targets: Iterable[State] = (d,)
            else:
                targets = dict.fromkeys(
                    target for x in closure_of(d) for target in finite.successors(x, t.letter))
            for following in targets:
                target = (t.target, following)
                yield Transition(state, t.op, target), target
        if a == automaton.final and finite.final in closure_of(d):
            yield Transition(state, None, ACCEPT), ACCEPT

    start = (automaton.initial, finite.initial)
    states, transitions = explore_reachable(start, expand)
    if ACCEPT not in states:
        states.append(ACCEPT)
    product = ValenceSystem(automaton.graph, states, transitions)
    trimmed = trim(product, start, ACCEPT)
    return (trimmed if trimmed is not None else product), start, ACCEPT


@dataclass(frozen=True)
class Elimination:
    """頂点消去の結果

    Attributes
    ----------
    system: ValenceSystem
        G \\ v 上の文脈切替 k 回以下の約束付きの系
    initial: State
        初期状態
    final: State
        受理状態
    k: int
        文脈切替回数の上限
    bound: int
        使ったカウンタの上限
    counter_states: int
        1カウンタオートマトンの状態数
    finite_states: int
        有限シミュレーション D の状態数
    """

    system: ValenceSystem
    initial: State
    final: State
    k: int
    bound: int
    counter_states: int
    finite_states: int
    capped: bool = False


def eliminate_universal_vertex(system: ValenceSystem, q_init: State, q_fin: State,
                               k: int, vertex: str, bound: Optional[int] = None,
                               budget: Optional[Budget] = None) -> Elimination:
    """全域頂点 v を消去し, 答えの等しい G \\ v 上の問題を作る

    Parameters
    ----------
    system: ValenceSystem
        文脈切替 k 回以下の約束付きの系
    bound: Optional[int]
        カウンタの上限. 省略時は counter_bound(m, n) を budget.counter_cap で打ち切る

    Raises
    ------
    NotUniversalError
        v が全域頂点でない時
    """

    budget = budget or DEFAULT_BUDGET
    automaton_a, automaton_b, m = split_at_universal_vertex(system, q_init, q_fin, k, vertex)
    counter = to_one_counter(builtin_counter(automaton_b, k))
    n = len(counter.states)
    capped = False
    if bound is None:
        bound = counter_bound(m, n)
        if bound > budget.counter_cap:
            bound, capped = budget.counter_cap, True
    finite = bounded_counter_nfa(counter, bound, m)
    product, initial, final = synchronize(automaton_a, finite)
    log.debug(f'[POLY] eliminated {vertex}: |A|={len(automaton_a.states)} '
              f'|C|={n} |D|={len(finite.states)} product={len(product.states)}')
    return Elimination(product, initial, final, k, bound, n, len(finite.states), capped)


SideSolver = Callable[[ValenceSystem, int, State, State], bool]


def union_saturate(bounded: BoundedSystem, sides: Sequence[FrozenSet[str]],
                   sub_solver: SideSolver) -> BoundedSystem:
    """各辺の操作だけで恒等元に戻る区間を ε 遷移で置き換える

    sub_solver(S_i, i, p, q) は S_i (辺 i の操作と ε 遷移だけの系) で
    p から q へ恒等元の語で移れるかを返す. 新しい ε 遷移がなくなるまで繰り返す.

    Raises
    ------
    NotDisjointUnionError
        辺が交わる, 頂点を覆わない, または異なる辺の間に独立な組がある時
    """

    system = bounded.system
    g = system.graph
    sides = [frozenset(side) for side in sides]
    covered = set()
    for side in sides:
        if covered & side:
            raise NotDisjointUnionError('sides overlap')
        covered |= side
    if covered != set(g.vertices):
        raise NotDisjointUnionError('sides do not cover the graph')
    for a, b in g.edges:
        if not any(a in side and b in side for side in sides):
            raise NotDisjointUnionError(f'independent pair {a}-{b} crosses sides')

    transitions = list(system.transitions)
    added: List[Transition] = []
    solved = set()
    changed = True
    while changed:
        changed = False
        current = ValenceSystem(g, system.states, transitions)
        for index, side in enumerate(sides):
            side_ops = frozenset(op for op in current.operations() if op.symbol in side)
            if not side_ops:
                continue
            restricted = restrict(current, side_ops)
            sources = [q for q in current.states
                       if any(t.label in side_ops for t in current.outgoing(q))]
            targets = {t.target for t in restricted.transitions if t.label is not None}
            for p in sources:
                closure = epsilon_closure(current, [p])
                for q in current.states:
                    if q not in targets or q in closure:
                        continue
                    if (index, p, q) not in solved and not sub_solver(restricted, index, p, q):
                        continue
                    solved.add((index, p, q))
                    transition = Transition(p, None, q)
                    transitions.append(transition)
                    added.append(transition)
                    changed = True
    log.debug(f'[POLY] union saturation added {len(added)} silent transitions')
    saturated = ValenceSystem(g, system.states, transitions)
    return BoundedSystem(saturated, bounded.k, bounded.added + tuple(added))


@dataclass
class PolyResult:
    """多項式時間の手続きの結果

    カウンタの上限を打ち切った時は NO を出さず INCONCLUSIVE にする.
    YES は打ち切っても正しい
    """

    verdict: Verdict
    eliminations: int = 0
    capped: bool = False


class PolySolver:
    """分解木に沿って再帰的に判定する

    Attributes
    ----------
    bound: Optional[int]
        頂点消去のカウンタ上限. None なら counter_bound を上限付きで使う
    """

    def __init__(self, system: ValenceSystem, budget: Optional[Budget] = None,
                 bound: Optional[int] = None) -> None:
        self.system = system
        self.budget = budget or DEFAULT_BUDGET
        self.bound = bound
        self.eliminations = 0
        self.capped = False

    def solve(self, q_init: State, q_fin: State, k: int) -> PolyResult:
        """BCSREACH(A, q_init, q_fin, k) を判定する

        Raises
        ------
        UnsupportedGraphError
            独立関係 (自己ループを除く) が推移的森でない時
        """

        g = self.system.graph
        if not is_transitive_forest(g):
            raise UnsupportedGraphError(
                'the independence relation without self-loops is not a transitive forest')
        self.eliminations = 0
        self.capped = False

        promise, initial, final = to_promise(self.system, q_init, q_fin, k)
        trimmed = trim(promise.system, initial, final)
        if trimmed is None:
            return PolyResult(Verdict.NO)
        used = {op.symbol for op in trimmed.operations()}
        tree = decompose(g.induced(used))
        found = self._reachable(trimmed, tree, initial, final, k)
        log.info(f'[POLY] {self.eliminations} vertex eliminations')
        if found:
            return PolyResult(Verdict.YES, self.eliminations, self.capped)
        if self.capped:
            # 上限を打ち切ったので NO とは言えない
            log.warning(f'[POLY] counter bound capped at {self.budget.counter_cap}, '
                        f'answer is inconclusive')
            return PolyResult(Verdict.INCONCLUSIVE, self.eliminations, True)
        return PolyResult(Verdict.NO, self.eliminations)

    def _reachable(self, system: ValenceSystem, node: DecompositionNode,
                   p: State, q: State, k: int) -> bool:
        if p == q:
            return True
        trimmed = trim(system, p, q)
        if trimmed is None:
            return False
        local = trimmed.over(trimmed.graph.induced(node.vertices))
        if node.kind is NodeKind.LEAF:
            return True

        if node.kind is NodeKind.VERTEX:
            elimination = eliminate_universal_vertex(local, p, q, k, node.vertex,
                                                     bound=self.bound, budget=self.budget)
            self.eliminations += 1
            self.capped = self.capped or elimination.capped
            return self._reachable(elimination.system, node.children[0],
                                   elimination.initial, elimination.final, k)

        def side_solver(restricted: ValenceSystem, index: int, source: State,
                        target: State) -> bool:
            return self._reachable(restricted, node.children[index], source, target, k)

        sides = [child.vertices for child in node.children]
        saturated = union_saturate(BoundedSystem(local, k), sides, side_solver)
        return q in epsilon_closure(saturated.system, [p])


def solve_poly(system: ValenceSystem, q_init: State, q_fin: State, k: int,
               budget: Optional[Budget] = None,
               bound: Optional[int] = None) -> PolyResult:
    return PolySolver(system, budget, bound).solve(q_init, q_fin, k)
