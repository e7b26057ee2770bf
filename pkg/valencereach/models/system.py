"""付値系と総当たりの到達可能性判定"""
import enum
import logging as log
from collections import deque
from dataclasses import dataclass
from typing import (Dict, FrozenSet, Hashable, Iterable, List, NamedTuple,
                    Optional, Sequence, Tuple)

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from valencereach.config import DEFAULT_BUDGET
from valencereach.models import monoid
from valencereach.models.monoid import (BudgetExceededError, Operation,
                                        StorageGraph, Word)

State = Hashable


class UnknownStateError(ValueError):
    """系に存在しない状態が指定された時の例外"""


class NotEnabledError(ValueError):
    """遷移が実行可能でない時の例外"""


class Verdict(enum.Enum):
    """判定結果の列挙型"""

    YES = 'YES'
    NO = 'NO'
    INCONCLUSIVE = 'INCONCLUSIVE'


class Transition(NamedTuple):
    """遷移. label が None なら ε 遷移"""

    source: State
    label: Optional[Operation]
    target: State

    @property
    def silent(self) -> bool:
        return self.label is None

    def __str__(self) -> str:
        label = monoid.EPSILON_LITERAL if self.label is None else str(self.label)
        return f'{self.source} {label} {self.target}'


class ValenceSystem:
    """グラフモノイド上の付値系

    Attributes
    ----------
    graph: StorageGraph
        記憶グラフ
    states: Tuple[State, ...]
        状態 (宣言順)
    transitions: Tuple[Transition, ...]
        遷移 (宣言順, 重複なし)
    """

    def __init__(self, graph: StorageGraph, states: Sequence[State],
                 transitions: Iterable[Tuple[State, Optional[Operation], State]]
                 ) -> None:
        """初期化

        Raises
        ------
        ValueError
            状態名が重複している時
        UnknownStateError
            遷移が未宣言の状態を参照している時
        InvalidSymbolError
            遷移のラベルがグラフにない記号を使っている時
        """

        self.graph = graph
        self.states = tuple(states)
        self._state_set = frozenset(self.states)
        if len(self._state_set) != len(self.states):
            raise ValueError('duplicate state')

        ordered: List[Transition] = []
        seen = set()
        outgoing: Dict[State, List[Transition]] = {}
        for item in transitions:
            t = Transition(*item)
            self.check_state(t.source)
            self.check_state(t.target)
            if t.label is not None:
                graph.index(t.label.symbol)
            if t in seen:
                continue
            seen.add(t)
            ordered.append(t)
            outgoing.setdefault(t.source, []).append(t)

        self.transitions = tuple(ordered)
        self._transition_set = frozenset(seen)
        self._outgoing = {q: tuple(ts) for q, ts in outgoing.items()}
        self._operations = frozenset(t.label for t in ordered if t.label is not None)

    def __contains__(self, transition: object) -> bool:
        return transition in self._transition_set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValenceSystem):
            return NotImplemented
        return (self.graph == other.graph and self.states == other.states
                and self.transitions == other.transitions)

    def __repr__(self) -> str:
        return (f'ValenceSystem(states={len(self.states)}, '
                f'transitions={len(self.transitions)}, graph={self.graph!r})')

    @property
    def size(self) -> int:
        return len(self.transitions)

    def has_state(self, state: State) -> bool:
        return state in self._state_set

    def check_state(self, state: State) -> None:
        if state not in self._state_set:
            raise UnknownStateError(f'unknown state {state!r}')

    def outgoing(self, state: State) -> Tuple[Transition, ...]:
        return self._outgoing.get(state, ())

    def operations(self) -> FrozenSet[Operation]:
        """遷移ラベルに現れる操作の集合 Op(A)"""

        return self._operations

    def over(self, graph: StorageGraph) -> 'ValenceSystem':
        """同じ状態と遷移を別の記憶グラフ上の系として作り直す"""

        return ValenceSystem(graph, self.states, self.transitions)


class Configuration(NamedTuple):
    """状態と記憶内容の語"""

    state: State
    storage: Word


def step(system: ValenceSystem, configuration: Configuration,
         transition: Transition) -> Configuration:
    """遷移を1つ実行する

    Raises
    ------
    NotEnabledError
        遷移が系にない, 始点が異なる, または記憶内容が右可逆でなくなる時
    """

    if transition not in system:
        raise NotEnabledError(f'transition {transition} is not in the system')
    if configuration.state != transition.source:
        raise NotEnabledError(
            f'transition {transition} does not start at {configuration.state!r}')
    if transition.label is None:
        return Configuration(transition.target, configuration.storage)

    storage = configuration.storage + (transition.label,)
    if not monoid.is_right_invertible(system.graph, storage):
        raise NotEnabledError(f'{transition.label} is blocked')
    return Configuration(transition.target, storage)


def replay(system: ValenceSystem, q_init: State,
           transitions: Iterable[Transition]) -> Configuration:
    """初期状態から遷移列を順に実行した様相を返す"""

    system.check_state(q_init)
    configuration = Configuration(q_init, monoid.EPSILON)
    for transition in transitions:
        configuration = step(system, configuration, transition)
    return configuration


def restrict(system: ValenceSystem, allowed: Iterable[Operation]) -> ValenceSystem:
    """ラベルが allowed に含まれる遷移と ε 遷移だけを残す"""

    allowed = frozenset(allowed)
    return ValenceSystem(
        system.graph, system.states,
        [t for t in system.transitions if t.label is None or t.label in allowed])


def _adjacency(system: ValenceSystem, silent_only: bool) -> csr_matrix:
    index = {q: i for i, q in enumerate(system.states)}
    pairs = [(index[t.source], index[t.target]) for t in system.transitions
             if t.label is None or not silent_only]
    n = len(system.states)
    if not pairs:
        return csr_matrix((n, n), dtype=np.int8)
    rows, cols = zip(*pairs)
    data = np.ones(len(pairs), dtype=np.int8)
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def reachable_states(system: ValenceSystem, sources: Iterable[State],
                     silent_only: bool = False,
                     reverse: bool = False) -> FrozenSet[State]:
    """sources から (reverse なら sources へ) 到達できる状態の集合"""

    matrix = _adjacency(system, silent_only)
    if reverse:
        matrix = matrix.transpose().tocsr()
    index = {q: i for i, q in enumerate(system.states)}
    seen = np.zeros(len(system.states), dtype=bool)
    for source in sources:
        system.check_state(source)
        if seen[index[source]]:
            continue
        order = breadth_first_order(matrix, index[source], directed=True,
                                    return_predecessors=False)
        seen[order] = True
    return frozenset(system.states[i] for i in np.flatnonzero(seen))


def epsilon_closure(system: ValenceSystem,
                    sources: Iterable[State]) -> FrozenSet[State]:
    return reachable_states(system, sources, silent_only=True)


def trim(system: ValenceSystem, source: State,
         target: State) -> Optional[ValenceSystem]:
    """source から到達でき target へ到達できる状態だけの部分系

    Returns
    -------
    Optional[ValenceSystem]
        target に到達できなければ None
    """

    forward = reachable_states(system, [source])
    if target not in forward:
        return None
    keep = forward & reachable_states(system, [target], reverse=True)
    return ValenceSystem(
        system.graph, [q for q in system.states if q in keep],
        [t for t in system.transitions if t.source in keep and t.target in keep])


@dataclass(frozen=True)
class RunWitness:
    """到達可能性の証拠となる実行"""

    transitions: Tuple[Transition, ...]
    switches: int

    @property
    def word(self) -> Word:
        return tuple(t.label for t in self.transitions if t.label is not None)


def make_witness(system: ValenceSystem,
                 transitions: Sequence[Transition]) -> RunWitness:
    transitions = tuple(transitions)
    word = tuple(t.label for t in transitions if t.label is not None)
    return RunWitness(transitions, monoid.context_switches(system.graph, word))


@dataclass(frozen=True)
class OracleResult:
    """総当たり探索の結果

    Attributes
    ----------
    verdict: Verdict
        判定
    witness: Optional[RunWitness]
        YES の時の最短の実行
    explored: int
        保持した探索状態の数
    truncated: bool
        語長の上限で枝を切ったか
    """

    verdict: Verdict
    witness: Optional[RunWitness]
    explored: int
    truncated: bool


_SearchKey = Tuple[State, Word, int, FrozenSet[str]]


def _trace_back(parent: Dict[_SearchKey, Tuple[_SearchKey, Transition]],
                key: _SearchKey) -> List[Transition]:
    path: List[Transition] = []
    while key in parent:
        key, transition = parent[key]
        path.append(transition)
    path.reverse()
    return path


def brute_force_bcsreach(system: ValenceSystem, q_init: State, q_fin: State,
                         k: int, max_len: Optional[int] = None,
                         max_states: Optional[int] = None) -> OracleResult:
    """文脈切替 k 回以下の実行で (q_fin, ε) に到達できるかの総当たり探索

    (状態, 既約形, 切替回数, 現在の文脈の記号集合) を鍵とし,
    語長の短い順 (ε 遷移は長さ0) の 0-1 幅優先探索を行う.

    Parameters
    ----------
    system: ValenceSystem
        付値系
    q_init: State
        初期状態
    q_fin: State
        目標状態
    k: int
        文脈切替回数の上限
    max_len: Optional[int]
        実行の語長の上限. 省略時は DEFAULT_BUDGET.max_len
    max_states: Optional[int]
        保持する探索状態の上限. 省略時は DEFAULT_BUDGET.search_states

    Returns
    -------
    OracleResult
        語長の上限で枝を切ってなお見つからなければ INCONCLUSIVE

    Raises
    ------
    BudgetExceededError
        探索状態が max_states を超えた時
    """

    max_len = DEFAULT_BUDGET.max_len if max_len is None else max_len
    max_states = DEFAULT_BUDGET.search_states if max_states is None else max_states
    if k < 0:
        raise ValueError(f'k must be non-negative, got {k}')
    system.check_state(q_init)
    system.check_state(q_fin)
    g = system.graph

    start: _SearchKey = (q_init, monoid.EPSILON, -1, frozenset())
    best: Dict[_SearchKey, int] = {start: 0}
    parent: Dict[_SearchKey, Tuple[_SearchKey, Transition]] = {}
    queue = deque([(start, 0)])
    truncated = False

    while queue:
        key, length = queue.popleft()
        if best[key] < length:
            continue
        state, form, switches, symbols = key
        if state == q_fin and not form:
            witness = make_witness(system, _trace_back(parent, key))
            log.info(f'[ORACLE] reached {q_fin!r} with a run of length '
                     f'{len(witness.word)} after {len(best)} states')
            return OracleResult(Verdict.YES, witness, len(best), truncated)

        for transition in system.outgoing(state):
            if transition.label is None:
                following, cost = (transition.target, form, switches, symbols), length
            else:
                if length + 1 > max_len:
                    truncated = True
                    continue
                extended = monoid.extend_irreducible(g, form, transition.label)
                if not monoid.is_right_invertible(g, extended, irreducible=True):
                    continue
                context, count = monoid.advance_context(g, symbols, switches,
                                                        transition.label)
                if count > k:
                    continue
                following, cost = (transition.target, extended, count, context), length + 1

            if best.get(following, max_len + 1) <= cost:
                continue
            best[following] = cost
            parent[following] = (key, transition)
            if len(best) > max_states:
                raise BudgetExceededError(
                    f'brute-force search kept more than {max_states} states')
            if cost == length:
                queue.appendleft((following, cost))
            else:
                queue.append((following, cost))

    verdict = Verdict.INCONCLUSIVE if truncated else Verdict.NO
    log.info(f'[ORACLE] {verdict.value} after {len(best)} states')
    return OracleResult(verdict, None, len(best), truncated)
