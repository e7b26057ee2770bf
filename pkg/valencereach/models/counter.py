"""文字付きの付値オートマトンと1カウンタオートマトン

頂点消去で使う. 文字は区間 (p, s, q) を表すラベルで, 付値系の操作とは別に読む.
"""
import enum
import logging as log
from collections import deque
from typing import (Dict, Hashable, Iterable, List, NamedTuple, Optional,
                    Sequence, Tuple)

from valencereach.models import monoid
from valencereach.models.monoid import Operation, StorageGraph
from valencereach.models.nfa import Nfa
from valencereach.models.system import State, Transition, UnknownStateError

ACCEPT = '*'
ZERO_ACCEPT = ('*', '=0')

Letter = Hashable


class LabelledTransition(NamedTuple):
    """文字と操作を1つずつ (どちらも省略可) 読む遷移"""

    source: State
    letter: Optional[Letter]
    op: Optional[Operation]
    target: State


class ValenceAutomaton:
    """文字付きの付値オートマトン

    Attributes
    ----------
    graph: StorageGraph
        記憶グラフ
    states: Tuple[State, ...]
        状態 (発見順)
    initial: State
        初期状態
    final: State
        受理状態
    transitions: Tuple[LabelledTransition, ...]
        遷移
    """

    def __init__(self, graph: StorageGraph, states: Sequence[State], initial: State,
                 final: State, transitions: Iterable[LabelledTransition]) -> None:
        self.graph = graph
        self.states = tuple(states)
        state_set = frozenset(self.states)
        for state in (initial, final):
            if state not in state_set:
                raise UnknownStateError(f'unknown state {state!r}')
        self.initial = initial
        self.final = final
        self.transitions = tuple(LabelledTransition(*t) for t in transitions)

        outgoing: Dict[State, List[LabelledTransition]] = {}
        for t in self.transitions:
            if t.source not in state_set or t.target not in state_set:
                raise UnknownStateError(f'transition {t} uses an unknown state')
            if t.op is not None:
                graph.index(t.op.symbol)
            outgoing.setdefault(t.source, []).append(t)
        self._outgoing = {q: tuple(ts) for q, ts in outgoing.items()}

    def __repr__(self) -> str:
        return (f'ValenceAutomaton(states={len(self.states)}, '
                f'transitions={len(self.transitions)})')

    @property
    def alphabet(self) -> frozenset:
        return frozenset(t.letter for t in self.transitions if t.letter is not None)

    def outgoing(self, state: State) -> Tuple[LabelledTransition, ...]:
        return self._outgoing.get(state, ())


class CounterEffect(enum.Enum):
    """カウンタへの作用"""

    INC = '+1'
    DEC = '-1'
    NOOP = '0'
    ZERO = '=0'


class CounterTransition(NamedTuple):
    source: State
    letter: Optional[Letter]
    effect: CounterEffect
    target: State


class OneCounterAutomaton:
    """非負カウンタを1つ持つオートマトン. DEC は 0 では実行できない"""

    def __init__(self, states: Sequence[State], initial: State, final: State,
                 transitions: Iterable[CounterTransition]) -> None:
        self.states = tuple(states)
        self.initial = initial
        self.final = final
        self.transitions = tuple(CounterTransition(*t) for t in transitions)
        outgoing: Dict[State, List[CounterTransition]] = {}
        for t in self.transitions:
            outgoing.setdefault(t.source, []).append(t)
        self._outgoing = {q: tuple(ts) for q, ts in outgoing.items()}

    def __repr__(self) -> str:
        return (f'OneCounterAutomaton(states={len(self.states)}, '
                f'transitions={len(self.transitions)})')

    def outgoing(self, state: State) -> Tuple[CounterTransition, ...]:
        return self._outgoing.get(state, ())


def explore_reachable(start, expand) -> Tuple[List, List]:
    """start から expand が返す (遷移, 行き先) をたどって到達部分だけを作る"""

    states = [start]
    seen = {start}
    transitions = []
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for transition, target in expand(state):
            transitions.append(transition)
            if target not in seen:
                seen.add(target)
                states.append(target)
                queue.append(target)
    return states, transitions


def builtin_counter(automaton: ValenceAutomaton, bound: int) -> ValenceAutomaton:
    """文脈切替回数を状態で数え, bound 回以下の実行だけを残す

    状態は (q, 現在の文脈の操作集合, 切替回数) で, 受理は ACCEPT への ε 遷移.
    """

    g = automaton.graph
    start = (automaton.initial, frozenset(), 0)

    def expand(state):
        if state == ACCEPT:
            return
        q, context, level = state
        for t in automaton.outgoing(q):
            if t.op is None:
                target = (t.target, context, level)
            elif monoid.is_dependent(g, context | {t.op}):
                target = (t.target, context | {t.op}, level)
            elif level < bound:
                target = (t.target, frozenset((t.op,)), level + 1)
            else:
                continue
            yield LabelledTransition(state, t.letter, t.op, target), target
        if q == automaton.final:
            yield LabelledTransition(state, None, None, ACCEPT), ACCEPT

    states, transitions = explore_reachable(start, expand)
    if ACCEPT not in states:
        states.append(ACCEPT)
    return ValenceAutomaton(g, states, start, ACCEPT, transitions)


def to_one_counter(automaton: ValenceAutomaton) -> OneCounterAutomaton:
    """1頂点のグラフ上のオートマトンを1カウンタオートマトンにする

    自己ループがあれば記憶は整数なので (状態, 符号) で絶対値を数え,
    0 の時だけ符号を切り替える. なければ記憶は非負カウンタそのもの.
    受理は ZERO_ACCEPT への 0 判定の遷移.

    Raises
    ------
    ValueError
        グラフの頂点が1つでない時
    """

    g = automaton.graph
    if len(g) != 1:
        raise ValueError(f'expected a single-vertex graph, got {g.vertices}')
    looped = g.has_loop(g.vertices[0])
    transitions: List[CounterTransition] = []

    if not looped:
        for t in automaton.transitions:
            if t.op is None:
                effect = CounterEffect.NOOP
            else:
                effect = CounterEffect.INC if t.op.positive else CounterEffect.DEC
            transitions.append(CounterTransition(t.source, t.letter, effect, t.target))
        transitions.append(
            CounterTransition(automaton.final, None, CounterEffect.ZERO, ZERO_ACCEPT))
        states = list(automaton.states) + [ZERO_ACCEPT]
        return OneCounterAutomaton(states, automaton.initial, ZERO_ACCEPT, transitions)

    signs = (1, -1)
    for t in automaton.transitions:
        for sign in signs:
            if t.op is None:
                effect = CounterEffect.NOOP
            else:
                delta = 1 if t.op.positive else -1
                effect = CounterEffect.INC if delta * sign > 0 else CounterEffect.DEC
            transitions.append(
                CounterTransition((t.source, sign), t.letter, effect, (t.target, sign)))
    for q in automaton.states:
        transitions.append(CounterTransition((q, 1), None, CounterEffect.ZERO, (q, -1)))
        transitions.append(CounterTransition((q, -1), None, CounterEffect.ZERO, (q, 1)))
    for sign in signs:
        transitions.append(
            CounterTransition((automaton.final, sign), None, CounterEffect.ZERO, ZERO_ACCEPT))
    states = [(q, sign) for q in automaton.states for sign in signs] + [ZERO_ACCEPT]
    return OneCounterAutomaton(states, (automaton.initial, 1), ZERO_ACCEPT, transitions)


def counter_bound(m: int, n: int) -> int:
    """m 文字以下を読む n 状態の1カウンタオートマトンで十分なカウンタの上限"""

    mn = m * n
    return (mn + 1) ** 2 + mn + 1


_DELTA = {CounterEffect.INC: 1, CounterEffect.DEC: -1,
          CounterEffect.NOOP: 0, CounterEffect.ZERO: 0}


def bounded_counter_nfa(counter: OneCounterAutomaton, bound: int, m: int) -> Nfa:
    """カウンタを bound 以下, 読む文字を m 以下に制限した有限オートマトン

    状態は (c, カウンタ値, 読んだ文字数). 受理状態は (final, 0, m) で,
    それより少なく読んだ受理は ε 遷移で (final, 0, m) へつなぐ.
    """

    start = (counter.initial, 0, 0)

    def expand(state):
        c, value, read = state
        for t in counter.outgoing(c):
            if t.effect is CounterEffect.ZERO and value != 0:
                continue
            following = value + _DELTA[t.effect]
            if following < 0 or following > bound:
                continue
            count = read + (t.letter is not None)
            if count > m:
                continue
            target = (t.target, following, count)
            yield Transition(state, t.letter, target), target

    states, transitions = explore_reachable(start, expand)
    final = (counter.final, 0, m)
    reached = set(states)
    for read in range(m):
        state = (counter.final, 0, read)
        if state in reached:
            following = (counter.final, 0, read + 1)
            transitions.append(Transition(state, None, following))
            if following not in reached:
                reached.add(following)
                states.append(following)
    if final not in reached:
        states.append(final)
    log.debug(f'[COUNTER] bounded simulation with bound {bound}: {len(states)} states')
    return Nfa(states, start, final, transitions)
