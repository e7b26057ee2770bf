"""操作 (または任意のラベル) 上の非決定性有限オートマトン"""
from collections import deque
from typing import (Dict, FrozenSet, Hashable, Iterable, List, Optional,
                    Sequence, Tuple, Union)

from valencereach.models import monoid
from valencereach.models.monoid import StorageGraph, Word
from valencereach.models.saturation import (NotDependentError,
                                            SaturatedSystem, saturate)
from valencereach.models.system import (State, Transition, UnknownStateError,
                                        ValenceSystem, restrict)

Label = Hashable


class _Structure:
    """状態と遷移の索引. 初期状態と受理状態だけが異なる NFA の間で共有する"""

    def __init__(self, states: Sequence[State], transitions: Iterable[Transition],
                 graph: Optional[StorageGraph]) -> None:
        self.states = tuple(states)
        self.state_set = frozenset(self.states)
        self.transitions = tuple(Transition(*t) for t in transitions)
        self.graph = graph

        outgoing: Dict[State, List[Transition]] = {}
        incoming: Dict[State, List[Transition]] = {}
        by_label: Dict[Tuple[State, Label], List[State]] = {}
        for t in self.transitions:
            if t.source not in self.state_set or t.target not in self.state_set:
                raise UnknownStateError(f'transition {t} uses an unknown state')
            outgoing.setdefault(t.source, []).append(t)
            incoming.setdefault(t.target, []).append(t)
            if t.label is not None:
                by_label.setdefault((t.source, t.label), []).append(t.target)

        self.outgoing = {q: tuple(ts) for q, ts in outgoing.items()}
        self.incoming = {q: tuple(ts) for q, ts in incoming.items()}
        self.by_label = {key: tuple(qs) for key, qs in by_label.items()}
        self.alphabet = frozenset(t.label for t in self.transitions
                                  if t.label is not None)
        self._inverse: Optional['_Structure'] = None

    def inverse(self) -> '_Structure':
        """遷移を逆向きにしラベルの極性を反転した索引.
        自己ループのない記号の負の操作の遷移は除く"""

        if self._inverse is None:
            if self.graph is None:
                raise ValueError('syntactic inverse needs operation labels')
            reversed_transitions = []
            for t in self.transitions:
                if t.label is None:
                    reversed_transitions.append(Transition(t.target, None, t.source))
                elif t.label.positive or self.graph.has_loop(t.label.symbol):
                    reversed_transitions.append(
                        Transition(t.target, t.label.inverse(), t.source))
            self._inverse = _Structure(self.states, reversed_transitions, self.graph)
        return self._inverse


class Nfa:
    """初期状態と受理状態を1つずつ持つ NFA

    Attributes
    ----------
    initial: State
        初期状態
    final: State
        受理状態
    """

    def __init__(self, states: Sequence[State], initial: State, final: State,
                 transitions: Iterable[Tuple[State, Optional[Label], State]],
                 graph: Optional[StorageGraph] = None) -> None:
        self._structure = _Structure(states, transitions, graph)
        self._set_endpoints(initial, final)

    @classmethod
    def _from_structure(cls, structure: _Structure, initial: State,
                        final: State) -> 'Nfa':
        nfa = cls.__new__(cls)
        nfa._structure = structure
        nfa._set_endpoints(initial, final)
        return nfa

    def _set_endpoints(self, initial: State, final: State) -> None:
        for state in (initial, final):
            if state not in self._structure.state_set:
                raise UnknownStateError(f'unknown state {state!r}')
        self.initial = initial
        self.final = final

    def __repr__(self) -> str:
        return (f'Nfa(states={len(self.states)}, '
                f'transitions={len(self.transitions)}, '
                f'initial={self.initial!r}, final={self.final!r})')

    @property
    def states(self) -> Tuple[State, ...]:
        return self._structure.states

    @property
    def transitions(self) -> Tuple[Transition, ...]:
        return self._structure.transitions

    @property
    def alphabet(self) -> FrozenSet[Label]:
        return self._structure.alphabet

    @property
    def graph(self) -> Optional[StorageGraph]:
        return self._structure.graph

    def with_endpoints(self, initial: State, final: State) -> 'Nfa':
        """遷移を共有したまま初期状態と受理状態を変えた NFA"""

        return Nfa._from_structure(self._structure, initial, final)

    def outgoing(self, state: State) -> Tuple[Transition, ...]:
        return self._structure.outgoing.get(state, ())

    def successors(self, state: State, label: Label) -> Tuple[State, ...]:
        return self._structure.by_label.get((state, label), ())

    def epsilon_closure(self, states: Iterable[State]) -> FrozenSet[State]:
        closure = set(states)
        stack = list(closure)
        while stack:
            state = stack.pop()
            for t in self.outgoing(state):
                if t.label is None and t.target not in closure:
                    closure.add(t.target)
                    stack.append(t.target)
        return frozenset(closure)

    def accepts(self, word: Iterable[Label]) -> bool:
        current = self.epsilon_closure([self.initial])
        for label in word:
            current = self.epsilon_closure(
                target for state in current for target in self.successors(state, label))
            if not current:
                return False
        return self.final in current

    def forward_states(self) -> FrozenSet[State]:
        """初期状態から到達できる状態"""

        seen = {self.initial}
        stack = [self.initial]
        while stack:
            state = stack.pop()
            for t in self.outgoing(state):
                if t.target not in seen:
                    seen.add(t.target)
                    stack.append(t.target)
        return frozenset(seen)

    def backward_states(self) -> FrozenSet[State]:
        """受理状態へ到達できる状態"""

        seen = {self.final}
        stack = [self.final]
        while stack:
            state = stack.pop()
            for t in self._structure.incoming.get(state, ()):
                if t.source not in seen:
                    seen.add(t.source)
                    stack.append(t.source)
        return frozenset(seen)

    def is_empty(self) -> bool:
        return self.final not in self.forward_states()


def to_nfa(system: Union[ValenceSystem, SaturatedSystem], q_init: State,
           q_fin: State) -> Nfa:
    """系をそのまま NFA として読む

    Raises
    ------
    UnknownStateError
        q_init または q_fin が系にない時
    """

    if isinstance(system, SaturatedSystem):
        system = system.system
    system.check_state(q_init)
    system.check_state(q_fin)
    return Nfa(system.states, q_init, q_fin, system.transitions, system.graph)


def build_test_automaton(system: ValenceSystem, q_init: State, q_fin: State,
                         ops_con: Iterable[monoid.Operation],
                         ops_bl: Iterable[monoid.Operation]) -> Nfa:
    """文脈の操作 ops_con で飽和化し, ブロックの操作 ops_bl に制限した NFA

    Raises
    ------
    NotDependentError
        ops_con が従属でない時
    ValueError
        ops_bl が ops_con に含まれない時
    """

    ops_con = frozenset(ops_con)
    ops_bl = frozenset(ops_bl)
    if not monoid.is_dependent(system.graph, ops_con):
        raise NotDependentError('context operations must be dependent')
    if not ops_bl <= ops_con:
        raise ValueError('block operations must be a subset of the context operations')
    saturated = saturate(restrict(system, ops_con))
    return to_nfa(restrict(saturated.system, ops_bl), q_init, q_fin)


def syninv_nfa(nfa: Nfa) -> Nfa:
    """L(N) の語 u のうち構文的逆元が定義されるものについて,
    その逆元を受理する NFA"""

    return Nfa._from_structure(nfa._structure.inverse(), nfa.final, nfa.initial)


def product_witness(first: Nfa, second: Nfa) -> Optional[Word]:
    """L(first) ∩ L(second) の語を1つ返す. 空なら None"""

    start = (first.initial, second.initial)
    goal = (first.final, second.final)
    parent: Dict[Tuple[State, State], Optional[Tuple[Tuple[State, State], Optional[Label]]]] = {
        start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        if pair == goal:
            word = []
            cursor = pair
            while parent[cursor] is not None:
                cursor, label = parent[cursor]
                if label is not None:
                    word.append(label)
            word.reverse()
            return tuple(word)

        a, b = pair
        moves = []
        for t in first.outgoing(a):
            if t.label is None:
                moves.append(((t.target, b), None))
            else:
                moves.extend(((t.target, target), t.label)
                             for target in second.successors(b, t.label))
        for t in second.outgoing(b):
            if t.label is None:
                moves.append(((a, t.target), None))
        for following, label in moves:
            if following not in parent:
                parent[following] = (pair, label)
                queue.append(following)
    return None


def product_nonempty(first: Nfa, second: Nfa) -> bool:
    return product_witness(first, second) is not None


def accepts_epsilon(nfa: Nfa) -> bool:
    return nfa.final in nfa.epsilon_closure([nfa.initial])


def accepting_path(nfa: Nfa, word: Sequence[Label]) -> Optional[List[Transition]]:
    """word を受理する遷移列を1つ返す. なければ None"""

    start = (nfa.initial, 0)
    goal = (nfa.final, len(word))
    parent: Dict[Tuple[State, int], Tuple[Tuple[State, int], Transition]] = {}
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            path = []
            while node != start:
                node, transition = parent[node]
                path.append(transition)
            path.reverse()
            return path
        state, position = node
        for t in nfa.outgoing(state):
            if t.label is None:
                following = (t.target, position)
            elif position < len(word) and t.label == word[position]:
                following = (t.target, position + 1)
            else:
                continue
            if following not in seen:
                seen.add(following)
                parent[following] = (node, t)
                queue.append(following)
    return None


def useful_alphabet(nfa: Nfa) -> FrozenSet[Label]:
    """初期状態から受理状態への経路上にある遷移のラベル"""

    forward = nfa.forward_states()
    if nfa.final not in forward:
        return frozenset()
    backward = nfa.backward_states()
    return frozenset(t.label for t in nfa.transitions
                     if t.label is not None and t.source in forward
                     and t.target in backward)
