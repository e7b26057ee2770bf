"""文脈切替回数を制限した到達可能性 (BCSREACH) の NP 手続き

テストは境界状態の列と各文脈・各ブロックの操作集合からなる.
テストの各スロットは飽和化した系から作る NFA で表し,
FRA1 (隣接する逆元の対の消去), FRA2 (独立な隣接スロットの交換),
FRA3 (空語を受理するスロットの消去) で全スロットを消せれば YES.
"""
import enum
import logging as log
from dataclasses import dataclass, field
from itertools import combinations
from typing import (Dict, FrozenSet, Iterable, Iterator, List, Optional,
                    Sequence, Tuple, Union)

import networkx as nx

from valencereach.config import DEFAULT_BUDGET, Budget
from valencereach.models import monoid
from valencereach.models.monoid import (BudgetExceededError, Operation,
                                        StorageGraph, Word)
from valencereach.models.nfa import (Nfa, accepting_path, accepts_epsilon,
                                     product_nonempty, product_witness,
                                     syninv_nfa, to_nfa, useful_alphabet)
from valencereach.models.saturation import SaturatedSystem, saturate
from valencereach.models.system import (RunWitness, State, Transition,
                                        ValenceSystem, Verdict, make_witness,
                                        reachable_states, replay, restrict)


class NonAdjacentError(ValueError):
    """FRA の対象のスロットが隣接していない時の例外"""


class CertificateSyntaxError(ValueError):
    """証明書のテキストが読めない時の例外"""


class StepKind(enum.Enum):
    """自由簡約の規則"""

    FRA1 = 'fra1'
    FRA2 = 'fra2'
    FRA3 = 'fra3'


@dataclass(frozen=True)
class FraStep:
    """自由簡約の1ステップ. スロット番号はテスト内の元の番号 (1始まり)"""

    kind: StepKind
    first: int
    second: Optional[int] = None
    witness: Optional[Word] = None


@dataclass(frozen=True)
class FraCertificate:
    steps: Tuple[FraStep, ...]


@dataclass(frozen=True)
class Test:
    """テスト

    Attributes
    ----------
    k: int
        文脈切替回数の上限. 文脈数は k + 1
    boundary: Tuple[State, ...]
        スロットの境界状態 (スロット数 + 1 個)
    context_ops: Tuple[FrozenSet[Operation], ...]
        文脈ごとの操作集合
    block_ops: Tuple[FrozenSet[Operation], ...]
        スロットごとの操作集合
    """

    __test__ = False

    k: int
    boundary: Tuple[State, ...]
    context_ops: Tuple[FrozenSet[Operation], ...]
    block_ops: Tuple[FrozenSet[Operation], ...]

    @property
    def contexts(self) -> int:
        return self.k + 1

    @property
    def size(self) -> int:
        return len(self.block_ops)

    def context_of(self, slot: int) -> int:
        """スロット slot (1始まり) が属する文脈の番号 (1始まり)"""

        return (slot - 1) // self.contexts + 1

    def slot_ops(self, slot: int) -> Tuple[FrozenSet[Operation], FrozenSet[Operation]]:
        return self.context_ops[self.context_of(slot) - 1], self.block_ops[slot - 1]


@dataclass
class NpResult:
    """NP 手続きの結果"""

    verdict: Verdict
    test: Optional[Test] = None
    certificate: Optional[FraCertificate] = None
    witness: Optional[RunWitness] = None
    tests_evaluated: int = 0


def _alphabets_independent(g: StorageGraph, first: Iterable[Operation],
                           second: Iterable[Operation]) -> bool:
    second = list(second)
    return all(g.adjacent(a.symbol, b.symbol) for a in first for b in second)


def fra_step_applicable(sequence: Sequence[Tuple[int, Nfa]], step: FraStep) -> bool:
    """スロット列 (番号と NFA の組の列) に step が適用できるか

    Raises
    ------
    NonAdjacentError
        対象のスロットが列にない, または隣接していない時
    """

    positions = {slot: i for i, (slot, _) in enumerate(sequence)}
    automata = dict(sequence)
    if step.first not in positions:
        raise NonAdjacentError(f'slot {step.first} is not in the sequence')
    if step.kind is StepKind.FRA3:
        return accepts_epsilon(automata[step.first])

    if step.second not in positions or positions[step.second] != positions[step.first] + 1:
        raise NonAdjacentError(
            f'slot {step.second} does not follow slot {step.first}')
    left, right = automata[step.first], automata[step.second]
    if step.kind is StepKind.FRA1:
        return product_nonempty(right, syninv_nfa(left))
    return _alphabets_independent(left.graph, left.alphabet, right.alphabet)


def apply_step(sequence: Sequence[Tuple[int, Nfa]],
               step: FraStep) -> List[Tuple[int, Nfa]]:
    """適用可能と分かっている step を適用した列"""

    items = list(sequence)
    position = next(i for i, (slot, _) in enumerate(items) if slot == step.first)
    if step.kind is StepKind.FRA3:
        del items[position]
    elif step.kind is StepKind.FRA1:
        del items[position:position + 2]
    else:
        items[position], items[position + 1] = items[position + 1], items[position]
    return items


def maximal_dependent_sets(g: StorageGraph,
                           ops: Iterable[Operation]) -> List[FrozenSet[Operation]]:
    """ops の極大な従属部分集合を決まった順序で返す"""

    ops = frozenset(ops)
    if not ops:
        return [frozenset()]
    symbols = sorted({op.symbol for op in ops}, key=g.index)
    dependence = nx.Graph()
    dependence.add_nodes_from(symbols)
    dependence.add_edges_from((a, b) for a, b in combinations(symbols, 2)
                              if not g.adjacent(a, b))
    cliques = [frozenset(op for op in ops if op.symbol in clique)
               for clique in nx.find_cliques(dependence)]
    return sorted(cliques, key=lambda s: _ops_key(g, s))


def _ops_key(g: StorageGraph, ops: Iterable[Operation]) -> Tuple:
    return tuple(sorted((g.index(op.symbol), op.polarity.value) for op in ops))


SlotKey = Tuple[State, State, FrozenSet[Operation], FrozenSet[Operation]]


class _AutomatonCache:
    """スロットの NFA と FRA 判定の結果を保持する"""

    def __init__(self, system: ValenceSystem) -> None:
        self.system = system
        self.graph = system.graph
        self._saturated: Dict[FrozenSet[Operation], SaturatedSystem] = {}
        self._blocks: Dict[Tuple[FrozenSet[Operation], FrozenSet[Operation]], Nfa] = {}
        self._useful: Dict[SlotKey, FrozenSet[Operation]] = {}
        self._epsilon: Dict[SlotKey, bool] = {}
        self._cancel: Dict[Tuple[SlotKey, SlotKey], Optional[Word]] = {}

    def saturated(self, ops_con: FrozenSet[Operation]) -> SaturatedSystem:
        if ops_con not in self._saturated:
            self._saturated[ops_con] = saturate(restrict(self.system, ops_con))
        return self._saturated[ops_con]

    def labels(self, ops_con: FrozenSet[Operation]) -> FrozenSet[Operation]:
        return self.saturated(ops_con).system.operations()

    def automaton(self, key: SlotKey) -> Nfa:
        source, target, ops_con, block = key
        base = self._blocks.get((ops_con, block))
        if base is None:
            base = to_nfa(restrict(self.saturated(ops_con).system, block), source, target)
            self._blocks[(ops_con, block)] = base
        return base.with_endpoints(source, target)

    def useful(self, key: SlotKey) -> FrozenSet[Operation]:
        if key not in self._useful:
            self._useful[key] = useful_alphabet(self.automaton(key))
        return self._useful[key]

    def accepts_epsilon(self, key: SlotKey) -> bool:
        if key not in self._epsilon:
            self._epsilon[key] = accepts_epsilon(self.automaton(key))
        return self._epsilon[key]

    def cancellation(self, left: SlotKey, right: SlotKey) -> Optional[Word]:
        """left の直後の right に FRA1 が使える時, right 側の語を返す"""

        pair = (left, right)
        if pair not in self._cancel:
            self._cancel[pair] = product_witness(self.automaton(right),
                                                 syninv_nfa(self.automaton(left)))
        return self._cancel[pair]

    def independent(self, first: SlotKey, second: SlotKey) -> bool:
        return _alphabets_independent(self.graph, self.automaton(first).alphabet,
                                      self.automaton(second).alphabet)


class _CachedSlots:
    """ソルバのキャッシュ越しに見たスロット"""

    def __init__(self, keys: Dict[int, SlotKey], cache: _AutomatonCache) -> None:
        self.keys = keys
        self.cache = cache

    def empty_block(self, slot: int) -> bool:
        return not self.keys[slot][3]

    def accepts_epsilon(self, slot: int) -> bool:
        return self.cache.accepts_epsilon(self.keys[slot])

    def cancellation(self, left: int, right: int) -> Optional[Word]:
        return self.cache.cancellation(self.keys[left], self.keys[right])

    def independent(self, first: int, second: int) -> bool:
        return self.cache.independent(self.keys[first], self.keys[second])


class _AutomatonSlots:
    """スロット1からの順に与えた NFA 列"""

    def __init__(self, automata: Sequence[Nfa]) -> None:
        self.automata = dict(enumerate(automata, 1))
        self._cancel: Dict[Tuple[int, int], Optional[Word]] = {}

    def empty_block(self, slot: int) -> bool:
        return not self.automata[slot].alphabet

    def accepts_epsilon(self, slot: int) -> bool:
        return accepts_epsilon(self.automata[slot])

    def cancellation(self, left: int, right: int) -> Optional[Word]:
        if (left, right) not in self._cancel:
            self._cancel[left, right] = product_witness(self.automata[right],
                                                        syninv_nfa(self.automata[left]))
        return self._cancel[left, right]

    def independent(self, first: int, second: int) -> bool:
        a, b = self.automata[first], self.automata[second]
        return _alphabets_independent(a.graph, a.alphabet, b.alphabet)


Slots = Union[_CachedSlots, _AutomatonSlots]


@dataclass(frozen=True)
class _Move:
    kind: StepKind
    left: int
    right: Optional[int] = None
    witness: Optional[Word] = None

    @property
    def slots(self) -> FrozenSet[int]:
        if self.right is None:
            return frozenset((self.left,))
        return frozenset((self.left, self.right))


class _ReductionSearch:
    """残っているスロットの集合を状態とする自由簡約の探索

    依存するスロットの相対順序は交換で変わらないので,
    残りのスロットの集合だけで並びの交換同値類が決まる.
    """

    def __init__(self, order: Sequence[int], slots: Slots, limit: int) -> None:
        self.order = tuple(order)
        self.rank = {slot: i for i, slot in enumerate(self.order)}
        self.slots = slots
        self.limit = limit
        self.visited = set()
        self.dependent = {
            (a, b): not slots.independent(a, b)
            for a in self.order for b in self.order if a != b}

    def run(self) -> Optional[List[_Move]]:
        return self._solve(frozenset(self.order))

    def _has_partners(self, remaining: FrozenSet[int]) -> bool:
        for a in remaining:
            if self.slots.accepts_epsilon(a):
                continue
            if not any(self.slots.cancellation(a, b) is not None
                       or self.slots.cancellation(b, a) is not None
                       for b in remaining if b != a):
                return False
        return True

    def _moves(self, remaining: FrozenSet[int]) -> Iterator[_Move]:
        ordered = sorted(remaining, key=self.rank.__getitem__)
        for i, a in enumerate(ordered):
            chain: List[int] = []
            for b in ordered[i + 1:]:
                blocked = any(self.dependent[c, b] for c in chain)
                if not blocked:
                    witness = self.slots.cancellation(a, b)
                    if witness is not None:
                        yield _Move(StepKind.FRA1, a, b, witness)
                    if not self.dependent[a, b]:
                        witness = self.slots.cancellation(b, a)
                        if witness is not None:
                            yield _Move(StepKind.FRA1, b, a, witness)
                if blocked or self.dependent[a, b]:
                    chain.append(b)
        for a in ordered:
            if self.slots.accepts_epsilon(a):
                yield _Move(StepKind.FRA3, a)

    def _solve(self, remaining: FrozenSet[int]) -> Optional[List[_Move]]:
        if not remaining:
            return []
        if remaining in self.visited:
            return None
        self.visited.add(remaining)
        if len(self.visited) > self.limit:
            raise BudgetExceededError(
                f'free reduction search visited more than {self.limit} states')
        if not self._has_partners(remaining):
            return None
        for move in self._moves(remaining):
            found = self._solve(remaining - move.slots)
            if found is not None:
                return [move] + found
        return None


def _make_adjacent(current: List[int], left: int, right: int,
                   dependent: Dict[Tuple[int, int], bool]
                   ) -> Tuple[List[Tuple[int, int]], List[int]]:
    """left の直後に right が来るまで隣接交換する. 交換の列と新しい並びを返す"""

    lo, hi = sorted((current.index(left), current.index(right)))
    earlier = current[lo]
    chain: List[int] = []
    for c in current[lo + 1:hi]:
        if dependent[earlier, c] or any(dependent[d, c] for d in chain):
            chain.append(c)
    before = [c for c in current[lo + 1:hi] if c not in chain]
    target = current[:lo] + before + [left, right] + chain + current[hi + 1:]
    rank = {slot: i for i, slot in enumerate(target)}

    swaps: List[Tuple[int, int]] = []
    arranged = list(current)
    changed = True
    while changed:
        changed = False
        for p in range(lo, hi):
            x, y = arranged[p], arranged[p + 1]
            if rank[x] > rank[y]:
                swaps.append((x, y))
                arranged[p], arranged[p + 1] = y, x
                changed = True
    return swaps, arranged


def _to_steps(order: Sequence[int], moves: Sequence[_Move],
              dependent: Dict[Tuple[int, int], bool]) -> List[FraStep]:
    steps: List[FraStep] = []
    current = list(order)
    for move in moves:
        if move.kind is StepKind.FRA3:
            steps.append(FraStep(StepKind.FRA3, move.left))
            current.remove(move.left)
            continue
        swaps, current = _make_adjacent(current, move.left, move.right, dependent)
        steps.extend(FraStep(StepKind.FRA2, x, y) for x, y in swaps)
        steps.append(FraStep(StepKind.FRA1, move.left, move.right, move.witness))
        current.remove(move.left)
        current.remove(move.right)
    return steps


def _search(slots: Slots, numbers: Sequence[int], limit: int) -> Optional[List[FraStep]]:
    """FRA の証明書のステップ列を探す. 空ブロックで ε を受理するスロットは先に FRA3 で消す"""

    steps = [FraStep(StepKind.FRA3, slot) for slot in numbers
             if slots.empty_block(slot) and slots.accepts_epsilon(slot)]
    removed = {step.first for step in steps}
    order = [slot for slot in numbers if slot not in removed]
    search = _ReductionSearch(order, slots, limit)
    moves = search.run()
    if moves is None:
        return None
    return steps + _to_steps(order, moves, search.dependent)


def search_fra(test: Test, automata: Sequence[Nfa],
               budget: Optional[Budget] = None) -> Optional[FraCertificate]:
    """テストのスロットの NFA 列に対して FRA による完全な簡約を探す

    Parameters
    ----------
    test: Test
        テスト
    automata: Sequence[Nfa]
        スロット1からの順の NFA

    Returns
    -------
    Optional[FraCertificate]
        簡約できなければ None

    Raises
    ------
    BudgetExceededError
        探索状態が budget.fra_memo を超えた時
    """

    budget = budget or DEFAULT_BUDGET
    if len(automata) != test.size:
        raise ValueError(f'expected {test.size} automata, got {len(automata)}')
    steps = _search(_AutomatonSlots(automata), range(1, test.size + 1), budget.fra_memo)
    return None if steps is None else FraCertificate(tuple(steps))


@dataclass
class _Group:
    ops_con: FrozenSet[Operation]
    keys: List[SlotKey] = field(default_factory=list)
    transit: bool = False


class NpSolver:
    """テストを1スロットずつ推測し, 完成したテストごとに自由簡約を探す

    文脈の操作集合は Op(A) の極大な従属部分集合から選び,
    ブロックの操作集合は NFA の有用なラベルの集合と一致するものだけを使う.
    実スロットの数について反復深化するので, 見つかる証明書は最小のスロット数のもの.
    """

    def __init__(self, system: ValenceSystem, budget: Optional[Budget] = None) -> None:
        self.system = system
        self.graph = system.graph
        self.budget = budget or DEFAULT_BUDGET
        self.cache = _AutomatonCache(system)
        self.alphabets = maximal_dependent_sets(self.graph, system.operations())
        self._options: Dict[Tuple[State, FrozenSet[Operation]], List[SlotKey]] = {}
        self._transits: Dict[Tuple[State, FrozenSet[Operation]], List[SlotKey]] = {}
        self._state_rank = {q: i for i, q in enumerate(system.states)}
        self.tests_evaluated = 0
        self._q_init: Optional[State] = None
        self._finishing: FrozenSet[State] = frozenset()
        self._level = 0
        self._cut = False

    def slot_options(self, state: State, ops_con: FrozenSet[Operation]) -> List[SlotKey]:
        """state から始まる実スロットの候補"""

        key = (state, ops_con)
        if key not in self._options:
            labels = sorted(self.cache.labels(ops_con),
                            key=lambda op: (self.graph.index(op.symbol), op.polarity.value))
            options = []
            for size in range(1, len(labels) + 1):
                for block in combinations(labels, size):
                    block = frozenset(block)
                    loop_nfa = self.cache.automaton((state, state, ops_con, block))
                    for target in sorted(loop_nfa.forward_states(),
                                         key=self._state_rank.__getitem__):
                        slot = (state, target, ops_con, block)
                        if self.cache.useful(slot) == block:
                            options.append(slot)
            self._options[key] = options
        return self._options[key]

    def transit_options(self, state: State, ops_con: FrozenSet[Operation]) -> List[SlotKey]:
        """空語だけを読んで state から移るスロットの候補"""

        key = (state, ops_con)
        if key not in self._transits:
            loop_nfa = self.cache.automaton((state, state, ops_con, frozenset()))
            targets = sorted(loop_nfa.epsilon_closure([state]) - {state},
                             key=self._state_rank.__getitem__)
            self._transits[key] = [(state, target, ops_con, frozenset())
                                   for target in targets]
        return self._transits[key]

    def solve(self, q_init: State, q_fin: State, k: int) -> NpResult:
        """BCSREACH(A, q_init, q_fin, k) を判定する"""

        if k < 0:
            raise ValueError(f'k must be non-negative, got {k}')
        self.system.check_state(q_init)
        self.system.check_state(q_fin)
        self.tests_evaluated = 0
        self._q_init = q_init
        self._finishing = reachable_states(self.system, [q_fin], reverse=True)
        kappa = k + 1

        try:
            for level in range(kappa * kappa + 1):
                self._level = level
                self._cut = False
                found = self._extend(q_init, q_fin, k, [], 0)
                log.info(f'[NP] level {level}: {self.tests_evaluated} tests evaluated')
                if found is not None:
                    test, certificate, witness = found
                    return NpResult(Verdict.YES, test, certificate, witness,
                                    self.tests_evaluated)
                if not self._cut:
                    break
        except BudgetExceededError as ex:
            log.warning(f'[NP] {ex}')
            return NpResult(Verdict.INCONCLUSIVE, tests_evaluated=self.tests_evaluated)
        return NpResult(Verdict.NO, tests_evaluated=self.tests_evaluated)

    def _extend(self, state: State, q_fin: State, k: int, groups: List[_Group],
                real: int):
        kappa = k + 1
        if state == q_fin and real == self._level:
            found = self._evaluate(groups, q_fin, k)
            if found is not None:
                return found

        current = groups[-1] if groups else None
        moves: List[Tuple[bool, SlotKey, bool]] = []
        if current is not None and not current.transit and len(current.keys) < kappa:
            moves.extend((False, slot, False)
                         for slot in self.slot_options(state, current.ops_con))
        if len(groups) < kappa:
            for ops_con in self.alphabets:
                reopen = (current is not None and not current.transit
                          and ops_con == current.ops_con and len(current.keys) < kappa)
                if not reopen:
                    moves.extend((True, slot, False)
                                 for slot in self.slot_options(state, ops_con))
                moves.extend((True, slot, True)
                             for slot in self.transit_options(state, ops_con))

        for opens, slot, transit in moves:
            if slot[1] not in self._finishing:
                continue
            if not transit and real == self._level:
                self._cut = True
                continue
            if opens:
                groups.append(_Group(slot[2], [slot], transit))
            else:
                current.keys.append(slot)
            found = self._extend(slot[1], q_fin, k, groups,
                                 real if transit else real + 1)
            if opens:
                groups.pop()
            else:
                current.keys.pop()
            if found is not None:
                return found
        return None

    def _evaluate(self, groups: List[_Group], q_fin: State, k: int):
        self.tests_evaluated += 1
        if self.tests_evaluated > self.budget.max_tests:
            raise BudgetExceededError(
                f'more than {self.budget.max_tests} tests evaluated')

        test, keys = _assemble(groups, self._q_init, k)
        steps = _search(_CachedSlots(keys, self.cache), sorted(keys), self.budget.fra_memo)
        if steps is None:
            return None
        certificate = FraCertificate(tuple(steps))
        witness = extract_witness(self.system, test, certificate, self.cache)
        log.info(f'[NP] found a certificate with {len(steps)} steps '
                 f'over {sum(len(g.keys) for g in groups)} slots')
        return test, certificate, witness


def _assemble(groups: Sequence[_Group], q_init: State,
              k: int) -> Tuple[Test, Dict[int, SlotKey]]:
    """グループ列を κ 個の文脈に並べ, 足りないスロットを (q, q, ∅) で埋める"""

    kappa = k + 1
    boundary = [q_init]
    context_ops = []
    block_ops = []
    keys: Dict[int, SlotKey] = {}
    for index in range(kappa):
        group = groups[index] if index < len(groups) else _Group(frozenset())
        context_ops.append(group.ops_con)
        for position in range(kappa):
            if position < len(group.keys):
                key = group.keys[position]
            else:
                key = (boundary[-1], boundary[-1], group.ops_con, frozenset())
            keys[len(block_ops) + 1] = key
            block_ops.append(key[3])
            boundary.append(key[1])
    return Test(k, tuple(boundary), tuple(context_ops), tuple(block_ops)), keys


def _slot_words(test: Test, certificate: FraCertificate) -> Dict[int, Word]:
    words: Dict[int, Word] = {slot: monoid.EPSILON for slot in range(1, test.size + 1)}
    for step in certificate.steps:
        if step.kind is StepKind.FRA1 and step.witness is not None:
            words[step.second] = tuple(step.witness)
            words[step.first] = tuple(op.inverse() for op in reversed(step.witness))
    return words


def extract_witness(system: ValenceSystem, test: Test, certificate: FraCertificate,
                    cache: Optional[_AutomatonCache] = None) -> RunWitness:
    """証明書の FRA1 の語からスロットごとの語を復元し, 元の系の実行を組み立てる

    Raises
    ------
    ValueError
        スロットの語を受理する経路がない時
    """

    cache = cache or _AutomatonCache(system)
    words = _slot_words(test, certificate)
    transitions: List[Transition] = []
    for slot in range(1, test.size + 1):
        ops_con, block = test.slot_ops(slot)
        key = (test.boundary[slot - 1], test.boundary[slot], ops_con, block)
        path = accepting_path(cache.automaton(key), words[slot])
        if path is None:
            raise ValueError(f'slot {slot} does not accept {monoid.format_word(words[slot])}')
        transitions.extend(cache.saturated(ops_con).expand(path))
    replay(system, test.boundary[0], transitions)
    return make_witness(system, transitions)


def solve_np(system: ValenceSystem, q_init: State, q_fin: State, k: int,
             budget: Optional[Budget] = None) -> NpResult:
    """BCSREACH を NP 手続きで判定する"""

    return NpSolver(system, budget).solve(q_init, q_fin, k)


def verify_certificate(system: ValenceSystem, q_init: State, q_fin: State, k: int,
                       test: Test, certificate: FraCertificate) -> bool:
    """ソルバのキャッシュを使わずにテストの NFA を作り直して証明書を検査する"""

    g = system.graph
    kappa = k + 1
    n = kappa * kappa
    if test.k != k or len(test.context_ops) != kappa or len(test.block_ops) != n:
        return False
    if len(test.boundary) != n + 1:
        return False
    if test.boundary[0] != q_init or test.boundary[-1] != q_fin:
        return False
    if not all(system.has_state(q) for q in test.boundary):
        return False
    operations = system.operations()
    for ops_con in test.context_ops:
        if not ops_con <= operations or not monoid.is_dependent(g, ops_con):
            return False
    for slot in range(1, n + 1):
        ops_con, block = test.slot_ops(slot)
        if not block <= ops_con:
            return False

    saturated: Dict[FrozenSet[Operation], ValenceSystem] = {}
    sequence = []
    for slot in range(1, n + 1):
        ops_con, block = test.slot_ops(slot)
        if ops_con not in saturated:
            saturated[ops_con] = saturate(restrict(system, ops_con)).system
        automaton = to_nfa(restrict(saturated[ops_con], block),
                           test.boundary[slot - 1], test.boundary[slot])
        sequence.append((slot, automaton))

    for step in certificate.steps:
        try:
            if not fra_step_applicable(sequence, step):
                return False
        except NonAdjacentError:
            return False
        if step.kind is StepKind.FRA1 and step.witness is not None:
            automata = dict(sequence)
            if not automata[step.second].accepts(step.witness):
                return False
            if not syninv_nfa(automata[step.first]).accepts(step.witness):
                return False
        sequence = apply_step(sequence, step)
    return not sequence


def _format_ops(g: StorageGraph, ops: Iterable[Operation]) -> str:
    ops = sorted(ops, key=lambda op: (g.index(op.symbol), op.polarity.value))
    return ' '.join(str(op) for op in ops) if ops else 'none'


def format_certificate(g: StorageGraph, test: Test, certificate: FraCertificate) -> str:
    """テストと証明書を `certificate { ... }` のテキストにする"""

    lines = ['certificate {', f'  k: {test.k}',
             '  boundary: ' + ' '.join(str(q) for q in test.boundary)]
    lines.extend(f'  context: {_format_ops(g, ops)}' for ops in test.context_ops)
    lines.extend(f'  block: {_format_ops(g, ops)}' for ops in test.block_ops)
    for step in certificate.steps:
        if step.kind is StepKind.FRA3:
            lines.append(f'  fra3: {step.first}')
        elif step.kind is StepKind.FRA2:
            lines.append(f'  fra2: {step.first} {step.second}')
        else:
            witness = '' if step.witness is None else ' ' + monoid.format_word(step.witness)
            lines.append(f'  fra1: {step.first} {step.second}{witness}')
    lines.append('}')
    return '\n'.join(lines)


def _parse_ops(text: str) -> FrozenSet[Operation]:
    if text.strip() == 'none':
        return frozenset()
    return frozenset(monoid.parse_word(text))


def parse_certificate(text: str) -> Tuple[Test, FraCertificate]:
    """format_certificate の出力を読む. 状態名は文字列のまま返す

    Raises
    ------
    CertificateSyntaxError
        形式が正しくない時
    """

    k = None
    boundary: Tuple[State, ...] = ()
    context_ops: List[FrozenSet[Operation]] = []
    block_ops: List[FrozenSet[Operation]] = []
    steps: List[FraStep] = []
    opened = closed = False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line == 'certificate {' and not opened:
            opened = True
            continue
        if line == '}' and opened and not closed:
            closed = True
            continue
        if not opened or closed or ':' not in line:
            raise CertificateSyntaxError(f'line {number}: unexpected {line!r}')

        key, value = (part.strip() for part in line.split(':', 1))
        try:
            if key == 'k':
                k = int(value)
            elif key == 'boundary':
                boundary = tuple(value.split())
            elif key == 'context':
                context_ops.append(_parse_ops(value))
            elif key == 'block':
                block_ops.append(_parse_ops(value))
            elif key in ('fra1', 'fra2', 'fra3'):
                steps.append(_parse_step(StepKind(key), value.split()))
            else:
                raise CertificateSyntaxError(f'line {number}: unknown key {key!r}')
        except (ValueError, monoid.WordSyntaxError) as ex:
            if isinstance(ex, CertificateSyntaxError):
                raise
            raise CertificateSyntaxError(f'line {number}: {ex}') from ex

    if not closed or k is None:
        raise CertificateSyntaxError('incomplete certificate block')
    test = Test(k, boundary, tuple(context_ops), tuple(block_ops))
    return test, FraCertificate(tuple(steps))


def _parse_step(kind: StepKind, tokens: List[str]) -> FraStep:
    if kind is StepKind.FRA3:
        if len(tokens) != 1:
            raise CertificateSyntaxError('fra3 takes one slot')
        return FraStep(kind, int(tokens[0]))
    if len(tokens) < 2 or (kind is StepKind.FRA2 and len(tokens) != 2):
        raise CertificateSyntaxError(f'{kind.value} takes two slots')
    witness = None
    if kind is StepKind.FRA1 and len(tokens) > 2:
        witness = monoid.parse_word(' '.join(tokens[2:]))
    return FraStep(kind, int(tokens[0]), int(tokens[1]), witness)
