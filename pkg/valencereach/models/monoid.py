"""グラフモノイドの語の計算"""
import enum
from collections import deque
from itertools import combinations, product
from typing import (FrozenSet, Iterable, Iterator, List, NamedTuple, Optional,
                    Sequence, Tuple, Union)

import numpy as np

from valencereach.config import DEFAULT_BUDGET


class InvalidSymbolError(ValueError):
    """グラフに存在しない記号が指定された時の例外"""


class BudgetExceededError(RuntimeError):
    """探索が上限を超えた時の例外"""


class UndefinedInverseError(ValueError):
    """構文的逆元が定義されない時の例外"""


class EmptyWordError(ValueError):
    """空語の文脈分解を求めた時の例外"""


class WordSyntaxError(ValueError):
    """語のリテラルが読めない時の例外"""


class Polarity(str, enum.Enum):
    """操作の極性"""

    POSITIVE = '+'
    NEGATIVE = '-'


class Operation(NamedTuple):
    """記号と極性の組"""

    symbol: str
    polarity: Polarity

    @property
    def positive(self) -> bool:
        return self.polarity is Polarity.POSITIVE

    def inverse(self) -> 'Operation':
        """極性を反転した操作を返す"""

        if self.positive:
            return Operation(self.symbol, Polarity.NEGATIVE)
        return Operation(self.symbol, Polarity.POSITIVE)

    def __str__(self) -> str:
        return self.polarity.value + self.symbol


Word = Tuple[Operation, ...]
EPSILON: Word = ()
EPSILON_LITERAL = 'eps'


def plus(symbol: str) -> Operation:
    return Operation(symbol, Polarity.POSITIVE)


def minus(symbol: str) -> Operation:
    return Operation(symbol, Polarity.NEGATIVE)


def parse_operation(token: str) -> Operation:
    """`+a` / `-a` 形式のトークンを操作に変換する

    Raises
    ------
    WordSyntaxError
        極性の記号がない, または記号名が空の時
    """

    if len(token) < 2 or token[0] not in '+-':
        raise WordSyntaxError(f'invalid operation literal {token!r}')
    return Operation(token[1:], Polarity(token[0]))


def parse_word(text: str) -> Word:
    """空白区切りの語リテラルを読む. `eps` は空語"""

    tokens = [token for token in text.split() if token != EPSILON_LITERAL]
    return tuple(parse_operation(token) for token in tokens)


def format_word(word: Sequence[Operation]) -> str:
    if not word:
        return EPSILON_LITERAL
    return ' '.join(str(op) for op in word)


class StorageGraph:
    """記憶グラフ

    独立関係を対称なブール行列で持つ. 対角成分が自己ループ.

    Attributes
    ----------
    vertices: Tuple[str, ...]
        頂点名 (宣言順)
    matrix: np.ndarray
        独立関係の隣接行列
    """

    def __init__(self, vertices: Sequence[str],
                 edges: Iterable[Tuple[str, str]] = (),
                 loops: Iterable[str] = ()) -> None:
        """初期化

        Parameters
        ----------
        vertices: Sequence[str]
            頂点名
        edges: Iterable[Tuple[str, str]]
            無向辺. 向きは区別しない
        loops: Iterable[str]
            自己ループを持つ頂点

        Raises
        ------
        ValueError
            頂点名が重複している, または辺が自己辺の時
        InvalidSymbolError
            辺やループが未宣言の頂点を参照している時
        """

        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError(f'duplicate vertex in {self.vertices}')
        self._index = {vertex: i for i, vertex in enumerate(self.vertices)}

        matrix = np.zeros((len(self.vertices), len(self.vertices)), dtype=bool)
        for a, b in edges:
            i, j = self.index(a), self.index(b)
            if i == j:
                raise ValueError(f'self edge {a}-{b} must be declared as a loop')
            matrix[i, j] = matrix[j, i] = True
        for a in loops:
            i = self.index(a)
            matrix[i, i] = True
        matrix.setflags(write=False)
        self.matrix = matrix

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StorageGraph):
            return NotImplemented
        return (self.vertices == other.vertices
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        return hash((self.vertices, self.matrix.tobytes()))

    def __repr__(self) -> str:
        return (f'StorageGraph(vertices={self.vertices}, '
                f'edges={self.edges}, loops={self.loops})')

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise InvalidSymbolError(f'unknown symbol {symbol!r}') from None

    def has_loop(self, symbol: str) -> bool:
        i = self.index(symbol)
        return bool(self.matrix[i, i])

    def adjacent(self, a: str, b: str) -> bool:
        """記号 a, b が独立関係にあるか"""

        return bool(self.matrix[self.index(a), self.index(b)])

    @property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        """自己ループを除く辺 (頂点の宣言順)"""

        rows, cols = np.nonzero(np.triu(self.matrix, k=1))
        return tuple((self.vertices[i], self.vertices[j])
                     for i, j in zip(rows, cols))

    @property
    def loops(self) -> Tuple[str, ...]:
        return tuple(self.vertices[i]
                     for i in np.flatnonzero(np.diag(self.matrix)))

    @property
    def operations(self) -> Tuple[Operation, ...]:
        """操作のアルファベット Op"""

        return tuple(op for vertex in self.vertices
                     for op in (plus(vertex), minus(vertex)))

    def induced(self, vertices: Iterable[str]) -> 'StorageGraph':
        """誘導部分グラフ. 頂点の順序は元のグラフに従う"""

        keep = set(vertices)
        for vertex in keep:
            self.index(vertex)
        kept = [v for v in self.vertices if v in keep]
        return StorageGraph(
            kept,
            [(a, b) for a, b in self.edges if a in keep and b in keep],
            [v for v in self.loops if v in keep])

    def without(self, vertex: str) -> 'StorageGraph':
        self.index(vertex)
        return self.induced(v for v in self.vertices if v != vertex)

    def without_loops(self) -> 'StorageGraph':
        return StorageGraph(self.vertices, self.edges)


def check_word(g: StorageGraph, word: Iterable[Operation]) -> None:
    for op in word:
        g.index(op.symbol)


def _symbol(item: Union[str, Operation]) -> str:
    return item.symbol if isinstance(item, Operation) else item


def independent(g: StorageGraph, a: Union[str, Operation], b: Union[str, Operation]) -> bool:
    """操作 (または記号) a, b が独立か. 極性は見ない.
    同じ記号なら自己ループの有無で決まる
    """

    return g.adjacent(_symbol(a), _symbol(b))


def is_dependent_set(g: StorageGraph, symbols: Iterable[str]) -> bool:
    """相異なる記号のどの組も独立でないか"""

    distinct = sorted(set(symbols), key=g.index)
    return not any(g.adjacent(a, b) for a, b in combinations(distinct, 2))


def is_dependent(g: StorageGraph, ops: Iterable[Operation]) -> bool:
    return is_dependent_set(g, (op.symbol for op in ops))


def cancels(g: StorageGraph, a: Operation, b: Operation) -> bool:
    """a の直後の b が R1 または R2 で消えるか"""

    if a.symbol != b.symbol or a.polarity == b.polarity:
        return False
    return a.positive or g.has_loop(a.symbol)


def _leftmost_pair(g: StorageGraph,
                   word: Sequence[Operation]) -> Optional[Tuple[int, int]]:
    for x, head in enumerate(word):
        for y in range(x + 1, len(word)):
            if cancels(g, head, word[y]):
                return x, y
            if not g.adjacent(head.symbol, word[y].symbol):
                break
    return None


def reduce_to_irreducible(g: StorageGraph, word: Sequence[Operation]) -> Word:
    """最も左の消去可能な対を繰り返し消して既約語を返す

    Parameters
    ----------
    g: StorageGraph
        記憶グラフ
    word: Sequence[Operation]
        語

    Returns
    -------
    Word
        既約語. 同じ語に対しては常に同じ結果になる

    Raises
    ------
    InvalidSymbolError
        語がグラフにない記号を含む時
    """

    check_word(g, word)
    current = list(word)
    while True:
        pair = _leftmost_pair(g, current)
        if pair is None:
            return tuple(current)
        x, y = pair
        del current[y]
        del current[x]


def extend_irreducible(g: StorageGraph, word: Word, op: Operation) -> Word:
    """既約語の末尾に操作を追加した既約語を返す"""

    for y in range(len(word) - 1, -1, -1):
        if cancels(g, word[y], op):
            return word[:y] + word[y + 1:]
        if not g.adjacent(word[y].symbol, op.symbol):
            break
    return word + (op,)


def is_identity(g: StorageGraph, word: Sequence[Operation]) -> bool:
    return not reduce_to_irreducible(g, word)


def is_right_invertible(g: StorageGraph, word: Sequence[Operation],
                        irreducible: bool = False) -> bool:
    """右逆元を持つか. 既約形に自己ループのない記号の負の操作がなければ真

    Parameters
    ----------
    irreducible: bool default=False
        word がすでに既約語であることが分かっている時は True
    """

    form = word if irreducible else reduce_to_irreducible(g, word)
    return all(op.positive or g.has_loop(op.symbol) for op in form)


def _rewrites(g: StorageGraph, word: Word) -> Iterator[Word]:
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if cancels(g, a, b):
            yield word[:i] + word[i + 2:]
        if a.symbol != b.symbol and g.adjacent(a.symbol, b.symbol):
            yield word[:i] + (b, a) + word[i + 2:]


def rewrite_oracle(g: StorageGraph, word: Sequence[Operation],
                   max_length: Optional[int] = None,
                   max_states: Optional[int] = None) -> bool:
    """R1, R2, R3 の書き換えを幅優先で試して空語に到達するか調べる

    Raises
    ------
    BudgetExceededError
        語長または訪問した語の数が上限を超えた時
    """

    max_length = DEFAULT_BUDGET.oracle_length if max_length is None else max_length
    max_states = DEFAULT_BUDGET.oracle_states if max_states is None else max_states
    check_word(g, word)
    if len(word) > max_length:
        raise BudgetExceededError(
            f'word of length {len(word)} exceeds oracle length {max_length}')

    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if not current:
            return True
        for rewritten in _rewrites(g, current):
            if rewritten in seen:
                continue
            seen.add(rewritten)
            if len(seen) > max_states:
                raise BudgetExceededError(
                    f'rewrite oracle visited more than {max_states} words')
            queue.append(rewritten)
    return False


def right_inverse_search(g: StorageGraph, word: Sequence[Operation],
                         max_len: int) -> Optional[bool]:
    """長さ max_len 以下の y で word.y ≅ 1 となるものを探す

    Returns
    -------
    Optional[bool]
        見つかれば True, 到達可能な既約形を調べ尽くせば False,
        上限で打ち切った時は None
    """

    start = reduce_to_irreducible(g, word)
    frontier = {start}
    seen = {start}
    for _ in range(max_len + 1):
        if EPSILON in frontier:
            return True
        following = set()
        for form in frontier:
            for op in g.operations:
                extended = extend_irreducible(g, form, op)
                if extended not in seen:
                    seen.add(extended)
                    following.add(extended)
        if not following:
            return False
        frontier = following
    return None


def syntactic_inverse_word(g: StorageGraph, word: Sequence[Operation]) -> Word:
    """語を反転して各操作の極性を反転する

    Raises
    ------
    UndefinedInverseError
        自己ループのない記号の負の操作を含む時
    """

    check_word(g, word)
    for op in word:
        if not op.positive and not g.has_loop(op.symbol):
            raise UndefinedInverseError(
                f'{op} on a symbol without self-loop has no syntactic inverse')
    return tuple(op.inverse() for op in reversed(word))


class ContextDecomposition(NamedTuple):
    """語の貪欲な文脈分解"""

    contexts: Tuple[Word, ...]

    @property
    def switches(self) -> int:
        return len(self.contexts) - 1


def advance_context(g: StorageGraph, symbols: FrozenSet[str], switches: int,
                    op: Operation) -> Tuple[FrozenSet[str], int]:
    """現在の文脈の記号集合と切替回数に操作を1つ加える

    空語の状態は (frozenset(), -1).
    """

    if symbols:
        fits = all(not g.adjacent(s, op.symbol)
                   for s in symbols if s != op.symbol)
        if fits:
            return symbols | {op.symbol}, switches
    return frozenset((op.symbol,)), switches + 1


def context_decomposition(g: StorageGraph,
                          word: Sequence[Operation]) -> ContextDecomposition:
    """語を左から貪欲に従属な文脈へ分割する

    Raises
    ------
    EmptyWordError
        空語の時
    """

    if not word:
        raise EmptyWordError('the empty word has no context decomposition')
    check_word(g, word)

    contexts: List[Word] = []
    symbols: FrozenSet[str] = frozenset()
    switches = -1
    current: List[Operation] = []
    for op in word:
        symbols, advanced = advance_context(g, symbols, switches, op)
        if advanced != switches and current:
            contexts.append(tuple(current))
            current = []
        switches = advanced
        current.append(op)
    contexts.append(tuple(current))
    return ContextDecomposition(tuple(contexts))


def context_switches(g: StorageGraph, word: Sequence[Operation]) -> int:
    """文脈切替回数. 空語は -1"""

    if not word:
        return -1
    return context_decomposition(g, word).switches


def words_independent(g: StorageGraph, u: Sequence[Operation],
                      v: Sequence[Operation]) -> bool:
    return all(g.adjacent(a.symbol, b.symbol) for a in u for b in v)


def _free_moves(g: StorageGraph,
                sequence: Tuple[Word, ...]) -> Iterator[Tuple[Word, ...]]:
    for i, word in enumerate(sequence):
        if is_identity(g, word):
            yield sequence[:i] + sequence[i + 1:]
    for i in range(len(sequence) - 1):
        left, right = sequence[i], sequence[i + 1]
        if is_identity(g, left + right):
            yield sequence[:i] + sequence[i + 2:]
        if words_independent(g, left, right):
            yield sequence[:i] + (right, left) + sequence[i + 2:]


def is_freely_reducible(g: StorageGraph, sequence: Sequence[Sequence[Operation]],
                        max_length: Optional[int] = None,
                        max_states: Optional[int] = None) -> bool:
    """FR1 (隣接対の消去), FR2 (独立な隣接対の交換) と
    恒等元の語1つの消去で空列にできるか

    Raises
    ------
    BudgetExceededError
        語長の合計または訪問した列の数が上限を超えた時
    """

    max_length = DEFAULT_BUDGET.oracle_length if max_length is None else max_length
    max_states = DEFAULT_BUDGET.oracle_states if max_states is None else max_states
    start = tuple(tuple(word) for word in sequence)
    for word in start:
        check_word(g, word)
    total = sum(len(word) for word in start)
    if total > max_length:
        raise BudgetExceededError(
            f'sequence of total length {total} exceeds oracle length {max_length}')

    seen = {start}
    stack = [start]
    while stack:
        current = stack.pop()
        if not current:
            return True
        for moved in _free_moves(g, current):
            if moved in seen:
                continue
            seen.add(moved)
            if len(seen) > max_states:
                raise BudgetExceededError(
                    f'free reduction visited more than {max_states} sequences')
            stack.append(moved)
    return False


def _splittings(word: Word, limit: int) -> Iterator[Tuple[Word, ...]]:
    n = len(word)
    for pieces in range(1, min(limit, n) + 1):
        for cuts in combinations(range(1, n), pieces - 1):
            bounds = (0,) + cuts + (n,)
            yield tuple(word[a:b] for a, b in zip(bounds, bounds[1:]))


def find_block_splitting(g: StorageGraph, word: Sequence[Operation],
                         max_length: Optional[int] = None
                         ) -> Optional[Tuple[Word, ...]]:
    """恒等元の語の各文脈を (文脈数 - 1) 個以下のブロックに分け,
    自由簡約可能になる分け方を探す

    Returns
    -------
    Optional[Tuple[Word, ...]]
        見つかったブロック列. なければ None
    """

    if not word:
        return ()
    contexts = context_decomposition(g, word).contexts
    limit = max(len(contexts) - 1, 1)
    options = [list(_splittings(context, limit)) for context in contexts]
    for choice in product(*options):
        blocks = tuple(block for split in choice for block in split)
        if is_freely_reducible(g, blocks, max_length=max_length):
            return blocks
    return None
