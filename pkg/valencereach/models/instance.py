"""インスタンスファイルの読み書き

    # コメント
    graph {
      vertices: a b c
      edges: a-b
      loops: a
    }
    system {
      states: q0 q1
      initial: q0
      final: q1
      trans: q0 +a q1
      trans: q1 eps q0
    }
    k: 2
    word: +a -a
"""
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Set, Tuple

from valencereach.models import monoid
from valencereach.models.monoid import StorageGraph, Word
from valencereach.models.system import State, Transition, ValenceSystem


class InstanceSyntaxError(ValueError):
    """インスタンスファイルが読めない時の例外

    Attributes
    ----------
    line: int
        行番号 (1始まり)
    column: int
        桁番号 (1始まり)
    """

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f'line {line}, column {column}: {message}')
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Instance:
    """ファイル1つ分の内容"""

    graph: StorageGraph
    system: Optional[ValenceSystem] = None
    initial: Optional[State] = None
    final: Optional[State] = None
    k: Optional[int] = None
    words: Tuple[Word, ...] = ()


_Token = Tuple[str, int, int]


def _segments(text: str) -> Iterator[_Token]:
    """コメントを除き, 波括弧を独立した断片として切り出す"""

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0]
        start = 0
        for i, char in enumerate(line):
            if char in '{}':
                yield from _strip(line[start:i], number, start + 1)
                yield char, number, i + 1
                start = i + 1
        yield from _strip(line[start:], number, start + 1)


def _strip(text: str, line: int, column: int) -> Iterator[_Token]:
    stripped = text.strip()
    if stripped:
        yield stripped, line, column + len(text) - len(text.lstrip())


def _words(value: str, line: int, column: int) -> Iterator[_Token]:
    offset = 0
    for word in value.split():
        offset = value.index(word, offset)
        yield word, line, column + offset
        offset += len(word)


class _Parser:
    def __init__(self) -> None:
        self.graph: Optional[StorageGraph] = None
        self.system: Optional[ValenceSystem] = None
        self.initial: Optional[State] = None
        self.final: Optional[State] = None
        self.k: Optional[int] = None
        self.words: List[Word] = []
        self.block: Optional[str] = None
        self.seen_keys: Set[str] = set()
        self._reset_block()

    def _reset_block(self) -> None:
        self.vertices: List[_Token] = []
        self.edges: List[Tuple[str, str, int, int]] = []
        self.loops: List[_Token] = []
        self.states: List[_Token] = []
        self.endpoints: Dict[str, _Token] = {}
        self.transitions: List[Tuple[_Token, _Token, _Token]] = []
        self.block_keys: Set[str] = set()

    def parse(self, text: str) -> Instance:
        pending: Optional[_Token] = None
        for token in _segments(text):
            body, line, column = token
            if body == '{':
                if pending is None:
                    raise InstanceSyntaxError("unexpected '{'", line, column)
                self.block = pending[0]
                pending = None
                continue
            if pending is not None:
                raise InstanceSyntaxError(f"expected '{{' after {pending[0]}", line, column)
            if body == '}':
                if self.block is None:
                    raise InstanceSyntaxError("unexpected '}'", line, column)
                self._close(line, column)
                continue
            if self.block is None and body in ('graph', 'system'):
                self._open(body, line, column)
                pending = token
                continue
            self._entry(body, line, column)

        if pending is not None or self.block is not None:
            raise InstanceSyntaxError('unterminated block', *(pending or (None, 1, 1))[1:])
        if self.graph is None:
            raise InstanceSyntaxError('missing graph block', 1, 1)
        return Instance(self.graph, self.system, self.initial, self.final,
                        self.k, tuple(self.words))

    def _open(self, name: str, line: int, column: int) -> None:
        if name in self.seen_keys:
            raise InstanceSyntaxError(f'duplicate {name} block', line, column)
        if name == 'system' and self.graph is None:
            raise InstanceSyntaxError('graph block must precede system block', line, column)
        self.seen_keys.add(name)

    def _entry(self, body: str, line: int, column: int) -> None:
        if ':' not in body:
            raise InstanceSyntaxError(f'expected key: value, got {body!r}', line, column)
        key, value = body.split(':', 1)
        key = key.strip()
        value_column = column + body.index(':') + 1
        tokens = list(_words(value, line, value_column))

        if self.block is None:
            self._top_level(key, value, tokens, line, column)
        elif self.block == 'graph':
            self._graph_entry(key, tokens, line, column)
        else:
            self._system_entry(key, tokens, line, column)

    def _once(self, keys: Set[str], key: str, line: int, column: int) -> None:
        if key in keys:
            raise InstanceSyntaxError(f'duplicate {key} declaration', line, column)
        keys.add(key)

    def _top_level(self, key: str, value: str, tokens: List[_Token],
                   line: int, column: int) -> None:
        if key == 'k':
            self._once(self.seen_keys, key, line, column)
            if len(tokens) != 1 or not tokens[0][0].isdigit():
                raise InstanceSyntaxError('k must be a non-negative integer', line, column)
            self.k = int(tokens[0][0])
        elif key == 'word':
            if self.graph is None:
                raise InstanceSyntaxError('words need a preceding graph block', line, column)
            word = []
            for body, token_line, token_column in tokens:
                if body == monoid.EPSILON_LITERAL:
                    continue
                word.append(self._operation(body, token_line, token_column))
            self.words.append(tuple(word))
        else:
            raise InstanceSyntaxError(f'unknown key {key!r}', line, column)

    def _operation(self, body: str, line: int, column: int) -> monoid.Operation:
        try:
            op = monoid.parse_operation(body)
        except monoid.WordSyntaxError as ex:
            raise InstanceSyntaxError(str(ex), line, column) from ex
        if op.symbol not in self.graph:
            raise InstanceSyntaxError(f'unknown symbol {op.symbol!r}', line, column)
        return op

    def _graph_entry(self, key: str, tokens: List[_Token], line: int, column: int) -> None:
        if key not in ('vertices', 'edges', 'loops'):
            raise InstanceSyntaxError(f'unknown graph key {key!r}', line, column)
        self._once(self.block_keys, key, line, column)
        if key == 'vertices':
            self.vertices = tokens
        elif key == 'loops':
            self.loops = tokens
        else:
            for body, token_line, token_column in tokens:
                parts = body.split('-')
                if len(parts) != 2 or not all(parts):
                    raise InstanceSyntaxError(f'invalid edge {body!r}', token_line, token_column)
                self.edges.append((parts[0], parts[1], token_line, token_column))

    def _system_entry(self, key: str, tokens: List[_Token], line: int, column: int) -> None:
        if key == 'trans':
            if len(tokens) != 3:
                raise InstanceSyntaxError('trans takes source, label and target', line, column)
            self.transitions.append((tokens[0], tokens[1], tokens[2]))
            return
        if key not in ('states', 'initial', 'final'):
            raise InstanceSyntaxError(f'unknown system key {key!r}', line, column)
        self._once(self.block_keys, key, line, column)
        if key == 'states':
            self.states = tokens
        else:
            if len(tokens) != 1:
                raise InstanceSyntaxError(f'{key} takes one state', line, column)
            self.endpoints[key] = tokens[0]

    def _close(self, line: int, column: int) -> None:
        if self.block == 'graph':
            self.graph = self._build_graph()
        else:
            self._build_system(line, column)
        self.block = None
        self._reset_block()

    def _build_graph(self) -> StorageGraph:
        names: Set[str] = set()
        for body, line, column in self.vertices:
            if body in names:
                raise InstanceSyntaxError(f'duplicate vertex {body!r}', line, column)
            names.add(body)

        pairs: Set[frozenset] = set()
        declared: Set[Tuple[str, str]] = set()
        for a, b, line, column in self.edges:
            for name in (a, b):
                if name not in names:
                    raise InstanceSyntaxError(f'unknown vertex {name!r}', line, column)
            if a == b:
                raise InstanceSyntaxError(f'self edge {a}-{b}: declare it under loops',
                                          line, column)
            if (a, b) in declared:
                raise InstanceSyntaxError(f'duplicate edge {a}-{b}', line, column)
            declared.add((a, b))
            pairs.add(frozenset((a, b)))

        loops: Set[str] = set()
        for body, line, column in self.loops:
            if body not in names:
                raise InstanceSyntaxError(f'unknown vertex {body!r}', line, column)
            if body in loops:
                raise InstanceSyntaxError(f'duplicate loop {body!r}', line, column)
            loops.add(body)

        vertices = [body for body, _, _ in self.vertices]
        edges = [(a, b) for a, b, _, _ in self.edges if frozenset((a, b)) in pairs]
        return StorageGraph(vertices, edges, [body for body, _, _ in self.loops])

    def _build_system(self, line: int, column: int) -> None:
        names: Set[str] = set()
        for body, token_line, token_column in self.states:
            if body in names:
                raise InstanceSyntaxError(f'duplicate state {body!r}', token_line, token_column)
            names.add(body)
        for key in ('initial', 'final'):
            if key not in self.endpoints:
                raise InstanceSyntaxError(f'missing {key} state', line, column)
            body, token_line, token_column = self.endpoints[key]
            if body not in names:
                raise InstanceSyntaxError(f'unknown state {body!r}', token_line, token_column)

        transitions: List[Transition] = []
        seen: Set[Transition] = set()
        for source, label, target in self.transitions:
            for body, token_line, token_column in (source, target):
                if body not in names:
                    raise InstanceSyntaxError(f'unknown state {body!r}', token_line, token_column)
            op = None
            if label[0] != monoid.EPSILON_LITERAL:
                op = self._operation(*label)
            transition = Transition(source[0], op, target[0])
            if transition in seen:
                raise InstanceSyntaxError(f'duplicate transition {transition}',
                                          source[1], source[2])
            seen.add(transition)
            transitions.append(transition)

        self.system = ValenceSystem(self.graph, [body for body, _, _ in self.states],
                                    transitions)
        self.initial = self.endpoints['initial'][0]
        self.final = self.endpoints['final'][0]


def parse_instance(text: str) -> Instance:
    """インスタンスファイルのテキストを読む

    Raises
    ------
    InstanceSyntaxError
        構文エラー, 未宣言の頂点・状態・記号の参照, 重複した宣言
    """

    return _Parser().parse(text)


def serialize_instance(instance: Instance) -> str:
    """parse_instance で読める正規形のテキストにする

    Raises
    ------
    ValueError
        状態名が文字列でない時. relabel_states で付け替えてから使う
    """

    g = instance.graph
    lines = ['graph {',
             _line('vertices', g.vertices),
             _line('edges', [f'{a}-{b}' for a, b in g.edges]),
             _line('loops', g.loops),
             '}']
    if instance.system is not None:
        system = instance.system
        for state in system.states:
            if not isinstance(state, str):
                raise ValueError(f'state {state!r} has no textual name')
        lines.extend(['system {',
                      _line('states', system.states),
                      f'  initial: {instance.initial}',
                      f'  final: {instance.final}'])
        lines.extend(f'  trans: {t}' for t in system.transitions)
        lines.append('}')
    if instance.k is not None:
        lines.append(f'k: {instance.k}')
    lines.extend(f'word: {monoid.format_word(word)}' for word in instance.words)
    return '\n'.join(lines) + '\n'


def _line(key: str, values) -> str:
    return f'  {key}: ' + ' '.join(values) if values else f'  {key}:'


def relabel_states(system: ValenceSystem, initial: State, final: State,
                   prefix: str = 's') -> Tuple[ValenceSystem, str, str]:
    """状態を宣言順に prefix0, prefix1, ... と付け替える"""

    names = {state: f'{prefix}{i}' for i, state in enumerate(system.states)}
    relabelled = ValenceSystem(
        system.graph, [names[q] for q in system.states],
        [Transition(names[t.source], t.label, names[t.target]) for t in system.transitions])
    return relabelled, names[initial], names[final]
