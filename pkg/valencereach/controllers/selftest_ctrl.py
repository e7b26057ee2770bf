"""オラクルとの突き合わせによる自己検査

各スイートは1行1ケースの DataFrame を返す. agree 列が False の行が不一致.
ソルバを比べるスイートは判定できなかった行を inconclusive 列に記録する.
"""
import logging as log
import time
from itertools import product
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from valencereach.config import DEFAULT_BUDGET, Budget
from valencereach.models import bcs, generators, monoid, polytime
from valencereach.models.export import Export
from valencereach.models.monoid import BudgetExceededError, StorageGraph, Word
from valencereach.models.system import Verdict, brute_force_bcsreach

WORD_GRAPHS: Dict[str, StorageGraph] = {
    'edgeless-2': StorageGraph(['a', 'b']),
    'looped-1': StorageGraph(['a'], loops=['a']),
    'complete-2': StorageGraph(['a', 'b'], [('a', 'b')]),
    'complete-looped-2': StorageGraph(['a', 'b'], [('a', 'b')], ['a', 'b']),
    'c4': StorageGraph(['a', 'b', 'c', 'd'], [('a', 'c'), ('a', 'd'), ('b', 'c'), ('b', 'd')]),
    'mixed-loop': StorageGraph(['a', 'b', 'c'], [('a', 'b')], ['b']),
}

SUITES = ('words', 'solvers', 'splitting', 'sat')


def _words(g: StorageGraph, length: int, samples: int,
           rng: np.random.Generator) -> Iterator[Word]:
    ops = g.operations
    total = sum(len(ops) ** n for n in range(length + 1))
    if total <= samples:
        for n in range(length + 1):
            yield from product(ops, repeat=n)
        return
    for _ in range(samples):
        n = int(rng.integers(0, length + 1))
        yield tuple(ops[i] for i in rng.integers(len(ops), size=n))


def word_problem_suite(length: int = 8, samples: int = 10 ** 4,
                       seed: int = 0) -> pd.DataFrame:
    """既約形による恒等判定と書き換えオラクルの比較

    語の総数が samples 以下なら全列挙, それ以外は samples 個を無作為に選ぶ.
    """

    rng = np.random.default_rng(seed)
    rows = []
    for name, g in WORD_GRAPHS.items():
        for word in _words(g, length, samples, rng):
            identity = monoid.is_identity(g, word)
            oracle = monoid.rewrite_oracle(g, word, max_length=length)
            rows.append({'graph': name, 'word': monoid.format_word(word),
                         'identity': identity, 'oracle': oracle,
                         'agree': identity == oracle})
    log.info(f'[SELFTEST] word problem: {len(rows)} words')
    return pd.DataFrame(rows)


def _verdict(result) -> str:
    return result.verdict.value


def compare_instance(instance, budget: Budget, max_len: int) -> Dict[str, object]:
    """1つのインスタンスを総当たり, NP 手続き, (使えれば) 多項式時間の手続きで解く"""

    system, q_init, q_fin, k = instance.system, instance.initial, instance.final, instance.k
    row: Dict[str, object] = {
        'vertices': len(instance.graph), 'states': len(system.states),
        'transitions': len(system.transitions), 'k': k,
    }
    try:
        oracle = brute_force_bcsreach(system, q_init, q_fin, k, max_len=max_len,
                                      max_states=budget.search_states).verdict
    except BudgetExceededError:
        oracle = Verdict.INCONCLUSIVE

    started = time.perf_counter()
    np_result = bcs.solve_np(system, q_init, q_fin, k, budget)
    row['np_seconds'] = round(time.perf_counter() - started, 6)
    certificate_ok: Optional[bool] = None
    if np_result.verdict is Verdict.YES:
        certificate_ok = bcs.verify_certificate(system, q_init, q_fin, k, np_result.test,
                                                np_result.certificate)
        witness = np_result.witness
        certificate_ok = (certificate_ok and witness.switches <= k
                          and monoid.is_identity(instance.graph, witness.word))

    poly: Optional[Verdict] = None
    if polytime.is_transitive_forest(instance.graph):
        poly = polytime.solve_poly(system, q_init, q_fin, k, budget).verdict

    undecided = Verdict.INCONCLUSIVE
    conclusive = oracle is not undecided and np_result.verdict is not undecided
    agree = not conclusive or oracle is np_result.verdict
    if poly not in (None, undecided) and np_result.verdict is not undecided:
        agree = agree and poly is np_result.verdict
    if certificate_ok is False:
        agree = False
    row.update({'oracle': oracle.value, 'np': np_result.verdict.value,
                'poly': None if poly is None else poly.value,
                'certificate_ok': certificate_ok, 'agree': agree,
                'inconclusive': not conclusive or poly is undecided})
    return row


def solver_suite(count: int = 500, seed: int = 0, max_len: int = 10,
                 budget: Optional[Budget] = None,
                 limits: generators.Limits = generators.ORACLE_LIMITS) -> pd.DataFrame:
    """乱数インスタンスでソルバ同士と総当たりを比べる"""

    budget = budget or DEFAULT_BUDGET
    rows = []
    for offset in range(count):
        instance = generators.random_instance(seed + offset, limits)
        row = {'seed': seed + offset}
        row.update(compare_instance(instance, budget, max_len))
        if not row['agree']:
            log.warning(f'[SELFTEST] disagreement on seed {seed + offset}: {row}')
        rows.append(row)
    log.info(f'[SELFTEST] solvers: {len(rows)} instances')
    return pd.DataFrame(rows)


def random_identity_word(g: StorageGraph, pairs: int,
                         rng: np.random.Generator) -> Word:
    """逆元の対を無作為な位置に挿入し, 独立な隣接対を無作為に交換した恒等元の語"""

    word: List[monoid.Operation] = []
    for _ in range(pairs):
        symbol = g.vertices[int(rng.integers(len(g)))]
        pair = [monoid.plus(symbol), monoid.minus(symbol)]
        if g.has_loop(symbol) and rng.random() < 0.5:
            pair.reverse()
        position = int(rng.integers(len(word) + 1))
        word[position:position] = pair
    for _ in range(4 * len(word)):
        if len(word) < 2:
            break
        i = int(rng.integers(len(word) - 1))
        a, b = word[i], word[i + 1]
        if a.symbol != b.symbol and g.adjacent(a.symbol, b.symbol):
            word[i], word[i + 1] = b, a
    return tuple(word)


def splitting_suite(count: int = 200, seed: int = 0,
                    max_length: int = 10) -> pd.DataFrame:
    """文脈が既約な恒等元の語の各文脈を (文脈数 - 1) 個以下のブロックに分けて
    自由簡約できるか. 文脈が既約でない語は捨てて引き直す"""

    rng = np.random.default_rng(seed)
    graphs = list(WORD_GRAPHS.items())
    rows = []
    attempts = 0
    while len(rows) < count and attempts < 100 * count:
        attempts += 1
        name, g = graphs[int(rng.integers(len(graphs)))]
        word = random_identity_word(g, int(rng.integers(1, max_length // 2 + 1)), rng)
        contexts = monoid.context_decomposition(g, word).contexts
        if any(monoid.reduce_to_irreducible(g, context) != context for context in contexts):
            continue
        blocks = monoid.find_block_splitting(g, word, max_length=max_length)
        rows.append({'graph': name, 'word': monoid.format_word(word),
                     'switches': monoid.context_switches(g, word),
                     'blocks': None if blocks is None else len(blocks),
                     'agree': blocks is not None})
    log.info(f'[SELFTEST] splitting: {len(rows)} words')
    return pd.DataFrame(rows)


def sat_suite(count: int = 20, seed: int = 0, max_variables: int = 3,
              max_clauses: int = 2, solver: str = 'np',
              budget: Optional[Budget] = None) -> pd.DataFrame:
    """3CNF から作った C4 上のインスタンスの答えと真理値表を比べる

    solver は 'np' か 'oracle'. 'oracle' は語長をインスタンスの語長に合わせた総当たり.
    """

    if solver not in ('np', 'oracle'):
        raise ValueError(f"solver must be 'np' or 'oracle', got {solver!r}")
    budget = budget or DEFAULT_BUDGET
    rng = np.random.default_rng(seed)
    rows = []
    for offset in range(count):
        n = int(rng.integers(1, max_variables + 1))
        m = int(rng.integers(1, max_clauses + 1))
        cnf = generators.random_cnf(seed + offset, n, m)
        instance = generators.sat_to_c4(cnf)
        expected = generators.is_satisfiable(cnf)
        if solver == 'np':
            verdict = bcs.solve_np(instance.system, instance.initial, instance.final,
                                   instance.k, budget).verdict
        else:
            length = 2 * m * (n + 1)
            verdict = brute_force_bcsreach(instance.system, instance.initial,
                                           instance.final, instance.k,
                                           max_len=2 * length).verdict
        undecided = verdict is Verdict.INCONCLUSIVE
        # 総当たりの INCONCLUSIVE だけは不一致に数えない
        agree = (undecided and solver == 'oracle') or (
            not undecided and (verdict is Verdict.YES) == expected)
        rows.append({'variables': n, 'clauses': m, 'formula': str(cnf.clauses),
                     'satisfiable': expected, 'answer': verdict.value,
                     'agree': agree, 'inconclusive': undecided})
    log.info(f'[SELFTEST] sat: {len(rows)} formulas')
    return pd.DataFrame(rows)


def summarize(results: Dict[str, pd.DataFrame],
              seconds: Optional[Dict[str, float]] = None) -> pd.DataFrame:
    """スイートごとのケース数, 不一致数, 判定できなかった数, 所要秒数"""

    seconds = seconds or {}

    rows = []
    for name, df in results.items():
        disagreements = int((~df['agree'].astype(bool)).sum()) if len(df) else 0
        inconclusive = int(df['inconclusive'].astype(bool).sum()) if 'inconclusive' in df else 0
        rows.append({'suite': name, 'cases': len(df), 'disagreements': disagreements,
                     'inconclusive': inconclusive, 'seconds': seconds.get(name)})
    return pd.DataFrame(rows, columns=['suite', 'cases', 'disagreements',
                                       'inconclusive', 'seconds'])


def run_selftest(suites: Tuple[str, ...] = SUITES, count: Optional[int] = None,
                 seed: int = 0, export_dir: Optional[str] = None,
                 budget: Optional[Budget] = None) -> Tuple[pd.DataFrame, Dict[str, pd.DataFrame]]:
    """指定したスイートを実行し, 要約と各スイートの結果を返す

    export_dir を与えると各スイートの結果を CSV に出力する.
    """

    results: Dict[str, pd.DataFrame] = {}
    seconds: Dict[str, float] = {}
    for name in suites:
        started = time.perf_counter()
        if name == 'words':
            results[name] = word_problem_suite(seed=seed)
        elif name == 'solvers':
            results[name] = solver_suite(500 if count is None else count, seed, budget=budget)
        elif name == 'splitting':
            results[name] = splitting_suite(200 if count is None else count, seed)
        elif name == 'sat':
            results[name] = sat_suite(20 if count is None else count, seed, budget=budget)
        else:
            raise ValueError(f'unknown suite {name!r}, expected one of {SUITES}')
        seconds[name] = round(time.perf_counter() - started, 3)
        log.info(f'[SELFTEST] {name}: {seconds[name]} s')

    if export_dir is not None:
        exporter = Export(export_dir)
        for name, df in results.items():
            exporter.filename = f'selftest_{name}'
            path = exporter.export_dataframe(df)
            log.info(f'[SELFTEST] exported {path}')
    return summarize(results, seconds), results
