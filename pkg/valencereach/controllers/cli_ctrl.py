"""コマンドライン制御

終了コード: 0 = 完了, 1 = 自己検査の不一致, 2 = 構文・使い方の誤り,
3 = 判定不能または探索上限, 4 = 多項式時間の手続きが使えないグラフ.
"""
import argparse
import dataclasses
import logging as log
import sys
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from valencereach.config import DEFAULT_BUDGET, Budget
from valencereach.controllers import selftest_ctrl
from valencereach.models import bcs, generators, monoid, nfa, polytime
from valencereach.models.instance import (Instance, InstanceSyntaxError,
                                          parse_instance, serialize_instance)
from valencereach.models.monoid import BudgetExceededError, Word
from valencereach.models.saturation import NotDependentError, saturate
from valencereach.models.system import (UnknownStateError, Verdict,
                                        brute_force_bcsreach, restrict)
from valencereach.views import report_view

EXIT_OK = 0
EXIT_DISAGREEMENT = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3
EXIT_UNSUPPORTED = 4

SOLVERS = ('np', 'poly', 'oracle', 'auto')


class UsageError(ValueError):
    """引数の組み合わせが正しくない時の例外"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='valencereach',
                     description='bounded context switching reachability for valence systems')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for progress, -vv for debug output')
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    solve = commands.add_parser('solve', help='decide reachability within k context switches')
    solve.add_argument('file')
    solve.add_argument('--k', type=int, help='context switch bound (overrides the file)')
    solve.add_argument('--solver', choices=SOLVERS, default='auto')
    solve.add_argument('--max-len', type=int, help='run length bound of the oracle')
    solve.add_argument('--budget', type=int, help='state and test bound of the searches')
    solve.add_argument('--counter-cap', type=int, help='largest counter bound of vertex elimination')
    solve.add_argument('--witness', action='store_true', help='print the run and the certificate')
    solve.add_argument('--json', action='store_true', help='print one JSON document')

    normalize = commands.add_parser('normalize', help='print the irreducible form of a word')
    normalize.add_argument('file')
    normalize.add_argument('--word', help='word such as "+a -b" (default: the words in the file)')

    cs = commands.add_parser('cs', help='print the number of context switches of a word')
    cs.add_argument('file')
    cs.add_argument('--word')

    saturate_cmd = commands.add_parser('saturate', help='saturate the system restricted to LIST')
    saturate_cmd.add_argument('file')
    saturate_cmd.add_argument('--ops', required=True, help='dependent operations such as "+a -a"')

    gen = commands.add_parser('gen', help='generate an instance file')
    gen.add_argument('kind', choices=sorted(generators.PRESETS) + ['random', 'sat'])
    gen.add_argument('sizes', nargs='*', type=int)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--vertices', type=int, default=generators.ORACLE_LIMITS.vertices)
    gen.add_argument('--states', type=int, default=generators.ORACLE_LIMITS.states)
    gen.add_argument('--transitions', type=int, default=generators.ORACLE_LIMITS.transitions)
    gen.add_argument('--max-k', type=int, default=generators.ORACLE_LIMITS.k)
    gen.add_argument('--dimacs', help='CNF file in DIMACS format')
    gen.add_argument('--clauses', help='clauses such as "1 2 -3; -1 2 3"')
    gen.add_argument('--vars', type=int, help='number of variables for --clauses')

    nfa_cmd = commands.add_parser('nfa', help='print the automaton of one test slot')
    nfa_cmd.add_argument('file')
    nfa_cmd.add_argument('--from', dest='source', help='initial state (default: the file)')
    nfa_cmd.add_argument('--to', dest='target', help='final state (default: the file)')
    nfa_cmd.add_argument('--ops', required=True, help='context operations')
    nfa_cmd.add_argument('--block', help='block operations (default: --ops)')

    selftest = commands.add_parser('selftest', help='compare the solvers with the oracles')
    selftest.add_argument('--suite', action='append', choices=selftest_ctrl.SUITES)
    selftest.add_argument('--count', type=int)
    selftest.add_argument('--seed', type=int, default=0)
    selftest.add_argument('--export', help='directory for CSV results')
    return parser


def configure_logging(verbosity: int) -> None:
    level = log.WARNING if verbosity <= 0 else log.INFO if verbosity == 1 else log.DEBUG
    log.basicConfig(level=level, format='%(levelname)s %(message)s', force=True)


def _load(path: str) -> Instance:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as ex:
        raise UsageError(f'cannot read {path}: {ex.strerror}') from ex
    return parse_instance(text)


def _require_system(instance: Instance) -> None:
    if instance.system is None:
        raise UsageError('the file has no system block')


def _words(instance: Instance, text: Optional[str]) -> List[Word]:
    if text is not None:
        word = monoid.parse_word(text)
        monoid.check_word(instance.graph, word)
        return [word]
    if not instance.words:
        raise UsageError('give --word or word: lines in the file')
    return list(instance.words)


def _ops(instance: Instance, text: str) -> frozenset:
    word = monoid.parse_word(text)
    monoid.check_word(instance.graph, word)
    return frozenset(word)


def _budget(args: argparse.Namespace) -> Budget:
    changes = {}
    if args.max_len is not None:
        changes['max_len'] = args.max_len
    if args.budget is not None:
        changes.update(search_states=args.budget, max_tests=args.budget,
                       fra_memo=args.budget, oracle_states=args.budget)
    if args.counter_cap is not None:
        changes['counter_cap'] = args.counter_cap
    return dataclasses.replace(DEFAULT_BUDGET, **changes)


def _solve_np(instance: Instance, k: int, budget: Budget) -> report_view.SolveReport:
    result = bcs.solve_np(instance.system, instance.initial, instance.final, k, budget)
    certificate = None
    if result.verdict is Verdict.YES:
        certificate = bcs.format_certificate(instance.graph, result.test, result.certificate)
    return report_view.SolveReport(result.verdict, 'np', k, result.witness, certificate,
                                   {'tests': result.tests_evaluated})


def _solve_poly(instance: Instance, k: int, budget: Budget) -> report_view.SolveReport:
    result = polytime.solve_poly(instance.system, instance.initial, instance.final, k, budget)
    return report_view.SolveReport(result.verdict, 'poly', k,
                                   stats={'eliminations': result.eliminations,
                                          'capped': result.capped})


def _solve_oracle(instance: Instance, k: int, budget: Budget) -> report_view.SolveReport:
    try:
        result = brute_force_bcsreach(instance.system, instance.initial, instance.final, k,
                                      max_len=budget.max_len, max_states=budget.search_states)
    except BudgetExceededError as ex:
        log.warning(f'[CLI] {ex}')
        return report_view.SolveReport(Verdict.INCONCLUSIVE, 'oracle', k)
    return report_view.SolveReport(result.verdict, 'oracle', k, result.witness,
                                   stats={'explored': result.explored,
                                          'truncated': result.truncated})


def cmd_solve(args: argparse.Namespace, out: TextIO) -> int:
    instance = _load(args.file)
    _require_system(instance)
    k = args.k if args.k is not None else instance.k
    if k is None:
        raise UsageError('give --k or a k: line in the file')
    if k < 0:
        raise UsageError(f'k must be non-negative, got {k}')
    budget = _budget(args)

    if args.solver == 'np':
        report = _solve_np(instance, k, budget)
    elif args.solver == 'oracle':
        report = _solve_oracle(instance, k, budget)
    elif args.solver == 'poly':
        report = _solve_poly(instance, k, budget)
    else:
        report = None
        if polytime.is_transitive_forest(instance.graph):
            report = _solve_poly(instance, k, budget)
            if report.answer is Verdict.INCONCLUSIVE:
                log.info('[CLI] capped poly run was inconclusive, asking np')
                report = None
        if report is None:
            report = _solve_np(instance, k, budget)
        report.solver = f'auto/{report.solver}'

    render = report_view.render_json if args.json else report_view.render_text
    out.write(render(report, show_witness=args.witness))
    return EXIT_INCONCLUSIVE if report.answer is Verdict.INCONCLUSIVE else EXIT_OK


def cmd_normalize(args: argparse.Namespace, out: TextIO) -> int:
    instance = _load(args.file)
    for word in _words(instance, args.word):
        out.write(monoid.format_word(monoid.reduce_to_irreducible(instance.graph, word)) + '\n')
    return EXIT_OK


def cmd_cs(args: argparse.Namespace, out: TextIO) -> int:
    instance = _load(args.file)
    for word in _words(instance, args.word):
        out.write(f'{monoid.context_switches(instance.graph, word)}\n')
    return EXIT_OK


def cmd_saturate(args: argparse.Namespace, out: TextIO) -> int:
    instance = _load(args.file)
    _require_system(instance)
    ops = _ops(instance, args.ops)
    saturated = saturate(restrict(instance.system, ops))
    for t in saturated.added:
        out.write(f'# added: {t}\n')
    result = Instance(instance.graph, saturated.system, instance.initial, instance.final,
                      instance.k)
    out.write(serialize_instance(result))
    return EXIT_OK


def _cnf(args: argparse.Namespace) -> generators.CnfFormula:
    if args.dimacs is not None:
        try:
            text = Path(args.dimacs).read_text(encoding='utf-8')
        except OSError as ex:
            raise UsageError(f'cannot read {args.dimacs}: {ex.strerror}') from ex
        return generators.parse_dimacs(text)
    if args.clauses is None or args.vars is None:
        raise UsageError('gen sat needs --dimacs FILE or --clauses TEXT --vars N')
    return generators.parse_clauses(args.clauses, args.vars)


def cmd_gen(args: argparse.Namespace, out: TextIO) -> int:
    if args.kind == 'sat':
        instance = generators.sat_to_c4(_cnf(args))
    elif args.kind == 'random':
        limits = generators.Limits(args.vertices, args.states, args.transitions, args.max_k)
        instance = generators.random_instance(args.seed, limits)
    else:
        instance = Instance(generators.preset(args.kind, *args.sizes))
    out.write(serialize_instance(instance))
    return EXIT_OK


def cmd_nfa(args: argparse.Namespace, out: TextIO) -> int:
    instance = _load(args.file)
    _require_system(instance)
    source = args.source if args.source is not None else instance.initial
    target = args.target if args.target is not None else instance.final
    ops_con = _ops(instance, args.ops)
    block = ops_con if args.block is None else _ops(instance, args.block)
    automaton = nfa.build_test_automaton(instance.system, source, target, ops_con, block)
    out.write(report_view.render_nfa(automaton) + '\n')
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace, out: TextIO) -> int:
    suites = tuple(args.suite) if args.suite else selftest_ctrl.SUITES
    summary, _ = selftest_ctrl.run_selftest(suites, args.count, args.seed, args.export)
    out.write(summary.to_string(index=False) + '\n')
    return EXIT_OK if summary['disagreements'].sum() == 0 else EXIT_DISAGREEMENT


COMMANDS = {
    'solve': cmd_solve,
    'normalize': cmd_normalize,
    'cs': cmd_cs,
    'saturate': cmd_saturate,
    'gen': cmd_gen,
    'nfa': cmd_nfa,
    'selftest': cmd_selftest,
}


def run_cli(argv: Sequence[str], out: Optional[TextIO] = None,
            err: Optional[TextIO] = None) -> int:
    """引数を解釈してサブコマンドを実行し, 終了コードを返す"""

    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as ex:
        err.write(f'error: {ex}\n')
        return EXIT_USAGE
    except SystemExit as ex:
        return EXIT_OK if ex.code is None else int(ex.code)
    configure_logging(args.verbose)

    try:
        return COMMANDS[args.command](args, out)
    except polytime.UnsupportedGraphError as ex:
        err.write(f'error: {ex}\n')
        return EXIT_UNSUPPORTED
    except BudgetExceededError as ex:
        out.write(f'{Verdict.INCONCLUSIVE.value}\n')
        err.write(f'error: {ex}\n')
        return EXIT_INCONCLUSIVE
    except InstanceSyntaxError as ex:
        err.write(f"{getattr(args, 'file', 'input')}: {ex}\n")
        return EXIT_USAGE
    except (UsageError, UnknownStateError, NotDependentError,
            monoid.InvalidSymbolError, monoid.WordSyntaxError, ValueError) as ex:
        err.write(f'error: {ex}\n')
        return EXIT_USAGE
