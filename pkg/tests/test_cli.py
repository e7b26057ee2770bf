import io
import json

import pytest
from conftest import SAMPLE

from valencereach.controllers import cli_ctrl
from valencereach.models.instance import parse_instance

STACK = """\
graph {
  vertices: a
}
system {
  states: q0 q1 q2
  initial: q0
  final: q2
  trans: q0 +a q1
  trans: q1 -a q2
}
k: 0
word: +a -a
word: -a +a
"""


@pytest.fixture
def sample(tmp_path):
    path = tmp_path / 'sample.vs'
    path.write_text(SAMPLE, encoding='utf-8')
    return str(path)


@pytest.fixture
def stack_file(tmp_path):
    path = tmp_path / 'stack.vs'
    path.write_text(STACK, encoding='utf-8')
    return str(path)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_ctrl.run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_solve_auto_on_bipartite_chain(sample):
    code, out, _ = run('solve', sample, '--k', '3', '--solver', 'auto')
    assert code == cli_ctrl.EXIT_OK
    lines = out.splitlines()
    assert lines[0] == 'YES'
    assert 'solver: auto/np' in lines


def test_solve_uses_k_from_file(sample):
    code, out, _ = run('solve', sample, '--solver', 'oracle')
    assert code == cli_ctrl.EXIT_OK
    assert out.splitlines()[:3] == ['YES', 'solver: oracle', 'k: 3']
    code, out, _ = run('solve', sample, '--k', '2', '--solver', 'np')
    assert out.splitlines()[0] == 'NO'


def test_solve_poly_rejects_c4(sample):
    code, _, err = run('solve', sample, '--k', '0', '--solver', 'poly')
    assert code == cli_ctrl.EXIT_UNSUPPORTED
    assert err.startswith('error:')


def test_solve_poly_on_stack(stack_file):
    code, out, _ = run('solve', stack_file, '--solver', 'poly')
    assert code == cli_ctrl.EXIT_OK
    assert out.splitlines()[:2] == ['YES', 'solver: poly']


def test_solve_witness_and_json(stack_file):
    code, out, _ = run('solve', stack_file, '--solver', 'np', '--witness')
    assert code == cli_ctrl.EXIT_OK
    assert 'witness {' in out
    assert '  word: +a -a' in out.splitlines()
    assert 'certificate {' in out

    code, out, _ = run('solve', stack_file, '--solver', 'np', '--witness', '--json')
    document = json.loads(out)
    assert document['answer'] == 'YES'
    assert document['witness']['word'] == '+a -a'
    assert document['certificate'].startswith('certificate {')


def test_solve_inconclusive_exit_code(tmp_path):
    path = tmp_path / 'loop.vs'
    path.write_text('graph {\n vertices: a\n}\nsystem {\n states: q0 q1\n initial: q0\n'
                    ' final: q1\n trans: q0 +a q0\n}\nk: 0\n', encoding='utf-8')
    code, out, _ = run('solve', str(path), '--solver', 'oracle', '--max-len', '3')
    assert code == cli_ctrl.EXIT_INCONCLUSIVE
    assert out.splitlines()[0] == 'INCONCLUSIVE'


def test_solve_poly_capped_counter(tmp_path):
    states = ' '.join(f'q{i}' for i in range(21))
    labels = ['+p'] * 10 + ['-p'] * 10
    trans = ''.join(f' trans: q{i} {label} q{i + 1}\n' for i, label in enumerate(labels))
    path = tmp_path / 'deep.vs'
    path.write_text(f'graph {{\n vertices: p\n}}\nsystem {{\n states: {states}\n initial: q0\n'
                    f' final: q20\n{trans}}}\nk: 0\n', encoding='utf-8')
    code, out, _ = run('solve', str(path), '--solver', 'poly', '--counter-cap', '8')
    assert code == cli_ctrl.EXIT_INCONCLUSIVE
    assert out.splitlines()[0] == 'INCONCLUSIVE'

    code, out, _ = run('solve', str(path), '--solver', 'auto', '--counter-cap', '8')
    assert code == cli_ctrl.EXIT_OK
    assert out.splitlines()[:2] == ['YES', 'solver: auto/np']


def test_solve_usage_errors(sample, tmp_path):
    assert run('solve', sample, '--k', '-1')[0] == cli_ctrl.EXIT_USAGE
    assert run('solve', str(tmp_path / 'missing.vs'))[0] == cli_ctrl.EXIT_USAGE
    assert run('solve', sample, '--solver', 'magic')[0] == cli_ctrl.EXIT_USAGE
    assert run()[0] == cli_ctrl.EXIT_USAGE
    graph_only = tmp_path / 'graph.vs'
    graph_only.write_text('graph {\n vertices: a\n}\n', encoding='utf-8')
    assert run('solve', str(graph_only), '--k', '0')[0] == cli_ctrl.EXIT_USAGE


def test_syntax_error_reports_location(tmp_path):
    path = tmp_path / 'broken.vs'
    path.write_text(SAMPLE.replace('+b1 q2', '+z q2'), encoding='utf-8')
    code, _, err = run('solve', str(path))
    assert code == cli_ctrl.EXIT_USAGE
    assert 'line 11, column 13' in err


def test_cs(sample):
    code, out, _ = run('cs', sample, '--word', '+a1 +b1 -a1 -b1')
    assert code == cli_ctrl.EXIT_OK
    assert out == '3\n'
    assert run('cs', sample, '--word', 'eps')[1] == '-1\n'


def test_normalize(stack_file):
    code, out, _ = run('normalize', stack_file)
    assert code == cli_ctrl.EXIT_OK
    assert out.splitlines() == ['eps', '-a +a']
    assert run('normalize', stack_file, '--word', '+z')[0] == cli_ctrl.EXIT_USAGE


def test_saturate(stack_file):
    code, out, _ = run('saturate', stack_file, '--ops', '+a -a')
    assert code == cli_ctrl.EXIT_OK
    assert out.splitlines()[0] == '# added: q0 eps q2'
    instance = parse_instance(out)
    assert instance.system.size == 3


def test_saturate_rejects_independent_ops(sample):
    code, _, err = run('saturate', sample, '--ops', '+a1 +b1')
    assert code == cli_ctrl.EXIT_USAGE
    assert 'dependent' in err


def test_nfa(stack_file):
    code, out, _ = run('nfa', stack_file, '--ops', '+a -a', '--block', '')
    assert code == cli_ctrl.EXIT_OK
    lines = out.splitlines()
    assert lines[0] == 'nfa {'
    assert '  initial: q0' in lines
    assert '  trans: q0 eps q2' in lines


def test_gen_presets():
    code, out, _ = run('gen', 'blind', '2')
    assert code == cli_ctrl.EXIT_OK
    instance = parse_instance(out)
    assert instance.graph.loops == ('c1', 'c2')
    assert instance.system is None
    assert run('gen', 'petri', '2', '3')[0] == cli_ctrl.EXIT_USAGE


def test_gen_random_is_deterministic():
    first = run('gen', 'random', '--seed', '4', '--states', '3')[1]
    assert first == run('gen', 'random', '--seed', '4', '--states', '3')[1]
    assert len(parse_instance(first).system.states) <= 3


def test_gen_sat(tmp_path):
    code, out, _ = run('gen', 'sat', '--clauses', '1 1 1', '--vars', '1')
    assert code == cli_ctrl.EXIT_OK
    instance = parse_instance(out)
    assert instance.k == 8
    dimacs = tmp_path / 'f.cnf'
    dimacs.write_text('p cnf 1 1\n1 1 1 0\n', encoding='utf-8')
    assert run('gen', 'sat', '--dimacs', str(dimacs))[1] == out
    assert run('gen', 'sat')[0] == cli_ctrl.EXIT_USAGE


def test_selftest_exports_suite(tmp_path):
    code, out, _ = run('selftest', '--suite', 'splitting', '--count', '5',
                       '--export', str(tmp_path / 'out'))
    assert code == cli_ctrl.EXIT_OK
    assert 'splitting' in out
    assert len(list((tmp_path / 'out').glob('*selftest_splitting.csv'))) == 1
