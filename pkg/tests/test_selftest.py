import pandas as pd
import pytest

from valencereach.controllers import selftest_ctrl
from valencereach.models import bcs
from valencereach.models.bcs import NpResult
from valencereach.models.system import Verdict


def test_sat_suite_np_inconclusive_is_disagreement(monkeypatch):
    monkeypatch.setattr(bcs, 'solve_np', lambda *args: NpResult(Verdict.INCONCLUSIVE))
    df = selftest_ctrl.sat_suite(count=3)
    assert not df['agree'].any()
    assert df['inconclusive'].all()
    summary = selftest_ctrl.summarize({'sat': df})
    assert summary.loc[0, 'disagreements'] == 3
    assert summary.loc[0, 'inconclusive'] == 3


def test_sat_suite_oracle_inconclusive_is_counted(monkeypatch):
    monkeypatch.setattr(selftest_ctrl, 'brute_force_bcsreach',
                        lambda *args, **kwargs: NpResult(Verdict.INCONCLUSIVE))
    df = selftest_ctrl.sat_suite(count=2, solver='oracle')
    assert df['agree'].all()
    summary = selftest_ctrl.summarize({'sat': df})
    assert summary.loc[0, 'disagreements'] == 0
    assert summary.loc[0, 'inconclusive'] == 2


def test_sat_suite_rejects_unknown_solver():
    with pytest.raises(ValueError):
        selftest_ctrl.sat_suite(count=1, solver='poly')


def test_summarize_without_inconclusive_column():
    df = pd.DataFrame({'agree': [True, False, True]})
    summary = selftest_ctrl.summarize({'words': df, 'empty': pd.DataFrame({'agree': []})})
    assert summary['disagreements'].tolist() == [1, 0]
    assert summary['inconclusive'].tolist() == [0, 0]


def test_word_problem_suite_reaches_length_eight():
    df = selftest_ctrl.word_problem_suite(samples=200, seed=3)
    assert set(df['graph']) == set(selftest_ctrl.WORD_GRAPHS)
    assert df['agree'].all()
    lengths = df['word'].map(lambda word: len(word.split()))
    assert lengths.max() == 8


def test_solver_suite_records_inconclusive():
    df = selftest_ctrl.solver_suite(count=5, seed=11)
    assert df['inconclusive'].dtype == bool
    assert df['agree'].all()


def test_splitting_suite_small():
    df = selftest_ctrl.splitting_suite(count=30, seed=5)
    assert len(df) == 30
    assert df['agree'].all()


@pytest.mark.slow
def test_splitting_suite_two_hundred_words():
    df = selftest_ctrl.splitting_suite(count=200)
    assert len(df) == 200
    assert df['agree'].all()
    limit = (df['switches'] + 1) * df['switches'].clip(lower=1)
    assert (df['blocks'] <= limit).all()


def test_run_selftest_reports_seconds():
    summary, results = selftest_ctrl.run_selftest(('splitting',), count=3)
    assert summary.columns.tolist() == ['suite', 'cases', 'disagreements',
                                        'inconclusive', 'seconds']
    assert summary.loc[0, 'cases'] == len(results['splitting']) == 3
    assert summary.loc[0, 'seconds'] >= 0
