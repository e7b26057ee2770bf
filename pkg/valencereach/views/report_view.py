"""判定結果とデバッグ用の出力の表示"""
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from valencereach.models import monoid
from valencereach.models.nfa import Nfa
from valencereach.models.system import RunWitness, Verdict
from valencereach.views import style


@dataclass
class SolveReport:
    """solve サブコマンドの結果

    Attributes
    ----------
    answer: Verdict
        判定結果
    solver: str
        使ったソルバの名前
    k: int
        文脈切替回数の上限
    witness: Optional[RunWitness]
        YES の時の実行
    certificate: Optional[str]
        NP 手続きの証明書のテキスト
    stats: Dict[str, Any]
        探索の統計
    """

    answer: Verdict
    solver: str
    k: int
    witness: Optional[RunWitness] = None
    certificate: Optional[str] = None
    stats: Dict[str, Any] = field(default_factory=dict)


def _witness_lines(witness: RunWitness) -> str:
    lines = [str(t) for t in witness.transitions]
    lines.append(f'word: {monoid.format_word(witness.word)}')
    lines.append(f'switches: {witness.switches}')
    return '\n'.join(lines)


@style.block('witness')
def render_witness(witness: RunWitness) -> str:
    return _witness_lines(witness)


@style.block('stats')
def render_stats(stats: Dict[str, Any]) -> str:
    return '\n'.join(f'{key}: {stats[key]}' for key in sorted(stats))


def render_text(report: SolveReport, show_witness: bool = False) -> str:
    """1行目は YES, NO, INCONCLUSIVE のいずれか"""

    parts = [report.answer.value, f'solver: {report.solver}', f'k: {report.k}']
    if show_witness and report.witness is not None:
        parts.append(render_witness(report.witness))
    if show_witness and report.certificate is not None:
        parts.append(report.certificate)
    if report.stats:
        parts.append(render_stats(report.stats))
    return '\n'.join(parts) + '\n'


def render_json(report: SolveReport, show_witness: bool = False) -> str:
    """render_text と同じ内容を1つの JSON 文書にする"""

    document: Dict[str, Any] = {
        'answer': report.answer.value,
        'solver': report.solver,
        'k': report.k,
        'stats': report.stats,
    }
    if show_witness and report.witness is not None:
        document['witness'] = {
            'transitions': [str(t) for t in report.witness.transitions],
            'word': monoid.format_word(report.witness.word),
            'switches': report.witness.switches,
        }
    if show_witness and report.certificate is not None:
        document['certificate'] = report.certificate
    return json.dumps(document, sort_keys=True, indent=2) + '\n'


@style.block('nfa')
def render_nfa(nfa: Nfa) -> str:
    """NFA の状態と遷移の一覧"""

    lines = ['states: ' + ' '.join(str(q) for q in nfa.states),
             f'initial: {nfa.initial}',
             f'final: {nfa.final}']
    lines.extend(f'trans: {t}' for t in nfa.transitions)
    return '\n'.join(lines)
