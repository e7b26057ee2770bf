"""従属な付値系の飽和化"""
import logging as log
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from valencereach.models import monoid
from valencereach.models.system import State, Transition, ValenceSystem


class NotDependentError(ValueError):
    """系の操作が従属集合でない時の例外"""


@dataclass(frozen=True)
class Derivation:
    """追加した ε 遷移の由来. first, ε 経路, last の順に読むと恒等元になる"""

    first: Transition
    path: Tuple[Transition, ...]
    last: Transition


class SaturatedSystem:
    """飽和化した系

    Attributes
    ----------
    base: ValenceSystem
        元の系
    added: Tuple[Transition, ...]
        追加した ε 遷移 (追加順)
    provenance: Dict[Transition, Derivation]
        追加した ε 遷移ごとの由来
    system: ValenceSystem
        元の遷移と追加した遷移からなる系
    """

    def __init__(self, base: ValenceSystem, added: Iterable[Transition],
                 provenance: Dict[Transition, Derivation]) -> None:
        self.base = base
        self.added = tuple(added)
        self.provenance = dict(provenance)
        self.system = ValenceSystem(base.graph, base.states,
                                    base.transitions + self.added)

    def expand(self, transitions: Iterable[Transition]) -> List[Transition]:
        """飽和系の遷移列を元の系の遷移列に展開する"""

        expanded: List[Transition] = []
        for transition in transitions:
            derivation = self.provenance.get(transition)
            if derivation is None:
                expanded.append(transition)
                continue
            expanded.append(derivation.first)
            expanded.extend(self.expand(derivation.path))
            expanded.append(derivation.last)
        return expanded


def _silent_path(silent: Dict[State, List[Transition]], source: State,
                 target: State) -> Optional[List[Transition]]:
    if source == target:
        return []
    parent: Dict[State, Transition] = {}
    queue = deque([source])
    seen = {source}
    while queue:
        state = queue.popleft()
        for transition in silent.get(state, ()):
            if transition.target in seen:
                continue
            seen.add(transition.target)
            parent[transition.target] = transition
            if transition.target == target:
                path = []
                cursor = target
                while cursor != source:
                    path.append(parent[cursor])
                    cursor = parent[cursor].source
                path.reverse()
                return path
            queue.append(transition.target)
    return None


def saturate(system: ValenceSystem) -> SaturatedSystem:
    """p1 -o-> p ⇝ε p' -ō-> p2 を見つけるたびに ε 遷移 p1 -> p2 を加える

    ō は o の逆の操作で, 負から正への消去は自己ループのある記号に限る.
    新しい ε 遷移がそれ以上増えなくなるまで繰り返す.

    Parameters
    ----------
    system: ValenceSystem
        操作の集合が従属な系

    Returns
    -------
    SaturatedSystem
        追加遷移とその由来

    Raises
    ------
    NotDependentError
        Op(system) が従属でない時
    """

    g = system.graph
    if not monoid.is_dependent(g, system.operations()):
        raise NotDependentError(
            'saturation requires a dependent operation set, got '
            + ' '.join(sorted(str(op) for op in system.operations())))

    silent: Dict[State, List[Transition]] = {}
    existing: Set[Tuple[State, State]] = set()
    for transition in system.transitions:
        if transition.label is None:
            silent.setdefault(transition.source, []).append(transition)
            existing.add((transition.source, transition.target))

    labelled = [t for t in system.transitions if t.label is not None]
    pairs = [(first, last) for first in labelled for last in labelled
             if monoid.cancels(g, first.label, last.label)]

    added: List[Transition] = []
    provenance: Dict[Transition, Derivation] = {}
    changed = True
    while changed:
        changed = False
        for first, last in pairs:
            shortcut = (first.source, last.target)
            if first.source == last.target or shortcut in existing:
                continue
            path = _silent_path(silent, first.target, last.source)
            if path is None:
                continue
            transition = Transition(first.source, None, last.target)
            existing.add(shortcut)
            silent.setdefault(first.source, []).append(transition)
            added.append(transition)
            provenance[transition] = Derivation(first, tuple(path), last)
            changed = True

    log.debug(f'[SAT] added {len(added)} silent transitions to a system '
              f'with {len(system.states)} states')
    return SaturatedSystem(system, added, provenance)
