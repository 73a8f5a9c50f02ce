"""Parameter learning by frequency counting on labeled sequences.

The six model scalars are fitted from a labeled dataset: consecutive true
states are classified as static, likely, or unlikely transitions, and each
(true state, solver estimate) pair as a correct, probable, or unprobable
emission. Class frequencies with add-one smoothing give the parameters, so
rare classes never get probability zero. The estimates are produced by the
same solver used at inference time, so the emission statistics reflect the
deployed estimator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import csp
from .env import ActivationLine, EnvironmentModel
from .errors import DatasetError
from .hmm import (
    EmissionKind,
    HmmObservation,
    HmmParams,
    HmmState,
    TransitionKind,
    classify_emission,
    classify_transition,
)
from .infer import make_observation


@dataclass(frozen=True)
class LabeledSequence:
    states: tuple[HmmState, ...]
    observations: tuple[HmmObservation, ...]


@dataclass(frozen=True)
class ClassCounts:
    static: int
    likely: int
    unlikely: int
    correct: int
    probable: int
    unprobable: int
    impossible_ticks: tuple[int, ...] = ()

    @property
    def transition_total(self) -> int:
        return self.static + self.likely + self.unlikely

    @property
    def emission_total(self) -> int:
        return self.correct + self.probable + self.unprobable


def build_labeled_sequence(
    env: EnvironmentModel, lines: Sequence[ActivationLine]
) -> LabeledSequence:
    """Derive per-tick true states and observations; every line needs a label."""
    states = []
    observations = []
    cache: dict[tuple[bool, ...], csp.CspEstimate] = {}
    entry_idx = env.entry_index
    for i, line in enumerate(lines):
        if line.label is None:
            raise DatasetError(f"record {i + 1} has no label")
        estimate = cache.get(line.states)
        if estimate is None:
            estimate = csp.estimate_count(csp.build_instance(env, line))
            cache[line.states] = estimate
        states.append(HmmState(line.label, line.states[entry_idx]))
        observations.append(make_observation(estimate, line, env))
    return LabeledSequence(tuple(states), tuple(observations))


def count_classes(data: LabeledSequence, omega_max: int) -> ClassCounts:
    transitions = {kind: 0 for kind in TransitionKind}
    emissions = {kind: 0 for kind in EmissionKind}
    impossible_ticks = []
    for prev, nxt in zip(data.states, data.states[1:]):
        transitions[classify_transition(prev, nxt, omega_max)] += 1
    for tick, (state, obs) in enumerate(zip(data.states, data.observations)):
        kind = classify_emission(state, obs)
        emissions[kind] += 1
        if kind is EmissionKind.IMPOSSIBLE:
            impossible_ticks.append(tick)
    return ClassCounts(
        static=transitions[TransitionKind.STATIC],
        likely=transitions[TransitionKind.LIKELY],
        unlikely=transitions[TransitionKind.UNLIKELY],
        correct=emissions[EmissionKind.CORRECT],
        probable=emissions[EmissionKind.PROBABLE],
        unprobable=emissions[EmissionKind.UNPROBABLE],
        impossible_ticks=tuple(impossible_ticks),
    )


def fit_params(counts: ClassCounts) -> HmmParams:
    """Add-one-smoothed class frequencies.

    The third probability of each budget is the complement of the other
    two, which closes the budget to exactly 1.0 in float arithmetic.
    """
    if counts.transition_total == 0:
        raise DatasetError("no transition pairs to learn from (need at least 2 ticks)")
    if counts.emission_total == 0:
        raise DatasetError("no emissions to learn from")
    t_denom = counts.transition_total + 3
    e_denom = counts.emission_total + 3
    p_static = (counts.static + 1) / t_denom
    p_likely = (counts.likely + 1) / t_denom
    p_correct = (counts.correct + 1) / e_denom
    p_probable = (counts.probable + 1) / e_denom
    return HmmParams(
        p_static=p_static,
        p_likely=p_likely,
        p_unlikely=1.0 - (p_static + p_likely),
        p_correct=p_correct,
        p_probable=p_probable,
        p_unprobable=1.0 - (p_correct + p_probable),
    )
