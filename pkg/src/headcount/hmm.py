"""Hidden Markov model over joint (person count, entry sensor) states.

A state pairs the true number of persons inside with the entry FoI's bit;
an observation pairs the constraint-solver estimate with the same bit.
Folding the entry bit into the state keeps the chain Markovian while letting
the transition structure say how counts change: by at most one per tick, and
only together with the matching entry-sensor edge (an arrival shows the
entry turning active, a departure shows it dropping back to idle).

Transitions are classified three ways. Static is the self-transition.
Likely transitions are the entry-consistent moves listed in
``likely_successors``; away from the count borders each state has exactly
two of them. Everything else is unlikely. Row probabilities: ``p_static``
on the diagonal, ``p_likely`` split equally over the row's likely
successors, and ``p_unlikely`` split equally over the rest, which makes
every row a probability distribution by the parameter budget.

Emissions encode that the solver undercounts far more often than it
overcounts. Relative to the state's count, an estimate is correct (equal),
probable (below), or unprobable (above); an entry-bit mismatch is
impossible since the observation copies the bit from the same tick. Raw
weights ``p_correct``, ``p_probable / count`` and
``p_unprobable / (omega_max - estimate)`` are renormalized per row because
they do not always form a distribution on their own (a zero count has no
undercount cells, and the divisor is clamped to 1 when the estimate is
already at the bound).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class HmmParams:
    """The six scalars that determine both matrices."""

    p_static: float
    p_likely: float
    p_unlikely: float
    p_correct: float
    p_probable: float
    p_unprobable: float

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value!r}")
        if abs(self.p_static + self.p_likely + self.p_unlikely - 1.0) > BUDGET_TOL:
            raise ValueError("p_static + p_likely + p_unlikely must equal 1")
        if abs(self.p_correct + self.p_probable + self.p_unprobable - 1.0) > BUDGET_TOL:
            raise ValueError("p_correct + p_probable + p_unprobable must equal 1")


# Placeholder values used only when no parameters were learned; the CLI
# flags any output produced with these.
DEFAULT_PARAMS = HmmParams(
    p_static=0.8,
    p_likely=0.15,
    p_unlikely=0.05,
    p_correct=0.7,
    p_probable=0.2,
    p_unprobable=0.1,
)

PARAM_FIELDS = (
    "p_static",
    "p_likely",
    "p_unlikely",
    "p_correct",
    "p_probable",
    "p_unprobable",
)


@dataclass(frozen=True)
class HmmState:
    count: int
    entry: bool


@dataclass(frozen=True)
class HmmObservation:
    estimate: int
    entry: bool


class TransitionKind(enum.Enum):
    STATIC = "static"
    LIKELY = "likely"
    UNLIKELY = "unlikely"


class EmissionKind(enum.Enum):
    IMPOSSIBLE = "impossible"
    CORRECT = "correct"
    PROBABLE = "probable"
    UNPROBABLE = "unprobable"


def state_index(count: int, entry: bool) -> int:
    """Canonical index: count ascending, entry False before True."""
    return 2 * count + int(entry)


def observation_index(estimate: int, entry: bool) -> int:
    return 2 * estimate + int(entry)


def build_state_space(
    omega_max: int,
) -> tuple[tuple[HmmState, ...], tuple[HmmObservation, ...]]:
    if omega_max < 1:
        raise ValueError("omega_max must be at least 1")
    states = tuple(
        HmmState(count, entry)
        for count in range(omega_max + 1)
        for entry in (False, True)
    )
    observations = tuple(
        HmmObservation(estimate, entry)
        for estimate in range(omega_max + 1)
        for entry in (False, True)
    )
    return states, observations


def likely_successors(state: HmmState, omega_max: int) -> tuple[HmmState, ...]:
    """The entry-consistent one-step moves out of a state.

    Interior counts have two: the entry bit flips while the count either
    stays or moves one step in the direction the flip suggests. At count 0
    an idle entry can only announce an arrival; an active one resolves as
    the person leaving again or stepping inside. At the count bound an
    idle entry can only turn active, and an active one resolves as a
    departure.
    """
    c, e = state.count, state.entry
    if c == 0:
        if not e:
            pairs = ((1, True),)
        else:
            pairs = ((0, False), (1, True))
    elif c == omega_max:
        if not e:
            pairs = ((omega_max, True),)
        else:
            pairs = ((omega_max - 1, False),)
    else:
        if not e:
            pairs = ((c, True), (c + 1, True))
        else:
            pairs = ((c, False), (c - 1, False))
    return tuple(HmmState(cc, ee) for cc, ee in pairs)


def classify_transition(
    s_from: HmmState, s_to: HmmState, omega_max: int
) -> TransitionKind:
    if s_from == s_to:
        return TransitionKind.STATIC
    if s_to in likely_successors(s_from, omega_max):
        return TransitionKind.LIKELY
    return TransitionKind.UNLIKELY


def classify_emission(state: HmmState, obs: HmmObservation) -> EmissionKind:
    if state.entry != obs.entry:
        return EmissionKind.IMPOSSIBLE
    if obs.estimate == state.count:
        return EmissionKind.CORRECT
    if obs.estimate < state.count:
        return EmissionKind.PROBABLE
    return EmissionKind.UNPROBABLE


def raw_emission_weight(
    state: HmmState, obs: HmmObservation, params: HmmParams, omega_max: int
) -> float:
    kind = classify_emission(state, obs)
    if kind is EmissionKind.IMPOSSIBLE:
        return 0.0
    if kind is EmissionKind.CORRECT:
        return params.p_correct
    if kind is EmissionKind.PROBABLE:
        return params.p_probable / state.count
    return params.p_unprobable / max(omega_max - obs.estimate, 1)


def build_transition_matrix(params: HmmParams, omega_max: int) -> np.ndarray:
    states, _ = build_state_space(omega_max)
    n = len(states)
    matrix = np.zeros((n, n))
    for i, state in enumerate(states):
        successors = likely_successors(state, omega_max)
        n_unlikely = n - 1 - len(successors)
        matrix[i, :] = params.p_unlikely / n_unlikely
        matrix[i, i] = params.p_static
        for succ in successors:
            matrix[i, state_index(succ.count, succ.entry)] = params.p_likely / len(
                successors
            )
    return matrix


def build_emission_matrix(params: HmmParams, omega_max: int) -> np.ndarray:
    states, observations = build_state_space(omega_max)
    n = len(states)
    matrix = np.zeros((n, n))
    for i, state in enumerate(states):
        row = np.array(
            [raw_emission_weight(state, obs, params, omega_max) for obs in observations]
        )
        total = row.sum()
        if total == 0.0:
            # Degenerate parameters can zero a whole row; fall back to
            # uniform over the entry-compatible cells.
            compatible = np.array([obs.entry == state.entry for obs in observations])
            row = compatible / compatible.sum()
            total = 1.0
        matrix[i, :] = row / total
    return matrix


def uniform_prior(omega_max: int) -> np.ndarray:
    n = 2 * (omega_max + 1)
    return np.full(n, 1.0 / n)


@dataclass(frozen=True)
class Hmm:
    omega_max: int
    states: tuple[HmmState, ...]
    observations: tuple[HmmObservation, ...]
    prior: np.ndarray
    transition: np.ndarray
    emission: np.ndarray


def build_hmm(params: HmmParams, omega_max: int) -> Hmm:
    states, observations = build_state_space(omega_max)
    return Hmm(
        omega_max=omega_max,
        states=states,
        observations=observations,
        prior=uniform_prior(omega_max),
        transition=build_transition_matrix(params, omega_max),
        emission=build_emission_matrix(params, omega_max),
    )


def format_params(params: HmmParams, defaults: bool = False) -> str:
    lines = []
    if defaults:
        lines.append("# default parameters, not learned from data")
    for name in PARAM_FIELDS:
        lines.append(f"{name} {getattr(params, name)!r}")
    return "\n".join(lines) + "\n"


def parse_params(text: str) -> HmmParams:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ConfigError(f"line {lineno}: expected '<name> <value>'")
        name, value = parts
        if name not in PARAM_FIELDS:
            raise ConfigError(f"line {lineno}: unknown parameter {name!r}")
        if name in values:
            raise ConfigError(f"line {lineno}: duplicate parameter {name!r}")
        try:
            values[name] = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {name} must be a number") from None
        if not math.isfinite(values[name]):
            raise ConfigError(f"line {lineno}: {name} must be finite")
    missing = [name for name in PARAM_FIELDS if name not in values]
    if missing:
        raise ConfigError(f"missing parameters: {', '.join(missing)}")
    try:
        return HmmParams(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
