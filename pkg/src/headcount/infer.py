"""Online decoding: sliding-window maximum-likelihood state sequences.

Each tick is turned into an observation (solver estimate, entry bit) and
appended to a bounded window. The window is decoded with Viterbi in log
space, restarting from the uniform prior, and the count of the window's
final state is the answer for the current tick. Ties are broken toward the
lower state index, so decoding is deterministic.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np

from . import csp
from .env import ActivationLine, EnvironmentModel
from .hmm import Hmm, HmmObservation, HmmParams, HmmState, build_hmm, observation_index

DEFAULT_WINDOW = 10


def make_observation(
    estimate: csp.CspEstimate, line: ActivationLine, env: EnvironmentModel
) -> HmmObservation:
    return HmmObservation(estimate.count, line.states[env.entry_index])


def _log(array: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(array)


def _viterbi_indices(
    log_prior: np.ndarray,
    log_transition: np.ndarray,
    log_emission: np.ndarray,
    obs_indices: Sequence[int],
) -> list[int]:
    n = log_prior.shape[0]
    length = len(obs_indices)
    score = log_prior + log_emission[:, obs_indices[0]]
    back = np.zeros((length, n), dtype=np.intp)
    for t in range(1, length):
        candidate = score[:, None] + log_transition
        back[t] = np.argmax(candidate, axis=0)  # first max: lower index wins
        score = candidate[back[t], np.arange(n)] + log_emission[:, obs_indices[t]]
    last = int(np.argmax(score))
    if score[last] == -np.inf:
        raise RuntimeError("all state paths have zero probability")
    path = [last]
    for t in range(length - 1, 0, -1):
        path.append(int(back[t][path[-1]]))
    path.reverse()
    return path


def viterbi(model: Hmm, observations: Sequence[HmmObservation]) -> list[HmmState]:
    """Most likely state path for the whole sequence."""
    if not observations:
        raise ValueError("empty observation sequence")
    obs_indices = [observation_index(o.estimate, o.entry) for o in observations]
    path = _viterbi_indices(
        _log(model.prior), _log(model.transition), _log(model.emission), obs_indices
    )
    return [model.states[i] for i in path]


class SlidingWindowDecoder:
    """Streaming decoder: push one observation, get one count back.

    Holds only the last ``window`` observations; each push re-decodes the
    window from the uniform prior and reports the final state's count. One
    stream per instance.
    """

    def __init__(self, model: Hmm, window: int = DEFAULT_WINDOW):
        if window < 1:
            raise ValueError("window must be at least 1")
        self.model = model
        self.window = window
        self._buffer: deque[int] = deque(maxlen=window)
        self._log_prior = _log(model.prior)
        self._log_transition = _log(model.transition)
        self._log_emission = _log(model.emission)

    def push(self, obs: HmmObservation) -> int:
        self._buffer.append(observation_index(obs.estimate, obs.entry))
        path = _viterbi_indices(
            self._log_prior,
            self._log_transition,
            self._log_emission,
            list(self._buffer),
        )
        return self.model.states[path[-1]].count


def sliding_window_decode(
    model: Hmm,
    observations: Sequence[HmmObservation],
    window: int = DEFAULT_WINDOW,
) -> list[int]:
    decoder = SlidingWindowDecoder(model, window)
    return [decoder.push(obs) for obs in observations]


def csp_counts(env: EnvironmentModel, lines: Sequence[ActivationLine]) -> list[int]:
    """Raw per-tick solver estimates. Repeated lines hit a cache."""
    cache: dict[tuple[bool, ...], int] = {}
    out = []
    for line in lines:
        count = cache.get(line.states)
        if count is None:
            count = csp.estimate_count(csp.build_instance(env, line)).count
            cache[line.states] = count
        out.append(count)
    return out


def hybrid_counts(
    env: EnvironmentModel,
    lines: Sequence[ActivationLine],
    params: HmmParams,
    window: int = DEFAULT_WINDOW,
) -> list[int]:
    """Solver estimates refined by the sliding-window decoder."""
    model = build_hmm(params, env.omega)
    decoder = SlidingWindowDecoder(model, window)
    entry_idx = env.entry_index
    deltas = csp_counts(env, lines)
    return [
        decoder.push(HmmObservation(delta, line.states[entry_idx]))
        for delta, line in zip(deltas, lines)
    ]
