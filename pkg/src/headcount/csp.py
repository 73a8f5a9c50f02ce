"""Per-tick person counting as constraint satisfaction.

Given one activation line, find the minimum number of distinct persons that
explains it. Each active FoI observes a set of persons with its arity's
cardinality (capped at omega); an idle FoI observes nobody; two FoIs may
share a person only if they are neighbors in the co-activation graph.

``estimate_count`` minimizes exactly: iterative deepening over the person
budget k, with a backtracking search that introduces person indices in
increasing order so that relabeled-equivalent assignments are visited once.
``brute_force_estimate`` is an independent exhaustive enumeration over raw
subsets, kept small and dumb on purpose so it can serve as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .env import ActivationLine, EnvironmentModel


@dataclass(frozen=True)
class CspInstance:
    active: tuple[str, ...]  # declaration order
    arities: dict[str, tuple[int, int]]  # effective (min, max), capped at omega
    adjacency: dict[str, frozenset[str]]  # co-activation edges among active FoIs
    omega: int


@dataclass
class Assignment:
    """Person sets per FoI id; FoIs absent from the map observe nobody."""

    sets: dict[str, frozenset[int]]


@dataclass(frozen=True)
class CspEstimate:
    count: int
    feasible: bool
    witness: Assignment | None

    def __post_init__(self) -> None:
        if not 0 <= self.count:
            raise ValueError("count must be nonnegative")


def build_instance(env: EnvironmentModel, line: ActivationLine) -> CspInstance:
    if len(line.states) != len(env.fois):
        raise ValueError("activation line does not match the environment")
    active = tuple(f.id for f, s in zip(env.fois, line.states) if s)
    active_set = frozenset(active)
    arities = {x: env.effective_arity(x) for x in active}
    adjacency = {x: env.cg.neighbors(x) & active_set for x in active}
    return CspInstance(active, arities, adjacency, env.omega)


def check_assignment(inst: CspInstance, assignment: Assignment) -> bool:
    """True iff the assignment satisfies all three constraints."""
    active = frozenset(inst.active)
    for foi_id, persons in assignment.sets.items():
        if foi_id not in active and persons:
            return False  # idle FoI observing someone
        for p in persons:
            if not 1 <= p <= inst.omega:
                return False
    for x in inst.active:
        low, high = inst.arities[x]
        if not low <= len(assignment.sets.get(x, frozenset())) <= high:
            return False
    for i, x in enumerate(inst.active):
        sx = assignment.sets.get(x, frozenset())
        for y in inst.active[i + 1 :]:
            if y in inst.adjacency[x]:
                continue
            if sx & assignment.sets.get(y, frozenset()):
                return False
    return True


def _lower_bound(inst: CspInstance) -> int:
    # Pairwise non-adjacent active FoIs need pairwise disjoint sets, so the
    # sum of their minima bounds the count from below. Greedy in declaration
    # order; also never below the largest single minimum.
    chosen: list[str] = []
    indep_sum = 0
    for x in inst.active:
        if all(x not in inst.adjacency[y] for y in chosen):
            chosen.append(x)
            indep_sum += inst.arities[x][0]
    best_single = max(inst.arities[x][0] for x in inst.active)
    return max(indep_sum, best_single, 1)


def _search(inst: CspInstance, budget: int) -> list[frozenset[int]] | None:
    """Find an assignment over persons {1..budget}, or None.

    Person indices are introduced in increasing order: a FoI's set is any
    subset of the already-used persons it may share, plus a consecutive
    block of fresh indices.
    """
    active = inst.active
    arities = inst.arities
    adjacency = inst.adjacency
    sets: list[frozenset[int]] = []

    def extend(idx: int, used_max: int) -> bool:
        if idx == len(active):
            return True
        x = active[idx]
        banned: set[int] = set()
        for prev_idx in range(idx):
            if active[prev_idx] not in adjacency[x]:
                banned |= sets[prev_idx]
        allowed_old = [p for p in range(1, used_max + 1) if p not in banned]
        low, high = arities[x]
        for size in range(low, min(high, budget) + 1):
            for fresh in range(0, min(size, budget - used_max) + 1):
                reused = size - fresh
                if reused > len(allowed_old):
                    continue
                block = frozenset(range(used_max + 1, used_max + 1 + fresh))
                for old_combo in combinations(allowed_old, reused):
                    sets.append(frozenset(old_combo) | block)
                    if extend(idx + 1, used_max + fresh):
                        return True
                    sets.pop()
        return False

    if extend(0, 0):
        return sets
    return None


def estimate_count(inst: CspInstance) -> CspEstimate:
    """Exact minimum person count, saturating at omega when infeasible."""
    if not inst.active:
        return CspEstimate(0, True, Assignment({}))
    low = _lower_bound(inst)
    if low <= inst.omega:
        for budget in range(low, inst.omega + 1):
            sets = _search(inst, budget)
            if sets is not None:
                witness = Assignment(dict(zip(inst.active, sets)))
                return CspEstimate(budget, True, witness)
    return CspEstimate(inst.omega, False, None)


ORACLE_MAX_ACTIVE = 8
ORACLE_MAX_OMEGA = 5


def brute_force_estimate(inst: CspInstance) -> CspEstimate:
    """Exhaustive oracle: try every subset of {1..omega} per active FoI.

    A branch is cut only when it already violates a constraint or cannot
    beat the best union found so far (the union never shrinks as FoIs are
    added), so the result equals full enumeration.
    """
    if len(inst.active) > ORACLE_MAX_ACTIVE or inst.omega > ORACLE_MAX_OMEGA:
        raise ValueError(
            f"oracle bounds exceeded: {len(inst.active)} active FoIs, omega {inst.omega}"
        )
    if not inst.active:
        return CspEstimate(0, True, Assignment({}))

    persons = range(1, inst.omega + 1)
    candidates: dict[str, list[frozenset[int]]] = {}
    for x in inst.active:
        low, high = inst.arities[x]
        candidates[x] = [
            frozenset(c) for size in range(low, high + 1) for c in combinations(persons, size)
        ]

    best: int | None = None
    best_sets: list[frozenset[int]] | None = None

    def walk(idx: int, sets: list[frozenset[int]], union: frozenset[int]) -> None:
        nonlocal best, best_sets
        if best is not None and len(union) >= best:
            return
        if idx == len(inst.active):
            best = len(union)
            best_sets = list(sets)
            return
        x = inst.active[idx]
        for cand in candidates[x]:
            ok = True
            for prev_idx in range(idx):
                if inst.active[prev_idx] in inst.adjacency[x]:
                    continue
                if cand & sets[prev_idx]:
                    ok = False
                    break
            if ok:
                sets.append(cand)
                walk(idx + 1, sets, union | cand)
                sets.pop()

    walk(0, [], frozenset())
    if best is None:
        return CspEstimate(inst.omega, False, None)
    assert best_sets is not None
    return CspEstimate(best, True, Assignment(dict(zip(inst.active, best_sets))))
