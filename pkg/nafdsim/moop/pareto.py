# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import itertools
import logging
from typing import Callable
from typing import Dict
from typing import List
from typing import NamedTuple
from typing import Sequence

import numpy as np

from nafdsim.core.quantizer import BitAllocation
from nafdsim.moop.objectives import Constraints
from nafdsim.moop.objectives import Individual


logger = logging.getLogger(__name__)


INFINITE_CROWDING = float("inf")


class ParetoFront(NamedTuple):
    individuals: List[Individual]

    @property
    def size(self) -> int:
        return len(self.individuals)

    def keys(self) -> set:
        return {ind.key for ind in self.individuals}


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """a dominates b under maximization of every objective."""
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def constrained_dominates(a: Individual, b: Individual) -> bool:
    """Feasible beats infeasible; among infeasible the smaller total
    violation wins; among feasible the usual Pareto dominance applies.
    """
    if a.feasible and not b.feasible:
        return True
    if not a.feasible and not b.feasible:
        return a.violation < b.violation
    if not a.feasible:
        return False
    return dominates(a.objectives, b.objectives)


def domination_matrix(individuals: Sequence[Individual]) -> np.ndarray:
    """dom[p, q] is True when individual p constrained-dominates q."""
    feas = np.array([ind.feasible for ind in individuals], dtype=bool)
    viol = np.array([ind.violation for ind in individuals], dtype=float)
    obj = np.array([tuple(ind.objectives) for ind in individuals], dtype=float)
    obj = obj.reshape(len(individuals), -1)
    geq = np.all(obj[:, None, :] >= obj[None, :, :], axis=-1)
    gt = np.any(obj[:, None, :] > obj[None, :, :], axis=-1)
    both_feasible = feas[:, None] & feas[None, :]
    both_infeasible = ~feas[:, None] & ~feas[None, :]
    return (feas[:, None] & ~feas[None, :]) \
        | (both_infeasible & (viol[:, None] < viol[None, :])) \
        | (both_feasible & geq & gt)


def sort_from_matrix(dom: np.ndarray) -> List[List[int]]:
    """Fronts of indices from a domination matrix, best front first."""
    n = dom.shape[0]
    dominated_by = [list(np.flatnonzero(dom[p])) for p in range(n)]
    counts = [int(c) for c in dom.sum(axis=0)]
    fronts: List[List[int]] = [[p for p in range(n) if counts[p] == 0]]
    i = 0
    while fronts[i]:
        next_front = []
        for p in fronts[i]:
            for q in dominated_by[p]:
                counts[q] -= 1
                if counts[q] == 0:
                    next_front.append(q)
        i += 1
        fronts.append(next_front)
    return fronts[:-1]


def fast_non_dominated_sort(items: Sequence,
                            dominates_fn: Callable = dominates) -> List[List[int]]:
    """Split items into fronts of indices, best front first."""
    n = len(items)
    dom = np.zeros((n, n), dtype=bool)
    for p in range(n):
        for q in range(n):
            if p != q and dominates_fn(items[p], items[q]):
                dom[p, q] = True
    return sort_from_matrix(dom)


def crowding_distance(points: Sequence[Sequence[float]], front: Sequence[int]) -> Dict[int, float]:
    """Crowding distance of each index in front; boundary points get an
    infinite distance.
    """
    distance = {i: 0.0 for i in front}
    if len(front) <= 2:
        return {i: INFINITE_CROWDING for i in front}
    n_obj = len(points[front[0]])
    for m in range(n_obj):
        ordered = sorted(front, key=lambda i: points[i][m])
        lo = points[ordered[0]][m]
        hi = points[ordered[-1]][m]
        distance[ordered[0]] = INFINITE_CROWDING
        distance[ordered[-1]] = INFINITE_CROWDING
        if hi == lo:
            continue
        for j in range(1, len(ordered) - 1):
            gap = points[ordered[j + 1]][m] - points[ordered[j - 1]][m]
            distance[ordered[j]] += gap / (hi - lo)
    return distance


def pareto_front(individuals: Sequence[Individual]) -> ParetoFront:
    """Feasible, mutually non-dominated members, one per allocation."""
    unique = {}
    for ind in individuals:
        if ind.feasible:
            unique.setdefault(ind.key, ind)
    candidates = sorted(unique.values(), key=lambda ind: ind.key)
    points = [ind.objectives for ind in candidates]
    front = [
        ind for i, ind in enumerate(candidates)
        if not any(dominates(points[j], points[i]) for j in range(len(candidates)) if j != i)
    ]
    return ParetoFront(individuals=front)


def all_allocations(cfg, b_max: int):
    genes = cfg.n + cfg.k_dl
    for vector in itertools.product(range(1, b_max + 1), repeat=genes):
        yield BitAllocation.from_vector(cfg, vector)


def exhaustive_front(evaluator, constraints: Constraints) -> ParetoFront:
    """Pareto set over every allocation in [1, b_max]^(N + K_DL)."""
    cfg = evaluator.cfg
    individuals = [
        evaluator.individual(allocation, constraints)
        for allocation in all_allocations(cfg, cfg.b_max)
    ]
    front = pareto_front(individuals)
    logger.info("Exhaustive search over {} allocations: {} Pareto points".format(
        len(individuals), front.size))
    return front
