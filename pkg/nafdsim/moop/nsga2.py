# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
"""NSGA-II over integer bit-allocation vectors.

Genes are the bit widths of the UL RAUs, DL RAUs and DL users, in that
order. Constraints are handled by constrained dominance.
"""
import logging
from typing import List
from typing import NamedTuple

import numpy as np

from nafdsim.core.exception import InvalidConfigError
from nafdsim.core.quantizer import BitAllocation
from nafdsim.moop.evaluator import Evaluator
from nafdsim.moop.objectives import Constraints
from nafdsim.moop.objectives import Individual
from nafdsim.moop.pareto import crowding_distance
from nafdsim.moop.pareto import domination_matrix
from nafdsim.moop.pareto import pareto_front
from nafdsim.moop.pareto import ParetoFront
from nafdsim.moop.pareto import sort_from_matrix


logger = logging.getLogger(__name__)


class Nsga2Config(NamedTuple):
    pop_size: int = 200
    generations: int = 300
    crossover_prob: float = 0.9
    workers: int = 1

    def validate(self) -> 'Nsga2Config':
        if self.pop_size < 2 or self.pop_size % 2:
            raise InvalidConfigError(
                "pop_size must be a positive even number, got {}".format(self.pop_size))
        if self.generations < 0:
            raise InvalidConfigError("generations must be non-negative")
        if not 0 <= self.crossover_prob <= 1:
            raise InvalidConfigError("crossover_prob must lie in [0, 1]")
        return self

    @classmethod
    def from_config(cls, config) -> 'Nsga2Config':
        return cls(
            pop_size=config.nsga2.pop_size,
            generations=config.nsga2.generations,
            crossover_prob=config.nsga2.crossover_prob,
            workers=config.nsga2.workers,
        ).validate()


class Nsga2:

    def __init__(self, evaluator: Evaluator, constraints: Constraints,
                 nsga2_cfg: Nsga2Config, seed: int):
        self.evaluator = evaluator
        self.constraints = constraints
        self.nsga2_cfg = nsga2_cfg.validate()
        self.rng = np.random.default_rng(seed)
        self.cfg = evaluator.cfg
        self.genes = self.cfg.n + self.cfg.k_dl
        self.b_max = self.cfg.b_max

    def run(self) -> ParetoFront:
        population = self._rank(self._evaluate(self._initial_vectors()))
        for generation in range(self.nsga2_cfg.generations):
            offspring = self._evaluate(self._offspring(population))
            population = self._select(population + offspring)
            logger.debug("Generation {}: {} individuals in the first front".format(
                generation, sum(1 for ind in population if ind.rank == 0)))
        front = pareto_front([ind for ind in population if ind.rank == 0])
        if front.size == 0:
            logger.warning("NSGA-II found no feasible allocation")
        logger.info("NSGA-II finished with {} Pareto points after {} evaluations".format(
            front.size, self.evaluator.cache_size))
        return front

    def _initial_vectors(self) -> np.ndarray:
        return self.rng.integers(
            1, self.b_max + 1, size=(self.nsga2_cfg.pop_size, self.genes))

    def _evaluate(self, vectors: np.ndarray) -> List[Individual]:
        allocations = [BitAllocation.from_vector(self.cfg, v) for v in vectors]
        self.evaluator.evaluate_many(allocations, self.nsga2_cfg.workers)
        return [self.evaluator.individual(a, self.constraints) for a in allocations]

    def _rank(self, individuals: List[Individual]) -> List[Individual]:
        fronts = sort_from_matrix(domination_matrix(individuals))
        points = [ind.objectives for ind in individuals]
        ranked = list(individuals)
        for rank, front in enumerate(fronts):
            distances = crowding_distance(points, front)
            for i in front:
                ranked[i] = ranked[i]._replace(rank=rank, crowding=distances[i])
        return ranked

    def _select(self, merged: List[Individual]) -> List[Individual]:
        unique = {}
        for ind in merged:
            unique.setdefault(ind.key, ind)
        candidates = self._rank(list(unique.values()))
        candidates.sort(key=lambda ind: (ind.rank, -ind.crowding, ind.key))
        return candidates[:self.nsga2_cfg.pop_size]

    def _tournament(self, population: List[Individual]) -> Individual:
        a, b = self.rng.integers(0, len(population), size=2)
        first, second = population[a], population[b]
        if (second.rank, -second.crowding) < (first.rank, -first.crowding):
            return second
        return first

    def _offspring(self, population: List[Individual]) -> np.ndarray:
        children = []
        for _ in range(self.nsga2_cfg.pop_size // 2):
            p1 = np.array(self._tournament(population).key)
            p2 = np.array(self._tournament(population).key)
            if self.rng.random() < self.nsga2_cfg.crossover_prob:
                swap = self.rng.random(self.genes) < 0.5
                c1 = np.where(swap, p2, p1)
                c2 = np.where(swap, p1, p2)
            else:
                c1, c2 = p1.copy(), p2.copy()
            children.append(self._mutate(c1))
            children.append(self._mutate(c2))
        return np.array(children)

    def _mutate(self, vector: np.ndarray) -> np.ndarray:
        mask = self.rng.random(self.genes) < 1.0 / self.genes
        step = self.rng.choice(np.array([-1, 1]), size=self.genes)
        return np.clip(vector + mask * step, 1, self.b_max)


def nsga2_run(evaluator: Evaluator, constraints: Constraints, pop_size: int = 200,
              generations: int = 300, seed: int = 0, crossover_prob: float = 0.9,
              workers: int = 1) -> ParetoFront:
    nsga2_cfg = Nsga2Config(
        pop_size=pop_size,
        generations=generations,
        crossover_prob=crossover_prob,
        workers=workers,
    )
    return Nsga2(evaluator, constraints, nsga2_cfg, seed).run()
