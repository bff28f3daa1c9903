# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import itertools
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Dict
from typing import Iterable
from typing import List
from typing import NamedTuple
from typing import Optional

from nafdsim.core.power import energy_efficiency
from nafdsim.core.power import power_breakdown
from nafdsim.core.power import PowerParams
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.rates import rate_report
from nafdsim.core.scenario import ChannelStats
from nafdsim.core.system_config import CsiMode
from nafdsim.core.system_config import IcMode
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig
from nafdsim.moop.objectives import Constraints
from nafdsim.moop.objectives import default_bit_budget
from nafdsim.moop.objectives import Evaluation
from nafdsim.moop.objectives import feasible
from nafdsim.moop.objectives import Individual
from nafdsim.moop.objectives import Objectives
from nafdsim.moop.objectives import parse_reference


logger = logging.getLogger(__name__)


class ScenarioBundle(NamedTuple):
    """Read-only inputs shared by every evaluation of a run."""
    cfg: SystemConfig
    stats: ChannelStats
    params: PowerParams
    scheme: Scheme


class Evaluator:
    """Maps allocations to objectives, memoized per allocation."""

    def __init__(self, bundle: ScenarioBundle):
        self.bundle = bundle
        self._cache: Dict[tuple, Evaluation] = {}
        self._lock = threading.Lock()

    @property
    def cfg(self) -> SystemConfig:
        return self.bundle.cfg

    @property
    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)

    def evaluate(self, allocation: BitAllocation) -> Evaluation:
        key = allocation.to_vector()
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        evaluation = self._compute(allocation)
        with self._lock:
            return self._cache.setdefault(key, evaluation)

    def _compute(self, allocation: BitAllocation) -> Evaluation:
        cfg, stats, params, scheme = self.bundle
        allocation.validate(cfg)
        report = rate_report(
            stats, cfg, allocation, scheme, CsiMode.ESTIMATED, IcMode.WITH)
        total_power = power_breakdown(report, allocation, cfg, params, scheme).total
        ee = energy_efficiency(report, allocation, cfg, params, scheme)
        logger.debug("Evaluated {}: f1={} f2={}".format(allocation, report.sum_se, ee))
        return Evaluation(
            allocation=allocation,
            objectives=Objectives(f1=report.sum_se, f2=ee),
            report=report,
            total_power=total_power,
        )

    def evaluate_many(self, allocations: Iterable[BitAllocation],
                      workers: int = 1) -> List[Evaluation]:
        allocations = list(allocations)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                return list(executor.map(self.evaluate, allocations))
        return [self.evaluate(a) for a in allocations]

    def individual(self, allocation: BitAllocation, constraints: Constraints) -> Individual:
        evaluation = self.evaluate(allocation)
        check = feasible(allocation, evaluation, constraints, self.cfg)
        return Individual(
            allocation=allocation,
            objectives=evaluation.objectives,
            feasible=check.feasible,
            violation=check.total_violation,
        )


def uniform_triples(b_max: int) -> Iterable[tuple]:
    return itertools.product(range(1, b_max + 1), repeat=3)


def uniform_reference(evaluator: Evaluator, constraints: Constraints) -> Optional[BitAllocation]:
    """Best-EE group-uniform allocation meeting C1-C3.

    Returns None when no such allocation exists.
    """
    cfg = evaluator.cfg
    relaxed = constraints._replace(c4_mode="off")
    best = None
    best_ee = -1.0
    for triple in uniform_triples(cfg.b_max):
        allocation = BitAllocation.from_groups(cfg, *triple)
        candidate = evaluator.individual(allocation, relaxed)
        if candidate.feasible and candidate.objectives.f2 > best_ee:
            best = allocation
            best_ee = candidate.objectives.f2
    logger.info("Uniform reference allocation: {}".format(best))
    return best


def build_constraints(config, evaluator: Evaluator) -> Constraints:
    """Constraints from the [constraints] section; the power cap is the
    total power of the scheme's reference allocation.
    """
    cfg = evaluator.cfg
    section = config.constraints
    constraints = Constraints(
        b_budget=section.b_budget or default_bit_budget(cfg),
        r_ul_min=section.r_ul_min,
        r_dl_min=section.r_dl_min,
        c4_mode=section.c4_mode,
    ).validate()
    if constraints.c4_mode == "off":
        return constraints
    if evaluator.bundle.scheme is Scheme.ZF:
        triple = parse_reference(section.reference_zf)
    else:
        triple = parse_reference(section.reference_mr)
    if triple is None:
        reference = uniform_reference(evaluator, constraints)
    else:
        reference = BitAllocation.from_groups(
            cfg, *[min(b, cfg.b_max) for b in triple])
    if reference is None:
        logger.warning("No reference allocation meets C1-C3, C4 disabled")
        return constraints._replace(c4_mode="off")
    p_cap = evaluator.evaluate(reference).total_power
    logger.info("Power cap {} W from reference {}".format(p_cap, reference))
    return constraints._replace(p_cap=p_cap)
