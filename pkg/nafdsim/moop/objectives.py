# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging
from typing import NamedTuple
from typing import Optional
from typing import Tuple

import numpy as np

from nafdsim.core.exception import InvalidConfigError
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.rates import RateReport
from nafdsim.core.system_config import SystemConfig


logger = logging.getLogger(__name__)


C4_MODES = ("upper", "lower", "off")


class Objectives(NamedTuple):
    """Sum SE with pre-log (f1) and EE in bits/Joule (f2), both maximized."""
    f1: float
    f2: float


class Evaluation(NamedTuple):
    allocation: BitAllocation
    objectives: Objectives
    report: RateReport
    total_power: float


class Constraints(NamedTuple):
    b_budget: int
    r_ul_min: float
    r_dl_min: float
    p_cap: float = float("inf")
    c4_mode: str = "upper"

    def validate(self) -> 'Constraints':
        if self.b_budget <= 0:
            raise InvalidConfigError("b_budget must be positive")
        if self.r_ul_min < 0 or self.r_dl_min < 0:
            raise InvalidConfigError("Rate floors must be non-negative")
        if self.c4_mode not in C4_MODES:
            raise InvalidConfigError("Unknown c4_mode: {}".format(self.c4_mode))
        return self


class FeasibilityReport(NamedTuple):
    feasible: bool
    violations: Tuple[Tuple[str, float], ...]

    @property
    def total_violation(self) -> float:
        return float(sum(amount for _, amount in self.violations))


class Individual(NamedTuple):
    allocation: BitAllocation
    objectives: Objectives
    feasible: bool
    violation: float = 0.0
    rank: Optional[int] = None
    crowding: float = 0.0

    @property
    def key(self) -> tuple:
        return self.allocation.to_vector()


def default_bit_budget(cfg: SystemConfig) -> int:
    """12 bits on every RAU antenna and every DL user."""
    return 12 * cfg.m * cfg.n + 12 * cfg.k_dl


def weighted_bits(allocation: BitAllocation, cfg: SystemConfig) -> int:
    rau_bits = sum(allocation.ul_rau_bits) + sum(allocation.dl_rau_bits)
    return cfg.m * rau_bits + sum(allocation.dl_user_bits)


def parse_reference(value: str) -> Optional[Tuple[int, int, int]]:
    """'7,5,6' -> (7, 5, 6): UL RAU, DL RAU and DL user bits."""
    if value is None or not value.strip():
        return None
    parts = [int(p) for p in value.split(",")]
    if len(parts) != 3:
        raise InvalidConfigError(
            "Reference allocation needs three comma-separated values: {}".format(value))
    return tuple(parts)


def feasible(allocation: BitAllocation, evald: Evaluation, constraints: Constraints,
             cfg: SystemConfig) -> FeasibilityReport:
    """Check C1-C4. Violation amounts are relative to their bounds."""
    violations = []
    used = weighted_bits(allocation, cfg)
    if used > constraints.b_budget:
        violations.append(("C1", (used - constraints.b_budget) / constraints.b_budget))
    floors = (
        ("C2", evald.report.r_ul, constraints.r_ul_min),
        ("C3", evald.report.r_dl, constraints.r_dl_min),
    )
    for name, rates, floor in floors:
        deficit = np.sum(np.maximum(floor - np.asarray(rates), 0.0))
        if deficit > 0:
            violations.append((name, float(deficit / max(floor, 1e-12))))
    cap = constraints.p_cap
    if constraints.c4_mode != "off" and np.isfinite(cap):
        if constraints.c4_mode == "upper" and evald.total_power > cap:
            violations.append(("C4", (evald.total_power - cap) / cap))
        if constraints.c4_mode == "lower" and evald.total_power < cap:
            violations.append(("C4", (cap - evald.total_power) / cap))
    return FeasibilityReport(feasible=not violations, violations=tuple(violations))
