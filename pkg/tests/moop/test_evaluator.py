# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import mock
import numpy as np
import pytest

from nafdsim.core.power import PowerParams
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.rates import rate_report
from nafdsim.core.scenario import large_scale_fading
from nafdsim.core.scenario import sample_geometry
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig
from nafdsim.moop.evaluator import build_constraints
from nafdsim.moop.evaluator import Evaluator
from nafdsim.moop.evaluator import ScenarioBundle
from nafdsim.moop.evaluator import uniform_reference
from nafdsim.moop.objectives import Constraints


@pytest.fixture
def cfg():
    return SystemConfig(
        n_ul=1, n_dl=1, k_ul=1, k_dl=1, m=4, tau1=2, tau2=1, b_max=3,
    )


@pytest.fixture
def evaluator(cfg):
    stats = large_scale_fading(sample_geometry(cfg, seed=2), cfg)
    return Evaluator(ScenarioBundle(cfg, stats, PowerParams(), Scheme.MR))


@pytest.fixture
def open_constraints():
    return Constraints(b_budget=1000, r_ul_min=0.0, r_dl_min=0.0, c4_mode="off")


def constraints_section(**overrides):
    values = dict(
        b_budget=0,
        r_ul_min=0.0,
        r_dl_min=0.0,
        c4_mode="upper",
        reference_mr="2,2,2",
        reference_zf="3,1,3",
    )
    values.update(overrides)
    return mock.Mock(constraints=mock.Mock(**values))


def test_evaluate_objectives(cfg, evaluator):
    allocation = BitAllocation.uniform(cfg, 2)

    evaluation = evaluator.evaluate(allocation)

    assert evaluation.allocation == allocation
    assert evaluation.objectives.f1 == pytest.approx(evaluation.report.sum_se)
    assert evaluation.objectives.f2 > 0
    assert evaluation.total_power > 0


def test_evaluate_is_memoized(cfg, evaluator):
    allocation = BitAllocation.uniform(cfg, 2)

    with mock.patch('nafdsim.moop.evaluator.rate_report', wraps=rate_report) as patched:
        first = evaluator.evaluate(allocation)
        second = evaluator.evaluate(allocation)

    assert patched.call_count == 1
    assert first is second
    assert evaluator.cache_size == 1


def test_evaluate_many_parallel_matches_sequential(cfg, evaluator):
    allocations = [BitAllocation.uniform(cfg, b) for b in (1, 2, 3)]

    parallel = evaluator.evaluate_many(allocations, workers=3)
    sequential = evaluator.evaluate_many(allocations)

    assert [e.objectives for e in parallel] == [e.objectives for e in sequential]
    assert evaluator.cache_size == 3


def test_individual(cfg, evaluator, open_constraints):
    individual = evaluator.individual(BitAllocation.uniform(cfg, 3), open_constraints)

    assert individual.feasible
    assert individual.violation == 0.0
    assert individual.key == (3, 3, 3)


def test_uniform_reference_picks_best_energy_efficiency(cfg, evaluator, open_constraints):
    reference = uniform_reference(evaluator, open_constraints)

    best_ee = max(
        evaluator.evaluate(BitAllocation.from_groups(cfg, a, b, c)).objectives.f2
        for a in range(1, 4) for b in range(1, 4) for c in range(1, 4)
    )
    assert evaluator.evaluate(reference).objectives.f2 == pytest.approx(best_ee)


def test_uniform_reference_none_when_infeasible(evaluator):
    constraints = Constraints(b_budget=1, r_ul_min=0.0, r_dl_min=0.0)

    assert uniform_reference(evaluator, constraints) is None


def test_build_constraints_reference_power_cap(cfg, evaluator):
    constraints = build_constraints(constraints_section(), evaluator)

    assert constraints.b_budget == 12 * 4 * 2 + 12
    assert constraints.c4_mode == "upper"
    assert constraints.p_cap == pytest.approx(
        evaluator.evaluate(BitAllocation.uniform(cfg, 2)).total_power)


def test_build_constraints_searches_without_reference(cfg, evaluator):
    constraints = build_constraints(constraints_section(reference_mr=""), evaluator)

    reference = uniform_reference(evaluator, constraints._replace(c4_mode="off"))
    assert constraints.p_cap == pytest.approx(evaluator.evaluate(reference).total_power)


def test_build_constraints_disables_power_cap(evaluator):
    section = constraints_section(reference_mr="", b_budget=1)

    constraints = build_constraints(section, evaluator)

    assert constraints.c4_mode == "off"


def test_build_constraints_off(evaluator):
    constraints = build_constraints(constraints_section(c4_mode="off"), evaluator)

    assert constraints.p_cap == float("inf")


@pytest.fixture
def placed_evaluator(placed_stats):
    return Evaluator(ScenarioBundle(SystemConfig(), placed_stats, PowerParams(), Scheme.MR))


def test_energy_efficiency_peaks_at_moderate_resolution(placed_evaluator):
    cfg = placed_evaluator.cfg
    objectives = [
        placed_evaluator.evaluate(BitAllocation.uniform(cfg, b)).objectives
        for b in range(1, cfg.b_max + 1)
    ]
    f1 = [o.f1 for o in objectives]
    f2 = [o.f2 for o in objectives]

    assert all(high >= low - 1e-9 for low, high in zip(f1, f1[1:]))
    peak = int(np.argmax(f2))
    assert 0 < peak < 9
    assert all(f2[i] > f2[i + 1] for i in range(peak, cfg.b_max - 1))
    assert f2[11] < f2[9]


def test_uniform_reference_exists_at_default_floors(placed_evaluator):
    constraints = Constraints(b_budget=1000, r_ul_min=1.5, r_dl_min=1.5, c4_mode="off")

    reference = uniform_reference(placed_evaluator, constraints)

    assert reference is not None
    assert min(reference.dl_user_bits) >= 2
    assert placed_evaluator.individual(reference, constraints).feasible
