# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import mock
import numpy as np
import pytest

from nafdsim.core.exception import InvalidConfigError
from nafdsim.core.power import PowerParams
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.scenario import large_scale_fading
from nafdsim.core.scenario import sample_geometry
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig
from nafdsim.moop.dqn import apply_action
from nafdsim.moop.dqn import DqnAgent
from nafdsim.moop.dqn import DqnConfig
from nafdsim.moop.dqn import dqn_run
from nafdsim.moop.dqn import reward_scale
from nafdsim.moop.evaluator import Evaluator
from nafdsim.moop.evaluator import ScenarioBundle
from nafdsim.moop.objectives import Constraints
from nafdsim.moop.pareto import exhaustive_front


@pytest.fixture
def cfg():
    return SystemConfig(
        n_ul=1, n_dl=1, k_ul=1, k_dl=1, m=4, tau1=2, tau2=1, b_max=4,
    )


@pytest.fixture
def evaluator(cfg):
    stats = large_scale_fading(sample_geometry(cfg, seed=6), cfg)
    return Evaluator(ScenarioBundle(cfg, stats, PowerParams(), Scheme.MR))


@pytest.fixture
def constraints():
    return Constraints(b_budget=1000, r_ul_min=0.0, r_dl_min=0.0, c4_mode="off")


@pytest.fixture
def dqn_cfg():
    return DqnConfig(
        batch_size=8,
        memory_size=64,
        iterations=60,
        hidden1=16,
        hidden2=16,
        target_sync=10,
        initial_bits=2,
    )


def test_apply_action():
    state = np.array([2, 4, 1])

    assert apply_action(state, 0, 4).tolist() == [3, 4, 1]
    assert apply_action(state, 1, 4).tolist() == [1, 4, 1]
    assert apply_action(state, 2, 4).tolist() == [2, 4, 1]
    assert apply_action(state, 5, 4).tolist() == [2, 4, 1]
    assert state.tolist() == [2, 4, 1]


def test_reward_scale_anchors(cfg, evaluator, constraints, dqn_cfg):
    scale = reward_scale(evaluator)
    low = evaluator.individual(BitAllocation.uniform(cfg, 1), constraints)
    high = evaluator.individual(BitAllocation.uniform(cfg, 4), constraints)

    rewards = [scale.reward(ind, 1.0, -2.0) for ind in (low, high)]

    assert min(rewards) >= -1.0
    assert max(rewards) <= 1.0


def test_reward_infeasible(evaluator, cfg):
    scale = reward_scale(evaluator)
    strict = Constraints(b_budget=1, r_ul_min=0.0, r_dl_min=0.0, c4_mode="off")
    individual = evaluator.individual(BitAllocation.uniform(cfg, 2), strict)

    assert scale.reward(individual, 1.0, -2.0) == -2.0


def test_zero_iterations_returns_initial_state(evaluator, constraints, dqn_cfg):
    result = dqn_run(evaluator, constraints, dqn_cfg._replace(iterations=0), seed=1)

    assert result.best.key == (2, 2, 2)
    assert result.trace == []


def test_run_trace(evaluator, constraints, dqn_cfg):
    result = dqn_run(evaluator, constraints, dqn_cfg, seed=1)

    assert len(result.trace) == 60
    assert [row.iter for row in result.trace] == list(range(60))
    assert np.isnan(result.trace[0].loss)
    assert np.isfinite(result.trace[-1].loss)
    assert result.best.feasible
    best_so_far = [row.best_reward_so_far for row in result.trace]
    assert best_so_far == sorted(best_so_far)
    assert result.best_reward == best_so_far[-1]
    assert result.best_reward >= max(row.reward for row in result.trace)


def test_run_deterministic(evaluator, constraints, dqn_cfg):
    first = dqn_run(evaluator, constraints, dqn_cfg, seed=9)
    second = dqn_run(evaluator, constraints, dqn_cfg, seed=9)

    assert [r.reward for r in first.trace] == [r.reward for r in second.trace]
    assert first.best.key == second.best.key


def test_epsilon_decay(evaluator, constraints, dqn_cfg):
    cfg = dqn_cfg._replace(iterations=5, epsilon=0.8, epsilon_decay=0.5)

    result = dqn_run(evaluator, constraints, cfg, seed=2)

    expected = [0.8, 0.4, 0.2, 0.1, 0.05]
    assert [row.epsilon for row in result.trace] == pytest.approx(expected)


def test_greedy_zero_network_picks_first_action(evaluator, constraints, dqn_cfg):
    agent = DqnAgent(evaluator, constraints, dqn_cfg._replace(zero_init=True), seed=0)

    assert agent.choose_action(np.array([2, 2, 2]), epsilon=0.0) == 0


def test_target_network_sync(evaluator, constraints, dqn_cfg):
    agent = DqnAgent(evaluator, constraints, dqn_cfg._replace(target_sync=1), seed=0)
    agent.run()

    for name, p in agent.net.params.items():
        assert np.array_equal(p, agent.target_net.params[name])


@pytest.mark.parametrize("overrides", [
    dict(batch_size=0),
    dict(batch_size=128, memory_size=64),
    dict(epsilon=1.5),
    dict(optimizer="adam"),
    dict(target_sync=0),
    dict(loss="huber"),
])
def test_config_validate(dqn_cfg, overrides):
    with pytest.raises(InvalidConfigError):
        dqn_cfg._replace(**overrides).validate()


def test_learning_uses_configured_loss(evaluator, constraints, dqn_cfg):
    agent = DqnAgent(evaluator, constraints, dqn_cfg._replace(loss="mse"), seed=0)

    with mock.patch('nafdsim.moop.dqn.gradient_step', return_value=0.25) as step:
        result = agent.run()

    assert step.called
    assert all(call[0][6] == "mse" for call in step.call_args_list)
    assert result.trace[-1].loss == 0.25


def test_best_allocation_reaches_exhaustive_optimum(evaluator, constraints, dqn_cfg):
    scale = reward_scale(evaluator)
    front = exhaustive_front(evaluator, constraints)
    best_on_front = max(scale.reward(ind, 1.0, -2.0) for ind in front.individuals)

    result = dqn_run(
        evaluator, constraints, dqn_cfg._replace(iterations=1500, memory_size=256), seed=4)

    assert result.best.feasible
    assert result.best_reward >= best_on_front - 0.05
    assert result.best_reward <= best_on_front + 1e-9
