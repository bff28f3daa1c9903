# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
"""Deep Q-learning search over bit allocations.

The state is the allocation vector; each action moves one converter group
(one RAU or one DL user) up or down by one bit. The best feasible state
visited during training is returned.
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
from nafdsim.moop.qnetwork import gradient_step
from nafdsim.moop.qnetwork import LOSS_SCALES
from nafdsim.moop.qnetwork import QNetwork
from nafdsim.moop.qnetwork import RmsProp
from nafdsim.moop.replay_memory import ReplayMemory
from nafdsim.moop.replay_memory import Transition


logger = logging.getLogger(__name__)


OPTIMIZERS = ("rmsprop", "sgd")
PROGRESS_INTERVAL = 100


class DqnConfig(NamedTuple):
    batch_size: int = 32
    learning_rate: float = 0.01
    gamma: float = 0.9
    epsilon: float = 0.9
    epsilon_decay: float = 1.0
    memory_size: int = 2000
    iterations: int = 1000
    hidden1: int = 64
    hidden2: int = 64
    target_sync: int = 50
    optimizer: str = "rmsprop"
    initial_bits: int = 6
    reward_offset: float = 1.0
    infeasible_reward: float = -2.0
    zero_init: bool = False
    loss: str = "half_mse"

    def validate(self) -> 'DqnConfig':
        if self.batch_size < 1 or self.memory_size < self.batch_size:
            raise InvalidConfigError(
                "Need 1 <= batch_size <= memory_size, got {} and {}".format(
                    self.batch_size, self.memory_size))
        if self.iterations < 0:
            raise InvalidConfigError("iterations must be non-negative")
        if not 0 <= self.epsilon <= 1:
            raise InvalidConfigError("epsilon must lie in [0, 1]")
        if self.target_sync < 1:
            raise InvalidConfigError("target_sync must be at least 1")
        if self.optimizer not in OPTIMIZERS:
            raise InvalidConfigError("Unknown optimizer: {}".format(self.optimizer))
        if self.loss not in LOSS_SCALES:
            raise InvalidConfigError("Unknown loss: {}".format(self.loss))
        return self

    @classmethod
    def from_config(cls, config) -> 'DqnConfig':
        section = config.dqn
        return cls(
            batch_size=section.batch_size,
            learning_rate=section.learning_rate,
            gamma=section.gamma,
            epsilon=section.epsilon,
            epsilon_decay=section.epsilon_decay,
            memory_size=section.memory_size,
            iterations=section.iterations,
            hidden1=section.hidden1,
            hidden2=section.hidden2,
            target_sync=section.target_sync,
            optimizer=section.optimizer,
            initial_bits=section.initial_bits,
            reward_offset=section.reward_offset,
            infeasible_reward=section.infeasible_reward,
            zero_init=section.zero_init,
            loss=section.loss,
        ).validate()


class TraceRow(NamedTuple):
    iter: int
    reward: float
    loss: float
    epsilon: float
    best_reward_so_far: float


class DqnResult(NamedTuple):
    best: Individual
    best_reward: float
    trace: List[TraceRow]


class RewardScale(NamedTuple):
    """Objective ranges spanned by the all-one and all-b_max allocations."""
    f1_min: float
    f1_max: float
    f2_min: float
    f2_max: float

    def reward(self, individual: Individual, offset: float, infeasible_reward: float) -> float:
        if not individual.feasible:
            return infeasible_reward
        f1, f2 = individual.objectives
        return _normalize(f1, self.f1_min, self.f1_max) \
            + _normalize(f2, self.f2_min, self.f2_max) - offset


def _normalize(value: float, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    return (value - lo) / (hi - lo)


def reward_scale(evaluator: Evaluator) -> RewardScale:
    cfg = evaluator.cfg
    low = evaluator.evaluate(BitAllocation.uniform(cfg, 1)).objectives
    high = evaluator.evaluate(BitAllocation.uniform(cfg, cfg.b_max)).objectives
    return RewardScale(
        f1_min=min(low.f1, high.f1),
        f1_max=max(low.f1, high.f1),
        f2_min=min(low.f2, high.f2),
        f2_max=max(low.f2, high.f2),
    )


def apply_action(state: np.ndarray, action: int, b_max: int) -> np.ndarray:
    """Action 2g raises group g by one bit, action 2g + 1 lowers it."""
    group, direction = divmod(action, 2)
    next_state = state.copy()
    next_state[group] = np.clip(next_state[group] + (1 if direction == 0 else -1), 1, b_max)
    return next_state


class DqnAgent:

    def __init__(self, evaluator: Evaluator, constraints: Constraints,
                 dqn_cfg: DqnConfig, seed: int):
        self.evaluator = evaluator
        self.constraints = constraints
        self.dqn_cfg = dqn_cfg.validate()
        self.cfg = evaluator.cfg
        self.rng = np.random.default_rng(seed)
        self.n_groups = self.cfg.n + self.cfg.k_dl
        self.n_actions = 2 * self.n_groups
        init_rng = None if dqn_cfg.zero_init else self.rng
        self.net = QNetwork(
            self.n_groups, dqn_cfg.hidden1, dqn_cfg.hidden2, self.n_actions, init_rng)
        self.target_net = QNetwork(
            self.n_groups, dqn_cfg.hidden1, dqn_cfg.hidden2, self.n_actions)
        self.target_net.copy_from(self.net)
        self.memory = ReplayMemory(dqn_cfg.memory_size, self.rng)
        self.optimizer = RmsProp() if dqn_cfg.optimizer == "rmsprop" else None
        self.scale = reward_scale(evaluator)
        self.steps = 0

    def features(self, state: np.ndarray) -> np.ndarray:
        return state / float(self.cfg.b_max)

    def choose_action(self, state: np.ndarray, epsilon: float) -> int:
        if self.rng.random() < epsilon:
            return int(self.rng.integers(self.n_actions))
        return int(np.argmax(self.net.predict(self.features(state))[0]))

    def individual(self, state: np.ndarray) -> Individual:
        allocation = BitAllocation.from_vector(self.cfg, state)
        return self.evaluator.individual(allocation, self.constraints)

    def reward(self, individual: Individual) -> float:
        return self.scale.reward(
            individual, self.dqn_cfg.reward_offset, self.dqn_cfg.infeasible_reward)

    def learn(self) -> float:
        if len(self.memory) < self.dqn_cfg.batch_size:
            return float("nan")
        batch = self.memory.sample(self.dqn_cfg.batch_size)
        loss = gradient_step(
            self.net, batch, self.target_net, self.dqn_cfg.learning_rate,
            self.dqn_cfg.gamma, self.optimizer, self.dqn_cfg.loss)
        self.steps += 1
        if self.steps % self.dqn_cfg.target_sync == 0:
            self.target_net.copy_from(self.net)
        return loss

    def run(self) -> DqnResult:
        initial_bits = min(max(self.dqn_cfg.initial_bits, 1), self.cfg.b_max)
        state = np.full(self.n_groups, initial_bits, dtype=int)
        best = self.individual(state)
        best_reward = self.reward(best)
        epsilon = self.dqn_cfg.epsilon
        trace = []
        for t in range(self.dqn_cfg.iterations):
            action = self.choose_action(state, epsilon)
            next_state = apply_action(state, action, self.cfg.b_max)
            candidate = self.individual(next_state)
            reward = self.reward(candidate)
            self.memory.push(Transition(
                state=self.features(state),
                action=action,
                reward=reward,
                next_state=self.features(next_state),
            ))
            loss = self.learn()
            if candidate.feasible and (not best.feasible or reward > best_reward):
                best, best_reward = candidate, reward
            trace.append(TraceRow(
                iter=t,
                reward=reward,
                loss=loss,
                epsilon=epsilon,
                best_reward_so_far=best_reward,
            ))
            if (t + 1) % PROGRESS_INTERVAL == 0:
                logger.info("DQN iteration {}: best reward {}".format(t + 1, best_reward))
            state = next_state
            epsilon *= self.dqn_cfg.epsilon_decay
        if not best.feasible:
            logger.warning("DQN visited no feasible allocation")
        return DqnResult(best=best, best_reward=best_reward, trace=trace)


def dqn_run(evaluator: Evaluator, constraints: Constraints, dqn_cfg: DqnConfig,
            seed: int) -> DqnResult:
    return DqnAgent(evaluator, constraints, dqn_cfg, seed).run()
