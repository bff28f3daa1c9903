# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
from collections import deque
from typing import NamedTuple

import numpy as np

from nafdsim.moop.qnetwork import Batch


class Transition(NamedTuple):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray


class ReplayMemory:
    """Bounded FIFO of transitions with uniform sampling."""

    def __init__(self, capacity: int, rng: np.random.Generator):
        self.capacity = capacity
        self.rng = rng
        self.memory = deque(maxlen=capacity)

    def push(self, transition: Transition) -> None:
        self.memory.append(transition)

    def sample(self, batch_size: int) -> Batch:
        size = min(batch_size, len(self.memory))
        indices = self.rng.choice(len(self.memory), size=size, replace=False)
        picked = [self.memory[i] for i in indices]
        return Batch(
            states=np.array([t.state for t in picked], dtype=float),
            actions=np.array([t.action for t in picked], dtype=int),
            rewards=np.array([t.reward for t in picked], dtype=float),
            next_states=np.array([t.next_state for t in picked], dtype=float),
        )

    def __len__(self) -> int:
        return len(self.memory)
