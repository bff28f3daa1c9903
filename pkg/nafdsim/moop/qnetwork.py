# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
"""Two-hidden-layer ReLU network with analytic backpropagation."""
from typing import Dict
from typing import NamedTuple
from typing import Optional
from typing import Tuple

import numpy as np


PARAM_NAMES = ("w1", "b1", "w2", "b2", "w3", "b3")
LOSS_SCALES = {"half_mse": 0.5, "mse": 1.0}


class Batch(NamedTuple):
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray


def relu(x):
    return np.maximum(x, 0.0)


def relu_grad(x):
    return np.where(x > 0, 1.0, 0.0)


class QNetwork:
    """Q(s, .) for every action; rows of the input are samples.

    Weights are He-initialized from rng, or all zero when rng is None.
    """

    def __init__(self, n_inputs: int, hidden1: int, hidden2: int, n_actions: int,
                 rng: Optional[np.random.Generator] = None):
        shapes = {
            "w1": (hidden1, n_inputs), "b1": (hidden1,),
            "w2": (hidden2, hidden1), "b2": (hidden2,),
            "w3": (n_actions, hidden2), "b3": (n_actions,),
        }
        self.params: Dict[str, np.ndarray] = {}
        for name, shape in shapes.items():
            if rng is None or name.startswith("b"):
                self.params[name] = np.zeros(shape)
            else:
                self.params[name] = rng.standard_normal(shape) * np.sqrt(2.0 / shape[1])

    @property
    def n_actions(self) -> int:
        return self.params["w3"].shape[0]

    @property
    def parameter_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy_from(self, other: 'QNetwork') -> None:
        for name in PARAM_NAMES:
            self.params[name] = other.params[name].copy()

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, tuple]:
        p = self.params
        x = np.atleast_2d(x)
        z1 = x @ p["w1"].T + p["b1"]
        a1 = relu(z1)
        z2 = a1 @ p["w2"].T + p["b2"]
        a2 = relu(z2)
        q = a2 @ p["w3"].T + p["b3"]
        return q, (x, z1, a1, z2, a2)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, dq: np.ndarray, memory: tuple) -> Dict[str, np.ndarray]:
        p = self.params
        x, z1, a1, z2, a2 = memory
        grads = {"w3": dq.T @ a2, "b3": dq.sum(axis=0)}
        dz2 = relu_grad(z2) * (dq @ p["w3"])
        grads["w2"] = dz2.T @ a1
        grads["b2"] = dz2.sum(axis=0)
        dz1 = relu_grad(z1) * (dz2 @ p["w2"])
        grads["w1"] = dz1.T @ x
        grads["b1"] = dz1.sum(axis=0)
        return grads

    def loss(self, states: np.ndarray, actions: np.ndarray, targets: np.ndarray,
             loss_name: str = "half_mse") -> float:
        q = self.predict(states)
        taken = q[np.arange(len(actions)), actions]
        return float(LOSS_SCALES[loss_name] * np.mean((taken - targets) ** 2))

    def loss_and_gradients(self, states: np.ndarray, actions: np.ndarray, targets: np.ndarray,
                           loss_name: str = "half_mse") -> Tuple[float, Dict[str, np.ndarray]]:
        """Scaled mean squared error on the taken actions and its gradients.

        "half_mse" is 0.5 * mean(err ** 2), whose gradient is err / batch;
        "mse" drops the 0.5 and doubles the gradient.
        """
        scale = LOSS_SCALES[loss_name]
        q, memory = self.forward(states)
        rows = np.arange(len(actions))
        error = q[rows, actions] - targets
        dq = np.zeros_like(q)
        dq[rows, actions] = 2.0 * scale * error / len(actions)
        return float(scale * np.mean(error ** 2)), self.backward(dq, memory)


class RmsProp:

    def __init__(self, decay: float = 0.9, eps: float = 1e-8):
        self.decay = decay
        self.eps = eps
        self.cache: Dict[str, np.ndarray] = {}

    def scale(self, name: str, grad: np.ndarray) -> np.ndarray:
        cache = self.cache.get(name, np.zeros_like(grad))
        cache = self.decay * cache + (1.0 - self.decay) * grad ** 2
        self.cache[name] = cache
        return grad / (np.sqrt(cache) + self.eps)


def td_targets(batch: Batch, target_net: QNetwork, gamma: float) -> np.ndarray:
    next_q = target_net.predict(batch.next_states)
    return batch.rewards + gamma * np.max(next_q, axis=1)


def gradient_step(net: QNetwork, batch: Batch, target_net: QNetwork, lr: float,
                  gamma: float, optimizer: Optional[RmsProp] = None,
                  loss_name: str = "half_mse") -> float:
    """One update of net towards r + gamma * max Q_target(s', .).

    The default loss is 0.5 * mean((Q(s, a) - target) ** 2), so its
    gradient carries no factor of two; loss_name="mse" uses the unscaled
    mean. Plain gradient descent unless an optimizer is given. Returns
    the loss before the update.
    """
    if len(batch.actions) == 0:
        raise ValueError("gradient_step needs a non-empty batch")
    targets = td_targets(batch, target_net, gamma)
    loss, grads = net.loss_and_gradients(batch.states, batch.actions, targets, loss_name)
    for name in PARAM_NAMES:
        step = grads[name] if optimizer is None else optimizer.scale(name, grads[name])
        net.params[name] = net.params[name] - lr * step
    return loss
