# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
from typing import Sequence
from typing import Union

import numpy as np


# Substream keys, one per independent random source inside a trial.
STREAM_GEOMETRY = 0
STREAM_G_UL = 1
STREAM_G_DL = 2
STREAM_G_I_RAU = 3
STREAM_U_I_USER = 4
STREAM_PILOT_UL = 5
STREAM_PILOT_DL = 6
STREAM_BF_TRAINING = 7
STREAM_INTERFERENCE_PILOT = 8

SeedLike = Union[int, Sequence[int]]


def seed_key(seed: SeedLike) -> list:
    if isinstance(seed, (int, np.integer)):
        return [int(seed)]
    return [int(s) for s in seed]


def substream(seed: SeedLike, stream: int) -> np.random.Generator:
    """Independent generator for one (seed..., stream) key.

    The key is hashed by numpy's SeedSequence, so generators derived for
    different trials or link classes never share state.
    """
    return np.random.default_rng(seed_key(seed) + [stream])


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with unit variance."""
    real = rng.standard_normal(shape)
    imag = rng.standard_normal(shape)
    return (real + 1j * imag) / np.sqrt(2.0)
