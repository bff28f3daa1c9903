# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging
from typing import NamedTuple
from typing import Sequence

import numpy as np

from nafdsim.core.exception import InvalidBitAllocationError
from nafdsim.core.system_config import SystemConfig


logger = logging.getLogger(__name__)


DEFAULT_B_MAX = 12

RHO_TABLE = {
    1: 0.3634,
    2: 0.1175,
    3: 0.0345,
    4: 0.0095,
}

STANDARD_HIGH_RES_FACTOR = np.pi * np.sqrt(3.0) / 2.0
LITERAL_HIGH_RES_FACTOR = np.sqrt(3.0) / (2.0 * np.pi)


class BitAllocation(NamedTuple):
    """ADC resolutions of the UL RAUs, DL RAUs and DL users."""
    ul_rau_bits: tuple
    dl_rau_bits: tuple
    dl_user_bits: tuple

    @classmethod
    def uniform(cls, cfg: SystemConfig, bits: int) -> 'BitAllocation':
        return cls.from_groups(cfg, bits, bits, bits)

    @classmethod
    def from_groups(cls, cfg: SystemConfig, ul_rau: int, dl_rau: int,
                    dl_user: int) -> 'BitAllocation':
        return cls(
            ul_rau_bits=(int(ul_rau),) * cfg.n_ul,
            dl_rau_bits=(int(dl_rau),) * cfg.n_dl,
            dl_user_bits=(int(dl_user),) * cfg.k_dl,
        )

    @classmethod
    def from_vector(cls, cfg: SystemConfig, vector: Sequence[int]) -> 'BitAllocation':
        vector = [int(b) for b in vector]
        if len(vector) != cfg.n + cfg.k_dl:
            raise InvalidBitAllocationError(
                "Expected {} entries, got {}".format(cfg.n + cfg.k_dl, len(vector)))
        return cls(
            ul_rau_bits=tuple(vector[:cfg.n_ul]),
            dl_rau_bits=tuple(vector[cfg.n_ul:cfg.n]),
            dl_user_bits=tuple(vector[cfg.n:]),
        )

    def to_vector(self) -> tuple:
        return tuple(self.ul_rau_bits) + tuple(self.dl_rau_bits) + tuple(self.dl_user_bits)

    def validate(self, cfg: SystemConfig) -> 'BitAllocation':
        shapes = (
            (len(self.ul_rau_bits), cfg.n_ul),
            (len(self.dl_rau_bits), cfg.n_dl),
            (len(self.dl_user_bits), cfg.k_dl),
        )
        for got, expected in shapes:
            if got != expected:
                raise InvalidBitAllocationError(
                    "Allocation {} does not match the scenario sizes".format(self))
        for b in self.to_vector():
            if not 1 <= b <= cfg.b_max:
                raise InvalidBitAllocationError(
                    "Bit width {} outside [1, {}]".format(b, cfg.b_max))
        return self


class QuantCoeff(NamedTuple):
    rho: float
    gain: float


def rho(bits: int, high_res_formula: str = "standard") -> float:
    """Distortion factor of a b-bit quantizer under the additive
    quantization noise model.

    Args:
        bits: converter resolution, at least 1.
        high_res_formula: "standard" for (pi*sqrt(3)/2)*4^-b, "literal"
            for sqrt(3)/(2*pi)*4^-b. Only used above 4 bits.

    Returns:
        float: the distortion factor in (0, 1).

    Raises:
        InvalidBitAllocationError: if bits < 1.
    """
    if bits < 1:
        raise InvalidBitAllocationError(
            "Bit width must be at least 1, got {}".format(bits))
    if bits in RHO_TABLE:
        return RHO_TABLE[bits]
    if high_res_formula == "literal":
        factor = LITERAL_HIGH_RES_FACTOR
    else:
        factor = STANDARD_HIGH_RES_FACTOR
    return float(factor * 4.0 ** (-bits))


def quant_coeff(bits: int, high_res_formula: str = "standard") -> QuantCoeff:
    r = rho(bits, high_res_formula)
    return QuantCoeff(rho=r, gain=1.0 - r)


def gains(bits: Sequence[int], high_res_formula: str = "standard") -> np.ndarray:
    return np.array([quant_coeff(b, high_res_formula).gain for b in bits])


def adc_gain_matrix(bits: Sequence[int], m: int,
                    high_res_formula: str = "standard") -> np.ndarray:
    """Diagonal of diag(alpha_1..alpha_N) kron I_M as a vector."""
    return np.repeat(gains(bits, high_res_formula), m)


def aqnm_variance(gain, inst_power):
    """Per-entry variance of the additive quantization noise."""
    return np.asarray(gain) * (1.0 - np.asarray(gain)) * np.asarray(inst_power)


def quantize(signal, gain, inst_power, rng: np.random.Generator) -> np.ndarray:
    """Apply the additive quantization noise model.

    Returns gain * signal + n_q, where n_q is circularly-symmetric complex
    Gaussian with per-entry variance gain * (1 - gain) * inst_power.
    """
    signal = np.asarray(signal, dtype=complex)
    inst_power = np.broadcast_to(np.asarray(inst_power, dtype=float), signal.shape)
    if np.any(inst_power < 0):
        raise ValueError("Instantaneous power must be non-negative")
    gain = np.broadcast_to(np.asarray(gain, dtype=float), signal.shape)
    std = np.sqrt(aqnm_variance(gain, inst_power) / 2.0)
    noise = std * (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape))
    return gain * signal + noise
