# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import numpy as np
import pytest

from nafdsim.core.exception import InvalidBitAllocationError
from nafdsim.core.quantizer import adc_gain_matrix
from nafdsim.core.quantizer import aqnm_variance
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.quantizer import gains
from nafdsim.core.quantizer import quant_coeff
from nafdsim.core.quantizer import quantize
from nafdsim.core.quantizer import rho
from nafdsim.core.system_config import SystemConfig


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.mark.parametrize("bits,expected", [
    (1, 0.3634),
    (2, 0.1175),
    (3, 0.0345),
    (4, 0.0095),
])
def test_rho_table(bits, expected):
    assert rho(bits) == expected


def test_rho_high_resolution():
    assert rho(5) == pytest.approx(np.pi * np.sqrt(3) / 2 * 4 ** -5)


def test_rho_high_resolution_literal():
    assert rho(5, "literal") == pytest.approx(np.sqrt(3) / (2 * np.pi) * 4 ** -5)


def test_rho_invalid_bits():
    with pytest.raises(InvalidBitAllocationError):
        rho(0)


def test_rho_decreasing():
    values = [rho(b) for b in range(1, 13)]

    assert all(a > b for a, b in zip(values, values[1:]))


def test_quant_coeff():
    coeff = quant_coeff(1)

    assert coeff.rho + coeff.gain == pytest.approx(1.0)
    assert coeff.gain == pytest.approx(0.6366)


def test_adc_gain_matrix():
    diag = adc_gain_matrix([1, 3], 2)

    assert diag.shape == (4,)
    assert np.allclose(diag, [0.6366, 0.6366, 0.9655, 0.9655])


def test_gains_vector():
    assert np.allclose(gains([2, 4]), [0.8825, 0.9905])


def test_quantize_full_gain_is_identity(rng):
    signal = np.array([1 + 1j, -2.0, 0.5j])

    out = quantize(signal, 1.0, np.abs(signal) ** 2, rng)

    assert np.allclose(out, signal)


def test_quantize_zero_input(rng):
    out = quantize(np.zeros(4), 0.6366, 0.0, rng)

    assert np.allclose(out, 0.0)


def test_quantize_negative_power(rng):
    with pytest.raises(ValueError):
        quantize(np.zeros(2), 0.5, -1.0, rng)


def test_quantize_noise_variance(rng):
    n = 200000
    out = quantize(np.zeros(n), 0.5, 1.0, rng)

    assert np.mean(np.abs(out) ** 2) == pytest.approx(aqnm_variance(0.5, 1.0), rel=0.02)
    assert abs(np.mean(out)) < 0.01


def test_uniform_allocation(cfg):
    allocation = BitAllocation.uniform(cfg, 4)

    assert allocation.ul_rau_bits == (4, 4, 4)
    assert allocation.dl_rau_bits == (4, 4, 4)
    assert allocation.dl_user_bits == (4, 4, 4)


def test_from_groups_vector(cfg):
    allocation = BitAllocation.from_groups(cfg, 7, 5, 6)

    assert allocation.to_vector() == (7, 7, 7, 5, 5, 5, 6, 6, 6)
    assert BitAllocation.from_vector(cfg, allocation.to_vector()) == allocation


def test_from_vector_wrong_length(cfg):
    with pytest.raises(InvalidBitAllocationError):
        BitAllocation.from_vector(cfg, [1, 2, 3])


def test_validate_out_of_range(cfg):
    allocation = BitAllocation.uniform(cfg, cfg.b_max + 1)

    with pytest.raises(InvalidBitAllocationError):
        allocation.validate(cfg)


def test_validate_wrong_group_size(cfg):
    allocation = BitAllocation(
        ul_rau_bits=(1, 1),
        dl_rau_bits=(1, 1, 1),
        dl_user_bits=(1, 1, 1),
    )

    with pytest.raises(InvalidBitAllocationError):
        allocation.validate(cfg)
