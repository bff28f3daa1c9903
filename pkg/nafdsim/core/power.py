# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging
from typing import NamedTuple

import numpy as np

from nafdsim.core.exception import InvalidConfigError
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.rates import RateReport
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig


logger = logging.getLogger(__name__)


OSCILLATOR_POLICIES = ("distributed", "colocated")


class PowerParams(NamedTuple):
    p_rau: float = 0.1
    p_ue: float = 0.1
    p_syn: float = 1.0
    l_rau: float = 12.8e9
    xi_amp: float = 0.4
    p0: float = 0.825
    p_bt: float = 0.25e-9
    a0: float = 1e-4
    a1: float = 0.02
    oscillator_policy: str = "distributed"
    ee_prelog: bool = False

    def rho_syn(self, cfg: SystemConfig) -> int:
        """Number of oscillators: one per RAU unless co-located."""
        return 1 if self.oscillator_policy == "colocated" else cfg.n

    def validate(self) -> 'PowerParams':
        for name in ("p_rau", "p_ue", "p_syn", "l_rau", "p0", "p_bt"):
            if getattr(self, name) < 0:
                raise InvalidConfigError("{} must be non-negative".format(name))
        if not 0 < self.xi_amp <= 1:
            raise InvalidConfigError(
                "Amplifier efficiency must lie in (0, 1], got {}".format(self.xi_amp))
        if self.oscillator_policy not in OSCILLATOR_POLICIES:
            raise InvalidConfigError(
                "Unknown oscillator policy: {}".format(self.oscillator_policy))
        return self

    @classmethod
    def from_config(cls, config) -> 'PowerParams':
        power = config.power
        return cls(
            p_rau=power.p_rau,
            p_ue=power.p_ue,
            p_syn=power.p_syn,
            l_rau=power.l_rau,
            xi_amp=power.xi_amp,
            p0=power.p0,
            p_bt=power.p_bt,
            a0=power.a0,
            a1=power.a1,
            oscillator_policy=power.oscillator_policy,
            ee_prelog=power.ee_prelog,
        ).validate()


class PowerBreakdown(NamedTuple):
    p_tc: float
    p_t: float
    p_lp: float
    p_bh: float

    @property
    def total(self) -> float:
        return self.p_tc + self.p_t + self.p_lp + self.p_bh


def p_adc_total(bits: BitAllocation, cfg: SystemConfig, params: PowerParams) -> float:
    rau_bits = np.array(bits.ul_rau_bits + bits.dl_rau_bits, dtype=float)
    user_bits = np.array(bits.dl_user_bits, dtype=float)
    raus = np.sum(params.a0 * cfg.m * 2.0 ** rau_bits + params.a1)
    users = np.sum(params.a0 * 2.0 ** user_bits + params.a1)
    return float(raus + users)


def p_tc(bits: BitAllocation, cfg: SystemConfig, params: PowerParams) -> float:
    return (cfg.n * cfg.m * params.p_rau
            + params.rho_syn(cfg) * params.p_syn
            + cfg.k * params.p_ue
            + p_adc_total(bits, cfg, params))


def p_transmit(cfg: SystemConfig, params: PowerParams) -> float:
    duty = cfg.t_data / (cfg.t_frame * params.xi_amp)
    return cfg.k_ul * duty * cfg.p_ul + cfg.k_dl * duty * cfg.p_dl


def p_linear_processing(cfg: SystemConfig, params: PowerParams, scheme: Scheme) -> float:
    tau = cfg.tau1 + cfg.tau2
    wmnk = cfg.bandwidth_w * cfg.m * cfg.n * cfg.k
    data = (cfg.t_frame - tau) / cfg.t_frame * 2.0 * wmnk / params.l_rau
    if scheme is Scheme.ZF:
        training = 3.0 * wmnk / params.l_rau
    else:
        training = wmnk * (3 * cfg.k + 1) / params.l_rau
    return data + tau / cfg.t_frame * training


def p_backhaul(sum_rate_hz: float, cfg: SystemConfig, params: PowerParams) -> float:
    return cfg.n * (params.p0 + cfg.bandwidth_w * params.p_bt * sum_rate_hz)


def power_breakdown(rates: RateReport, bits: BitAllocation, cfg: SystemConfig,
                    params: PowerParams, scheme: Scheme) -> PowerBreakdown:
    return PowerBreakdown(
        p_tc=p_tc(bits, cfg, params),
        p_t=p_transmit(cfg, params),
        p_lp=p_linear_processing(cfg, params, scheme),
        p_bh=p_backhaul(rates.raw_sum, cfg, params),
    )


def energy_efficiency(rates: RateReport, bits: BitAllocation, cfg: SystemConfig,
                      params: PowerParams, scheme: Scheme) -> float:
    """Bits per Joule: W times the raw rate sum over the total power.

    With params.ee_prelog the rate sum carries the pre-log factor.
    """
    total = power_breakdown(rates, bits, cfg, params, scheme).total
    rate_sum = rates.raw_sum
    if params.ee_prelog:
        rate_sum *= cfg.prelog
    return cfg.bandwidth_w * rate_sum / total
