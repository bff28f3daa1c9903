# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging
from typing import NamedTuple
from typing import Optional
from typing import Sequence

import numpy as np

from nafdsim.core.beamforming import check_zf_dimensions
from nafdsim.core.estimation import bf_training_stats_all
from nafdsim.core.estimation import BfTrainingStats
from nafdsim.core.estimation import cross_gain_power
from nafdsim.core.estimation import cross_link_power
from nafdsim.core.estimation import dimension_loss
from nafdsim.core.estimation import energy_fractions
from nafdsim.core.estimation import interference_mmse
from nafdsim.core.estimation import InterferenceEstStats
from nafdsim.core.estimation import pilot_mmse_stats
from nafdsim.core.estimation import PilotEstStats
from nafdsim.core.estimation import training_variance
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.quantizer import gains
from nafdsim.core.scenario import ChannelStats
from nafdsim.core.system_config import CsiMode
from nafdsim.core.system_config import IcMode
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig


logger = logging.getLogger(__name__)


class RateReport(NamedTuple):
    """Per-user rates in bits/s/Hz for one allocation and scheme."""
    r_dl: np.ndarray
    r_ul: np.ndarray
    sum_se: float
    csi_mode: CsiMode
    ic_mode: IcMode

    @property
    def raw_sum(self) -> float:
        return float(np.sum(self.r_ul) + np.sum(self.r_dl))


def _interference_from_ul_users(stats: ChannelStats, cfg: SystemConfig) -> np.ndarray:
    return cfg.p_ul * np.sum(stats.lambda_i_user, axis=1)


def _user_gains(bits_user: Sequence[int], cfg: SystemConfig) -> np.ndarray:
    return gains(bits_user, cfg.high_res_formula)


def _uniform_cross_power(bf_stats: Sequence[BfTrainingStats], cfg: SystemConfig) -> np.ndarray:
    chi = np.array([s.chi for s in bf_stats])
    power = np.repeat(chi[:, None], cfg.k_dl, axis=1)
    np.fill_diagonal(power, 0.0)
    return power


def _dl_rate_derived(bf_stats: Sequence[BfTrainingStats], stats: ChannelStats,
                     cfg: SystemConfig, xi: np.ndarray, cross_power: np.ndarray,
                     estimated: bool) -> np.ndarray:
    ul_interference = _interference_from_ul_users(stats, cfg)
    rates = np.empty(cfg.k_dl)
    for k, s in enumerate(bf_stats):
        e2 = s.e_k ** 2
        f_k = training_variance(s, cfg, xi[k]) if estimated else 0.0
        interference = cfg.p_dl * (np.sum(cross_power[k]) + s.chi_bar - xi[k] * f_k) \
            + (1.0 - xi[k]) * cfg.p_dl * e2 + ul_interference[k] + cfg.sigma2_dl
        signal = xi[k] * cfg.p_dl * (e2 + f_k)
        rates[k] = np.log2(1.0 + signal / interference)
    return rates


def dl_rate_estimated(bf_stats: Sequence[BfTrainingStats], stats: ChannelStats,
                      cfg: SystemConfig, scheme: Scheme, bits_user: Sequence[int],
                      cross_power: Optional[np.ndarray] = None) -> np.ndarray:
    """Closed-form DL rate per user with estimated beamforming-training CSI.

    cross_power comes from cross_gain_power; without it every cross gain
    takes its user's chi.
    """
    if scheme is Scheme.ZF:
        check_zf_dimensions(cfg.n_dl * cfg.m, cfg.k_dl)
    if cfg.p_dl <= 0:
        return np.zeros(cfg.k_dl)
    xi = _user_gains(bits_user, cfg)
    if cfg.rate_formula != "printed":
        if cross_power is None:
            cross_power = _uniform_cross_power(bf_stats, cfg)
        return _dl_rate_derived(bf_stats, stats, cfg, xi, cross_power, estimated=True)
    ul_interference = _interference_from_ul_users(stats, cfg)
    rates = np.empty(cfg.k_dl)
    for k, s in enumerate(bf_stats):
        e2 = s.e_k ** 2
        f_k = cfg.p_dp * s.chi_bar ** 2 / (
            cfg.p_dp * (s.chi_bar + (1.0 - xi[k]) * e2) + cfg.sigma2_dp)
        a_k = (cfg.k_dl - 1) * xi[k] * cfg.p_dl * s.chi + ul_interference[k]
        b_k = (xi[k] * (1.0 - xi[k]) * cfg.p_dp * s.chi_bar * e2
               + xi[k] * s.chi_bar * cfg.sigma2_dp) / (
            s.chi_bar + (1.0 - xi[k]) * e2 + cfg.sigma2_dp / cfg.p_dl)
        c_k = (1.0 - xi[k]) * cfg.p_dl * (s.chi_bar + e2)
        signal = xi[k] * cfg.p_dl * (e2 + f_k)
        rates[k] = np.log2(1.0 + signal / (a_k + b_k + c_k + cfg.sigma2_dl))
    return rates


def dl_rate_statistical(bf_stats: Sequence[BfTrainingStats], stats: ChannelStats,
                        cfg: SystemConfig, scheme: Scheme, bits_user: Sequence[int],
                        cross_power: Optional[np.ndarray] = None) -> np.ndarray:
    """Closed-form DL rate per user when users only know the mean gain."""
    if scheme is Scheme.ZF:
        check_zf_dimensions(cfg.n_dl * cfg.m, cfg.k_dl)
    if cfg.p_dl <= 0:
        return np.zeros(cfg.k_dl)
    xi = _user_gains(bits_user, cfg)
    if cfg.rate_formula != "printed":
        if cross_power is None:
            cross_power = _uniform_cross_power(bf_stats, cfg)
        return _dl_rate_derived(bf_stats, stats, cfg, xi, cross_power, estimated=False)
    ul_interference = _interference_from_ul_users(stats, cfg)
    rates = np.empty(cfg.k_dl)
    for k, s in enumerate(bf_stats):
        e2 = s.e_k ** 2
        a_k = (cfg.k_dl - 1) * xi[k] * cfg.p_dl * s.chi + cfg.p_dl * s.chi_bar
        b_k = ul_interference[k] + (1.0 - xi[k]) * cfg.p_dl * e2
        signal = xi[k] * cfg.p_dl * e2
        rates[k] = np.log2(1.0 + signal / (a_k + b_k + cfg.sigma2_dl))
    return rates


def _ul_rate_printed(pilot_stats: PilotEstStats, interference_stats: InterferenceEstStats,
                     cfg: SystemConfig, scheme: Scheme, alpha: np.ndarray) -> np.ndarray:
    beta = pilot_stats.beta_ul
    eta = pilot_stats.eta_ul
    rho_res = interference_stats.rho_res[:, 0]
    eta_total = cfg.p_ul * np.sum(eta, axis=1)
    beta_total = cfg.p_ul * np.sum(beta, axis=1)
    rates = np.empty(cfg.k_ul)
    if scheme is Scheme.ZF:
        t_ul = dimension_loss(cfg.n_ul * cfg.m, cfg.k_ul)
        c_n = cfg.k_dl * cfg.p_dl * rho_res ** 2 + eta_total + cfg.sigma2_ul
        for k in range(cfg.k_ul):
            a_k = t_ul * cfg.p_ul * cfg.m * np.sum(alpha ** 2 * beta[:, k])
            b_k = t_ul * cfg.p_ul * cfg.m * np.sum(alpha * (1.0 - alpha) * beta[:, k])
            residual = np.sum(alpha * c_n) / cfg.n_ul
            rates[k] = np.log2(1.0 + a_k / (b_k + residual))
    else:
        for k in range(cfg.k_ul):
            a_k = cfg.p_ul * cfg.m * np.sum(alpha ** 2 * beta[:, k]) \
                + cfg.sigma2_ul / cfg.n_ul * np.sum(alpha)
            b_k = cfg.p_ul * cfg.m * np.sum(alpha * (1.0 - alpha) * beta[:, k])
            c_n = cfg.p_dl * rho_res + (beta_total - cfg.p_ul * beta[:, k]) + eta_total
            residual = np.sum(alpha * c_n) / cfg.n_ul
            rates[k] = np.log2(1.0 + a_k / (b_k + residual))
    return rates


def _ul_rate_derived(pilot_stats: PilotEstStats, interference_stats: InterferenceEstStats,
                     stats: ChannelStats, cfg: SystemConfig, scheme: Scheme,
                     alpha: np.ndarray) -> np.ndarray:
    """Per unit-norm combiner: signal over linear and quantization terms.

    A combiner puts its energy on the UL RAUs in proportion to the user's
    estimated channel variances. ZF removes the other users' estimated
    channels and keeps t_ul of the own-channel power.
    """
    beta = pilot_stats.beta_ul
    eta = pilot_stats.eta_ul
    lam = stats.lambda_ul
    weights = energy_fractions(beta)
    residual_cli = cfg.p_dl * np.sum(interference_stats.rho_res, axis=1)
    total_cli = cfg.p_dl * np.sum(interference_stats.power, axis=1)
    if scheme is Scheme.ZF:
        t_ul = dimension_loss(cfg.n_ul * cfg.m, cfg.k_ul)
    else:
        t_ul = 1.0
    rates = np.empty(cfg.k_ul)
    for k in range(cfg.k_ul):
        others = np.arange(cfg.k_ul) != k
        gain = cfg.m * beta[:, k]
        if np.sum(gain) <= 0:
            rates[k] = 0.0
            continue
        signal = t_ul * cfg.p_ul * np.sum(alpha * gain) ** 2 / np.sum(gain)
        leakage = 0.0 if scheme is Scheme.ZF else cfg.p_ul * np.sum(beta[:, others], axis=1)
        linear = leakage + cfg.p_ul * np.sum(eta, axis=1) + residual_cli + cfg.sigma2_ul
        # Own-channel term uses the fourth moment E|g_hat|^2 |g|^2.
        received = cfg.p_ul * (np.sum(lam, axis=1) + t_ul * beta[:, k] / alpha) \
            + total_cli + cfg.sigma2_ul
        interference = np.sum(
            weights[:, k] * (alpha ** 2 * linear + alpha * (1.0 - alpha) * received))
        rates[k] = np.log2(1.0 + signal / interference)
    return rates


def ul_rate(pilot_stats: PilotEstStats, interference_stats: InterferenceEstStats,
            stats: ChannelStats, cfg: SystemConfig, scheme: Scheme,
            bits_rau: Sequence[int]) -> np.ndarray:
    """Closed-form UL rate per user.

    The cancellation mode is carried by interference_stats: stats built
    with cancel=False give the no-cancellation rate.
    """
    if cfg.p_ul <= 0:
        return np.zeros(cfg.k_ul)
    alpha = gains(bits_rau, cfg.high_res_formula)
    if scheme is Scheme.ZF:
        check_zf_dimensions(cfg.n_ul * cfg.m, cfg.k_ul)
    if cfg.rate_formula == "printed":
        return _ul_rate_printed(pilot_stats, interference_stats, cfg, scheme, alpha)
    return _ul_rate_derived(pilot_stats, interference_stats, stats, cfg, scheme, alpha)


def sum_se(r_ul: Sequence[float], r_dl: Sequence[float], cfg: SystemConfig) -> float:
    prelog = max(cfg.t_frame - cfg.tau1 - cfg.tau2, 0) / cfg.t_frame
    return float(prelog * (np.sum(r_ul) + np.sum(r_dl)))


def rate_report(stats: ChannelStats, cfg: SystemConfig, allocation: BitAllocation,
                scheme: Scheme, csi_mode: CsiMode = CsiMode.ESTIMATED,
                ic_mode: IcMode = IcMode.WITH) -> RateReport:
    """Closed-form rates of every user for one allocation."""
    theta_ul = gains(allocation.ul_rau_bits, cfg.high_res_formula)
    theta_dl = gains(allocation.dl_rau_bits, cfg.high_res_formula)
    xi = gains(allocation.dl_user_bits, cfg.high_res_formula)
    pilot_stats = pilot_mmse_stats(stats, cfg, theta_ul, theta_dl)
    bf_stats = bf_training_stats_all(pilot_stats, cfg, scheme, xi)
    cross_power = cross_gain_power(stats, pilot_stats, bf_stats, cfg, scheme)
    if csi_mode is CsiMode.ESTIMATED:
        r_dl = dl_rate_estimated(
            bf_stats, stats, cfg, scheme, allocation.dl_user_bits, cross_power)
    else:
        r_dl = dl_rate_statistical(
            bf_stats, stats, cfg, scheme, allocation.dl_user_bits, cross_power)
    interference_stats = interference_mmse(
        stats, cfg, theta_ul, cancel=ic_mode is IcMode.WITH,
        stream_power=cross_link_power(stats, pilot_stats, cfg))
    r_ul = ul_rate(pilot_stats, interference_stats, stats, cfg, scheme,
                   allocation.ul_rau_bits)
    return RateReport(
        r_dl=r_dl,
        r_ul=r_ul,
        sum_se=sum_se(r_ul, r_dl, cfg),
        csi_mode=csi_mode,
        ic_mode=ic_mode,
    )
