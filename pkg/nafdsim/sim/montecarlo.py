# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
"""Monte-Carlo oracle for the closed-form rates.

Every trial draws channels, runs both estimation stages on the sampled
signals and evaluates the instantaneous SINR with data symbols averaged
out. Each trial owns its RNG substreams, so results do not depend on the
number of workers.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable
from typing import List
from typing import NamedTuple

import numpy as np
from scipy.stats import norm

from nafdsim.core.beamforming import combiners
from nafdsim.core.beamforming import precoders
from nafdsim.core.channels import draw_channels
from nafdsim.core.estimation import bf_training_stats_all
from nafdsim.core.estimation import cross_gain_power
from nafdsim.core.estimation import cross_link_power
from nafdsim.core.estimation import f_hat_realize
from nafdsim.core.estimation import mu_hat_realize
from nafdsim.core.estimation import pilot_estimate
from nafdsim.core.estimation import pilot_mmse_stats
from nafdsim.core.exception import InvalidConfigError
from nafdsim.core.quantizer import adc_gain_matrix
from nafdsim.core.quantizer import aqnm_variance
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.quantizer import gains
from nafdsim.core.scenario import ChannelStats
from nafdsim.core.system_config import CsiMode
from nafdsim.core.system_config import IcMode
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig
from nafdsim.core.util import STREAM_BF_TRAINING
from nafdsim.core.util import STREAM_INTERFERENCE_PILOT
from nafdsim.core.util import STREAM_PILOT_DL
from nafdsim.core.util import STREAM_PILOT_UL
from nafdsim.core.util import substream


logger = logging.getLogger(__name__)


MIN_REFERENCE = 1e-12


class McConfig(NamedTuple):
    trials: int = 2000
    seed: int = 0
    ci_level: float = 0.95
    workers: int = 1

    def validate(self) -> 'McConfig':
        if self.trials < 1:
            raise InvalidConfigError("trials must be at least 1")
        if not 0 < self.ci_level < 1:
            raise InvalidConfigError("ci_level must lie in (0, 1)")
        if self.workers < 1:
            raise InvalidConfigError("workers must be at least 1")
        return self

    @classmethod
    def from_config(cls, config, seed: int) -> 'McConfig':
        return cls(
            trials=config.montecarlo.trials,
            seed=seed,
            ci_level=config.montecarlo.ci_level,
            workers=config.montecarlo.workers,
        ).validate()


class McResult(NamedTuple):
    mean: float
    half_width: float
    trials_used: int


class ComparisonRecord(NamedTuple):
    closed_form: float
    mc_mean: float
    mc_half_width: float
    rel_err: float
    passed: bool


def _stack(per_rau: np.ndarray) -> np.ndarray:
    """(rau, user, m) -> (rau * m, user)."""
    n, k, m = per_rau.shape
    return per_rau.transpose(0, 2, 1).reshape(n * m, k)


def _run_trials(trial: Callable[[int], np.ndarray], mc: McConfig) -> List[McResult]:
    mc.validate()
    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as executor:
            rows = list(executor.map(trial, range(mc.trials)))
    else:
        rows = [trial(t) for t in range(mc.trials)]
    samples = np.vstack(rows)
    means = np.mean(samples, axis=0)
    if mc.trials > 1:
        z = norm.ppf(0.5 + mc.ci_level / 2.0)
        half_widths = z * np.std(samples, axis=0, ddof=1) / np.sqrt(mc.trials)
    else:
        half_widths = np.zeros_like(means)
    return [
        McResult(mean=float(mean), half_width=float(hw), trials_used=mc.trials)
        for mean, hw in zip(means, half_widths)
    ]


def simulate_dl_rate(cfg: SystemConfig, stats: ChannelStats, scheme: Scheme,
                     bits: BitAllocation, csi_mode: CsiMode, mc: McConfig) -> List[McResult]:
    """Average instantaneous DL rate per DL user."""
    theta_ul = gains(bits.ul_rau_bits, cfg.high_res_formula)
    theta_dl = gains(bits.dl_rau_bits, cfg.high_res_formula)
    xi = gains(bits.dl_user_bits, cfg.high_res_formula)
    pilot_stats = pilot_mmse_stats(stats, cfg, theta_ul, theta_dl)
    bf_stats = bf_training_stats_all(pilot_stats, cfg, scheme, xi)
    cross_power = cross_gain_power(stats, pilot_stats, bf_stats, cfg, scheme)
    e_k = np.array([s.e_k for s in bf_stats])
    own = np.eye(cfg.k_dl, dtype=bool)

    def trial(t: int) -> np.ndarray:
        key = (mc.seed, t)
        realization = draw_channels(stats, cfg, key)
        g_hat, _ = pilot_estimate(
            realization.g_dl, stats.lambda_dl, theta_dl, cfg,
            substream(key, STREAM_PILOT_DL))
        w = precoders(_stack(g_hat), scheme)
        mu = realization.stacked_dl().conj().T @ w
        if csi_mode is CsiMode.ESTIMATED:
            mu_hat = mu_hat_realize(
                mu, bf_stats, cfg, xi, substream(key, STREAM_BF_TRAINING), cross_power)
        else:
            mu_hat = np.diag(e_k).astype(complex)

        ul_power = cfg.p_ul * np.sum(np.abs(realization.u_i_user) ** 2, axis=1)
        inst_power = cfg.p_dl * np.sum(np.abs(mu) ** 2, axis=1) + ul_power + cfg.sigma2_dl
        signal = cfg.p_dl * np.abs(np.diag(mu_hat)) ** 2
        leakage = cfg.p_dl * np.sum(np.where(own, 0.0, np.abs(mu_hat) ** 2), axis=1)
        error = cfg.p_dl * np.sum(np.abs(mu - mu_hat) ** 2, axis=1)
        quant_noise = aqnm_variance(xi, inst_power) / xi ** 2
        sinr = signal / (leakage + error + ul_power + cfg.sigma2_dl + quant_noise)
        return np.log2(1.0 + sinr)

    results = _run_trials(trial, mc)
    logger.debug("DL Monte-Carlo {} {} {}: {}".format(
        scheme.value, csi_mode.value, bits, results))
    return results


def simulate_ul_rate(cfg: SystemConfig, stats: ChannelStats, scheme: Scheme,
                     bits: BitAllocation, ic_mode: IcMode, mc: McConfig) -> List[McResult]:
    """Average instantaneous UL rate per UL user."""
    alpha = gains(bits.ul_rau_bits, cfg.high_res_formula)
    theta_dl = gains(bits.dl_rau_bits, cfg.high_res_formula)
    antenna_gains = adc_gain_matrix(bits.ul_rau_bits, cfg.m, cfg.high_res_formula)
    stream_power = cross_link_power(
        stats, pilot_mmse_stats(stats, cfg, alpha, theta_dl), cfg)
    own = np.eye(cfg.k_ul, dtype=bool)

    def trial(t: int) -> np.ndarray:
        key = (mc.seed, t)
        realization = draw_channels(stats, cfg, key)
        g_hat_ul, g_err_ul = pilot_estimate(
            realization.g_ul, stats.lambda_ul, alpha, cfg,
            substream(key, STREAM_PILOT_UL))
        g_hat_dl, _ = pilot_estimate(
            realization.g_dl, stats.lambda_dl, theta_dl, cfg,
            substream(key, STREAM_PILOT_DL))
        w = precoders(_stack(g_hat_dl), scheme)
        f = realization.stacked_interference() @ w
        if ic_mode is IcMode.WITH:
            _, f_residual = f_hat_realize(
                f, stream_power, cfg, antenna_gains, substream(key, STREAM_INTERFERENCE_PILOT))
        else:
            f_residual = f

        g_hat = _stack(g_hat_ul)
        g_err = _stack(g_err_ul)
        g_true = realization.stacked_ul()
        v = combiners(g_hat, scheme)
        q = antenna_gains[:, None] * v

        inst_power = cfg.p_ul * np.sum(np.abs(g_true) ** 2, axis=1) \
            + cfg.p_dl * np.sum(np.abs(f) ** 2, axis=1) + cfg.sigma2_ul
        quant_var = aqnm_variance(antenna_gains, inst_power)

        through_hat = np.abs(q.conj().T @ g_hat) ** 2
        signal = cfg.p_ul * np.diag(through_hat)
        leakage = cfg.p_ul * np.sum(np.where(own, 0.0, through_hat), axis=1)
        error = cfg.p_ul * np.sum(np.abs(q.conj().T @ g_err) ** 2, axis=1)
        cross_link = cfg.p_dl * np.sum(np.abs(q.conj().T @ f_residual) ** 2, axis=1)
        noise = cfg.sigma2_ul * np.sum(np.abs(q) ** 2, axis=0)
        quant_noise = np.abs(v.conj().T) ** 2 @ quant_var
        sinr = signal / (leakage + error + cross_link + noise + quant_noise)
        return np.log2(1.0 + sinr)

    results = _run_trials(trial, mc)
    logger.debug("UL Monte-Carlo {} {} {}: {}".format(
        scheme.value, ic_mode.value, bits, results))
    return results


def compare_closed_form(closed: float, mc: McResult, tolerance: float = 0.10) -> ComparisonRecord:
    rel_err = abs(closed - mc.mean) / max(abs(mc.mean), MIN_REFERENCE)
    return ComparisonRecord(
        closed_form=float(closed),
        mc_mean=mc.mean,
        mc_half_width=mc.half_width,
        rel_err=float(rel_err),
        passed=bool(rel_err <= tolerance),
    )
