# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
"""Two-stage channel estimation.

Closed-form second-order statistics feed the rate expressions; the
``*_realize`` functions run the same estimators on sampled channels for
the Monte-Carlo oracle.
"""
import logging
from typing import List
from typing import NamedTuple
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from nafdsim.core.beamforming import check_zf_dimensions
from nafdsim.core.quantizer import quantize
from nafdsim.core.scenario import ChannelStats
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig


logger = logging.getLogger(__name__)


class PilotEstStats(NamedTuple):
    """Estimate (beta) and error (eta) variances per (RAU, user) and mode."""
    beta_ul: np.ndarray
    eta_ul: np.ndarray
    beta_dl: np.ndarray
    eta_dl: np.ndarray


class PilotEstimate(NamedTuple):
    g_hat_ul: np.ndarray
    g_err_ul: np.ndarray
    g_hat_dl: np.ndarray
    g_err_dl: np.ndarray


class GammaPair(NamedTuple):
    shape: float
    scale: float

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale ** 2


class BfTrainingStats(NamedTuple):
    e_k: float
    chi_bar: float
    chi_tilde: float
    chi: float
    t_dl: float
    t_ul: float


class InterferenceEstStats(NamedTuple):
    """delta[j, i] and rho_res[j, i] per (UL RAU j, DL user i)."""
    delta: np.ndarray
    rho_res: np.ndarray

    @property
    def power(self) -> np.ndarray:
        """Per-antenna power of the interference before cancellation."""
        return self.rho_res + self.delta ** 2


# Stage one: UL pilots.

def pilot_variances(lam, theta, cfg: SystemConfig) -> Tuple[np.ndarray, np.ndarray]:
    """beta and eta for large-scale gains lam seen through ADC gains theta.

    theta broadcasts against lam along the RAU axis (axis 0).
    """
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 1 and lam.ndim == 2:
        theta = theta[:, None]
    denom = cfg.p_up * lam + cfg.sigma2_up
    beta = cfg.p_up * theta * lam ** 2 / denom
    if cfg.eta_formula == "printed":
        eta = ((1.0 - theta) * cfg.p_up * lam + lam * cfg.sigma2_up) / denom
    else:
        eta = lam - beta
    return beta, eta


def pilot_mmse_stats(stats: ChannelStats, cfg: SystemConfig,
                     theta_ul: Sequence[float], theta_dl: Sequence[float]) -> PilotEstStats:
    beta_ul, eta_ul = pilot_variances(stats.lambda_ul, theta_ul, cfg)
    beta_dl, eta_dl = pilot_variances(stats.lambda_dl, theta_dl, cfg)
    return PilotEstStats(
        beta_ul=beta_ul,
        eta_ul=eta_ul,
        beta_dl=beta_dl,
        eta_dl=eta_dl,
    )


def pilot_estimate(g: np.ndarray, lam: np.ndarray, theta: Sequence[float],
                   cfg: SystemConfig, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Quantized pilot reception and scalar MMSE for one link class.

    g has shape (rau, user, m); after despreading every entry sees
    sqrt(p_up) g + n, quantized with its RAU's gain.
    """
    theta = np.asarray(theta, dtype=float)[:, None, None]
    lam = np.asarray(lam, dtype=float)[..., None]
    noise = np.sqrt(cfg.sigma2_up / 2.0) * (
        rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    unquantized = np.sqrt(cfg.p_up) * g + noise
    inst_power = cfg.p_up * np.abs(g) ** 2 + cfg.sigma2_up
    y = quantize(unquantized, theta, inst_power, rng)
    # The ADC gain cancels between the cross- and auto-covariance.
    g_hat = np.sqrt(cfg.p_up) * lam / (cfg.p_up * lam + cfg.sigma2_up) * y
    return g_hat, g - g_hat


def pilot_mmse_realize(realization, stats: ChannelStats, cfg: SystemConfig,
                       theta_ul: Sequence[float], theta_dl: Sequence[float],
                       rng_ul: np.random.Generator,
                       rng_dl: np.random.Generator) -> PilotEstimate:
    g_hat_ul, g_err_ul = pilot_estimate(
        realization.g_ul, stats.lambda_ul, theta_ul, cfg, rng_ul)
    g_hat_dl, g_err_dl = pilot_estimate(
        realization.g_dl, stats.lambda_dl, theta_dl, cfg, rng_dl)
    return PilotEstimate(
        g_hat_ul=g_hat_ul,
        g_err_ul=g_err_ul,
        g_hat_dl=g_hat_dl,
        g_err_dl=g_err_dl,
    )


def energy_fractions(beta: np.ndarray) -> np.ndarray:
    """Share of each beamformer's energy on each RAU, per column.

    beta has shape (rau, user); an all-zero column splits evenly.
    """
    beta = np.asarray(beta, dtype=float)
    total = np.sum(beta, axis=0, keepdims=True)
    even = np.full_like(beta, 1.0 / beta.shape[0])
    return np.divide(beta, total, out=even, where=total > 0)


# Gamma moment matching.

def gamma_sum(pairs: Sequence[Tuple[float, float]]) -> GammaPair:
    """Match a Gamma law to a sum of independent Gamma(m_i, sigma2_i) terms.

    Each term is the squared norm of an m_i-dimensional complex Gaussian
    vector with per-entry variance sigma2_i. Mean and variance of the sum
    are preserved exactly.
    """
    if len(pairs) == 0:
        raise ValueError("gamma_sum needs at least one component")
    m = np.array([p[0] for p in pairs], dtype=float)
    s = np.array([p[1] for p in pairs], dtype=float)
    first = np.sum(m * s)
    second = np.sum(m * s ** 2)
    return GammaPair(shape=float(first ** 2 / second), scale=float(second / first))


def gamma_project(pair: GammaPair, m: int, s: int) -> GammaPair:
    """Gamma law of the power left after projecting onto s of m dimensions."""
    if not 1 <= s <= m:
        raise ValueError("Projection dimension {} outside [1, {}]".format(s, m))
    return GammaPair(shape=pair.shape * s / m, scale=pair.scale)


def nakagami_mean(pair: GammaPair) -> float:
    """E[sqrt(X)] for X ~ Gamma(k, theta)."""
    if pair.shape <= 0 or pair.scale <= 0:
        raise ValueError("Gamma parameters must be positive: {}".format(pair))
    log_ratio = gammaln(pair.shape + 0.5) - gammaln(pair.shape)
    return float(np.exp(log_ratio) * np.sqrt(pair.scale))


# Stage two: DL beamforming training.

def dimension_loss(antennas: int, users: int) -> float:
    return (antennas - users + 1) / antennas


def bf_gamma_pairs(pilot_stats: PilotEstStats, cfg: SystemConfig,
                   user: int) -> Tuple[GammaPair, GammaPair]:
    """Gamma laws of the estimated and error channel powers of a DL user,
    summed over the DL RAUs.
    """
    gamma_hat = gamma_sum([(cfg.m, b) for b in pilot_stats.beta_dl[:, user]])
    gamma_err = gamma_sum([(cfg.m, e) for e in pilot_stats.eta_dl[:, user]])
    return gamma_hat, gamma_err


def bf_training_stats(gamma_hat: GammaPair, gamma_err: GammaPair, cfg: SystemConfig,
                      scheme: Scheme, xi_k: float,
                      err_power: Optional[float] = None) -> BfTrainingStats:
    """Moments of the effective DL gain mu_{k,i} = g_k^H w_i.

    e_k is E[mu_kk]; chi_bar its variance; chi the second moment of the
    cross gains mu_{k,i}, i != k, for a precoder spread evenly over the DL
    antennas. err_power is the error power seen through the user's own
    precoder; it defaults to the same even spread.
    """
    antennas = cfg.n_dl * cfg.m
    t_dl = dimension_loss(antennas, cfg.k_dl)
    t_ul = dimension_loss(cfg.n_ul * cfg.m, cfg.k_ul)
    if err_power is None:
        err_power = gamma_err.mean / antennas
    if scheme is Scheme.ZF:
        check_zf_dimensions(antennas, cfg.k_dl)
        own = GammaPair(shape=t_dl * gamma_hat.shape, scale=gamma_hat.scale)
    else:
        own = gamma_hat
    e_k = nakagami_mean(own)
    chi_bar = own.mean - e_k ** 2 + err_power
    chi_tilde = chi_bar + (1.0 - xi_k) * e_k ** 2
    chi = (gamma_hat.mean + gamma_err.mean) / antennas
    return BfTrainingStats(
        e_k=e_k,
        chi_bar=chi_bar,
        chi_tilde=chi_tilde,
        chi=chi,
        t_dl=t_dl,
        t_ul=t_ul,
    )


def bf_training_stats_all(pilot_stats: PilotEstStats, cfg: SystemConfig,
                          scheme: Scheme, xi: Sequence[float]) -> List[BfTrainingStats]:
    if cfg.rate_formula == "printed":
        err_power = [None] * cfg.k_dl
    else:
        weights = energy_fractions(pilot_stats.beta_dl)
        err_power = np.sum(pilot_stats.eta_dl * weights, axis=0)
    return [
        bf_training_stats(
            *bf_gamma_pairs(pilot_stats, cfg, k), cfg, scheme, xi[k], err_power[k])
        for k in range(cfg.k_dl)
    ]


def cross_gain_power(stats: ChannelStats, pilot_stats: PilotEstStats,
                     bf_stats: Sequence[BfTrainingStats], cfg: SystemConfig,
                     scheme: Scheme) -> np.ndarray:
    """E|mu_{k,i}|^2 for i != k, shape (k_dl, k_dl) with a zero diagonal.

    ZF precoders null the estimated channels of the other users, so only
    the estimation error leaks through them.
    """
    if cfg.rate_formula == "printed":
        chi = np.array([s.chi for s in bf_stats])
        power = np.repeat(chi[:, None], cfg.k_dl, axis=1)
    else:
        seen = pilot_stats.eta_dl if scheme is Scheme.ZF else stats.lambda_dl
        power = seen.T @ energy_fractions(pilot_stats.beta_dl)
    np.fill_diagonal(power, 0.0)
    return power


def training_variance(s: BfTrainingStats, cfg: SystemConfig, xi_k: float) -> float:
    """Variance of the user's own-gain estimate after beamforming training."""
    if cfg.p_dp <= 0:
        return 0.0
    return xi_k * cfg.p_dp * s.chi_bar ** 2 / (cfg.p_dp * s.chi_tilde + cfg.sigma2_dp)


def mu_hat_realize(mu: np.ndarray, bf_stats: Sequence[BfTrainingStats], cfg: SystemConfig,
                   xi: Sequence[float], rng: np.random.Generator,
                   cross_power: Optional[np.ndarray] = None) -> np.ndarray:
    """Beamformed DL pilots, user-side quantization and scalar MMSE.

    Args:
        mu: true effective gains, mu[k, i] = g_k^H w_i.
        bf_stats: per-user moments from bf_training_stats.
        xi: per-user ADC gains.
        cross_power: prior second moments of the cross gains, as from
            cross_gain_power; each user's chi when omitted.

    Returns:
        np.ndarray: the estimates mu_hat[k, i].
    """
    k_dl = mu.shape[0]
    xi = np.asarray(xi, dtype=float)[:, None]
    e_k = np.array([s.e_k for s in bf_stats])
    chi_bar = np.array([s.chi_bar for s in bf_stats])
    if cross_power is None:
        cross_power = np.repeat(np.array([s.chi for s in bf_stats])[:, None], k_dl, axis=1)
    own = np.eye(k_dl, dtype=bool)

    prior_mean = np.where(own, e_k[:, None], 0.0)
    prior_var = np.where(own, chi_bar[:, None], cross_power)
    noise = np.sqrt(cfg.sigma2_dp / 2.0) * (
        rng.standard_normal(mu.shape) + 1j * rng.standard_normal(mu.shape))
    inst_power = cfg.p_dp * np.abs(mu) ** 2 + cfg.sigma2_dp
    y = quantize(np.sqrt(cfg.p_dp) * mu + noise, xi, inst_power, rng)

    obs_mean = xi * np.sqrt(cfg.p_dp) * prior_mean
    obs_var = xi * (cfg.p_dp * prior_var + cfg.sigma2_dp) \
        + np.where(own, (xi - xi ** 2) * cfg.p_dp * e_k[:, None] ** 2, 0.0)
    cross = xi * np.sqrt(cfg.p_dp) * prior_var
    return prior_mean + cross / obs_var * (y - obs_mean)


# Interference channel estimation at the UL RAUs.

def interference_mmse(stats: ChannelStats, cfg: SystemConfig, adc_gains: Sequence[float],
                      cancel: bool = True,
                      stream_power: Optional[np.ndarray] = None) -> InterferenceEstStats:
    """Equivalent fading of the estimated effective interference channel.

    stream_power[j, i] is the prior per-antenna power of f_i at UL RAU j;
    by default every DL precoder is taken to spread evenly over the DL
    RAUs, which makes delta the same for every i. With cancel=False delta
    is zero and the residual is the whole interference power.
    """
    alpha = np.asarray(adc_gains, dtype=float)[:, None]
    if stream_power is None:
        lam_bar = interference_power(stats, cfg)
        stream_power = np.repeat(lam_bar[:, None], cfg.k_dl, axis=1)
    phi = np.asarray(stream_power, dtype=float)
    if cancel:
        delta = np.sqrt(cfg.p_dp * alpha) * phi / np.sqrt(cfg.p_dp * phi + cfg.sigma2_up)
    else:
        delta = np.zeros_like(phi)
    return InterferenceEstStats(delta=delta, rho_res=phi - delta ** 2)


def interference_power(stats: ChannelStats, cfg: SystemConfig) -> np.ndarray:
    """Lambda per UL RAU: mean interference power per antenna."""
    return np.sum(stats.lambda_i_rau, axis=1) / cfg.n_dl


def cross_link_power(stats: ChannelStats, pilot_stats: PilotEstStats,
                     cfg: SystemConfig) -> np.ndarray:
    """Per-antenna power of f_i = G_I w_i at each UL RAU, shape (n_ul, k_dl).

    Each DL precoder puts its energy on the DL RAUs in proportion to the
    estimated channel variances; the printed closed forms assume an even
    split instead.
    """
    if cfg.rate_formula == "printed":
        lam_bar = interference_power(stats, cfg)
        return np.repeat(lam_bar[:, None], cfg.k_dl, axis=1)
    return stats.lambda_i_rau @ energy_fractions(pilot_stats.beta_dl)


def f_hat_realize(f: np.ndarray, lam_bar: np.ndarray, cfg: SystemConfig,
                  antenna_gains: np.ndarray,
                  rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Estimate the effective interference vectors f_i = G_I w_i.

    Args:
        f: shape (n_ul * m, k_dl).
        lam_bar: prior power per UL RAU, shape (n_ul,), or per UL RAU
            and DL stream, shape (n_ul, k_dl).
        antenna_gains: ADC gain per UL antenna.
    """
    lam = np.asarray(lam_bar, dtype=float)
    if lam.ndim == 1:
        lam = lam[:, None]
    lam = np.repeat(lam, cfg.m, axis=0)
    gain = np.asarray(antenna_gains, dtype=float)[:, None]
    noise = np.sqrt(cfg.sigma2_up / 2.0) * (
        rng.standard_normal(f.shape) + 1j * rng.standard_normal(f.shape))
    inst_power = cfg.p_dp * np.abs(f) ** 2 + cfg.sigma2_up
    y = quantize(np.sqrt(cfg.p_dp) * f + noise, gain, inst_power, rng)
    f_hat = np.sqrt(cfg.p_dp) * lam / (cfg.p_dp * lam + cfg.sigma2_up) * y
    return f_hat, f - f_hat
