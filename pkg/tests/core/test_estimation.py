# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from nafdsim.core.beamforming import precoders
from nafdsim.core.channels import draw_channels
from nafdsim.core.estimation import bf_gamma_pairs
from nafdsim.core.estimation import bf_training_stats
from nafdsim.core.estimation import bf_training_stats_all
from nafdsim.core.estimation import BfTrainingStats
from nafdsim.core.estimation import cross_gain_power
from nafdsim.core.estimation import cross_link_power
from nafdsim.core.estimation import energy_fractions
from nafdsim.core.estimation import f_hat_realize
from nafdsim.core.estimation import gamma_project
from nafdsim.core.estimation import gamma_sum
from nafdsim.core.estimation import GammaPair
from nafdsim.core.estimation import interference_mmse
from nafdsim.core.estimation import interference_power
from nafdsim.core.estimation import mu_hat_realize
from nafdsim.core.estimation import nakagami_mean
from nafdsim.core.estimation import pilot_estimate
from nafdsim.core.estimation import pilot_mmse_stats
from nafdsim.core.estimation import pilot_variances
from nafdsim.core.estimation import training_variance
from nafdsim.core.scenario import ChannelStats
from nafdsim.core.scenario import large_scale_fading
from nafdsim.core.scenario import sample_geometry
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig
from nafdsim.core.util import complex_normal


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def stats(cfg):
    return large_scale_fading(sample_geometry(cfg, seed=5), cfg)


@pytest.fixture
def pilot_stats(cfg):
    lam = np.array([
        [1.0, 0.5, 2.0],
        [0.2, 1.5, 0.7],
        [0.9, 0.1, 1.1],
    ])
    return pilot_mmse_stats(
        stats=_stats_with_dl(lam),
        cfg=cfg,
        theta_ul=np.ones(cfg.n_ul),
        theta_dl=np.full(cfg.n_dl, 0.9),
    )


def _stats_with_dl(lam_dl):
    return ChannelStats(
        lambda_ul=np.ones((3, 2)),
        lambda_dl=lam_dl,
        lambda_i_user=np.ones((3, 2)),
        lambda_i_rau=np.ones((3, 3)),
    )


def test_pilot_variances_full_resolution(cfg):
    lam = np.array([[1.0]])

    beta, eta = pilot_variances(lam, np.array([1.0]), cfg)

    assert beta[0, 0] == pytest.approx(0.5 / 1.5)
    assert eta[0, 0] == pytest.approx(1.0 - 0.5 / 1.5)


def test_pilot_variances_orthogonal_split(cfg, stats):
    theta = np.array([0.6366, 0.9, 0.99])

    beta, eta = pilot_variances(stats.lambda_ul, theta, cfg)

    assert np.allclose(beta + eta, stats.lambda_ul)
    assert np.all(beta >= 0)
    assert np.all(eta >= 0)


def test_pilot_variances_printed_matches_at_full_resolution():
    cfg = SystemConfig(eta_formula="printed")
    lam = np.array([[1.0, 0.3]])

    beta, eta = pilot_variances(lam, np.array([1.0]), cfg)

    assert np.allclose(beta + eta, lam)


def test_pilot_estimate_matches_closed_form(cfg):
    lam = np.array([[1.0]])
    theta = np.array([0.6])
    g = complex_normal(np.random.default_rng(1), (1, 1, 50000))
    beta, eta = pilot_variances(lam, theta, cfg)

    g_hat, g_err = pilot_estimate(g, lam, theta, cfg, np.random.default_rng(2))

    assert np.mean(np.abs(g_hat) ** 2) == pytest.approx(beta[0, 0], rel=0.05)
    assert np.mean(np.abs(g_err) ** 2) == pytest.approx(eta[0, 0], rel=0.05)
    assert np.allclose(g_hat + g_err, g)


def test_gamma_sum_single_term():
    pair = gamma_sum([(10, 0.5)])

    assert pair.shape == pytest.approx(10.0)
    assert pair.scale == pytest.approx(0.5)


def test_gamma_sum_matches_moments():
    pair = gamma_sum([(2, 1.0), (3, 2.0)])

    assert pair.mean == pytest.approx(8.0)
    assert pair.variance == pytest.approx(14.0)


def test_gamma_sum_equal_terms():
    pair = gamma_sum([(4, 0.25), (4, 0.25)])

    assert pair.shape == pytest.approx(8.0)
    assert pair.scale == pytest.approx(0.25)


def test_gamma_sum_empty():
    with pytest.raises(ValueError):
        gamma_sum([])


def test_gamma_project():
    pair = gamma_project(GammaPair(shape=30.0, scale=0.1), m=30, s=28)

    assert pair.shape == pytest.approx(28.0)
    assert pair.scale == pytest.approx(0.1)


def test_gamma_project_invalid_dimension():
    with pytest.raises(ValueError):
        gamma_project(GammaPair(shape=3.0, scale=1.0), m=3, s=0)


def test_nakagami_mean_exponential():
    assert nakagami_mean(GammaPair(shape=1.0, scale=1.0)) == pytest.approx(np.sqrt(np.pi) / 2)


def test_nakagami_mean_large_shape():
    pair = GammaPair(shape=20.0, scale=0.5)
    expected = gamma_fn(20.5) / gamma_fn(20.0) * np.sqrt(0.5)

    assert nakagami_mean(pair) == pytest.approx(expected)
    assert nakagami_mean(pair) <= np.sqrt(pair.mean)


def test_nakagami_mean_invalid():
    with pytest.raises(ValueError):
        nakagami_mean(GammaPair(shape=0.0, scale=1.0))


def test_bf_training_stats_mr(cfg, pilot_stats):
    gamma_hat, gamma_err = bf_gamma_pairs(pilot_stats, cfg, user=0)

    s = bf_training_stats(gamma_hat, gamma_err, cfg, Scheme.MR, xi_k=1.0)

    err_power = gamma_err.mean / (cfg.n_dl * cfg.m)
    assert s.chi_bar + s.e_k ** 2 - err_power == pytest.approx(gamma_hat.mean)
    assert s.chi_bar >= err_power
    assert s.chi_tilde == pytest.approx(s.chi_bar)
    assert s.chi == pytest.approx((1.0 + 0.2 + 0.9) / cfg.n_dl)


def test_bf_training_stats_zf_loses_dimensions(cfg, pilot_stats):
    gamma_hat, gamma_err = bf_gamma_pairs(pilot_stats, cfg, user=1)

    mr = bf_training_stats(gamma_hat, gamma_err, cfg, Scheme.MR, xi_k=0.9)
    zf = bf_training_stats(gamma_hat, gamma_err, cfg, Scheme.ZF, xi_k=0.9)

    assert zf.t_dl == pytest.approx(28 / 30)
    assert zf.e_k < mr.e_k
    assert zf.chi == pytest.approx(mr.chi)
    assert zf.chi_tilde == pytest.approx(zf.chi_bar + 0.1 * zf.e_k ** 2)


def test_interference_mmse_without_cancellation(cfg, stats):
    est = interference_mmse(stats, cfg, np.ones(cfg.n_ul), cancel=False)

    assert est.delta.shape == (cfg.n_ul, cfg.k_dl)
    assert np.allclose(est.delta, 0.0)
    assert np.allclose(est.rho_res[:, 0], interference_power(stats, cfg))


def test_interference_mmse_cancellation_reduces_residual(cfg, stats):
    alpha = np.array([0.6366, 0.9, 0.99])

    on = interference_mmse(stats, cfg, alpha, cancel=True)
    off = interference_mmse(stats, cfg, alpha, cancel=False)

    assert np.all(on.rho_res <= off.rho_res)
    assert np.all(on.rho_res >= 0)
    assert np.all(on.delta > 0)


def test_f_hat_zero_pilot_power():
    cfg = SystemConfig(p_dp=0.0)
    f = complex_normal(np.random.default_rng(3), (cfg.n_ul * cfg.m, cfg.k_dl))

    f_hat, f_err = f_hat_realize(
        f, np.ones(cfg.n_ul), cfg, np.full(cfg.n_ul * cfg.m, 0.9),
        np.random.default_rng(4))

    assert np.allclose(f_hat, 0.0)
    assert np.allclose(f_err, f)


def test_mu_hat_zero_pilot_power_returns_prior_mean():
    cfg = SystemConfig(p_dp=0.0)
    bf_stats = [
        BfTrainingStats(e_k=e, chi_bar=0.1, chi_tilde=0.1, chi=0.2, t_dl=1.0, t_ul=1.0)
        for e in (1.0, 2.0, 3.0)
    ]
    mu = complex_normal(np.random.default_rng(5), (3, 3))

    mu_hat = mu_hat_realize(mu, bf_stats, cfg, [0.9, 0.9, 0.9], np.random.default_rng(6))

    assert np.allclose(mu_hat, np.diag([1.0, 2.0, 3.0]))


@pytest.mark.parametrize("shape,scale", [(1.0, 2.0), (4.5, 0.3), (30.0, 10.0)])
def test_nakagami_mean_matches_samples(shape, scale):
    samples = np.random.default_rng(21).gamma(shape, scale, size=10 ** 6)

    assert nakagami_mean(GammaPair(shape=shape, scale=scale)) == pytest.approx(
        np.mean(np.sqrt(samples)), rel=0.005)


def test_energy_fractions():
    beta = np.array([
        [3.0, 0.0],
        [1.0, 0.0],
    ])

    weights = energy_fractions(beta)

    assert np.allclose(weights[:, 0], [0.75, 0.25])
    assert np.allclose(weights[:, 1], [0.5, 0.5])


def test_cross_gain_power_zero_forcing_sees_only_error(cfg, stats):
    theta = np.full(cfg.n_dl, 0.9)
    pilot = pilot_mmse_stats(stats, cfg, theta, theta)
    xi = np.ones(cfg.k_dl)

    mr = cross_gain_power(
        stats, pilot, bf_training_stats_all(pilot, cfg, Scheme.MR, xi), cfg, Scheme.MR)
    zf = cross_gain_power(
        stats, pilot, bf_training_stats_all(pilot, cfg, Scheme.ZF, xi), cfg, Scheme.ZF)

    off_diagonal = ~np.eye(cfg.k_dl, dtype=bool)
    assert np.allclose(np.diag(mr), 0.0)
    assert np.allclose(np.diag(zf), 0.0)
    assert np.all(zf[off_diagonal] < mr[off_diagonal])
    assert np.all(zf[off_diagonal] > 0)


def test_cross_link_power_even_split_matches_printed(cfg):
    stats = ChannelStats(
        lambda_ul=np.ones((3, 2)),
        lambda_dl=np.ones((3, 3)),
        lambda_i_user=np.ones((3, 2)),
        lambda_i_rau=np.array([
            [1.0, 2.0, 3.0],
            [0.5, 0.5, 0.5],
            [4.0, 0.0, 2.0],
        ]),
    )
    pilot = pilot_mmse_stats(stats, cfg, np.ones(3), np.ones(3))

    derived = cross_link_power(stats, pilot, cfg)
    printed = cross_link_power(stats, pilot, cfg._replace(rate_formula="printed"))

    assert derived.shape == (cfg.n_ul, cfg.k_dl)
    assert np.allclose(derived, printed)
    assert np.allclose(derived[:, 0], [2.0, 0.5, 2.0])


def test_interference_mmse_per_stream(cfg, stats):
    phi = np.array([
        [0.5, 1.0, 2.0],
        [0.5, 1.0, 2.0],
        [0.5, 1.0, 2.0],
    ])

    est = interference_mmse(stats, cfg, np.ones(cfg.n_ul), stream_power=phi)

    assert np.allclose(est.power, phi)
    assert np.all(np.diff(est.delta, axis=1) > 0)


def test_f_hat_power_matches_cancellation_gain(cfg, stats):
    phi = np.array([0.5, 2.0, 8.0])
    alpha = np.array([0.6366, 0.9, 0.99])
    f = np.repeat(np.sqrt(phi), cfg.m)[:, None] * complex_normal(
        np.random.default_rng(31), (cfg.n_ul * cfg.m, 20000))
    est = interference_mmse(
        stats, cfg, alpha, stream_power=np.repeat(phi[:, None], cfg.k_dl, axis=1))

    f_hat, f_err = f_hat_realize(
        f, phi, cfg, np.repeat(alpha, cfg.m), np.random.default_rng(32))

    per_rau = (cfg.n_ul, cfg.m, -1)
    estimate_power = np.mean(np.abs(f_hat.reshape(per_rau)) ** 2, axis=(1, 2))
    residual_power = np.mean(np.abs(f_err.reshape(per_rau)) ** 2, axis=(1, 2))
    assert estimate_power == pytest.approx(est.delta[:, 0] ** 2, rel=0.02)
    assert residual_power == pytest.approx(est.rho_res[:, 0], rel=0.02)


def test_mu_hat_spread_matches_training_variance(cfg):
    xi = 0.9
    s = BfTrainingStats(
        e_k=3.0, chi_bar=0.8, chi_tilde=0.8 + (1.0 - xi) * 9.0, chi=0.5, t_dl=1.0, t_ul=1.0)
    # One user, independent draws along the columns.
    mu = 3.0 + np.sqrt(0.8) * complex_normal(np.random.default_rng(41), (1, 200000))

    mu_hat = mu_hat_realize(mu, [s], cfg, [xi], np.random.default_rng(42))

    f_k = training_variance(s, cfg, xi)
    assert np.mean(mu_hat).real == pytest.approx(3.0, rel=0.01)
    assert np.mean(np.abs(mu_hat - 3.0) ** 2) == pytest.approx(f_k, rel=0.02)
    assert np.mean(np.abs(mu_hat) ** 2) == pytest.approx(9.0 + f_k, rel=0.01)


def test_training_variance_without_pilot_power():
    s = BfTrainingStats(e_k=1.0, chi_bar=0.5, chi_tilde=0.5, chi=0.5, t_dl=1.0, t_ul=1.0)

    assert training_variance(s, SystemConfig(p_dp=0.0), 0.9) == 0.0


@pytest.mark.parametrize("scheme", [Scheme.MR, Scheme.ZF])
def test_mean_effective_gain_matches_nakagami_mean(scheme):
    cfg = SystemConfig(n_ul=2, n_dl=2, k_ul=2, k_dl=2, m=32, tau1=4, tau2=2, p_up=20.0)
    stats = ChannelStats(
        lambda_ul=np.full((2, 2), 0.5),
        lambda_dl=np.full((2, 2), 0.5),
        lambda_i_user=np.full((2, 2), 0.1),
        lambda_i_rau=np.full((2, 2), 0.25),
    )
    theta = np.full(cfg.n_dl, 0.9)
    bf_stats = bf_training_stats_all(
        pilot_mmse_stats(stats, cfg, np.ones(cfg.n_ul), theta), cfg, scheme, np.ones(cfg.k_dl))

    own_gains = []
    for t in range(400):
        realization = draw_channels(stats, cfg, (7, t))
        g_hat, _ = pilot_estimate(
            realization.g_dl, stats.lambda_dl, theta, cfg, np.random.default_rng(t))
        w = precoders(g_hat.transpose(0, 2, 1).reshape(-1, cfg.k_dl), scheme)
        own_gains.append(np.diag(realization.stacked_dl().conj().T @ w))
    mean_gain = np.mean(np.array(own_gains), axis=0)

    for k, s in enumerate(bf_stats):
        assert mean_gain[k].real == pytest.approx(s.e_k, rel=0.02)
        assert abs(mean_gain[k].imag) < 0.02 * s.e_k
