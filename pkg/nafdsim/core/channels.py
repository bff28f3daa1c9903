# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
from typing import NamedTuple

import numpy as np

from nafdsim.core.scenario import ChannelStats
from nafdsim.core.system_config import SystemConfig
from nafdsim.core.util import complex_normal
from nafdsim.core.util import SeedLike
from nafdsim.core.util import STREAM_G_DL
from nafdsim.core.util import STREAM_G_I_RAU
from nafdsim.core.util import STREAM_G_UL
from nafdsim.core.util import STREAM_U_I_USER
from nafdsim.core.util import substream


class ChannelRealization(NamedTuple):
    """One small-scale fading draw.

    g_ul: (n_ul, k_ul, m), g_dl: (n_dl, k_dl, m),
    g_i_rau: (n_ul, n_dl, m, m) with rows on the UL RAU antennas,
    u_i_user: (k_dl, k_ul).
    """
    g_ul: np.ndarray
    g_dl: np.ndarray
    g_i_rau: np.ndarray
    u_i_user: np.ndarray

    def stacked_ul(self) -> np.ndarray:
        """UL channels as an (n_ul * m, k_ul) matrix."""
        n_ul, k_ul, m = self.g_ul.shape
        return self.g_ul.transpose(0, 2, 1).reshape(n_ul * m, k_ul)

    def stacked_dl(self) -> np.ndarray:
        """DL channels as an (n_dl * m, k_dl) matrix."""
        n_dl, k_dl, m = self.g_dl.shape
        return self.g_dl.transpose(0, 2, 1).reshape(n_dl * m, k_dl)

    def stacked_interference(self) -> np.ndarray:
        """RAU-to-RAU channel G_I as an (n_ul * m, n_dl * m) matrix."""
        n_ul, n_dl, m, _ = self.g_i_rau.shape
        return self.g_i_rau.transpose(0, 2, 1, 3).reshape(n_ul * m, n_dl * m)


def draw_channels(stats: ChannelStats, cfg: SystemConfig, seed: SeedLike) -> ChannelRealization:
    m = cfg.m
    h_ul = complex_normal(substream(seed, STREAM_G_UL), stats.lambda_ul.shape + (m,))
    h_dl = complex_normal(substream(seed, STREAM_G_DL), stats.lambda_dl.shape + (m,))
    h_i_rau = complex_normal(
        substream(seed, STREAM_G_I_RAU), stats.lambda_i_rau.shape + (m, m))
    h_i_user = complex_normal(substream(seed, STREAM_U_I_USER), stats.lambda_i_user.shape)
    return ChannelRealization(
        g_ul=np.sqrt(stats.lambda_ul)[..., None] * h_ul,
        g_dl=np.sqrt(stats.lambda_dl)[..., None] * h_dl,
        g_i_rau=np.sqrt(stats.lambda_i_rau)[..., None, None] * h_i_rau,
        u_i_user=np.sqrt(stats.lambda_i_user) * h_i_user,
    )
