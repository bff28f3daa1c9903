# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging
from typing import List
from typing import NamedTuple

import numpy as np

from nafdsim.core.exception import GeometrySamplingError
from nafdsim.core.system_config import SystemConfig
from nafdsim.core.util import substream
from nafdsim.core.util import STREAM_GEOMETRY


logger = logging.getLogger(__name__)


MAX_PLACEMENT_ATTEMPTS = 10000


class Geometry(NamedTuple):
    """Positions in meters, one (x, y) row per node."""
    ul_rau_positions: np.ndarray
    dl_rau_positions: np.ndarray
    ul_user_positions: np.ndarray
    dl_user_positions: np.ndarray

    @property
    def rau_positions(self) -> np.ndarray:
        return np.vstack([self.ul_rau_positions, self.dl_rau_positions])

    @property
    def user_positions(self) -> np.ndarray:
        return np.vstack([self.ul_user_positions, self.dl_user_positions])

    def rows(self) -> List[tuple]:
        """(kind, index, x_m, y_m) rows for CSV export."""
        groups = (
            ("ul_rau", self.ul_rau_positions),
            ("dl_rau", self.dl_rau_positions),
            ("ul_user", self.ul_user_positions),
            ("dl_user", self.dl_user_positions),
        )
        return [
            (kind, i, float(x), float(y))
            for kind, positions in groups
            for i, (x, y) in enumerate(positions)
        ]


class ChannelStats(NamedTuple):
    """Large-scale fading gains.

    lambda_ul[n, k]: UL RAU n <- UL user k.
    lambda_dl[n, k]: DL RAU n -> DL user k.
    lambda_i_user[k, j]: DL user k <- UL user j.
    lambda_i_rau[i, j]: UL RAU i <- DL RAU j.
    """
    lambda_ul: np.ndarray
    lambda_dl: np.ndarray
    lambda_i_user: np.ndarray
    lambda_i_rau: np.ndarray


def _uniform_in_disc(rng: np.random.Generator, radius: float, count: int) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    phi = rng.uniform(0.0, 2.0 * np.pi, count)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def _pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)


def sample_geometry(cfg: SystemConfig, seed: int,
                    max_attempts: int = MAX_PLACEMENT_ATTEMPTS) -> Geometry:
    """Drop RAUs and users uniformly in the disc.

    Users closer than min_access_dist to any RAU are re-drawn. The first
    n_ul RAUs serve the uplink.

    Raises:
        GeometrySamplingError: if a user cannot be placed within
            max_attempts draws.
    """
    cfg.validate()
    rng = substream(seed, STREAM_GEOMETRY)
    raus = _uniform_in_disc(rng, cfg.radius, cfg.n)
    users = np.empty((cfg.k, 2))
    for i in range(cfg.k):
        for attempt in range(max_attempts):
            candidate = _uniform_in_disc(rng, cfg.radius, 1)
            if np.min(_pairwise_distances(candidate, raus)) >= cfg.min_access_dist:
                users[i] = candidate[0]
                break
            if attempt == max_attempts // 2:
                logger.warning(
                    "User {} still unplaced after {} attempts".format(i, attempt))
        else:
            raise GeometrySamplingError(
                "Could not place user {} at least {} m from every RAU in {} attempts".format(
                    i, cfg.min_access_dist, max_attempts))
    return Geometry(
        ul_rau_positions=raus[:cfg.n_ul],
        dl_rau_positions=raus[cfg.n_ul:],
        ul_user_positions=users[:cfg.k_ul],
        dl_user_positions=users[cfg.k_ul:],
    )


def path_gain(distance, alpha: float, reference_distance: float = 1.0) -> np.ndarray:
    """lambda = (d / d0)^-alpha, evaluated in the log domain."""
    ratio = np.asarray(distance, dtype=float) / reference_distance
    return np.exp(-alpha * np.log(ratio))


def large_scale_fading(geom: Geometry, cfg: SystemConfig) -> ChannelStats:
    d0 = cfg.reference_distance
    d_ul = _pairwise_distances(geom.ul_rau_positions, geom.ul_user_positions)
    d_dl = _pairwise_distances(geom.dl_rau_positions, geom.dl_user_positions)
    d_i_user = np.maximum(
        _pairwise_distances(geom.dl_user_positions, geom.ul_user_positions),
        cfg.user_distance_floor,
    )
    d_i_rau = np.maximum(
        _pairwise_distances(geom.ul_rau_positions, geom.dl_rau_positions),
        cfg.rau_distance_floor,
    )
    return ChannelStats(
        lambda_ul=path_gain(d_ul, cfg.alpha_ul, d0),
        lambda_dl=path_gain(d_dl, cfg.alpha_dl, d0),
        lambda_i_user=path_gain(d_i_user, cfg.alpha_i, d0),
        lambda_i_rau=path_gain(d_i_rau, cfg.alpha_i, d0),
    )
