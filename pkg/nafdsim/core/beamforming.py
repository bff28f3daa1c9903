# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import numpy as np

from nafdsim.core.exception import SchemeDimensionError
from nafdsim.core.system_config import Scheme


def check_zf_dimensions(antennas: int, users: int) -> None:
    if antennas < users:
        raise SchemeDimensionError(
            "Zero-forcing needs at least as many antennas ({}) as users ({})".format(
                antennas, users))


def _zero_forcing(h_hat: np.ndarray) -> np.ndarray:
    check_zf_dimensions(*h_hat.shape)
    # H (H^H H)^-1
    return np.linalg.pinv(h_hat).conj().T


def precoders(g_hat: np.ndarray, scheme: Scheme) -> np.ndarray:
    """Unit-norm DL precoding vectors, one column per DL user.

    Args:
        g_hat: estimated DL channels, shape (n_dl * m, k_dl).
        scheme: MR gives maximum-ratio transmission, ZF gives
            zero-forcing transmission.
    """
    if scheme is Scheme.ZF:
        w = _zero_forcing(g_hat)
    else:
        w = g_hat.copy()
    norms = np.linalg.norm(w, axis=0)
    return w / np.where(norms > 0, norms, 1.0)


def combiners(g_hat: np.ndarray, scheme: Scheme) -> np.ndarray:
    """UL receive combiners, one column per UL user (MRC or ZFR)."""
    if scheme is Scheme.ZF:
        return _zero_forcing(g_hat)
    return g_hat.copy()
