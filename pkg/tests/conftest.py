# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import numpy as np
import pytest

from nafdsim.core.scenario import Geometry
from nafdsim.core.scenario import large_scale_fading
from nafdsim.core.system_config import SystemConfig


@pytest.fixture
def placed_geometry():
    # Default-sized layout, every user 100 m from one RAU of its link.
    return Geometry(
        ul_rau_positions=np.array([[-600.0, 0.0], [-300.0, 500.0], [-300.0, -500.0]]),
        dl_rau_positions=np.array([[600.0, 0.0], [300.0, 500.0], [300.0, -500.0]]),
        ul_user_positions=np.array([[-500.0, 0.0], [-300.0, 400.0]]),
        dl_user_positions=np.array([[500.0, 0.0], [300.0, 400.0], [300.0, -400.0]]),
    )


@pytest.fixture
def placed_stats(placed_geometry):
    return large_scale_fading(placed_geometry, SystemConfig())
