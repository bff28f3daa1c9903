# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.


class NafdsimError(Exception):
    """Base class for other nafdsim exceptions"""


class InvalidConfigError(NafdsimError):
    """Error that is raised when a scenario or solver setting is out of range"""


class GeometrySamplingError(NafdsimError):
    """Error that is raised when user placement exceeds its attempt budget"""


class InvalidBitAllocationError(NafdsimError):
    """Error that is raised when a bit allocation has the wrong shape or range"""


class SchemeDimensionError(NafdsimError):
    """Error that is raised when zero-forcing lacks spatial degrees of freedom"""
