# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
from enum import Enum
from typing import NamedTuple

from nafdsim.core.exception import InvalidConfigError


HIGH_RES_FORMULAS = ("standard", "literal")
ETA_FORMULAS = ("orthogonal", "printed")
RATE_FORMULAS = ("derived", "printed")


class Scheme(Enum):
    MR = "mr"
    ZF = "zf"


class CsiMode(Enum):
    ESTIMATED = "estimated"
    STATISTICAL = "statistical"


class IcMode(Enum):
    WITH = "on"
    WITHOUT = "off"


class SystemConfig(NamedTuple):
    """Scenario scalars shared by every model stage.

    Positions are in metres and path gains are (d / reference_distance)^-alpha
    against unit noise. With the 1 km reference a user 400 m from a RAU sits
    about 12 dB above the noise per antenna at the default 0.5 W.

    rate_formula picks the closed forms: "derived" takes the expectation of
    every term the simulated receiver sees; "printed" keeps the published
    expressions, including the MR uplink noise term in the numerator.
    """
    n_ul: int = 3
    n_dl: int = 3
    k_ul: int = 2
    k_dl: int = 3
    m: int = 10
    radius: float = 1000.0
    min_access_dist: float = 30.0
    alpha_ul: float = 3.7
    alpha_dl: float = 3.7
    alpha_i: float = 3.0
    p_ul: float = 0.5
    p_dl: float = 0.5
    p_up: float = 0.5
    p_dp: float = 1.0
    sigma2_ul: float = 1.0
    sigma2_dl: float = 1.0
    sigma2_up: float = 1.0
    sigma2_dp: float = 1.0
    t_frame: int = 196
    tau1: int = 5
    tau2: int = 3
    bandwidth_w: float = 20e6
    rau_distance_floor: float = 1.0
    user_distance_floor: float = 1.0
    reference_distance: float = 1000.0
    b_max: int = 12
    high_res_formula: str = "standard"
    eta_formula: str = "orthogonal"
    rate_formula: str = "derived"

    @property
    def n(self) -> int:
        return self.n_ul + self.n_dl

    @property
    def k(self) -> int:
        return self.k_ul + self.k_dl

    @property
    def t_data(self) -> int:
        return self.t_frame - self.tau1 - self.tau2

    @property
    def prelog(self) -> float:
        return self.t_data / self.t_frame

    def validate(self) -> 'SystemConfig':
        """Check the scenario invariants.

        Returns:
            SystemConfig: self, so that calls can be chained.

        Raises:
            InvalidConfigError: if any invariant is broken.
        """
        counts = (self.n_ul, self.n_dl, self.k_ul, self.k_dl, self.m)
        if min(counts) < 1:
            raise InvalidConfigError(
                "All RAU, user and antenna counts must be at least 1: {}".format(counts))
        if self.tau1 < self.k:
            raise InvalidConfigError(
                "tau1={} is shorter than the user count {}".format(self.tau1, self.k))
        if self.tau2 < self.k_dl:
            raise InvalidConfigError(
                "tau2={} is shorter than the DL user count {}".format(self.tau2, self.k_dl))
        if self.tau1 + self.tau2 >= self.t_frame:
            raise InvalidConfigError(
                "Pilots ({} + {}) leave no data symbols in a frame of {}".format(
                    self.tau1, self.tau2, self.t_frame))
        powers = {
            'p_ul': self.p_ul, 'p_dl': self.p_dl,
            'p_up': self.p_up, 'p_dp': self.p_dp,
        }
        for name, value in powers.items():
            if value < 0:
                raise InvalidConfigError(
                    "{} must be non-negative, got {}".format(name, value))
        positives = {
            'sigma2_ul': self.sigma2_ul, 'sigma2_dl': self.sigma2_dl,
            'sigma2_up': self.sigma2_up, 'sigma2_dp': self.sigma2_dp,
            'radius': self.radius, 'bandwidth_w': self.bandwidth_w,
            'rau_distance_floor': self.rau_distance_floor,
            'user_distance_floor': self.user_distance_floor,
            'reference_distance': self.reference_distance,
        }
        for name, value in positives.items():
            if not value > 0:
                raise InvalidConfigError(
                    "{} must be strictly positive, got {}".format(name, value))
        if not 0 <= self.min_access_dist < self.radius:
            raise InvalidConfigError(
                "min_access_dist={} must lie in [0, radius={})".format(
                    self.min_access_dist, self.radius))
        if self.b_max < 1:
            raise InvalidConfigError("b_max must be at least 1")
        if self.high_res_formula not in HIGH_RES_FORMULAS:
            raise InvalidConfigError(
                "Unknown high_res_formula: {}".format(self.high_res_formula))
        if self.eta_formula not in ETA_FORMULAS:
            raise InvalidConfigError(
                "Unknown eta_formula: {}".format(self.eta_formula))
        if self.rate_formula not in RATE_FORMULAS:
            raise InvalidConfigError(
                "Unknown rate_formula: {}".format(self.rate_formula))
        return self

    @classmethod
    def from_config(cls, config) -> 'SystemConfig':
        """Build a validated scenario from the [scenario] and [quantizer]
        sections of a NafdsimConfig.
        """
        scenario = config.scenario
        quantizer = config.quantizer
        return cls(
            n_ul=scenario.n_ul,
            n_dl=scenario.n_dl,
            k_ul=scenario.k_ul,
            k_dl=scenario.k_dl,
            m=scenario.m,
            radius=scenario.radius,
            min_access_dist=scenario.min_access_dist,
            alpha_ul=scenario.alpha_ul,
            alpha_dl=scenario.alpha_dl,
            alpha_i=scenario.alpha_i,
            p_ul=scenario.p_ul,
            p_dl=scenario.p_dl,
            p_up=scenario.p_up,
            p_dp=scenario.p_dp,
            sigma2_ul=scenario.sigma2_ul,
            sigma2_dl=scenario.sigma2_dl,
            sigma2_up=scenario.sigma2_up,
            sigma2_dp=scenario.sigma2_dp,
            t_frame=scenario.t_frame,
            tau1=scenario.tau1,
            tau2=scenario.tau2,
            bandwidth_w=scenario.bandwidth_w,
            rau_distance_floor=scenario.rau_distance_floor,
            user_distance_floor=scenario.user_distance_floor,
            reference_distance=scenario.reference_distance,
            b_max=quantizer.b_max,
            high_res_formula=quantizer.high_res_formula,
            eta_formula=quantizer.eta_formula,
            rate_formula=quantizer.rate_formula,
        ).validate()
