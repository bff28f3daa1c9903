# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging

from typedconfig import Config
from typedconfig import group_key
from typedconfig import key
from typedconfig import section
from typedconfig.source import DictConfigSource
from typedconfig.source import EnvironmentConfigSource
from typedconfig.source import IniFileConfigSource


logger = logging.getLogger(__name__)


DEFAULT_LOG_LEVEL = "INFO"

DEFAULT_N_UL = 3
DEFAULT_N_DL = 3
DEFAULT_K_UL = 2
DEFAULT_K_DL = 3
DEFAULT_M = 10
DEFAULT_RADIUS = 1000.0
DEFAULT_MIN_ACCESS_DIST = 30.0
DEFAULT_RAU_DISTANCE_FLOOR = 1.0
DEFAULT_USER_DISTANCE_FLOOR = 1.0
DEFAULT_REFERENCE_DISTANCE = 1000.0
DEFAULT_ALPHA_UL = 3.7
DEFAULT_ALPHA_DL = 3.7
DEFAULT_ALPHA_I = 3.0
DEFAULT_P_UL = 0.5
DEFAULT_P_DL = 0.5
DEFAULT_P_UP = 0.5
DEFAULT_P_DP = 1.0
DEFAULT_NOISE_VARIANCE = 1.0
DEFAULT_T_FRAME = 196
DEFAULT_TAU1 = 5
DEFAULT_TAU2 = 3
DEFAULT_BANDWIDTH_W = 20e6

DEFAULT_B_MAX = 12
DEFAULT_HIGH_RES_FORMULA = "standard"
DEFAULT_ETA_FORMULA = "orthogonal"
DEFAULT_RATE_FORMULA = "derived"

DEFAULT_P_RAU = 0.1
DEFAULT_P_UE = 0.1
DEFAULT_P_SYN = 1.0
DEFAULT_L_RAU = 12.8e9
DEFAULT_XI_AMP = 0.4
DEFAULT_P0 = 0.825
DEFAULT_P_BT = 0.25e-9
DEFAULT_A0 = 1e-4
DEFAULT_A1 = 0.02
DEFAULT_OSCILLATOR_POLICY = "distributed"

DEFAULT_B_BUDGET = 0
DEFAULT_RATE_FLOOR = 1.5
DEFAULT_C4_MODE = "upper"
DEFAULT_REFERENCE_MR = "7,5,6"
DEFAULT_REFERENCE_ZF = "8,1,7"

DEFAULT_TRIALS = 2000
DEFAULT_CI_LEVEL = 0.95
DEFAULT_WORKERS = 1
DEFAULT_TOLERANCE = 0.10

DEFAULT_POP_SIZE = 200
DEFAULT_GENERATIONS = 300
DEFAULT_CROSSOVER_PROB = 0.9

DEFAULT_BATCH_SIZE = 32
DEFAULT_LEARNING_RATE = 0.01
DEFAULT_GAMMA = 0.9
DEFAULT_EPSILON = 0.9
DEFAULT_EPSILON_DECAY = 1.0
DEFAULT_MEMORY_SIZE = 2000
DEFAULT_ITERATIONS = 1000
DEFAULT_HIDDEN = 64
DEFAULT_TARGET_SYNC = 50
DEFAULT_OPTIMIZER = "rmsprop"
DEFAULT_LOSS = "half_mse"
DEFAULT_INITIAL_BITS = 6
DEFAULT_REWARD_OFFSET = 1.0
DEFAULT_INFEASIBLE_REWARD = -2.0


def str_to_bool(value):
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


@section('scenario')
class ScenarioConfig(Config):
    n_ul = key(cast=int, required=False, default=DEFAULT_N_UL)
    n_dl = key(cast=int, required=False, default=DEFAULT_N_DL)
    k_ul = key(cast=int, required=False, default=DEFAULT_K_UL)
    k_dl = key(cast=int, required=False, default=DEFAULT_K_DL)
    m = key(cast=int, required=False, default=DEFAULT_M)
    radius = key(cast=float, required=False, default=DEFAULT_RADIUS)
    min_access_dist = key(
        cast=float, required=False, default=DEFAULT_MIN_ACCESS_DIST)
    rau_distance_floor = key(
        cast=float, required=False, default=DEFAULT_RAU_DISTANCE_FLOOR)
    user_distance_floor = key(
        cast=float, required=False, default=DEFAULT_USER_DISTANCE_FLOOR)
    reference_distance = key(
        cast=float, required=False, default=DEFAULT_REFERENCE_DISTANCE)
    alpha_ul = key(cast=float, required=False, default=DEFAULT_ALPHA_UL)
    alpha_dl = key(cast=float, required=False, default=DEFAULT_ALPHA_DL)
    alpha_i = key(cast=float, required=False, default=DEFAULT_ALPHA_I)
    p_ul = key(cast=float, required=False, default=DEFAULT_P_UL)
    p_dl = key(cast=float, required=False, default=DEFAULT_P_DL)
    p_up = key(cast=float, required=False, default=DEFAULT_P_UP)
    p_dp = key(cast=float, required=False, default=DEFAULT_P_DP)
    sigma2_ul = key(cast=float, required=False, default=DEFAULT_NOISE_VARIANCE)
    sigma2_dl = key(cast=float, required=False, default=DEFAULT_NOISE_VARIANCE)
    sigma2_up = key(cast=float, required=False, default=DEFAULT_NOISE_VARIANCE)
    sigma2_dp = key(cast=float, required=False, default=DEFAULT_NOISE_VARIANCE)
    t_frame = key(cast=int, required=False, default=DEFAULT_T_FRAME)
    tau1 = key(cast=int, required=False, default=DEFAULT_TAU1)
    tau2 = key(cast=int, required=False, default=DEFAULT_TAU2)
    bandwidth_w = key(cast=float, required=False, default=DEFAULT_BANDWIDTH_W)


@section('quantizer')
class QuantizerConfig(Config):
    b_max = key(cast=int, required=False, default=DEFAULT_B_MAX)
    high_res_formula = key(
        cast=str, required=False, default=DEFAULT_HIGH_RES_FORMULA)
    eta_formula = key(cast=str, required=False, default=DEFAULT_ETA_FORMULA)
    rate_formula = key(cast=str, required=False, default=DEFAULT_RATE_FORMULA)


@section('power')
class PowerConfig(Config):
    p_rau = key(cast=float, required=False, default=DEFAULT_P_RAU)
    p_ue = key(cast=float, required=False, default=DEFAULT_P_UE)
    p_syn = key(cast=float, required=False, default=DEFAULT_P_SYN)
    l_rau = key(cast=float, required=False, default=DEFAULT_L_RAU)
    xi_amp = key(cast=float, required=False, default=DEFAULT_XI_AMP)
    p0 = key(cast=float, required=False, default=DEFAULT_P0)
    p_bt = key(cast=float, required=False, default=DEFAULT_P_BT)
    a0 = key(cast=float, required=False, default=DEFAULT_A0)
    a1 = key(cast=float, required=False, default=DEFAULT_A1)
    oscillator_policy = key(
        cast=str, required=False, default=DEFAULT_OSCILLATOR_POLICY)
    ee_prelog = key(cast=str_to_bool, required=False, default=False)


@section('constraints')
class ConstraintsConfig(Config):
    b_budget = key(cast=int, required=False, default=DEFAULT_B_BUDGET)
    r_ul_min = key(cast=float, required=False, default=DEFAULT_RATE_FLOOR)
    r_dl_min = key(cast=float, required=False, default=DEFAULT_RATE_FLOOR)
    c4_mode = key(cast=str, required=False, default=DEFAULT_C4_MODE)
    reference_mr = key(cast=str, required=False, default=DEFAULT_REFERENCE_MR)
    reference_zf = key(cast=str, required=False, default=DEFAULT_REFERENCE_ZF)


@section('montecarlo')
class MonteCarloConfig(Config):
    trials = key(cast=int, required=False, default=DEFAULT_TRIALS)
    ci_level = key(cast=float, required=False, default=DEFAULT_CI_LEVEL)
    workers = key(cast=int, required=False, default=DEFAULT_WORKERS)
    tolerance = key(cast=float, required=False, default=DEFAULT_TOLERANCE)


@section('nsga2')
class Nsga2SectionConfig(Config):
    pop_size = key(cast=int, required=False, default=DEFAULT_POP_SIZE)
    generations = key(cast=int, required=False, default=DEFAULT_GENERATIONS)
    crossover_prob = key(
        cast=float, required=False, default=DEFAULT_CROSSOVER_PROB)
    workers = key(cast=int, required=False, default=DEFAULT_WORKERS)


@section('dqn')
class DqnSectionConfig(Config):
    batch_size = key(cast=int, required=False, default=DEFAULT_BATCH_SIZE)
    learning_rate = key(
        cast=float, required=False, default=DEFAULT_LEARNING_RATE)
    gamma = key(cast=float, required=False, default=DEFAULT_GAMMA)
    epsilon = key(cast=float, required=False, default=DEFAULT_EPSILON)
    epsilon_decay = key(
        cast=float, required=False, default=DEFAULT_EPSILON_DECAY)
    memory_size = key(cast=int, required=False, default=DEFAULT_MEMORY_SIZE)
    iterations = key(cast=int, required=False, default=DEFAULT_ITERATIONS)
    hidden1 = key(cast=int, required=False, default=DEFAULT_HIDDEN)
    hidden2 = key(cast=int, required=False, default=DEFAULT_HIDDEN)
    target_sync = key(cast=int, required=False, default=DEFAULT_TARGET_SYNC)
    optimizer = key(cast=str, required=False, default=DEFAULT_OPTIMIZER)
    loss = key(cast=str, required=False, default=DEFAULT_LOSS)
    zero_init = key(cast=str_to_bool, required=False, default=False)
    initial_bits = key(cast=int, required=False, default=DEFAULT_INITIAL_BITS)
    reward_offset = key(
        cast=float, required=False, default=DEFAULT_REWARD_OFFSET)
    infeasible_reward = key(
        cast=float, required=False, default=DEFAULT_INFEASIBLE_REWARD)


@section('general')
class GeneralConfig(Config):
    log_level = key(cast=str, required=False, default=DEFAULT_LOG_LEVEL)


class NafdsimConfig(Config):
    scenario = group_key(ScenarioConfig)
    quantizer = group_key(QuantizerConfig)
    power = group_key(PowerConfig)
    constraints = group_key(ConstraintsConfig)
    montecarlo = group_key(MonteCarloConfig)
    nsga2 = group_key(Nsga2SectionConfig)
    dqn = group_key(DqnSectionConfig)
    general = group_key(GeneralConfig)

    def __init__(self, config_path=None, dict_config=None):
        super().__init__()
        self.prefix = "NAFDSIM"
        self.config_path = config_path
        self.dict_config = dict_config

    def read(self):
        if self.dict_config is not None:
            self.add_source(DictConfigSource(self.dict_config))
        self.add_source(EnvironmentConfigSource(prefix=self.prefix))
        if self.config_path is not None:
            self.add_source(IniFileConfigSource(self.config_path))
        return super().read()
