# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import logging

import numpy as np

from nafdsim.core.power import PowerParams
from nafdsim.core.quantizer import BitAllocation
from nafdsim.core.rates import rate_report
from nafdsim.core.scenario import large_scale_fading
from nafdsim.core.scenario import sample_geometry
from nafdsim.core.system_config import CsiMode
from nafdsim.core.system_config import IcMode
from nafdsim.core.system_config import Scheme
from nafdsim.core.system_config import SystemConfig
from nafdsim.experiments.csv_output import FRONT_HEADER
from nafdsim.experiments.csv_output import GEOMETRY_HEADER
from nafdsim.experiments.csv_output import join_bits
from nafdsim.experiments.csv_output import SWEEP_HEADER
from nafdsim.experiments.csv_output import TRACE_HEADER
from nafdsim.experiments.csv_output import TRADEOFF_HEADER
from nafdsim.experiments.csv_output import TRAINING_GAIN_HEADER
from nafdsim.experiments.csv_output import VALIDATION_HEADER
from nafdsim.experiments.csv_output import write_summary
from nafdsim.experiments.csv_output import write_table
from nafdsim.experiments.experiment_spec import ExperimentSpec
from nafdsim.moop.dqn import DqnConfig
from nafdsim.moop.dqn import dqn_run
from nafdsim.moop.evaluator import build_constraints
from nafdsim.moop.evaluator import Evaluator
from nafdsim.moop.evaluator import ScenarioBundle
from nafdsim.moop.nsga2 import Nsga2
from nafdsim.moop.nsga2 import Nsga2Config
from nafdsim.moop.pareto import exhaustive_front
from nafdsim.sim.montecarlo import compare_closed_form
from nafdsim.sim.montecarlo import McConfig
from nafdsim.sim.montecarlo import simulate_dl_rate
from nafdsim.sim.montecarlo import simulate_ul_rate


logger = logging.getLogger(__name__)


VALIDATION_BITS = (1, 10)
TRADEOFF_BITS = (4, 9)
TRAINING_GAIN_BITS = (8, 8)
NOT_APPLICABLE = "-"


class ExperimentRunner:

    def __init__(self, config, spec: ExperimentSpec):
        self.config = config
        self.spec = spec

    def _initialize(self):
        self.initialize_system_config()
        self.initialize_power_params()
        self.initialize_channel_stats()

    def initialize_system_config(self):
        self.cfg = SystemConfig.from_config(self.config)

    def initialize_power_params(self):
        self.params = PowerParams.from_config(self.config)

    def initialize_channel_stats(self):
        self.geometry = sample_geometry(self.cfg, self.spec.seed)
        self.stats = large_scale_fading(self.geometry, self.cfg)

    def mc_config(self) -> McConfig:
        mc = McConfig.from_config(self.config, self.spec.seed)
        if self.spec.trials is not None:
            mc = mc._replace(trials=self.spec.trials)
        return mc.validate()

    def evaluator(self, scheme: Scheme, cfg: SystemConfig = None) -> Evaluator:
        bundle = ScenarioBundle(
            cfg=cfg or self.cfg,
            stats=self.stats,
            params=self.params,
            scheme=scheme,
        )
        return Evaluator(bundle)

    def run(self) -> int:
        self._initialize()
        logger.info("Running {} with seed {}".format(self.spec.command, self.spec.seed))
        handlers = {
            "validate": self.validate,
            "sweep-bits": self.sweep_bits,
            "tradeoff": self.tradeoff,
            "optimize": self.optimize,
            "training-gain": self.training_gain,
            "geometry": self.export_geometry,
        }
        status = handlers[self.spec.command]()
        logger.info("Finished {} with status {}".format(self.spec.command, status))
        return status

    def validate(self) -> int:
        mc = self.mc_config()
        tolerance = self.spec.tolerance
        if tolerance is None:
            tolerance = self.config.montecarlo.tolerance
        rows = []
        failures = 0
        for scheme in self.spec.schemes():
            for bits in self.spec.bits(VALIDATION_BITS, self.cfg.b_max):
                allocation = BitAllocation.uniform(self.cfg, bits)
                for csi_mode in self.spec.csi_modes():
                    closed = rate_report(
                        self.stats, self.cfg, allocation, scheme, csi_mode, IcMode.WITH).r_dl
                    simulated = simulate_dl_rate(
                        self.cfg, self.stats, scheme, allocation, csi_mode, mc)
                    for k, (c, s) in enumerate(zip(closed, simulated)):
                        record = compare_closed_form(c, s, tolerance)
                        failures += not record.passed
                        rows.append((scheme.value, csi_mode.value, NOT_APPLICABLE, bits,
                                     "dl{}".format(k)) + self._comparison_fields(record))
                for ic_mode in self.spec.ic_modes():
                    closed = rate_report(
                        self.stats, self.cfg, allocation, scheme, CsiMode.ESTIMATED,
                        ic_mode).r_ul
                    simulated = simulate_ul_rate(
                        self.cfg, self.stats, scheme, allocation, ic_mode, mc)
                    for k, (c, s) in enumerate(zip(closed, simulated)):
                        record = compare_closed_form(c, s, tolerance)
                        failures += not record.passed
                        rows.append((scheme.value, NOT_APPLICABLE, ic_mode.value, bits,
                                     "ul{}".format(k)) + self._comparison_fields(record))
                logger.info("Validated {} at {} bits".format(scheme.value, bits))
        write_table(VALIDATION_HEADER, rows, self.spec.out, self.spec.json)
        if failures:
            logger.error("{} of {} points exceed tolerance {}".format(
                failures, len(rows), tolerance))
            return 1
        return 0

    @staticmethod
    def _comparison_fields(record) -> tuple:
        return (record.closed_form, record.mc_mean, record.mc_half_width, record.rel_err)

    def sweep_bits(self) -> int:
        rows = []
        for scheme in self.spec.schemes():
            for bits in self.spec.bits((1, self.cfg.b_max), self.cfg.b_max):
                allocation = BitAllocation.uniform(self.cfg, bits)
                estimated = rate_report(
                    self.stats, self.cfg, allocation, scheme, CsiMode.ESTIMATED, IcMode.WITH)
                statistical = rate_report(
                    self.stats, self.cfg, allocation, scheme, CsiMode.STATISTICAL, IcMode.WITH)
                without_ic = rate_report(
                    self.stats, self.cfg, allocation, scheme, CsiMode.ESTIMATED,
                    IcMode.WITHOUT)
                rows.append((
                    scheme.value, bits,
                    float(np.mean(estimated.r_dl)),
                    float(np.mean(statistical.r_dl)),
                    float(np.mean(estimated.r_ul)),
                    float(np.mean(without_ic.r_ul)),
                    estimated.sum_se,
                ))
        write_table(SWEEP_HEADER, rows, self.spec.out, self.spec.json)
        return 0

    def tradeoff(self) -> int:
        scheme = self.spec.scheme or Scheme.MR
        rows = []
        for m in self.spec.m_values:
            evaluator = self.evaluator(scheme, self.cfg._replace(m=m).validate())
            for bits in self.spec.bits(TRADEOFF_BITS, self.cfg.b_max):
                objectives = evaluator.evaluate(
                    BitAllocation.uniform(evaluator.cfg, bits)).objectives
                rows.append((m, bits, objectives.f1, objectives.f2))
        write_table(TRADEOFF_HEADER, rows, self.spec.out, self.spec.json)
        return 0

    def optimize(self) -> int:
        scheme = self.spec.scheme or Scheme.MR
        evaluator = self.evaluator(scheme)
        constraints = build_constraints(self.config, evaluator)
        summary = {
            "method": self.spec.method,
            "scheme": scheme.value,
            "seed": self.spec.seed,
            "constraints": constraints._asdict(),
        }
        if self.spec.method == "dqn":
            dqn_cfg = DqnConfig.from_config(self.config)
            result = dqn_run(evaluator, constraints, dqn_cfg, self.spec.seed)
            write_table(TRACE_HEADER, result.trace, self.spec.out, self.spec.json)
            summary["dqn"] = dqn_cfg._asdict()
            summary["best"] = self._front_record(result.best)
            summary["best_reward"] = result.best_reward
        else:
            if self.spec.method == "exhaustive":
                front = exhaustive_front(evaluator, constraints)
            else:
                nsga2_cfg = Nsga2Config.from_config(self.config)
                front = Nsga2(evaluator, constraints, nsga2_cfg, self.spec.seed).run()
                summary["nsga2"] = nsga2_cfg._asdict()
            ordered = sorted(front.individuals, key=lambda ind: (ind.objectives.f1, ind.key))
            rows = [self._front_row(ind) for ind in ordered]
            write_table(FRONT_HEADER, rows, self.spec.out, self.spec.json)
            summary["front_size"] = front.size
        summary["evaluations"] = evaluator.cache_size
        write_summary(summary, self.spec.out)
        return 0

    @staticmethod
    def _front_row(individual) -> tuple:
        allocation = individual.allocation
        return (
            individual.objectives.f1,
            individual.objectives.f2,
            individual.feasible,
            join_bits(allocation.ul_rau_bits),
            join_bits(allocation.dl_rau_bits),
            join_bits(allocation.dl_user_bits),
        )

    def _front_record(self, individual) -> dict:
        return dict(zip(FRONT_HEADER, self._front_row(individual)))

    def training_gain(self) -> int:
        bits_range = self.spec.bits(TRAINING_GAIN_BITS, self.cfg.b_max)
        rows = []
        for scheme in self.spec.schemes():
            for bits in bits_range:
                allocation = BitAllocation.uniform(self.cfg, bits)
                estimated = []
                statistical = []
                for offset in range(self.spec.geometries):
                    stats = large_scale_fading(
                        sample_geometry(self.cfg, self.spec.seed + offset), self.cfg)
                    estimated.append(np.mean(rate_report(
                        stats, self.cfg, allocation, scheme, CsiMode.ESTIMATED).r_dl))
                    statistical.append(np.mean(rate_report(
                        stats, self.cfg, allocation, scheme, CsiMode.STATISTICAL).r_dl))
                mean_est = float(np.mean(estimated))
                mean_stat = float(np.mean(statistical))
                gain = (mean_est - mean_stat) / mean_stat if mean_stat > 0 else 0.0
                rows.append((scheme.value, self.spec.geometries, bits, mean_est, mean_stat, gain))
        write_table(TRAINING_GAIN_HEADER, rows, self.spec.out, self.spec.json)
        return 0

    def export_geometry(self) -> int:
        write_table(GEOMETRY_HEADER, self.geometry.rows(), self.spec.out, self.spec.json)
        return 0


def cmd_validate(config, spec: ExperimentSpec) -> int:
    return ExperimentRunner(config, spec._replace(command="validate")).run()


def cmd_sweep_bits(config, spec: ExperimentSpec) -> int:
    return ExperimentRunner(config, spec._replace(command="sweep-bits")).run()


def cmd_tradeoff(config, spec: ExperimentSpec) -> int:
    return ExperimentRunner(config, spec._replace(command="tradeoff")).run()


def cmd_optimize(config, spec: ExperimentSpec) -> int:
    return ExperimentRunner(config, spec._replace(command="optimize")).run()


def cmd_training_gain(config, spec: ExperimentSpec) -> int:
    return ExperimentRunner(config, spec._replace(command="training-gain")).run()


def cmd_geometry(config, spec: ExperimentSpec) -> int:
    return ExperimentRunner(config, spec._replace(command="geometry")).run()
