# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import argparse
import logging
import sys
from pathlib import Path

from nafdsim.config.config import NafdsimConfig
from nafdsim.core.exception import NafdsimError
from nafdsim.core.system_config import CsiMode
from nafdsim.core.system_config import IcMode
from nafdsim.core.system_config import Scheme
from nafdsim.experiments.experiment_runner import cmd_geometry
from nafdsim.experiments.experiment_runner import cmd_optimize
from nafdsim.experiments.experiment_runner import cmd_sweep_bits
from nafdsim.experiments.experiment_runner import cmd_tradeoff
from nafdsim.experiments.experiment_runner import cmd_training_gain
from nafdsim.experiments.experiment_runner import cmd_validate
from nafdsim.experiments.experiment_spec import DEFAULT_M_VALUES
from nafdsim.experiments.experiment_spec import ExperimentSpec


logger = logging.getLogger(__name__)


EXIT_USAGE = 2


def _bits_range(value: str):
    lo, _, hi = value.partition(":")
    return int(lo), int(hi or lo)


def _int_list(value: str):
    return tuple(int(v) for v in value.split(","))


def parse_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        dest="config",
        type=str,
        help="Path to the config file.",
    )
    common.add_argument(
        "--log-level",
        dest="log_level",
        type=str,
        default=None,
        help="Logging level",
    )
    common.add_argument("--seed", dest="seed", type=int, default=0,
                        help="Master seed for geometry, channels and solvers.")
    common.add_argument("--scheme", dest="scheme", choices=["mr", "zf"],
                        help="Precoding/combining scheme (default: both or mr).")
    common.add_argument("--out", dest="out", type=str,
                        help="Output CSV path (default: standard output).")
    common.add_argument("--json", dest="json", action="store_true",
                        help="Mirror every CSV as JSON records.")
    common.add_argument("--bits", dest="bits_range", type=_bits_range,
                        help="Uniform bit sweep LO:HI.")

    parser = argparse.ArgumentParser(
        description="nafdsim analyses and optimizes ADC resolutions in "
                    "network-assisted full-duplex distributed massive MIMO.",
    )
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    parser_validate = subparsers.add_parser(
        "validate", parents=[common],
        help="Compare closed-form rates with the Monte-Carlo oracle.")
    parser_validate.add_argument("--trials", dest="trials", type=int)
    parser_validate.add_argument("--csi", dest="csi", choices=["estimated", "statistical"])
    parser_validate.add_argument("--ic", dest="ic", choices=["on", "off"])
    parser_validate.add_argument("--tol", dest="tolerance", type=float,
                                 help="Relative error tolerance.")
    parser_validate.set_defaults(func=cmd_validate)

    parser_sweep = subparsers.add_parser(
        "sweep-bits", parents=[common], help="Closed-form rates over uniform bit widths.")
    parser_sweep.set_defaults(func=cmd_sweep_bits)

    parser_tradeoff = subparsers.add_parser(
        "tradeoff", parents=[common], help="SE/EE pairs over bits and antenna counts.")
    parser_tradeoff.add_argument("--m-values", dest="m_values", type=_int_list,
                                 default=DEFAULT_M_VALUES)
    parser_tradeoff.set_defaults(func=cmd_tradeoff)

    parser_optimize = subparsers.add_parser(
        "optimize", parents=[common], help="Solve the bit-allocation problem.")
    parser_optimize.add_argument("--method", dest="method", default="nsga2",
                                 choices=["nsga2", "dqn", "exhaustive"])
    parser_optimize.set_defaults(func=cmd_optimize)

    parser_gain = subparsers.add_parser(
        "training-gain", parents=[common],
        help="Gain of beamforming training over statistical CSI.")
    parser_gain.add_argument("--geometries", dest="geometries", type=int, default=20)
    parser_gain.set_defaults(func=cmd_training_gain)

    parser_geometry = subparsers.add_parser(
        "geometry", parents=[common], help="Export the sampled node positions.")
    parser_geometry.set_defaults(func=cmd_geometry)

    return parser.parse_args(argv)


def build_spec(args) -> ExperimentSpec:
    return ExperimentSpec(
        command=args.command,
        config_path=args.config,
        seed=args.seed,
        trials=getattr(args, "trials", None),
        scheme=Scheme(args.scheme) if args.scheme else None,
        csi_mode=CsiMode(args.csi) if getattr(args, "csi", None) else None,
        ic_mode=IcMode(args.ic) if getattr(args, "ic", None) else None,
        method=getattr(args, "method", "nsga2"),
        out=args.out,
        json=args.json,
        bits_range=args.bits_range,
        m_values=getattr(args, "m_values", DEFAULT_M_VALUES),
        tolerance=getattr(args, "tolerance", None),
        geometries=getattr(args, "geometries", 20),
    )


def main(argv=None):
    logging.basicConfig(level=logging.ERROR)
    args = parse_args(argv)

    # Set the log level
    if args.log_level is not None:
        logging.getLogger().setLevel(args.log_level.upper())

    if args.config is not None and not Path(args.config).is_file():
        sys.stderr.write("Config file not found: {}\n".format(args.config))
        return EXIT_USAGE

    try:
        config = NafdsimConfig(args.config)
        config.read()
        if args.log_level is None:
            logging.getLogger().setLevel(config.general.log_level.upper())
        return args.func(config, build_spec(args))
    except (NafdsimError, ValueError) as e:
        logger.error("Experiment failed: {}".format(e))
        sys.stderr.write("error: {}\n".format(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
