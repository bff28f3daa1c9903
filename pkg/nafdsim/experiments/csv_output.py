# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional
from typing import Sequence


logger = logging.getLogger(__name__)


GEOMETRY_HEADER = ("kind", "index", "x_m", "y_m")
VALIDATION_HEADER = (
    "scheme", "csi_mode", "ic_mode", "bits", "user",
    "closed_form", "mc_mean", "mc_halfwidth", "rel_err",
)
SWEEP_HEADER = (
    "scheme", "bits", "dl_estimated", "dl_statistical",
    "ul_with_ic", "ul_without_ic", "sum_se",
)
TRADEOFF_HEADER = ("m", "bits", "f1_se", "f2_ee")
FRONT_HEADER = (
    "f1_se", "f2_ee", "feasible", "bits_ul_raus", "bits_dl_raus", "bits_dl_users",
)
TRACE_HEADER = ("iter", "reward", "loss", "epsilon", "best_reward_so_far")
TRAINING_GAIN_HEADER = (
    "scheme", "geometries", "bits", "mean_estimated", "mean_statistical", "relative_gain",
)


def join_bits(bits: Sequence[int]) -> str:
    return " ".join(str(b) for b in bits)


def _plain(value):
    if hasattr(value, "item"):
        return value.item()
    return value


def write_table(header: Sequence[str], rows: Sequence[Sequence], out: Optional[str],
                as_json: bool = False) -> None:
    """Write rows as CSV to out (stdout when None); with as_json also
    mirror them as a list of records in out + '.json'.
    """
    rows = [[_plain(v) for v in row] for row in rows]
    if out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        if as_json:
            sys.stdout.write(_records_json(header, rows) + "\n")
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("Wrote {} rows to {}".format(len(rows), path))
    if as_json:
        json_path = Path(str(path) + ".json")
        json_path.write_text(_records_json(header, rows) + "\n")


def write_summary(summary: dict, out: Optional[str]) -> None:
    text = json.dumps(summary, indent=2, sort_keys=True)
    if out is None:
        sys.stdout.write(text + "\n")
        return
    summary_path = Path(str(out) + ".summary.json")
    summary_path.write_text(text + "\n")
    logger.info("Wrote summary to {}".format(summary_path))


def _records_json(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    records = [dict(zip(header, row)) for row in rows]
    return json.dumps(records, indent=2, sort_keys=False)
