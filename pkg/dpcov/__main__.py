# dpcov - Differentially private covariance estimation and benchmarks.
#
# Copyright (c)   2024        The dpcov developers

# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# any later version.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import argparse
import logging
import os
import signal
import sys

from dpcov.config.config_types import EigenSolver, MechanismName, Normalization
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.experiment_jobs.results import read_rows, summarize, summary_table
from dpcov.experiment_jobs.results import write_summary
from dpcov.jobs.experiment_pipeline import ExperimentPipeline
from dpcov.utils.colors import ColorSettings
from dpcov.utils.pipeline_tools import INPUT_ERROR_CODE, run_pipeline
from dpcov.utils.text import eprint
from dpcov.utils.util import INTERNALS_DIR, clean_internals
from dpcov.version import print_version

LOG_FILE = os.path.join(INTERNALS_DIR, "log")


def sigint_handler(sig, frame):
    eprint("\rStopping...")
    sys.exit(130)


def run_experiment(args) -> int:
    return run_pipeline(ExperimentPipeline, **vars(args))


def summarize_results(args) -> int:
    try:
        summary = summarize(read_rows(args.results))
        if args.out is not None:
            write_summary(args.out, summary)
    except InvalidInputError as err:
        eprint(ColorSettings.colored(str(err), "red"))
        return INPUT_ERROR_CODE
    except OSError as err:
        eprint(ColorSettings.colored(f"Cannot write summary: {err}", "red"))
        return INPUT_ERROR_CODE
    print(summary_table(summary))
    return 0


def main(argv) -> int:
    parser = argparse.ArgumentParser(
        description=(
            "Differentially private covariance estimation and benchmarks "
            "of the private mechanisms on synthetic or CSV data."
        )
    )

    # ------------------------------- dpcov -------------------------------

    parser.add_argument(
        "--plain",
        "-p",
        action="store_true",
        help="do not use ANSI escape sequences",
    )
    parser.add_argument(
        "--no-jumps",
        action="store_true",
        help="do not use ANSI cursor movement & clear sequences",
    )
    parser.add_argument(
        "--no-colors",
        action="store_true",
        help="do not use ANSI color sequences",
    )

    subparsers = parser.add_subparsers(
        help="subcommand to run", dest="subcommand", required=True
    )

    # ------------------------------- dpcov version -------------------------------

    subparsers.add_parser("version", help="print current version")

    # ------------------------------- dpcov run -------------------------------

    parser_run = subparsers.add_parser(
        "run", help="run mechanisms repeatedly and write their errors"
    )
    parser_run.add_argument(
        "--config",
        "-c",
        type=str,
        help="read experiment settings from CONFIG (command line options win)",
    )
    parser_run.add_argument(
        "--mechanism",
        "-m",
        type=str,
        help="comma separated mechanisms: " + ", ".join(MechanismName),
    )
    data_group = parser_run.add_mutually_exclusive_group()
    data_group.add_argument(
        "--input", "-i", type=str, help="read records from CSV file INPUT"
    )
    data_group.add_argument(
        "--synthetic",
        "-s",
        type=str,
        help="generate records, e.g. n=1000,d=64,N=4,s=3",
    )
    budget_group = parser_run.add_mutually_exclusive_group()
    budget_group.add_argument("--rho", type=str, help="zCDP budget")
    budget_group.add_argument("--eps", type=str, help="pure DP budget")
    parser_run.add_argument(
        "--delta", type=str, help="δ of the reported (ε, δ) equivalent"
    )
    parser_run.add_argument(
        "--beta", type=str, help="failure probability of the adaptive mechanisms"
    )
    parser_run.add_argument("--reps", "-r", type=str, help="repetitions per mechanism")
    parser_run.add_argument("--seed", type=str, help="master seed")
    parser_run.add_argument(
        "--sweep", type=str, help="sweep one parameter, e.g. d=16,64,256"
    )
    parser_run.add_argument("--out", "-o", type=str, help="write rows to OUT")
    parser_run.add_argument(
        "--workers", "-w", type=str, help="run repetitions in WORKERS processes"
    )
    parser_run.add_argument(
        "--record-timing",
        action="store_true",
        help="fill the elapsed_ms column (reruns stop being byte-identical)",
    )
    parser_run.add_argument(
        "--normalize",
        choices=list(Normalization),
        help="normalize CSV records",
    )
    parser_run.add_argument(
        "--no-rescale",
        action="store_true",
        help="do not scale datasets to radius in (0.5, 1]",
    )
    parser_run.add_argument(
        "--eigensolver",
        choices=list(EigenSolver),
        help="eigendecomposition backend",
    )
    parser_run.add_argument(
        "--project-eigenvalues",
        action="store_true",
        help="clamp noisy eigenvalues at zero",
    )
    parser_run.add_argument(
        "--zero-noise",
        action="store_true",
        help="replace all noise by zeros (testing only, not private)",
    )
    parser_run.add_argument(
        "--lap-constant", type=str, help="constant of the Laplace tail bounds"
    )
    parser_run.add_argument(
        "--tau-cap-exponent", type=str, help="smallest clipping threshold 2^E"
    )
    parser_run.add_argument(
        "--radius-floor-exponent", type=str, help="smallest private radius 2^E"
    )
    parser_run.add_argument(
        "--known-radius",
        action="store_true",
        help="skip the private radius, the data is known to lie in the unit ball",
    )
    parser_run.add_argument(
        "--full", "-f", action="store_true", help="don't stop on first failure"
    )
    parser_run.add_argument(
        "--verbosity",
        "-v",
        action="count",
        default=0,
        help="be more verbose (print budget ledgers of adaptive mechanisms)",
    )

    # ------------------------------- dpcov summarize -------------------------------

    parser_summarize = subparsers.add_parser(
        "summarize", help="print mean and std of errors of a results file"
    )
    parser_summarize.add_argument("results", type=str, help="results CSV file")
    parser_summarize.add_argument(
        "--out", "-o", type=str, help="also write the summary to OUT"
    )

    # ------------------------------- dpcov clean -------------------------------

    subparsers.add_parser("clean", help="remove logs of dpcov")

    args = parser.parse_args(argv)
    ColorSettings.set_state(not args.plain and not args.no_colors)

    if args.subcommand == "version":
        return print_version()
    elif args.subcommand == "clean":
        eprint(f"Cleaning directory: {os.path.abspath(INTERNALS_DIR)}")
        return 0 if clean_internals() else 1

    os.makedirs(os.path.dirname(LOG_FILE), exist_ok=True)
    open(LOG_FILE, "w").close()
    logging.basicConfig(
        filename=LOG_FILE,
        encoding="utf-8",
        level=logging.DEBUG if getattr(args, "verbosity", 0) >= 2 else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        force=True,
    )

    if args.subcommand == "run":
        return run_experiment(args)
    elif args.subcommand == "summarize":
        return summarize_results(args)
    else:
        raise RuntimeError(f"Unknown subcommand {args.subcommand}")


def main_wrapped():
    signal.signal(signal.SIGINT, sigint_handler)
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    main_wrapped()
