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

"""Result rows, their per-configuration summary and the files they go to."""

import csv
from dataclasses import astuple, dataclass, fields
from itertools import groupby
import json
import logging
import os
from typing import Any, Iterable, Optional

import numpy as np

from dpcov.config.experiment_plan import ExperimentPlan
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.privacy import BudgetKind, PrivacyBudget, approx_epsilon
from dpcov.jobs.jobs import InputFailure, Job, PipelineItemFailure
from dpcov.utils.text import exact_float, short_float, table
from dpcov.version import __version__
from dpcov.experiment_jobs.experiment_manager import (
    ExperimentJobManager,
    CONFIGURATION_MAN_CODE,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResultRow:
    mechanism: str
    d: int
    n: int
    N: Optional[int]
    budget_kind: str
    budget_value: float
    beta: float
    seed: int
    rep: int
    frobenius_error: float
    elapsed_ms: Optional[float] = None
    chosen_tau: Optional[float] = None
    chosen_branch: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.frobenius_error >= 0:
            raise InvalidInputError(
                f"frobenius error must be nonnegative, got {self.frobenius_error}"
            )

    def config_key(self) -> tuple:
        return (
            self.mechanism,
            self.d,
            self.n,
            self.N,
            self.budget_kind,
            self.budget_value,
            self.beta,
        )


@dataclass(frozen=True)
class SummaryRow:
    mechanism: str
    d: int
    n: int
    N: Optional[int]
    budget_kind: str
    budget_value: float
    beta: float
    reps: int
    mean_error: float
    std_error: float


ROW_COLUMNS = [f.name for f in fields(ResultRow)]
SUMMARY_COLUMNS = [f.name for f in fields(SummaryRow)]


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return exact_float(value)
    return str(value)


def _write(path: str, header: list[str], rows: Iterable[tuple]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(map(_format, row))


def write_rows(path: str, rows: Iterable[ResultRow]) -> None:
    _write(path, ROW_COLUMNS, map(astuple, rows))


def write_summary(path: str, summary: Iterable[SummaryRow]) -> None:
    _write(path, SUMMARY_COLUMNS, map(astuple, summary))


def read_rows(path: str) -> list[ResultRow]:
    """Reads a results file written by write_rows."""

    def optional(text: str, kind: type) -> Any:
        return kind(text) if text != "" else None

    try:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != ROW_COLUMNS:
                raise InvalidInputError(
                    f"{path}: expected columns {','.join(ROW_COLUMNS)}"
                )
            return [
                ResultRow(
                    mechanism=r["mechanism"],
                    d=int(r["d"]),
                    n=int(r["n"]),
                    N=optional(r["N"], int),
                    budget_kind=r["budget_kind"],
                    budget_value=float(r["budget_value"]),
                    beta=float(r["beta"]),
                    seed=int(r["seed"]),
                    rep=int(r["rep"]),
                    frobenius_error=float(r["frobenius_error"]),
                    elapsed_ms=optional(r["elapsed_ms"], float),
                    chosen_tau=optional(r["chosen_tau"], float),
                    chosen_branch=optional(r["chosen_branch"], str),
                )
                for r in reader
            ]
    except OSError as err:
        raise InvalidInputError(f"{path}: cannot read file: {err.strerror}")
    except InvalidInputError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidInputError(f"{path}: malformed results file ({err})")


def summarize(rows: Iterable[ResultRow]) -> list[SummaryRow]:
    """Mean and population standard deviation of the error per configuration."""
    rows = list(rows)
    if not rows:
        raise InvalidInputError("no results to summarize")

    order: dict[tuple, int] = {}
    for row in rows:
        order.setdefault(row.config_key(), len(order))

    summary = []
    for key, group in groupby(
        sorted(rows, key=lambda r: order[r.config_key()]), key=ResultRow.config_key
    ):
        errors = np.array([r.frobenius_error for r in group])
        summary.append(
            SummaryRow(
                *key,
                reps=len(errors),
                mean_error=float(np.mean(errors)),
                std_error=float(np.std(errors)),
            )
        )
    return summary


def summary_table(summary: Iterable[SummaryRow]) -> str:
    header = ["mechanism", "d", "n", "N", "budget", "beta", "reps", "mean", "std"]
    symbols = {BudgetKind.zcdp: "ρ", BudgetKind.pure: "ε"}
    rows = [
        [
            s.mechanism,
            str(s.d),
            str(s.n),
            _format(s.N),
            f"{symbols[BudgetKind(s.budget_kind)]}={s.budget_value:g}",
            f"{s.beta:g}",
            str(s.reps),
            short_float(s.mean_error),
            short_float(s.std_error),
        ]
        for s in summary
    ]
    return table(header, rows)


def output_paths(out: str) -> tuple[str, str, str]:
    """Paths of the rows, the summary and the metadata."""
    stem, _ = os.path.splitext(out)
    return out, f"{stem}.summary.csv", f"{stem}.meta.json"


def plan_metadata(plan: ExperimentPlan) -> dict[str, Any]:
    """Plan, package version and the (ε, δ) equivalent of every budget."""
    points = []
    for point in plan.points():
        budget: PrivacyBudget = plan.budget_at(point)
        points.append(
            {
                "index": point.index,
                "value": point.value,
                "budget_kind": str(budget.kind),
                "budget_value": budget.value,
                "approx_dp": {
                    "epsilon": approx_epsilon(budget, plan.privacy.delta),
                    "delta": (
                        plan.privacy.delta if budget.kind == BudgetKind.zcdp else 0.0
                    ),
                },
            }
        )
    return {
        "dpcov_version": __version__,
        "plan": plan.model_dump(mode="json"),
        "sweep_points": points,
    }


def write_meta(path: str, plan: ExperimentPlan) -> None:
    with open(path, "w") as f:
        json.dump(plan_metadata(plan), f, indent=4, sort_keys=True)
        f.write("\n")


class ResultsManager(ExperimentJobManager):
    """Collects rows of all configurations and writes the output files."""

    run_always: bool = True

    def __init__(self) -> None:
        super().__init__("Writing results")

    def _get_jobs(self) -> list[Job]:
        return []

    def _evaluate(self) -> None:
        configurations = sorted(
            (
                (int(name.removeprefix(CONFIGURATION_MAN_CODE)), data)
                for name, data in self.prerequisites_results.items()
                if name.startswith(CONFIGURATION_MAN_CODE) and data is not None
            ),
            key=lambda c: c[0],
        )
        rows = [row for _, data in configurations for row in data["rows"]]
        if not rows:
            raise PipelineItemFailure("No repetition finished.")

        rows_path, summary_path, meta_path = output_paths(self._plan.experiment.out)
        summary = summarize(rows)
        try:
            write_rows(rows_path, rows)
            write_summary(summary_path, summary)
            write_meta(meta_path, self._plan)
        except OSError as err:
            raise InputFailure(f"Cannot write results: {err}")
        logger.info(f"Wrote {len(rows)} rows to {rows_path}")

        self._print(summary_table(summary))
        self._print(f"Results written to {rows_path}, {summary_path} and {meta_path}")
