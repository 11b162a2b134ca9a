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

"""One repetition: a mechanism run on a dataset and its error."""

from dataclasses import dataclass
import math
import time
from typing import Any, Callable, Optional

import numpy as np

from dpcov.config.config_types import MechanismName
from dpcov.config.experiment_plan import SweepPoint, mechanism_variant
from dpcov.env.env import Env
from dpcov.estimation.adaptive import (
    AdaptiveDetails,
    ThresholdSearchConfig,
    adaptive_cov,
    adaptive_cov_pure,
)
from dpcov.estimation.estimation_errors import InvalidInputError, NumericalError
from dpcov.estimation.linalg import Dataset, covariance, frobenius_dist
from dpcov.estimation.mechanisms import (
    MechanismOptions,
    MechanismReport,
    Variant,
    gauss_cov,
    lap_cov,
    separate_cov,
    separate_cov_pure,
    zero_cov,
)
from dpcov.estimation.privacy import PrivacyBudget
from dpcov.estimation.randomness import RandomStream
from dpcov.jobs.jobs import Job
from dpcov.experiment_jobs.experiment_manager import (
    ExperimentJobManager,
    DATASET_MAN_CODE,
)
from dpcov.experiment_jobs.results import ResultRow


def run_mechanism(
    variant: Variant,
    X: Dataset,
    budget: PrivacyBudget,
    beta: float,
    stream: RandomStream,
    options: MechanismOptions,
    search: ThresholdSearchConfig,
) -> MechanismReport:
    if variant.budget_kind() not in (None, budget.kind):
        raise InvalidInputError(f"'{variant}' cannot spend a {budget.kind} budget")
    if variant == Variant.gauss:
        return gauss_cov(X, budget.value, stream)
    elif variant == Variant.lap:
        return lap_cov(X, budget.value, stream)
    elif variant == Variant.separate:
        return separate_cov(X, budget.value, stream, options)
    elif variant == Variant.separate_pure:
        return separate_cov_pure(X, budget.value, stream, options)
    elif variant == Variant.adaptive:
        return adaptive_cov(X, budget.value, beta, stream, search, options)
    elif variant == Variant.adaptive_pure:
        return adaptive_cov_pure(X, budget.value, beta, stream, search, options)
    else:
        return zero_cov(X)


@dataclass(frozen=True)
class RepetitionTask:
    """Everything one repetition needs, picklable for worker processes."""

    dataset: Dataset
    bins: Optional[int]
    mechanism: MechanismName
    budget: PrivacyBudget
    beta: float
    options: MechanismOptions
    search: ThresholdSearchConfig
    zero_noise: bool
    master_seed: int
    configuration: int
    rep: int
    record_timing: bool

    def stream(self) -> RandomStream:
        return (
            RandomStream(self.master_seed, zero_noise=self.zero_noise)
            .derive("configuration", self.configuration)
            .derive("rep", self.rep)
        )


def run_repetition(task: RepetitionTask) -> tuple[ResultRow, Optional[str]]:
    """Result row and, for adaptive mechanisms, the budget ledger."""
    X = task.dataset
    start = time.perf_counter()
    report = run_mechanism(
        mechanism_variant(task.mechanism),
        X,
        task.budget,
        task.beta,
        task.stream(),
        task.options,
        task.search,
    )
    elapsed_ms = (time.perf_counter() - start) * 1000
    if not np.all(np.isfinite(report.estimate)):
        raise NumericalError("non-finite estimate")

    details = report.details
    row = ResultRow(
        mechanism=str(task.mechanism),
        d=X.dim,
        n=X.count,
        N=task.bins,
        budget_kind=str(task.budget.kind),
        budget_value=task.budget.value,
        beta=task.beta,
        seed=task.master_seed,
        rep=task.rep,
        frobenius_error=frobenius_dist(report.estimate, covariance(X)),
        elapsed_ms=elapsed_ms if task.record_timing else None,
        chosen_tau=report.clip_threshold if details is not None else None,
        chosen_branch=str(report.branch) if details is not None else None,
    )
    ledger = None
    if isinstance(details, AdaptiveDetails):
        ledger = f"{details.summary()}; branch {report.branch}"
    return row, ledger


class RepetitionJob(Job):
    def __init__(self, env: Env, task: RepetitionTask) -> None:
        self.task = task
        super().__init__(env, f"{task.mechanism} rep {task.rep}")

    def _remote(self) -> tuple[Callable[..., Any], tuple[Any, ...]]:
        return run_repetition, (self.task,)

    def _run(self) -> ResultRow:
        row, ledger = self._await()
        if ledger is not None and self._env.verbosity >= 1 and self.task.rep == 0:
            self._print(self._colored(f"{self.task.mechanism}: {ledger}", "magenta"))
        return row


class ConfigurationManager(ExperimentJobManager):
    """All repetitions of one mechanism at one sweep point."""

    def __init__(
        self, index: int, point: SweepPoint, mechanism: MechanismName, label: str
    ) -> None:
        self.index = index
        self.point = point
        self.mechanism = mechanism
        self._jobs: list[RepetitionJob] = []
        super().__init__(f"{mechanism} {label}")

    def _get_jobs(self) -> list[Job]:
        plan = self._plan
        dataset: Dataset = self.prerequisites_results[
            f"{DATASET_MAN_CODE}{self.point.index}"
        ]["dataset"]
        spec = plan.synth_at(self.point)
        self._jobs = [
            RepetitionJob(
                self._env,
                RepetitionTask(
                    dataset=dataset,
                    bins=spec.bins if spec is not None else None,
                    mechanism=self.mechanism,
                    budget=plan.budget_at(self.point),
                    beta=plan.privacy.beta,
                    options=plan.mechanism_options(),
                    search=plan.search_config(),
                    zero_noise=plan.mechanism.zero_noise,
                    master_seed=plan.experiment.seed,
                    configuration=self.index,
                    rep=rep,
                    record_timing=plan.experiment.record_timing,
                ),
            )
            for rep in range(plan.experiment.reps)
        ]
        return list(self._jobs)

    def _rows(self) -> list[ResultRow]:
        return [job.result for job in self._jobs if job.result is not None]

    def _note(self) -> str:
        rows = self._rows()
        if not rows:
            return ""
        mean = math.fsum(r.frobenius_error for r in rows) / len(rows)
        return f"mean error {mean:.4g}"

    def _compute_result(self) -> dict[str, Any]:
        return {"rows": self._rows()}
