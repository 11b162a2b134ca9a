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

import logging
from typing import Any

from dpcov.config.experiment_plan import SweepPoint
from dpcov.data.csv_input import load_csv
from dpcov.data.synthetic import SynthSpec, rescale_radius, synth
from dpcov.env.env import Env
from dpcov.estimation.linalg import Dataset, radius, trace_stat
from dpcov.estimation.randomness import RandomStream
from dpcov.jobs.jobs import Job
from dpcov.experiment_jobs.experiment_manager import ExperimentJobManager

logger = logging.getLogger(__name__)


def dataset_seed(master_seed: int, spec: SynthSpec) -> int:
    """Seed of a synthetic dataset without its own, equal specs share it."""
    return RandomStream(master_seed).derive("dataset", str(spec)).seed


class DatasetManager(ExperimentJobManager):
    """Builds the dataset of one sweep point."""

    def __init__(self, point: SweepPoint, description: str) -> None:
        self.point = point
        super().__init__(f"Dataset {description}")

    def _get_jobs(self) -> list[Job]:
        plan = self._plan
        spec = plan.synth_at(self.point)
        job: Job
        if spec is not None:
            seed = spec.seed
            if seed is None:
                seed = dataset_seed(plan.experiment.seed, spec)
            job = GenerateDataset(self._env, spec, seed)
        else:
            assert plan.data.input is not None
            job = LoadDataset(self._env, plan.data.input)
        self._job = job
        return [job]

    def _compute_result(self) -> dict[str, Any]:
        return {"dataset": self._job.result, "point": self.point}


class DatasetJob(Job):
    def _finish_dataset(self, X: Dataset) -> Dataset:
        if self._env.plan.data.rescale_radius:
            X = rescale_radius(X)
        logger.info(
            f"Dataset d={X.dim} n={X.count} rad={radius(X):.6g} tr={trace_stat(X):.6g}"
        )
        return X


class GenerateDataset(DatasetJob):
    def __init__(self, env: Env, spec: SynthSpec, seed: int) -> None:
        self.spec = spec
        self.seed = seed
        super().__init__(env, f"Generate {spec}")

    def _run(self) -> Dataset:
        return self._finish_dataset(synth(self.spec, self.seed))


class LoadDataset(DatasetJob):
    def __init__(self, env: Env, path: str) -> None:
        self.path = path
        super().__init__(env, f"Load {path}")

    def _run(self) -> Dataset:
        return self._finish_dataset(
            load_csv(self.path, self._env.plan.data.normalize)
        )
