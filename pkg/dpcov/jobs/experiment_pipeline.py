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

from dpcov.jobs.job_pipeline import JobPipeline
from dpcov.env.env import Env
from dpcov.jobs.jobs import JobManager
from dpcov.experiment_jobs.experiment_manager import (
    DATASET_MAN_CODE,
    CONFIGURATION_MAN_CODE,
    RESULTS_MAN_CODE,
)
from dpcov.experiment_jobs.dataset import DatasetManager
from dpcov.experiment_jobs.repetition import ConfigurationManager
from dpcov.experiment_jobs.results import ResultsManager


class ExperimentPipeline(JobPipeline):
    """
    Dataset of each sweep point, then every mechanism's repetitions on it,
    then the output files.
    """

    def __init__(self, env: Env):
        super().__init__()
        plan = env.plan
        named_pipeline: list[tuple[JobManager, str]] = []
        configurations: list[tuple[JobManager, str]] = []

        for point in plan.points():
            spec = plan.synth_at(point)
            description = str(spec) if spec is not None else str(plan.data.input)
            named_pipeline.append(
                dataset := (
                    DatasetManager(point, description),
                    f"{DATASET_MAN_CODE}{point.index}",
                )
            )
            budget = plan.budget_at(point)
            for mechanism in plan.experiment.mechanisms:
                index = len(configurations)
                named_pipeline.append(
                    configuration := (
                        ConfigurationManager(
                            index, point, mechanism, f"{description} {budget}"
                        ),
                        f"{CONFIGURATION_MAN_CODE}{index}",
                    )
                )
                configuration[0].add_prerequisite(*dataset)
                configurations.append(configuration)

        named_pipeline.append(results := (ResultsManager(), RESULTS_MAN_CODE))
        for configuration in configurations:
            results[0].add_prerequisite(*configuration)

        self.pipeline = list(map(lambda x: x[0], named_pipeline))
