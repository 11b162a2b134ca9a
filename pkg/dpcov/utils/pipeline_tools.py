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
from typing import Callable

from dpcov.config.experiment_plan import ExperimentPlan
from dpcov.env.env import Env
from dpcov.jobs.job_pipeline import JobPipeline
from dpcov.jobs.experiment_pipeline import ExperimentPipeline

logger = logging.getLogger(__name__)

INPUT_ERROR_CODE = 2


def run_pipeline(pipeline_class: Callable[[Env], JobPipeline], **env_args) -> int:
    """Loads env from arguments and runs the pipeline, returns the exit code."""
    env = Env.load(**env_args)
    if env is None:
        return INPUT_ERROR_CODE
    return run_env(pipeline_class, env)


def run_env(pipeline_class: Callable[[Env], JobPipeline], env: Env) -> int:
    pipeline = pipeline_class(env)
    code = pipeline.run_jobs(env)
    logger.info(f"Pipeline finished with exit code {code}")
    return code


def run_plan(plan: ExperimentPlan, full: bool = False, verbosity: int = 0) -> int:
    """Runs plan without terminal effects, returns the exit code."""
    env = Env(plan=plan, verbosity=verbosity, full=full, no_colors=True, no_jumps=True)
    return run_env(ExperimentPipeline, env)
