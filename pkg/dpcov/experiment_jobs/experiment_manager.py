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

from dpcov.config.experiment_plan import ExperimentPlan
from dpcov.jobs.status import StatusJobManager

DATASET_MAN_CODE = "dataset_"
CONFIGURATION_MAN_CODE = "configuration_"
RESULTS_MAN_CODE = "results"


class ExperimentJobManager(StatusJobManager):
    """JobManager with access to the experiment plan."""

    @property
    def _plan(self) -> ExperimentPlan:
        return self._env.plan
