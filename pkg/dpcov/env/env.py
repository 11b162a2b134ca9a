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

from pydantic import BaseModel, Field
from typing import Any, Optional

from dpcov.config.experiment_plan import ExperimentPlan, cli_overrides, load_plan
from dpcov.utils.colors import ColorSettings


class Env(BaseModel):
    """
    Collection of settings for one benchmark run.

    Attributes:
        plan: Experiment plan built from the command line and config files
        verbosity: How much verbose to be
        full: Whether to continue after the first failure
        no_colors: If not to use ansi colors
        no_jumps: If not to use ansi control sequences
    """

    plan: ExperimentPlan
    verbosity: int = Field(ge=0)
    full: bool
    no_colors: bool
    no_jumps: bool

    @staticmethod
    def load(
        verbosity: int = 0,
        full: bool = False,
        plain: bool = False,
        no_jumps: bool = False,
        no_colors: bool = False,
        config: Optional[str] = None,
        **args: Any,
    ) -> Optional["Env"]:
        no_jumps |= plain
        no_colors |= plain

        plan = load_plan(config, cli_overrides(args))
        if plan is None:
            return None

        return Env(
            plan=plan,
            verbosity=verbosity,
            full=full,
            no_jumps=no_jumps,
            no_colors=no_colors,
        )

    def colored(self, msg: str, color: str) -> str:
        return ColorSettings.colored(msg, color)
