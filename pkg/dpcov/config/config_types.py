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

from enum import StrEnum, auto

# Option types owned by the library, re-exported for the config layer.
from dpcov.data.csv_input import Normalization
from dpcov.estimation.linalg import EigenSolver

__all__ = ["EigenSolver", "MechanismName", "Normalization", "SweepAxis"]


class MechanismName(StrEnum):
    gauss = auto()
    lap = auto()
    separate = auto()
    separate_pure = "separate-pure"
    adaptive = auto()
    adaptive_pure = "adaptive-pure"
    zero = auto()


class SweepAxis(StrEnum):
    d = "d"
    n = "n"
    bins = "N"
    rho = "rho"
    eps = "eps"

    def is_data_axis(self) -> bool:
        return self in (SweepAxis.d, SweepAxis.n, SweepAxis.bins)
