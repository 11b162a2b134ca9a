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


class EstimationError(Exception):
    """Base class of errors raised by the estimation library."""


class InvalidInputError(EstimationError, ValueError):
    """Input violates the contract of an operation."""


class NumericalError(EstimationError, ArithmeticError):
    """Computation produced non-finite values or did not converge."""
