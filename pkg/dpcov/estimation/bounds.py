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

"""
Closed-form concentration bounds on the norms of the noise the mechanisms add.

Each function returns a value that the corresponding random norm exceeds with
probability at most β. Natural logarithms throughout; a logarithm of the
dimension is taken as 1 when d ≤ e.
"""

from dataclasses import dataclass
import math

from dpcov.estimation.estimation_errors import InvalidInputError

DEFAULT_LAP_CONSTANT = 4.0


@dataclass(frozen=True)
class BoundConstants:
    """
    Constants of the Laplace bounds.

    Attributes:
        lap_c: Multiplier of the log(1/β)·log(d) term, calibrated by Monte-Carlo
    """

    lap_c: float = DEFAULT_LAP_CONSTANT

    def __post_init__(self) -> None:
        if not self.lap_c > 0:
            raise InvalidInputError(f"lap_c must be positive, got {self.lap_c}")


DEFAULT_CONSTANTS = BoundConstants()


def _check(d: int, beta: float) -> None:
    if d < 1:
        raise InvalidInputError(f"dimension must be positive, got {d}")
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0, 1), got {beta}")


def log_dim(d: float) -> float:
    return 1.0 if d <= math.e else math.log(d)


def eta(d: int, beta: float) -> float:
    """Bound on ‖Y‖₂ for Y ∼ N(0, I_d)."""
    _check(d, beta)
    log_beta = math.log(1 / beta)
    return math.sqrt(d + 2 * math.sqrt(d * log_beta) + 2 * log_beta)


def upsilon(d: int, beta: float) -> float:
    """Bound on the operator norm of W ∼ SGW(d)."""
    _check(d, beta)
    log_d = log_dim(d)
    ratio = (log_d / d) ** (1 / 3)
    return (
        2 * math.sqrt(d)
        + 2 * d ** (1 / 6) * log_d ** (1 / 3)
        + 6 * (1 + ratio) * math.sqrt(log_d) / math.sqrt(math.log(1 + ratio))
        + 2 * math.sqrt(2 * math.log(1 / beta))
    )


def omega(d: int, beta: float) -> float:
    """Bound on the Frobenius norm of W ∼ SGW(d)."""
    _check(d, beta)
    log_beta = math.log(2 / beta)
    return math.sqrt(
        d * d
        + 2 * math.sqrt(d * log_beta) * (1 + math.sqrt(2 * (d - 1)))
        + 6 * log_beta
    )


def _lap_term(d: int, beta: float, constants: BoundConstants) -> float:
    return constants.lap_c * math.log(1 / beta) * log_dim(d)


def lap_vec_bound(
    d: int, beta: float, constants: BoundConstants = DEFAULT_CONSTANTS
) -> float:
    """Bound on ‖Y‖₂ for Y ∼ Lap(1)^d."""
    _check(d, beta)
    return 1.5 * math.sqrt(d) + _lap_term(d, beta, constants)


def slw_op_bound(
    d: int, beta: float, constants: BoundConstants = DEFAULT_CONSTANTS
) -> float:
    """Bound on the operator norm of W ∼ SLW(d)."""
    _check(d, beta)
    return 3 * math.sqrt(d) + _lap_term(d, beta, constants)


def slw_frob_bound(
    d: int, beta: float, constants: BoundConstants = DEFAULT_CONSTANTS
) -> float:
    """Bound on the Frobenius norm of W ∼ SLW(d)."""
    _check(d, beta)
    return 1.5 * d + _lap_term(d, beta, constants)
