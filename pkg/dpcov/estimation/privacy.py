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

from dataclasses import dataclass, field
from enum import StrEnum, auto
import logging
import math
from typing import Iterable

from dpcov.estimation.estimation_errors import InvalidInputError, NumericalError

logger = logging.getLogger(__name__)

LEDGER_TOLERANCE = 1e-12


class BudgetKind(StrEnum):
    zcdp = auto()
    pure = auto()


@dataclass(frozen=True)
class PrivacyBudget:
    """ρ of ρ-zCDP or ε of ε-DP."""

    kind: BudgetKind
    value: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value > 0):
            raise InvalidInputError(
                f"{self.kind} budget must be positive, got {self.value}"
            )

    @staticmethod
    def zcdp(rho: float) -> "PrivacyBudget":
        return PrivacyBudget(BudgetKind.zcdp, rho)

    @staticmethod
    def pure(eps: float) -> "PrivacyBudget":
        return PrivacyBudget(BudgetKind.pure, eps)

    def fraction(self, share: float) -> "PrivacyBudget":
        return PrivacyBudget(self.kind, self.value * share)

    def __str__(self) -> str:
        symbol = "ρ" if self.kind == BudgetKind.zcdp else "ε"
        return f"{symbol}={self.value:g}"


def pure_to_zcdp(eps: float) -> float:
    """ε-DP implies ε²/2-zCDP."""
    PrivacyBudget.pure(eps)
    return eps * eps / 2


def zcdp_to_approx(rho: float, delta: float) -> float:
    """ε of the (ε, δ)-DP guarantee implied by ρ-zCDP."""
    PrivacyBudget.zcdp(rho)
    if not 0 < delta <= 1:
        raise InvalidInputError(f"delta must lie in (0, 1], got {delta}")
    return rho + 2 * math.sqrt(rho * math.log(1 / delta))


def approx_epsilon(budget: PrivacyBudget, delta: float) -> float:
    """ε of the (ε, δ)-DP guarantee implied by budget."""
    if budget.kind == BudgetKind.pure:
        return budget.value
    return zcdp_to_approx(budget.value, delta)


def compose(budgets: Iterable[PrivacyBudget]) -> PrivacyBudget:
    """Sequential composition: values add up."""
    budgets = list(budgets)
    if not budgets:
        raise InvalidInputError("nothing to compose")
    kinds = {budget.kind for budget in budgets}
    if len(kinds) > 1:
        raise InvalidInputError(
            f"cannot compose budgets of different kinds: {', '.join(sorted(kinds))}"
        )
    return PrivacyBudget(budgets[0].kind, math.fsum(b.value for b in budgets))


def gaussian_scale(sensitivity: float, rho: float) -> float:
    """Standard deviation Δ/√(2ρ) of the ρ-zCDP Gaussian mechanism."""
    if sensitivity < 0:
        raise InvalidInputError(f"sensitivity must be nonnegative, got {sensitivity}")
    PrivacyBudget.zcdp(rho)
    return sensitivity / math.sqrt(2 * rho)


def laplace_scale(sensitivity: float, eps: float) -> float:
    """Scale Δ/ε of the ε-DP Laplace mechanism."""
    if sensitivity < 0:
        raise InvalidInputError(f"sensitivity must be nonnegative, got {sensitivity}")
    PrivacyBudget.pure(eps)
    return sensitivity / eps


def pure_equivalent(rho: float) -> float:
    """Largest ε whose ε-DP guarantee implies ρ-zCDP."""
    PrivacyBudget.zcdp(rho)
    return math.sqrt(2 * rho)


@dataclass
class BudgetLedger:
    """Named shares of a total budget, checked to add up exactly."""

    total: PrivacyBudget
    shares: dict[str, PrivacyBudget] = field(default_factory=dict)

    def spend(self, name: str, share: float) -> PrivacyBudget:
        if name in self.shares:
            raise InvalidInputError(f"budget share '{name}' spent twice")
        budget = self.total.fraction(share)
        self.shares[name] = budget
        return budget

    def check(self) -> None:
        spent = compose(self.shares.values())
        if not math.isclose(spent.value, self.total.value, rel_tol=LEDGER_TOLERANCE):
            raise NumericalError(
                f"budget shares sum to {spent.value!r}, expected {self.total.value!r}"
            )
        logger.debug(f"Budget ledger balanced: {self}")

    def __str__(self) -> str:
        parts = ", ".join(f"{name} {budget}" for name, budget in self.shares.items())
        return f"{self.total} = {parts}"
