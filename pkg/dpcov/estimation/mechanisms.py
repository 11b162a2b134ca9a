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
Private covariance estimators.

GaussCov and LapCov perturb Σ(X) with a Wigner matrix. SeparateCov privatizes
eigenvalues and eigenvectors separately so its error scales with the trace.
Clipped variants run a base mechanism on (1/τ)·Clip(X, τ) and scale back.
"""

from dataclasses import dataclass, field
from enum import StrEnum, auto
import math
from typing import Any, Callable, NamedTuple, Optional

import numpy as np

from dpcov.estimation.bounds import BoundConstants
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.linalg import (
    Dataset,
    EigenSolver,
    SymMatrix,
    clip_dataset,
    covariance,
    eig_sym,
    reconstruct,
)
from dpcov.estimation.privacy import (
    BudgetKind,
    PrivacyBudget,
    gaussian_scale,
    laplace_scale,
)
from dpcov.estimation.randomness import (
    RandomStream,
    gaussian_vector,
    laplace_vector,
    sgw_matrix,
    slw_matrix,
)


class Variant(StrEnum):
    gauss = auto()
    lap = auto()
    separate = auto()
    separate_pure = auto()
    zero = auto()
    adaptive = auto()
    adaptive_pure = auto()

    def budget_kind(self) -> Optional[BudgetKind]:
        """Budget kind the variant consumes, None for the zero baseline."""
        if self == Variant.zero:
            return None
        if self in (Variant.lap, Variant.separate_pure, Variant.adaptive_pure):
            return BudgetKind.pure
        return BudgetKind.zcdp


CLIPPABLE = (Variant.gauss, Variant.separate, Variant.lap, Variant.separate_pure)


@dataclass(frozen=True)
class MechanismOptions:
    """
    Knobs shared by all mechanisms.

    Attributes:
        eigensolver: Backend of eig_sym
        project_eigenvalues: Clamp SeparateCov's noisy eigenvalues at zero
        constants: Constants of the Laplace concentration bounds
    """

    eigensolver: EigenSolver = EigenSolver.lapack
    project_eigenvalues: bool = False
    constants: BoundConstants = field(default_factory=BoundConstants)


DEFAULT_OPTIONS = MechanismOptions()


@dataclass
class MechanismReport:
    estimate: SymMatrix
    budget_spent: Optional[PrivacyBudget]
    variant: Variant
    clip_threshold: Optional[float] = None
    branch: Optional[Variant] = None
    details: Any = None


def require_ball(X: Dataset) -> None:
    if X.count == 0:
        raise InvalidInputError("empty dataset")
    if not X.within_unit_ball():
        raise InvalidInputError("norms exceed 1")


def gauss_cov(X: Dataset, rho: float, stream: RandomStream) -> MechanismReport:
    """Σ + (1/(√ρ·n))·W with W ∼ SGW(d)."""
    require_ball(X)
    budget = PrivacyBudget.zcdp(rho)
    scale = gaussian_scale(math.sqrt(2) / X.count, rho)
    estimate = covariance(X) + scale * sgw_matrix(stream, X.dim)
    return MechanismReport(estimate, budget, Variant.gauss)


def lap_cov(X: Dataset, eps: float, stream: RandomStream) -> MechanismReport:
    """Σ + (√2·d/(ε·n))·W with W ∼ SLW(d)."""
    require_ball(X)
    budget = PrivacyBudget.pure(eps)
    scale = laplace_scale(math.sqrt(2) * X.dim / X.count, eps)
    estimate = covariance(X) + scale * slw_matrix(stream, X.dim)
    return MechanismReport(estimate, budget, Variant.lap)


def _separate(
    X: Dataset,
    noisy_values: Callable[[np.ndarray], np.ndarray],
    noisy_matrix: SymMatrix,
    options: MechanismOptions,
) -> SymMatrix:
    values = noisy_values(eig_sym(covariance(X), options.eigensolver).values)
    if options.project_eigenvalues:
        values = np.maximum(values, 0.0)
    basis = eig_sym(noisy_matrix, options.eigensolver).basis
    return reconstruct(basis, values)


def separate_cov(
    X: Dataset,
    rho: float,
    stream: RandomStream,
    options: MechanismOptions = DEFAULT_OPTIONS,
) -> MechanismReport:
    """
    SeparateCov under ρ-zCDP.

    Eigenvalues get i.i.d. Gaussian noise calibrated to their ℓ₂-sensitivity
    √2/n with budget ρ/2. Eigenvectors are those of GaussCov run with ρ/2.
    """
    require_ball(X)
    budget = PrivacyBudget.zcdp(rho)
    half = budget.fraction(0.5).value
    scale = gaussian_scale(math.sqrt(2) / X.count, half)
    value_noise = scale * gaussian_vector(stream.derive("eigenvalues"), X.dim)

    estimate = _separate(
        X,
        lambda values: values + value_noise,
        gauss_cov(X, half, stream.derive("eigenvectors")).estimate,
        options,
    )
    return MechanismReport(estimate, budget, Variant.separate)


def separate_cov_pure(
    X: Dataset,
    eps: float,
    stream: RandomStream,
    options: MechanismOptions = DEFAULT_OPTIONS,
) -> MechanismReport:
    """
    SeparateCov under ε-DP.

    Eigenvalues get Laplace noise calibrated to their ℓ₁-sensitivity 2/n with
    budget ε/2. Eigenvectors are those of LapCov run with ε/2.
    """
    require_ball(X)
    budget = PrivacyBudget.pure(eps)
    half = budget.fraction(0.5).value
    scale = laplace_scale(2 / X.count, half)
    value_noise = laplace_vector(stream.derive("eigenvalues"), scale, X.dim)

    estimate = _separate(
        X,
        lambda values: values + value_noise,
        lap_cov(X, half, stream.derive("eigenvectors")).estimate,
        options,
    )
    return MechanismReport(estimate, budget, Variant.separate_pure)


def zero_cov(X: Dataset) -> MechanismReport:
    """The zero matrix, spends no budget."""
    if X.count == 0:
        raise InvalidInputError("empty dataset")
    return MechanismReport(np.zeros((X.dim, X.dim)), None, Variant.zero)


def run_base(
    base: Variant,
    X: Dataset,
    budget: PrivacyBudget,
    stream: RandomStream,
    options: MechanismOptions = DEFAULT_OPTIONS,
) -> MechanismReport:
    """Runs one of the unclipped mechanisms."""
    if base not in CLIPPABLE:
        raise InvalidInputError(f"'{base}' is not a base mechanism")
    if base.budget_kind() != budget.kind:
        raise InvalidInputError(
            f"mechanism '{base}' needs a {base.budget_kind()} budget, got {budget.kind}"
        )

    if base == Variant.gauss:
        return gauss_cov(X, budget.value, stream)
    elif base == Variant.lap:
        return lap_cov(X, budget.value, stream)
    elif base == Variant.separate:
        return separate_cov(X, budget.value, stream, options)
    else:
        return separate_cov_pure(X, budget.value, stream, options)


def clip_mechanism(
    X: Dataset,
    budget: PrivacyBudget,
    tau: float,
    stream: RandomStream,
    base: Variant,
    options: MechanismOptions = DEFAULT_OPTIONS,
) -> MechanismReport:
    """τ²·base((1/τ)·Clip(X, τ))."""
    if not 0 < tau <= 1:
        raise InvalidInputError(f"clipping threshold must lie in (0, 1], got {tau}")
    clipped = clip_dataset(X, tau)
    rescaled = Dataset(clipped.columns / tau, ball_constrained=True)
    report = run_base(base, rescaled, budget, stream, options)
    report.estimate = (tau * tau) * report.estimate
    report.clip_threshold = tau
    return report


class SensitivityProbe(NamedTuple):
    cov_frobenius: float
    eig_frobenius: float
    cov_l1: float
    eig_l1: float


def sensitivity_probe(X: Dataset, X_prime: Dataset) -> SensitivityProbe:
    """Distances between the covariances and spectra of two datasets."""
    if (X.dim, X.count) != (X_prime.dim, X_prime.count):
        raise InvalidInputError("neighboring datasets must have the same shape")
    cov, cov_prime = covariance(X), covariance(X_prime)
    values = np.linalg.eigvalsh(cov)
    values_prime = np.linalg.eigvalsh(cov_prime)
    return SensitivityProbe(
        cov_frobenius=float(np.linalg.norm(cov - cov_prime)),
        eig_frobenius=float(np.linalg.norm(values - values_prime)),
        cov_l1=float(np.sum(np.abs(cov - cov_prime))),
        eig_l1=float(np.sum(np.abs(values - values_prime))),
    )
