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
AdaptiveCov: covariance estimation with a privately chosen clipping threshold.

The pipeline of one invocation:
  1. PrivRadius picks a dyadic radius r̃ and the data is clipped to it.
  2. A private upper bound tr̂ of the trace of the clipped data is released.
  3. The sparse vector technique walks the dyadic grid τ = r̃, r̃/2, ... and
     stops at the first τ where the estimated clipping bias (BiasHat) exceeds
     the estimated mechanism noise (NoiseHat).
  4. The clipped GaussCov or SeparateCov (LapCov or pure SeparateCov under
     ε-DP) is run at τ̃ = min(2τ, r̃), whichever has the smaller noise bound.

Grid points are handled as integer exponents: τ = 2^t.
"""

from abc import ABC, abstractmethod
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import accumulate
import logging
import math
from typing import Iterable, Optional

import numpy as np

from dpcov.estimation.bounds import (
    BoundConstants,
    DEFAULT_CONSTANTS,
    eta,
    lap_vec_bound,
    omega,
    slw_frob_bound,
    slw_op_bound,
    upsilon,
)
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.linalg import BALL_SLACK, Dataset, clip_dataset, trace_stat
from dpcov.estimation.mechanisms import (
    DEFAULT_OPTIONS,
    MechanismOptions,
    MechanismReport,
    Variant,
    clip_mechanism,
    require_ball,
)
from dpcov.estimation.privacy import (
    BudgetKind,
    BudgetLedger,
    PrivacyBudget,
    gaussian_scale,
    laplace_scale,
    pure_equivalent,
)
from dpcov.estimation.randomness import RandomStream, gaussian_vector, laplace_scalar

logger = logging.getLogger(__name__)

TAU_EXPONENT_LIMIT = -4096
RADIUS_EXPONENT_LIMIT = -500


# ------------------------------- SVT -------------------------------


def svt(
    queries: Iterable[float],
    sensitivity: float,
    threshold: float,
    eps: float,
    stream: RandomStream,
) -> int:
    """
    Sparse vector technique (AboveThreshold).

    Returns the 1-based index of the first query whose noisy value reaches the
    noisy threshold, or t+1 if none of the t queries does. Queries are consumed
    lazily, so later ones are never evaluated.
    """
    if not sensitivity > 0:
        raise InvalidInputError(f"sensitivity must be positive, got {sensitivity}")
    if not eps > 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")

    noisy_threshold = threshold + laplace_scalar(stream, 2 * sensitivity / eps)
    index = 0
    for index, value in enumerate(queries, start=1):
        if value + laplace_scalar(stream, 4 * sensitivity / eps) >= noisy_threshold:
            return index
    return index + 1


# ------------------------------- PrivRadius -------------------------------


def _radius_index(
    X: Dataset, eps: float, beta: float, levels: int, stream: RandomStream
) -> Optional[int]:
    """SVT over radii 2^0, 2^-1, ..., 2^-levels; returns the triggering j."""
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0, 1), got {beta}")
    norms = np.sort(X.norms())
    threshold = (6 / eps) * math.log(2 * (levels + 1) / beta)

    def exceeding(j: int) -> float:
        return float(
            X.count - np.searchsorted(norms, math.ldexp(1.0, -j), side="right")
        )

    k = svt((exceeding(j) for j in range(levels + 1)), 1.0, threshold, eps, stream)
    return k - 1 if k <= levels + 1 else None


def priv_radius(
    X: Dataset, eps: float, beta: float, b: float, stream: RandomStream
) -> float:
    """
    Private estimate r̃ of rad(X).

    With probability at least 1−β, r̃ ≤ 2·rad(X) + b and only a few columns
    have norm above r̃.
    """
    if not 0 < b < 1:
        raise InvalidInputError(f"radius floor must lie in (0, 1), got {b}")
    j = _radius_index(X, eps, beta, math.ceil(-math.log2(b)), stream)
    if j is None:
        return b
    return min(1.0, math.ldexp(1.0, 1 - j))


def priv_radius_exponent(
    X: Dataset, eps: float, beta: float, floor_exponent: int, stream: RandomStream
) -> int:
    """priv_radius with b = 2^floor_exponent, returns log₂ r̃."""
    if floor_exponent >= 0:
        raise InvalidInputError(
            f"radius floor exponent must be negative, got {floor_exponent}"
        )
    j = _radius_index(X, eps, beta, -floor_exponent, stream)
    return floor_exponent if j is None else min(0, 1 - j)


# ------------------------------- Histogram -------------------------------


@dataclass
class NormHistogram:
    """
    Count_s = |{X_i : ‖X_i‖₂ ∈ (2^s, 2^{s+1}]}|; zero columns are not counted.

    Suffix sums over the buckets with s < 0 answer BiasHat queries by bisection.
    """

    counts: dict[int, int]
    n: int

    def __post_init__(self) -> None:
        self._exponents = sorted(s for s in self.counts if s < 0)
        masses = [
            math.ldexp(self.counts[s], 2 * s + 2) for s in reversed(self._exponents)
        ]
        totals = [self.counts[s] for s in reversed(self._exponents)]
        self._mass_suffix = list(reversed(list(accumulate(masses)))) + [0.0]
        self._count_suffix = list(reversed(list(accumulate(totals)))) + [0]

    def bias_at(self, tau_exponent: int) -> float:
        """BiasHat at τ = 2^tau_exponent."""
        start = bisect_left(self._exponents, tau_exponent)
        tau_squared_mass = math.ldexp(self._count_suffix[start], 2 * tau_exponent)
        return max(self._mass_suffix[start] - tau_squared_mass, 0.0) / self.n


def build_histogram(X: Dataset) -> NormHistogram:
    if X.count == 0:
        raise InvalidInputError("empty dataset")
    norms = X.norms()
    norms = norms[norms > 0]
    mantissas, exponents = np.frexp(norms)
    # norm = m·2^e with m ∈ [0.5, 1); an exact power of two closes the lower bucket
    buckets = np.where(mantissas == 0.5, exponents - 2, exponents - 1)
    values, counts = np.unique(buckets, return_counts=True)
    return NormHistogram(
        {int(s): int(c) for s, c in zip(values, counts)}, X.count
    )


def _tau_exponent(tau: float) -> int:
    mantissa, exponent = math.frexp(tau)
    if not 0 < tau <= 1 or mantissa != 0.5:
        raise InvalidInputError(f"τ must be a power of two in (0, 1], got {tau}")
    return exponent - 1


def bias_hat(h: NormHistogram, tau: float) -> float:
    """BiasHat(X, τ) = (1/n)·Σ_{log₂τ ≤ s < 0} Count_s·(2^{2s+2} − τ²)."""
    return h.bias_at(_tau_exponent(tau))


# ------------------------------- Noise estimates -------------------------------


class NoiseModel(ABC):
    """Upper bounds on the error of the clipped final mechanisms."""

    gauss_branch: Variant
    separate_branch: Variant

    def __init__(self, d: int, n: int, beta: float) -> None:
        if d < 1 or n < 1:
            raise InvalidInputError(f"invalid dimensions d={d}, n={n}")
        self.d = d
        self.n = n
        self.beta = beta

    @abstractmethod
    def gauss_noise(self, tau: float) -> float:
        pass

    @abstractmethod
    def separate_noise(self, tr_hat: float, tau: float) -> float:
        pass

    def noise_hat(self, tr_hat: float, tau: float) -> float:
        return min(self.gauss_noise(tau), self.separate_noise(tr_hat, tau))

    def branch(self, tr_hat: float, tau: float) -> Variant:
        if self.separate_noise(tr_hat, tau) >= self.gauss_noise(tau):
            return self.gauss_branch
        return self.separate_branch


class GaussianNoiseModel(NoiseModel):
    gauss_branch = Variant.gauss
    separate_branch = Variant.separate

    def __init__(self, rho: float, beta: float, d: int, n: int) -> None:
        super().__init__(d, n, beta)
        PrivacyBudget.zcdp(rho)
        self._gauss = omega(d, beta) / (math.sqrt(rho) * n)
        self._linear = (
            2**1.25 / (rho**0.25 * math.sqrt(n)) * math.sqrt(upsilon(d, beta / 2))
        )
        self._quadratic = math.sqrt(2) / (math.sqrt(rho) * n) * eta(d, beta / 2)

    def gauss_noise(self, tau: float) -> float:
        return tau * tau * self._gauss

    def separate_noise(self, tr_hat: float, tau: float) -> float:
        return tau * self._linear * math.sqrt(max(tr_hat, 0.0)) + (
            tau * tau * self._quadratic
        )


class LaplaceNoiseModel(NoiseModel):
    gauss_branch = Variant.lap
    separate_branch = Variant.separate_pure

    def __init__(
        self,
        eps: float,
        beta: float,
        d: int,
        n: int,
        constants: BoundConstants = DEFAULT_CONSTANTS,
    ) -> None:
        super().__init__(d, n, beta)
        PrivacyBudget.pure(eps)
        self._gauss = math.sqrt(2) * d / (eps * n) * slw_frob_bound(d, beta, constants)
        # eigenvectors from LapCov and eigenvalues from Laplace noise, ε/2 each
        self._vector_noise = (
            2 * math.sqrt(2) * d / (eps * n) * slw_op_bound(d, beta / 2, constants)
        )
        self._quadratic = 4 / (eps * n) * lap_vec_bound(d, beta / 2, constants)

    def gauss_noise(self, tau: float) -> float:
        return tau * tau * self._gauss

    def separate_noise(self, tr_hat: float, tau: float) -> float:
        return tau * math.sqrt(4 * max(tr_hat, 0.0) * self._vector_noise) + (
            tau * tau * self._quadratic
        )


def gauss_noise_bound(tau: float, rho: float, beta: float, d: int, n: int) -> float:
    """GaussNoise(τ, ρ, β) = τ²·ω(d, β)/(√ρ·n)."""
    return GaussianNoiseModel(rho, beta, d, n).gauss_noise(tau)


def separate_noise_bound(
    tr_hat: float, tau: float, rho: float, beta: float, d: int, n: int
) -> float:
    """SeparateNoise(tr̂, τ, ρ, β)."""
    return GaussianNoiseModel(rho, beta, d, n).separate_noise(tr_hat, tau)


def noise_hat(
    tr_hat: float, tau: float, rho: float, beta: float, d: int, n: int
) -> float:
    return GaussianNoiseModel(rho, beta, d, n).noise_hat(tr_hat, tau)


# ------------------------------- Trace and Diff -------------------------------


def private_trace_ub(
    clipped: Dataset,
    r_tilde: float,
    budget: PrivacyBudget,
    beta: float,
    stream: RandomStream,
) -> float:
    """
    tr̂ ≤ r̃², and tr̂ ≥ trace_stat(clipped) with probability at least 1 − β/8.
    """
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0, 1), got {beta}")
    if clipped.count == 0:
        raise InvalidInputError("empty dataset")
    if float(np.max(clipped.norms())) > r_tilde * (1 + BALL_SLACK):
        raise InvalidInputError("unclipped input: column norms exceed r̃")

    r_squared = r_tilde * r_tilde
    sensitivity = r_squared / clipped.count
    if budget.kind == BudgetKind.zcdp:
        scale = gaussian_scale(sensitivity, budget.value)
        noise = scale * float(gaussian_vector(stream, 1)[0])
        offset = scale * math.sqrt(2 * math.log(8 / beta))
    else:
        scale = laplace_scale(sensitivity, budget.value)
        noise = laplace_scalar(stream, scale)
        offset = scale * math.log(8 / beta)
    return min(trace_stat(clipped) + noise + offset, r_squared)


def _diff_at(
    h: NormHistogram,
    tr_hat: float,
    tau_exponent: int,
    model: NoiseModel,
    r_tilde: float,
) -> float:
    tau = math.ldexp(1.0, tau_exponent)
    gap = h.bias_at(tau_exponent) - model.noise_hat(tr_hat, tau)
    return h.n / (4 * r_tilde * r_tilde) * gap


def diff_query(
    h: NormHistogram,
    tr_hat: float,
    tau: float,
    rho: float,
    beta: float,
    r_tilde: float,
    d: int,
    n: int,
) -> float:
    """
    (n/(4r̃²))·(BiasHat − NoiseHat), sensitivity at most 1 on r̃-clipped data.
    """
    return _diff_at(
        h, tr_hat, _tau_exponent(tau), GaussianNoiseModel(rho, beta, d, n), r_tilde
    )


# ------------------------------- AdaptiveCov -------------------------------


@dataclass(frozen=True)
class ThresholdSearchConfig:
    """
    Attributes:
        smallest_tau_exponent: Last grid exponent, default max(−d·n, −4096)
        radius_floor_exponent: log₂ b of PrivRadius, default max(−2·d·n, −500)
        known_radius: Skip PrivRadius and use r̃ = 1
    """

    smallest_tau_exponent: Optional[int] = None
    radius_floor_exponent: Optional[int] = None
    known_radius: bool = False

    def __post_init__(self) -> None:
        for name in ("smallest_tau_exponent", "radius_floor_exponent"):
            value = getattr(self, name)
            if value is not None and value >= 0:
                raise InvalidInputError(f"{name} must be negative, got {value}")

    def tau_cap(self, d: int, n: int) -> int:
        if self.smallest_tau_exponent is not None:
            return self.smallest_tau_exponent
        return max(-d * n, TAU_EXPONENT_LIMIT)

    def radius_floor(self, d: int, n: int) -> int:
        if self.radius_floor_exponent is not None:
            return self.radius_floor_exponent
        return max(-2 * d * n, RADIUS_EXPONENT_LIMIT)


DEFAULT_SEARCH = ThresholdSearchConfig()


@dataclass
class AdaptiveDetails:
    radius: float
    trace_bound: float
    svt_index: int
    tau_exponent: int
    ledger: BudgetLedger
    grid: tuple[int, int] = field(default=(0, 0))

    def summary(self) -> str:
        return (
            f"r̃={self.radius:g} tr̂={self.trace_bound:.6g} "
            f"svt_index={self.svt_index} τ̃=2^{self.tau_exponent} "
            f"grid=2^{self.grid[0]}..2^{self.grid[1]}; ledger: {self.ledger}"
        )


# Shares of (radius, trace, threshold, final) under each budget kind.
_SHARES = {
    BudgetKind.zcdp: (1 / 8, 1 / 8, 1 / 4, 1 / 2),
    BudgetKind.pure: (1 / 4, 1 / 4, 1 / 4, 1 / 4),
}


def _as_pure(budget: PrivacyBudget) -> float:
    if budget.kind == BudgetKind.zcdp:
        return pure_equivalent(budget.value)
    return budget.value


def _adaptive(
    X: Dataset,
    total: PrivacyBudget,
    beta: float,
    stream: RandomStream,
    search: ThresholdSearchConfig,
    options: MechanismOptions,
    variant: Variant,
) -> MechanismReport:
    require_ball(X)
    if not 0 < beta < 1:
        raise InvalidInputError(f"beta must lie in (0, 1), got {beta}")
    d, n = X.dim, X.count

    radius_share, trace_share, threshold_share, final_share = _SHARES[total.kind]
    ledger = BudgetLedger(total)
    if search.known_radius:
        radius_exponent = 0
        final_share += radius_share
    else:
        radius_budget = ledger.spend("radius", radius_share)
        radius_exponent = priv_radius_exponent(
            X,
            _as_pure(radius_budget),
            beta / 8,
            search.radius_floor(d, n),
            stream.derive("radius"),
        )
    trace_budget = ledger.spend("trace", trace_share)
    threshold_budget = ledger.spend("threshold", threshold_share)
    final_budget = ledger.spend("final", final_share)
    ledger.check()

    r_tilde = math.ldexp(1.0, radius_exponent)
    clipped = clip_dataset(X, r_tilde)
    tr_hat = private_trace_ub(
        clipped, r_tilde, trace_budget, beta, stream.derive("trace")
    )

    model: NoiseModel
    if total.kind == BudgetKind.zcdp:
        model = GaussianNoiseModel(final_budget.value, beta / 2, d, n)
    else:
        model = LaplaceNoiseModel(
            final_budget.value, beta / 2, d, n, options.constants
        )

    histogram = build_histogram(clipped)
    cap = min(search.tau_cap(d, n), radius_exponent)
    grid = range(radius_exponent, cap - 1, -1)
    index = svt(
        (_diff_at(histogram, tr_hat, t, model, r_tilde) for t in grid),
        1.0,
        0.0,
        _as_pure(threshold_budget),
        stream.derive("threshold"),
    )
    tau_exponent = min(radius_exponent + 2 - index, radius_exponent)
    tau = math.ldexp(1.0, tau_exponent)
    branch = model.branch(tr_hat, tau)

    if tau * tau == 0.0:
        estimate = np.zeros((d, d))
    else:
        estimate = clip_mechanism(
            X, final_budget, tau, stream.derive("final"), branch, options
        ).estimate

    details = AdaptiveDetails(
        r_tilde, tr_hat, index, tau_exponent, ledger, (radius_exponent, cap)
    )
    logger.debug(f"AdaptiveCov {details.summary()} branch={branch}")
    return MechanismReport(estimate, total, variant, tau, branch, details)


def adaptive_cov(
    X: Dataset,
    rho: float,
    beta: float,
    stream: RandomStream,
    search: ThresholdSearchConfig = DEFAULT_SEARCH,
    options: MechanismOptions = DEFAULT_OPTIONS,
) -> MechanismReport:
    """AdaptiveCov under ρ-zCDP (shares ρ/8, ρ/8, ρ/4, ρ/2)."""
    return _adaptive(
        X, PrivacyBudget.zcdp(rho), beta, stream, search, options, Variant.adaptive
    )


def adaptive_cov_pure(
    X: Dataset,
    eps: float,
    beta: float,
    stream: RandomStream,
    search: ThresholdSearchConfig = DEFAULT_SEARCH,
    options: MechanismOptions = DEFAULT_OPTIONS,
) -> MechanismReport:
    """AdaptiveCov under ε-DP (four shares of ε/4)."""
    return _adaptive(
        X,
        PrivacyBudget.pure(eps),
        beta,
        stream,
        search,
        options,
        Variant.adaptive_pure,
    )
