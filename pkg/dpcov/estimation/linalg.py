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
Exact (non-private) linear algebra on datasets of column vectors.

A dataset X is stored as a d×n matrix whose columns X_i are the individual
records. Everything here is a pure function of its inputs.
"""

from dataclasses import dataclass
from enum import StrEnum, auto
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from dpcov.estimation.estimation_errors import InvalidInputError, NumericalError

Vector = NDArray[np.float64]
SymMatrix = NDArray[np.float64]

# Tolerance on the unit-ball constraint, absorbs rounding of clipped columns.
BALL_SLACK = 1e-12

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
SIGN_TIE_TOLERANCE = 1e-9


class EigenSolver(StrEnum):
    lapack = auto()
    jacobi = auto()


class EigenDecomp(NamedTuple):
    basis: SymMatrix
    values: Vector


@dataclass(frozen=True)
class Dataset:
    """
    Collection of n column vectors of dimension d.

    Attributes:
        columns: d×n matrix, column i is the record X_i
        ball_constrained: Asserts that every column has norm at most 1
    """

    columns: NDArray[np.float64]
    ball_constrained: bool = False

    def __post_init__(self) -> None:
        columns = np.array(self.columns, dtype=np.float64)
        if columns.ndim != 2:
            raise InvalidInputError(
                f"dataset must be a d×n matrix, got {columns.ndim} dimensions"
            )
        if columns.shape[0] < 1:
            raise InvalidInputError("dataset dimension must be positive")
        if not np.all(np.isfinite(columns)):
            raise InvalidInputError("dataset has non-finite entries")
        if self.ball_constrained and columns.shape[1] > 0:
            if np.max(np.linalg.norm(columns, axis=0)) > 1 + BALL_SLACK:
                raise InvalidInputError("norms exceed 1")
        columns.setflags(write=False)
        object.__setattr__(self, "columns", columns)

    @classmethod
    def from_rows(cls, rows: ArrayLike, ball_constrained: bool = False) -> "Dataset":
        """Builds dataset from n×d array where row i is the record X_i."""
        array = np.asarray(rows, dtype=np.float64)
        if array.ndim != 2:
            raise InvalidInputError("rows must form an n×d matrix")
        return cls(array.T, ball_constrained)

    @property
    def dim(self) -> int:
        return int(self.columns.shape[0])

    @property
    def count(self) -> int:
        return int(self.columns.shape[1])

    def norms(self) -> Vector:
        """Euclidean norms of all columns."""
        return np.linalg.norm(self.columns, axis=0)

    def within_unit_ball(self) -> bool:
        return self.ball_constrained or self.count == 0 or (
            float(np.max(self.norms())) <= 1 + BALL_SLACK
        )


def symmetrize(matrix: NDArray[np.float64]) -> SymMatrix:
    """Returns (M + Mᵀ)/2, exactly symmetric."""
    return (matrix + matrix.T) / 2


def _require_nonempty(X: Dataset) -> None:
    if X.count == 0:
        raise InvalidInputError("empty dataset")


def covariance(X: Dataset) -> SymMatrix:
    """Σ(X) = (1/n)·X·Xᵀ."""
    _require_nonempty(X)
    return symmetrize(X.columns @ X.columns.T / X.count)


def _check_square(A: NDArray[np.float64]) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")


def _jacobi(A: SymMatrix) -> tuple[Vector, SymMatrix]:
    """Cyclic Jacobi rotations, returns (values, basis) in unspecified order."""
    A = np.array(A, dtype=np.float64)
    d = A.shape[0]
    basis = np.eye(d)
    scale = np.linalg.norm(A)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= JACOBI_TOLERANCE * scale:
            return np.diag(A).copy(), basis

        for p in range(d - 1):
            for q in range(p + 1, d):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = (1.0 if theta >= 0 else -1.0) / (
                    abs(theta) + np.sqrt(theta * theta + 1)
                )
                c = 1 / np.sqrt(t * t + 1)
                s = t * c

                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0

                vec_p, vec_q = basis[:, p].copy(), basis[:, q].copy()
                basis[:, p] = c * vec_p - s * vec_q
                basis[:, q] = s * vec_p + c * vec_q

    raise NumericalError(
        f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
    )


def _fix_signs(basis: SymMatrix) -> SymMatrix:
    """Makes the leading largest-magnitude component of each column positive."""
    magnitudes = np.abs(basis)
    peaks = np.max(magnitudes, axis=0)
    leading = np.argmax(magnitudes >= (1 - SIGN_TIE_TOLERANCE) * peaks, axis=0)
    signs = np.where(basis[leading, np.arange(basis.shape[1])] < 0, -1.0, 1.0)
    return basis * signs


def eig_sym(A: SymMatrix, method: EigenSolver = EigenSolver.lapack) -> EigenDecomp:
    """
    Symmetric eigendecomposition A = P·diag(Λ)·Pᵀ.

    Eigenvalues are sorted descending (stable with respect to solver output)
    and every eigenvector is oriented by the sign convention of _fix_signs,
    so the output is deterministic.
    """
    A = np.asarray(A, dtype=np.float64)
    _check_square(A)
    if not np.all(np.isfinite(A)):
        raise NumericalError("non-finite matrix")

    if method == EigenSolver.jacobi:
        values, basis = _jacobi(A)
    else:
        values, basis = np.linalg.eigh(symmetrize(A))

    order = np.argsort(-values, kind="stable")
    return EigenDecomp(_fix_signs(basis[:, order]), values[order])


def reconstruct(basis: SymMatrix, values: ArrayLike) -> SymMatrix:
    """P·diag(Λ)·Pᵀ, symmetrized. Negative eigenvalues are allowed."""
    basis = np.asarray(basis, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    _check_square(basis)
    if values.shape != (basis.shape[1],):
        raise InvalidInputError(
            f"dimension mismatch: basis {basis.shape}, values {values.shape}"
        )
    return symmetrize((basis * values) @ basis.T)


def frobenius_dist(A: SymMatrix, B: SymMatrix) -> float:
    A, B = np.asarray(A, dtype=np.float64), np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape} and {B.shape}")
    return float(np.linalg.norm(A - B))


def _check_threshold(tau: float) -> None:
    if not tau >= 0:
        raise InvalidInputError(f"clipping threshold must be nonnegative, got {tau}")


def clip_vector(x: ArrayLike, tau: float) -> Vector:
    """Clip(x, τ) = min(1, τ/‖x‖₂)·x."""
    _check_threshold(tau)
    x = np.asarray(x, dtype=np.float64)
    norm = float(np.linalg.norm(x))
    if norm <= tau:
        return x.copy()
    return x * (tau / norm)


def clip_dataset(X: Dataset, tau: float) -> Dataset:
    """Column-wise clip_vector. τ = 0 maps every column to zero."""
    _check_threshold(tau)
    norms = X.norms()
    factors = np.divide(
        tau, norms, out=np.ones_like(norms), where=norms > tau
    )
    return Dataset(X.columns * factors, X.ball_constrained or tau <= 1)


def trace_stat(X: Dataset) -> float:
    """tr = (1/n)·Σ‖X_i‖₂², the eigenvalue sum of covariance(X)."""
    _require_nonempty(X)
    return float(np.sum(X.columns * X.columns) / X.count)


def tail_gamma(X: Dataset, tau: float) -> float:
    """γ(X, τ) = (1/n)·Σ‖X_i‖₂²·𝕀(‖X_i‖₂ > τ)."""
    _check_threshold(tau)
    _require_nonempty(X)
    norms = X.norms()
    return float(np.sum(norms[norms > tau] ** 2) / X.count)


def radius(X: Dataset) -> float:
    """rad(X) = max_i ‖X_i‖₂."""
    _require_nonempty(X)
    return float(np.max(X.norms()))
