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
Seedable random streams and the noise samplers of all mechanisms.

A stream wraps a counter-based Philox generator. Sub-streams are derived by
hashing the parent (seed, counter) together with a label, so the draws of a
sub-stream never depend on how much of its parent has been consumed.
"""

import hashlib
from typing import Union

import numpy as np

from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.linalg import SymMatrix, Vector

UINT64_LIMIT = 2**64

Label = Union[str, int]


class RandomStream:
    """
    Single-owner source of randomness.

    In zero-noise mode every noise sampler returns its location parameter (0),
    turning each mechanism into its non-private target.
    """

    def __init__(self, seed: int, counter: int = 0, zero_noise: bool = False) -> None:
        for name, value in (("seed", seed), ("counter", counter)):
            if not 0 <= value < UINT64_LIMIT:
                raise InvalidInputError(
                    f"{name} must be a 64-bit unsigned integer, got {value}"
                )
        self.seed = seed
        self.counter = counter
        self.zero_noise = zero_noise
        self._generator = np.random.Generator(
            np.random.Philox(key=seed, counter=counter)
        )

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator (data generation, not DP noise)."""
        return self._generator

    def derive(self, *labels: Label) -> "RandomStream":
        """Independent sub-stream identified by labels."""
        path = "/".join(map(str, labels))
        digest = hashlib.sha256(
            f"{self.seed}:{self.counter}:{path}".encode()
        ).digest()
        return RandomStream(
            int.from_bytes(digest[:8], "little"), 0, zero_noise=self.zero_noise
        )

    def __repr__(self) -> str:
        return (
            f"RandomStream(seed={self.seed}, counter={self.counter}, "
            f"zero_noise={self.zero_noise})"
        )


def _check_dim(d: int) -> None:
    if d < 1:
        raise InvalidInputError(f"dimension must be positive, got {d}")


def _check_scale(scale: float) -> None:
    if not scale > 0:
        raise InvalidInputError(f"laplace scale must be positive, got {scale}")


def gaussian_vector(stream: RandomStream, d: int) -> Vector:
    """d i.i.d. standard normals."""
    _check_dim(d)
    if stream.zero_noise:
        return np.zeros(d)
    return stream.generator.standard_normal(d)


def laplace_scalar(stream: RandomStream, scale: float) -> float:
    """One draw with density (1/2b)·exp(−|x|/b)."""
    _check_scale(scale)
    if stream.zero_noise:
        return 0.0
    return float(stream.generator.laplace(0.0, scale))


def laplace_vector(stream: RandomStream, scale: float, d: int) -> Vector:
    _check_scale(scale)
    _check_dim(d)
    if stream.zero_noise:
        return np.zeros(d)
    return stream.generator.laplace(0.0, scale, d)


def _mirror_upper(upper: np.ndarray) -> SymMatrix:
    upper = np.triu(upper)
    return upper + np.triu(upper, 1).T


def sgw_matrix(stream: RandomStream, d: int) -> SymMatrix:
    """Symmetric Gaussian Wigner matrix, N(0, 1) on and above the diagonal."""
    _check_dim(d)
    if stream.zero_noise:
        return np.zeros((d, d))
    return _mirror_upper(stream.generator.standard_normal((d, d)))


def slw_matrix(stream: RandomStream, d: int) -> SymMatrix:
    """Symmetric Laplace Wigner matrix, Lap(1) on and above the diagonal."""
    _check_dim(d)
    if stream.zero_noise:
        return np.zeros((d, d))
    return _mirror_upper(stream.generator.laplace(0.0, 1.0, (d, d)))
