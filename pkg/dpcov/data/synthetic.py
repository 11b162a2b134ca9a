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
Synthetic datasets with a controlled spread of column norms.

Records are drawn as rows of X = Z·U with Z ∼ N(0, I) and U ∼ U(0, 1)^{d×d},
centered, and then split into N bins whose sizes follow 1/k^s. Records of
bin k are rescaled to norm exactly 2^{k−N}.
"""

import logging
import math
from typing import Any, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    model_validator,
)
from pydantic_core import PydanticCustomError

from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.linalg import Dataset, radius
from dpcov.estimation.randomness import RandomStream

logger = logging.getLogger(__name__)

SPEC_KEYS = {"n": "n", "d": "d", "N": "bins", "s": "skew", "seed": "seed"}


class SynthSpec(BaseModel):
    """Parameters of one synthetic dataset."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n: int = Field(ge=1)
    d: int = Field(ge=1)
    bins: int = Field(default=1, ge=1, alias="N")
    skew: float = Field(default=3.0, alias="s", allow_inf_nan=False)
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)

    @model_validator(mode="after")
    def validate_model(self):
        if self.n < self.bins:
            raise PydanticCustomError(
                "not_enough_records",
                "n < N, cannot populate every bin",
                {"n": self.n, "N": self.bins},
            )
        return self

    @classmethod
    def parse(cls, text: str, **overrides: Any) -> "SynthSpec":
        """Parses 'n=1000,d=64,N=4,s=3' (keys are case sensitive)."""
        values: dict[str, Any] = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in SPEC_KEYS:
                raise InvalidInputError(
                    f"invalid synthetic spec item '{part}', "
                    f"expected one of {', '.join(SPEC_KEYS)} as key=value"
                )
            values[SPEC_KEYS[key]] = value.strip()
        values.update(overrides)
        return cls._build(values, text)

    @classmethod
    def _build(cls, values: dict[str, Any], text: str) -> "SynthSpec":
        try:
            return cls(**values)
        except ValidationError as err:
            details = "; ".join(
                f"{'.'.join(map(str, e['loc'])) or 'spec'}: {e['msg']}"
                for e in err.errors()
            )
            raise InvalidInputError(f"invalid synthetic spec '{text}': {details}")

    def with_axis(self, axis: str, value: int) -> "SynthSpec":
        """Copy with n, d or N replaced."""
        values = self.model_dump() | {SPEC_KEYS[axis]: value}
        return self._build(values, f"{self}, {axis}={value}")

    def __str__(self) -> str:
        text = f"n={self.n},d={self.d},N={self.bins},s={self.skew:g}"
        return text if self.seed is None else f"{text},seed={self.seed}"


def zipf_bin_counts(n: int, bins: int, skew: float) -> list[int]:
    """
    Splits n into bins proportionally to 1/k^skew, k = 1..bins.

    Largest-remainder rounding, ties go to the lower bin.
    """
    if bins < 1 or n < bins:
        raise InvalidInputError(f"cannot split {n} records into {bins} bins")
    weights = [k**-skew for k in range(1, bins + 1)]
    total = math.fsum(weights)
    quotas = [n * w / total for w in weights]
    counts = [math.floor(q) for q in quotas]
    by_remainder = sorted(range(bins), key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in by_remainder[: n - sum(counts)]:
        counts[k] += 1
    return counts


def _set_row_norms(rows: np.ndarray, targets: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    directions = np.zeros_like(rows)
    nonzero = norms > 0
    directions[nonzero] = rows[nonzero] / norms[nonzero, None]
    directions[~nonzero, 0] = 1.0
    return directions * targets[:, None]


def synth(spec: SynthSpec, seed: Optional[int] = None) -> Dataset:
    """
    Generates the dataset described by spec.

    A seed given in the SynthSpec wins over the seed argument.
    """
    if spec.n < spec.bins:
        raise InvalidInputError("n < N, cannot populate every bin")
    if spec.seed is not None:
        seed = spec.seed
    if seed is None:
        raise InvalidInputError("synthetic dataset needs a seed")

    generator = RandomStream(seed).derive("synthetic").generator
    mixing = generator.uniform(0.0, 1.0, (spec.d, spec.d))
    rows = generator.standard_normal((spec.n, spec.d)) @ mixing
    rows -= rows.mean(axis=0)

    counts = zipf_bin_counts(spec.n, spec.bins, spec.skew)
    targets = np.repeat(
        [math.ldexp(1.0, k - spec.bins) for k in range(1, spec.bins + 1)], counts
    )
    rows = _set_row_norms(rows, targets)[generator.permutation(spec.n)]
    logger.info(f"Generated synthetic dataset {spec} with bin sizes {counts}")
    return Dataset.from_rows(rows, ball_constrained=True)


def rescale_radius(X: Dataset) -> Dataset:
    """Divides X by a power of two so that 0.5 < rad(X) ≤ 1."""
    rad = radius(X)
    if rad == 0:
        raise InvalidInputError("degenerate dataset")
    mantissa, exponent = math.frexp(rad)
    shift = exponent - 1 if mantissa == 0.5 else exponent
    if shift == 0:
        return X if X.ball_constrained else Dataset(X.columns, True)
    return Dataset(np.ldexp(X.columns, -shift), ball_constrained=True)


def skewed_dataset(n: int, d: int, heavy: int, seed: int) -> Dataset:
    """
    heavy unit-norm records, the remaining n − heavy of norm n^{−1/4}.

    Directions are uniform on the sphere.
    """
    if not 0 <= heavy <= n or n < 1 or d < 1:
        raise InvalidInputError(f"invalid skewed dataset n={n}, d={d}, heavy={heavy}")
    generator = RandomStream(seed).derive("skewed").generator
    rows = generator.standard_normal((n, d))
    targets = np.full(n, n**-0.25)
    targets[:heavy] = 1.0
    rows = _set_row_norms(rows, targets)[generator.permutation(n)]
    return Dataset.from_rows(rows, ball_constrained=True)
