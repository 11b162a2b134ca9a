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

"""Loading datasets from CSV files (one record per row) and writing them back."""

import csv
import logging
import math
import os
from enum import StrEnum, auto
from typing import Optional

import numpy as np

from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.linalg import Dataset
from dpcov.utils.text import exact_float

logger = logging.getLogger(__name__)


class Normalization(StrEnum):
    none = auto()
    max_norm = "max-norm"
    unit = auto()


class DataFormatError(InvalidInputError):
    def __init__(
        self,
        path: str,
        msg: str,
        row: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        self.path = path
        self.row = row
        self.column = column
        location = path
        if row is not None:
            location += f", row {row}"
        if column is not None:
            location += f", column {column}"
        super().__init__(f"{location}: {msg}")


def _parse_cell(path: str, cell: str, row: int, column: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataFormatError(path, f"non-numeric cell '{cell}'", row, column)
    if not math.isfinite(value):
        raise DataFormatError(path, f"non-finite cell '{cell}'", row, column)
    return value


def _is_header(cells: list[str]) -> bool:
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def normalize(X: Dataset, normalization: Normalization) -> Dataset:
    """max-norm divides by the largest norm, unit scales nonzero records to norm 1."""
    if normalization == Normalization.none:
        return X
    norms = X.norms()
    if normalization == Normalization.max_norm:
        largest = float(np.max(norms)) if X.count else 0.0
        if largest == 0:
            raise InvalidInputError("degenerate dataset")
        return Dataset(X.columns / largest, ball_constrained=True)
    scale = np.divide(1.0, norms, out=np.ones_like(norms), where=norms > 0)
    return Dataset(X.columns * scale, ball_constrained=True)


def load_csv(path: str, normalization: Normalization = Normalization.none) -> Dataset:
    """
    Reads n rows of d comma-separated floats, row i becomes column X_i.

    A first row containing a non-numeric cell is taken as a header.
    Row numbers in errors count lines of the file from 1.
    """
    try:
        with open(path, newline="", encoding="utf-8") as f:
            lines = [
                (i, [cell.strip() for cell in cells])
                for i, cells in enumerate(csv.reader(f), start=1)
                if any(cell.strip() for cell in cells)
            ]
    except OSError as err:
        raise DataFormatError(path, f"cannot read file: {err.strerror}")
    except UnicodeDecodeError:
        raise DataFormatError(path, "not valid UTF-8 text")

    if lines and _is_header(lines[0][1]):
        logger.info(f"Skipping header of {path}: {','.join(lines[0][1])}")
        lines = lines[1:]
    if not lines:
        raise DataFormatError(path, "empty file")

    width = len(lines[0][1])
    rows = []
    for row, cells in lines:
        if len(cells) != width:
            raise DataFormatError(
                path, f"ragged row with {len(cells)} cells, expected {width}", row
            )
        rows.append(
            [
                _parse_cell(path, cell, row, column)
                for column, cell in enumerate(cells, start=1)
            ]
        )

    logger.info(f"Loaded {len(rows)} records of dimension {width} from {path}")
    return normalize(Dataset.from_rows(rows), normalization)


def write_csv(path: str, X: Dataset) -> None:
    """Writes X one record per row with 17 significant digits."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        for record in X.columns.T:
            writer.writerow(map(exact_float, record))
