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

import io
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from dpcov.__main__ import main
from dpcov.estimation.linalg import Dataset
from dpcov.estimation.randomness import RandomStream


def zero_stream(seed: int = 0) -> RandomStream:
    return RandomStream(seed, zero_noise=True)


def random_ball_dataset(
    rng: np.random.Generator, d: int, n: int, max_norm: float = 1.0
) -> Dataset:
    """Random directions with norms uniform in [0, max_norm]."""
    rows = rng.standard_normal((n, d))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    rows *= rng.uniform(0.0, max_norm, (n, 1))
    return Dataset.from_rows(rows, ball_constrained=True)


def dataset_with_norms(rng: np.random.Generator, d: int, norms) -> Dataset:
    norms = np.asarray(norms, dtype=np.float64)
    rows = rng.standard_normal((len(norms), d))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return Dataset.from_rows(rows * norms[:, None], ball_constrained=True)


def neighbor(rng: np.random.Generator, X: Dataset, max_norm: float = 1.0) -> Dataset:
    """X with one random column replaced by a random vector of norm ≤ max_norm."""
    columns = X.columns.copy()
    i = rng.integers(X.count)
    v = rng.standard_normal(X.dim)
    columns[:, i] = v / np.linalg.norm(v) * rng.uniform(0.0, max_norm)
    return Dataset(columns, X.ball_constrained)


class TestFixture(unittest.TestCase):
    """Runs every test in a fresh temporary working directory."""

    def setUp(self):
        self.work_dir = tempfile.mkdtemp(prefix="dpcov-test_")
        self.cwd_orig = os.getcwd()
        os.chdir(self.work_dir)

    def tearDown(self):
        os.chdir(self.cwd_orig)

        assert self.work_dir.startswith("/tmp") or self.work_dir.startswith("/var")
        shutil.rmtree(self.work_dir)

    def run_cli(self, *argv: str) -> tuple[int, str, str]:
        """Exit code, stdout and stderr of the command line tool."""
        with mock.patch("sys.stdout", new=io.StringIO()) as std_out:
            with mock.patch("sys.stderr", new=io.StringIO()) as std_err:
                code = main(["--plain", *argv])
        return code, std_out.getvalue(), std_err.getvalue()

    def write_file(self, name: str, content: str) -> str:
        with open(name, "w") as f:
            f.write(content)
        return os.path.join(self.work_dir, name)

    def read_file(self, name: str) -> str:
        with open(name) as f:
            return f.read()
