"""
Tests the noise concentration bounds against Monte-Carlo draws.
"""

import math
import unittest

import numpy as np

from dpcov.estimation.bounds import (
    BoundConstants,
    eta,
    lap_vec_bound,
    log_dim,
    omega,
    slw_frob_bound,
    slw_op_bound,
    upsilon,
)
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.randomness import (
    RandomStream,
    gaussian_vector,
    laplace_vector,
    sgw_matrix,
    slw_matrix,
)


class TestClosedForms(unittest.TestCase):
    def test_eta(self):
        d, beta = 4, math.exp(-1)
        self.assertAlmostEqual(eta(d, beta), math.sqrt(4 + 2 * 2 + 2))
        self.assertAlmostEqual(eta(1, math.exp(-1)), math.sqrt(5))

    def test_omega(self):
        self.assertAlmostEqual(omega(1, 2 * math.exp(-1)), 3.0)

    def test_upsilon(self):
        # d = 64: √d = 8, d^{1/6} = 2 and log d = 6·log 2
        log_d = 6 * math.log(2)
        ratio = (3 * math.log(2) / 32) ** (1 / 3)
        expected = (
            16
            + 4 * log_d ** (1 / 3)
            + 6 * (1 + ratio) * math.sqrt(log_d / math.log1p(ratio))
            + 4 * math.sqrt(math.log(20) / 2)
        )
        self.assertAlmostEqual(upsilon(64, 0.05), expected, places=10)
        self.assertAlmostEqual(upsilon(64, 0.05), 56.839, delta=0.01)


    def test_log_dim(self):
        self.assertEqual(log_dim(2), 1.0)
        self.assertAlmostEqual(log_dim(100), math.log(100))

    def test_monotone_in_beta(self):
        for bound in (eta, upsilon, omega, lap_vec_bound, slw_op_bound, slw_frob_bound):
            self.assertGreater(bound(10, 0.01), bound(10, 0.1))

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            eta(0, 0.1)
        with self.assertRaises(InvalidInputError):
            omega(3, 1.0)
        with self.assertRaises(InvalidInputError):
            BoundConstants(lap_c=0.0)


class TestCoverage(unittest.TestCase):
    """Each bound must hold in at least a 1 − β fraction of draws."""

    TRIALS = 10**4
    DIMS = (16, 64)
    BETAS = (0.05, 0.2)

    def assertCovers(self, norms, bound, beta):
        coverage = float(np.mean(np.asarray(norms) <= bound))
        self.assertGreaterEqual(coverage, 1 - beta)

    def test_vector_bounds(self):
        stream = RandomStream(21)
        for d in self.DIMS:
            gauss = [
                np.linalg.norm(gaussian_vector(stream, d)) for _ in range(self.TRIALS)
            ]
            lap = [
                np.linalg.norm(laplace_vector(stream, 1.0, d))
                for _ in range(self.TRIALS)
            ]
            for beta in self.BETAS:
                with self.subTest(d=d, beta=beta):
                    self.assertCovers(gauss, eta(d, beta), beta)
                    self.assertCovers(lap, lap_vec_bound(d, beta), beta)

    def check_wigner(self, sample, op_bound, frob_bound, seed):
        stream = RandomStream(seed)
        for d in self.DIMS:
            op_norms, frob_norms = [], []
            for _ in range(self.TRIALS):
                W = sample(stream, d)
                op_norms.append(np.max(np.abs(np.linalg.eigvalsh(W))))
                frob_norms.append(np.linalg.norm(W))
            for beta in self.BETAS:
                with self.subTest(d=d, beta=beta):
                    self.assertCovers(op_norms, op_bound(d, beta), beta)
                    self.assertCovers(frob_norms, frob_bound(d, beta), beta)

    def test_sgw_bounds(self):
        self.check_wigner(sgw_matrix, upsilon, omega, 22)

    def test_slw_bounds(self):
        self.check_wigner(slw_matrix, slw_op_bound, slw_frob_bound, 23)

    def test_lap_constant_calibration(self):
        stream = RandomStream(24)
        constants = BoundConstants(lap_c=4.0)
        self.assertEqual(constants, BoundConstants())
        for d in (16, 64, 256):
            norms = [
                np.linalg.norm(laplace_vector(stream, 1.0, d))
                for _ in range(self.TRIALS)
            ]
            for beta in self.BETAS:
                with self.subTest(d=d, beta=beta):
                    self.assertCovers(norms, lap_vec_bound(d, beta, constants), beta)


if __name__ == "__main__":
    unittest.main()
