"""
Tests the unclipped and clipped covariance mechanisms.
"""

import math
import unittest

import numpy as np

from util import neighbor, random_ball_dataset, zero_stream

from dpcov.data.synthetic import SynthSpec, skewed_dataset, synth
from dpcov.estimation.adaptive import gauss_noise_bound
from dpcov.estimation.bounds import eta, omega, upsilon
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.linalg import (
    Dataset,
    clip_dataset,
    covariance,
    eig_sym,
    frobenius_dist,
    tail_gamma,
    trace_stat,
)
from dpcov.estimation.mechanisms import (
    CLIPPABLE,
    MechanismOptions,
    Variant,
    clip_mechanism,
    gauss_cov,
    lap_cov,
    run_base,
    sensitivity_probe,
    separate_cov,
    separate_cov_pure,
    zero_cov,
)
from dpcov.estimation.privacy import BudgetKind, PrivacyBudget
from dpcov.estimation.randomness import RandomStream, gaussian_vector, laplace_vector


class TestZeroNoise(unittest.TestCase):
    """Without noise every mechanism returns the exact covariance."""

    def setUp(self):
        self.X = random_ball_dataset(np.random.default_rng(31), 5, 40)
        self.cov = covariance(self.X)

    def test_gauss(self):
        report = gauss_cov(self.X, 0.5, zero_stream())
        np.testing.assert_array_equal(report.estimate, self.cov)
        self.assertEqual(report.budget_spent, PrivacyBudget.zcdp(0.5))
        self.assertEqual(report.variant, Variant.gauss)

    def test_lap(self):
        report = lap_cov(self.X, 1.0, zero_stream())
        np.testing.assert_array_equal(report.estimate, self.cov)
        self.assertEqual(report.budget_spent, PrivacyBudget.pure(1.0))

    def test_separate(self):
        for mechanism in (separate_cov, separate_cov_pure):
            report = mechanism(self.X, 0.5, zero_stream())
            np.testing.assert_allclose(report.estimate, self.cov, atol=1e-12)

    def test_zero(self):
        report = zero_cov(self.X)
        np.testing.assert_array_equal(report.estimate, np.zeros((5, 5)))
        self.assertIsNone(report.budget_spent)
        self.assertAlmostEqual(
            frobenius_dist(report.estimate, self.cov), float(np.linalg.norm(self.cov))
        )

    def test_clipped(self):
        tau = 0.25
        report = clip_mechanism(
            self.X, PrivacyBudget.zcdp(1.0), tau, zero_stream(), Variant.gauss
        )
        np.testing.assert_allclose(
            report.estimate, covariance(clip_dataset(self.X, tau)), atol=1e-15
        )
        self.assertEqual(report.clip_threshold, tau)

    def test_clip_identity(self):
        report = clip_mechanism(
            self.X, PrivacyBudget.pure(1.0), 1.0, zero_stream(), Variant.lap
        )
        np.testing.assert_allclose(report.estimate, self.cov, atol=1e-15)


class TestInputChecks(unittest.TestCase):
    def test_norms_exceed(self):
        X = Dataset.from_rows([[1.0, 1.0], [0.1, 0.0]])
        for mechanism in (gauss_cov, lap_cov, separate_cov, separate_cov_pure):
            with self.assertRaisesRegex(InvalidInputError, "norms exceed 1"):
                mechanism(X, 1.0, RandomStream(0))

    def test_empty(self):
        X = Dataset(np.zeros((2, 0)))
        with self.assertRaisesRegex(InvalidInputError, "empty dataset"):
            gauss_cov(X, 1.0, RandomStream(0))
        with self.assertRaisesRegex(InvalidInputError, "empty dataset"):
            zero_cov(X)

    def test_budget(self):
        X = random_ball_dataset(np.random.default_rng(32), 2, 5)
        with self.assertRaises(InvalidInputError):
            gauss_cov(X, 0.0, RandomStream(0))
        with self.assertRaises(InvalidInputError):
            run_base(Variant.gauss, X, PrivacyBudget.pure(1.0), RandomStream(0))
        with self.assertRaises(InvalidInputError):
            run_base(Variant.zero, X, PrivacyBudget.pure(1.0), RandomStream(0))

    def test_clip_threshold_range(self):
        X = random_ball_dataset(np.random.default_rng(33), 2, 5)
        for tau in (0.0, 1.5):
            with self.assertRaises(InvalidInputError):
                clip_mechanism(
                    X, PrivacyBudget.zcdp(1.0), tau, RandomStream(0), Variant.gauss
                )

    def test_budget_kinds(self):
        self.assertIsNone(Variant.zero.budget_kind())
        self.assertEqual(Variant.separate.budget_kind(), BudgetKind.zcdp)
        self.assertEqual(Variant.adaptive_pure.budget_kind(), BudgetKind.pure)
        self.assertNotIn(Variant.adaptive, CLIPPABLE)


class TestNoise(unittest.TestCase):
    def test_seeded(self):
        X = random_ball_dataset(np.random.default_rng(34), 4, 30)
        a = separate_cov(X, 0.1, RandomStream(5)).estimate
        b = separate_cov(X, 0.1, RandomStream(5)).estimate
        np.testing.assert_array_equal(a, b)

    def test_gauss_error_bound(self):
        d, n, rho, beta = 6, 200, 0.5, 0.05
        X = random_ball_dataset(np.random.default_rng(35), d, n)
        cov = covariance(X)
        bound = omega(d, beta) / (math.sqrt(rho) * n)
        stream = RandomStream(6)
        errors = [
            frobenius_dist(gauss_cov(X, rho, stream.derive(i)).estimate, cov)
            for i in range(2000)
        ]
        self.assertGreaterEqual(float(np.mean(np.array(errors) <= bound)), 1 - beta)

    def test_gauss_entry_deviation(self):
        d, n, rho = 2, 100, 1.0
        X = random_ball_dataset(np.random.default_rng(39), d, n)
        cov = covariance(X)
        stream = RandomStream(7)
        entries = np.array(
            [gauss_cov(X, rho, stream).estimate[0, 1] for _ in range(10**5)]
        )
        self.assertAlmostEqual(float(np.mean(entries)), cov[0, 1], delta=2e-4)
        std = float(np.std(entries))
        self.assertAlmostEqual(std, 1 / (math.sqrt(rho) * n), delta=0.02 / n)

    def test_lap_entry_variance(self):
        d, n, eps = 3, 50, 0.5
        X = random_ball_dataset(np.random.default_rng(40), d, n)
        cov = covariance(X)
        stream = RandomStream(8)
        entries = np.array(
            [lap_cov(X, eps, stream).estimate[0, 2] for _ in range(4 * 10**4)]
        )
        variance = 2 * (math.sqrt(2) * d / (eps * n)) ** 2
        self.assertAlmostEqual(
            float(np.var(entries - cov[0, 2])), variance, delta=0.05 * variance
        )

    def test_separate_spectrum(self):
        d, n, rho = 6, 80, 0.3
        X = random_ball_dataset(np.random.default_rng(41), d, n)
        values = eig_sym(covariance(X)).values
        for seed in range(5):
            stream = RandomStream(seed)
            noise = gaussian_vector(stream.derive("eigenvalues"), d)
            expected = values + math.sqrt(2) / (math.sqrt(rho) * n) * noise
            estimate = separate_cov(X, rho, stream).estimate
            np.testing.assert_allclose(
                np.sort(np.linalg.eigvalsh(estimate)), np.sort(expected), atol=1e-8
            )

    def test_separate_pure_spectrum(self):
        d, n, eps = 6, 80, 0.7
        X = random_ball_dataset(np.random.default_rng(42), d, n)
        values = eig_sym(covariance(X)).values
        for seed in range(5):
            stream = RandomStream(seed)
            noise = laplace_vector(stream.derive("eigenvalues"), 4 / (eps * n), d)
            estimate = separate_cov_pure(X, eps, stream).estimate
            np.testing.assert_allclose(
                np.sort(np.linalg.eigvalsh(estimate)),
                np.sort(values + noise),
                atol=1e-8,
            )

    def test_separate_pure_value_noise(self):
        # In one dimension the estimate is the noisy eigenvalue itself.
        n, eps = 40, 2.0
        X = random_ball_dataset(np.random.default_rng(43), 1, n)
        cov = float(covariance(X)[0, 0])
        stream = RandomStream(9)
        noise = np.array(
            [
                separate_cov_pure(X, eps, stream.derive(i)).estimate[0, 0] - cov
                for i in range(4 * 10**4)
            ]
        )
        variance = 2 * (4 / (eps * n)) ** 2
        self.assertAlmostEqual(float(np.var(noise)), variance, delta=0.05 * variance)

    def test_separate_error_bound(self):
        d, n, rho, beta = 256, 1000, 0.1, 0.05
        X = synth(SynthSpec.parse(f"n={n},d={d},N=1"), seed=44)
        tr = trace_stat(X)
        self.assertAlmostEqual(tr, 1.0, places=9)
        bound = 2**1.25 * math.sqrt(tr) * math.sqrt(upsilon(d, beta / 2)) / (
            rho**0.25 * math.sqrt(n)
        ) + math.sqrt(2) * eta(d, beta / 2) / (math.sqrt(rho) * n)
        cov = covariance(X)
        stream = RandomStream(10)
        errors = [
            frobenius_dist(separate_cov(X, rho, stream.derive(i)).estimate, cov)
            for i in range(200)
        ]
        self.assertGreaterEqual(float(np.mean(np.array(errors) <= bound)), 0.95)

    def test_clipped_error_bound(self):
        n, d, rho, beta = 2000, 16, 0.5, 0.05
        X = skewed_dataset(n, d, heavy=20, seed=45)
        cov = covariance(X)
        budget = PrivacyBudget.zcdp(rho)
        stream = RandomStream(11)
        for k, tau in enumerate((0.25, 0.5)):
            bound = gauss_noise_bound(tau, rho, beta, d, n) + tail_gamma(X, tau)
            errors = []
            for i in range(200):
                report = clip_mechanism(
                    X, budget, tau, stream.derive(k, i), Variant.gauss
                )
                errors.append(frobenius_dist(report.estimate, cov))
            self.assertGreaterEqual(
                float(np.mean(np.array(errors) <= bound)), 1 - beta
            )

    def test_projected_eigenvalues(self):
        X = random_ball_dataset(np.random.default_rng(36), 5, 10, max_norm=0.1)
        options = MechanismOptions(project_eigenvalues=True)
        for seed in range(20):
            estimate = separate_cov(X, 0.01, RandomStream(seed), options).estimate
            self.assertGreaterEqual(float(np.min(np.linalg.eigvalsh(estimate))), -1e-12)


class TestSensitivity(unittest.TestCase):
    def test_neighboring_datasets(self):
        rng = np.random.default_rng(37)
        slack = 1 + 1e-9
        for _ in range(10**4):
            d, n = int(rng.integers(1, 33)), int(rng.integers(1, 65))
            X = random_ball_dataset(rng, d, n)
            distances = sensitivity_probe(X, neighbor(rng, X))
            self.assertLessEqual(distances.cov_frobenius, math.sqrt(2) / n * slack)
            self.assertLessEqual(distances.eig_frobenius, math.sqrt(2) / n * slack)
            self.assertLessEqual(distances.cov_l1, math.sqrt(2) * d / n * slack)
            self.assertLessEqual(distances.eig_l1, 2 / n * slack)

    def test_zeroed_column(self):
        X = Dataset.from_rows([[1.0, 0.0], [0.0, 0.0]])
        X_prime = Dataset.from_rows([[0.0, 0.0], [0.0, 0.0]])
        distances = sensitivity_probe(X, X_prime)
        self.assertAlmostEqual(distances.cov_frobenius, 0.5)
        self.assertEqual(sensitivity_probe(X, X), (0.0, 0.0, 0.0, 0.0))

    def test_shape_mismatch(self):
        rng = np.random.default_rng(38)
        with self.assertRaises(InvalidInputError):
            sensitivity_probe(
                random_ball_dataset(rng, 2, 3), random_ball_dataset(rng, 2, 4)
            )


if __name__ == "__main__":
    unittest.main()
