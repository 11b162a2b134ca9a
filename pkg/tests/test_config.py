"""
Tests loading of experiment plans from config files and the command line.
"""

import unittest

from util import TestFixture

from dpcov.config.config_description import ConfigKeysHelper
from dpcov.config.config_errors import ExperimentConfigError
from dpcov.config.config_types import (
    EigenSolver,
    MechanismName,
    Normalization,
    SweepAxis,
)
from dpcov.config.experiment_plan import (
    SweepPoint,
    build_plan,
    cli_overrides,
    load_plan,
)
from dpcov.data import csv_input
from dpcov.estimation import linalg
from dpcov.estimation.privacy import BudgetKind, PrivacyBudget


class TestDefaults(TestFixture):
    def test_built_in(self):
        plan = build_plan()
        self.assertEqual(plan.experiment.mechanisms, [MechanismName.gauss])
        self.assertEqual(plan.experiment.reps, 50)
        self.assertEqual(plan.budget_kind, BudgetKind.zcdp)
        self.assertEqual(plan.budget_at(plan.points()[0]), PrivacyBudget.zcdp(0.1))
        self.assertEqual(plan.points(), [SweepPoint(0, None)])
        self.assertEqual(plan.privacy.beta, 0.05)
        self.assertTrue(plan.data.rescale_radius)

    def test_options(self):
        plan = build_plan(
            overrides={
                "mechanism": {"eigensolver": "jacobi", "project_eigenvalues": "1"},
                "adaptive": {"tau_cap_exponent": "-30", "known_radius": "1"},
                "bounds": {"lap_constant": "2.5"},
            }
        )
        options = plan.mechanism_options()
        self.assertEqual(options.eigensolver, EigenSolver.jacobi)
        self.assertTrue(options.project_eigenvalues)
        self.assertEqual(options.constants.lap_c, 2.5)
        search = plan.search_config()
        self.assertEqual(search.smallest_tau_exponent, -30)
        self.assertIsNone(search.radius_floor_exponent)
        self.assertTrue(search.known_radius)


class TestConfigFile(TestFixture):
    def test_layers(self):
        path = self.write_file(
            "plan.ini",
            "[experiment]\nmechanisms=gauss,adaptive,zero\nreps=3\n"
            "[privacy]\nrho=0.5\n",
        )
        plan = build_plan(path, {"experiment": {"reps": "7"}})
        self.assertEqual(
            plan.experiment.mechanisms,
            [MechanismName.gauss, MechanismName.adaptive, MechanismName.zero],
        )
        self.assertEqual(plan.experiment.reps, 7)
        self.assertEqual(plan.privacy.rho, 0.5)

    def test_misspelled_key(self):
        path = self.write_file("plan.ini", "[experiment]\nrepz=3\n")
        with self.assertRaisesRegex(ExperimentConfigError, "Did you mean 'reps'"):
            build_plan(path)

    def test_misspelled_section(self):
        path = self.write_file("plan.ini", "[experimnet]\nreps=3\n")
        with self.assertRaisesRegex(ExperimentConfigError, r"\[experiment\]"):
            build_plan(path)

    def test_key_in_wrong_section(self):
        path = self.write_file("plan.ini", "[experiment]\neigensolver=jacobi\n")
        with self.assertRaisesRegex(ExperimentConfigError, r"section \[mechanism\]"):
            build_plan(path)

    def test_missing_file(self):
        with self.assertRaisesRegex(ExperimentConfigError, "Missing config"):
            build_plan("nothing.ini")

    def test_duplicate_key(self):
        path = self.write_file("plan.ini", "[experiment]\nreps=3\nreps=4\n")
        with self.assertRaisesRegex(ExperimentConfigError, "Duplicate key 'reps'"):
            build_plan(path)

    def test_unset_synthetic(self):
        path = self.write_file(
            "plan.ini", "[data]\ninput=data.csv\nsynthetic=!unset\n"
        )
        plan = build_plan(path)
        self.assertEqual(plan.data.input, "data.csv")
        self.assertIsNone(plan.data.synthetic)


class TestValidation(TestFixture):
    def assertInvalid(self, overrides, message):
        with self.assertRaisesRegex(ExperimentConfigError, message):
            build_plan(overrides=overrides)

    def test_error_location(self):
        self.assertInvalid(
            {"experiment": {"reps": "0"}},
            r"section \[experiment\], key 'reps' \(given on the command line\)",
        )

    def test_both_sources(self):
        self.assertInvalid(
            {"data": {"input": "data.csv"}}, "Exactly one of 'input' and 'synthetic'"
        )

    def test_both_budgets(self):
        self.assertInvalid({"privacy": {"rho": "1", "eps": "1"}}, "Only one of")

    def test_budget_kind(self):
        self.assertInvalid(
            {"privacy": {"eps": "1"}, "experiment": {"mechanisms": "gauss"}},
            "Mechanism 'gauss' needs 'rho'",
        )
        self.assertInvalid(
            {"experiment": {"mechanisms": "lap"}}, "Mechanism 'lap' needs 'eps'"
        )

    def test_unknown_mechanism(self):
        self.assertInvalid({"experiment": {"mechanisms": "gaus"}}, "mechanisms")

    def test_duplicate_mechanism(self):
        self.assertInvalid(
            {"experiment": {"mechanisms": "gauss,gauss"}}, "must not repeat"
        )

    def test_sweep(self):
        self.assertInvalid({"experiment": {"sweep": "d"}}, "AXIS=v1,v2")
        self.assertInvalid({"experiment": {"sweep": "d=1.5"}}, "positive integers")
        self.assertInvalid({"experiment": {"sweep": "rho=0,1"}}, "must be positive")
        self.assertInvalid(
            {"experiment": {"sweep": "eps=1,2"}, "privacy": {"rho": "1"}},
            "Sweeping 'eps' needs a pure budget",
        )

    def test_synthetic_spec(self):
        self.assertInvalid({"data": {"synthetic": "n=3,d=2,N=5"}}, "n < N")

    def test_sweep_point_dataset(self):
        self.assertInvalid(
            {
                "experiment": {"sweep": "n=2,10"},
                "data": {"synthetic": "n=10,d=2,N=4"},
            },
            r"Sweep value n=2 gives an invalid dataset",
        )
        self.assertInvalid(
            {
                "experiment": {"sweep": "N=1,64"},
                "data": {"synthetic": "n=50,d=2,N=1"},
            },
            r"N=64 gives an invalid dataset",
        )


    def test_adaptive_exponents(self):
        self.assertInvalid({"adaptive": {"tau_cap_exponent": "3"}}, "less than 0")

    def test_load_plan_prints(self):
        self.assertIsNone(load_plan(overrides={"experiment": {"reps": "x"}}))


class TestSweeps(TestFixture):
    def test_data_axis(self):
        plan = build_plan(
            overrides={
                "experiment": {"sweep": "d=4,16"},
                "data": {"synthetic": "n=100,d=2,N=2"},
            }
        )
        self.assertEqual(plan.experiment.sweep.axis, SweepAxis.d)
        self.assertEqual(
            [plan.synth_at(p).d for p in plan.points()], [4, 16]
        )
        self.assertEqual(plan.synth_at(plan.points()[1]).bins, 2)

    def test_bins_axis(self):
        plan = build_plan(overrides={"experiment": {"sweep": "N=1,2,4"}})
        self.assertEqual([plan.synth_at(p).bins for p in plan.points()], [1, 2, 4])

    def test_budget_axis(self):
        plan = build_plan(
            overrides={"experiment": {"sweep": "eps=0.5,2", "mechanisms": "lap"}}
        )
        self.assertEqual(plan.budget_kind, BudgetKind.pure)
        self.assertEqual(
            [plan.budget_at(p) for p in plan.points()],
            [PrivacyBudget.pure(0.5), PrivacyBudget.pure(2.0)],
        )

    def test_data_axis_needs_synthetic(self):
        with self.assertRaisesRegex(ExperimentConfigError, "needs synthetic data"):
            build_plan(
                overrides={
                    "experiment": {"sweep": "n=10,20"},
                    "data": {"input": "data.csv", "synthetic": ""},
                }
            )


class TestCliOverrides(unittest.TestCase):
    def test_conversion(self):
        overrides = cli_overrides(
            {
                "rho": "0.5",
                "no_rescale": True,
                "zero_noise": True,
                "known_radius": False,
                "input": None,
                "subcommand": "run",
            }
        )
        self.assertEqual(
            overrides,
            {
                "privacy": {"rho": "0.5", "eps": ""},
                "data": {"rescale_radius": "0"},
                "mechanism": {"zero_noise": "1"},
            },
        )

    def test_exclusive_source(self):
        overrides = cli_overrides({"input": "x.csv"})
        self.assertEqual(overrides, {"data": {"input": "x.csv", "synthetic": ""}})

class TestOptionTypes(unittest.TestCase):
    def test_reexported(self):
        self.assertIs(EigenSolver, linalg.EigenSolver)
        self.assertIs(Normalization, csv_input.Normalization)
        self.assertEqual(EigenSolver("jacobi"), EigenSolver.jacobi)
        self.assertEqual(Normalization("max-norm"), Normalization.max_norm)


class TestConfigKeysHelper(unittest.TestCase):
    def test_known(self):
        helper = ConfigKeysHelper()
        self.assertEqual(helper.find_key("privacy", "beta"), (0, "privacy", "beta"))
        self.assertEqual(helper.find_section("data"), (0, "data"))

    def test_suggestions(self):
        helper = ConfigKeysHelper()
        self.assertEqual(helper.find_section("dta")[1], "data")
        self.assertEqual(
            helper.find_key("experiment", "seeds")[1:], ("experiment", "seed")
        )
        self.assertEqual(
            helper.find_key("experiment", "tau_cap_exponent")[1:],
            ("adaptive", "tau_cap_exponent"),
        )


if __name__ == "__main__":
    unittest.main()
