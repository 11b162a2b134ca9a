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

from pydantic_core import PydanticCustomError, ErrorDetails
from pydantic import (
    BaseModel,
    Field,
    BeforeValidator,
    ValidationError,
    field_validator,
    model_validator,
)
from typing import Any, Annotated, Mapping, NamedTuple, Optional, Union

from dpcov.utils.text import tab, eprint
from dpcov.utils.colors import ColorSettings
from dpcov.config.config_hierarchy import ConfigValue, ConfigHierarchy
from dpcov.config.config_errors import ExperimentConfigError
from dpcov.config.config_types import (
    EigenSolver,
    MechanismName,
    Normalization,
    SweepAxis,
)
from dpcov.data.synthetic import SynthSpec
from dpcov.estimation.adaptive import ThresholdSearchConfig
from dpcov.estimation.bounds import BoundConstants
from dpcov.estimation.estimation_errors import InvalidInputError
from dpcov.estimation.mechanisms import MechanismOptions, Variant
from dpcov.estimation.privacy import BudgetKind, PrivacyBudget

DEFAULT_RHO = 0.1

OptionalStr = Annotated[Optional[str], BeforeValidator(lambda s: s or None)]
OptionalFloat = Annotated[Optional[float], BeforeValidator(lambda s: s or None)]
OptionalInt = Annotated[Optional[int], BeforeValidator(lambda s: s or None)]
ListMechanisms = Annotated[
    list[MechanismName],
    BeforeValidator(lambda s: [m.strip() for m in s.split(",") if m.strip()]),
]
OptionalSynthSpec = Annotated[
    Optional[SynthSpec], BeforeValidator(lambda s: SynthSpec.parse(s) if s else None)
]

ValuesDict = dict[str, Union[str, "ValuesDict"]]
ConfigValuesDict = Mapping[str, Union[ConfigValue, "ConfigValuesDict"]]


def _to_values(config_values_dict: ConfigValuesDict) -> ValuesDict:
    def convert(what: ConfigValue | Mapping) -> str | dict:
        if isinstance(what, ConfigValue):
            return what.value
        else:
            return {key: convert(val) for key, val in what.items()}

    return {key: convert(val) for key, val in config_values_dict.items()}


def mechanism_variant(name: MechanismName) -> Variant:
    return Variant[name.name]


class Sweep(BaseModel):
    """One swept parameter with its values."""

    axis: SweepAxis
    values: list[float] = Field(min_length=1)

    @model_validator(mode="before")
    @classmethod
    def parse(cls, data: Any) -> Any:
        if not isinstance(data, str):
            return data
        axis, sep, values = data.partition("=")
        if not sep:
            raise PydanticCustomError(
                "invalid_sweep",
                "Sweep must have form AXIS=v1,v2,...",
                {"sweep": data},
            )
        return {
            "axis": axis.strip(),
            "values": [v.strip() for v in values.split(",") if v.strip()],
        }

    @model_validator(mode="after")
    def validate_values(self):
        for value in self.values:
            if self.axis.is_data_axis() and not (value >= 1 and value.is_integer()):
                raise PydanticCustomError(
                    "sweep_value_not_positive_integer",
                    f"Values of sweep axis {self.axis} must be positive integers",
                    {"value": value},
                )
            if not value > 0:
                raise PydanticCustomError(
                    "sweep_value_not_positive",
                    f"Values of sweep axis {self.axis} must be positive",
                    {"value": value},
                )
        return self

    def __str__(self) -> str:
        return f"{self.axis}=" + ",".join(f"{v:g}" for v in self.values)


OptionalSweep = Annotated[Optional[Sweep], BeforeValidator(lambda s: s or None)]


class SweepPoint(NamedTuple):
    index: int
    value: Optional[float]


class ExperimentSection(BaseModel):
    """What to run and where to write it."""

    _section: str = "experiment"

    mechanisms: ListMechanisms = Field(min_length=1)
    reps: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    sweep: OptionalSweep
    out: str = Field(min_length=1)
    workers: int = Field(ge=1)
    record_timing: bool

    @field_validator("mechanisms", mode="after")
    @classmethod
    def validate_mechanisms(cls, value: list[MechanismName]) -> list[MechanismName]:
        if len(set(value)) != len(value):
            raise PydanticCustomError(
                "duplicate_mechanisms",
                "Mechanisms must not repeat",
                {"mechanisms": ",".join(value)},
            )
        return value

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "_section": configs.get("experiment", None),
            **{key: configs.get("experiment", key) for key in cls.model_fields},
        }


class DataSection(BaseModel):
    _section: str = "data"

    input: OptionalStr
    synthetic: OptionalSynthSpec
    normalize: Normalization
    rescale_radius: bool

    @model_validator(mode="after")
    def validate_model(self):
        if (self.input is None) == (self.synthetic is None):
            raise PydanticCustomError(
                "exactly_one_data_source",
                "Exactly one of 'input' and 'synthetic' must be set",
                {"input": self.input or "", "synthetic": self.synthetic or ""},
            )
        return self

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "_section": configs.get("data", None),
            "input": configs.get_or_empty("data", "input"),
            "synthetic": configs.get_or_empty("data", "synthetic"),
            "normalize": configs.get("data", "normalize"),
            "rescale_radius": configs.get("data", "rescale_radius"),
        }


class PrivacySection(BaseModel):
    _section: str = "privacy"

    rho: OptionalFloat = Field(gt=0, allow_inf_nan=False)
    eps: OptionalFloat = Field(gt=0, allow_inf_nan=False)
    delta: float = Field(gt=0, le=1)
    beta: float = Field(gt=0, lt=1)

    @model_validator(mode="after")
    def validate_model(self):
        if self.rho is not None and self.eps is not None:
            raise PydanticCustomError(
                "rho_and_eps_set",
                "Only one of 'rho' and 'eps' can be set",
                {"rho": self.rho, "eps": self.eps},
            )
        return self

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "_section": configs.get("privacy", None),
            "rho": configs.get_or_empty("privacy", "rho"),
            "eps": configs.get_or_empty("privacy", "eps"),
            "delta": configs.get("privacy", "delta"),
            "beta": configs.get("privacy", "beta"),
        }


class MechanismSection(BaseModel):
    _section: str = "mechanism"

    eigensolver: EigenSolver
    project_eigenvalues: bool
    zero_noise: bool

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "_section": configs.get("mechanism", None),
            **{key: configs.get("mechanism", key) for key in cls.model_fields},
        }


class AdaptiveSection(BaseModel):
    _section: str = "adaptive"

    tau_cap_exponent: OptionalInt = Field(lt=0)
    radius_floor_exponent: OptionalInt = Field(lt=0)
    known_radius: bool

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "_section": configs.get("adaptive", None),
            "tau_cap_exponent": configs.get_or_empty("adaptive", "tau_cap_exponent"),
            "radius_floor_exponent": configs.get_or_empty(
                "adaptive", "radius_floor_exponent"
            ),
            "known_radius": configs.get("adaptive", "known_radius"),
        }


class BoundsSection(BaseModel):
    _section: str = "bounds"

    lap_constant: float = Field(gt=0, allow_inf_nan=False)

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "_section": configs.get("bounds", None),
            "lap_constant": configs.get("bounds", "lap_constant"),
        }


class ExperimentPlan(BaseModel):
    """Validated description of one benchmark run."""

    experiment: ExperimentSection
    data: DataSection
    privacy: PrivacySection
    mechanism: MechanismSection
    adaptive: AdaptiveSection
    bounds: BoundsSection

    @classmethod
    def load_dict(cls, configs: ConfigHierarchy) -> ConfigValuesDict:
        return {
            "experiment": ExperimentSection.load_dict(configs),
            "data": DataSection.load_dict(configs),
            "privacy": PrivacySection.load_dict(configs),
            "mechanism": MechanismSection.load_dict(configs),
            "adaptive": AdaptiveSection.load_dict(configs),
            "bounds": BoundsSection.load_dict(configs),
        }

    @model_validator(mode="after")
    def validate_model(self):
        sweep = self.experiment.sweep
        kind = self.budget_kind
        if sweep is not None:
            if sweep.axis.is_data_axis() and self.data.synthetic is None:
                raise PydanticCustomError(
                    "sweep_needs_synthetic_data",
                    f"Sweeping '{sweep.axis}' needs synthetic data",
                    {"sweep": str(sweep), "input": self.data.input},
                )
            if sweep.axis == SweepAxis.rho and kind != BudgetKind.zcdp:
                raise PydanticCustomError(
                    "sweep_budget_mismatch",
                    "Sweeping 'rho' needs a zCDP budget",
                    {"sweep": str(sweep), "eps": self.privacy.eps},
                )
            if sweep.axis == SweepAxis.eps and kind != BudgetKind.pure:
                raise PydanticCustomError(
                    "sweep_budget_mismatch",
                    "Sweeping 'eps' needs a pure budget",
                    {"sweep": str(sweep), "rho": self.privacy.rho},
                )
            for point in self.points():
                try:
                    self.synth_at(point)
                except InvalidInputError as err:
                    raise PydanticCustomError(
                        "invalid_sweep_dataset",
                        f"Sweep value {sweep.axis}={point.value:g} "
                        "gives an invalid dataset",
                        {"synthetic": str(self.data.synthetic), "error": str(err)},
                    )

        for name in self.experiment.mechanisms:
            needed = mechanism_variant(name).budget_kind()
            if needed is not None and needed != kind:
                raise PydanticCustomError(
                    "mechanism_budget_mismatch",
                    f"Mechanism '{name}' needs "
                    + ("'rho'" if needed == BudgetKind.zcdp else "'eps'"),
                    {"mechanism": name, "budget": self.budget_kind},
                )
        return self

    @property
    def budget_kind(self) -> BudgetKind:
        if self.privacy.eps is not None:
            return BudgetKind.pure
        if self.privacy.rho is not None:
            return BudgetKind.zcdp
        sweep = self.experiment.sweep
        if sweep is not None and sweep.axis == SweepAxis.eps:
            return BudgetKind.pure
        return BudgetKind.zcdp

    def points(self) -> list[SweepPoint]:
        sweep = self.experiment.sweep
        if sweep is None:
            return [SweepPoint(0, None)]
        return [SweepPoint(i, v) for i, v in enumerate(sweep.values)]

    def budget_at(self, point: SweepPoint) -> PrivacyBudget:
        sweep = self.experiment.sweep
        if sweep is not None and sweep.axis in (SweepAxis.rho, SweepAxis.eps):
            assert point.value is not None
            return PrivacyBudget(self.budget_kind, point.value)
        if self.budget_kind == BudgetKind.pure:
            assert self.privacy.eps is not None
            return PrivacyBudget.pure(self.privacy.eps)
        return PrivacyBudget.zcdp(self.privacy.rho or DEFAULT_RHO)

    def synth_at(self, point: SweepPoint) -> Optional[SynthSpec]:
        spec = self.data.synthetic
        sweep = self.experiment.sweep
        if spec is None or sweep is None or not sweep.axis.is_data_axis():
            return spec
        assert point.value is not None
        return spec.with_axis(sweep.axis, int(point.value))

    def mechanism_options(self) -> MechanismOptions:
        return MechanismOptions(
            eigensolver=self.mechanism.eigensolver,
            project_eigenvalues=self.mechanism.project_eigenvalues,
            constants=BoundConstants(self.bounds.lap_constant),
        )

    def search_config(self) -> ThresholdSearchConfig:
        return ThresholdSearchConfig(
            smallest_tau_exponent=self.adaptive.tau_cap_exponent,
            radius_floor_exponent=self.adaptive.radius_floor_exponent,
            known_radius=self.adaptive.known_radius,
        )


# Command line destinations and the config keys they override.
CLI_OPTIONS: dict[str, tuple[str, str]] = {
    "mechanism": ("experiment", "mechanisms"),
    "reps": ("experiment", "reps"),
    "seed": ("experiment", "seed"),
    "sweep": ("experiment", "sweep"),
    "out": ("experiment", "out"),
    "workers": ("experiment", "workers"),
    "record_timing": ("experiment", "record_timing"),
    "input": ("data", "input"),
    "synthetic": ("data", "synthetic"),
    "normalize": ("data", "normalize"),
    "no_rescale": ("data", "rescale_radius"),
    "rho": ("privacy", "rho"),
    "eps": ("privacy", "eps"),
    "delta": ("privacy", "delta"),
    "beta": ("privacy", "beta"),
    "eigensolver": ("mechanism", "eigensolver"),
    "project_eigenvalues": ("mechanism", "project_eigenvalues"),
    "zero_noise": ("mechanism", "zero_noise"),
    "tau_cap_exponent": ("adaptive", "tau_cap_exponent"),
    "radius_floor_exponent": ("adaptive", "radius_floor_exponent"),
    "known_radius": ("adaptive", "known_radius"),
    "lap_constant": ("bounds", "lap_constant"),
}
# Setting one of these on the command line clears the other.
EXCLUSIVE_OPTIONS = {
    "input": "synthetic",
    "synthetic": "input",
    "rho": "eps",
    "eps": "rho",
}


def cli_overrides(args: Mapping[str, Any]) -> dict[str, dict[str, str]]:
    """Turns parsed command line arguments into the topmost config layer."""
    overrides: dict[str, dict[str, str]] = {}

    def put(dest: str, value: str) -> None:
        section, key = CLI_OPTIONS[dest]
        overrides.setdefault(section, {})[key] = value

    for dest, value in args.items():
        if dest not in CLI_OPTIONS or value is None or value is False:
            continue
        if dest == "no_rescale":
            put(dest, "0")
        elif value is True:
            put(dest, "1")
        else:
            put(dest, str(value))
        if dest in EXCLUSIVE_OPTIONS:
            put(EXCLUSIVE_OPTIONS[dest], "")
    return overrides


def _format_message(err: ErrorDetails) -> str:
    inp = err["input"]
    ctx = err["ctx"] if "ctx" in err else None
    if isinstance(inp, (dict, BaseModel)) and ctx is not None:
        if ctx == {}:
            return f"{err['msg']}."
        return f"{err['msg']}:\n" + tab(
            "\n".join(f"{key}={val}" for key, val in ctx.items())
        )
    return f"{err['msg']}: '{inp}'"


def _convert_errors(e: ValidationError, config_values: ConfigValuesDict) -> list[str]:
    error_msgs: list[str] = []
    for error in e.errors():
        value: Any = config_values
        for loc in error["loc"]:
            if not isinstance(value, Mapping) or loc not in value:
                break
            value = value[loc]

        if isinstance(value, ConfigValue):
            location = value.location()
        elif "_section" in value:
            location = value["_section"].location()
        else:
            location = "experiment plan"

        error_msgs.append(f"In {location}:\n" + tab(_format_message(error)))
    return error_msgs


def build_plan(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> ExperimentPlan:
    """
    Builds the plan or raises.

    Raises
    ------
    ExperimentConfigError
        If the configuration is unreadable or invalid.
    """
    config_hierarchy = ConfigHierarchy(config_path, overrides)
    config_hierarchy.check_unused_keys()
    config_values = ExperimentPlan.load_dict(config_hierarchy)
    try:
        return ExperimentPlan(**_to_values(config_values))
    except ValidationError as err:
        raise ExperimentConfigError(
            "Invalid config:\n\n" + "\n\n".join(_convert_errors(err, config_values))
        )


def load_plan(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> Optional[ExperimentPlan]:
    """Loads the plan, printing problems and returning None if it is invalid."""
    try:
        return build_plan(config_path, overrides)
    except ExperimentConfigError as err:
        eprint(ColorSettings.colored(str(err), "red"))
    except InvalidInputError as err:
        eprint(ColorSettings.colored(f"Invalid config: {err}", "red"))
    return None
