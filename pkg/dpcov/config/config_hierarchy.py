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

from configparser import (
    ConfigParser,
    DuplicateSectionError,
    DuplicateOptionError,
    MissingSectionHeaderError,
)
from dataclasses import dataclass
from importlib.resources import files
import os
from typing import Iterable, Mapping, Optional

from dpcov.utils.text import tab

from .config_errors import ExperimentConfigError, ExperimentConfigParsingError
from .config_description import ConfigKeysHelper

GLOBAL_DEFAULTS = str(files("dpcov").joinpath("config/global-defaults"))
COMMAND_LINE = "<command line>"

UNSET = "!unset"


@dataclass
class ConfigValue:
    value: str
    config: str
    section: str
    key: Optional[str]
    internal: bool = False

    def location(self) -> str:
        text = f"section [{self.section}]"
        if self.key is not None:
            text += f", key '{self.key}'"

        if self.internal:
            text += " (built-in default)"
        elif self.config == COMMAND_LINE:
            text += " (given on the command line)"
        else:
            text += f" (in config file {os.path.abspath(self.config)})"

        return text


class ConfigHierarchy:
    """
    Layers of configuration where earlier ones override later ones:
    command line options, the user's config file and the built-in defaults.
    """

    def __init__(
        self,
        config_path: Optional[str] = None,
        overrides: Optional[Mapping[str, Mapping[str, str]]] = None,
    ) -> None:
        self._config_paths: list[str] = []
        self._configs: list[ConfigParser] = []
        self._user_layers: list[int] = []

        if overrides:
            self._config_paths.append(COMMAND_LINE)
            self._configs.append(config := ConfigParser(interpolation=None))
            config.read_dict(overrides)
        if config_path is not None:
            self._user_layers.append(len(self._configs))
            self._load_config(config_path)
        self._load_config(GLOBAL_DEFAULTS)

    def _load_config(self, path: str) -> None:
        self._config_paths.append(path)
        self._configs.append(config := ConfigParser(interpolation=None))
        try:
            res = config.read(path)
        except DuplicateSectionError as e:
            raise ExperimentConfigParsingError(path, f"Duplicate section [{e.section}]")
        except DuplicateOptionError as e:
            raise ExperimentConfigParsingError(
                path, f"Duplicate key '{e.option}' in section [{e.section}]"
            )
        except MissingSectionHeaderError:
            raise ExperimentConfigParsingError(path, "Missing section header")
        if len(res) == 0:
            raise ExperimentConfigError(f"Missing config {path}.")

    def get(self, section: str, key: str | None) -> ConfigValue:
        return self.get_from_candidates([(section, key)])

    def get_from_candidates(
        self, candidates: Iterable[tuple[str, str | None]]
    ) -> ConfigValue:
        candidates = list(candidates)
        unset: bool = False
        for section, key in candidates:
            for config_path, config in zip(self._config_paths, self._configs):
                if key is None:
                    value = section if section in config else None
                else:
                    value = config.get(section, key, fallback=None)

                if value == UNSET:
                    unset = True
                    break
                elif value is not None:
                    return ConfigValue(
                        value,
                        config_path,
                        section,
                        key,
                        internal=config_path == GLOBAL_DEFAULTS,
                    )
            if unset:
                break

        def msg(section_key: tuple[str, str | None]) -> str:
            section, key = section_key
            if key is None:
                return f"Section [{section}]"
            else:
                return f"Key '{key}' in section [{section}]"

        candidates_str = " or\n".join(map(msg, candidates))
        raise ExperimentConfigError(f"Unset value for:\n{tab(candidates_str)}")

    def get_or_empty(self, section: str, key: str) -> ConfigValue:
        """Like get, but a value hidden by '!unset' reads as empty."""
        try:
            return self.get(section, key)
        except ExperimentConfigError:
            return ConfigValue("", GLOBAL_DEFAULTS, section, key, internal=True)

    def check_unused_keys(self) -> None:
        """
        Check whether the user's config contains unknown sections or keys.

        Raises
        ------
        ExperimentConfigError
            If unknown sections or keys are present.
        """
        helper = ConfigKeysHelper()
        for layer in self._user_layers:
            config = self._configs[layer]
            for section in config.sections():
                dist, r_section = helper.find_section(section)
                if dist != 0:
                    raise ExperimentConfigError(
                        f"Unexpected section [{section}] in config. "
                        f"(Did you mean [{r_section}]?)"
                    )
                for key in config[section].keys():
                    dist, r_section, r_key = helper.find_key(section, key)
                    if dist != 0:
                        raise ExperimentConfigError(
                            f"Unexpected key '{key}' in section [{section}] of config. "
                            f"(Did you mean '{r_key}'"
                            + (
                                f" in section [{r_section}]"
                                if section != r_section
                                else ""
                            )
                            + "?)"
                        )
