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

import editdistance
from importlib.resources import files
from typing import Optional

CONFIG_DESCRIPTION = str(files("dpcov").joinpath("config/config-description"))


class ConfigKeysHelper:
    """Known sections and keys, with suggestions for misspelled ones."""

    def __init__(self, path: str = CONFIG_DESCRIPTION) -> None:
        self.sections: dict[str, list[str]] = {}
        with open(path) as f:
            section: Optional[str] = None
            for line in f:
                line = line.strip()

                if len(line) == 0 or line.startswith("#"):
                    pass

                elif line.count("=") == 1 and line[-1] == "=":
                    if section is None:
                        raise ValueError(f"key outside of section: '{line}'")
                    self.sections[section].append(line.removesuffix("="))

                elif line[0] == "[" and line[-1] == "]":
                    section = line.removeprefix("[").removesuffix("]")
                    self.sections[section] = []

                else:
                    raise ValueError(f"invalid config-description line: '{line}'")

    def find_section(self, section: str) -> tuple[int, str]:
        """Distance to the closest known section and its name."""
        if section in self.sections:
            return (0, section)
        return min((editdistance.distance(section, s), s) for s in self.sections)

    def find_key(self, section: str, key: str) -> tuple[int, str, str]:
        """Distance to the closest known key, its section and its name."""
        if key in self.sections.get(section, []):
            return (0, section, key)
        return min(
            (
                editdistance.distance(key, k) + (section != s) * 5,
                s,
                k,
            )
            for s, keys in self.sections.items()
            for k in keys
        )
