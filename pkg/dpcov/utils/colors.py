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

from colorama import Fore, Style


class __ColorSettings:
    """Singleton holding whether output may contain color codes."""

    def __init__(self) -> None:
        self.colors_on = True

    def set_state(self, colors_on: bool) -> None:
        self.colors_on = colors_on

    def colored(self, msg: str, color: str, bright: bool = False) -> str:
        """Recolors all uncolored text of msg."""
        if not self.colors_on:
            return msg

        col = getattr(Fore, color.upper())
        if bright:
            col += Style.BRIGHT
        msg = msg.replace(Fore.RESET, f"{Fore.RESET}{col}")
        return f"{col}{msg}{Fore.RESET}{Style.RESET_ALL if bright else ''}"


ColorSettings = __ColorSettings()
