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

import sys
from typing import Sequence

from dpcov.utils.colors import ColorSettings


def tab(text: str, tab_str: str = "  "):
    return tab_str + text.replace("\n", f"\n{tab_str}")


def pad(text: str, length: int, pad_char: str = " "):
    return text + (length - len(text)) * pad_char


def pad_left(text: str, length: int, pad_char: str = " "):
    return (length - len(text)) * pad_char + text


def eprint(msg, *args, **kwargs):
    """Prints to sys.stderr."""
    print(msg, *args, file=sys.stderr, **kwargs)


def exact_float(value: float) -> str:
    """Reads back as the same double."""
    return f"{value:.17g}"


def short_float(value: float) -> str:
    return f"{value:.4g}"


def table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left aligned text columns, numbers aligned right."""
    widths = [
        max([len(h)] + [len(row[i]) for row in rows]) for i, h in enumerate(header)
    ]

    def is_number(text: str) -> bool:
        try:
            float(text)
        except ValueError:
            return False
        return True

    def line(cells: Sequence[str]) -> str:
        return "  ".join(
            pad_left(cell, w) if is_number(cell) else pad(cell, w)
            for cell, w in zip(cells, widths)
        ).rstrip()

    head = ColorSettings.colored(line(header), "cyan", bright=True)
    return "\n".join([head] + [line(row) for row in rows])
