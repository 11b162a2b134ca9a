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

import os
import shutil

INTERNALS_DIR = ".dpcov"


def clean_internals(directory: str = ".") -> bool:
    """Removes the internal directory (logs) of dpcov."""
    try:
        shutil.rmtree(os.path.join(directory, INTERNALS_DIR))
    except FileNotFoundError:
        pass
    return True
