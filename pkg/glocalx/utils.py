# Copyright (C) 2024 the glocalx team.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""General utilities.
"""

import pathlib
import re

from glocalx.errors import InvalidInputError


_DIGITS_PATTERN = re.compile(r'(\d+)')


def check_input_file(file_path: str | pathlib.Path, *extensions: str) -> pathlib.Path:
    """Run some basic checks on a generic input file.

    This raise an InvalidInputError whenever there is a problem with the input file
    (e.g., it does not exist, it is not a file or it has the wrong extension).

    Parameters
    ----------
    file_path
        Path to the input file.

    extensions:
        Optional file extensions.

    Returns
    -------
    pathlib.Path
        The path to the input file, as a ``pathlib.Path`` object.
    """
    if not isinstance(file_path, pathlib.Path):
        file_path = pathlib.Path(file_path)
    if not file_path.exists():
        raise InvalidInputError(f'Could not find file {file_path}')
    if not file_path.is_file():
        raise InvalidInputError(f'{file_path} is not a regular file')
    suffix = file_path.suffix.lower()
    extensions = [extension.lower() for extension in extensions]
    if len(extensions) and suffix not in extensions:
        raise InvalidInputError(f'Unexpected file extension {suffix}')
    return file_path


def natural_key(identifier: str) -> tuple:
    """Sorting key comparing the digit runs in a string numerically.

    This is what we use whenever we need to order rules or theories "by id",
    so that, e.g., ``'9' < '10'`` and ``'12.3' < '12.10'``. The output of
    ``re.split()`` with a capture group always alternates text and digits, hence
    the keys are comparable element-wise.

    Parameters
    ----------
    identifier
        The string identifier.

    Returns
    -------
    tuple
        The sorting key.
    """
    parts = _DIGITS_PATTERN.split(str(identifier))
    return tuple(int(part) if i % 2 else part for i, part in enumerate(parts))
