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

"""Global configuration facilities.
"""

import json
import pathlib

from glocalx import logger
from glocalx.errors import InvalidInputError
from glocalx.utils import check_input_file


class Configuration(dict):

    """Configuration class.

    This is a plain dictionary pre-populated with the engine constants, so that
    the numerical knobs that are not worth a command-line switch live in one place.
    """

    _FIELDS = {
        'bic.epsilon': 1.e-6,
        'synthetic.regularization': 1.e-6,
        'run.batch_size': 128,
        'run.patience': 10,
        'split.ratios': (0.7, 0.2, 0.1)
    }

    def __init__(self) -> None:
        """Constructor.
        """
        super().__init__()
        self.update(**self._FIELDS)

    def reset(self) -> None:
        """Restore the default values.
        """
        self.clear()
        self.update(**self._FIELDS)



_GLOCALX_CONFIG = Configuration()


def get(key: str):
    """Return the value of a configuration key.
    """
    try:
        return _GLOCALX_CONFIG[key]
    except KeyError as exception:
        raise InvalidInputError(f'Unrecognized configuration key {key}') from exception


def set(key: str, value) -> None:
    """Set the value of an existing configuration key.
    """
    # pylint: disable=redefined-builtin
    if key not in _GLOCALX_CONFIG:
        raise InvalidInputError(f'Unrecognized configuration key {key}')
    _GLOCALX_CONFIG[key] = value


def reset() -> None:
    """Restore all the configuration keys to their default values.
    """
    _GLOCALX_CONFIG.reset()


def update(file_path: str | pathlib.Path) -> None:
    """Update the configuration from a json file containing a flat dictionary
    of overrides.

    Parameters
    ----------
    file_path
        Path to the json file.
    """
    file_path = check_input_file(file_path, '.json')
    logger.info(f'Updating configuration from {file_path}...')
    with open(file_path, encoding='utf-8') as input_file:
        try:
            overrides = json.load(input_file)
        except json.JSONDecodeError as exception:
            raise InvalidInputError(f'Malformed configuration file {file_path}: {exception}') \
                from exception
    if not isinstance(overrides, dict):
        raise InvalidInputError(f'Configuration file {file_path} must contain a dictionary')
    for key, value in overrides.items():
        set(key, value)
        logger.debug(f'{key} -> {value}')
