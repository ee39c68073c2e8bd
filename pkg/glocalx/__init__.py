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


"""System-wide facilities.
"""

import os
from pathlib import Path
import sys

from loguru import logger

from glocalx.version import version as __version__


__PACKAGE_NAME__ = 'glocalx'

# Basic package structure.
GLOCALX_ROOT = Path(__file__).parent
GLOCALX_BASE = GLOCALX_ROOT.parent
GLOCALX_BIN = GLOCALX_ROOT / 'bin'
GLOCALX_DOCS = GLOCALX_BASE / 'docs'
GLOCALX_TESTS = GLOCALX_BASE / 'tests'
GLOCALX_TEST_DATA = GLOCALX_TESTS / 'data'

DEFAULT_LOGURU_FORMAT = '>>> <level>{message}</level>'
DEFAULT_LOGURU_HANDLER = dict(sink=sys.stderr, colorize=True, format=DEFAULT_LOGURU_FORMAT)
logger.configure(handlers=[DEFAULT_LOGURU_HANDLER], levels=None)


def set_log_level(level: str) -> None:
    """Reset the default loguru handler with a different minimum level.

    Parameters
    ----------
    level
        The minimum level name (e.g., ``DEBUG``, ``INFO`` or ``WARNING``).
    """
    logger.configure(handlers=[dict(DEFAULT_LOGURU_HANDLER, level=level)])


# The path to the base folder for the output data defaults to ~/glocalxdata,
# but can be changed via the $GLOCALX_DATA environmental variable.
# Note this folder is created at the first module import if it does not exist.
try:
    GLOCALX_DATA = Path(os.environ['GLOCALX_DATA'])
except KeyError:
    GLOCALX_DATA = Path.home() / 'glocalxdata'
if not GLOCALX_DATA.exists():
    logger.info(f'Creating folder {GLOCALX_DATA}...')
    Path.mkdir(GLOCALX_DATA, parents=True)
