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

import pathlib

import pytest

from glocalx import GLOCALX_DATA, GLOCALX_TEST_DATA, logger
from glocalx.errors import GlocalxError, InvalidInputError, OracleError, ParseError
from glocalx.utils import check_input_file, natural_key


def test_check_input_file():
    """Test the check_input_file() function.
    """
    with pytest.raises(InvalidInputError) as info:
        check_input_file('nope')
    logger.info(info)
    with pytest.raises(InvalidInputError) as info:
        check_input_file(pathlib.Path('nope'))
    logger.info(info)
    with pytest.raises(InvalidInputError) as info:
        check_input_file(GLOCALX_DATA)
    logger.info(info)
    file_path = GLOCALX_TEST_DATA / 'loan_schema.json'
    assert check_input_file(file_path) == file_path
    assert check_input_file(f'{file_path}') == file_path
    check_input_file(file_path, '.json')
    check_input_file(file_path, '.csv', '.json')
    check_input_file(file_path, '.JSON')
    with pytest.raises(InvalidInputError) as info:
        check_input_file(file_path, '.csv')
    logger.info(info)


def test_natural_key():
    """Digit runs should be compared numerically.
    """
    assert natural_key('9') < natural_key('10')
    assert natural_key('12.3') < natural_key('12.10')
    assert natural_key('a') < natural_key('b')
    ids = ['10', '2', '1.10', '1.2', '1']
    assert sorted(ids, key=natural_key) == ['1', '1.2', '1.10', '2', '10']


def test_errors():
    """Test the exception hierarchy.
    """
    assert issubclass(ParseError, InvalidInputError)
    assert issubclass(OracleError, GlocalxError)
    assert issubclass(GlocalxError, RuntimeError)
    with pytest.raises(ParseError) as info:
        raise ParseError('unknown category', 7)
    logger.info(info)
    assert info.value.line_number == 7
    assert str(info.value) == 'line 7: unknown category'
    with pytest.raises(OracleError) as info:
        raise OracleError('bad label', 3)
    logger.info(info)
    assert info.value.row_index == 3
    assert str(info.value).startswith('row 3')
