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

"""Exception classes.

Everything is a ``RuntimeError`` at the bottom, so that generic handlers keep
working, but the command-line application needs finer granularity to map the
different failures onto distinct exit codes.
"""


class GlocalxError(RuntimeError):

    """Base class for all the package-specific errors.
    """


class InvalidInputError(GlocalxError):

    """Malformed or inconsistent input (files, arguments, schema mismatches).
    """


class ParseError(InvalidInputError):

    """Error while parsing an input file.

    Parameters
    ----------
    message
        The error message.

    line_number
        The (1-based) line number in the input file, if known.
    """

    def __init__(self, message: str, line_number: int = None) -> None:
        """Constructor.
        """
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)
        self.line_number = line_number


class UnsatisfiablePremise(InvalidInputError):

    """Raised when a premise constrains a feature to an empty subspace.
    """


class ContractViolation(GlocalxError):

    """A function was called in violation of its preconditions.
    """


class NumericError(GlocalxError):

    """Numerical failure (e.g., a covariance matrix that is not positive semi-definite).
    """


class OracleError(GlocalxError):

    """Failure while querying the external oracle.

    Parameters
    ----------
    message
        The error message.

    row_index
        The (0-based) index of the offending row, if known.
    """

    def __init__(self, message: str, row_index: int = None) -> None:
        """Constructor.
        """
        if row_index is not None:
            message = f'row {row_index}: {message}'
        super().__init__(message)
        self.row_index = row_index
