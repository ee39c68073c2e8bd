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

"""Command-line interface.

The main `glocalx` application dispatches to the tasks in :mod:`glocalx.pipe`
through argparse sub-parsers, with all the optional arguments taken from
:mod:`glocalx.opts`.
"""

import argparse

from glocalx import __version__, logger, set_log_level
from glocalx.errors import GlocalxError, InvalidInputError, OracleError
import glocalx.opts
import glocalx.pipe


#: Exit codes.
EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_ORACLE_FAILURE = 3


def _add_options(parser: argparse.ArgumentParser, *keys: str, required: tuple = ()) -> None:
    """Add a set of options from :mod:`glocalx.opts` to a parser.
    """
    for key in keys:
        kwargs = glocalx.opts.option_kwargs(key)
        if key in required:
            kwargs.pop('default')
            kwargs['required'] = True
        parser.add_argument(f'--{key}', **kwargs)


def _add_filter_options(parser: argparse.ArgumentParser) -> None:
    """Add the mutually exclusive filter options to a parser.
    """
    group = parser.add_mutually_exclusive_group()
    for key in ('alpha', 'alpha-q'):
        group.add_argument(f'--{key}', **glocalx.opts.option_kwargs(key))


def build_parser() -> argparse.ArgumentParser:
    """Build the main argument parser.
    """
    parser = argparse.ArgumentParser(prog='glocalx',
        description='Aggregate local decision rules into a global explanation theory')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='print debug messages')
    verbosity.add_argument('--quiet', action='store_true', help='only print warnings and errors')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='aggregate the local rules on a dataset')
    _add_options(run, 'rules', 'data', 'schema', required=('rules', 'data', 'schema'))
    _add_filter_options(run)
    _add_options(run, 'batch-size', 'seed', 'max-iterations', 'patience',
        'out', 'dendrogram')

    run_synth = subparsers.add_parser('run-synth',
        help='aggregate the local rules on a surrogate dataset labeled by an oracle')
    _add_options(run_synth, 'rules', 'schema', 'oracle', 'n-samples',
        required=('rules', 'schema', 'oracle', 'n-samples'))
    _add_options(run_synth, 'fit-from')
    _add_filter_options(run_synth)
    _add_options(run_synth, 'batch-size', 'seed', 'max-iterations', 'patience',
        'out', 'dendrogram')

    classify = subparsers.add_parser('classify',
        help='classify and explain a set of instances with an explanation theory')
    _add_options(classify, 'theory', 'data', 'schema', required=('theory', 'data', 'schema'))
    _add_options(classify, 'ref', 'out')

    evaluate = subparsers.add_parser('evaluate',
        help='evaluate an explanation theory on a test dataset')
    _add_options(evaluate, 'theory', 'test', 'schema', required=('theory', 'test', 'schema'))
    _add_options(evaluate, 'ref', 'baseline', 'rules', 'json')

    split = subparsers.add_parser('split', help='split a dataset into three parts')
    _add_options(split, 'data', 'schema', required=('data', 'schema'))
    _add_options(split, 'ratios', 'seed', 'out-prefix')

    subsample = subparsers.add_parser('subsample',
        help='repeat the aggregation on random subsets of the local rules')
    _add_options(subsample, 'rules', 'data', 'schema', 'beta', 'trials',
        required=('rules', 'data', 'schema', 'beta', 'trials'))
    _add_filter_options(subsample)
    _add_options(subsample, 'batch-size', 'seed', 'max-iterations', 'patience',
        'test', 'json')
    return parser


def _dispatch(args: argparse.Namespace) -> None:
    """Run the task selected on the command line.
    """
    kwargs = vars(args).copy()
    command = kwargs.pop('command')
    for key in ('verbose', 'quiet'):
        kwargs.pop(key)
    if command == 'run':
        glocalx.pipe.run(kwargs.pop('rules'), kwargs.pop('data'), kwargs.pop('schema'), **kwargs)
    elif command == 'run-synth':
        glocalx.pipe.run_synth(kwargs.pop('rules'), kwargs.pop('schema'), kwargs.pop('oracle'),
            **kwargs)
    elif command == 'classify':
        results = glocalx.pipe.classify(kwargs.pop('theory'), kwargs.pop('data'),
            kwargs.pop('schema'), **kwargs)
        for i, (label, explanation) in enumerate(results):
            print(f'{i}\t{label}\t{explanation}')
    elif command == 'evaluate':
        glocalx.pipe.evaluate(kwargs.pop('theory'), kwargs.pop('test'), kwargs.pop('schema'),
            **kwargs)
    elif command == 'split':
        glocalx.pipe.split(kwargs.pop('data'), kwargs.pop('schema'), **kwargs)
    elif command == 'subsample':
        glocalx.pipe.subsample_run(kwargs.pop('rules'), kwargs.pop('data'), kwargs.pop('schema'),
            **kwargs)


def main(argv: list[str] = None) -> int:
    """Main entry point, returning the exit code.
    """
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_log_level('DEBUG')
    elif args.quiet:
        set_log_level('WARNING')
    try:
        _dispatch(args)
    except OracleError as exception:
        logger.error(f'Oracle failure: {exception}')
        return EXIT_ORACLE_FAILURE
    except InvalidInputError as exception:
        logger.error(f'Invalid input: {exception}')
        return EXIT_INVALID_INPUT
    except GlocalxError as exception:
        logger.error(f'{exception}')
        return EXIT_FAILURE
    return EXIT_SUCCESS
