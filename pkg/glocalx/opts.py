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

"""Command-line options.
"""

import typing

from glocalx import GLOCALX_DATA, config


#: Definition of all the optional arguments for the main `glocalx` application.
_OPTION_DICT = {
    # Input files.
    'rules': dict(type=str, default=None,
        help='path to the json file with the local rules'),
    'data': dict(type=str, default=None,
        help='path to the csv file with the instances and the black-box labels'),
    'schema': dict(type=str, default=None,
        help='path to the json file with the feature schema'),
    'theory': dict(type=str, default=None,
        help='path to the json file with the explanation theory'),
    'test': dict(type=str, default=None,
        help='path to the csv file with the test instances'),
    'ref': dict(type=str, default=None,
        help='path to the csv file with the reference instances used to score the rules '
             '(defaults to the instances being classified)'),

    # Aggregation.
    'alpha': dict(type=int, default=None,
        help='keep the top-ceil(alpha / 2) rules by fidelity for each class'),
    'alpha-q': dict(type=float, default=None,
        help='drop the rules with fidelity below the given percentile'),
    'batch-size': dict(type=int, default=config.get('run.batch_size'),
        help='number of instances in each batch driving the merges'),
    'seed': dict(type=int, default=0,
        help='seed for the random number generator'),
    'max-iterations': dict(type=int, default=None,
        help='maximum number of aggregation iterations'),
    'patience': dict(type=int, default=config.get('run.patience'),
        help='number of consecutive failed scans of the pair queue (each on a fresh batch) '
             'before the aggregation halts'),

    # Synthetic mode.
    'oracle': dict(type=str, default=None,
        help='command line of the black-box oracle (csv rows in, one label per line out)'),
    'n-samples': dict(type=int, default=1000,
        help='number of surrogate instances to be sampled'),
    'fit-from': dict(type=str, default=None,
        help='path to the csv file the Gaussian density model is fitted on'),

    # Evaluation and experiments.
    'baseline': dict(type=str, default=None, choices=['uni'],
        help='optional baseline to compare with'),
    'ratios': dict(type=str, default=','.join(str(value) for value in config.get('split.ratios')),
        help='comma-separated fractions of the black-box, local-explanation and test splits'),
    'beta': dict(type=float, default=1.,
        help='fraction of the local rules sampled in each trial'),
    'trials': dict(type=int, default=10,
        help='number of independent subsampling trials'),

    # Output.
    'out': dict(type=str, default=None,
        help='path to the output file'),
    'out-prefix': dict(type=str, default=str(GLOCALX_DATA / 'split'),
        help='prefix for the output split files'),
    'dendrogram': dict(type=str, default=None,
        help='path to the output json dendrogram file'),
    'json': dict(type=str, default=None,
        help='path to the output json metrics file')
}


def default_value(key: str) -> typing.Any:
    """Return the default value for a given option.

    This (re-)raises a `KeyError` if the key does not correspond to a valid optional
    argument.

    Parameters
    ----------
    key
        The optional argument name without the leading `--` (underscores are
        accepted in place of dashes).

    Returns
    -------
    typing.Any
        The default value for a given optional argument.
    """
    try:
        return _OPTION_DICT[key.replace('_', '-')]['default']
    except KeyError as exception:
        raise KeyError(f'Unknown global option {key}') from exception


def default_kwargs(*keys: str) -> dict:
    """Return a dictionary with all the default values corresponding to a set of
    keys (by default all the optional arguments defined in the `_OPTION_DICT`
    dictionary at the top of the module).

    Parameters
    ----------
    keys
        All the optional argument names (without the leading `--`) we are interested in.

    Returns
    -------
    dict
        A dictionary that can be readily used as `**kwargs` in the proper pipeline
        call to get the output corresponding to the default values of the options.
    """
    return {key: default_value(key) for key in keys or _OPTION_DICT.keys()}


def option_kwargs(key: str) -> dict:
    """Return the keyword arguments to be passed to ``add_argument()`` for a
    given option.
    """
    try:
        return dict(_OPTION_DICT[key.replace('_', '-')])
    except KeyError as exception:
        raise KeyError(f'Unknown global option {key}') from exception
