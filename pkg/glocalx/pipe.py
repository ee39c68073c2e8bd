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

"""Pipeline facilities.

Each task takes the paths to its input files as positional arguments and all
the rest as keyword arguments, whose names and default values are those of the
command-line options defined in :mod:`glocalx.opts`.
"""

import json
import pathlib
import time

import pandas as pd

from glocalx import logger
import glocalx.aggregator
import glocalx.classifier
import glocalx.data
import glocalx.harness
import glocalx.opts
import glocalx.rules
import glocalx.synthetic
from glocalx.errors import InvalidInputError


def _filter_kwargs(*keys: str, **kwargs) -> dict:
    """Small convenience function for filtering keyword arguments and dispatching
    them to different function calls.

    This essentially returns a copy of the input dictionary only containing the subset
    of keys specified as arguments.

    Parameters
    ----------
    keys
        The desired keys.

    kwargs
        The complete dictionary of keyword arguments.

    Returns
    -------
    dict
        A filtered dict of keyword arguments.
    """
    return {key: value for key, value in kwargs.items() if key in keys}


def _check_kwargs(valid_keys: tuple[str], **kwargs) -> None:
    """Make sure that the input keyword argument dictionary only contains keys in
    the predefined tuple passed as the first argument.

    This is raising an ``InvalidInputError`` if any extraneous key is found.

    Parameters
    ----------
    valid_keys
        The tuple or list of valid keys.

    kwargs
        The complete dictionary of keyword arguments.
    """
    for key in kwargs:
        if key not in valid_keys:
            raise InvalidInputError(f'Invalid keyword argument \'{key}\' '
                f'(valid keys are {valid_keys})')


def _process_kwargs(valid_keys: tuple[str], **kwargs) -> dict:
    """Return the full set of option for a specific pipeline task call.

    This is basically doing three distinct things:

    * check that all the keyword arguments make sense for the specific task at hand;
    * retrieve all the default options from the :mod:`glocalx.opts` modules;
    * update the default options with the actual keyword arguments being passed to
      the relevant function call.

    Parameters
    ----------
    valid_keys
        The tuple or list of valid keys.

    kwargs
        The complete dictionary of keyword arguments.

    Returns
    -------
    dict
        The updated dict of keyword arguments.
    """
    _check_kwargs(valid_keys, **kwargs)
    options = glocalx.opts.default_kwargs(*valid_keys)
    options.update(**kwargs)
    return options


def _parse_ratios(ratios: str | tuple) -> tuple[float, ...]:
    """Parse a comma-separated list of split ratios.
    """
    if not isinstance(ratios, str):
        return tuple(float(value) for value in ratios)
    try:
        return tuple(float(token) for token in ratios.split(','))
    except ValueError as exception:
        raise InvalidInputError(f'Invalid split ratios "{ratios}"') from exception


def _write_json(data: dict, file_path: str | pathlib.Path) -> None:
    """Write a dictionary to a json file.
    """
    logger.info(f'Writing metrics to {file_path}...')
    with open(file_path, 'w', encoding='utf-8') as output_file:
        json.dump(data, output_file, indent=2)
        output_file.write('\n')


#: Keyword arguments driving the aggregation proper.
_AGGREGATION_KWARGS = ('alpha', 'alpha_q', 'batch_size', 'seed', 'max_iterations',
    'patience')


def _aggregate(rules: list[glocalx.rules.Rule], dataset: glocalx.rules.Dataset,
    **kwargs) -> tuple[glocalx.rules.ExplanationTheory, glocalx.aggregator.Dendrogram, float]:
    """Run the aggregation and return the theory, the dendrogram and the elapsed time.

    A single rule has nothing to be merged with: it is taken as the theory
    itself, with a single-leaf dendrogram, and only goes through the filter.
    """
    config = glocalx.aggregator.RunConfig(**_filter_kwargs(*_AGGREGATION_KWARGS, **kwargs))
    theories = glocalx.aggregator.theories_from_rules(rules)
    start_time = time.perf_counter()
    if len(theories) == 1:
        logger.info('Single input rule, skipping the merge loop...')
        dataset.schema.check_premise(rules[0].premise)
        theory = theories[0].relabel()
        dendrogram = glocalx.aggregator.Dendrogram()
        dendrogram.add_leaf(theory)
        theory = glocalx.aggregator.filter_theory(theory, config, dataset)
    else:
        theory, dendrogram = glocalx.aggregator.run(theories, dataset, config)
    elapsed_time = time.perf_counter() - start_time
    logger.info(f'Aggregation completed in {elapsed_time:.3f} s.')
    return theory, dendrogram, elapsed_time


def _save_run(theory: glocalx.rules.ExplanationTheory, dendrogram: glocalx.aggregator.Dendrogram,
    schema: glocalx.rules.FeatureSchema, /, **kwargs) -> None:
    """Log the final theory and write the output files, if requested.
    """
    logger.info(theory.describe(schema))
    if kwargs.get('out'):
        glocalx.rules.write_rules(theory, kwargs['out'], schema)
    if kwargs.get('dendrogram'):
        dendrogram.write(kwargs['dendrogram'])


#: Valid keyword arguments for the :meth:`run` method.
RUN_VALID_KWARGS = _AGGREGATION_KWARGS + ('out', 'dendrogram')

def run(rules_file: str | pathlib.Path, data_file: str | pathlib.Path,
    schema_file: str | pathlib.Path,
    **kwargs) -> tuple[glocalx.rules.ExplanationTheory, glocalx.aggregator.Dendrogram]:
    """Aggregate a set of local rules into a global explanation theory.

    Parameters
    ----------
    rules_file
        Path to the json file with the local rules.

    data_file
        Path to the csv file with the instances and the black-box labels.

    schema_file
        Path to the json file with the feature schema.

    kwargs
        All the keyword arguments to the task, see :attr:`RUN_VALID_KWARGS`
    """
    options = _process_kwargs(RUN_VALID_KWARGS, **kwargs)
    schema = glocalx.rules.read_schema(schema_file)
    rules = glocalx.rules.read_rules(rules_file, schema)
    dataset = glocalx.data.load_csv(data_file, schema)
    theory, dendrogram, _ = _aggregate(rules, dataset, **options)
    _save_run(theory, dendrogram, schema, **options)
    return theory, dendrogram


#: Valid keyword arguments for the :meth:`run_synth` method.
RUN_SYNTH_VALID_KWARGS = RUN_VALID_KWARGS + ('n_samples', 'fit_from')

def run_synth(rules_file: str | pathlib.Path, schema_file: str | pathlib.Path,
    oracle: glocalx.synthetic.Oracle,
    **kwargs) -> tuple[glocalx.rules.ExplanationTheory, glocalx.aggregator.Dendrogram]:
    """Aggregate a set of local rules on a surrogate dataset sampled from a
    Gaussian density model and labeled by the oracle.

    The density model is fitted on the instances in the ``fit_from`` csv file,
    if provided, and built out of the feature domains declared in the schema
    otherwise.

    Parameters
    ----------
    rules_file
        Path to the json file with the local rules.

    schema_file
        Path to the json file with the feature schema.

    oracle
        The oracle (command line or callable).

    kwargs
        All the keyword arguments to the task, see :attr:`RUN_SYNTH_VALID_KWARGS`
    """
    options = _process_kwargs(RUN_SYNTH_VALID_KWARGS, **kwargs)
    if oracle is None:
        raise InvalidInputError('The synthetic mode requires an oracle')
    schema = glocalx.rules.read_schema(schema_file)
    rules = glocalx.rules.read_rules(rules_file, schema)
    if options['fit_from'] is not None:
        model = glocalx.synthetic.fit(glocalx.data.load_csv(options['fit_from'], schema))
    else:
        model = glocalx.synthetic.default_model(schema)
    dataset = glocalx.synthetic.synthesize(model, options['n_samples'], oracle, schema,
        options['seed'])
    theory, dendrogram, _ = _aggregate(rules, dataset, **options)
    _save_run(theory, dendrogram, schema, **options)
    return theory, dendrogram


#: Valid keyword arguments for the :meth:`classify` method.
CLASSIFY_VALID_KWARGS = ('ref', 'out')

def classify(theory_file: str | pathlib.Path, data_file: str | pathlib.Path,
    schema_file: str | pathlib.Path, **kwargs) -> list[tuple[str, str]]:
    """Classify a set of instances with an explanation theory, explaining each
    prediction with the rule responsible for it.

    Parameters
    ----------
    theory_file
        Path to the json file with the explanation theory.

    data_file
        Path to the csv file with the instances to be classified.

    schema_file
        Path to the json file with the feature schema.

    kwargs
        All the keyword arguments to the task, see :attr:`CLASSIFY_VALID_KWARGS`

    Returns
    -------
    list[tuple[str, str]]
        The (label, explanation) pair for each instance, where the explanation
        is the description of the rule, or ``default`` for the default rule.
    """
    options = _process_kwargs(CLASSIFY_VALID_KWARGS, **kwargs)
    schema = glocalx.rules.read_schema(schema_file)
    theory = glocalx.rules.ExplanationTheory(tuple(glocalx.rules.read_rules(theory_file, schema)))
    dataset = glocalx.data.load_csv(data_file, schema)
    reference = dataset
    if options['ref'] is not None:
        reference = glocalx.data.load_csv(options['ref'], schema)
    classifier = glocalx.classifier.build(theory, reference)
    results = []
    for x in dataset.instances:
        rule = glocalx.classifier.explain(classifier, x)
        if rule is None:
            results.append((schema.class_labels[classifier.default_label], 'default'))
        else:
            results.append((schema.class_labels[rule.outcome], rule.describe(schema)))
    fidelity = glocalx.classifier.fidelity(classifier, dataset)
    logger.info(f'Done, {len(results)} instance(s) classified (fidelity {fidelity:.4f}).')
    if options['out'] is not None:
        frame = glocalx.data.instances_frame(dataset.instances, schema)
        frame['prediction'] = [label for label, _ in results]
        frame['explanation'] = [explanation for _, explanation in results]
        logger.info(f'Writing predictions to {options["out"]}...')
        frame.to_csv(options['out'], index=False)
    return results


#: Valid keyword arguments for the :meth:`evaluate` method.
EVALUATE_VALID_KWARGS = ('ref', 'baseline', 'rules', 'json')

def evaluate(theory_file: str | pathlib.Path, test_file: str | pathlib.Path,
    schema_file: str | pathlib.Path, **kwargs) -> dict[str, glocalx.harness.MetricsReport]:
    """Evaluate an explanation theory on a test dataset, optionally comparing it
    with the plain union of the local rules.

    Parameters
    ----------
    theory_file
        Path to the json file with the explanation theory.

    test_file
        Path to the csv file with the test instances.

    schema_file
        Path to the json file with the feature schema.

    kwargs
        All the keyword arguments to the task, see :attr:`EVALUATE_VALID_KWARGS`
    """
    options = _process_kwargs(EVALUATE_VALID_KWARGS, **kwargs)
    schema = glocalx.rules.read_schema(schema_file)
    theory = glocalx.rules.ExplanationTheory(tuple(glocalx.rules.read_rules(theory_file, schema)))
    test = glocalx.data.load_csv(test_file, schema)
    if options['ref'] is not None:
        reference = glocalx.data.load_csv(options['ref'], schema)
    else:
        logger.warning('No reference dataset given, scoring the rules on the test dataset.')
        reference = test
    classifier = glocalx.classifier.build(theory, reference)
    reports = {'glocalx': glocalx.harness.evaluate(classifier, test)}
    if options['baseline'] == 'uni':
        if options['rules'] is None:
            raise InvalidInputError('The uni baseline requires the local rules')
        rules = glocalx.rules.read_rules(options['rules'], schema)
        baseline = glocalx.harness.uni_baseline(rules, reference)
        reports['uni'] = glocalx.harness.evaluate(baseline, test)
    logger.info(f'Metrics on {len(test)} test instance(s):\n'
        f'{glocalx.harness.format_table(reports)}')
    if options['json'] is not None:
        _write_json({name: report.to_dict() for name, report in reports.items()}, options['json'])
    return reports


#: Valid keyword arguments for the :meth:`split` method.
SPLIT_VALID_KWARGS = ('ratios', 'seed', 'out_prefix')

def split(data_file: str | pathlib.Path, schema_file: str | pathlib.Path,
    **kwargs) -> list[pathlib.Path]:
    """Split a dataset into the black-box training, local-explanation and test parts.

    Parameters
    ----------
    data_file
        Path to the csv file with the full dataset.

    schema_file
        Path to the json file with the feature schema.

    kwargs
        All the keyword arguments to the task, see :attr:`SPLIT_VALID_KWARGS`

    Returns
    -------
    list[pathlib.Path]
        The paths to the three output files.
    """
    options = _process_kwargs(SPLIT_VALID_KWARGS, **kwargs)
    schema = glocalx.rules.read_schema(schema_file)
    dataset = glocalx.data.load_csv(data_file, schema)
    ratios = _parse_ratios(options['ratios'])
    return glocalx.data.write_split(dataset, options['out_prefix'], ratios, options['seed'])


#: Valid keyword arguments for the :meth:`subsample_run` method.
SUBSAMPLE_RUN_VALID_KWARGS = _AGGREGATION_KWARGS + ('beta', 'trials', 'test', 'json')

def subsample_run(rules_file: str | pathlib.Path, data_file: str | pathlib.Path,
    schema_file: str | pathlib.Path, **kwargs) -> dict[str, tuple[float, float]]:
    """Repeat the aggregation on random subsets of the local rules and summarize
    the metrics across the trials.

    Trial t draws its rule subset with seed ``seed + t`` and runs the
    aggregation with the same seed. The metrics are measured on the ``test``
    csv file, if provided, and on the aggregation dataset otherwise.

    Parameters
    ----------
    rules_file
        Path to the json file with the local rules.

    data_file
        Path to the csv file with the instances and the black-box labels.

    schema_file
        Path to the json file with the feature schema.

    kwargs
        All the keyword arguments to the task, see :attr:`SUBSAMPLE_RUN_VALID_KWARGS`

    Returns
    -------
    dict[str, tuple[float, float]]
        The mean and standard deviation of each metric.
    """
    options = _process_kwargs(SUBSAMPLE_RUN_VALID_KWARGS, **kwargs)
    schema = glocalx.rules.read_schema(schema_file)
    rules = glocalx.rules.read_rules(rules_file, schema)
    dataset = glocalx.data.load_csv(data_file, schema)
    test = dataset
    if options['test'] is not None:
        test = glocalx.data.load_csv(options['test'], schema)
    seed = options['seed']
    subsets = glocalx.harness.subsample_rules(rules, options['beta'], seed, options['trials'])
    reports = []
    for trial, subset in enumerate(subsets):
        logger.info(f'Running trial {trial + 1}/{len(subsets)} on {len(subset)} rule(s)...')
        theory, _, elapsed_time = _aggregate(subset, dataset, **dict(options, seed=seed + trial))
        classifier = glocalx.classifier.build(theory, dataset)
        reports.append(glocalx.harness.evaluate(classifier, test, elapsed_time))
    summary = glocalx.harness.summarize(reports)
    table = pd.DataFrame(summary, index=['mean', 'std']).T
    logger.info(f'Summary over {len(reports)} trial(s) (beta = {options["beta"]}):\n{table}')
    if options['json'] is not None:
        _write_json(dict(beta=options['beta'], trials=[report.to_dict() for report in reports],
            summary={key: list(value) for key, value in summary.items()}), options['json'])
    return summary
