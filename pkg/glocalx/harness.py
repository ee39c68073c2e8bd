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

"""Evaluation facilities: metrics, baseline and rule subsampling.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from glocalx.classifier import TheoryClassifier, accuracy, build, fidelity
from glocalx.errors import InvalidInputError
from glocalx.rules import Dataset, ExplanationTheory, Rule


@dataclasses.dataclass(frozen=True)
class MetricsReport:

    """Summary of the performance of an explanation theory on a test dataset.

    The accuracy and the difference between fidelity and accuracy are only
    available when the test dataset carries the ground-truth labels.
    """

    fidelity: float
    size: int
    length_mean: float
    length_std: float
    accuracy: float = None
    delta_acc: float = None
    runtime_seconds: float = 0.

    def to_dict(self) -> dict:
        """Return the report as a dictionary.
        """
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        """Return the report as a json string.
        """
        return json.dumps(self.to_dict(), indent=2)



def _format_value(value) -> str:
    """Format a single table cell.
    """
    if value is None:
        return '-'
    if isinstance(value, int):
        return f'{value}'
    return f'{value:.4f}'


def format_table(reports: Mapping[str, MetricsReport]) -> str:
    """Render one or more reports as a text table, one column per report.
    """
    fields = [field.name for field in dataclasses.fields(MetricsReport)]
    table = pd.DataFrame({name: {key: _format_value(value) for key, value in \
        report.to_dict().items()} for name, report in reports.items()}, index=fields)
    return table.rename_axis('metric').reset_index().to_string(index=False)


def evaluate(classifier: TheoryClassifier, dataset: Dataset,
    runtime_seconds: float = 0.) -> MetricsReport:
    """Evaluate a classifier on a test dataset.

    Parameters
    ----------
    classifier
        The classifier.

    dataset
        The test dataset.

    runtime_seconds
        The time it took to build the theory, to be attached to the report.

    Returns
    -------
    MetricsReport
        The metrics report.
    """
    theory = classifier.theory
    lengths = [rule.length for rule in theory]
    length_mean = float(np.mean(lengths)) if lengths else 0.
    length_std = float(np.std(lengths)) if lengths else 0.
    fidelity_ = fidelity(classifier, dataset)
    accuracy_ = delta_acc = None
    if dataset.has_truth():
        accuracy_ = accuracy(classifier, dataset)
        delta_acc = fidelity_ - accuracy_
    return MetricsReport(fidelity_, len(theory), length_mean, length_std, accuracy_,
        delta_acc, float(runtime_seconds))


def uni_baseline(rules: Sequence[Rule], reference: Dataset) -> TheoryClassifier:
    """Build the baseline classifier out of the plain union of the input rules.
    """
    if len(rules) == 0:
        raise InvalidInputError('Cannot build the baseline out of an empty rule list')
    return build(ExplanationTheory(tuple(rules), 'uni'), reference)


def subsample_rules(rules: Sequence[Rule], beta: float, seed: int = 0,
    trials: int = 10) -> list[list[Rule]]:
    """Draw independent random subsets of a list of rules.

    Trial t uses its own random number generator seeded with ``seed + t``, so
    that the trials can be reproduced (and run) independently.

    Parameters
    ----------
    rules
        The rules.

    beta
        The fraction of rules in each subset (the subset size is rounded up).

    seed
        The base seed.

    trials
        The number of subsets.

    Returns
    -------
    list[list[Rule]]
        The subsets, each in the original rule order.
    """
    if not 0. < beta <= 1.:
        raise InvalidInputError(f'Invalid subsampling fraction {beta}')
    if trials < 1:
        raise InvalidInputError(f'Invalid number of trials {trials}')
    # Rounding guards against things like 0.6 * 10 = 6.000000000000001.
    size = math.ceil(round(beta * len(rules), 9))
    subsets = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        indices = np.sort(rng.choice(len(rules), size=size, replace=False))
        subsets.append([rules[i] for i in indices])
    return subsets


def summarize(reports: Sequence[MetricsReport]) -> dict[str, tuple[float, float]]:
    """Return the mean and the (population) standard deviation of each metric
    across a list of reports, skipping the metrics that are not available.
    """
    summary = {}
    for field in dataclasses.fields(MetricsReport):
        values = [getattr(report, field.name) for report in reports]
        if len(values) == 0 or any(value is None for value in values):
            continue
        summary[field.name] = (float(np.mean(values)), float(np.std(values)))
    return summary
