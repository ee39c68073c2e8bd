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

"""Explanation theories as transparent classifiers.

Each rule is scored by its fidelity on a reference dataset. An instance is
classified with the outcome of the highest-scoring rule covering it (ties to the
lower rule id), and with the majority label of the reference dataset when no rule
covers it.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from glocalx.coverage import masked_fidelity, rule_mask
from glocalx.errors import InvalidInputError
from glocalx.rules import Dataset, ExplanationTheory, Rule, satisfies
from glocalx.utils import natural_key


@dataclasses.dataclass(frozen=True)
class TheoryClassifier:

    """Rule-based classifier built on top of an explanation theory.

    Parameters
    ----------
    theory
        The explanation theory.

    scores
        The score of each rule (i.e., its fidelity on the reference dataset),
        indexed by rule id.

    default_label
        The label assigned to the instances that are not covered by any rule.
    """

    theory: ExplanationTheory
    scores: dict[str, float]
    default_label: int
    ranking: tuple[Rule, ...] = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        missing = [rule.id for rule in self.theory if rule.id not in self.scores]
        if missing:
            raise InvalidInputError(f'Missing scores for rule(s) {missing}')
        if self.default_label not in (0, 1):
            raise InvalidInputError(f'Invalid default label {self.default_label}')
        ranking = sorted(self.theory,
            key=lambda rule: (-self.scores[rule.id], natural_key(rule.id)))
        object.__setattr__(self, 'ranking', tuple(ranking))

    def __len__(self) -> int:
        """Return the number of rules.
        """
        return len(self.theory)



def build(theory: ExplanationTheory, reference: Dataset) -> TheoryClassifier:
    """Build a classifier out of an explanation theory.

    Parameters
    ----------
    theory
        The explanation theory.

    reference
        The reference dataset, used to score the rules (against the black-box
        labels) and to calculate the default majority label (ties to 0).

    Returns
    -------
    TheoryClassifier
        The classifier.
    """
    if len(reference) == 0:
        raise InvalidInputError('Cannot build a classifier on an empty reference dataset')
    labels = reference.oracle_labels
    scores = {}
    for rule in theory:
        reference.schema.check_premise(rule.premise)
        mask = rule_mask(rule, reference.instances)
        scores[rule.id] = masked_fidelity(mask, rule.outcome, labels)
    num_positive = np.count_nonzero(labels == 1)
    default_label = int(num_positive > len(labels) - num_positive)
    return TheoryClassifier(theory, scores, default_label)


def explain(classifier: TheoryClassifier, x: np.ndarray) -> Rule | None:
    """Return the rule responsible for the classification of a given instance
    (None if the instance is classified by the default rule).
    """
    for rule in classifier.ranking:
        if satisfies(x, rule.premise):
            return rule
    return None


def predict(classifier: TheoryClassifier, x: np.ndarray) -> int:
    """Classify a single instance.
    """
    rule = explain(classifier, x)
    if rule is None:
        return classifier.default_label
    return rule.outcome


def predict_many(classifier: TheoryClassifier, instances: np.ndarray) -> np.ndarray:
    """Vectorized version of :meth:`predict`.

    Parameters
    ----------
    classifier
        The classifier.

    instances
        The n x m instance matrix.

    Returns
    -------
    np.ndarray
        The length-n vector of predicted labels.
    """
    instances = np.asarray(instances, dtype=float)
    predictions = np.full(len(instances), classifier.default_label, dtype=int)
    if len(classifier.ranking) == 0:
        return predictions
    masks = np.array([rule_mask(rule, instances) for rule in classifier.ranking])
    outcomes = np.array([rule.outcome for rule in classifier.ranking])
    # argmax returns the first covering rule in ranking order.
    first = masks.argmax(axis=0)
    covered = masks.any(axis=0)
    predictions[covered] = outcomes[first[covered]]
    return predictions


def _agreement(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of matching labels (zero for empty inputs).
    """
    if len(labels) == 0:
        return 0.
    return float(np.count_nonzero(predictions == labels) / len(labels))


def fidelity(classifier: TheoryClassifier, dataset: Dataset) -> float:
    """Return the fraction of instances where the classifier agrees with the
    black box.
    """
    return _agreement(predict_many(classifier, dataset.instances), dataset.oracle_labels)


def accuracy(classifier: TheoryClassifier, dataset: Dataset) -> float:
    """Return the fraction of instances where the classifier agrees with the
    ground truth.
    """
    if not dataset.has_truth():
        raise InvalidInputError('Cannot calculate the accuracy without ground-truth labels')
    return _agreement(predict_many(classifier, dataset.instances), dataset.truth_labels)
