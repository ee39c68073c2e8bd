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

"""Similarity between theories and the BIC merge criterion.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from glocalx import config, logger
from glocalx.classifier import build, fidelity
from glocalx.coverage import theory_mask
from glocalx.errors import InvalidInputError
from glocalx.rules import Dataset, ExplanationTheory


def jaccard(mask: np.ndarray, other: np.ndarray) -> float:
    """Return the Jaccard index of two boolean coverage masks (zero when both
    masks are empty).
    """
    union = np.count_nonzero(mask | other)
    if union == 0:
        return 0.
    return float(np.count_nonzero(mask & other) / union)


def similarity(theory: ExplanationTheory, other: ExplanationTheory, dataset: Dataset) -> float:
    """Return the similarity of two theories, i.e., the Jaccard index of their
    coverage sets on a dataset.
    """
    if len(dataset) == 0:
        raise InvalidInputError('Cannot calculate the similarity on an empty dataset')
    for rule in theory.rules + other.rules:
        dataset.schema.check_premise(rule.premise)
    return jaccard(theory_mask(theory, dataset.instances),
        theory_mask(other, dataset.instances))


@dataclasses.dataclass(frozen=True)
class BicScore:

    """Small container for the Bayesian information criterion of a theory.

    The complexity term is the average rule length weighted by the log of the
    number of instances, while the log-likelihood is approximated by the
    fidelity of the theory, so that

    value = ln(n) * mean_length - 2 * n * ln(max(fidelity, epsilon))

    Lower values are better.
    """

    value: float
    fidelity_term: float
    complexity_term: float
    n: int

    @classmethod
    def calculate(cls, n: int, mean_length: float, fidelity_: float,
        epsilon: float = None) -> BicScore:
        """Calculate the score from its basic ingredients.

        Parameters
        ----------
        n
            The number of instances.

        mean_length
            The average number of premises per rule.

        fidelity_
            The fidelity of the theory on the instances.

        epsilon
            The floor for the fidelity inside the logarithm (defaults to the
            ``bic.epsilon`` configuration value).
        """
        if n <= 0:
            raise InvalidInputError(f'Cannot calculate the BIC on {n} instance(s)')
        if epsilon is None:
            epsilon = config.get('bic.epsilon')
        complexity_term = float(np.log(n) * mean_length)
        fidelity_term = float(2. * n * np.log(max(fidelity_, epsilon)))
        return cls(complexity_term - fidelity_term, fidelity_term, complexity_term, n)



def bic(theory: ExplanationTheory, dataset: Dataset) -> BicScore:
    """Return the BIC score of a theory on a dataset.

    The fidelity entering the likelihood term is that of the theory used as a
    classifier built on the very same dataset.
    """
    if len(dataset) == 0:
        raise InvalidInputError('Cannot calculate the BIC on an empty dataset')
    classifier = build(theory, dataset)
    return BicScore.calculate(len(dataset), theory.mean_length(), fidelity(classifier, dataset))


def accept_merge(merged: ExplanationTheory, union_theory: ExplanationTheory,
    dataset: Dataset) -> bool:
    """Return True if the merged theory scores no worse than the plain union of
    its parents.
    """
    score = bic(merged, dataset)
    reference = bic(union_theory, dataset)
    logger.debug(f'BIC {score.value:.3f} (merged) vs. {reference.value:.3f} (union)')
    return score.value <= reference.value
