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

"""Coverage and per-rule fidelity.

Coverage sets are returned as sorted numpy arrays of row indices. Internally
everything is done with boolean masks over the rows of the instance matrix,
which is what the rest of the package uses when speed matters.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from glocalx.errors import InvalidInputError
from glocalx.rules import Dataset, ExplanationTheory, Premise, Rule, satisfies


#: A coverage set is a sorted, duplicate-free array of row indices.
CoverageSet = np.ndarray


def premise_mask(premise: Premise, instances: np.ndarray) -> np.ndarray:
    """Return the boolean mask of the rows of an instance matrix satisfying
    a premise.

    Parameters
    ----------
    premise
        The premise.

    instances
        The n x m instance matrix.

    Returns
    -------
    np.ndarray
        The length-n boolean mask.
    """
    mask = np.ones(len(instances), dtype=bool)
    for feature, subspace in premise:
        if not 0 <= feature < instances.shape[1]:
            raise InvalidInputError(f'Feature index {feature} out of range for instances '
                f'with {instances.shape[1]} feature(s)')
        mask &= subspace.mask(instances[:, feature])
    return mask


def rule_mask(rule: Rule, instances: np.ndarray) -> np.ndarray:
    """Return the boolean mask of the rows covered by a rule.
    """
    return premise_mask(rule.premise, instances)


def theory_mask(theory: ExplanationTheory, instances: np.ndarray) -> np.ndarray:
    """Return the boolean mask of the rows covered by at least one rule of a theory.
    """
    mask = np.zeros(len(instances), dtype=bool)
    for rule in theory:
        mask |= rule_mask(rule, instances)
    return mask


def rule_coverage(rule: Rule, dataset: Dataset) -> CoverageSet:
    """Return the indices of the rows of a dataset satisfying the premise of a rule.
    """
    dataset.schema.check_premise(rule.premise)
    return np.flatnonzero(rule_mask(rule, dataset.instances))


def theory_coverage(theory: ExplanationTheory, dataset: Dataset) -> CoverageSet:
    """Return the indices of the rows of a dataset covered by at least one rule
    of a theory (the empty set for an empty theory).
    """
    for rule in theory:
        dataset.schema.check_premise(rule.premise)
    return np.flatnonzero(theory_mask(theory, dataset.instances))


def covered(x: np.ndarray, theory: ExplanationTheory | Iterable[Rule]) -> list[Rule]:
    """Return the rules of a theory covering a given instance, in the theory order.
    """
    return [rule for rule in theory if satisfies(x, rule.premise)]


def masked_fidelity(mask: np.ndarray, outcome: int, labels: np.ndarray) -> float:
    """Return the fraction of the rows selected by a mask whose label matches
    a given outcome (zero for an empty mask).
    """
    num_covered = np.count_nonzero(mask)
    if num_covered == 0:
        return 0.
    return float(np.count_nonzero(labels[mask] == outcome) / num_covered)


def rule_fidelity(rule: Rule, dataset: Dataset) -> float:
    """Return the fidelity of a rule on a dataset, i.e., the fraction of the covered
    rows whose black-box label matches the rule outcome.

    Rules covering nothing have zero fidelity, so that they lose every comparison.
    """
    dataset.schema.check_premise(rule.premise)
    return masked_fidelity(rule_mask(rule, dataset.instances), rule.outcome,
        dataset.oracle_labels)
