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

"""Join and cut operators, and the merge of two explanation theories.

The two operators move in opposite directions: the join generalizes a set of
rules sharing the same outcome by relaxing their premises, while the cut
specializes the lesser of two conflicting rules by slicing away the part of its
quasi-polyhedron overlapping with the dominant one.

The merge of two theories walks through a batch of instances and, for each
instance covered by two or more rules, joins the covering rules sharing the same
outcome and, on conflicting instances, cuts the joined rules against the one with
the highest fidelity on the batch.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
from typing import Iterable

from glocalx import logger
from glocalx.coverage import masked_fidelity, rule_mask
from glocalx.errors import ContractViolation, InvalidInputError, UnsatisfiablePremise
from glocalx.rules import Dataset, ExplanationTheory, FeatureSchema, Interval, Premise, \
    Rule, normalize
from glocalx.utils import natural_key


@dataclasses.dataclass
class ConflictPartition:

    """Partition of the rules covering a given instance.

    The rules are non-conflicting when they all share the same outcome, and
    conflicting otherwise.
    """

    non_conflicting: list[Rule]
    conflicting: list[Rule]

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> ConflictPartition:
        """Partition a collection of rules covering the same instance.
        """
        rules = list(rules)
        if len({rule.outcome for rule in rules}) <= 1:
            return cls(rules, [])
        return cls([], rules)



def _join_premises(premise: Premise, other: Premise) -> Premise:
    """Join two normalized premises.

    Features constrained by both operands are generalized (interval hull or
    category-set union), while features constrained by only one of the
    operands are dropped.
    """
    constraints = []
    for feature in sorted(set(premise.features()) & set(other.features())):
        subspace, other_subspace = premise.get(feature), other.get(feature)
        if type(subspace) is not type(other_subspace):
            raise ContractViolation(f'Cannot join {subspace} and {other_subspace}')
        if isinstance(subspace, Interval):
            constraints.append((feature, subspace.hull(other_subspace)))
        else:
            constraints.append((feature, subspace.union(other_subspace)))
    return Premise(tuple(constraints))


def join(rules: Iterable[Rule], schema: FeatureSchema = None) -> Rule:
    """Generalize a non-empty set of rules sharing the same outcome into a
    single rule.

    The operands are folded pairwise in ascending id order, and the result
    inherits the smallest id.

    Parameters
    ----------
    rules
        The rules to be joined.

    schema
        The optional feature schema, used to normalize the output premise.

    Returns
    -------
    Rule
        The joined rule.
    """
    rules = sorted(rules, key=lambda rule: natural_key(rule.id))
    if len(rules) == 0:
        raise ContractViolation('Cannot join an empty set of rules')
    outcomes = {rule.outcome for rule in rules}
    if len(outcomes) > 1:
        raise ContractViolation(f'Cannot join rules with different outcomes {outcomes}')
    premises = [normalize(rule.premise, schema) for rule in rules]
    premise = normalize(functools.reduce(_join_premises, premises), schema)
    return Rule(premise, rules[0].outcome, rules[0].id)


def cut(dominant: Rule, lesser: Rule, schema: FeatureSchema = None) -> list[Rule]:
    """Slice away from the lesser rule the part overlapping the dominant one.

    For every feature constrained by both rules the constraint of the lesser
    rule is replaced by its set difference with that of the dominant rule. An
    interval difference yielding two disjoint pieces splits the residual into
    one rule per piece, and if any of the differences is empty the residual is
    discarded altogether. Features constrained by the lesser rule only are
    left unchanged.

    Parameters
    ----------
    dominant
        The dominant rule, which is returned unchanged.

    lesser
        The lesser rule, with the opposite outcome.

    schema
        The optional feature schema, used to normalize the residual premises.

    Returns
    -------
    list[Rule]
        The dominant rule followed by the residual lesser rules.
    """
    if dominant.id == lesser.id:
        raise ContractViolation(f'Cannot cut rule {dominant.id} with itself')
    if dominant.outcome == lesser.outcome:
        raise ContractViolation(f'Cannot cut rules {dominant.id} and {lesser.id} '
            'with the same outcome')
    dominant_premise = normalize(dominant.premise, schema)
    lesser_premise = normalize(lesser.premise, schema)
    shared = sorted(set(dominant_premise.features()) & set(lesser_premise.features()))
    if len(shared) == 0:
        return [dominant, lesser]
    pieces = []
    for feature in shared:
        subspace = lesser_premise.get(feature)
        other = dominant_premise.get(feature)
        if type(subspace) is not type(other):
            raise ContractViolation(f'Cannot cut {subspace} with {other}')
        difference = subspace.difference(other)
        if len(difference) == 0:
            return [dominant]
        pieces.append(difference)
    combinations = list(itertools.product(*pieces))
    residuals = []
    for i, combination in enumerate(combinations):
        constraints = lesser_premise.as_dict()
        constraints.update(zip(shared, combination))
        try:
            premise = normalize(Premise(constraints), schema)
        except UnsatisfiablePremise:
            continue
        rule_id = lesser.id if len(combinations) == 1 else f'{lesser.id}/{i}'
        residuals.append(Rule(premise, lesser.outcome, rule_id))
    return [dominant] + residuals


class _WorkingSet:

    """Small container for the rules being merged.

    Each rule is stored under a unique integer key (which doubles as its id,
    to break ties deterministically), along with its coverage mask and its
    fidelity on the batch.
    """

    def __init__(self, batch: Dataset) -> None:
        """Constructor.
        """
        self.batch = batch
        self.rules = {}
        self.masks = {}
        self.fidelities = {}
        self._next_key = 0

    def add(self, rule: Rule) -> int:
        """Add a rule to the working set under a fresh key, and return the key.
        """
        key = self._next_key
        self._next_key += 1
        mask = rule_mask(rule, self.batch.instances)
        self.rules[key] = rule.with_id(key)
        self.masks[key] = mask
        self.fidelities[key] = masked_fidelity(mask, rule.outcome, self.batch.oracle_labels)
        return key

    def remove(self, key: int) -> Rule:
        """Remove a rule from the working set, keeping its cached mask and fidelity.
        """
        return self.rules.pop(key)

    def replace_with_join(self, keys: list[int]) -> int:
        """Replace a group of rules sharing the same outcome with their join,
        and return the key of the joined rule.
        """
        rules = [self.remove(key) for key in keys]
        return self.add(join(rules, self.batch.schema))

    def covering(self, row: int) -> list[int]:
        """Return the keys of the rules covering a given row of the batch.
        """
        return [key for key in self.rules if self.masks[key][row]]

    def dominance_key(self, key: int) -> tuple:
        """Sorting key placing the highest-fidelity rules first (ties to the lower id).
        """
        return (-self.fidelities[key], key)



def merge(theory: ExplanationTheory, other: ExplanationTheory, batch: Dataset,
    theory_id: str = None) -> ExplanationTheory:
    """Merge two explanation theories on a batch of instances.

    We start from the union of the two theories and loop over the instances in
    the batch. For each instance covered by at least two rules of the working
    set, the covering rules are grouped by outcome and each group is replaced
    by its join. If more than one group is left, the joined rule with the
    highest fidelity on the batch (ties to the lower id) is kept as is, and the
    others are replaced by the residuals of the cut. Later instances operate
    on the updated working set.

    Parameters
    ----------
    theory
        The first theory.

    other
        The second theory.

    batch
        The batch of instances driving the merge.

    theory_id
        The id of the output theory (defaults to ``<id>+<other id>``).

    Returns
    -------
    ExplanationTheory
        The merged theory, with fresh rule ids of the form ``<theory_id>.<k>``.
    """
    if len(batch) == 0:
        raise InvalidInputError('Cannot merge theories on an empty batch')
    if len(theory) == 0 or len(other) == 0:
        raise InvalidInputError('Cannot merge empty theories')
    schema = batch.schema
    theory_id = f'{theory.id}+{other.id}' if theory_id is None else str(theory_id)
    working = _WorkingSet(batch)
    for rule in theory.sorted_rules() + other.sorted_rules():
        schema.check_premise(rule.premise)
        working.add(rule)
    num_joins = num_cuts = 0
    for row in range(len(batch)):
        keys = working.covering(row)
        if len(keys) < 2:
            continue
        partition = ConflictPartition.from_rules(working.rules[key] for key in keys)
        if partition.non_conflicting:
            working.replace_with_join(keys)
            num_joins += 1
            continue
        groups = {}
        for key in keys:
            groups.setdefault(working.rules[key].outcome, []).append(key)
        keys = []
        for outcome in sorted(groups):
            if len(groups[outcome]) > 1:
                keys.append(working.replace_with_join(groups[outcome]))
                num_joins += 1
            else:
                keys.append(groups[outcome][0])
        keys.sort(key=working.dominance_key)
        dominant = working.rules[keys[0]]
        for key in keys[1:]:
            lesser = working.rules[key]
            residuals = cut(dominant, lesser, schema)[1:]
            # Nothing to slice when the two rules share no constrained feature.
            if residuals == [lesser]:
                continue
            working.remove(key)
            for residual in residuals:
                working.add(residual)
            num_cuts += 1
    logger.debug(f'Merged theories {theory.id} and {other.id} on {len(batch)} instance(s) '
        f'with {num_joins} join(s) and {num_cuts} cut(s).')
    rules = [rule.with_id(f'{theory_id}.{i}') for i, rule in enumerate(working.rules.values())]
    return ExplanationTheory(tuple(rules), theory_id)
