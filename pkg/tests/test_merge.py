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

import numpy as np
import pytest

from glocalx import GLOCALX_TEST_DATA, logger
from glocalx.coverage import rule_coverage
from glocalx.errors import ContractViolation, InvalidInputError
from glocalx.merge import ConflictPartition, cut, join, merge
from glocalx.rules import CategorySet, Dataset, ExplanationTheory, Interval, Premise, Rule, \
    normalize, read_rules, read_schema


AGE, JOB, AMOUNT = 0, 1, 2
UNEMPLOYED, CLERK, MANAGER = 0, 1, 2
ACCEPT, DENY = 0, 1


def _schema():
    """Return the loan schema.
    """
    return read_schema(GLOCALX_TEST_DATA / 'loan_schema.json')


def test_join_golden():
    """Joining {age >= 50, job = office clerk} -> deny with {age >= 40} -> deny
    should yield exactly {age >= 40} -> deny.
    """
    first = Rule(Premise({AGE: Interval.at_least(50), JOB: CategorySet({CLERK})}), DENY, '1')
    second = Rule(Premise({AGE: Interval.at_least(40)}), DENY, '2')
    rule = join([first, second], _schema())
    assert rule == Rule(Premise({AGE: Interval.at_least(40)}), DENY, '1')
    assert rule.describe(_schema()) == '{age >= 40} -> deny'


def test_join():
    """Test the join operator on simple cases.
    """
    rule = Rule(Premise({AGE: Interval.at_least(50), JOB: CategorySet({CLERK})}), DENY, '1')
    assert join([rule, rule.with_id('2')]).same_logic(rule)
    assert join([rule]).same_logic(rule)
    first = Rule(Premise({AGE: Interval.half_open(10, 20)}), ACCEPT, '1')
    second = Rule(Premise({AGE: Interval.half_open(30, 40)}), ACCEPT, '2')
    assert join([first, second]).premise.get(AGE) == Interval.half_open(10, 40)
    first = Rule(Premise({JOB: CategorySet({CLERK})}), ACCEPT, '1')
    second = Rule(Premise({JOB: CategorySet({MANAGER})}), ACCEPT, '2')
    assert join([first, second]).premise.get(JOB) == CategorySet({CLERK, MANAGER})
    # Joining all the categories yields a vacuous constraint, given the schema.
    third = Rule(Premise({JOB: CategorySet({UNEMPLOYED})}), ACCEPT, '3')
    assert join([first, second, third], _schema()).premise == Premise()
    # The smallest id is kept.
    assert join([second.with_id('10'), first.with_id('9')]).id == '9'


def test_join_errors():
    """Test the join contract.
    """
    with pytest.raises(ContractViolation) as info:
        join([])
    logger.info(info)
    with pytest.raises(ContractViolation) as info:
        join([Rule(Premise(), DENY, '1'), Rule(Premise(), ACCEPT, '2')])
    logger.info(info)


def test_cut_golden():
    """Cut of {age >= 20, job = manager, amount > 8000} -> accept against
    {age >= 25, job = unemployed, amount >= 10000} -> deny.
    """
    dominant = Rule(Premise({AGE: Interval.at_least(25), JOB: CategorySet({UNEMPLOYED}),
        AMOUNT: Interval.at_least(10000)}), DENY, '1')
    lesser = Rule(Premise({AGE: Interval.at_least(20), JOB: CategorySet({MANAGER}),
        AMOUNT: Interval.greater_than(8000)}), ACCEPT, '2')
    rules = cut(dominant, lesser, _schema())
    assert len(rules) == 2
    assert rules[0] is dominant
    expected = Premise({AGE: Interval.half_open(20, 25), JOB: CategorySet({MANAGER}),
        AMOUNT: Interval(8000, 10000, False, False)})
    assert rules[1] == Rule(expected, ACCEPT, '2')
    assert rules[1].describe(_schema()) == \
        '{age in [20, 25), job = manager, amount in (8000, 10000)} -> accept'


def test_cut():
    """Test the cut operator on simple cases.
    """
    dominant = Rule(Premise({AGE: Interval.at_least(25)}), DENY, '1')
    lesser = Rule(Premise({AMOUNT: Interval.at_least(1000)}), ACCEPT, '2')
    assert cut(dominant, lesser) == [dominant, lesser]
    dominant = Rule(Premise({AGE: Interval.half_open(4, 6)}), DENY, '1')
    lesser = Rule(Premise({AGE: Interval.half_open(0, 10), JOB: CategorySet({CLERK})}),
        ACCEPT, '2')
    rules = cut(dominant, lesser)
    assert rules[0] is dominant
    assert [rule.premise.get(AGE) for rule in rules[1:]] == \
        [Interval.half_open(0, 4), Interval.half_open(6, 10)]
    assert [rule.premise.get(JOB) for rule in rules[1:]] == [CategorySet({CLERK})] * 2
    assert [rule.id for rule in rules[1:]] == ['2/0', '2/1']
    # Full overlap: nothing left of the lesser rule.
    assert cut(lesser, dominant) == [lesser]
    # The cut is not symmetric.
    assert cut(dominant, lesser) != cut(lesser, dominant)


def test_cut_errors():
    """Test the cut contract.
    """
    rule = Rule(Premise({AGE: Interval.at_least(25)}), DENY, '1')
    with pytest.raises(ContractViolation) as info:
        cut(rule, rule.with_id('1'))
    logger.info(info)
    with pytest.raises(ContractViolation) as info:
        cut(rule, rule.with_id('2'))
    logger.info(info)


def test_conflict_partition():
    """Test the partition of the covering rules.
    """
    first = Rule(Premise(), DENY, '1')
    second = Rule(Premise(), DENY, '2')
    third = Rule(Premise(), ACCEPT, '3')
    partition = ConflictPartition.from_rules([first, second])
    assert partition.non_conflicting == [first, second] and partition.conflicting == []
    partition = ConflictPartition.from_rules([first, second, third])
    assert partition.non_conflicting == [] and partition.conflicting == [first, second, third]


def _loan_theories():
    """Return the two theories of the loan example.
    """
    rules = read_rules(GLOCALX_TEST_DATA / 'loan_rules.json', _schema())
    return ExplanationTheory(tuple(rules[:2]), '1'), ExplanationTheory(tuple(rules[2:]), '2')


def test_merge_golden():
    """Merge of the two loan theories.

    The deny rules on office clerks get generalized (the amount constraint is
    dropped and the age constraint relaxed to age >= 40), while the other two
    rules, which never cover the same instance, survive unchanged.
    """
    schema = _schema()
    first, second = _loan_theories()
    instances = [[55., CLERK, 6000.], [30., UNEMPLOYED, 9000.], [22., MANAGER, 9000.]]
    batch = Dataset(schema, instances, [DENY, DENY, ACCEPT])
    merged = merge(first, second, batch, '3')
    assert merged.id == '3'
    assert [rule.id for rule in merged] == ['3.0', '3.1', '3.2']
    for rule in merged:
        logger.info(rule.describe(schema))
    assert len(merged) == 3
    assert any(rule.same_logic(first.rules[0]) for rule in merged)
    assert any(rule.same_logic(second.rules[0]) for rule in merged)
    generalized = [rule for rule in merged if rule.premise.get(AGE) == Interval.at_least(40)]
    assert len(generalized) == 1
    assert generalized[0].outcome == DENY
    assert generalized[0].premise.get(AMOUNT) is None
    # The published form of this loan example reads {age >= 40} -> deny, which
    # is inconsistent with its own join rule: both operands constrain job to
    # office clerk, so the constraint is generalized (to itself), not dropped.
    assert generalized[0].describe(schema) == '{age >= 40, job = office clerk} -> deny'


def test_merge_conflict():
    """Conflicting rules covering the same instance get cut against the one
    with the highest fidelity on the batch.
    """
    schema = _schema()
    dominant = Rule(Premise({AGE: Interval.at_least(25)}), DENY, '1')
    lesser = Rule(Premise({AGE: Interval.at_least(20)}), ACCEPT, '1')
    instances = [[30., CLERK, 1000.], [40., CLERK, 1000.], [22., CLERK, 1000.]]
    batch = Dataset(schema, instances, [DENY, DENY, ACCEPT])
    merged = merge(ExplanationTheory((dominant, ), 'a'), ExplanationTheory((lesser, ), 'b'),
        batch)
    assert merged.id == 'a+b'
    assert len(merged) == 2
    assert any(rule.same_logic(dominant) for rule in merged)
    residual = [rule for rule in merged if rule.outcome == ACCEPT][0]
    assert residual.premise.get(AGE) == Interval.half_open(20, 25)
    # No instance is covered by both rules any more.
    masks = [rule_coverage(rule, batch) for rule in merged]
    assert np.intersect1d(*masks).size == 0


def test_merge_conflict_groups():
    """On a conflicting instance the rules sharing an outcome are joined first,
    and the joined rule takes part in the cut as a whole.
    """
    schema = _schema()
    first = Rule(Premise({AGE: Interval.at_least(25)}), DENY, '1')
    second = Rule(Premise({AGE: Interval.at_least(28)}), DENY, '1')
    third = Rule(Premise({AGE: Interval.at_least(20)}), ACCEPT, '2')
    batch = Dataset(schema, [[30., CLERK, 1000.], [22., CLERK, 1000.]], [DENY, ACCEPT])
    merged = merge(ExplanationTheory((first, ), 'a'), ExplanationTheory((second, third), 'b'),
        batch)
    assert len(merged) == 2
    assert any(rule.same_logic(first) for rule in merged)
    residual = [rule for rule in merged if rule.outcome == ACCEPT][0]
    assert residual.premise.get(AGE) == Interval.half_open(20, 25)


def test_merge_identity():
    """Merging a single-rule theory with a clone of itself yields an equivalent theory.
    """
    schema = _schema()
    rule = Rule(Premise({AGE: Interval.at_least(40)}), DENY, '1')
    batch = Dataset(schema, [[50., CLERK, 1000.], [20., CLERK, 1000.]], [DENY, ACCEPT])
    merged = merge(ExplanationTheory((rule, ), 'a'), ExplanationTheory((rule, ), 'b'), batch)
    assert len(merged) == 1
    assert merged.rules[0].same_logic(rule)


def test_merge_determinism():
    """Identical inputs should yield identical outputs.
    """
    schema = _schema()
    first, second = _loan_theories()
    rng = np.random.default_rng(2)
    instances = np.column_stack([rng.uniform(18., 70., 32), rng.integers(0, 3, 32),
        rng.uniform(0., 20000., 32)])
    batch = Dataset(schema, instances, rng.integers(0, 2, 32))
    assert merge(first, second, batch) == merge(first, second, batch)


def test_merge_errors():
    """Test the merge preconditions.
    """
    schema = _schema()
    first, second = _loan_theories()
    with pytest.raises(InvalidInputError) as info:
        merge(first, second, Dataset(schema, np.empty((0, 3)), []))
    logger.info(info)
    batch = Dataset(schema, [[50., CLERK, 1000.]], [DENY])
    with pytest.raises(InvalidInputError) as info:
        merge(first, ExplanationTheory(), batch)
    logger.info(info)


def test_normalized_outputs():
    """Every rule coming out of a merge is in normal form.
    """
    schema = _schema()
    first, second = _loan_theories()
    batch = Dataset(schema, [[55., CLERK, 6000.], [26., UNEMPLOYED, 9500.]], [DENY, DENY])
    for rule in merge(first, second, batch):
        assert normalize(rule.premise, schema) == rule.premise
