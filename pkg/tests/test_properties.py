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

"""Randomized property checks for the rule algebra and the aggregation primitives.
"""

import math

import numpy as np

from glocalx.aggregator import filter_alpha, nearest_rank_percentile
from glocalx.coverage import rule_mask
from glocalx.merge import cut, join, merge
from glocalx.rules import CategorySet, Dataset, ExplanationTheory, Feature, FeatureSchema, \
    Interval, Premise, Rule, normalize, satisfies
from glocalx.scoring import similarity


NUM_FIXTURES = 1000
NUM_CATEGORIES = 4
SCHEMA = FeatureSchema((
    Feature('x0', 'continuous'),
    Feature('x1', 'continuous'),
    Feature('c0', 'categorical', tuple('abcd')),
    Feature('x2', 'continuous'),
    Feature('c1', 'categorical', tuple('abcd')),
    Feature('x3', 'continuous')
    ), ('no', 'yes'))


def _random_subspace(rng, feature):
    """Random non-vacuous constraint on a grid of integer endpoints, so that
    the instances hit the interval boundaries every now and then.
    """
    if feature.is_categorical():
        size = rng.integers(1, NUM_CATEGORIES)
        return CategorySet(rng.choice(NUM_CATEGORIES, size, replace=False))
    lo, hi = sorted(rng.choice(11, 2, replace=False))
    lo_closed, hi_closed = (bool(flag) for flag in rng.integers(0, 2, 2))
    kind = rng.integers(0, 3)
    if kind == 1:
        hi, hi_closed = math.inf, False
    elif kind == 2:
        lo, lo_closed = -math.inf, False
    return Interval(lo, hi, lo_closed, hi_closed)


def _random_rule(rng, outcome=None, rule_id='0', min_length=0):
    """Random rule over the test schema.
    """
    length = rng.integers(min_length, SCHEMA.num_features + 1)
    features = rng.choice(SCHEMA.num_features, length, replace=False)
    premise = Premise({int(i): _random_subspace(rng, SCHEMA.features[i]) for i in features})
    if outcome is None:
        outcome = int(rng.integers(0, 2))
    return Rule(normalize(premise, SCHEMA), outcome, rule_id)


def _random_instances(rng, size=None):
    """Random instance matrix over the test schema.
    """
    if size is None:
        size = rng.integers(1, 129)
    columns = []
    for feature in SCHEMA.features:
        if feature.is_categorical():
            columns.append(rng.integers(0, NUM_CATEGORIES, size))
        else:
            columns.append(rng.integers(-1, 12, size))
    return np.column_stack(columns).astype(float)


def test_join_generalizes():
    """The join covers at least the union of what the operands cover.
    """
    rng = np.random.default_rng(1)
    for _ in range(NUM_FIXTURES):
        instances = _random_instances(rng)
        rules = [_random_rule(rng, 1, str(i)) for i in range(rng.integers(1, 4))]
        joined = join(rules, SCHEMA)
        union = np.logical_or.reduce([rule_mask(rule, instances) for rule in rules])
        assert (rule_mask(joined, instances) | ~union).all()


def test_join_commutative_idempotent():
    """Join is commutative and idempotent for two operands.
    """
    rng = np.random.default_rng(2)
    for _ in range(NUM_FIXTURES):
        first, second = _random_rule(rng, 1), _random_rule(rng, 1)
        forward = join([first.with_id('1'), second.with_id('2')], SCHEMA)
        backward = join([second.with_id('1'), first.with_id('2')], SCHEMA)
        assert forward.same_logic(backward)
        assert join([first.with_id('1'), first.with_id('2')], SCHEMA).same_logic(first)


def test_cut_specializes():
    """The residuals are contained in the lesser rule and, when the two rules
    share a constrained feature, disjoint from the dominant one.
    """
    rng = np.random.default_rng(3)
    for _ in range(NUM_FIXTURES):
        instances = _random_instances(rng)
        dominant = _random_rule(rng, 1, 'd')
        lesser = _random_rule(rng, 0, 'l')
        rules = cut(dominant, lesser, SCHEMA)
        assert rules[0] is dominant
        shared = set(dominant.premise.features()) & set(lesser.premise.features())
        lesser_mask = rule_mask(lesser, instances)
        dominant_mask = rule_mask(dominant, instances)
        for residual in rules[1:]:
            assert residual.outcome == lesser.outcome
            mask = rule_mask(residual, instances)
            assert (lesser_mask | ~mask).all()
            if shared:
                assert not (mask & dominant_mask).any()


def test_merge_properties():
    """Merging random theories on random batches is deterministic and yields
    normalized rules with fresh ids.
    """
    rng = np.random.default_rng(4)
    for _ in range(NUM_FIXTURES // 10):
        theories = [ExplanationTheory(tuple(_random_rule(rng, None, str(i), 1) \
            for i in range(3)), name) for name in 'ab']
        instances = _random_instances(rng, 32)
        batch = Dataset(SCHEMA, instances, rng.integers(0, 2, 32))
        merged = merge(*theories, batch, 'm')
        assert merged == merge(*theories, batch, 'm')
        assert len(merged) >= 1
        assert [rule.id for rule in merged] == [f'm.{i}' for i in range(len(merged))]
        for rule in merged:
            assert normalize(rule.premise, SCHEMA) == rule.premise


def _brute_force_coverage(theory, instances):
    """Set of covered rows, calculated one instance at a time.
    """
    return {i for i, x in enumerate(instances) if any(satisfies(x, rule.premise) \
        for rule in theory)}


def test_similarity_brute_force():
    """The vectorized similarity agrees with the brute-force Jaccard index.
    """
    rng = np.random.default_rng(5)
    for _ in range(NUM_FIXTURES):
        instances = _random_instances(rng, rng.integers(1, 33))
        dataset = Dataset(SCHEMA, instances, np.zeros(len(instances), dtype=int))
        first, second = [ExplanationTheory(tuple(_random_rule(rng, None, str(i)) \
            for i in range(rng.integers(0, 5)))) for _ in range(2)]
        cov_first = _brute_force_coverage(first, instances)
        cov_second = _brute_force_coverage(second, instances)
        union = cov_first | cov_second
        expected = len(cov_first & cov_second) / len(union) if union else 0.
        value = similarity(first, second, dataset)
        assert math.isclose(value, expected)
        assert value == similarity(second, first, dataset)
        assert 0. <= value <= 1.


def test_filter_alpha_bound():
    """The top-alpha filter keeps at most ceil(alpha / 2) rules per class.
    """
    rng = np.random.default_rng(6)
    for _ in range(NUM_FIXTURES):
        instances = _random_instances(rng, 64)
        dataset = Dataset(SCHEMA, instances, rng.integers(0, 2, 64))
        theory = ExplanationTheory(tuple(_random_rule(rng, None, str(i)) \
            for i in range(rng.integers(0, 16))))
        alpha = int(rng.integers(1, 12))
        filtered = filter_alpha(theory, alpha, dataset)
        quota = math.ceil(alpha / 2)
        assert len(filtered) <= 2 * quota
        for outcome in (0, 1):
            num_rules = sum(rule.outcome == outcome for rule in theory)
            num_kept = sum(rule.outcome == outcome for rule in filtered)
            assert num_kept == min(quota, num_rules)


def test_nearest_rank_percentile():
    """The nearest-rank percentile is the smallest value with at least q% of the
    values at or below it.
    """
    rng = np.random.default_rng(7)
    for _ in range(NUM_FIXTURES):
        values = rng.integers(0, 20, rng.integers(1, 50)) / 10.
        q = int(rng.integers(0, 101))
        value = nearest_rank_percentile(values, q)
        assert value in values
        assert 100 * np.count_nonzero(values <= value) >= q * len(values)
        if q > 0:
            assert 100 * np.count_nonzero(values < value) < q * len(values)
