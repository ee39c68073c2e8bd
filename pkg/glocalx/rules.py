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


"""Core data model: feature schemas, subspaces, premises, rules, explanation
theories and datasets.

A decision rule is a premise (a conjunction of per-feature constraints) implying
a class outcome. Geometrically, the premise identifies an axis-aligned
quasi-polyhedron in feature space, i.e., one subspace per constrained feature,
with the features that are not constrained being simply absent from the premise.
Continuous features are constrained by intervals with explicit open/closed
endpoints, and categorical features by (non-empty) sets of category indices.

All the classes in this module are immutable.
"""

from __future__ import annotations

import collections
import dataclasses
import enum
import json
import math
import numbers
import pathlib
from typing import Iterable, Iterator, Mapping

import numpy as np

from glocalx import logger
from glocalx.errors import InvalidInputError, ParseError, UnsatisfiablePremise
from glocalx.utils import check_input_file, natural_key


class FeatureKind(str, enum.Enum):

    """Enum class for the feature types.
    """

    CONTINUOUS = 'continuous'
    CATEGORICAL = 'categorical'



@dataclasses.dataclass(frozen=True)
class Feature:

    """Description of a single feature.

    Parameters
    ----------
    name
        The feature name.

    kind
        The feature kind (continuous or categorical).

    categories
        The ordered tuple of category names, for categorical features. The values
        of categorical features are stored as indices into this tuple.

    domain
        Optional (min, max) bounds for continuous features, used to clamp
        interval constraints.
    """

    name: str
    kind: FeatureKind
    categories: tuple[str, ...] = ()
    domain: tuple[float, float] = None

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        object.__setattr__(self, 'kind', FeatureKind(self.kind))
        object.__setattr__(self, 'categories', tuple(str(cat) for cat in self.categories))
        if self.is_categorical():
            if len(self.categories) == 0:
                raise InvalidInputError(f'Categorical feature {self.name} has no categories')
            if len(set(self.categories)) != len(self.categories):
                raise InvalidInputError(f'Duplicated categories for feature {self.name}')
            if self.domain is not None:
                raise InvalidInputError(f'Categorical feature {self.name} cannot have a domain')
        elif len(self.categories) > 0:
            raise InvalidInputError(f'Continuous feature {self.name} cannot have categories')
        if self.domain is not None:
            lo, hi = (float(value) for value in self.domain)
            if not lo <= hi:
                raise InvalidInputError(f'Invalid domain {self.domain} for feature {self.name}')
            object.__setattr__(self, 'domain', (lo, hi))

    def is_categorical(self) -> bool:
        """Return True if the feature is categorical.
        """
        return self.kind is FeatureKind.CATEGORICAL

    def category_index(self, token: str) -> int:
        """Return the index of a given category name.
        """
        try:
            return self.categories.index(token)
        except ValueError as exception:
            raise InvalidInputError(f'Unknown category "{token}" for feature {self.name}') \
                from exception

    def to_dict(self) -> dict:
        """Return the json-serializable dictionary representation of the feature.
        """
        data = dict(name=self.name, kind=self.kind.value)
        if self.is_categorical():
            data['categories'] = list(self.categories)
        if self.domain is not None:
            data['domain'] = list(self.domain)
        return data



@dataclasses.dataclass(frozen=True)
class FeatureSchema:

    """The feature schema, i.e., the ordered list of features and the
    (binary) class labels.
    """

    features: tuple[Feature, ...]
    class_labels: tuple[str, str]

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        object.__setattr__(self, 'features', tuple(self.features))
        object.__setattr__(self, 'class_labels', tuple(str(label) for label in self.class_labels))
        names = self.feature_names()
        if len(set(names)) != len(names):
            raise InvalidInputError(f'Duplicated feature names in {names}')
        if len(self.class_labels) != 2:
            raise InvalidInputError(f'Exactly two class labels expected, got {self.class_labels}')
        if self.class_labels[0] == self.class_labels[1]:
            raise InvalidInputError(f'Duplicated class labels {self.class_labels}')

    @property
    def num_features(self) -> int:
        """Return the number of features.
        """
        return len(self.features)

    def feature_names(self) -> list[str]:
        """Return the list of feature names.
        """
        return [feature.name for feature in self.features]

    def index(self, name: str) -> int:
        """Return the index of a feature, given its name.
        """
        try:
            return self.feature_names().index(name)
        except ValueError as exception:
            raise InvalidInputError(f'Unknown feature {name}') from exception

    def label_index(self, token: str | int) -> int:
        """Return the index of a class label token.

        Tokens are matched against the class label names first, and integer
        class indices are accepted as a fallback.
        """
        token = str(token).strip()
        if token in self.class_labels:
            return self.class_labels.index(token)
        if token in ('0', '1'):
            return int(token)
        raise InvalidInputError(f'Unknown class label "{token}" (valid labels are '
            f'{self.class_labels})')

    def check_premise(self, premise: Premise) -> None:
        """Make sure that a premise is consistent with the schema, i.e., that all
        the feature indices exist and the subspace kinds match the feature kinds.
        """
        for feature_index, subspace in premise:
            if not 0 <= feature_index < self.num_features:
                raise InvalidInputError(f'Feature index {feature_index} out of range '
                    f'for a schema with {self.num_features} feature(s)')
            feature = self.features[feature_index]
            if feature.is_categorical() != isinstance(subspace, CategorySet):
                raise InvalidInputError(f'Subspace {subspace} does not match the kind '
                    f'of feature {feature.name}')
            if feature.is_categorical() and max(subspace.categories) >= len(feature.categories):
                raise InvalidInputError(f'Category index out of range in {subspace} '
                    f'for feature {feature.name}')

    def check_instances(self, instances: np.ndarray) -> None:
        """Make sure that an instance matrix conforms to the schema.
        """
        if instances.ndim != 2 or instances.shape[1] != self.num_features:
            raise InvalidInputError(f'Instance matrix with shape {instances.shape} does not '
                f'match a schema with {self.num_features} feature(s)')
        if np.isnan(instances).any():
            raise InvalidInputError('Instance matrix contains NaN values')
        for i, feature in enumerate(self.features):
            if feature.is_categorical():
                column = instances[:, i]
                valid = (column == np.round(column)) & (column >= 0) & \
                    (column < len(feature.categories))
                if not valid.all():
                    raise InvalidInputError(f'Invalid category index for feature {feature.name}')

    def to_dict(self) -> dict:
        """Return the json-serializable dictionary representation of the schema.
        """
        return dict(features=[feature.to_dict() for feature in self.features],
            class_labels=list(self.class_labels))

    @classmethod
    def from_dict(cls, data: dict) -> FeatureSchema:
        """Create a schema from its dictionary representation.
        """
        try:
            features = [Feature(item['name'], item['kind'], tuple(item.get('categories', ())),
                item.get('domain')) for item in data['features']]
            return cls(tuple(features), tuple(data['class_labels']))
        except (KeyError, TypeError, ValueError) as exception:
            raise InvalidInputError(f'Malformed schema: {exception}') from exception



def _format_number(value: float) -> str:
    """Compact string formatting for interval endpoints.
    """
    return f'{value:g}'


@dataclasses.dataclass(frozen=True)
class Interval:

    """Interval on the real line, with explicit open/closed flags for each
    endpoint.

    Infinite endpoints are always open. Empty intervals cannot be created:
    the operations that might yield an empty set return None instead.

    Parameters
    ----------
    lo
        The lower endpoint (-inf for unbounded).

    hi
        The upper endpoint (+inf for unbounded).

    lo_closed
        Whether the lower endpoint belongs to the interval.

    hi_closed
        Whether the upper endpoint belongs to the interval.
    """

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidInputError('NaN interval endpoint')
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)
        object.__setattr__(self, 'lo_closed', bool(self.lo_closed) and math.isfinite(lo))
        object.__setattr__(self, 'hi_closed', bool(self.hi_closed) and math.isfinite(hi))
        if not self._is_valid(self.lo, self.hi, self.lo_closed, self.hi_closed):
            raise UnsatisfiablePremise(f'Empty interval {self}')

    @staticmethod
    def _is_valid(lo: float, hi: float, lo_closed: bool, hi_closed: bool) -> bool:
        """Return True if the endpoints identify a non-empty interval.
        """
        return lo < hi or (lo == hi and lo_closed and hi_closed and math.isfinite(lo))

    @classmethod
    def _make(cls, lo: float, hi: float, lo_closed: bool, hi_closed: bool) -> Interval | None:
        """Create a new interval, or return None if the endpoints identify an empty set.
        """
        lo_closed = lo_closed and math.isfinite(lo)
        hi_closed = hi_closed and math.isfinite(hi)
        if not cls._is_valid(lo, hi, lo_closed, hi_closed):
            return None
        return cls(lo, hi, lo_closed, hi_closed)

    @classmethod
    def at_least(cls, value: float) -> Interval:
        """Return the interval [value, +inf).
        """
        return cls(value, math.inf, True, False)

    @classmethod
    def greater_than(cls, value: float) -> Interval:
        """Return the interval (value, +inf).
        """
        return cls(value, math.inf, False, False)

    @classmethod
    def at_most(cls, value: float) -> Interval:
        """Return the interval (-inf, value].
        """
        return cls(-math.inf, value, False, True)

    @classmethod
    def less_than(cls, value: float) -> Interval:
        """Return the interval (-inf, value).
        """
        return cls(-math.inf, value, False, False)

    @classmethod
    def half_open(cls, lo: float, hi: float) -> Interval:
        """Return the interval [lo, hi).
        """
        return cls(lo, hi, True, False)

    def is_unbounded(self) -> bool:
        """Return True if the interval is the entire real line.
        """
        return math.isinf(self.lo) and math.isinf(self.hi)

    def contains(self, value: float) -> bool:
        """Return True if a value lies within the interval.
        """
        above = value > self.lo or (self.lo_closed and value == self.lo)
        below = value < self.hi or (self.hi_closed and value == self.hi)
        return bool(above and below)

    def mask(self, values: np.ndarray) -> np.ndarray:
        """Vectorized version of :meth:`contains`.
        """
        above = values >= self.lo if self.lo_closed else values > self.lo
        below = values <= self.hi if self.hi_closed else values < self.hi
        return above & below

    def intersection(self, other: Interval) -> Interval | None:
        """Return the intersection with another interval (None if empty).
        """
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return self._make(lo, hi, lo_closed, hi_closed)

    def hull(self, other: Interval) -> Interval:
        """Return the smallest interval containing both operands.

        For overlapping operands this is exactly their union, while for disjoint
        operands this is the bridge from the lowest to the highest endpoint,
        each endpoint keeping the closedness of the operand it comes from.
        """
        if self.lo < other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif self.lo > other.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed or other.lo_closed
        if self.hi > other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif self.hi < other.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed or other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def difference(self, other: Interval) -> list[Interval]:
        """Return the set difference with another interval, as a list of zero,
        one or two disjoint intervals sorted from left to right.
        """
        if self.intersection(other) is None:
            return [self]
        pieces = []
        if math.isfinite(other.lo):
            left = self.intersection(Interval(-math.inf, other.lo, False, not other.lo_closed))
            if left is not None:
                pieces.append(left)
        if math.isfinite(other.hi):
            right = self.intersection(Interval(other.hi, math.inf, not other.hi_closed, False))
            if right is not None:
                pieces.append(right)
        return pieces

    def clamp(self, domain: tuple[float, float]) -> Interval | None:
        """Clamp the interval to a closed domain (None if the result is empty).
        """
        return self.intersection(Interval(domain[0], domain[1], True, True))

    def describe(self, name: str) -> str:
        """Return a human-readable representation of the constraint.
        """
        if self.is_unbounded():
            return f'{name} any'
        if math.isinf(self.lo):
            return f'{name} {"<=" if self.hi_closed else "<"} {_format_number(self.hi)}'
        if math.isinf(self.hi):
            return f'{name} {">=" if self.lo_closed else ">"} {_format_number(self.lo)}'
        if self.lo == self.hi:
            return f'{name} = {_format_number(self.lo)}'
        return f'{name} in {"[" if self.lo_closed else "("}{_format_number(self.lo)}, ' \
            f'{_format_number(self.hi)}{"]" if self.hi_closed else ")"}'

    def to_dict(self) -> dict:
        """Return the dictionary representation used in the rule files (infinite
        endpoints map to None).
        """
        return dict(lo=self.lo if math.isfinite(self.lo) else None,
            hi=self.hi if math.isfinite(self.hi) else None,
            lo_closed=self.lo_closed, hi_closed=self.hi_closed)

    @classmethod
    def from_dict(cls, data: dict) -> Interval:
        """Create an interval from its dictionary representation.
        """
        lo = -math.inf if data.get('lo') is None else data['lo']
        hi = math.inf if data.get('hi') is None else data['hi']
        for value in (lo, hi):
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise InvalidInputError(f'Non-numeric interval endpoint in {data}')
        return cls(lo, hi, bool(data.get('lo_closed', False)), bool(data.get('hi_closed', False)))



@dataclasses.dataclass(frozen=True)
class CategorySet:

    """Non-empty set of category indices for a categorical feature.
    """

    categories: frozenset[int]

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        object.__setattr__(self, 'categories', frozenset(int(cat) for cat in self.categories))
        if len(self.categories) == 0:
            raise UnsatisfiablePremise('Empty category set')

    def contains(self, value: float) -> bool:
        """Return True if a (category index) value belongs to the set.
        """
        if value != int(value):
            raise InvalidInputError(f'Category index {value} is not an integer')
        return int(value) in self.categories

    def mask(self, values: np.ndarray) -> np.ndarray:
        """Vectorized version of :meth:`contains`.
        """
        return np.isin(values, sorted(self.categories))

    def intersection(self, other: CategorySet) -> CategorySet | None:
        """Return the intersection with another set (None if empty).
        """
        categories = self.categories & other.categories
        return CategorySet(categories) if categories else None

    def union(self, other: CategorySet) -> CategorySet:
        """Return the union with another set.
        """
        return CategorySet(self.categories | other.categories)

    def difference(self, other: CategorySet) -> list[CategorySet]:
        """Return the set difference, as a list with zero or one element.
        """
        categories = self.categories - other.categories
        return [CategorySet(categories)] if categories else []

    def describe(self, feature: Feature) -> str:
        """Return a human-readable representation of the constraint.
        """
        names = [feature.categories[cat] for cat in sorted(self.categories)]
        if len(names) == 1:
            return f'{feature.name} = {names[0]}'
        return f'{feature.name} in {{{", ".join(names)}}}'

    def to_dict(self, feature: Feature) -> dict:
        """Return the dictionary representation used in the rule files.
        """
        return dict(cats=[feature.categories[cat] for cat in sorted(self.categories)])

    @classmethod
    def from_dict(cls, data: dict, feature: Feature) -> CategorySet:
        """Create a category set from its dictionary representation.
        """
        return cls(feature.category_index(str(token)) for token in data['cats'])


#: Type alias for a generic per-feature constraint.
Subspace = Interval | CategorySet



@dataclasses.dataclass(frozen=True)
class Premise:

    """Premise of a decision rule, i.e., a conjunction of per-feature constraints.

    This can be created from either a ``{feature_index: subspace}`` mapping or
    an iterable of ``(feature_index, subspace)`` pairs. The pairs are stored as
    they come; :meth:`normalize` returns the canonical form (sorted by feature,
    with no duplicates and no vacuous constraints).
    """

    constraints: tuple[tuple[int, Subspace], ...] = ()

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        constraints = self.constraints
        if isinstance(constraints, Mapping):
            constraints = constraints.items()
        constraints = tuple((int(feature), subspace) for feature, subspace in constraints)
        for feature, subspace in constraints:
            if not isinstance(subspace, (Interval, CategorySet)):
                raise InvalidInputError(f'Invalid subspace {subspace} for feature {feature}')
        object.__setattr__(self, 'constraints', constraints)

    def __iter__(self) -> Iterator[tuple[int, Subspace]]:
        """Iterate over the (feature_index, subspace) pairs.
        """
        return iter(self.constraints)

    def __len__(self) -> int:
        """Return the number of constrained features.
        """
        return len(self.features())

    def features(self) -> tuple[int, ...]:
        """Return the sorted tuple of constrained feature indices.
        """
        return tuple(sorted({feature for feature, _ in self.constraints}))

    def get(self, feature: int) -> Subspace | None:
        """Return the constraint on a given feature (None if unconstrained).

        Note this is only meaningful for normalized premises.
        """
        for _feature, subspace in self.constraints:
            if _feature == feature:
                return subspace
        return None

    def as_dict(self) -> dict[int, Subspace]:
        """Return the premise as a ``{feature_index: subspace}`` dictionary.
        """
        return dict(self.constraints)



def satisfies(x: Iterable[float], premise: Premise, schema: FeatureSchema = None) -> bool:
    """Return True if an instance satisfies a premise, i.e., if the value of
    every constrained feature lies within the corresponding subspace.

    Parameters
    ----------
    x
        The instance (one value per feature, categorical values as indices).

    premise
        The premise.

    schema
        The optional feature schema. If given, both the instance and the premise
        are checked against it (number of features, feature kinds and category
        indices) before the evaluation.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidInputError(f'Instance with shape {x.shape} is not a row')
    if schema is not None:
        schema.check_instances(x.reshape(1, -1))
        schema.check_premise(premise)
    for feature, subspace in premise:
        if not 0 <= feature < len(x):
            raise InvalidInputError(f'Feature index {feature} out of range for an instance '
                f'with {len(x)} value(s)')
        if not subspace.contains(x[feature]):
            return False
    return True


def _is_vacuous(subspace: Subspace, feature: Feature = None) -> bool:
    """Return True if the subspace does not constrain the feature at all.
    """
    if isinstance(subspace, Interval):
        if subspace.is_unbounded():
            return True
        if feature is not None and feature.domain is not None:
            lo, hi = feature.domain
            return subspace.lo == lo and subspace.lo_closed and \
                subspace.hi == hi and subspace.hi_closed
        return False
    if feature is not None:
        return len(subspace.categories) == len(feature.categories)
    return False


def normalize(premise: Premise, schema: FeatureSchema = None) -> Premise:
    """Return the canonical form of a premise.

    Duplicated constraints on the same feature are intersected, intervals are
    clamped to the feature domain (when the schema declares one), vacuous
    constraints are dropped and the constraints are sorted by feature index.
    This raises :class:`UnsatisfiablePremise` if any of the constraints becomes
    empty along the way, so that callers can drop the corresponding rule.

    Parameters
    ----------
    premise
        The input premise.

    schema
        The optional feature schema.

    Returns
    -------
    Premise
        The normalized premise.
    """
    if schema is not None:
        schema.check_premise(premise)
    merged = {}
    for feature, subspace in premise:
        if feature in merged:
            if type(merged[feature]) is not type(subspace):
                raise InvalidInputError(f'Mixed subspace kinds for feature {feature}')
            subspace = merged[feature].intersection(subspace)
            if subspace is None:
                raise UnsatisfiablePremise(f'Conflicting constraints on feature {feature}')
        merged[feature] = subspace
    constraints = []
    for feature_index in sorted(merged):
        subspace = merged[feature_index]
        feature = None if schema is None else schema.features[feature_index]
        if isinstance(subspace, Interval) and feature is not None and feature.domain is not None:
            subspace = subspace.clamp(feature.domain)
            if subspace is None:
                raise UnsatisfiablePremise(f'Constraint on {feature.name} outside of '
                    f'the feature domain {feature.domain}')
        if not _is_vacuous(subspace, feature):
            constraints.append((feature_index, subspace))
    return Premise(tuple(constraints))



@dataclasses.dataclass(frozen=True)
class Rule:

    """A decision rule, i.e., a premise implying an outcome.

    Parameters
    ----------
    premise
        The rule premise.

    outcome
        The class label index (0 or 1).

    id
        The rule identifier (unique within a theory).

    fidelity
        Optional cached fidelity, not taken into account in comparisons.
    """

    # pylint: disable=invalid-name, redefined-builtin
    premise: Premise
    outcome: int
    id: str = '0'
    fidelity: float = dataclasses.field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        if not isinstance(self.premise, Premise):
            object.__setattr__(self, 'premise', Premise(self.premise))
        if self.outcome not in (0, 1):
            raise InvalidInputError(f'Invalid rule outcome {self.outcome}')
        object.__setattr__(self, 'outcome', int(self.outcome))
        object.__setattr__(self, 'id', str(self.id))

    @property
    def length(self) -> int:
        """Return the number of premises.
        """
        return len(self.premise)

    def with_id(self, id: str) -> Rule:
        """Return a copy of the rule with a different identifier.
        """
        # pylint: disable=redefined-builtin
        return dataclasses.replace(self, id=str(id))

    def with_fidelity(self, fidelity: float) -> Rule:
        """Return a copy of the rule with a cached fidelity value.
        """
        return dataclasses.replace(self, fidelity=fidelity)

    def same_logic(self, other: Rule) -> bool:
        """Return True if the two rules have the same premise and outcome,
        irrespectively of their ids.
        """
        return self.outcome == other.outcome and \
            normalize(self.premise).constraints == normalize(other.premise).constraints

    def describe(self, schema: FeatureSchema) -> str:
        """Return a human-readable representation of the rule.
        """
        premises = []
        for feature_index, subspace in self.premise:
            feature = schema.features[feature_index]
            if isinstance(subspace, Interval):
                premises.append(subspace.describe(feature.name))
            else:
                premises.append(subspace.describe(feature))
        premises = ', '.join(premises) if premises else 'true'
        return f'{{{premises}}} -> {schema.class_labels[self.outcome]}'

    def to_dict(self, schema: FeatureSchema) -> dict:
        """Return the dictionary representation used in the rule files.
        """
        premises = {}
        for feature_index, subspace in self.premise:
            feature = schema.features[feature_index]
            if isinstance(subspace, Interval):
                premises[feature.name] = subspace.to_dict()
            else:
                premises[feature.name] = subspace.to_dict(feature)
        return dict(id=self.id, label=self.outcome, premises=premises)

    @classmethod
    def from_dict(cls, data: dict, schema: FeatureSchema) -> Rule:
        """Create a rule from its dictionary representation.
        """
        try:
            constraints = []
            for name, item in data['premises'].items():
                feature_index = schema.index(name)
                feature = schema.features[feature_index]
                if 'cats' in item:
                    subspace = CategorySet.from_dict(item, feature)
                else:
                    subspace = Interval.from_dict(item)
                constraints.append((feature_index, subspace))
            label = data['label']
            if isinstance(label, bool) or not isinstance(label, int):
                raise InvalidInputError(f'Non-integer rule label {label}')
            premise = normalize(Premise(tuple(constraints)), schema)
            return cls(premise, label, str(data['id']))
        except (KeyError, TypeError, AttributeError) as exception:
            raise InvalidInputError(f'Malformed rule {data}: {exception}') from exception



@dataclasses.dataclass(frozen=True)
class ExplanationTheory:

    """An explanation theory, i.e., a finite set of decision rules.

    Rules are stored in a tuple to keep the iteration order deterministic.
    """

    # pylint: disable=invalid-name, redefined-builtin
    rules: tuple[Rule, ...] = ()
    id: str = '0'

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        object.__setattr__(self, 'rules', tuple(self.rules))
        object.__setattr__(self, 'id', str(self.id))
        ids = [rule.id for rule in self.rules]
        if len(set(ids)) != len(ids):
            raise InvalidInputError(f'Duplicated rule ids in theory {self.id}')

    def __len__(self) -> int:
        """Return the number of rules.
        """
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:
        """Iterate over the rules.
        """
        return iter(self.rules)

    def mean_length(self) -> float:
        """Return the average number of premises per rule (zero for an empty theory).
        """
        if len(self.rules) == 0:
            return 0.
        return float(np.mean([rule.length for rule in self.rules]))

    def sorted_rules(self) -> list[Rule]:
        """Return the rules sorted by id.
        """
        return sorted(self.rules, key=lambda rule: natural_key(rule.id))

    def relabel(self, id: str = None) -> ExplanationTheory:
        """Return a copy of the theory with fresh rule ids ``<theory id>.<k>``.
        """
        id = self.id if id is None else str(id)
        rules = [rule.with_id(f'{id}.{i}') for i, rule in enumerate(self.rules)]
        return ExplanationTheory(tuple(rules), id)

    def same_logic(self, other: ExplanationTheory) -> bool:
        """Return True if the two theories hold the same rules (premises and
        outcomes, with multiplicity), irrespectively of the ids and of the order.
        """
        def _signature(theory):
            return collections.Counter((rule.outcome, normalize(rule.premise).constraints) \
                for rule in theory)
        return _signature(self) == _signature(other)

    def union(self, other: ExplanationTheory, id: str = None) -> ExplanationTheory:
        """Return the theory containing the rules of both operands.
        """
        id = f'{self.id}+{other.id}' if id is None else id
        return ExplanationTheory(self.rules + other.rules, id)

    def describe(self, schema: FeatureSchema) -> str:
        """Return a human-readable, multi-line representation of the theory.
        """
        lines = [f'Theory {self.id} ({len(self)} rule(s))']
        lines += [f'  [{rule.id}] {rule.describe(schema)}' for rule in self.rules]
        return '\n'.join(lines)



@dataclasses.dataclass(frozen=True)
class Dataset:

    """A dataset, i.e., an instance matrix along with the labels assigned by
    the black box (and, optionally, the ground-truth labels).

    Parameters
    ----------
    schema
        The feature schema.

    instances
        The n x m instance matrix (categorical values are category indices).

    oracle_labels
        The length-n vector of black-box labels.

    truth_labels
        The optional length-n vector of ground-truth labels.
    """

    schema: FeatureSchema
    instances: np.ndarray
    oracle_labels: np.ndarray
    truth_labels: np.ndarray = None

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        instances = np.array(self.instances, dtype=float)
        if instances.ndim == 1 and instances.size == 0:
            instances = instances.reshape(0, self.schema.num_features)
        self.schema.check_instances(instances)
        instances.flags.writeable = False
        object.__setattr__(self, 'instances', instances)
        object.__setattr__(self, 'oracle_labels', self._check_labels(self.oracle_labels))
        if self.truth_labels is not None:
            object.__setattr__(self, 'truth_labels', self._check_labels(self.truth_labels))

    def _check_labels(self, labels: np.ndarray) -> np.ndarray:
        """Validate and freeze a label vector.
        """
        labels = np.asarray(labels)
        if labels.shape != (len(self.instances), ):
            raise InvalidInputError(f'Label vector with shape {labels.shape} does not match '
                f'{len(self.instances)} instance(s)')
        if not np.isin(labels, (0, 1)).all():
            raise InvalidInputError('Labels must be class indices (0 or 1)')
        labels = labels.astype(int)
        labels.flags.writeable = False
        return labels

    def __len__(self) -> int:
        """Return the number of instances.
        """
        return len(self.instances)

    def has_truth(self) -> bool:
        """Return True if the ground-truth labels are available.
        """
        return self.truth_labels is not None

    def subset(self, indices: np.ndarray) -> Dataset:
        """Return a new dataset with the given rows (in the given order).
        """
        indices = np.asarray(indices, dtype=int)
        truth = None if self.truth_labels is None else self.truth_labels[indices]
        return Dataset(self.schema, self.instances[indices], self.oracle_labels[indices], truth)



def read_schema(file_path: str | pathlib.Path) -> FeatureSchema:
    """Read a feature schema from a json file.
    """
    file_path = check_input_file(file_path, '.json')
    logger.info(f'Reading feature schema from {file_path}...')
    with open(file_path, encoding='utf-8') as input_file:
        try:
            schema = FeatureSchema.from_dict(json.load(input_file))
        except json.JSONDecodeError as exception:
            raise ParseError(exception.msg, exception.lineno) from exception
    logger.debug(f'Features: {schema.feature_names()}, labels: {schema.class_labels}')
    return schema


def write_schema(schema: FeatureSchema, file_path: str | pathlib.Path) -> None:
    """Write a feature schema to a json file.
    """
    logger.info(f'Writing feature schema to {file_path}...')
    with open(file_path, 'w', encoding='utf-8') as output_file:
        json.dump(schema.to_dict(), output_file, indent=2)


def read_rules(file_path: str | pathlib.Path, schema: FeatureSchema) -> list[Rule]:
    """Read a list of rules from a json rule file.

    Rules whose premise turns out to be unsatisfiable are dropped with a warning.
    """
    file_path = check_input_file(file_path, '.json')
    logger.info(f'Reading rules from {file_path}...')
    with open(file_path, encoding='utf-8') as input_file:
        try:
            data = json.load(input_file)
        except json.JSONDecodeError as exception:
            raise ParseError(exception.msg, exception.lineno) from exception
    if not isinstance(data, list):
        raise InvalidInputError(f'Rule file {file_path} must contain a json array')
    rules = []
    for item in data:
        try:
            rules.append(Rule.from_dict(item, schema))
        except UnsatisfiablePremise as exception:
            logger.warning(f'Dropping rule {item.get("id")}: {exception}')
    ids = [rule.id for rule in rules]
    if len(set(ids)) != len(ids):
        raise InvalidInputError(f'Duplicated rule ids in {file_path}')
    logger.info(f'Done, {len(rules)} rule(s) read.')
    return rules


def dump_rules(rules: Iterable[Rule], schema: FeatureSchema) -> str:
    """Serialize a list of rules in the rule-file format.
    """
    return json.dumps([rule.to_dict(schema) for rule in rules], indent=2)


def write_rules(rules: Iterable[Rule], file_path: str | pathlib.Path,
    schema: FeatureSchema) -> None:
    """Write a list of rules to a json rule file.
    """
    rules = list(rules)
    logger.info(f'Writing {len(rules)} rule(s) to {file_path}...')
    with open(file_path, 'w', encoding='utf-8') as output_file:
        output_file.write(dump_rules(rules, schema))
        output_file.write('\n')
