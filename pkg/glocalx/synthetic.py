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

"""Data-free mode: surrogate instances from a Gaussian density estimate.

The continuous features are modeled with a multivariate Gaussian, and the
categorical features with independent empirical marginals. The surrogate
instances are then labeled by querying the black box, either as an external
executable (headerless csv rows on the standard input, one label per line on
the standard output) or as an in-process callable.
"""

from __future__ import annotations

import dataclasses
import shlex
import subprocess
from typing import Callable, Mapping, Sequence

import numpy as np

from glocalx import config, logger
from glocalx.data import instances_frame
from glocalx.errors import InvalidInputError, NumericError, OracleError
from glocalx.rules import Dataset, FeatureSchema


#: An oracle is either a command line or a function mapping an instance matrix
#: onto a sequence of labels (tokens or class indices).
Oracle = str | Callable[[np.ndarray], Sequence]


@dataclasses.dataclass(frozen=True)
class GaussianModel:

    """Joint density model for the features.

    Parameters
    ----------
    mean
        The mean of the continuous features.

    covariance
        The covariance matrix of the continuous features.

    continuous_features
        The indices of the continuous features in the instance matrix.

    categorical_marginals
        The category frequencies for each categorical feature, indexed by the
        feature index in the instance matrix.
    """

    mean: np.ndarray
    covariance: np.ndarray
    continuous_features: tuple[int, ...]
    categorical_marginals: Mapping[int, np.ndarray] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        covariance = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if covariance.shape != (len(mean), len(mean)):
            raise InvalidInputError(f'Covariance matrix with shape {covariance.shape} does not '
                f'match {len(mean)} mean value(s)')
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'covariance', covariance)
        continuous_features = tuple(int(i) for i in self.continuous_features)
        object.__setattr__(self, 'continuous_features', continuous_features)
        if len(self.continuous_features) != len(mean):
            raise InvalidInputError(f'{len(mean)} mean value(s) for '
                f'{len(self.continuous_features)} continuous feature(s)')
        if not np.allclose(covariance, covariance.T):
            raise InvalidInputError('Covariance matrix is not symmetric')
        if (np.diag(covariance) < 0.).any():
            raise InvalidInputError('Covariance matrix has negative diagonal elements')
        marginals = {}
        for feature, frequencies in self.categorical_marginals.items():
            frequencies = np.asarray(frequencies, dtype=float)
            if (frequencies < 0.).any() or not np.isclose(frequencies.sum(), 1.):
                raise InvalidInputError(f'Invalid marginal {frequencies} for feature {feature}')
            marginals[int(feature)] = frequencies
        object.__setattr__(self, 'categorical_marginals', marginals)
        features = sorted(self.continuous_features + tuple(marginals))
        if features != list(range(len(features))):
            raise InvalidInputError(f'Model features {features} do not cover a contiguous range')

    @property
    def num_features(self) -> int:
        """Return the total number of features.
        """
        return len(self.continuous_features) + len(self.categorical_marginals)

    @classmethod
    def from_params(cls, mean: Sequence[float], covariance: Sequence[Sequence[float]],
        categorical_marginals: Mapping[int, Sequence[float]] = None,
        continuous_features: Sequence[int] = None) -> GaussianModel:
        """Build a model from explicit parameters (no regularization applied).

        By default the continuous features are taken to be the first ones.
        """
        categorical_marginals = categorical_marginals or {}
        if continuous_features is None:
            continuous_features = range(len(np.atleast_1d(mean)))
        return cls(mean, covariance, tuple(continuous_features), dict(categorical_marginals))



def fit(dataset: Dataset, regularization: float = None) -> GaussianModel:
    """Maximum-likelihood fit of the feature density on a dataset.

    Parameters
    ----------
    dataset
        The dataset.

    regularization
        The constant added to the diagonal of the covariance matrix (defaults to
        the ``synthetic.regularization`` configuration value).

    Returns
    -------
    GaussianModel
        The fitted model.
    """
    if len(dataset) < 2:
        raise InvalidInputError(f'At least two instances needed for the fit, {len(dataset)} given')
    if regularization is None:
        regularization = config.get('synthetic.regularization')
    schema = dataset.schema
    continuous = [i for i, feature in enumerate(schema.features) if not feature.is_categorical()]
    values = dataset.instances[:, continuous]
    mean = values.mean(axis=0)
    covariance = np.zeros((len(continuous), len(continuous)))
    if len(continuous) > 0:
        covariance = np.cov(values, rowvar=False, bias=True).reshape(covariance.shape)
    covariance += regularization * np.eye(len(continuous))
    marginals = {}
    for i, feature in enumerate(schema.features):
        if feature.is_categorical():
            counts = np.bincount(dataset.instances[:, i].astype(int),
                minlength=len(feature.categories))
            marginals[i] = counts / counts.sum()
    logger.info(f'Gaussian model fitted on {len(dataset)} instance(s) '
        f'({len(continuous)} continuous feature(s), {len(marginals)} categorical).')
    return GaussianModel(mean, covariance, tuple(continuous), marginals)


def default_model(schema: FeatureSchema) -> GaussianModel:
    """Build a model out of the schema alone, when no data are at hand.

    Each continuous feature gets an independent Gaussian centered on the middle
    of its declared domain, with the domain spanning four standard deviations,
    and each categorical feature gets uniform marginals.
    """
    mean, sigma, continuous, marginals = [], [], [], {}
    for i, feature in enumerate(schema.features):
        if feature.is_categorical():
            marginals[i] = np.full(len(feature.categories), 1. / len(feature.categories))
            continue
        if feature.domain is None:
            raise InvalidInputError(f'Cannot build a default model without a domain '
                f'for feature {feature.name}')
        lo, hi = feature.domain
        mean.append(0.5 * (lo + hi))
        sigma.append(0.25 * (hi - lo))
        continuous.append(i)
    return GaussianModel(mean, np.diag(np.square(sigma)), tuple(continuous), marginals)


def _factor(covariance: np.ndarray) -> np.ndarray:
    """Return a matrix L such that L @ L.T equals the covariance.

    This is the Cholesky factor whenever possible, with a fallback on the
    eigen-decomposition for singular (but positive semi-definite) matrices.
    """
    try:
        return np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError:
        pass
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    tolerance = 1.e-12 * max(1., np.abs(eigenvalues).max(initial=0.))
    if (eigenvalues < -tolerance).any():
        raise NumericError(f'Covariance matrix is not positive semi-definite '
            f'(eigenvalues {eigenvalues})')
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0., None))


def sample(model: GaussianModel, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw random instances from the model.

    Parameters
    ----------
    model
        The density model.

    size
        The number of instances.

    rng
        The random number generator.

    Returns
    -------
    np.ndarray
        The size x m instance matrix.
    """
    if size < 1:
        raise InvalidInputError(f'Invalid sample size {size}')
    instances = np.empty((size, model.num_features))
    if len(model.continuous_features) > 0:
        factor = _factor(model.covariance)
        normal = rng.standard_normal((size, len(model.mean)))
        instances[:, list(model.continuous_features)] = model.mean + normal @ factor.T
    for feature in sorted(model.categorical_marginals):
        frequencies = model.categorical_marginals[feature]
        instances[:, feature] = rng.choice(len(frequencies), size=size, p=frequencies)
    return instances


def _run_command(command: str, instances: np.ndarray, schema: FeatureSchema) -> list[str]:
    """Pipe the instances through an external oracle and return the output lines.
    """
    text = instances_frame(instances, schema).to_csv(header=False, index=False)
    logger.debug(f'Querying oracle "{command}" on {len(instances)} instance(s)...')
    try:
        result = subprocess.run(shlex.split(command), input=text, capture_output=True,
            text=True, check=False)
    except OSError as exception:
        raise OracleError(f'Cannot run oracle "{command}": {exception}') from exception
    if result.returncode != 0:
        raise OracleError(f'Oracle "{command}" exited with code {result.returncode} '
            f'({result.stderr.strip()})')
    return result.stdout.splitlines()


def label_with_oracle(instances: np.ndarray, oracle: Oracle, schema: FeatureSchema) -> np.ndarray:
    """Label a set of instances by querying the black box.

    Parameters
    ----------
    instances
        The n x m instance matrix.

    oracle
        The oracle, either as a command line or as a callable.

    schema
        The feature schema, used to serialize the instances and parse the labels.

    Returns
    -------
    np.ndarray
        The length-n vector of class indices, in the input order.
    """
    instances = np.asarray(instances, dtype=float)
    if len(instances) == 0:
        return np.empty(0, dtype=int)
    if isinstance(oracle, str):
        tokens = _run_command(oracle, instances, schema)
    else:
        try:
            tokens = list(oracle(instances))
        except Exception as exception:  # pylint: disable=broad-except
            raise OracleError(f'Oracle call failed: {exception}') from exception
    if len(tokens) < len(instances):
        raise OracleError(f'Oracle returned {len(tokens)} label(s) for {len(instances)} '
            'instance(s)', len(tokens))
    if len(tokens) > len(instances):
        raise OracleError(f'Oracle returned {len(tokens)} label(s) for {len(instances)} '
            'instance(s)')
    labels = np.empty(len(tokens), dtype=int)
    for i, token in enumerate(tokens):
        try:
            labels[i] = schema.label_index(token)
        except InvalidInputError as exception:
            raise OracleError(str(exception), i) from exception
    return labels


def synthesize(model: GaussianModel, size: int, oracle: Oracle, schema: FeatureSchema,
    seed: int = 0) -> Dataset:
    """Sample a surrogate dataset and label it with the oracle.
    """
    if model.num_features != schema.num_features:
        raise InvalidInputError(f'Model with {model.num_features} feature(s) does not match '
            f'a schema with {schema.num_features} feature(s)')
    logger.info(f'Sampling {size} surrogate instance(s) (seed {seed})...')
    instances = sample(model, size, np.random.default_rng(seed))
    labels = label_with_oracle(instances, oracle, schema)
    logger.info(f'Done, {np.count_nonzero(labels == 1)} out of {size} instance(s) '
        f'labeled as {schema.class_labels[1]}.')
    return Dataset(schema, instances, labels)
