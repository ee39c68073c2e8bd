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

import sys

import numpy as np
import pytest

from glocalx import GLOCALX_TEST_DATA, logger
from glocalx.errors import InvalidInputError, NumericError, OracleError
from glocalx.rules import Dataset, FeatureSchema, read_schema
from glocalx.synthetic import GaussianModel, default_model, fit, label_with_oracle, sample, \
    synthesize


AGE, JOB, AMOUNT = 0, 1, 2
UNEMPLOYED, CLERK, MANAGER = 0, 1, 2
ACCEPT, DENY = 0, 1

#: Oracle script denying the loan to everybody above 40.
ORACLE_SCRIPT = """
import sys

for line in sys.stdin:
    age = float(line.split(',')[0])
    print('deny' if age > 40. else 'accept')
"""


def _schema():
    """Return the loan schema.
    """
    return read_schema(GLOCALX_TEST_DATA / 'loan_schema.json')


def _oracle(instances):
    """In-process version of the oracle script.
    """
    return ['deny' if x[AGE] > 40. else 'accept' for x in instances]


def _model():
    """Simple model for the loan schema.
    """
    return GaussianModel.from_params([40., 10000.], [[100., 0.], [0., 1.e6]],
        {JOB: [0.2, 0.3, 0.5]}, continuous_features=(AGE, AMOUNT))


def test_model():
    """Test the model construction.
    """
    model = _model()
    assert model.num_features == 3
    assert model.continuous_features == (AGE, AMOUNT)
    assert np.allclose(model.categorical_marginals[JOB], [0.2, 0.3, 0.5])
    model = GaussianModel.from_params([0., 1.], np.eye(2))
    assert model.continuous_features == (0, 1)
    assert model.categorical_marginals == {}


def test_model_errors():
    """Test the model validation.
    """
    for args in (
        ([0., 1.], np.eye(3)),
        ([0., 1.], [[1., 0.5], [0., 1.]]),
        ([0., 1.], [[-1., 0.], [0., 1.]]),
        ([0.], [[1.]], {1: [0.5, 0.6]}),
        ([0.], [[1.]], {1: [1.5, -0.5]}),
        ([0.], [[1.]], {2: [0.5, 0.5]})
        ):
        with pytest.raises(InvalidInputError) as info:
            GaussianModel.from_params(*args)
        logger.info(info)


def test_fit():
    """Test the maximum-likelihood fit.
    """
    instances = np.array([[20., CLERK, 1000.], [30., MANAGER, 3000.], [40., CLERK, 2000.],
        [50., CLERK, 6000.]])
    dataset = Dataset(_schema(), instances, [0, 0, 1, 1])
    model = fit(dataset, regularization=0.)
    assert model.continuous_features == (AGE, AMOUNT)
    values = instances[:, [AGE, AMOUNT]]
    assert np.allclose(model.mean, values.mean(axis=0))
    assert np.allclose(model.covariance, np.cov(values, rowvar=False, bias=True))
    assert np.allclose(model.categorical_marginals[JOB], [0., 0.75, 0.25])
    regularized = fit(dataset, regularization=0.5)
    assert np.allclose(regularized.covariance - model.covariance, 0.5 * np.eye(2))
    # The default regularization is small, but positive.
    assert (np.diag(fit(dataset).covariance) > np.diag(model.covariance)).all()
    with pytest.raises(InvalidInputError) as info:
        fit(dataset.subset([0]))
    logger.info(info)


def test_degenerate_covariance():
    """Identical instances yield a zero covariance, and all the samples sit on the mean.
    """
    instances = np.array([[30., CLERK, 1000.]] * 5)
    model = fit(Dataset(_schema(), instances, [0] * 5), regularization=0.)
    assert np.allclose(model.covariance, 0.)
    samples = sample(model, 100, np.random.default_rng(1))
    assert np.allclose(samples, instances[0])


def test_not_positive_definite():
    """A covariance with negative eigenvalues cannot be sampled.
    """
    model = GaussianModel.from_params([0., 0.], [[1., 2.], [2., 1.]])
    with pytest.raises(NumericError) as info:
        sample(model, 10, np.random.default_rng(1))
    logger.info(info)


def test_sample():
    """The sample moments converge to the model parameters.
    """
    mean = np.array([1., 2.])
    covariance = np.array([[1., 0.5], [0.5, 2.]])
    model = GaussianModel.from_params(mean, covariance, {2: [0.2, 0.3, 0.5]})
    samples = sample(model, 50000, np.random.default_rng(42))
    assert samples.shape == (50000, 3)
    assert np.allclose(samples[:, :2].mean(axis=0), mean, atol=0.05)
    assert np.allclose(np.cov(samples[:, :2], rowvar=False), covariance, atol=0.1)
    frequencies = np.bincount(samples[:, 2].astype(int), minlength=3) / len(samples)
    assert np.allclose(frequencies, [0.2, 0.3, 0.5], atol=0.02)
    # Same seed, same sample.
    assert np.array_equal(sample(model, 10, np.random.default_rng(1)),
        sample(model, 10, np.random.default_rng(1)))
    with pytest.raises(InvalidInputError) as info:
        sample(model, 0, np.random.default_rng(1))
    logger.info(info)


def test_fit_sample_round_trip():
    """Fitting a large sample of a known model recovers the model parameters.
    """
    model = _model()
    size = 10000
    instances = sample(model, size, np.random.default_rng(17))
    fitted = fit(Dataset(_schema(), instances, [ACCEPT] * size), regularization=0.)
    assert fitted.continuous_features == model.continuous_features
    standard_errors = np.sqrt(np.diag(model.covariance) / size)
    pulls = (fitted.mean - model.mean) / standard_errors
    logger.info(f'Mean pulls: {pulls}')
    assert (np.abs(pulls) < 3.).all()
    assert np.allclose(np.diag(fitted.covariance), np.diag(model.covariance), rtol=0.1)
    assert np.allclose(fitted.categorical_marginals[JOB], model.categorical_marginals[JOB],
        atol=0.02)


def test_default_model():
    """Test the model built out of the schema domains.
    """
    schema = FeatureSchema.from_dict({
        'features': [
            {'name': 'age', 'kind': 'continuous', 'domain': [18, 78]},
            {'name': 'job', 'kind': 'categorical', 'categories': ['a', 'b', 'c', 'd']}
        ],
        'class_labels': ['accept', 'deny']
    })
    model = default_model(schema)
    assert np.allclose(model.mean, [48.])
    assert np.allclose(model.covariance, [[225.]])
    assert np.allclose(model.categorical_marginals[1], 0.25)
    with pytest.raises(InvalidInputError) as info:
        default_model(_schema())
    logger.info(info)


def test_callable_oracle():
    """Label instances with an in-process oracle.
    """
    schema = _schema()
    instances = np.array([[30., CLERK, 1000.], [50., MANAGER, 1000.]])
    assert label_with_oracle(instances, _oracle, schema).tolist() == [ACCEPT, DENY]
    assert label_with_oracle(instances, lambda x: [1, 0], schema).tolist() == [DENY, ACCEPT]
    assert label_with_oracle(np.empty((0, 3)), _oracle, schema).size == 0


def test_callable_oracle_errors():
    """Test the oracle failure modes.
    """
    schema = _schema()
    instances = np.array([[30., CLERK, 1000.], [50., MANAGER, 1000.], [60., CLERK, 0.]])
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, lambda x: ['deny'], schema)
    logger.info(info)
    assert info.value.row_index == 1
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, lambda x: ['deny'] * 4, schema)
    logger.info(info)
    assert info.value.row_index is None
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, lambda x: ['deny', 'maybe', 'deny'], schema)
    logger.info(info)
    assert info.value.row_index == 1
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, lambda x: 1 / 0, schema)
    logger.info(info)


def test_command_oracle(tmp_path):
    """Label instances with an external executable.
    """
    script = tmp_path / 'oracle.py'
    script.write_text(ORACLE_SCRIPT)
    schema = _schema()
    instances = np.array([[30., CLERK, 1000.], [50., MANAGER, 1000.], [41., UNEMPLOYED, 0.]])
    labels = label_with_oracle(instances, f'{sys.executable} {script}', schema)
    assert labels.tolist() == [ACCEPT, DENY, DENY]


def test_command_oracle_errors(tmp_path):
    """Test the failure modes of external oracles.
    """
    schema = _schema()
    instances = np.array([[30., CLERK, 1000.]])
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, str(tmp_path / 'not_there'), schema)
    logger.info(info)
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, f'{sys.executable} -c "import sys; sys.exit(3)"', schema)
    logger.info(info)
    with pytest.raises(OracleError) as info:
        label_with_oracle(instances, f'{sys.executable} -c "pass"', schema)
    logger.info(info)
    assert info.value.row_index == 0


def test_synthesize():
    """Test the generation of a surrogate dataset.
    """
    schema = _schema()
    dataset = synthesize(_model(), 200, _oracle, schema, seed=7)
    assert len(dataset) == 200
    assert not dataset.has_truth()
    assert np.array_equal(dataset.oracle_labels, (dataset.instances[:, AGE] > 40.).astype(int))
    other = synthesize(_model(), 200, _oracle, schema, seed=7)
    assert np.array_equal(dataset.instances, other.instances)
    with pytest.raises(InvalidInputError) as info:
        synthesize(GaussianModel.from_params([0.], [[1.]]), 10, _oracle, schema)
    logger.info(info)
