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

"""Dataset ingestion, serialization and splitting.

Datasets live on disk as plain csv files with a header row listing the features
in schema order, followed by the ``bb_label`` column (the black-box predictions)
and, optionally, by the ``true_label`` column (the ground truth). Categorical
values and labels are written by name.
"""

from __future__ import annotations

import pathlib
import re
from typing import Sequence

import numpy as np
import pandas as pd

from glocalx import config, logger
from glocalx.errors import InvalidInputError, ParseError
from glocalx.rules import Dataset, FeatureSchema, read_schema
from glocalx.utils import check_input_file


ORACLE_LABEL_COLUMN = 'bb_label'
TRUTH_LABEL_COLUMN = 'true_label'
SPLIT_SUFFIXES = ('bb', 'le', 'ts')

_LINE_PATTERN = re.compile(r'line (\d+)')


def _to_float(token: str) -> float:
    """Convert a string to a finite float, returning NaN on failure.
    """
    try:
        value = float(token)
    except ValueError:
        return np.nan
    return value if np.isfinite(value) else np.nan


def _first_bad_line(bad: pd.Series) -> int:
    """Return the file line number of the first flagged row of the csv body.

    The header sits on line 1, hence the offset.
    """
    return int(np.flatnonzero(bad.to_numpy())[0]) + 2


def _parse_continuous(column: pd.Series, name: str) -> np.ndarray:
    """Parse a continuous column, imputing the missing values with the column mean.
    """
    missing = column == ''
    values = column.map(_to_float)
    bad = values.isna() & ~missing
    if bad.any():
        line = _first_bad_line(bad)
        raise ParseError(f'Invalid numeric value "{column[bad].iloc[0]}" for feature {name}', line)
    if len(column) > 0 and missing.all():
        raise ParseError(f'No values for feature {name}')
    if missing.any():
        mean = values[~missing].mean()
        logger.warning(f'Imputing {missing.sum()} missing value(s) for feature {name} '
            f'with the mean ({mean:.6g})...')
        values[missing] = mean
    return values.to_numpy(dtype=float)


def _parse_categorical(column: pd.Series, name: str, categories: Sequence[str]) -> np.ndarray:
    """Parse a categorical column, imputing the missing values with the mode.
    """
    missing = column == ''
    codes = column.map({category: i for i, category in enumerate(categories)})
    bad = codes.isna() & ~missing
    if bad.any():
        line = _first_bad_line(bad)
        raise ParseError(f'Unknown category "{column[bad].iloc[0]}" for feature {name}', line)
    if len(column) > 0 and missing.all():
        raise ParseError(f'No values for feature {name}')
    if missing.any():
        # np.argmax picks the lowest category index among ties.
        mode = int(np.argmax(np.bincount(codes[~missing].astype(int),
            minlength=len(categories))))
        logger.warning(f'Imputing {missing.sum()} missing value(s) for feature {name} '
            f'with the mode ({categories[mode]})...')
        codes[missing] = mode
    return codes.to_numpy(dtype=float)


def _parse_labels(column: pd.Series, name: str, schema: FeatureSchema) -> np.ndarray:
    """Parse a label column.
    """
    mapping = {label: i for i, label in enumerate(schema.class_labels)}
    for i in range(len(schema.class_labels)):
        mapping.setdefault(str(i), i)
    labels = column.map(mapping)
    bad = labels.isna()
    if bad.any():
        line = _first_bad_line(bad)
        raise ParseError(f'Invalid {name} "{column[bad].iloc[0]}"', line)
    return labels.to_numpy(dtype=int)


def load_csv(file_path: str | pathlib.Path, schema: FeatureSchema | str | pathlib.Path) -> Dataset:
    """Load a dataset from a csv file.

    Missing continuous values are replaced by the column mean, and missing
    categorical values by the column mode.

    Parameters
    ----------
    file_path
        Path to the input csv file.

    schema
        The feature schema (or the path to the corresponding json file).

    Returns
    -------
    Dataset
        The dataset.
    """
    if not isinstance(schema, FeatureSchema):
        schema = read_schema(schema)
    file_path = check_input_file(file_path, '.csv')
    logger.info(f'Loading dataset from {file_path}...')
    try:
        raw = pd.read_csv(file_path, header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as exception:
        raise ParseError(f'Empty file {file_path}', 1) from exception
    except pd.errors.ParserError as exception:
        match = _LINE_PATTERN.search(str(exception))
        line = int(match.group(1)) if match else None
        raise ParseError(f'Malformed csv file {file_path} ({exception})', line) from exception
    header = [str(token).strip() for token in raw.iloc[0]]
    body = raw.iloc[1:].reset_index(drop=True)
    num_features = schema.num_features
    if header[:num_features] != schema.feature_names():
        raise ParseError(f'Header {header} does not match the schema features '
            f'{schema.feature_names()}', 1)
    extra = header[num_features:]
    if extra not in ([ORACLE_LABEL_COLUMN], [ORACLE_LABEL_COLUMN, TRUTH_LABEL_COLUMN]):
        raise ParseError(f'Expected label column(s) {ORACLE_LABEL_COLUMN} '
            f'[, {TRUTH_LABEL_COLUMN}] after the features, got {extra}', 1)
    # Short rows are padded with NaN, while empty fields are read as ''.
    short = body.isna().any(axis=1)
    if short.any():
        raise ParseError(f'Row length mismatch (expected {len(header)} fields)',
            _first_bad_line(short))
    for column in body.columns:
        body[column] = body[column].str.strip()
    columns = []
    for i, feature in enumerate(schema.features):
        if feature.is_categorical():
            columns.append(_parse_categorical(body[i], feature.name, feature.categories))
        else:
            columns.append(_parse_continuous(body[i], feature.name))
    instances = np.column_stack(columns) if columns else np.empty((len(body), 0))
    oracle_labels = _parse_labels(body[num_features], ORACLE_LABEL_COLUMN, schema)
    truth_labels = None
    if len(extra) == 2:
        truth_labels = _parse_labels(body[num_features + 1], TRUTH_LABEL_COLUMN, schema)
    dataset = Dataset(schema, instances.reshape(len(body), num_features), oracle_labels,
        truth_labels)
    logger.info(f'Done, {len(dataset)} instance(s) loaded.')
    return dataset


def instances_frame(instances: np.ndarray, schema: FeatureSchema) -> pd.DataFrame:
    """Return a string DataFrame with the instances in their on-disk representation
    (shortest round-tripping repr for continuous values, names for categories).
    """
    instances = np.asarray(instances, dtype=float)
    data = {}
    for i, feature in enumerate(schema.features):
        column = instances[:, i]
        if feature.is_categorical():
            data[feature.name] = [feature.categories[int(value)] for value in column]
        else:
            data[feature.name] = [repr(float(value)) for value in column]
    return pd.DataFrame(data, columns=schema.feature_names())


def write_csv(dataset: Dataset, file_path: str | pathlib.Path) -> None:
    """Write a dataset to a csv file that can be read back with :meth:`load_csv`.
    """
    schema = dataset.schema
    frame = instances_frame(dataset.instances, schema)
    frame[ORACLE_LABEL_COLUMN] = [schema.class_labels[label] for label in dataset.oracle_labels]
    if dataset.has_truth():
        frame[TRUTH_LABEL_COLUMN] = [schema.class_labels[label] for label in dataset.truth_labels]
    logger.info(f'Writing {len(dataset)} instance(s) to {file_path}...')
    frame.to_csv(file_path, index=False)


def split(dataset: Dataset, ratios: Sequence[float] = None,
    seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """Shuffle a dataset and split it into three contiguous parts.

    Parameters
    ----------
    dataset
        The dataset to be split.

    ratios
        The fractions of instances in the three parts (defaults to the
        ``split.ratios`` configuration value). When the ratios sum to less than
        one the remaining instances are left out.

    seed
        The seed for the shuffle.

    Returns
    -------
    tuple[Dataset, Dataset, Dataset]
        The black-box training, local-explanation and test datasets.
    """
    if ratios is None:
        ratios = config.get('split.ratios')
    ratios = np.asarray(ratios, dtype=float)
    if ratios.shape != (3, ):
        raise InvalidInputError(f'Three split ratios expected, got {ratios}')
    if (ratios < 0.).any() or ratios.sum() > 1. + 1.e-9:
        raise InvalidInputError(f'Invalid split ratios {ratios}')
    num_instances = len(dataset)
    permutation = np.random.default_rng(seed).permutation(num_instances)
    bounds = np.minimum(np.round(np.cumsum(ratios) * num_instances).astype(int), num_instances)
    lo = 0
    parts = []
    for hi in bounds:
        parts.append(dataset.subset(permutation[lo:hi]))
        lo = hi
    logger.info(f'Dataset split into {[len(part) for part in parts]} instance(s).')
    return tuple(parts)


def write_split(dataset: Dataset, prefix: str | pathlib.Path, ratios: Sequence[float] = None,
    seed: int = 0) -> list[pathlib.Path]:
    """Split a dataset and write the three parts to ``<prefix>_bb.csv``,
    ``<prefix>_le.csv`` and ``<prefix>_ts.csv``.
    """
    file_paths = []
    for suffix, part in zip(SPLIT_SUFFIXES, split(dataset, ratios, seed)):
        file_path = pathlib.Path(f'{prefix}_{suffix}.csv')
        write_csv(part, file_path)
        file_paths.append(file_path)
    return file_paths
