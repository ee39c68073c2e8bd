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

"""Hierarchical aggregation of local explanations into a global theory.

Starting from one single-rule theory per local explanation, at each iteration
we draw a fresh batch of instances, sort all the pairs of theories by the
similarity of their coverage, and walk the queue until a pair is found whose
merge actually joins or cuts some rules and scores no worse (in the BIC sense)
than the plain union of the two. The first accepted merge replaces the pair, and
the process is repeated until only one theory is left or a given number of
consecutive scans of the queue (each on a fresh batch) yield no accepted merge. Every
accepted merge is recorded in a dendrogram, and the final theory is optionally
trimmed by keeping the rules with the highest fidelity.
"""

from __future__ import annotations

import dataclasses
import json
import math
import pathlib
from typing import Sequence

import numpy as np

from glocalx import logger
from glocalx.coverage import rule_fidelity, rule_mask, theory_mask
from glocalx.errors import InvalidInputError, ParseError
from glocalx.merge import merge
from glocalx.rules import Dataset, ExplanationTheory, Rule
from glocalx.scoring import bic
from glocalx.utils import check_input_file, natural_key


@dataclasses.dataclass
class RunConfig:

    """Configuration of an aggregation run.

    Parameters
    ----------
    batch_size
        The number of instances in each batch (clamped to the dataset size).

    alpha
        If not None, keep the top-ceil(alpha / 2) rules by fidelity for each class.

    alpha_q
        If not None, drop the rules with fidelity below the alpha_q-th percentile.

    seed
        The seed for the random number generator driving the batch draws.

    max_iterations
        Optional cap on the number of outer iterations (i.e., of batch draws).

    patience
        The number of consecutive iterations without an accepted merge (each
        one scanning the full pair queue on a fresh batch) before the
        aggregation halts.
    """

    batch_size: int = 128
    alpha: int = None
    alpha_q: float = None
    seed: int = 0
    max_iterations: int = None
    patience: int = 10

    def __post_init__(self) -> None:
        """Post-initialization.
        """
        if self.batch_size < 1:
            raise InvalidInputError(f'Invalid batch size {self.batch_size}')
        if self.alpha is not None and self.alpha_q is not None:
            raise InvalidInputError('Only one of alpha and alpha_q can be set')
        if self.alpha is not None and self.alpha < 1:
            raise InvalidInputError(f'Invalid alpha {self.alpha}')
        if self.alpha_q is not None and not 0. <= self.alpha_q <= 100.:
            raise InvalidInputError(f'Invalid alpha_q {self.alpha_q}')
        if self.max_iterations is not None and self.max_iterations < 1:
            raise InvalidInputError(f'Invalid maximum number of iterations {self.max_iterations}')
        if self.patience < 1:
            raise InvalidInputError(f'Invalid patience {self.patience}')



@dataclasses.dataclass(frozen=True)
class DendrogramNode:

    """A node of the merge dendrogram.

    Leaves correspond to the input theories, while internal nodes are the
    accepted merges, with pointers to their two children, the index of the
    batch draw that gated the merge and the BIC of the union of the children
    (before) and of the merged theory (after).
    """

    node_id: int
    theory_id: str
    size: int
    left: int = None
    right: int = None
    batch: int = None
    bic_before: float = None
    bic_after: float = None

    def is_leaf(self) -> bool:
        """Return True if the node is a leaf.
        """
        return self.left is None

    def to_dict(self) -> dict:
        """Return the node in a form suitable for json serialization.
        """
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> DendrogramNode:
        """Build a node from its json representation.
        """
        try:
            return cls(**data)
        except TypeError as exception:
            raise InvalidInputError(f'Malformed dendrogram node {data}: {exception}') \
                from exception



@dataclasses.dataclass
class Dendrogram:

    """Binary merge tree (or rather forest, when the aggregation halts with
    several theories left).
    """

    nodes: list[DendrogramNode] = dataclasses.field(default_factory=list)

    def __len__(self) -> int:
        """Return the number of nodes.
        """
        return len(self.nodes)

    def _node_id(self, theory_id: str) -> int:
        """Return the id of the node associated with a given theory.
        """
        for node in self.nodes:
            if node.theory_id == theory_id:
                return node.node_id
        raise InvalidInputError(f'No dendrogram node for theory {theory_id}')

    def add_leaf(self, theory: ExplanationTheory) -> DendrogramNode:
        """Add a leaf.
        """
        node = DendrogramNode(len(self.nodes), theory.id, len(theory))
        self.nodes.append(node)
        return node

    def add_merge(self, theory: ExplanationTheory, left: ExplanationTheory,
        right: ExplanationTheory, batch: int, bic_before: float,
        bic_after: float) -> DendrogramNode:
        """Add an internal node.
        """
        node = DendrogramNode(len(self.nodes), theory.id, len(theory),
            self._node_id(left.id), self._node_id(right.id), batch, bic_before, bic_after)
        self.nodes.append(node)
        return node

    def leaves(self) -> list[DendrogramNode]:
        """Return the leaves.
        """
        return [node for node in self.nodes if node.is_leaf()]

    def internal_nodes(self) -> list[DendrogramNode]:
        """Return the internal nodes.
        """
        return [node for node in self.nodes if not node.is_leaf()]

    def roots(self) -> list[DendrogramNode]:
        """Return the nodes that are nobody's children.
        """
        children = {node.left for node in self.nodes} | {node.right for node in self.nodes}
        return [node for node in self.nodes if node.node_id not in children]

    def dumps(self) -> str:
        """Serialize the dendrogram to a json string.
        """
        return json.dumps([node.to_dict() for node in self.nodes], indent=2)

    def write(self, file_path: str | pathlib.Path) -> None:
        """Write the dendrogram to a json file.
        """
        logger.info(f'Writing dendrogram to {file_path}...')
        with open(file_path, 'w', encoding='utf-8') as output_file:
            output_file.write(self.dumps())
            output_file.write('\n')

    @classmethod
    def read(cls, file_path: str | pathlib.Path) -> Dendrogram:
        """Read a dendrogram from a json file.
        """
        file_path = check_input_file(file_path, '.json')
        logger.info(f'Reading dendrogram from {file_path}...')
        with open(file_path, encoding='utf-8') as input_file:
            try:
                data = json.load(input_file)
            except json.JSONDecodeError as exception:
                raise ParseError(exception.msg, exception.lineno) from exception
        if not isinstance(data, list):
            raise InvalidInputError(f'Dendrogram file {file_path} must contain a json array')
        return cls([DendrogramNode.from_dict(item) for item in data])



def theories_from_rules(rules: Sequence[Rule]) -> list[ExplanationTheory]:
    """Wrap each rule into its own single-rule theory.
    """
    return [ExplanationTheory((rule, ), str(i)) for i, rule in enumerate(rules)]


def sample_batch(dataset: Dataset, size: int, rng: np.random.Generator) -> Dataset:
    """Draw a batch of instances uniformly, without replacement.

    Parameters
    ----------
    dataset
        The dataset to draw from.

    size
        The batch size (clamped to the dataset size).

    rng
        The random number generator.

    Returns
    -------
    Dataset
        The batch.
    """
    if size < 1:
        raise InvalidInputError(f'Invalid batch size {size}')
    indices = rng.choice(len(dataset), size=min(size, len(dataset)), replace=False)
    return dataset.subset(indices)


def sort_pairs(theories: Sequence[ExplanationTheory], dataset: Dataset,
    masks: np.ndarray = None) -> list[tuple[int, int]]:
    """Sort all the unordered pairs of theories by decreasing similarity.

    Ties are broken by the (smaller id, larger id) pair, in ascending order.

    Parameters
    ----------
    theories
        The theories.

    dataset
        The dataset the coverage is measured on.

    masks
        The optional, precomputed coverage masks of the theories (one row per
        theory) on the dataset.

    Returns
    -------
    list[tuple[int, int]]
        The pairs of positions in the input sequence, with i < j.
    """
    num_theories = len(theories)
    if num_theories < 2:
        raise InvalidInputError(f'Cannot sort pairs of {num_theories} theory(ies)')
    if masks is None:
        masks = np.array([theory_mask(theory, dataset.instances) for theory in theories])
    masks = np.asarray(masks, dtype=float)
    intersection = masks @ masks.T
    sizes = np.diag(intersection)
    first, second = np.triu_indices(num_theories, k=1)
    common = intersection[first, second]
    union = sizes[first] + sizes[second] - common
    similarity = np.divide(common, union, out=np.zeros_like(common), where=union > 0)
    order = sorted(range(num_theories), key=lambda i: natural_key(theories[i].id))
    rank = np.empty(num_theories, dtype=int)
    rank[order] = np.arange(num_theories)
    lo = np.minimum(rank[first], rank[second])
    hi = np.maximum(rank[first], rank[second])
    # np.lexsort uses the last key as the primary one.
    permutation = np.lexsort((hi, lo, -similarity))
    return [(int(first[k]), int(second[k])) for k in permutation]


def nearest_rank_percentile(values: Sequence[float], q: float) -> float:
    """Return the q-th percentile of a non-empty sequence of values, with the
    nearest-rank method.
    """
    values = np.sort(np.asarray(values, dtype=float))
    if len(values) == 0:
        raise InvalidInputError('Cannot calculate the percentile of an empty sequence')
    if not 0. <= q <= 100.:
        raise InvalidInputError(f'Invalid percentile {q}')
    # Rounding guards against things like 0.95 * 20 = 19.000000000000004.
    rank = max(1, math.ceil(round(q * len(values) / 100., 9)))
    return float(values[rank - 1])


def filter_alpha(theory: ExplanationTheory, alpha: int, dataset: Dataset) -> ExplanationTheory:
    """Keep the top-ceil(alpha / 2) rules by fidelity on the dataset for each
    class (ties to the lower rule id).
    """
    if alpha < 1:
        raise InvalidInputError(f'Invalid alpha {alpha}')
    quota = math.ceil(alpha / 2)
    fidelities = {rule.id: rule_fidelity(rule, dataset) for rule in theory}
    kept = set()
    for outcome in (0, 1):
        rules = [rule for rule in theory if rule.outcome == outcome]
        rules.sort(key=lambda rule: (-fidelities[rule.id], natural_key(rule.id)))
        kept.update(rule.id for rule in rules[:quota])
    rules = tuple(rule for rule in theory if rule.id in kept)
    logger.info(f'Top-{alpha} filter: {len(rules)} out of {len(theory)} rule(s) kept.')
    return ExplanationTheory(rules, theory.id)


def filter_alpha_q(theory: ExplanationTheory, alpha_q: float,
    dataset: Dataset) -> ExplanationTheory:
    """Drop the rules whose fidelity on the dataset is below the alpha_q-th
    percentile (nearest-rank) of the rule fidelities.
    """
    if not 0. <= alpha_q <= 100.:
        raise InvalidInputError(f'Invalid alpha_q {alpha_q}')
    if len(theory) == 0:
        return theory
    fidelities = [rule_fidelity(rule, dataset) for rule in theory]
    threshold = nearest_rank_percentile(fidelities, alpha_q)
    rules = tuple(rule for rule, value in zip(theory, fidelities) if value >= threshold)
    logger.info(f'Percentile-{alpha_q} filter (threshold {threshold:.3f}): '
        f'{len(rules)} out of {len(theory)} rule(s) kept.')
    return ExplanationTheory(rules, theory.id)


def filter_theory(theory: ExplanationTheory, config: RunConfig,
    dataset: Dataset) -> ExplanationTheory:
    """Apply the filter selected in the run configuration.
    """
    if config.alpha is not None and config.alpha_q is not None:
        raise InvalidInputError('Only one of alpha and alpha_q can be set')
    if config.alpha is not None:
        return filter_alpha(theory, config.alpha, dataset)
    if config.alpha_q is not None:
        return filter_alpha_q(theory, config.alpha_q, dataset)
    logger.warning('No filter configured, returning the unfiltered theory.')
    return theory


class _CoverCounts(dict):

    """Lazy cache of the number of rules of each theory covering each instance
    of a batch.
    """

    def __init__(self, batch: Dataset) -> None:
        """Constructor.
        """
        super().__init__()
        self.batch = batch

    def __missing__(self, theory: ExplanationTheory) -> np.ndarray:
        """Calculate the counts for a theory not seen yet.
        """
        counts = np.zeros(len(self.batch), dtype=int)
        for rule in theory:
            counts += rule_mask(rule, self.batch.instances)
        self[theory] = counts
        return counts



def run(theories: Sequence[ExplanationTheory], dataset: Dataset,
    config: RunConfig = None) -> tuple[ExplanationTheory, Dendrogram]:
    """Aggregate a list of single-rule theories into a global explanation theory.

    Input theories are re-identified by their position in the list (``'0'``,
    ``'1'``, ...), the k-th accepted merge gets the id ``str(num_theories + k)``,
    and every output rule has an id of the form ``<theory id>.<k>``.

    Parameters
    ----------
    theories
        The input theories, each holding exactly one rule.

    dataset
        The dataset (instances and black-box labels) the batches are drawn from.

    config
        The run configuration.

    Returns
    -------
    tuple[ExplanationTheory, Dendrogram]
        The final (filtered) theory and the merge dendrogram.
    """
    # pylint: disable=too-many-locals
    config = RunConfig() if config is None else config
    num_theories = len(theories)
    if num_theories < 2:
        raise InvalidInputError(f'At least two theories are needed, {num_theories} given')
    if len(dataset) == 0:
        raise InvalidInputError('Cannot run the aggregation on an empty dataset')
    current = []
    for i, theory in enumerate(theories):
        if len(theory) != 1:
            raise InvalidInputError(f'Input theory {theory.id} holds {len(theory)} rule(s), '
                'exactly one expected')
        for rule in theory:
            dataset.schema.check_premise(rule.premise)
        current.append(ExplanationTheory(theory.rules, str(i)).relabel())
    logger.info(f'Running aggregation on {num_theories} theories and {len(dataset)} '
        f'instance(s) (batch size {config.batch_size}, seed {config.seed})...')
    dendrogram = Dendrogram()
    masks = {}
    for theory in current:
        dendrogram.add_leaf(theory)
        masks[theory.id] = theory_mask(theory, dataset.instances)
    rng = np.random.default_rng(config.seed)
    next_id = num_theories
    iteration = failures = 0
    while len(current) > 1:
        if config.max_iterations is not None and iteration >= config.max_iterations:
            logger.info(f'Maximum number of iterations ({config.max_iterations}) reached.')
            break
        batch = sample_batch(dataset, config.batch_size, rng)
        pairs = sort_pairs(current, dataset, np.array([masks[theory.id] for theory in current]))
        counts = _CoverCounts(batch)
        accepted = None
        for i, j in pairs:
            left, right = current[i], current[j]
            # Nothing to join or cut unless some instance of the batch is covered twice.
            if (counts[left] + counts[right]).max() < 2:
                continue
            theory_id = str(next_id)
            union = left.union(right, theory_id)
            merged = merge(left, right, batch, theory_id)
            # A merge that neither joins nor cuts anything is a plain concatenation.
            if merged.same_logic(union):
                continue
            before = bic(union, batch)
            after = bic(merged, batch)
            if after.value <= before.value:
                accepted = (i, j, merged, before, after)
                break
            logger.debug(f'Merge of theories {left.id} and {right.id} rejected '
                f'(BIC {after.value:.3f} > {before.value:.3f}).')
        if accepted is None:
            failures += 1
            logger.debug(f'No acceptable merge found at iteration {iteration} '
                f'({failures} consecutive failure(s)).')
            iteration += 1
            if failures >= config.patience:
                logger.info(f'No acceptable merge found in {failures} consecutive iteration(s).')
                break
            continue
        i, j, merged, before, after = accepted
        left, right = current[i], current[j]
        logger.debug(f'Iteration {iteration}: theories {left.id} and {right.id} merged into '
            f'{merged.id} ({len(merged)} rule(s), BIC {before.value:.3f} -> {after.value:.3f}).')
        dendrogram.add_merge(merged, left, right, iteration, before.value, after.value)
        current = [theory for k, theory in enumerate(current) if k not in (i, j)] + [merged]
        del masks[left.id], masks[right.id]
        masks[merged.id] = theory_mask(merged, dataset.instances)
        next_id += 1
        iteration += 1
        failures = 0
    if len(current) == 1:
        theory = current[0]
    else:
        logger.warning(f'Aggregation halted with {len(current)} theories left, '
            'returning their union.')
        rules = tuple(rule for theory in current for rule in theory)
        theory = ExplanationTheory(rules, str(next_id))
    logger.info(f'Done, {len(dendrogram.internal_nodes())} merge(s) accepted, '
        f'{len(theory)} rule(s) before filtering.')
    return filter_theory(theory, config, dataset), dendrogram
