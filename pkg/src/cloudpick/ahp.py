"""AHP core: pairwise matrices, priority vectors, hierarchy weight propagation.

Criterion weights are derived from pairwise-comparison matrices via the
principal eigenvector, computed with power iteration (reciprocal positive
matrices have a dominant positive eigenvalue, so the iteration converges;
the cap is a safety net). Judgment coherence is reported as Saaty's
consistency ratio CR = ((lambda_max - k) / (k - 1)) / RI(k); CR above 0.1
yields a warning, never a hard failure.

Alternative attribute values are made summable across heterogeneous units
by distributive normalization over the alternative population: positive-
influence values are divided by the population sum, negative-influence
values are reciprocal-transformed first. Either way the normalized column
sums to 1, which keeps every evaluation value on the relative (0-1) scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import Influence
from .errors import ConvergenceError, HierarchyError

SAATY_MIN = 1.0 / 9.0
SAATY_MAX = 9.0

# Saaty's random-index constants; orders above 10 are rejected at input.
RANDOM_INDEX = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}

MAX_ORDER = 10
RECIPROCITY_TOL = 1e-9
POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_CAP = 10_000
CONSISTENCY_THRESHOLD = 0.1
RECIPROCAL_EPSILON = 1e-9


@dataclass(frozen=True)
class PairwiseMatrix:
    """Square reciprocal matrix of positive comparison ratios."""

    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        k = len(self.entries)
        if k < 1:
            raise HierarchyError("pairwise matrix needs order >= 1")
        if k > MAX_ORDER:
            raise HierarchyError(f"pairwise matrix order {k} exceeds supported maximum {MAX_ORDER}")
        for i, row in enumerate(self.entries):
            if len(row) != k:
                raise HierarchyError("pairwise matrix must be square")
            for j, value in enumerate(row):
                if not value > 0:
                    raise HierarchyError(f"pairwise entry ({i},{j}) must be positive")
        for i in range(k):
            if self.entries[i][i] != 1.0:
                raise HierarchyError(f"pairwise diagonal entry ({i},{i}) must be exactly 1")
            for j in range(i + 1, k):
                if abs(self.entries[i][j] * self.entries[j][i] - 1.0) > RECIPROCITY_TOL:
                    raise HierarchyError(f"pairwise entries ({i},{j}) and ({j},{i}) not reciprocal")

    @property
    def order(self) -> int:
        return len(self.entries)

    @classmethod
    def from_rows(cls, rows) -> "PairwiseMatrix":
        return cls(tuple(tuple(float(v) for v in row) for row in rows))

    @classmethod
    def indifferent(cls, order: int) -> "PairwiseMatrix":
        return cls(tuple(tuple(1.0 for _ in range(order)) for _ in range(order)))

    @classmethod
    def from_judgments(cls, order: int, judgments) -> "PairwiseMatrix":
        """Build from upper-triangle (i, j, ratio) records; reciprocals implied.

        Unstated pairs default to indifference (ratio 1). Ratios are user
        input and must stay on the Saaty scale [1/9, 9].
        """
        rows = [[1.0] * order for _ in range(order)]
        for i, j, ratio in judgments:
            if not (0 <= i < order and 0 <= j < order) or i == j:
                raise HierarchyError(f"judgment indices ({i},{j}) invalid for order {order}")
            ratio = float(ratio)
            if not (SAATY_MIN - RECIPROCITY_TOL <= ratio <= SAATY_MAX + RECIPROCITY_TOL):
                raise HierarchyError(
                    f"judgment ratio {ratio:g} for ({i},{j}) outside Saaty scale [1/9, 9]"
                )
            rows[i][j] = ratio
            rows[j][i] = 1.0 / ratio
        return cls.from_rows(rows)


@dataclass(frozen=True)
class PriorityResult:
    weights: tuple[float, ...]
    consistency_ratio: float
    lambda_max: float


def priority_vector(matrix: PairwiseMatrix) -> PriorityResult:
    """Normalized principal eigenvector and consistency ratio of a matrix.

    Power iteration from the uniform vector, normalizing each iterate to
    sum 1, stopping when successive iterates agree within 1e-10.
    """
    k = matrix.order
    if k == 1:
        return PriorityResult((1.0,), 0.0, 1.0)
    a = np.asarray(matrix.entries, dtype=float)
    w = np.full(k, 1.0 / k)
    for _ in range(POWER_ITERATION_CAP):
        nxt = a @ w
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - w)) < POWER_ITERATION_TOL:
            w = nxt
            break
        w = nxt
    else:
        raise ConvergenceError(
            f"power iteration did not converge within {POWER_ITERATION_CAP} iterations"
        )
    lambda_max = float((a @ w).sum())
    if k <= 2:
        cr = 0.0
    else:
        ci = (lambda_max - k) / (k - 1)
        cr = ci / RANDOM_INDEX[k]
    return PriorityResult(tuple(float(x) for x in w), cr, lambda_max)


def normalize_alternatives(
    values, influence: Influence, epsilon: float = RECIPROCAL_EPSILON
) -> list[float]:
    """Distributive normalization of one attribute column onto the 0-1 scale.

    Positive influence: value / column sum. Negative influence: reciprocal
    transform 1/(value + epsilon) first, then the same sum normalization.
    An all-zero positive column degenerates to the uniform distribution.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValueError("normalization needs at least one value")
    if any(v < 0 for v in values):
        raise ValueError("attribute values must be non-negative")
    if influence is Influence.NEGATIVE:
        values = [1.0 / (v + epsilon) for v in values]
    total = sum(values)
    if total == 0.0:
        return [1.0 / len(values)] * len(values)
    return [v / total for v in values]


# ---------------------------------------------------------------------------
# Goal hierarchies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HierarchyNode:
    """Goal (internal, with a comparison matrix over children) or leaf criterion."""

    name: str
    children: tuple["HierarchyNode", ...] = ()
    comparison: PairwiseMatrix | None = None
    attribute_key: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


def goal(name: str, children, comparison: PairwiseMatrix | None = None) -> HierarchyNode:
    children = tuple(children)
    if comparison is None:
        comparison = PairwiseMatrix.indifferent(len(children))
    return HierarchyNode(name=name, children=children, comparison=comparison)


def criterion(name: str, attribute_key: str | None = None) -> HierarchyNode:
    return HierarchyNode(name=name, attribute_key=attribute_key or name)


@dataclass(frozen=True)
class GoalHierarchy:
    """Weighted goal tree whose leaves bind to numerical attribute keys."""

    root: HierarchyNode

    def __post_init__(self):
        names: set[str] = set()
        keys: set[str] = set()
        leaves = 0
        for node in self.walk():
            if node.name in names:
                raise HierarchyError(f"duplicate node name {node.name!r}")
            names.add(node.name)
            if node.is_leaf:
                leaves += 1
                if not node.attribute_key:
                    raise HierarchyError(f"leaf {node.name!r} missing attribute key")
                if node.attribute_key in keys:
                    raise HierarchyError(f"duplicate leaf attribute key {node.attribute_key!r}")
                keys.add(node.attribute_key)
            else:
                if node.attribute_key is not None:
                    raise HierarchyError(f"internal node {node.name!r} cannot bind an attribute")
                if node.comparison is None or node.comparison.order != len(node.children):
                    raise HierarchyError(
                        f"node {node.name!r} needs a comparison matrix of order "
                        f"{len(node.children)}"
                    )
        if leaves == 0:
            raise HierarchyError("hierarchy has no leaf criteria")

    def walk(self) -> list[HierarchyNode]:
        out: list[HierarchyNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def leaves(self) -> list[HierarchyNode]:
        return [node for node in self.walk() if node.is_leaf]

    def leaf_keys(self) -> list[str]:
        return [node.attribute_key for node in self.leaves()]

    def find(self, name: str) -> HierarchyNode | None:
        for node in self.walk():
            if node.name == name:
                return node
        return None


@dataclass(frozen=True)
class ConsistencyWarning:
    node: str
    consistency_ratio: float

    def __str__(self) -> str:
        return (
            f"pairwise judgments at {self.node!r} have consistency ratio "
            f"{self.consistency_ratio:.3f} > {CONSISTENCY_THRESHOLD}"
        )


@dataclass(frozen=True)
class GlobalWeights:
    """Leaf attribute weights (sum 1) plus any consistency warnings."""

    weights: dict[str, float]
    warnings: tuple[ConsistencyWarning, ...]


def global_weights(
    hierarchy: GoalHierarchy, cr_threshold: float = CONSISTENCY_THRESHOLD
) -> GlobalWeights:
    """Propagate local priority vectors down the tree.

    Each leaf's global weight is the product of the local weights along its
    root-to-leaf path; the result sums to 1 because every local vector does.
    """
    weights: dict[str, float] = {}
    warnings: list[ConsistencyWarning] = []

    def descend(node: HierarchyNode, weight: float) -> None:
        if node.is_leaf:
            weights[node.attribute_key] = weight
            return
        result = priority_vector(node.comparison)
        if result.consistency_ratio > cr_threshold:
            warnings.append(ConsistencyWarning(node.name, result.consistency_ratio))
        for child, local in zip(node.children, result.weights):
            descend(child, weight * local)

    descend(hierarchy.root, 1.0)
    return GlobalWeights(weights, tuple(warnings))
