"""Evaluation engine: entity scoring, pair combination, ranking.

Image and service values are weighted sums of the entity's normalized
numerical attribute values, gated by the requirement check: an alternative
failing more requirements than the relaxation level gets value 0 and is
excluded from the normalization population, so eliminated alternatives
cannot distort the relative values of the survivors. Survivor values then
sum to 1 per population.

Combinations pair every image with every service. Pairs without an explicit
dependency entry are infeasible and worth 0; feasible pairs blend the two
sides additively (w_a * f + w_s * g) or multiplicatively (f * g, balance-
seeking, weights ignored). The integrated variant instead scores each
feasible pair as a single alternative under one hierarchy whose leaves are
namespaced ``image.<key>`` / ``service.<key>``.

All orderings are total: sorting is by value descending with ties broken by
ascending id(s), so identical inputs always produce identical rankings.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from operator import itemgetter
from typing import NamedTuple

from .ahp import ConsistencyWarning, GoalHierarchy, global_weights, normalize_alternatives
from .catalog import Catalog, CatalogEntity, DependencySet, EntityKind
from .errors import HierarchyError, NoFeasibleCombinationError, ValidationError
from .requirements import Requirement, check


class EvaluationResult(NamedTuple):
    """Per-alternative outcome: relative value, failures, and 1-based rank."""

    entity_id: str
    value: float
    failure_count: int
    rank: int


class Combiner(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class CombinationWeights:
    """Trade-off between image and service influence on the combined value."""

    image_weight: float = 0.5
    service_weight: float = 0.5
    combiner: Combiner = Combiner.ADDITIVE

    def __post_init__(self):
        if self.image_weight < 0 or self.service_weight < 0:
            raise ValidationError("combination weights must be non-negative")
        if abs(self.image_weight + self.service_weight - 1.0) > 1e-9:
            raise ValidationError("combination weights must sum to 1")


class CombinedSolution(NamedTuple):
    """One (image, service) pair row; a NamedTuple keeps m*n enumerations cheap."""

    image_id: str
    service_id: str
    combined_value: float
    image_value: float
    service_value: float
    feasible: bool


@dataclass(frozen=True)
class EvaluationOutcome:
    """Results plus the effective weights and warnings that produced them."""

    results: list[EvaluationResult]
    weights: dict[str, float]
    relaxation_level: int
    warnings: tuple[ConsistencyWarning, ...]


def _chunked(items: list, chunks: int) -> list[list]:
    size = max(1, (len(items) + chunks - 1) // chunks)
    return [items[i : i + size] for i in range(0, len(items), size)]


def evaluate_images(
    catalog: Catalog,
    requirements: list[Requirement],
    hierarchy: GoalHierarchy,
    relaxation_level: int,
    parallel: bool = False,
) -> EvaluationOutcome:
    """Score all images; failing more than relaxation_level requirements => 0."""
    return _evaluate_with_schema(
        catalog.images, catalog.image_schema, EntityKind.VM_IMAGE,
        requirements, hierarchy, relaxation_level, parallel,
    )


def evaluate_services(
    catalog: Catalog,
    requirements: list[Requirement],
    hierarchy: GoalHierarchy,
    relaxation_level: int,
    parallel: bool = False,
) -> EvaluationOutcome:
    """Score all services; mirrors evaluate_images over the service schema."""
    return _evaluate_with_schema(
        catalog.services, catalog.service_schema, EntityKind.INFRA_SERVICE,
        requirements, hierarchy, relaxation_level, parallel,
    )


def _evaluate_with_schema(
    entities, schema, kind, requirements, hierarchy, relaxation_level, parallel
) -> EvaluationOutcome:
    if not entities:
        raise ValidationError(f"no {kind.value} entities to evaluate")
    if relaxation_level < 0:
        raise ValidationError("relaxation level must be >= 0")
    for req in requirements:
        if req.target_kind is not kind:
            raise ValidationError(
                f"requirement on {req.target_kind.value} passed to {kind.value} evaluation"
            )
        req.validate_against(schema)
    for key in hierarchy.leaf_keys():
        if key not in schema.numerical:
            raise HierarchyError(
                f"hierarchy leaf {key!r} is not a numerical {kind.value} attribute"
            )

    derived = global_weights(hierarchy)
    if requirements:
        failures = {e.id: check(e, requirements).failure_count for e in entities}
        survivors = [e for e in entities if failures[e.id] <= relaxation_level]
    else:
        failures = dict.fromkeys((e.id for e in entities), 0)
        survivors = list(entities)

    values: dict[str, float] = dict.fromkeys((e.id for e in entities), 0.0)
    if survivors:
        columns = [
            (
                derived.weights[key],
                normalize_alternatives(
                    [e.numerical[key] for e in survivors], schema.influence(key)
                ),
            )
            for key in hierarchy.leaf_keys()
        ]

        def score(batch: list[tuple[int, CatalogEntity]]) -> list[tuple[str, float]]:
            return [
                (entity.id, sum(w * column[i] for w, column in columns))
                for i, entity in batch
            ]

        indexed = list(enumerate(survivors))
        if parallel and len(indexed) > 1:
            with ThreadPoolExecutor() as pool:
                batches = list(pool.map(score, _chunked(indexed, 8)))
            scored = [pair for batch in batches for pair in batch]
        else:
            scored = score(indexed)
        for entity_id, value in scored:
            values[entity_id] = value

    order = sorted(entities, key=lambda e: (-values[e.id], e.id))
    results = [
        EvaluationResult(e.id, values[e.id], failures[e.id], rank)
        for rank, e in enumerate(order, start=1)
    ]
    return EvaluationOutcome(results, derived.weights, relaxation_level, derived.warnings)


def combine(
    image_results: list[EvaluationResult],
    service_results: list[EvaluationResult],
    dependencies: DependencySet | None,
    weights: CombinationWeights,
    parallel: bool = False,
) -> list[CombinedSolution]:
    """Enumerate and value all (image, service) pairs, sorted best first.

    ``dependencies=None`` treats every pair as feasible (the relaxed setup
    used for scaling runs); otherwise pairs missing from the dependency set
    are infeasible and get combined value 0.
    """
    pairs = dependencies.pairs if dependencies is not None else None
    additive = weights.combiner is Combiner.ADDITIVE
    w_a, w_s = weights.image_weight, weights.service_weight
    services = [(r.entity_id, r.value) for r in service_results]
    row = CombinedSolution

    def build(batch: list[EvaluationResult]) -> list[CombinedSolution]:
        rows = []
        append = rows.append
        for ir in batch:
            iid, f = ir.entity_id, ir.value
            weighted_f = w_a * f
            if pairs is None:
                for sid, g in services:
                    append(row(iid, sid, weighted_f + w_s * g if additive else f * g,
                               f, g, True))
            else:
                for sid, g in services:
                    if (iid, sid) in pairs:
                        append(row(iid, sid, weighted_f + w_s * g if additive else f * g,
                                   f, g, True))
                    else:
                        append(row(iid, sid, 0.0, f, g, False))
        return rows

    if parallel and len(image_results) > 1:
        with ThreadPoolExecutor() as pool:
            batches = list(pool.map(build, _chunked(image_results, 8)))
        solutions = [r for batch in batches for r in batch]
    else:
        solutions = build(image_results)
    # Equivalent to sorting by (-value, image_id, service_id): the stable
    # value pass preserves the id order established by the first pass.
    solutions.sort(key=itemgetter(0, 1))
    solutions.sort(key=itemgetter(2), reverse=True)
    return solutions


def best_combination(solutions: list[CombinedSolution]) -> CombinedSolution:
    """Maximal feasible solution; ties go to the lexicographically least pair.

    Raises NoFeasibleCombinationError when no pair is feasible: that outcome
    must prompt requirement revision rather than suggest an undeployable
    migration with value 0.
    """
    best: CombinedSolution | None = None
    for solution in solutions:
        if not solution.feasible:
            continue
        if (
            best is None
            or solution.combined_value > best.combined_value
            or (
                solution.combined_value == best.combined_value
                and (solution.image_id, solution.service_id) < (best.image_id, best.service_id)
            )
        ):
            best = solution
    if best is None:
        raise NoFeasibleCombinationError("no feasible (image, service) combination")
    return best


@dataclass(frozen=True)
class IntegratedOutcome:
    solutions: list[CombinedSolution]
    weights: dict[str, float]
    relaxation_level: int
    warnings: tuple[ConsistencyWarning, ...]


def split_integrated_key(key: str) -> tuple[EntityKind, str]:
    prefix, _, attr = key.partition(".")
    if prefix == "image" and attr:
        return EntityKind.VM_IMAGE, attr
    if prefix == "service" and attr:
        return EntityKind.INFRA_SERVICE, attr
    raise HierarchyError(
        f"integrated hierarchy leaf {key!r} must be namespaced image.<key> or service.<key>"
    )


def evaluate_integrated(
    catalog: Catalog,
    image_requirements: list[Requirement],
    service_requirements: list[Requirement],
    hierarchy: GoalHierarchy,
    relaxation_level: int,
    dependencies: DependencySet | None = None,
) -> IntegratedOutcome:
    """Score feasible pairs as single alternatives under one hierarchy.

    A pair's attribute vector concatenates its image and service attributes;
    its failure count is the total across both requirement sets. Infeasible
    pairs and pairs failing more than relaxation_level requirements are
    excluded from the normalization population and valued 0.
    """
    if not catalog.images or not catalog.services:
        raise ValidationError("integrated evaluation needs images and services")
    if dependencies is None:
        dependencies = catalog.dependencies
    for req in image_requirements:
        req.validate_against(catalog.image_schema)
    for req in service_requirements:
        req.validate_against(catalog.service_schema)

    leaf_keys = hierarchy.leaf_keys()
    split = {key: split_integrated_key(key) for key in leaf_keys}
    for key, (kind, attr) in split.items():
        if attr not in catalog.schema_for(kind).numerical:
            raise HierarchyError(
                f"hierarchy leaf {key!r} is not a numerical {kind.value} attribute"
            )

    derived = global_weights(hierarchy)
    image_reports = {e.id: check(e, image_requirements) for e in catalog.images}
    service_reports = {e.id: check(e, service_requirements) for e in catalog.services}

    feasible: list[tuple[CatalogEntity, CatalogEntity]] = []
    infeasible: list[tuple[CatalogEntity, CatalogEntity]] = []
    for image in catalog.images:
        for service in catalog.services:
            if dependencies.contains(image.id, service.id):
                feasible.append((image, service))
            else:
                infeasible.append((image, service))

    survivors = [
        (image, service)
        for image, service in feasible
        if image_reports[image.id].failure_count + service_reports[service.id].failure_count
        <= relaxation_level
    ]

    pair_values: dict[tuple[str, str], tuple[float, float]] = {}
    if survivors:
        normalized = {}
        for key in leaf_keys:
            kind, attr = split[key]
            if kind is EntityKind.VM_IMAGE:
                column = [image.numerical[attr] for image, _ in survivors]
            else:
                column = [service.numerical[attr] for _, service in survivors]
            normalized[key] = normalize_alternatives(
                column, catalog.schema_for(kind).influence(attr)
            )
        for i, (image, service) in enumerate(survivors):
            image_part = 0.0
            service_part = 0.0
            for key in leaf_keys:
                contribution = derived.weights[key] * normalized[key][i]
                if split[key][0] is EntityKind.VM_IMAGE:
                    image_part += contribution
                else:
                    service_part += contribution
            pair_values[(image.id, service.id)] = (image_part, service_part)

    solutions: list[CombinedSolution] = []
    for image, service in feasible:
        image_part, service_part = pair_values.get((image.id, service.id), (0.0, 0.0))
        solutions.append(
            CombinedSolution(
                image.id, service.id, image_part + service_part,
                image_part, service_part, True,
            )
        )
    for image, service in infeasible:
        solutions.append(CombinedSolution(image.id, service.id, 0.0, 0.0, 0.0, False))
    solutions.sort(key=lambda s: (-s.combined_value, s.image_id, s.service_id))
    return IntegratedOutcome(solutions, derived.weights, relaxation_level, derived.warnings)
