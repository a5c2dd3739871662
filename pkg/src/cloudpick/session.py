"""Session documents and the evaluation pipeline shared by CLI and server.

A session document bundles everything a run needs besides the catalog:
requirements, pairwise judgments over the goal hierarchies, combination
weights, the relaxation policy and the evaluation mode. The same YAML shape
is accepted from files (CLI) and request bodies (server), and the same
pipeline produces the result document for both, so the two surfaces cannot
drift apart numerically.

Default goal hierarchies:

* images: two goals, lowest cost and best quality, with hourly price and
  popularity as their criteria;
* services: three goals - lowest cost (hourly price), best latency (max and
  average latency) and best quality (a performance sub-goal over CPU, RAM
  and disk throughput, plus uptime);
* integrated: a root trade-off between the image and service subtrees with
  leaves namespaced ``image.<key>`` / ``service.<key>``.

All default judgments are indifferent (every ratio 1); sessions override
them per node with upper-triangle (i, j, ratio) records, may deselect
subtrees, or may define a fully custom tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import yaml

from .ahp import GoalHierarchy, HierarchyNode, PairwiseMatrix, criterion, goal
from .catalog import Catalog, EntityKind, generate_synthetic_catalog, load_catalog
from .errors import (
    EngineError,
    HierarchyError,
    NoFeasibleCombinationError,
    ValidationError,
)
from .evaluation import (
    CombinationWeights,
    CombinedSolution,
    Combiner,
    EvaluationResult,
    best_combination,
    combine,
    evaluate_images,
    evaluate_integrated,
    evaluate_services,
)
from .requirements import Requirement, RequirementOp, check, minimal_relaxation

MODE_TWO_PHASE = "two-phase"
MODE_INTEGRATED = "integrated"


# ---------------------------------------------------------------------------
# Default hierarchies
# ---------------------------------------------------------------------------


def default_image_hierarchy() -> GoalHierarchy:
    return GoalHierarchy(
        goal(
            "image_value",
            [
                goal("cheapest_image", [criterion("hourly_price")]),
                goal("best_image_quality", [criterion("popularity")]),
            ],
        )
    )


def default_service_hierarchy() -> GoalHierarchy:
    performance = goal(
        "performance",
        [
            criterion("cpu_performance"),
            criterion("ram_performance"),
            criterion("disk_performance"),
        ],
    )
    return GoalHierarchy(
        goal(
            "service_value",
            [
                goal("cheapest_service", [criterion("hourly_price")]),
                goal("best_latency", [criterion("max_latency"), criterion("avg_latency")]),
                goal("best_quality", [performance, criterion("uptime")]),
            ],
        )
    )


def _namespaced(node: HierarchyNode, prefix: str) -> HierarchyNode:
    if node.is_leaf:
        return HierarchyNode(
            name=f"{prefix}.{node.attribute_key}",
            attribute_key=f"{prefix}.{node.attribute_key}",
        )
    return HierarchyNode(
        name=f"{prefix}_{node.name}",
        children=tuple(_namespaced(child, prefix) for child in node.children),
        comparison=node.comparison,
    )


def default_integrated_hierarchy(
    image_root: HierarchyNode | None = None,
    service_root: HierarchyNode | None = None,
) -> GoalHierarchy:
    image_root = image_root or default_image_hierarchy().root
    service_root = service_root or default_service_hierarchy().root
    return GoalHierarchy(
        goal(
            "combined_value",
            [_namespaced(image_root, "image"), _namespaced(service_root, "service")],
        )
    )


def default_hierarchy(name: str) -> GoalHierarchy:
    if name == "image":
        return default_image_hierarchy()
    if name == "service":
        return default_service_hierarchy()
    if name == "integrated":
        return default_integrated_hierarchy()
    raise ValidationError(f"unknown hierarchy {name!r}", f"hierarchies.{name}")


# ---------------------------------------------------------------------------
# Hierarchy customization (deselect + judgments + custom trees)
# ---------------------------------------------------------------------------


def _prune(node: HierarchyNode, removed: set[str]) -> HierarchyNode | None:
    if node.name in removed:
        return None
    if node.is_leaf:
        return node
    kept: list[HierarchyNode] = []
    kept_indices: list[int] = []
    for index, child in enumerate(node.children):
        pruned = _prune(child, removed)
        if pruned is not None:
            kept.append(pruned)
            kept_indices.append(index)
    if not kept:
        return None
    entries = node.comparison.entries
    matrix = PairwiseMatrix.from_rows(
        [[entries[i][j] for j in kept_indices] for i in kept_indices]
    )
    return HierarchyNode(name=node.name, children=tuple(kept), comparison=matrix)


def _apply_judgments(node: HierarchyNode, judgments: dict[str, list]) -> HierarchyNode:
    if node.is_leaf:
        return node
    children = tuple(_apply_judgments(child, judgments) for child in node.children)
    comparison = node.comparison
    if node.name in judgments:
        records = _judgment_records(judgments[node.name], f"judgments.{node.name}")
        comparison = PairwiseMatrix.from_judgments(len(children), records)
    return HierarchyNode(name=node.name, children=children, comparison=comparison)


def _judgment_records(raw, path: str) -> list[tuple[int, int, float]]:
    if not isinstance(raw, list):
        raise ValidationError("judgments must be a list of {i, j, ratio} records", path)
    records = []
    for index, item in enumerate(raw):
        if not isinstance(item, dict) or not {"i", "j", "ratio"} <= set(item):
            raise ValidationError("judgment record needs i, j and ratio", f"{path}[{index}]")
        records.append((int(item["i"]), int(item["j"]), float(item["ratio"])))
    return records


def _parse_tree(raw, path: str) -> HierarchyNode:
    if not isinstance(raw, dict) or "name" not in raw:
        raise ValidationError("hierarchy node needs a name", path)
    name = str(raw["name"])
    if "children" in raw:
        children = [
            _parse_tree(child, f"{path}.children[{i}]")
            for i, child in enumerate(raw["children"] or [])
        ]
        if not children:
            raise ValidationError("goal node needs at least one child", path)
        comparison = None
        if raw.get("judgments"):
            records = _judgment_records(raw["judgments"], f"{path}.judgments")
            comparison = PairwiseMatrix.from_judgments(len(children), records)
        return goal(name, children, comparison)
    attribute = raw.get("attribute", name)
    return HierarchyNode(name=name, attribute_key=str(attribute))


def build_hierarchy(name: str, spec: dict | None) -> GoalHierarchy:
    """Materialize one hierarchy from its session fragment.

    Order of operations: take the custom ``tree`` or the named default,
    prune ``deselect`` subtrees (shrinking the parent matrices), then apply
    per-node ``judgments`` overrides.
    """
    spec = spec or {}
    path = f"hierarchies.{name}"
    if not isinstance(spec, dict):
        raise ValidationError("hierarchy section must be a map", path)
    if "tree" in spec:
        root = _parse_tree(spec["tree"], f"{path}.tree")
    else:
        root = default_hierarchy(name).root
    deselect = spec.get("deselect") or []
    if deselect:
        if not isinstance(deselect, list):
            raise ValidationError("deselect must be a list of node names", f"{path}.deselect")
        pruned = _prune(root, {str(n) for n in deselect})
        if pruned is None:
            raise ValidationError("deselection removed every criterion", f"{path}.deselect")
        root = pruned
    judgments = spec.get("judgments") or {}
    if judgments and not isinstance(judgments, dict):
        raise ValidationError(
            "judgments must map node names to record lists", f"{path}.judgments"
        )
    try:
        if judgments:
            root = _apply_judgments(root, {str(k): v for k, v in judgments.items()})
        hierarchy = GoalHierarchy(root)
    except HierarchyError as exc:
        raise ValidationError(str(exc), path) from None
    if judgments:
        unknown = set(map(str, judgments)) - {n.name for n in hierarchy.walk()}
        if unknown:
            raise ValidationError(
                f"judgments reference unknown nodes: {sorted(unknown)}", f"{path}.judgments"
            )
    return hierarchy


# ---------------------------------------------------------------------------
# Session document
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticRef:
    m: int
    n: int
    seed: int
    dependencies: str = "all"


@dataclass(frozen=True)
class RelaxationPolicy:
    auto: bool
    level: int = 0

    def describe(self) -> str:
        return "auto" if self.auto else str(self.level)


@dataclass(frozen=True)
class SessionDocument:
    catalog_path: str | None = None
    catalog_synthetic: SyntheticRef | None = None
    mode: str = MODE_TWO_PHASE
    relaxation: RelaxationPolicy = field(default_factory=lambda: RelaxationPolicy(auto=True))
    combination: CombinationWeights = field(default_factory=CombinationWeights)
    requirements: tuple[Requirement, ...] = ()
    image_hierarchy: GoalHierarchy = field(default_factory=default_image_hierarchy)
    service_hierarchy: GoalHierarchy = field(default_factory=default_service_hierarchy)
    integrated_hierarchy: GoalHierarchy = field(default_factory=default_integrated_hierarchy)

    def requirements_for(self, kind: EntityKind) -> list[Requirement]:
        return [r for r in self.requirements if r.target_kind is kind]


_KIND_NAMES = {"image": EntityKind.VM_IMAGE, "service": EntityKind.INFRA_SERVICE}


def _parse_requirement(raw, path: str) -> Requirement:
    if not isinstance(raw, dict):
        raise ValidationError("requirement must be a map", path)
    kind_name = raw.get("kind")
    if kind_name not in _KIND_NAMES:
        raise ValidationError("kind must be image or service", f"{path}.kind")
    attribute = raw.get("attribute")
    if not attribute or not isinstance(attribute, str):
        raise ValidationError("requirement needs an attribute", f"{path}.attribute")
    predicate = raw.get("predicate")
    try:
        op = RequirementOp(predicate)
    except ValueError:
        raise ValidationError(
            "predicate must be one of max, min, equals, one_of", f"{path}.predicate"
        ) from None
    kind = _KIND_NAMES[kind_name]
    try:
        if op in (RequirementOp.MAX, RequirementOp.MIN):
            if "bound" not in raw:
                raise ValidationError(f"{op.value} requirement needs a bound", path)
            return Requirement(kind, attribute, op, bound=float(raw["bound"]))
        if op is RequirementOp.EQUALS:
            if "value" not in raw:
                raise ValidationError("equals requirement needs a value", path)
            return Requirement(kind, attribute, op, values=frozenset({str(raw["value"])}))
        values = raw.get("values")
        if not isinstance(values, list) or not values:
            raise ValidationError("one_of requirement needs a non-empty values list", path)
        return Requirement(kind, attribute, op, values=frozenset(str(v) for v in values))
    except EngineError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(str(exc), path) from None


def parse_session(doc: dict | None) -> SessionDocument:
    """Validate a session document; raises ValidationError with a field path."""
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ValidationError("session document must be a map")

    catalog_path: str | None = None
    synthetic: SyntheticRef | None = None
    catalog_ref = doc.get("catalog")
    if isinstance(catalog_ref, str):
        catalog_path = catalog_ref
    elif isinstance(catalog_ref, dict) and "synthetic" in catalog_ref:
        spec = catalog_ref["synthetic"]
        if not isinstance(spec, dict):
            raise ValidationError("synthetic catalog spec must be a map", "catalog.synthetic")
        try:
            synthetic = SyntheticRef(
                m=int(spec.get("m", 10)),
                n=int(spec.get("n", 10)),
                seed=int(spec.get("seed", 0)),
                dependencies=str(spec.get("dependencies", "all")),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(str(exc), "catalog.synthetic") from None
    elif catalog_ref is not None:
        raise ValidationError("catalog must be a path or {synthetic: {...}}", "catalog")

    mode = doc.get("mode", MODE_TWO_PHASE)
    if mode not in (MODE_TWO_PHASE, MODE_INTEGRATED):
        raise ValidationError("mode must be two-phase or integrated", "mode")

    raw_relax = doc.get("relaxation", "auto")
    if raw_relax == "auto":
        relaxation = RelaxationPolicy(auto=True)
    else:
        try:
            level = int(raw_relax)
        except (TypeError, ValueError):
            raise ValidationError("relaxation must be 'auto' or an integer", "relaxation") from None
        if level < 0:
            raise ValidationError("relaxation level must be >= 0", "relaxation")
        relaxation = RelaxationPolicy(auto=False, level=level)

    raw_combo = doc.get("combination") or {}
    if not isinstance(raw_combo, dict):
        raise ValidationError("combination must be a map", "combination")
    try:
        combiner = Combiner(raw_combo.get("combiner", "additive"))
    except ValueError:
        raise ValidationError(
            "combiner must be additive or multiplicative", "combination.combiner"
        ) from None
    try:
        image_weight = float(raw_combo.get("image_weight", 0.5))
        service_weight = float(raw_combo.get("service_weight", 1.0 - image_weight))
        combination = CombinationWeights(image_weight, service_weight, combiner)
    except (ValidationError, TypeError, ValueError) as exc:
        raise ValidationError(str(exc), "combination") from None

    raw_reqs = doc.get("requirements") or []
    if not isinstance(raw_reqs, list):
        raise ValidationError("requirements must be a list", "requirements")
    reqs = tuple(
        _parse_requirement(raw, f"requirements[{i}]") for i, raw in enumerate(raw_reqs)
    )

    hierarchies = doc.get("hierarchies") or {}
    if not isinstance(hierarchies, dict):
        raise ValidationError("hierarchies must be a map", "hierarchies")
    unknown = set(hierarchies) - {"image", "service", "integrated"}
    if unknown:
        raise ValidationError(f"unknown hierarchy sections: {sorted(unknown)}", "hierarchies")

    return SessionDocument(
        catalog_path=catalog_path,
        catalog_synthetic=synthetic,
        mode=mode,
        relaxation=relaxation,
        combination=combination,
        requirements=reqs,
        image_hierarchy=build_hierarchy("image", hierarchies.get("image")),
        service_hierarchy=build_hierarchy("service", hierarchies.get("service")),
        integrated_hierarchy=build_hierarchy("integrated", hierarchies.get("integrated")),
    )


def load_session(source: str | Path | IO) -> SessionDocument:
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"invalid YAML: {exc}") from None
    return parse_session(doc)


def resolve_catalog(session: SessionDocument, base_dir: Path | None = None) -> Catalog:
    """Load or synthesize the catalog a session refers to."""
    if session.catalog_synthetic is not None:
        ref = session.catalog_synthetic
        return generate_synthetic_catalog(ref.m, ref.n, ref.seed, ref.dependencies)
    if session.catalog_path is None:
        raise ValidationError("session does not name a catalog", "catalog")
    path = Path(session.catalog_path)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return load_catalog(path)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    mode: str
    relaxation_policy: str
    image_level: int | None
    service_level: int | None
    integrated_level: int | None
    images: list[EvaluationResult]
    services: list[EvaluationResult]
    combinations: list[CombinedSolution]
    best: CombinedSolution | None
    no_feasible_combination: bool
    image_weights: dict[str, float]
    service_weights: dict[str, float]
    integrated_weights: dict[str, float]
    combination: CombinationWeights
    warnings: tuple[str, ...]


def run_pipeline(catalog: Catalog, session: SessionDocument, parallel: bool = False) -> PipelineResult:
    """Evaluate a catalog under a session and rank the combinations."""
    if not catalog.images or not catalog.services:
        raise ValidationError("catalog must contain at least one image and one service")
    image_reqs = session.requirements_for(EntityKind.VM_IMAGE)
    service_reqs = session.requirements_for(EntityKind.INFRA_SERVICE)
    for req in image_reqs:
        req.validate_against(catalog.image_schema)
    for req in service_reqs:
        req.validate_against(catalog.service_schema)

    if session.mode == MODE_INTEGRATED:
        return _run_integrated(catalog, session, image_reqs, service_reqs)

    if session.relaxation.auto:
        image_level = minimal_relaxation(catalog.images, image_reqs)
        service_level = minimal_relaxation(catalog.services, service_reqs)
    else:
        image_level = service_level = session.relaxation.level

    image_outcome = evaluate_images(
        catalog, image_reqs, session.image_hierarchy, image_level, parallel
    )
    service_outcome = evaluate_services(
        catalog, service_reqs, session.service_hierarchy, service_level, parallel
    )
    combinations = combine(
        image_outcome.results,
        service_outcome.results,
        catalog.dependencies,
        session.combination,
        parallel,
    )
    try:
        best = best_combination(combinations)
        no_feasible = False
    except NoFeasibleCombinationError:
        best = None
        no_feasible = True

    warnings = tuple(
        str(w) for w in (*image_outcome.warnings, *service_outcome.warnings)
    )
    return PipelineResult(
        mode=session.mode,
        relaxation_policy=session.relaxation.describe(),
        image_level=image_level,
        service_level=service_level,
        integrated_level=None,
        images=image_outcome.results,
        services=service_outcome.results,
        combinations=combinations,
        best=best,
        no_feasible_combination=no_feasible,
        image_weights=image_outcome.weights,
        service_weights=service_outcome.weights,
        integrated_weights={},
        combination=session.combination,
        warnings=warnings,
    )


def _run_integrated(catalog, session, image_reqs, service_reqs) -> PipelineResult:
    if session.relaxation.auto:
        level = _minimal_pair_relaxation(catalog, image_reqs, service_reqs)
    else:
        level = session.relaxation.level
    outcome = evaluate_integrated(
        catalog, image_reqs, service_reqs, session.integrated_hierarchy, level
    )
    feasible = [s for s in outcome.solutions if s.feasible]
    best = feasible[0] if feasible else None
    return PipelineResult(
        mode=session.mode,
        relaxation_policy=session.relaxation.describe(),
        image_level=None,
        service_level=None,
        integrated_level=level,
        images=[],
        services=[],
        combinations=outcome.solutions,
        best=best,
        no_feasible_combination=best is None,
        image_weights={},
        service_weights={},
        integrated_weights=outcome.weights,
        combination=session.combination,
        warnings=tuple(str(w) for w in outcome.warnings),
    )


def _minimal_pair_relaxation(catalog, image_reqs, service_reqs) -> int:
    image_counts = {e.id: check(e, image_reqs).failure_count for e in catalog.images}
    service_counts = {e.id: check(e, service_reqs).failure_count for e in catalog.services}
    best: int | None = None
    for image_id, service_id in catalog.dependencies.pairs:
        total = image_counts[image_id] + service_counts[service_id]
        if best is None or total < best:
            best = total
    return 0 if best is None else best


# ---------------------------------------------------------------------------
# Result documents
# ---------------------------------------------------------------------------


def result_document(result: PipelineResult) -> dict:
    """Plain-dict form of a pipeline result with a stable key/row order."""
    doc: dict[str, object] = {
        "mode": result.mode,
        "relaxation": {
            "policy": result.relaxation_policy,
            "image_level": result.image_level,
            "service_level": result.service_level,
            "integrated_level": result.integrated_level,
        },
        "weights": {
            "image": result.image_weights,
            "service": result.service_weights,
            "integrated": result.integrated_weights,
            "combination": {
                "image_weight": result.combination.image_weight,
                "service_weight": result.combination.service_weight,
                "combiner": result.combination.combiner.value,
            },
        },
        "warnings": list(result.warnings),
        "images": [
            {"id": r.entity_id, "value": r.value, "failure_count": r.failure_count, "rank": r.rank}
            for r in result.images
        ],
        "services": [
            {"id": r.entity_id, "value": r.value, "failure_count": r.failure_count, "rank": r.rank}
            for r in result.services
        ],
        "combinations": [
            {
                "image": s.image_id,
                "service": s.service_id,
                "value": s.combined_value,
                "image_value": s.image_value,
                "service_value": s.service_value,
                "feasible": s.feasible,
            }
            for s in result.combinations
        ],
        "best": (
            None
            if result.best is None
            else {
                "image": result.best.image_id,
                "service": result.best.service_id,
                "value": result.best.combined_value,
            }
        ),
        "no_feasible_combination": result.no_feasible_combination,
    }
    return doc


def dump_result(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)
