"""Decision engine for cloud VM image / infrastructure service selection."""

from importlib import resources
from pathlib import Path

from .ahp import (
    GoalHierarchy,
    HierarchyNode,
    PairwiseMatrix,
    global_weights,
    normalize_alternatives,
    priority_vector,
)
from .catalog import (
    Catalog,
    CatalogEntity,
    DependencySet,
    EntityKind,
    Influence,
    generate_synthetic_catalog,
    is_feasible,
    load_catalog,
    save_catalog,
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
from .requirements import (
    Requirement,
    RequirementOp,
    RequirementReport,
    check,
    filter_with_relaxation,
    minimal_relaxation,
)
from .session import (
    SessionDocument,
    load_session,
    parse_session,
    result_document,
    run_pipeline,
)

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path to a bundled data file (demo catalog / demo session)."""
    return Path(str(resources.files("cloudpick").joinpath("data", name)))
