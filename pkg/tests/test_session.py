"""Session document parsing, hierarchy customization, pipeline behavior."""

from __future__ import annotations

import pytest
import yaml

from cloudpick.ahp import global_weights
from cloudpick.catalog import EntityKind, generate_synthetic_catalog
from cloudpick.errors import ValidationError
from cloudpick.evaluation import Combiner
from cloudpick.session import (
    build_hierarchy,
    dump_result,
    parse_session,
    result_document,
    run_pipeline,
)


def test_empty_document_yields_defaults():
    session = parse_session({})
    assert session.mode == "two-phase"
    assert session.relaxation.auto
    assert session.combination.image_weight == 0.5
    assert session.requirements == ()
    assert set(global_weights(session.image_hierarchy).weights) == {
        "hourly_price", "popularity",
    }


def test_requirements_parse_all_predicates():
    session = parse_session(
        {
            "requirements": [
                {"kind": "image", "attribute": "hourly_price", "predicate": "max", "bound": 1.0},
                {"kind": "service", "attribute": "uptime", "predicate": "min", "bound": 99.0},
                {"kind": "image", "attribute": "operating_system", "predicate": "equals",
                 "value": "Linux"},
                {"kind": "image", "attribute": "supported_impl_langs", "predicate": "one_of",
                 "values": ["PHP", "Perl"]},
            ]
        }
    )
    assert len(session.requirements) == 4
    assert session.requirements_for(EntityKind.VM_IMAGE)[0].bound == 1.0
    assert session.requirements_for(EntityKind.INFRA_SERVICE)[0].attribute_key == "uptime"


@pytest.mark.parametrize(
    "doc,path_fragment",
    [
        ({"mode": "three-phase"}, "mode"),
        ({"relaxation": -1}, "relaxation"),
        ({"relaxation": "soon"}, "relaxation"),
        ({"combination": {"image_weight": 0.6, "service_weight": 0.6}}, "combination"),
        ({"requirements": [{"kind": "image"}]}, "requirements[0]"),
        ({"requirements": [{"kind": "image", "attribute": "hourly_price",
                            "predicate": "max"}]}, "requirements[0]"),
        ({"requirements": [{"kind": "disk", "attribute": "x", "predicate": "max",
                            "bound": 1}]}, "kind"),
        ({"hierarchies": {"imaginary": {}}}, "hierarchies"),
        ({"hierarchies": {"image": {"judgments": {"image_value":
            [{"i": 0, "j": 1, "ratio": 99}]}}}}, "image"),
    ],
)
def test_invalid_documents_are_path_addressed(doc, path_fragment):
    with pytest.raises(ValidationError) as exc:
        parse_session(doc)
    assert path_fragment in str(exc.value)


def test_judgments_override_default_matrices():
    session = parse_session(
        {"hierarchies": {"image": {"judgments": {"image_value": [
            {"i": 0, "j": 1, "ratio": 3},
        ]}}}}
    )
    weights = global_weights(session.image_hierarchy).weights
    assert weights["hourly_price"] == pytest.approx(0.75, abs=1e-9)
    assert weights["popularity"] == pytest.approx(0.25, abs=1e-9)


def test_judgments_on_unknown_node_rejected():
    with pytest.raises(ValidationError):
        parse_session(
            {"hierarchies": {"image": {"judgments": {"nonexistent": [
                {"i": 0, "j": 1, "ratio": 2},
            ]}}}}
        )


def test_deselect_prunes_subtree_and_rescales():
    hierarchy = build_hierarchy("service", {"deselect": ["best_latency"]})
    weights = global_weights(hierarchy).weights
    assert "max_latency" not in weights
    assert "avg_latency" not in weights
    assert weights["hourly_price"] == pytest.approx(0.5, abs=1e-9)
    assert sum(weights.values()) == pytest.approx(1.0, abs=1e-9)


def test_deselect_single_leaf_inside_goal():
    hierarchy = build_hierarchy("service", {"deselect": ["avg_latency"]})
    weights = global_weights(hierarchy).weights
    assert "avg_latency" not in weights
    assert weights["max_latency"] == pytest.approx(1 / 3, abs=1e-9)


def test_deselect_everything_rejected():
    with pytest.raises(ValidationError):
        build_hierarchy("image", {"deselect": ["image_value"]})


def test_custom_tree_with_inline_judgments():
    hierarchy = build_hierarchy(
        "image",
        {
            "tree": {
                "name": "root",
                "children": [
                    {"name": "cost", "attribute": "hourly_price"},
                    {"name": "fame", "attribute": "popularity"},
                ],
                "judgments": [{"i": 0, "j": 1, "ratio": 9}],
            }
        },
    )
    weights = global_weights(hierarchy).weights
    assert weights["hourly_price"] == pytest.approx(0.9, abs=1e-9)


def test_pipeline_two_phase_auto_relaxation_reports_levels():
    catalog = generate_synthetic_catalog(6, 6, seed=2, dependencies="all")
    session = parse_session(
        {
            "relaxation": "auto",
            "requirements": [
                # impossible: popularity is capped at 100
                {"kind": "image", "attribute": "popularity", "predicate": "min", "bound": 200},
            ],
        }
    )
    result = run_pipeline(catalog, session)
    assert result.image_level == 1
    assert result.service_level == 0
    assert any(r.value > 0 for r in result.images)
    doc = result_document(result)
    assert doc["relaxation"]["image_level"] == 1
    assert doc["relaxation"]["policy"] == "auto"


def test_pipeline_fixed_relaxation():
    catalog = generate_synthetic_catalog(4, 4, seed=3, dependencies="all")
    session = parse_session(
        {
            "relaxation": 0,
            "requirements": [
                {"kind": "image", "attribute": "popularity", "predicate": "min", "bound": 200},
            ],
        }
    )
    result = run_pipeline(catalog, session)
    assert all(r.value == 0.0 for r in result.images)
    assert result.best is not None  # feasible pairs exist, image side contributes 0


def test_pipeline_no_feasible_combination_outcome():
    catalog = generate_synthetic_catalog(2, 2, seed=1, dependencies="none")
    result = run_pipeline(catalog, parse_session({}))
    assert result.no_feasible_combination
    assert result.best is None
    doc = result_document(result)
    assert doc["best"] is None
    assert doc["no_feasible_combination"] is True


def test_pipeline_integrated_mode():
    catalog = generate_synthetic_catalog(3, 3, seed=5, dependencies="all")
    result = run_pipeline(catalog, parse_session({"mode": "integrated"}))
    assert result.mode == "integrated"
    assert result.integrated_level == 0
    assert result.images == [] and result.services == []
    assert result.best is not None
    doc = result_document(result)
    assert doc["weights"]["integrated"]
    assert doc["combinations"][0]["value"] >= doc["combinations"][-1]["value"]


def test_result_document_dumps_deterministically():
    catalog = generate_synthetic_catalog(4, 3, seed=9, dependencies="provider")
    session = parse_session({})
    a = dump_result(result_document(run_pipeline(catalog, session)))
    b = dump_result(result_document(run_pipeline(catalog, session)))
    assert a == b
    parsed = yaml.safe_load(a)
    assert set(parsed) == {
        "mode", "relaxation", "weights", "warnings", "images", "services",
        "combinations", "best", "no_feasible_combination",
    }


def test_pipeline_warns_on_inconsistent_judgments():
    catalog = generate_synthetic_catalog(3, 3, seed=6, dependencies="all")
    session = parse_session(
        {
            "hierarchies": {
                "service": {
                    "judgments": {
                        "service_value": [
                            {"i": 0, "j": 1, "ratio": 3},
                            {"i": 1, "j": 2, "ratio": 3},
                            {"i": 0, "j": 2, "ratio": 1 / 3},
                        ]
                    }
                }
            }
        }
    )
    result = run_pipeline(catalog, session)
    assert result.warnings
    assert "consistency ratio" in result.warnings[0]


def test_multiplicative_combiner_via_session():
    catalog = generate_synthetic_catalog(3, 3, seed=7, dependencies="all")
    session = parse_session({"combination": {"combiner": "multiplicative"}})
    assert session.combination.combiner is Combiner.MULTIPLICATIVE
    result = run_pipeline(catalog, session)
    top = result.combinations[0]
    assert top.combined_value == pytest.approx(top.image_value * top.service_value, abs=1e-12)
