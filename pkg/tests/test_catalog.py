"""Catalog parsing, validation, round-trips, and synthetic generation."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloudpick.catalog import (
    Catalog,
    EntityKind,
    catalog_to_dict,
    catalog_violations,
    generate_synthetic_catalog,
    is_feasible,
    load_catalog,
    save_catalog,
)
from cloudpick.errors import (
    CatalogError,
    DanglingReferenceError,
    SchemaError,
    ValueRangeError,
)

MINIMAL = """
providers:
  - id: amazon
    name: Amazon
images:
  - id: img-1
    provider: amazon
    attributes:
      hourly_price: 0.1
      popularity: 80
      virtualization_format: AMI
      operating_system: Linux
      os_version: Ubuntu 10.4
      implementation_language: PHP
      supported_impl_langs: [PHP]
services:
  - id: svc-1
    provider: amazon
    attributes:
      hourly_price: 0.085
      cpu_performance: 4.0e+9
      ram_performance: 3.0e+9
      disk_performance: 1.0e+9
      max_latency: 200
      avg_latency: 100
      uptime: 99.5
      popularity: 90
      provider: Amazon
      location_country: USA
dependencies:
  - [img-1, svc-1]
"""


def test_minimal_catalog_loads():
    catalog = load_catalog(MINIMAL)
    assert len(catalog.images) == 1
    assert len(catalog.services) == 1
    assert len(catalog.dependencies) == 1
    assert catalog.images[0].numerical["popularity"] == 80.0
    assert catalog.images[0].non_numerical["supported_impl_langs"] == frozenset({"PHP"})


def test_out_of_range_popularity_names_entity_and_key():
    bad = MINIMAL.replace("popularity: 80", "popularity: 120")
    with pytest.raises(ValueRangeError) as exc:
        load_catalog(bad)
    assert "images[0].attributes.popularity" in str(exc.value)
    assert "img-1" in str(exc.value)


def test_dangling_dependency_is_rejected():
    bad = MINIMAL.replace("[img-1, svc-1]", "[img-1, svc-missing]")
    with pytest.raises(DanglingReferenceError) as exc:
        load_catalog(bad)
    assert "svc-missing" in str(exc.value)
    assert "dependencies[0]" in str(exc.value)


def test_unknown_attribute_key_is_a_schema_error():
    bad = MINIMAL.replace("popularity: 80", "popularity: 80\n      bogus_key: 3")
    with pytest.raises(SchemaError):
        load_catalog(bad)


def test_missing_attribute_is_rejected():
    bad = MINIMAL.replace("      popularity: 80\n", "")
    with pytest.raises(SchemaError) as exc:
        load_catalog(bad)
    assert "popularity" in str(exc.value)


def test_unknown_provider_is_a_dangling_reference():
    bad = MINIMAL.replace("provider: amazon\n    attributes:\n      hourly_price: 0.1",
                          "provider: nimbus\n    attributes:\n      hourly_price: 0.1")
    with pytest.raises(DanglingReferenceError):
        load_catalog(bad)


def test_violations_are_all_collected_without_fail_fast():
    bad = MINIMAL.replace("popularity: 80", "popularity: 120").replace(
        "[img-1, svc-1]", "[img-1, svc-missing]"
    )
    violations = catalog_violations(bad)
    assert len(violations) >= 2
    kinds = {type(v) for v in violations}
    assert ValueRangeError in kinds
    assert DanglingReferenceError in kinds


def test_roundtrip_preserves_semantics():
    catalog = load_catalog(MINIMAL)
    text = save_catalog(catalog)
    again = load_catalog(text)
    assert catalog_to_dict(again) == catalog_to_dict(catalog)


def test_roundtrip_synthetic():
    catalog = generate_synthetic_catalog(5, 4, seed=11, dependencies="provider")
    again = load_catalog(save_catalog(catalog))
    assert catalog_to_dict(again) == catalog_to_dict(catalog)


def test_attribute_def_extensions_roundtrip():
    doc = MINIMAL + """
attribute_defs:
  images:
    non_numerical:
      - key: vm_image_feature
        examples: [Web server]
"""
    doc = doc.replace("supported_impl_langs: [PHP]",
                      "supported_impl_langs: [PHP]\n      vm_image_feature: Web server")
    catalog = load_catalog(doc)
    assert catalog.images[0].non_numerical["vm_image_feature"] == "Web server"
    again = load_catalog(save_catalog(catalog))
    assert catalog_to_dict(again) == catalog_to_dict(catalog)


def test_is_feasible_checks_order_and_ids():
    catalog = load_catalog(MINIMAL)
    assert is_feasible(catalog, "img-1", "svc-1") is True
    with pytest.raises(DanglingReferenceError):
        is_feasible(catalog, "svc-1", "img-1")  # reversed: ids of the wrong kind
    with pytest.raises(DanglingReferenceError):
        is_feasible(catalog, "img-1", "svc-2")


def test_feasibility_is_exact_membership():
    catalog = generate_synthetic_catalog(3, 3, seed=1, dependencies="none")
    assert not is_feasible(catalog, catalog.images[0].id, catalog.services[0].id)


def test_synthetic_determinism_is_byte_identical():
    a = save_catalog(generate_synthetic_catalog(1, 1, seed=0))
    b = save_catalog(generate_synthetic_catalog(1, 1, seed=0))
    assert a == b


def test_synthetic_seeds_differ():
    a = generate_synthetic_catalog(4, 4, seed=1)
    b = generate_synthetic_catalog(4, 4, seed=2)
    diffs = [
        (x.numerical, y.numerical)
        for x, y in zip(a.images + a.services, b.images + b.services)
        if x.numerical != y.numerical
    ]
    assert diffs


def test_synthetic_sizes_and_ranges():
    catalog = generate_synthetic_catalog(100, 100, seed=7)
    assert len(catalog.images) == 100
    assert len(catalog.services) == 100
    for entity in catalog.images:
        assert 0.0 <= entity.numerical["popularity"] <= 100.0
        assert entity.numerical["hourly_price"] >= 0.0
    for entity in catalog.services:
        assert 0.0 <= entity.numerical["uptime"] <= 100.0
        assert entity.numerical["max_latency"] >= entity.numerical["avg_latency"]


def test_synthetic_percentages_in_range_over_many_seeds():
    # Percentage attributes stay in [0, 100] across 1000 seeded draws.
    for seed in range(1000):
        catalog = generate_synthetic_catalog(3, 2, seed=seed, dependencies="none")
        for entity in catalog.images:
            assert 0.0 <= entity.numerical["popularity"] <= 100.0
        for entity in catalog.services:
            assert 0.0 <= entity.numerical["popularity"] <= 100.0
            assert 0.0 <= entity.numerical["uptime"] <= 100.0


def test_synthetic_cross_product_dependencies():
    catalog = generate_synthetic_catalog(4, 3, seed=3, dependencies="all")
    assert len(catalog.dependencies) == 12


def _valid_doc(rng: random.Random) -> dict:
    catalog = generate_synthetic_catalog(rng.randint(1, 4), rng.randint(1, 4),
                                         seed=rng.randint(0, 10_000), dependencies="provider")
    return catalog_to_dict(catalog)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    corruption=st.sampled_from(["none", "range", "unknown_key", "dangling_dep", "dup_provider"]),
)
def test_random_documents_accept_or_reject(seed, corruption):
    rng = random.Random(seed)
    doc = _valid_doc(rng)
    if corruption == "range":
        doc["images"][0]["attributes"]["popularity"] = 150.0
    elif corruption == "unknown_key":
        doc["services"][0]["attributes"]["quantum_flux"] = 1.0
    elif corruption == "dangling_dep":
        doc["dependencies"] = [["img-ghost", doc["services"][0]["id"]]]
    elif corruption == "dup_provider":
        doc["providers"].append(dict(doc["providers"][0]))

    import yaml

    text = yaml.safe_dump(doc, sort_keys=False)
    if corruption == "none":
        catalog = load_catalog(text)
        assert isinstance(catalog, Catalog)
        assert not catalog_violations(text)
    else:
        with pytest.raises(CatalogError):
            load_catalog(text)
        assert catalog_violations(text)


def test_entities_for_and_schema_for():
    catalog = load_catalog(MINIMAL)
    assert catalog.entities_for(EntityKind.VM_IMAGE) == catalog.images
    assert "uptime" in catalog.schema_for(EntityKind.INFRA_SERVICE).numerical
