"""Requirement predicate semantics, relaxation filtering, and counting."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloudpick.catalog import CatalogEntity, EntityKind, generate_synthetic_catalog
from cloudpick.errors import RequirementError
from cloudpick.requirements import (
    Requirement,
    RequirementOp,
    check,
    equals_requirement,
    filter_with_relaxation,
    max_requirement,
    min_requirement,
    minimal_relaxation,
    one_of_requirement,
)

IMG = EntityKind.VM_IMAGE


def image(entity_id="img-1", price=0.5, pop=80.0, os="Linux", langs=("PHP",)):
    return CatalogEntity(
        id=entity_id,
        kind=IMG,
        provider_id="amazon",
        numerical={"hourly_price": price, "popularity": pop},
        non_numerical={
            "virtualization_format": "AMI",
            "operating_system": os,
            "os_version": "Ubuntu 10.4",
            "implementation_language": langs[0],
            "supported_impl_langs": frozenset(langs),
        },
    )


def test_max_is_strict_less_than():
    req = max_requirement(IMG, "hourly_price", 1.0)
    assert req.is_met_by(image(price=0.5))
    assert not req.is_met_by(image(price=1.0))  # boundary equality fails
    assert not req.is_met_by(image(price=1.5))


def test_min_is_strict_greater_than():
    req = min_requirement(IMG, "popularity", 80.0)
    assert not req.is_met_by(image(pop=80.0))
    assert req.is_met_by(image(pop=80.1))


def test_equals_on_single_valued_attribute():
    req = equals_requirement(IMG, "operating_system", "Linux")
    assert req.is_met_by(image(os="Linux"))
    assert not req.is_met_by(image(os="Windows"))


def test_equals_on_set_valued_attribute_uses_membership():
    # Oracle: manual predicate evaluation over {Java, PHP} with value PHP.
    req = equals_requirement(IMG, "supported_impl_langs", "PHP")
    assert req.is_met_by(image(langs=("Java", "PHP")))
    assert not req.is_met_by(image(langs=("Java", "Ruby")))


def test_one_of_intersects_set_valued_attribute():
    req = one_of_requirement(IMG, "supported_impl_langs", ["PHP", "Perl"])
    assert req.is_met_by(image(langs=("Perl",)))
    assert not req.is_met_by(image(langs=("Java",)))


def test_string_comparison_is_case_insensitive_and_trimmed():
    req = equals_requirement(IMG, "operating_system", "  linux ")
    assert req.is_met_by(image(os="Linux"))


def test_kind_mismatch_raises():
    service_req = max_requirement(EntityKind.INFRA_SERVICE, "hourly_price", 1.0)
    with pytest.raises(RequirementError):
        service_req.is_met_by(image())


def test_unknown_key_raises():
    req = max_requirement(IMG, "nonexistent", 1.0)
    with pytest.raises(RequirementError):
        req.is_met_by(image())


def test_requirement_structural_invariants():
    with pytest.raises(RequirementError):
        Requirement(IMG, "hourly_price", RequirementOp.MAX)  # missing bound
    with pytest.raises(RequirementError):
        Requirement(IMG, "operating_system", RequirementOp.ONE_OF, values=frozenset())


def _entities_with_counts():
    reqs = [
        max_requirement(IMG, "hourly_price", 1.0),
        equals_requirement(IMG, "operating_system", "Linux"),
        one_of_requirement(IMG, "supported_impl_langs", ["PHP"]),
    ]
    e0 = image("img-0", price=0.5, os="Linux", langs=("PHP",))   # fails 0
    e1 = image("img-1", price=2.0, os="Linux", langs=("PHP",))   # fails 1
    e2 = image("img-2", price=2.0, os="Windows", langs=("Java",))  # fails 3... price+os+langs
    return [e0, e1, e2], reqs


def test_filter_with_relaxation_levels():
    entities, reqs = _entities_with_counts()
    assert [r.entity_id for r in filter_with_relaxation(entities, reqs, 0)] == ["img-0"]
    assert [r.entity_id for r in filter_with_relaxation(entities, reqs, 1)] == ["img-0", "img-1"]
    assert [r.entity_id for r in filter_with_relaxation(entities, reqs, 3)] == [
        "img-0", "img-1", "img-2",
    ]


def test_filter_with_empty_requirements_admits_everything():
    entities, _ = _entities_with_counts()
    reports = filter_with_relaxation(entities, [], 0)
    assert len(reports) == len(entities)
    assert all(r.failure_count == 0 for r in reports)


def test_filter_rejects_level_beyond_requirement_count():
    entities, reqs = _entities_with_counts()
    with pytest.raises(RequirementError):
        filter_with_relaxation(entities, reqs, len(reqs) + 1)


def test_minimal_relaxation_examples():
    entities, reqs = _entities_with_counts()
    assert minimal_relaxation(entities, reqs) == 0
    assert minimal_relaxation(entities[1:], reqs) == 1
    assert minimal_relaxation([entities[2]], reqs) == 3


def test_minimal_relaxation_matches_brute_force():
    # Oracle: smallest k in 0..len(reqs) whose survivor set is non-empty.
    rng = random.Random(42)
    for _ in range(50):
        entities = [
            image(
                f"img-{i}",
                price=rng.choice([0.2, 1.5]),
                pop=rng.choice([10.0, 90.0]),
                os=rng.choice(["Linux", "Windows"]),
                langs=(rng.choice(["PHP", "Java"]),),
            )
            for i in range(rng.randint(1, 6))
        ]
        reqs = [
            max_requirement(IMG, "hourly_price", 1.0),
            min_requirement(IMG, "popularity", 50.0),
            equals_requirement(IMG, "operating_system", "Linux"),
            one_of_requirement(IMG, "supported_impl_langs", ["PHP"]),
        ]
        brute = next(
            k for k in range(len(reqs) + 1) if filter_with_relaxation(entities, reqs, k)
        )
        assert minimal_relaxation(entities, reqs) == brute


def test_failure_counts_match_per_predicate_oracle():
    # Oracle: evaluate each Table-style predicate independently, then count.
    rng = random.Random(7)
    for _ in range(100):
        price = rng.uniform(0.0, 2.0)
        pop = rng.uniform(0.0, 100.0)
        os = rng.choice(["Linux", "Windows"])
        langs = tuple(rng.sample(["PHP", "Java", "Ruby", "Perl"], rng.randint(1, 3)))
        entity = image("img-x", price=price, pop=pop, os=os, langs=langs)
        reqs = [
            max_requirement(IMG, "hourly_price", 1.0),
            min_requirement(IMG, "popularity", 50.0),
            equals_requirement(IMG, "operating_system", "Linux"),
            one_of_requirement(IMG, "supported_impl_langs", ["PHP", "Perl"]),
        ]
        expected_failures = [
            not (price < 1.0),
            not (pop > 50.0),
            not (os.strip().casefold() == "linux"),
            not ({lang.casefold() for lang in langs} & {"php", "perl"}),
        ]
        report = check(entity, reqs)
        assert report.failure_count == sum(expected_failures)
        assert report.failed == tuple(i for i, f in enumerate(expected_failures) if f)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=99_999))
def test_survivors_are_monotone_in_relaxation_level(seed):
    rng = random.Random(seed)
    catalog = generate_synthetic_catalog(rng.randint(1, 8), 1, seed=seed)
    reqs = [
        max_requirement(IMG, "hourly_price", rng.uniform(0.01, 10.0)),
        min_requirement(IMG, "popularity", rng.uniform(0.0, 100.0)),
        one_of_requirement(IMG, "supported_impl_langs", [rng.choice(["PHP", "Java", "Haskell"])]),
    ]
    previous: set[str] = set()
    for level in range(len(reqs) + 1):
        survivors = {r.entity_id for r in filter_with_relaxation(catalog.images, reqs, level)}
        assert previous <= survivors
        previous = survivors
    assert previous == {e.id for e in catalog.images}  # level == |reqs| admits all
