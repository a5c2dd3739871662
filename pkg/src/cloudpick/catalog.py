"""Catalog data model: entities, attribute schemas, dependencies, persistence.

The catalog holds the four object sets the engine works over: providers,
VM images, infrastructure services, and explicit image-service dependency
pairs. Each image or service carries a numerical attribute map (evaluated
against criteria) and a non-numerical attribute map (checked against
requirements). Catalogs are immutable after construction and may be shared
freely across threads; changing one means building a new one.

The canonical on-disk representation is a YAML document with top-level
sections ``providers``, ``attribute_defs``, ``images``, ``services`` and
``dependencies``. Percentages are stored as 0-100 reals.
"""

from __future__ import annotations

import io
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator

import yaml

from .errors import (
    CatalogError,
    CatalogParseError,
    DanglingReferenceError,
    SchemaError,
    ValueRangeError,
)


class EntityKind(str, Enum):
    VM_IMAGE = "image"
    INFRA_SERVICE = "service"


class Influence(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Variability(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class ValueRange:
    """Closed or upper-unbounded interval of non-negative reals."""

    lower: float = 0.0
    upper: float | None = None

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("value range lower bound must be >= 0")
        if self.upper is not None and self.upper < self.lower:
            raise ValueError("value range upper bound below lower bound")

    def contains(self, value: float) -> bool:
        if value < self.lower:
            return False
        return self.upper is None or value <= self.upper

    def __str__(self) -> str:
        upper = "inf" if self.upper is None else f"{self.upper:g}"
        return f"[{self.lower:g}, {upper}]"


@dataclass(frozen=True)
class NumericalAttributeDef:
    """Declaration of a measurable attribute.

    Attributes:
        key: Identifier used in entity attribute maps and requirements.
        influence: Whether larger values make an alternative better
            (positive) or worse (negative).
        metric: Unit string, informational.
        value_range: Admissible values; validation rejects anything outside.
        variability: Whether the value is fixed at creation or drifts.
        synth_range: Finite sub-range used by the synthetic generator when
            value_range is unbounded. Accepted values are still only
            constrained by value_range.
    """

    key: str
    influence: Influence
    metric: str
    value_range: ValueRange = field(default_factory=ValueRange)
    variability: Variability = Variability.DYNAMIC
    synth_range: tuple[float, float] | None = None

    def sampling_bounds(self) -> tuple[float, float]:
        if self.value_range.upper is not None:
            return (self.value_range.lower, self.value_range.upper)
        if self.synth_range is not None:
            return self.synth_range
        return (self.value_range.lower, self.value_range.lower + 1.0)


@dataclass(frozen=True)
class NonNumericalAttributeDef:
    """Declaration of a descriptive attribute (single string or string set)."""

    key: str
    allowed_examples: tuple[str, ...] = ()
    set_valued: bool = False
    variability: Variability = Variability.STATIC


@dataclass(frozen=True)
class AttributeSchema:
    """Attribute declarations for one entity kind, keyed by identifier."""

    numerical: dict[str, NumericalAttributeDef]
    non_numerical: dict[str, NonNumericalAttributeDef]

    def influence(self, key: str) -> Influence:
        return self.numerical[key].influence

    def extended(
        self,
        numerical: Iterable[NumericalAttributeDef] = (),
        non_numerical: Iterable[NonNumericalAttributeDef] = (),
    ) -> "AttributeSchema":
        num = dict(self.numerical)
        non = dict(self.non_numerical)
        for d in numerical:
            num[d.key] = d
        for d in non_numerical:
            non[d.key] = d
        return AttributeSchema(num, non)


@dataclass(frozen=True)
class Provider:
    id: str
    name: str


@dataclass(frozen=True)
class CatalogEntity:
    """A VM image or infrastructure service with its attribute values."""

    id: str
    kind: EntityKind
    provider_id: str
    numerical: dict[str, float]
    non_numerical: dict[str, str | frozenset[str]]


@dataclass(frozen=True)
class DependencySet:
    """Explicit (image_id, service_id) compatibility pairs.

    Membership is exact: no wildcard or format-based inference. Pair order
    is always (image, service).
    """

    pairs: frozenset[tuple[str, str]]

    def contains(self, image_id: str, service_id: str) -> bool:
        return (image_id, service_id) in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)


# Built-in attribute schemas. Percentage attributes are bounded to [0, 100];
# unbounded ranges carry a documented finite sub-range for synthesis only:
# price [0.01, 10.0] $/h, performance [1e6, 1e12] Flops, latency [1, 2000] ms.
PERCENT_RANGE = ValueRange(0.0, 100.0)
PRICE_SYNTH = (0.01, 10.0)
FLOPS_SYNTH = (1e6, 1e12)
LATENCY_SYNTH = (1.0, 2000.0)

IMAGE_NUMERICAL_DEFS: tuple[NumericalAttributeDef, ...] = (
    NumericalAttributeDef("hourly_price", Influence.NEGATIVE, "$/h", synth_range=PRICE_SYNTH),
    NumericalAttributeDef("popularity", Influence.POSITIVE, "%", PERCENT_RANGE),
)

IMAGE_NON_NUMERICAL_DEFS: tuple[NonNumericalAttributeDef, ...] = (
    NonNumericalAttributeDef("virtualization_format", ("Xen", "VMware", "AMI", "KVM")),
    NonNumericalAttributeDef("operating_system", ("Linux", "Windows")),
    NonNumericalAttributeDef("os_version", ("Ubuntu 10.4", "Server 2008")),
    NonNumericalAttributeDef("implementation_language", ("Java", "Perl", "Ruby", "PHP")),
    NonNumericalAttributeDef(
        "supported_impl_langs", ("Java", "Perl", "Ruby", "PHP"), set_valued=True
    ),
)

SERVICE_NUMERICAL_DEFS: tuple[NumericalAttributeDef, ...] = (
    NumericalAttributeDef("hourly_price", Influence.NEGATIVE, "$/h", synth_range=PRICE_SYNTH),
    NumericalAttributeDef("cpu_performance", Influence.POSITIVE, "Flops", synth_range=FLOPS_SYNTH),
    NumericalAttributeDef("ram_performance", Influence.POSITIVE, "Flops", synth_range=FLOPS_SYNTH),
    NumericalAttributeDef("disk_performance", Influence.POSITIVE, "Flops", synth_range=FLOPS_SYNTH),
    NumericalAttributeDef("max_latency", Influence.NEGATIVE, "ms", synth_range=LATENCY_SYNTH),
    NumericalAttributeDef("avg_latency", Influence.NEGATIVE, "ms", synth_range=LATENCY_SYNTH),
    NumericalAttributeDef("uptime", Influence.POSITIVE, "%", PERCENT_RANGE),
    NumericalAttributeDef("popularity", Influence.POSITIVE, "%", PERCENT_RANGE),
)

SERVICE_NON_NUMERICAL_DEFS: tuple[NonNumericalAttributeDef, ...] = (
    NonNumericalAttributeDef("provider", ("Amazon", "Rackspace", "GoGrid")),
    NonNumericalAttributeDef("location_country", ("Germany", "Australia", "USA")),
)


def builtin_schema(kind: EntityKind) -> AttributeSchema:
    if kind is EntityKind.VM_IMAGE:
        return AttributeSchema(
            {d.key: d for d in IMAGE_NUMERICAL_DEFS},
            {d.key: d for d in IMAGE_NON_NUMERICAL_DEFS},
        )
    return AttributeSchema(
        {d.key: d for d in SERVICE_NUMERICAL_DEFS},
        {d.key: d for d in SERVICE_NON_NUMERICAL_DEFS},
    )


@dataclass(frozen=True)
class Catalog:
    """Validated, immutable snapshot of the selection problem's object sets."""

    providers: tuple[Provider, ...]
    image_schema: AttributeSchema
    service_schema: AttributeSchema
    images: tuple[CatalogEntity, ...]
    services: tuple[CatalogEntity, ...]
    dependencies: DependencySet

    def schema_for(self, kind: EntityKind) -> AttributeSchema:
        return self.image_schema if kind is EntityKind.VM_IMAGE else self.service_schema

    def entities_for(self, kind: EntityKind) -> tuple[CatalogEntity, ...]:
        return self.images if kind is EntityKind.VM_IMAGE else self.services

    def image_ids(self) -> frozenset[str]:
        return frozenset(e.id for e in self.images)

    def service_ids(self) -> frozenset[str]:
        return frozenset(e.id for e in self.services)


def is_feasible(catalog: Catalog, image_id: str, service_id: str) -> bool:
    """True iff (image_id, service_id) has an explicit dependency entry.

    Raises DanglingReferenceError when either id does not resolve to an
    entity of the right kind.
    """
    if image_id not in catalog.image_ids():
        raise DanglingReferenceError(f"unknown image id {image_id!r}")
    if service_id not in catalog.service_ids():
        raise DanglingReferenceError(f"unknown service id {service_id!r}")
    return catalog.dependencies.contains(image_id, service_id)


# ---------------------------------------------------------------------------
# Parsing / validation
# ---------------------------------------------------------------------------


class _Issues:
    """Collects violations; raises the first one in fail-fast mode."""

    def __init__(self, fail_fast: bool):
        self.fail_fast = fail_fast
        self.errors: list[CatalogError] = []

    def add(self, error: CatalogError) -> None:
        if self.fail_fast:
            raise error
        self.errors.append(error)


def _require(doc: dict, key: str, issues: _Issues) -> list:
    value = doc.get(key)
    if value is None:
        return []
    if not isinstance(value, list):
        issues.add(CatalogParseError("expected a list", key))
        return []
    return value


def _parse_value_range(raw, path: str, issues: _Issues) -> ValueRange:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        issues.add(CatalogParseError("range must be a [lower, upper] pair", path))
        return ValueRange()
    lower, upper = raw
    try:
        return ValueRange(float(lower), None if upper is None else float(upper))
    except (TypeError, ValueError) as exc:
        issues.add(CatalogParseError(str(exc), path))
        return ValueRange()


def _parse_attribute_defs(doc: dict, issues: _Issues) -> dict[EntityKind, AttributeSchema]:
    schemas = {kind: builtin_schema(kind) for kind in EntityKind}
    raw = doc.get("attribute_defs")
    if raw is None:
        return schemas
    if not isinstance(raw, dict):
        issues.add(CatalogParseError("expected a map", "attribute_defs"))
        return schemas
    section_names = {EntityKind.VM_IMAGE: "images", EntityKind.INFRA_SERVICE: "services"}
    for kind, section in section_names.items():
        block = raw.get(section)
        if block is None:
            continue
        if not isinstance(block, dict):
            issues.add(CatalogParseError("expected a map", f"attribute_defs.{section}"))
            continue
        numerical = []
        for i, item in enumerate(block.get("numerical") or []):
            path = f"attribute_defs.{section}.numerical[{i}]"
            if not isinstance(item, dict) or "key" not in item:
                issues.add(CatalogParseError("attribute def needs a key", path))
                continue
            try:
                influence = Influence(item.get("influence", "positive"))
            except ValueError:
                issues.add(CatalogParseError("influence must be positive or negative", path))
                continue
            value_range = _parse_value_range(item.get("range", [0, None]), path, issues)
            numerical.append(
                NumericalAttributeDef(
                    key=str(item["key"]),
                    influence=influence,
                    metric=str(item.get("metric", "")),
                    value_range=value_range,
                    variability=Variability(item.get("variability", "dynamic")),
                )
            )
        non_numerical = []
        for i, item in enumerate(block.get("non_numerical") or []):
            path = f"attribute_defs.{section}.non_numerical[{i}]"
            if not isinstance(item, dict) or "key" not in item:
                issues.add(CatalogParseError("attribute def needs a key", path))
                continue
            non_numerical.append(
                NonNumericalAttributeDef(
                    key=str(item["key"]),
                    allowed_examples=tuple(str(v) for v in item.get("examples", []) or []),
                    set_valued=bool(item.get("set_valued", False)),
                )
            )
        schemas[kind] = schemas[kind].extended(numerical, non_numerical)
    return schemas


def _parse_entity(
    raw: dict,
    kind: EntityKind,
    schema: AttributeSchema,
    provider_ids: set[str],
    path: str,
    issues: _Issues,
) -> CatalogEntity | None:
    if not isinstance(raw, dict):
        issues.add(CatalogParseError("expected a map", path))
        return None
    entity_id = raw.get("id")
    if not entity_id or not isinstance(entity_id, str):
        issues.add(CatalogParseError("missing or non-string id", path))
        return None
    provider_id = raw.get("provider")
    if not isinstance(provider_id, str) or provider_id not in provider_ids:
        issues.add(DanglingReferenceError(f"unknown provider {provider_id!r}", f"{path}.provider"))
        provider_id = str(provider_id)
    attrs = raw.get("attributes")
    if not isinstance(attrs, dict):
        issues.add(CatalogParseError("missing attributes map", path))
        return None

    numerical: dict[str, float] = {}
    non_numerical: dict[str, str | frozenset[str]] = {}
    for key, value in attrs.items():
        apath = f"{path}.attributes.{key}"
        if key in schema.numerical:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                issues.add(SchemaError("numerical attribute needs a number", apath))
                continue
            value = float(value)
            spec = schema.numerical[key]
            if not spec.value_range.contains(value):
                issues.add(
                    ValueRangeError(
                        f"value {value:g} outside range {spec.value_range} for {entity_id!r}",
                        apath,
                    )
                )
                continue
            numerical[key] = value
        elif key in schema.non_numerical:
            spec = schema.non_numerical[key]
            if spec.set_valued:
                if isinstance(value, str):
                    value = [value]
                if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                    issues.add(SchemaError("set-valued attribute needs a list of strings", apath))
                    continue
                non_numerical[key] = frozenset(value)
            else:
                if not isinstance(value, str):
                    issues.add(SchemaError("non-numerical attribute needs a string", apath))
                    continue
                non_numerical[key] = value
        else:
            issues.add(SchemaError(f"unknown attribute key {key!r} for {kind.value}", apath))
    for key in schema.numerical:
        if key not in numerical and f"{path}.attributes.{key}" not in [e.path for e in issues.errors]:
            issues.add(SchemaError(f"missing numerical attribute {key!r}", f"{path}.attributes"))
    for key in schema.non_numerical:
        if key not in non_numerical and f"{path}.attributes.{key}" not in [e.path for e in issues.errors]:
            issues.add(SchemaError(f"missing non-numerical attribute {key!r}", f"{path}.attributes"))
    return CatalogEntity(entity_id, kind, provider_id, numerical, non_numerical)


def _parse_document(doc, issues: _Issues) -> Catalog:
    if not isinstance(doc, dict):
        issues.add(CatalogParseError("catalog document must be a map"))
        doc = {}

    providers: list[Provider] = []
    seen: set[str] = set()
    for i, raw in enumerate(_require(doc, "providers", issues)):
        path = f"providers[{i}]"
        if not isinstance(raw, dict) or not raw.get("id"):
            issues.add(CatalogParseError("provider needs an id", path))
            continue
        pid = str(raw["id"])
        if pid in seen:
            issues.add(CatalogParseError(f"duplicate provider id {pid!r}", path))
            continue
        seen.add(pid)
        providers.append(Provider(pid, str(raw.get("name", pid))))
    provider_ids = {p.id for p in providers}

    schemas = _parse_attribute_defs(doc, issues)

    images: list[CatalogEntity] = []
    for i, raw in enumerate(_require(doc, "images", issues)):
        entity = _parse_entity(
            raw, EntityKind.VM_IMAGE, schemas[EntityKind.VM_IMAGE], provider_ids,
            f"images[{i}]", issues,
        )
        if entity is not None:
            images.append(entity)
    services: list[CatalogEntity] = []
    for i, raw in enumerate(_require(doc, "services", issues)):
        entity = _parse_entity(
            raw, EntityKind.INFRA_SERVICE, schemas[EntityKind.INFRA_SERVICE], provider_ids,
            f"services[{i}]", issues,
        )
        if entity is not None:
            services.append(entity)

    for name, entities in (("images", images), ("services", services)):
        ids = [e.id for e in entities]
        for dup in {x for x in ids if ids.count(x) > 1}:
            issues.add(CatalogParseError(f"duplicate id {dup!r}", name))

    image_ids = {e.id for e in images}
    service_ids = {e.id for e in services}
    pairs: set[tuple[str, str]] = set()
    for i, raw in enumerate(_require(doc, "dependencies", issues)):
        path = f"dependencies[{i}]"
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            issues.add(CatalogParseError("dependency must be an [image_id, service_id] pair", path))
            continue
        image_id, service_id = str(raw[0]), str(raw[1])
        if image_id not in image_ids:
            issues.add(DanglingReferenceError(f"unknown image id {image_id!r}", path))
            continue
        if service_id not in service_ids:
            issues.add(DanglingReferenceError(f"unknown service id {service_id!r}", path))
            continue
        pairs.add((image_id, service_id))

    return Catalog(
        providers=tuple(providers),
        image_schema=schemas[EntityKind.VM_IMAGE],
        service_schema=schemas[EntityKind.INFRA_SERVICE],
        images=tuple(images),
        services=tuple(services),
        dependencies=DependencySet(frozenset(pairs)),
    )


def _load_yaml(source: str | bytes | Path | IO) -> object:
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CatalogParseError(f"invalid YAML: {exc}") from None


def load_catalog(source: str | bytes | Path | IO) -> Catalog:
    """Parse and validate a catalog document, rejecting on first violation."""
    doc = _load_yaml(source)
    return _parse_document(doc, _Issues(fail_fast=True))


def parse_catalog(doc: dict) -> Catalog:
    """Validate an already-deserialized catalog document (fail-fast)."""
    return _parse_document(doc, _Issues(fail_fast=True))


def catalog_violations(source: str | bytes | Path | IO) -> list[CatalogError]:
    """Collect every invariant violation in the document (no fail-fast)."""
    try:
        doc = _load_yaml(source)
    except CatalogParseError as exc:
        return [exc]
    issues = _Issues(fail_fast=False)
    _parse_document(doc, issues)
    return issues.errors


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _entity_to_dict(entity: CatalogEntity, schema: AttributeSchema) -> dict:
    attrs: dict[str, object] = {}
    for key in schema.numerical:
        if key in entity.numerical:
            attrs[key] = entity.numerical[key]
    for key in schema.non_numerical:
        if key in entity.non_numerical:
            value = entity.non_numerical[key]
            attrs[key] = sorted(value) if isinstance(value, frozenset) else value
    return {"id": entity.id, "provider": entity.provider_id, "attributes": attrs}


def _schema_extensions(schema: AttributeSchema, kind: EntityKind) -> dict:
    base = builtin_schema(kind)
    out: dict[str, list] = {}
    extra_num = [d for k, d in schema.numerical.items() if k not in base.numerical]
    extra_non = [d for k, d in schema.non_numerical.items() if k not in base.non_numerical]
    if extra_num:
        out["numerical"] = [
            {
                "key": d.key,
                "influence": d.influence.value,
                "metric": d.metric,
                "range": [d.value_range.lower, d.value_range.upper],
                "variability": d.variability.value,
            }
            for d in extra_num
        ]
    if extra_non:
        out["non_numerical"] = [
            {"key": d.key, "examples": list(d.allowed_examples), "set_valued": d.set_valued}
            for d in extra_non
        ]
    return out


def catalog_to_dict(catalog: Catalog) -> dict:
    """Canonical document form; feeds both YAML persistence and the server."""
    doc: dict[str, object] = {
        "providers": [{"id": p.id, "name": p.name} for p in catalog.providers],
    }
    defs: dict[str, dict] = {}
    image_ext = _schema_extensions(catalog.image_schema, EntityKind.VM_IMAGE)
    service_ext = _schema_extensions(catalog.service_schema, EntityKind.INFRA_SERVICE)
    if image_ext:
        defs["images"] = image_ext
    if service_ext:
        defs["services"] = service_ext
    if defs:
        doc["attribute_defs"] = defs
    doc["images"] = [_entity_to_dict(e, catalog.image_schema) for e in catalog.images]
    doc["services"] = [_entity_to_dict(e, catalog.service_schema) for e in catalog.services]
    doc["dependencies"] = [list(p) for p in sorted(catalog.dependencies.pairs)]
    return doc


def save_catalog(catalog: Catalog, target: Path | IO | None = None) -> str:
    """Serialize to the canonical YAML form; returns the document text."""
    text = yaml.safe_dump(catalog_to_dict(catalog), sort_keys=False, default_flow_style=False)
    if isinstance(target, Path):
        target.write_text(text, encoding="utf-8")
    elif target is not None:
        target.write(text)
    return text


# ---------------------------------------------------------------------------
# Synthetic generation
# ---------------------------------------------------------------------------

_SYNTH_PROVIDERS = (
    Provider("prov-a", "Provider A"),
    Provider("prov-b", "Provider B"),
    Provider("prov-c", "Provider C"),
    Provider("prov-d", "Provider D"),
)

_LANG_POOL = ("Java", "Perl", "Ruby", "PHP", "Python")


def _sample_non_numerical(
    rng: random.Random, spec: NonNumericalAttributeDef
) -> str | frozenset[str]:
    pool = spec.allowed_examples or ("value-a", "value-b", "value-c")
    if spec.set_valued:
        k = rng.randint(1, min(3, len(_LANG_POOL)))
        return frozenset(rng.sample(_LANG_POOL, k))
    return rng.choice(pool)


def _synth_entity(
    rng: random.Random, entity_id: str, kind: EntityKind, schema: AttributeSchema,
    provider: Provider,
) -> CatalogEntity:
    numerical: dict[str, float] = {}
    for key, spec in schema.numerical.items():
        lo, hi = spec.sampling_bounds()
        numerical[key] = rng.uniform(lo, hi)
    # Keep latencies plausible: the max-latency draw must dominate the average.
    if "max_latency" in numerical and "avg_latency" in numerical:
        a, b = numerical["max_latency"], numerical["avg_latency"]
        numerical["max_latency"], numerical["avg_latency"] = max(a, b), min(a, b)
    non_numerical: dict[str, str | frozenset[str]] = {}
    for key, spec in schema.non_numerical.items():
        if key == "provider":
            non_numerical[key] = provider.name
        else:
            non_numerical[key] = _sample_non_numerical(rng, spec)
    return CatalogEntity(entity_id, kind, provider.id, numerical, non_numerical)


def generate_synthetic_catalog(
    m: int,
    n: int,
    seed: int,
    dependencies: str = "all",
) -> Catalog:
    """Deterministically generate m images and n services with in-range values.

    ``dependencies`` selects how the pair set D is populated:
      * ``"all"``: full cross product, the relaxed-feasibility setup used for
        scaling experiments (no pair is ever filtered out);
      * ``"provider"``: each image is compatible exactly with the services of
        one provider, mimicking per-provider image formats;
      * ``"none"``: empty set (callers bypassing the feasibility gate).
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    if dependencies not in ("all", "provider", "none"):
        raise ValueError(f"unknown dependency mode {dependencies!r}")
    rng = random.Random(seed)
    image_schema = builtin_schema(EntityKind.VM_IMAGE)
    service_schema = builtin_schema(EntityKind.INFRA_SERVICE)

    width = max(4, len(str(max(m, n))))
    images = tuple(
        _synth_entity(
            rng, f"img-{i:0{width}d}", EntityKind.VM_IMAGE, image_schema,
            rng.choice(_SYNTH_PROVIDERS),
        )
        for i in range(m)
    )
    services = tuple(
        _synth_entity(
            rng, f"svc-{j:0{width}d}", EntityKind.INFRA_SERVICE, service_schema,
            rng.choice(_SYNTH_PROVIDERS),
        )
        for j in range(n)
    )

    if dependencies == "all":
        pairs = frozenset((a.id, s.id) for a in images for s in services)
    elif dependencies == "provider":
        pairs = frozenset(
            (a.id, s.id)
            for a in images
            for s in services
            if s.provider_id == a.provider_id
        )
    else:
        pairs = frozenset()

    return Catalog(
        providers=_SYNTH_PROVIDERS,
        image_schema=image_schema,
        service_schema=service_schema,
        images=images,
        services=services,
        dependencies=DependencySet(pairs),
    )
