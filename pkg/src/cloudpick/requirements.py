"""Satisficing requirement checks and the relaxation scheme.

A requirement is a hard pass/fail predicate over one attribute. Numerical
requirements are strict comparisons (Max passes iff value < bound, Min iff
value > bound); non-numerical requirements are Equals / OneOf string
matches, case-insensitive with surrounding whitespace trimmed. For a
set-valued attribute the match succeeds when the intersection with the
allowed set is non-empty.

Relaxation level n admits every entity that fails at most n individual
predicates. This is counted per entity across the full requirement list,
never by re-running with requirements removed, so the admitted set for
level n is well defined and monotone in n.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .catalog import AttributeSchema, CatalogEntity, EntityKind
from .errors import RequirementError


class RequirementOp(str, Enum):
    MAX = "max"
    MIN = "min"
    EQUALS = "equals"
    ONE_OF = "one_of"


_NUMERIC_OPS = (RequirementOp.MAX, RequirementOp.MIN)


def _norm(text: str) -> str:
    return text.strip().casefold()


@dataclass(frozen=True)
class Requirement:
    """One satisficing constraint over a single attribute."""

    target_kind: EntityKind
    attribute_key: str
    op: RequirementOp
    bound: float | None = None
    values: frozenset[str] | None = None

    def __post_init__(self):
        if self.op in _NUMERIC_OPS:
            if self.bound is None:
                raise RequirementError(f"{self.op.value} requirement needs a numeric bound")
        else:
            if not self.values:
                raise RequirementError(f"{self.op.value} requirement needs at least one value")
            if self.op is RequirementOp.EQUALS and len(self.values) != 1:
                raise RequirementError("equals requirement takes exactly one value")

    def validate_against(self, schema: AttributeSchema) -> None:
        """Check the key exists and the op matches the attribute's value type."""
        if self.op in _NUMERIC_OPS:
            if self.attribute_key not in schema.numerical:
                raise RequirementError(
                    f"{self.op.value} requirement on unknown numerical attribute "
                    f"{self.attribute_key!r}"
                )
        elif self.attribute_key not in schema.non_numerical:
            raise RequirementError(
                f"{self.op.value} requirement on unknown non-numerical attribute "
                f"{self.attribute_key!r}"
            )

    def is_met_by(self, entity: CatalogEntity) -> bool:
        if entity.kind is not self.target_kind:
            raise RequirementError(
                f"requirement targets {self.target_kind.value}, got {entity.kind.value} "
                f"{entity.id!r}"
            )
        if self.op in _NUMERIC_OPS:
            if self.attribute_key not in entity.numerical:
                raise RequirementError(
                    f"unknown attribute key {self.attribute_key!r} on {entity.id!r}"
                )
            value = entity.numerical[self.attribute_key]
            if self.op is RequirementOp.MAX:
                return value < self.bound
            return value > self.bound
        if self.attribute_key not in entity.non_numerical:
            raise RequirementError(f"unknown attribute key {self.attribute_key!r} on {entity.id!r}")
        raw = entity.non_numerical[self.attribute_key]
        have = {_norm(v) for v in raw} if isinstance(raw, frozenset) else {_norm(raw)}
        allowed = {_norm(v) for v in self.values}
        return bool(have & allowed)


def max_requirement(kind: EntityKind, key: str, bound: float) -> Requirement:
    return Requirement(kind, key, RequirementOp.MAX, bound=bound)


def min_requirement(kind: EntityKind, key: str, bound: float) -> Requirement:
    return Requirement(kind, key, RequirementOp.MIN, bound=bound)


def equals_requirement(kind: EntityKind, key: str, value: str) -> Requirement:
    return Requirement(kind, key, RequirementOp.EQUALS, values=frozenset({value}))


def one_of_requirement(kind: EntityKind, key: str, values) -> Requirement:
    return Requirement(kind, key, RequirementOp.ONE_OF, values=frozenset(values))


@dataclass(frozen=True)
class RequirementReport:
    """Outcome of checking one entity against an ordered requirement list."""

    entity_id: str
    failed: tuple[int, ...]

    @property
    def failure_count(self) -> int:
        return len(self.failed)


def check(entity: CatalogEntity, requirements: list[Requirement]) -> RequirementReport:
    """Evaluate every predicate independently and record the failing indices."""
    failed = tuple(
        index for index, req in enumerate(requirements) if not req.is_met_by(entity)
    )
    return RequirementReport(entity.id, failed)


def filter_with_relaxation(
    entities: list[CatalogEntity] | tuple[CatalogEntity, ...],
    requirements: list[Requirement],
    relaxation_level: int,
) -> list[RequirementReport]:
    """Reports for the entities failing at most ``relaxation_level`` predicates.

    Input order is preserved. relaxation_level 0 is the strict conjunction of
    all requirements.
    """
    if relaxation_level < 0:
        raise RequirementError("relaxation level must be >= 0")
    if relaxation_level > len(requirements):
        raise RequirementError(
            f"relaxation level {relaxation_level} exceeds requirement count {len(requirements)}"
        )
    reports = [check(entity, requirements) for entity in entities]
    return [r for r in reports if r.failure_count <= relaxation_level]


def minimal_relaxation(
    entities: list[CatalogEntity] | tuple[CatalogEntity, ...],
    requirements: list[Requirement],
) -> int:
    """Smallest level admitting at least one entity.

    Always defined for a non-empty entity list: the level equal to the
    requirement count admits everything.
    """
    if not entities:
        raise RequirementError("minimal relaxation needs at least one entity")
    return min(check(entity, requirements).failure_count for entity in entities)
