"""Exception hierarchy shared by all engine modules.

Every error that stems from user-supplied data carries a ``path`` locating
the offending element inside the source document (e.g.
``images[2].attributes.popularity``), so CLI and server can surface
actionable messages.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all cloudpick errors."""


class CatalogError(EngineError):
    """A catalog document violates the catalog contract."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class CatalogParseError(CatalogError):
    """The document is not well-formed (bad syntax, wrong value types)."""


class SchemaError(CatalogError):
    """An attribute key is unknown or used with the wrong value shape."""


class ValueRangeError(CatalogError):
    """A numerical attribute value lies outside its declared range."""


class DanglingReferenceError(CatalogError):
    """A provider or dependency reference does not resolve."""


class RequirementError(EngineError):
    """A requirement is malformed or cannot be applied to an entity."""


class HierarchyError(EngineError):
    """A goal hierarchy violates its structural invariants."""


class ConvergenceError(EngineError):
    """Power iteration failed to converge within the iteration cap."""


class ValidationError(EngineError):
    """A session document or engine input fails validation."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NoFeasibleCombinationError(EngineError):
    """No (image, service) pair is feasible under the dependency set."""
