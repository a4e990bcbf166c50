"""Exception types shared by the simulator modules."""


class SatchainError(Exception):
    """Base class for all simulator errors."""


class GeometryError(SatchainError):
    """Constellation geometry is invalid or violates line-of-sight constraints."""


class InfeasibleGeometryError(GeometryError):
    """No pass phase offers mutual visibility for the configured chain."""


class InfeasibleLinkError(SatchainError):
    """An elementary link has no signal path (zero heralding probability)."""


class ScenarioError(SatchainError):
    """Scenario file could not be parsed or failed validation."""
