"""
Exception hierarchy. Every class is also a ValueError.
"""
from typing import Optional


class AmenabilityError(ValueError):
    """Base class for toolkit errors"""


class DomainError(AmenabilityError):
    """An operand lies outside the group, space or function class it was given to"""


class ConstructionError(AmenabilityError):
    """A group, automorphism family or action failed its construction checks"""


class ConfigurationError(AmenabilityError):
    """A computation needs structure (e.g. a right action) the setup does not provide"""


class ScenarioParseError(AmenabilityError):
    """Malformed scenario file; `location` is a JSON path such as $.group.family"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location or "$"
        super().__init__(f"{self.location}: {message}")
