"""Exceptions raised by pyDecisionGate.

All errors derive from ValueError so callers that only guard against bad input keep working.
"""


class DomainError(ValueError):
    pass


class FactorizationError(DomainError):
    pass


class ConfigurationError(ValueError):
    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path
        self.message = message


class PlanningError(ValueError):
    pass


class EvaluationError(ValueError):
    pass
