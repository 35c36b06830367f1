"""Exception types shared across the package."""


class CtxmarkError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(CtxmarkError, ValueError):
    """An operation received data violating its preconditions."""


class ConfigurationError(CtxmarkError, ValueError):
    """A parameter combination cannot produce a working scheme."""


class ValidationError(ConfigurationError):
    """A single configuration field failed validation.

    Carries the offending field name so callers can surface it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UndefinedStatisticError(CtxmarkError, ArithmeticError):
    """A test statistic is undefined (e.g. empty scored set, zero weight mass)."""


class SourceError(CtxmarkError, RuntimeError):
    """A logits source failed while serving a step.

    Carries the step index at which the failure occurred.
    """

    def __init__(self, step: int, message: str):
        super().__init__(f"source failed at step {step}: {message}")
        self.step = step
