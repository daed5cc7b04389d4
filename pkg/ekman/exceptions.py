class EkmanError(Exception):
    """Base class for every error raised by the simulator."""


class ParameterError(EkmanError, ValueError):
    """Physical parameters violate a model constraint."""


class RangeError(ParameterError):
    """An input lies outside the range where the closed forms are evaluated."""


class ConstraintError(EkmanError):
    """A field does not satisfy the hydrostatic divergence constraint."""


class SolverError(EkmanError):
    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index

    def __str__(self):
        message = super().__str__()
        if self.step_index is None:
            return message
        return f"{message} (step {self.step_index})"


class CFLViolation(SolverError):
    pass


class NaNDetected(SolverError):
    pass


class NotConvergedError(EkmanError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(EkmanError):
    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line

    def __str__(self):
        message = super().__str__()
        if self.line is not None:
            return f"line {self.line}: {message}"
        return message


class SnapshotError(EkmanError):
    pass
