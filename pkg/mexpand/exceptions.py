from typing import Any, Optional


class MexpandError(Exception):
    """
    Base exception for all library errors with standardized structure
    """

    exit_code: int = 1
    error_code: str = "internal_error"

    def __init__(
        self,
        detail: str = "An unexpected error occurred",
        error_code: Optional[str] = None,
        details: Optional[dict[str, Any]] = None,
    ):
        super().__init__(detail)
        self.detail = detail
        if error_code is not None:
            self.error_code = error_code
        self.details = details or {}

    def __str__(self) -> str:
        return f"{self.error_code}: {self.detail}"


class InvalidSpecError(MexpandError):
    """Exception raised for malformed kernels, operators, schemes or dilations"""

    error_code = "invalid_spec"

    def __init__(self, detail: str = "Invalid specification", details: Optional[dict[str, Any]] = None):
        super().__init__(detail=detail, details=details)


class CapabilityError(MexpandError):
    """Exception raised when an object cannot provide the requested quantity"""

    error_code = "capability"

    def __init__(self, detail: str = "Capability not available"):
        super().__init__(detail=detail)


class AccuracyError(MexpandError):
    """Exception raised when a numerical method misses its tolerance"""

    error_code = "accuracy_failure"

    def __init__(self, detail: str = "Accuracy target not met", estimate: float = float("nan")):
        super().__init__(detail=detail, details={"estimate": estimate})
        self.estimate = estimate


class ZeroCrossingError(MexpandError):
    """Exception raised when a Fourier multiplier vanishes where it is inverted"""

    error_code = "zero_crossing"

    def __init__(self, detail: str = "Multiplier vanishes", location: Any = None):
        super().__init__(detail=detail, details={"location": location})
        self.location = location


class PreconditionError(MexpandError):
    """Exception raised when the inputs violate a documented precondition"""

    error_code = "precondition"

    def __init__(self, detail: str = "Precondition violated"):
        super().__init__(detail=detail)


class LengthMismatchError(MexpandError):
    """Exception raised for grids of different sizes"""

    error_code = "length_mismatch"

    def __init__(self, detail: str = "Length mismatch"):
        super().__init__(detail=detail)


class ConfigError(MexpandError):
    """Exception raised for experiment configuration errors"""

    error_code = "config_error"

    def __init__(self, detail: str = "Configuration error"):
        super().__init__(detail=detail)


class ExperimentError(MexpandError):
    """Exception raised when an experiment cannot be executed"""

    error_code = "experiment_error"

    def __init__(self, detail: str = "Experiment error"):
        super().__init__(detail=detail)
