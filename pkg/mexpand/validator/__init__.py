from mexpand.validator.result import Failure, Result, Success
from mexpand.validator.type_validator import TypeValidator

__all__ = ["Failure", "Result", "Success", "TypeValidator"]
