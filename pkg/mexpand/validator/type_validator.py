"""Validation of declarative documents against pydantic models."""

from typing import Generic, TypeVar

import orjson
import pydantic

from mexpand.validator.result import Failure, Result, Success

T = TypeVar("T", covariant=True)

_SCALARS = (str, int, float, bool, type(None))


class TypeValidator(Generic[T]):
    """Checks experiment documents against a schema type.

    Every rejected field is reported on its own line as `path: reason`, so one
    pass over a document lists all of its problems.
    """

    def __init__(self, py_type: type[T]):
        self._adapter: pydantic.TypeAdapter[T] = pydantic.TypeAdapter(py_type)

    def validate_object(self, obj: object) -> Result[T]:
        try:
            return Success(self._adapter.validate_python(obj))
        except pydantic.ValidationError as e:
            return Failure(describe_errors(e))

    def validate_json(self, text: str | bytes) -> Result[T]:
        try:
            return Success(self._adapter.validate_json(text))
        except pydantic.ValidationError as e:
            return Failure(describe_errors(e))


def describe_errors(error: pydantic.ValidationError) -> str:
    lines = []
    for item in error.errors(include_url=False):
        path = ".".join(map(str, item["loc"])) or "<document>"
        line = f"{path}: {item['msg']}"
        value = item.get("input")
        # nested objects would repeat the whole subtree
        if isinstance(value, _SCALARS):
            line += f" (got {orjson.dumps(value).decode()})"
        lines.append(line)
    header = f"{len(lines)} problems in the document:\n" if len(lines) > 1 else ""
    return header + "\n".join(lines)
