from dataclasses import dataclass
from typing import Generic, NoReturn, TypeAlias, TypeVar

from mexpand.exceptions import ConfigError

T = TypeVar("T", covariant=True)


@dataclass(frozen=True)
class Success(Generic[T]):
    """A document that matched its schema, parsed into `value`."""

    value: T

    def unwrap(self) -> T:
        return self.value


@dataclass(frozen=True)
class Failure:
    """A rejected document; `message` names every offending path."""

    message: str

    def unwrap(self) -> NoReturn:
        raise ConfigError(self.message)


Result: TypeAlias = Success[T] | Failure
