from dataclasses import dataclass
from typing import (
    Any,
    Callable,
    TypeVar,
    Generic,
    Type,
    Optional,
)


_T = TypeVar("_T")
@dataclass
class Field(Generic[_T]):
    name: str
    type: Type[_T]
    has_default: bool
    default_value: _T
    alias: Optional[str] = None
    discriminates: bool = False
    checks: tuple["Check", ...] = ()


class FieldAlias:
    """alternative key under which a field is looked up in raw data"""
    def __init__(self, alias: str):
        self.alias = alias


class Check:
    """invariant attached to a field via ``Annotated[float, Check(...)]``

    the predicate receives the loaded value; a falsy result rejects it.
    """
    def __init__(self, predicate: Callable[[Any], bool], message: str):
        self.predicate = predicate
        self.message = message

    def __call__(self, owner: str, field_name: str, value: Any):
        if not self.predicate(value):
            raise ValueError(
                f"{owner}.{field_name}={value!r} violates: {self.message}")


def positive(value) -> bool:
    if isinstance(value, (tuple, list)):
        return all(positive(v) for v in value)
    return value > 0


def at_least(bound):
    def predicate(value) -> bool:
        if isinstance(value, (tuple, list)):
            return all(v >= bound for v in value)
        return value >= bound
    return predicate
