from typing import (
    TypeVar,
    Generic,
    Type,
    get_origin,
    Annotated,
    get_args
)
from dataclasses import dataclass

from .protocol import SettingsFragment


type Name = str
type DefaultValue = str


_T = TypeVar("_T")
@dataclass
class DiscriminatorField(Generic[_T]):
    """field whose fixed value selects a member of a union of fragments

    function families are told apart this way, e.g. ``kind = "ds"``.
    """
    name: str
    default_value: _T

    @property
    def type(self) -> Type[_T]:
        return type(self.default_value)

    def __iter__(self):
        yield self.name
        yield self.default_value


def attach_discriminator(
        cls: type[SettingsFragment],
        df: DiscriminatorField | tuple[Name, DefaultValue]):
    if isinstance(df, tuple):
        df = DiscriminatorField(*df)
    if df.name in cls._fields:
        # the class body may repeat the field, but only with the same type
        declared = cls.__annotations__.get(df.name)
        if get_origin(declared) is Annotated:
            declared = get_args(declared)[0]
        if declared is not None and declared is not df.type:
            raise TypeError(
                f"mismatch for {cls.__name__}.{df.name} types defined in "
                f"decorator and class body! (decorator: {df.type}, "
                f"class body: {declared})")
        cls._fields[df.name].default_value = df.default_value
        cls._fields[df.name].has_default = True
        setattr(cls, df.name, df.default_value)
    else:
        cls._declare(df.name, type(df.default_value), df.default_value)

    cls._fields[df.name].discriminates = True
    return cls
