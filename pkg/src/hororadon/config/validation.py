from logging import getLogger
from types import UnionType, NoneType
from typing import (
    Any,
    get_args,
    get_origin,
    Union,
    TypeGuard,
)

from .field import Field
from .protocol import SettingsFragment, is_settings_fragment_type


logger = getLogger(__name__)


def is_union_type_annotation(obj: Any) -> TypeGuard[UnionType]:
    return get_origin(obj) in (Union, UnionType)


def is_optional_annotation(obj: Any) -> bool:
    if not is_union_type_annotation(obj):
        return False
    args = get_args(obj)
    return len(args) == 2 and args[1] is NoneType


def discriminating_field_names_of_union_members(union: UnionType) -> set[str]:
    fragments = [dtype for dtype in get_args(union)
                 if is_settings_fragment_type(dtype)]
    return {field.name for sf in fragments
            if (field := sf.discriminator()) is not None}


def ensure_unions_are_discriminated(cls: SettingsFragment):
    """a union of fragments must be told apart by one shared field"""
    for field in cls._fields.values():
        if not is_union_type_annotation(field.type):
            continue
        if is_optional_annotation(field.type):
            continue

        args = get_args(field.type)
        inappropriate = [repr(d) for d in args if not is_settings_fragment_type(d)]
        if inappropriate:
            raise TypeError(
                "fields which declare union types must exclusively contain "
                f"settings fragments! {cls!r}.{field.name}: {field.type!r} has "
                f"inappropriate types: {', '.join(inappropriate)}!")

        names = discriminating_field_names_of_union_members(field.type)
        if len(names) > 1:
            raise TypeError(
                f"{cls.__name__}.{field.name}: {field.type!r} ambiguous "
                f"discriminating field names: {', '.join(sorted(names))}!")
        if any(d.discriminator() is None for d in args):
            raise TypeError(
                f"{cls.__name__}.{field.name}: every member of {field.type!r} "
                f"needs a discriminating field!")


def ensure_there_is_at_most_one_discriminating_field(cls: SettingsFragment):
    discriminating = [f for f in cls._fields.values() if f.discriminates]
    for field in discriminating:
        logger.debug(f"{cls!r} has discriminating field {field.name!r}")
    if len(discriminating) > 1:
        raise TypeError(
            f"Only one discriminating field is allowed! {cls!r} discriminates "
            f"{', '.join([d.name for d in discriminating])}!")


def ensure_containers_declare_their_content(cls: SettingsFragment):
    for field in cls._fields.values():
        origin = get_origin(field.type)
        if field.type in (list, tuple) or origin in (list, tuple):
            args = get_args(field.type)
            if len(args) == 0:
                raise TypeError(f"{cls!r}.{field.name} must explicitly specify "
                                f"the expected type of its content!")
            if origin is list and len(args) > 1:
                raise TypeError(
                    f"{cls!r}.{field.name} is not allowed to hold more than one "
                    f"embedded type! (got {args!r})")


def validate_settings_fragment_class(cls: SettingsFragment):
    ensure_there_is_at_most_one_discriminating_field(cls)
    ensure_unions_are_discriminated(cls)
    ensure_containers_declare_their_content(cls)
