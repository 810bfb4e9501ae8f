from logging import getLogger
from typing import (
    Annotated,
    Any,
    Callable,
    Iterable,
    TypeVar,
    cast,
    dataclass_transform,
    get_args,
    get_origin,
    overload,
)

from .discriminator import DiscriminatorField, attach_discriminator
from .field import Field, FieldAlias, Check
from .protocol import (
    FRAGMENT_MARKER,
    SettingsFragment,
    is_settings_fragment,
    is_settings_fragment_type,
)
from .validation import validate_settings_fragment_class
from .loading import load


logger = getLogger(__name__)


C = TypeVar("C", bound=type[Any])
F = TypeVar("F", bound=SettingsFragment)


type Name = str
type DefaultValue = Any


def _fragment_repr(self: SettingsFragment):
    parts = []
    for name in self._fields:
        if hasattr(self, name):
            parts.append(f"{name}={getattr(self, name)!r}")
        else:
            parts.append(f"<missing value for {name!r}>")
    return f"{self.__class__.__name__}({', '.join(parts)})"


def _fragment_init(self: SettingsFragment, **kwargs):
    for field, value in load(self.__class__, **kwargs):
        setattr(self, field, value)
    # cross-field invariants
    if (post_check := getattr(self, "__check__", None)) is not None:
        post_check()


def _fragment_eq(self: SettingsFragment, other: object):
    if type(self) is not type(other):
        return NotImplemented
    return as_dict(self) == as_dict(other)


# *** class-level helpers *****************************************************

def declare_field(cls: type[SettingsFragment], name: str, dtype: type,
                  default_value: Any) -> Field:
    """add a defaulted field after the class body ran"""
    cls.__annotations__[name] = dtype
    setattr(cls, name, default_value)
    cls._fields = fields_of(cls)
    return cls._fields[name]


def discriminator_of(cls: type[SettingsFragment]) -> Field | None:
    return next((f for f in cls._fields.values() if f.discriminates), None)


def fields_of(cls) -> dict[str, Field]:
    return {field.name: field for field in _declared_fields(cls)}


def _declared_fields(cls) -> Iterable[Field]:
    """retrieve field declarations from the class annotations"""
    for field_name, field_type in cls.__annotations__.items():
        if field_name.startswith("_"):
            continue

        alias = None
        checks: list[Check] = []
        if get_origin(field_type) is Annotated:
            field_type, *annotations = get_args(field_type)
            for annotation in annotations:
                if isinstance(annotation, FieldAlias):
                    alias = annotation.alias
                elif isinstance(annotation, Check):
                    checks.append(annotation)

        if is_settings_fragment_type(field_type):
            # embedded fragments default to their own defaults
            has_default = True
            default_value = getattr(cls, field_name, {})
        else:
            has_default = hasattr(cls, field_name)
            default_value = getattr(cls, field_name, None)

        yield Field(name=field_name,
                    type=field_type,
                    has_default=has_default,
                    default_value=default_value,
                    alias=alias,
                    checks=tuple(checks))


def _attribute_is_overloaded(obj, attribute):
    """whether ``obj`` brings its own ``attribute`` (absent counts as no)"""
    if attribute not in vars(obj):
        return False
    if not hasattr(object, attribute):
        return True
    return getattr(obj, attribute) is not getattr(object, attribute)


def safely_setattr(obj, attr, value):
    if _attribute_is_overloaded(obj, attr):
        logger.debug(f"keeping overloaded attribute {attr!r} of {obj!r}")
        return
    setattr(obj, attr, value)


def make_settings_fragment(cls) -> type[SettingsFragment]:
    safely_setattr(cls, FRAGMENT_MARKER, True)
    for name, method in (("__init__", _fragment_init),
                         ("__repr__", _fragment_repr),
                         ("__eq__", _fragment_eq)):
        safely_setattr(cls, name, method)
    cls.__hash__ = None
    cls._fields = fields_of(cls)
    cls._declare = classmethod(declare_field)
    cls.discriminator = classmethod(discriminator_of)

    validate_settings_fragment_class(cls)
    return cls


# *** decorator ***************************************************************

@overload
def settings(__cls: C, /) -> C: ...
@overload
def settings(*,
             discriminator_field: DiscriminatorField[Any] | tuple[Name, DefaultValue] | None = ...
             ) -> Callable[[C], C]: ...


@dataclass_transform(kw_only_default=True)
def settings(
        __cls: C | None = None,
        *, discriminator_field: DiscriminatorField[Any] | tuple[Name, DefaultValue] | None = None,
) -> C | Callable[[C], C]:
    """
    decorates a settings class

    :param discriminator_field: tuple of field name and the value which
        selects this class amongst the members of a union.
    """
    def decorator(cls: C) -> C:
        out = make_settings_fragment(cls)
        if discriminator_field is not None:
            out = attach_discriminator(out, discriminator_field)
        return cast(C, out)

    if __cls is not None:
        # applied as ``@settings``
        return decorator(__cls)
    # applied as ``@settings(...)``, return the actual decorator
    return decorator


# *** instance helpers ********************************************************

def as_dict(fragment: SettingsFragment) -> dict[str, Any]:
    """plain nested mapping, loadable again via ``type(fragment)(**data)``"""
    out = {}
    for name, field in fragment._fields.items():
        value = getattr(fragment, name)
        if is_settings_fragment(value):
            value = as_dict(value)
        elif isinstance(value, list):
            value = [as_dict(v) if is_settings_fragment(v) else v for v in value]
        out[field.alias or name] = value
    return out


def evolve(fragment: F, **changes: Any) -> F:
    """copy of ``fragment`` with some fields replaced (and re-validated)"""
    data = as_dict(fragment)
    for name, value in changes.items():
        key = fragment._fields[name].alias or name
        data[key] = value
    return type(fragment)(**data)
