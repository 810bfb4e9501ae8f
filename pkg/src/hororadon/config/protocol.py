"""What the ``settings`` decorator adds to a class."""
from typing import Any, Protocol, TypeGuard

from .field import Field


# marker attribute set on every decorated class
FRAGMENT_MARKER = "__hororadon_settings__"


class SettingsFragment(Protocol):
    _fields: dict[str, Field]

    def __init__(self, **kwargs: Any): ...

    @classmethod
    def _declare(cls, name: str, dtype: type, default_value: Any) -> Field: ...

    @classmethod
    def discriminator(cls) -> Field | None: ...


def is_settings_fragment_type(obj: Any) -> TypeGuard[type[SettingsFragment]]:
    return isinstance(obj, type) and hasattr(obj, FRAGMENT_MARKER)


def is_settings_fragment(obj: Any) -> TypeGuard[SettingsFragment]:
    return not isinstance(obj, type) and is_settings_fragment_type(type(obj))
