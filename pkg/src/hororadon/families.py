"""Function family ids as used on the command line and in config files.

An id is ``kind:arguments``, e.g. ``ds:3`` or ``bump:0,1,0,0.5``. Every kind
is a settings fragment discriminated by its ``kind`` field, so a config
file can spell the same family out field by field::

    family.kind = "bump"
    family.center = (0.0, 1.0, 0.0)
    family.width = 0.5
"""
from logging import getLogger
from typing import Annotated, Any

from .config import settings, Check, at_least, positive
from .errors import UnsupportedFamily
from .funcspace import FunctionOnY, discrete_series, gaussian_bump, radial_bump
from .groupcase import GroupFunction, ds_coefficient, gaussian_entries
from .variety import PointY


logger = getLogger(__name__)


def _numbers(kind: str, arguments: str, count: int) -> list[float]:
    parts = [p for p in arguments.split(",") if p.strip()]
    if len(parts) != count:
        raise ValueError(f"family {kind!r} takes {count} argument(s), got {arguments!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise ValueError(f"family {kind!r}: arguments must be numbers, got {arguments!r}") from e


def _integer(kind: str, arguments: str) -> int:
    (value,) = _numbers(kind, arguments, 1)
    if not value.is_integer():
        raise ValueError(f"family {kind!r} needs an integer, got {arguments!r}")
    return int(value)


@settings(discriminator_field=("kind", "ds"))
class DiscreteSeriesFamily:
    n: Annotated[int, Check(at_least(2), "discrete series witnesses start at n = 2")] = 2

    @classmethod
    def fields_from(cls, arguments: str) -> dict[str, Any]:
        return {"n": _integer("ds", arguments)}

    def build(self) -> FunctionOnY:
        return discrete_series(self.n)


@settings(discriminator_field=("kind", "bump"))
class BumpFamily:
    center: tuple[float, float, float] = (0.0, 1.0, 0.0)
    width: Annotated[float, Check(positive, "bump width must be positive")] = 1.0

    @classmethod
    def fields_from(cls, arguments: str) -> dict[str, Any]:
        *center, width = _numbers("bump", arguments, 4)
        return {"center": tuple(center), "width": width}

    def build(self) -> FunctionOnY:
        return gaussian_bump(PointY(*self.center), self.width)


@settings(discriminator_field=("kind", "kbump"))
class RadialBumpFamily:
    width: Annotated[float, Check(positive, "bump width must be positive")] = 1.0

    @classmethod
    def fields_from(cls, arguments: str) -> dict[str, Any]:
        (width,) = _numbers("kbump", arguments, 1)
        return {"width": width}

    def build(self) -> FunctionOnY:
        return radial_bump(self.width)


@settings(discriminator_field=("kind", "grpds"))
class GroupDiscreteSeriesFamily:
    k: Annotated[int, Check(at_least(3), "φ_k is integrable on G from k = 3 on")] = 4

    @classmethod
    def fields_from(cls, arguments: str) -> dict[str, Any]:
        return {"k": _integer("grpds", arguments)}

    def build(self) -> GroupFunction:
        return ds_coefficient(self.k)


@settings(discriminator_field=("kind", "grpgauss"))
class GroupGaussianFamily:
    width: Annotated[float, Check(positive, "width must be positive")] = 1.0

    @classmethod
    def fields_from(cls, arguments: str) -> dict[str, Any]:
        (width,) = _numbers("grpgauss", arguments, 1)
        return {"width": width}

    def build(self) -> GroupFunction:
        return gaussian_entries(self.width)


type Family = (DiscreteSeriesFamily | BumpFamily | RadialBumpFamily
               | GroupDiscreteSeriesFamily | GroupGaussianFamily)


FAMILIES: dict[str, type] = {
    cls.discriminator().default_value: cls
    for cls in (DiscreteSeriesFamily, BumpFamily, RadialBumpFamily,
                GroupDiscreteSeriesFamily, GroupGaussianFamily)
}


@settings
class FamilyChoice:
    family: (DiscreteSeriesFamily | BumpFamily | RadialBumpFamily
             | GroupDiscreteSeriesFamily | GroupGaussianFamily)


def family_fields(family_id: str) -> dict[str, Any]:
    """raw fields of ``kind:arguments``, not yet validated"""
    kind, sep, arguments = family_id.strip().partition(":")
    if kind not in FAMILIES:
        raise UnsupportedFamily(
            f"unknown family {kind!r}; expected one of {', '.join(sorted(FAMILIES))}")
    if not sep:
        raise ValueError(f"family id {family_id!r} lacks its arguments ({kind}:...)")
    return {"kind": kind} | FAMILIES[kind].fields_from(arguments)


def load_family(data: str | dict[str, Any]) -> Family:
    """a family fragment from an id string or from config-file fields"""
    if isinstance(data, str):
        data = family_fields(data)
    family = FamilyChoice(family=data).family
    logger.debug(f"loaded {family!r}")
    return family


def is_group_family(family: Family) -> bool:
    return isinstance(family, (GroupDiscreteSeriesFamily, GroupGaussianFamily))
