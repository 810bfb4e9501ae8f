import ast
from collections.abc import Mapping
from logging import getLogger
from pathlib import Path
from types import NoneType, UnionType
from typing import Any, Iterator, Iterable, Literal, Union, get_args, get_origin

from .protocol import SettingsFragment, is_settings_fragment_type

logger = getLogger(__name__)


def coerce_types(value: Any, dtype: Any) -> Any:
    """the few lossless conversions a config file may rely on"""
    if isinstance(value, bool):
        return value

    if dtype is float and isinstance(value, int):
        return float(value)

    if dtype is complex and isinstance(value, (int, float)):
        return complex(value)

    if dtype is Path and isinstance(value, str):
        return Path(value)

    origin = get_origin(dtype)
    if origin in (Union, UnionType):
        args = get_args(dtype)
        if len(args) == 2 and args[1] is NoneType and value is not None:
            return coerce_types(value, args[0])
        return value

    if origin is list and isinstance(value, (list, tuple)):
        (inner,) = get_args(dtype)
        return [coerce_types(v, inner) for v in value]

    if origin is tuple and isinstance(value, (list, tuple)):
        args = get_args(dtype)
        if len(args) == 2 and args[1] is ...:
            return tuple(coerce_types(v, args[0]) for v in value)
        if len(args) == len(value):
            return tuple(coerce_types(v, a) for v, a in zip(value, args))
        return tuple(value)

    return value


def _mismatch(value: Any, dtype: Any, detail: str = "") -> TypeError:
    return TypeError(f"{value!r} ({type(value).__name__}) is no {dtype!r}{detail}")


def _homogeneous(args: tuple[Any, ...]) -> bool:
    """``tuple[X, ...]``"""
    return len(args) == 2 and args[1] is ...


def validate_type(value: Any, dtype: Any):
    """raises ``TypeError`` unless ``value`` is an instance of ``dtype``"""
    origin, args = get_origin(dtype), get_args(dtype)
    if origin is None:
        if not (isinstance(dtype, type) and isinstance(value, dtype)):
            raise _mismatch(value, dtype)
    elif origin in (UnionType, Union):
        for option in args:
            try:
                return validate_type(value, option)
            except TypeError:
                pass
        raise _mismatch(value, dtype)
    elif origin is Literal:
        if value not in args:
            raise _mismatch(value, dtype)
    elif origin in (list, tuple, dict):
        if not isinstance(value, origin):
            raise _mismatch(value, dtype)
        if origin is dict:
            key_type, item_type = args
            pairs = [(k, key_type) for k in value] + [(v, item_type) for v in value.values()]
        elif origin is list or _homogeneous(args):
            pairs = [(element, args[0]) for element in value]
        elif len(args) == len(value):
            pairs = list(zip(value, args))
        else:
            raise _mismatch(value, dtype, f": needs {len(args)} entries")
        for element, element_type in pairs:
            validate_type(element, element_type)
    else:
        raise _mismatch(value, dtype)


def select_fragment(dtypes: Iterable[Any], value: Any) -> type[SettingsFragment] | None:
    """pick the union member whose discriminator matches ``value``"""
    fragments = [dtype for dtype in dtypes if is_settings_fragment_type(dtype)]
    if not fragments or not isinstance(value, Mapping):
        return None

    key = fragments[0].discriminator()
    key_name = key.alias or key.name
    if key_name not in value:
        logger.warning(f"{key_name!r} missing, cannot choose amongst "
                       f"{', '.join(f.__name__ for f in fragments)}")
        return None

    by_value = {f.discriminator().default_value: f for f in reversed(fragments)}
    chosen = by_value.get(value[key_name])
    if chosen is None:
        logger.warning(f"no settings fragment loads {key_name}={value[key_name]!r}")
    else:
        logger.debug(f"{key_name}={value[key_name]!r} selects {chosen.__name__}")
    return chosen


def _from_union(dtype: Any, value: Any) -> Any:
    options = get_args(dtype)
    if value is None or type(value) in options:
        return value
    if (chosen := select_fragment(options, value)) is not None:
        return chosen(**value)
    if any(is_settings_fragment_type(option) for option in options):
        raise TypeError(f"{value!r} loads into none of {', '.join(map(repr, options))}")
    return value


def _instantiate(dtype: Any, value: Any) -> Any:
    """turn mappings into the fragments ``dtype`` declares"""
    if is_settings_fragment_type(dtype):
        return dtype(**value) if isinstance(value, Mapping) else value
    origin = get_origin(dtype)
    if origin in (Union, UnionType):
        return _from_union(dtype, value)
    if origin is list and value is not None:
        (element_type,) = get_args(dtype)
        return [_instantiate(element_type, element) for element in value]
    return value


def load(cls: type[SettingsFragment], **raw_data: Any) -> Iterator[tuple[str, Any]]:
    """yields (field name, validated value) for every field of ``cls``"""
    by_key = {field.alias or field.name: field for field in cls._fields.values()}
    if unknown := set(raw_data) - set(by_key):
        raise AttributeError(f"{cls.__name__!r} has no fields named "
                             f"{', '.join(sorted(unknown))}")

    for key, field in by_key.items():
        if key in raw_data:
            value = raw_data[key]
        elif field.has_default:
            value = field.default_value
        else:
            raise AttributeError(f"Missing value for {key!r} in {cls.__name__!r}")

        value = coerce_types(_instantiate(field.type, value), field.type)
        try:
            validate_type(value, field.type)
        except TypeError as e:
            raise TypeError(f"{cls.__name__}.{field.name}: {e}") from e

        for check in field.checks:
            check(cls.__name__, field.name, value)
        yield field.name, value


def _parse_value(text: str) -> Any:
    text = text.strip()
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        pass
    try:
        # inf and nan are no python literals
        return float(text)
    except ValueError:
        return text


def parse_flat(text: str) -> dict[str, Any]:
    """parse ``key = value`` lines; dotted keys address embedded fragments

    blank lines and lines starting with ``#`` are ignored. values are read
    as python literals where possible and kept as strings otherwise.
    """
    data: dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {number}: expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        *parents, leaf = [part.strip() for part in key.split(".")]
        target = data
        for parent in parents:
            target = target.setdefault(parent, {})
            if not isinstance(target, dict):
                raise ValueError(f"line {number}: {key.strip()!r} nests below a value")
        target[leaf] = _parse_value(raw)
    return data


def merged(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    """recursive merge, ``override`` wins"""
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = merged(out[key], value)
        else:
            out[key] = value
    return out
