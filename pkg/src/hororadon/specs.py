"""Numerical settings shared by all modules.

Both classes are settings fragments, so they load from config files and
CLI flags with the same validation as :class:`hororadon.cli.RunConfig`.
"""
from math import inf, pi
from typing import Annotated

import numpy as np

from .config import settings, Check, positive, at_least


@settings
class QuadratureSpec:
    rel_tol: Annotated[float, Check(positive, "tolerances must be positive")] = 1e-10
    abs_tol: Annotated[float, Check(positive, "tolerances must be positive")] = 1e-14
    max_subdivisions: Annotated[int, Check(at_least(1), "at least one subdivision")] = 200
    truncation_radius: Annotated[float, Check(positive, "truncation radius must be positive")] = 40.0
    # |f(x)| <= C |x|^(-tail_exponent) for large |x|; inf for gaussian tails
    tail_exponent: float = inf

    def __check__(self):
        if not self.tail_exponent > 1:
            raise ValueError(f"QuadratureSpec.tail_exponent={self.tail_exponent!r}: "
                             f"tails decaying like |x|^-p need p > 1")


@settings
class GridSpec:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    points: Annotated[tuple[int, ...], Check(at_least(2), "at least two points per axis")]
    uniform: bool = True
    # periodic axes leave out the upper end point
    periodic: tuple[bool, ...] = ()

    def __check__(self):
        if not len(self.lower) == len(self.upper) == len(self.points):
            raise ValueError(f"GridSpec axes disagree: {self!r}")
        if any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"GridSpec needs upper > lower on every axis: {self!r}")
        if self.periodic and len(self.periodic) != len(self.points):
            raise ValueError(f"GridSpec.periodic must flag every axis: {self!r}")

    @property
    def ndim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.points)

    def is_periodic(self, axis: int) -> bool:
        return bool(self.periodic) and self.periodic[axis]

    def axis(self, axis: int) -> np.ndarray:
        lo, hi, n = self.lower[axis], self.upper[axis], self.points[axis]
        if self.is_periodic(axis):
            return lo + (hi - lo) * np.arange(n) / n
        if self.uniform:
            return np.linspace(lo, hi, n)
        # chebyshev points cluster toward both ends
        return lo + (hi - lo) * (1 - np.cos(np.pi * np.arange(n) / (n - 1))) / 2

    def axes(self) -> list[np.ndarray]:
        return [self.axis(i) for i in range(self.ndim)]

    def spacing(self, axis: int) -> float:
        if not self.uniform and not self.is_periodic(axis):
            raise ValueError("spacing is only defined on uniform axes")
        values = self.axis(axis)
        return float(values[1] - values[0])

    @classmethod
    def horospheres(cls, n_angle: int, n_s: int, s_max: float) -> "GridSpec":
        """(angle, A-parameter) grid over Xi, angle periodic on [0, 2pi)"""
        return cls(lower=(0.0, -s_max), upper=(2 * pi, s_max),
                   points=(n_angle, n_s), periodic=(True, False))

    @classmethod
    def line(cls, lower: float, upper: float, n: int) -> "GridSpec":
        return cls(lower=(lower,), upper=(upper,), points=(n,))
